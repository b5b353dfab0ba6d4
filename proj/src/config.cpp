/*
 * Copyright 2026 The recaudit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "recaudit/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "recaudit/version.hpp"

namespace recaudit {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

double to_double(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE) {
    throw ConfigError("key '" + key + "': invalid number '" + value + "'");
  }
  return v;
}

std::int64_t to_int(const std::string& key, const std::string& value) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("key '" + key + "': invalid integer '" + value + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("key '" + key + "': invalid unsigned integer '" + value + "'");
  }
  return v;
}

// Raw key-value views of the config text: the global section plus one map
// per `[algorithm <name>]` section, in file order.
struct RawConfig {
  std::map<std::string, std::string> global;
  std::vector<std::pair<std::string, std::map<std::string, std::string>>> sections;
};

RawConfig read_raw(const std::string& text) {
  RawConfig raw;
  std::map<std::string, std::string>* current = &raw.global;
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", line_no);
      const std::string header = trim(line.substr(1, line.size() - 2));
      constexpr std::string_view kPrefix = "algorithm ";
      if (header.rfind(kPrefix, 0) != 0) {
        throw ParseError("unknown section '" + header + "' (expected [algorithm <name>])",
                         line_no);
      }
      const std::string name = trim(header.substr(kPrefix.size()));
      parse_algorithm(name);  // reject unknown names early
      raw.sections.emplace_back(name, std::map<std::string, std::string>{});
      current = &raw.sections.back().second;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (current->count(key) > 0) throw ParseError("duplicate key '" + key + "'", line_no);
    (*current)[key] = value;
  }
  return raw;
}

ModelConfig build_model_config(const std::string& name,
                               const std::map<std::string, std::string>* section) {
  const Algorithm algorithm = parse_algorithm(name);
  ModelConfig config = default_model_config(algorithm);
  if (section == nullptr) return config;
  for (const auto& [key, value] : *section) {
    if (key == "similarity") {
      config.similarity = parse_similarity(value);
    } else if (key == "neighborhood") {
      config.neighborhood_size = static_cast<int>(to_int(key, value));
    } else if (key == "factors") {
      config.factors = static_cast<int>(to_int(key, value));
    } else if (key == "learning_rate") {
      config.learning_rate = to_double(key, value);
    } else if (key == "regularization") {
      config.regularization = to_double(key, value);
    } else if (key == "epochs") {
      config.epochs = static_cast<int>(to_int(key, value));
    } else if (key == "seed") {
      config.seed = to_uint(key, value);
    } else {
      throw ConfigError("unknown key '" + key + "' in [algorithm " + name + "]");
    }
  }
  return config;
}

PipelineConfig build(const RawConfig& raw) {
  PipelineConfig config;
  std::vector<std::string> algorithm_names = {"user-knn", "item-knn", "svdpp", "bmf",
                                              "most-popular"};

  for (const auto& [key, value] : raw.global) {
    if (key == "ratings") {
      config.ratings_path = value;
    } else if (key == "catalog") {
      config.catalog_path = value;
    } else if (key == "format") {
      config.format = parse_table_format(value);
    } else if (key == "rating_min") {
      config.scale.min = to_double(key, value);
    } else if (key == "rating_max") {
      config.scale.max = to_double(key, value);
    } else if (key == "out") {
      config.out_dir = value;
    } else if (key == "split_fraction") {
      config.split_fraction = to_double(key, value);
    } else if (key == "split_seed") {
      config.split_seed = to_uint(key, value);
    } else if (key == "list_size") {
      config.list_size = static_cast<int>(to_int(key, value));
    } else if (key == "cohorts") {
      config.cohort_count = static_cast<int>(to_int(key, value));
    } else if (key == "relevance_threshold") {
      if (!value.empty()) config.relevance_threshold = to_double(key, value);
    } else if (key == "jobs") {
      config.jobs = static_cast<int>(to_int(key, value));
    } else if (key == "algorithms") {
      algorithm_names = split_list(value);
    } else if (key == "rng") {
      if (value != kRngAlgorithm) {
        throw ConfigError("key 'rng': this build implements " + std::string(kRngAlgorithm) +
                          ", got '" + value + "'");
      }
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }

  if (config.ratings_path.empty()) throw ConfigError("missing required key 'ratings'");
  if (config.catalog_path.empty()) throw ConfigError("missing required key 'catalog'");
  if (!(config.split_fraction > 0.0 && config.split_fraction < 1.0)) {
    throw ConfigError("key 'split_fraction': must be in (0, 1)");
  }
  if (config.list_size < 1) throw ConfigError("key 'list_size': must be >= 1");
  if (config.cohort_count < 2) throw ConfigError("key 'cohorts': must be >= 2");
  if (config.jobs < 1) throw ConfigError("key 'jobs': must be >= 1");
  if (!(config.scale.min < config.scale.max)) {
    throw ConfigError("key 'rating_min'/'rating_max': need rating_min < rating_max");
  }
  if (algorithm_names.empty()) throw ConfigError("key 'algorithms': need at least one algorithm");

  // validate every section present, whether or not its algorithm is listed
  for (const auto& [section_name, keys] : raw.sections) {
    build_model_config(section_name, &keys);
  }
  for (const std::string& name : algorithm_names) {
    const std::map<std::string, std::string>* section = nullptr;
    for (const auto& [section_name, keys] : raw.sections) {
      if (section_name == name) {
        section = &keys;
        break;
      }
    }
    config.algorithms.push_back(build_model_config(name, section));
  }
  const auto duplicate = [&] {
    for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
      for (std::size_t b = a + 1; b < config.algorithms.size(); ++b) {
        if (config.algorithms[a].algorithm == config.algorithms[b].algorithm) return true;
      }
    }
    return false;
  }();
  if (duplicate) throw ConfigError("key 'algorithms': duplicate algorithm name");
  return config;
}

}  // namespace

PipelineConfig parse_config(const std::string& text) { return build(read_raw(text)); }

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  PipelineConfig config = parse_config(ss.str());
  config.config_path = path;
  return config;
}

void apply_overrides(PipelineConfig& config, const ConfigOverrides& overrides) {
  if (overrides.split_seed) config.split_seed = *overrides.split_seed;
  if (overrides.out_dir) config.out_dir = *overrides.out_dir;
  if (overrides.jobs) {
    if (*overrides.jobs < 1) throw ConfigError("jobs must be >= 1");
    config.jobs = *overrides.jobs;
  }
  if (overrides.algorithm) {
    const Algorithm wanted = parse_algorithm(*overrides.algorithm);
    std::vector<ModelConfig> kept;
    for (const ModelConfig& mc : config.algorithms) {
      if (mc.algorithm == wanted) kept.push_back(mc);
    }
    if (kept.empty()) kept.push_back(default_model_config(wanted));
    config.algorithms = std::move(kept);
  }
}

}  // namespace recaudit
