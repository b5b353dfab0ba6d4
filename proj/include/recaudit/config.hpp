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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "recaudit/dataset.hpp"
#include "recaudit/recommender.hpp"

namespace recaudit {

// Fully validated pipeline configuration with defaults applied
// (list_size 10, cohorts 10, split_fraction 0.8, all five algorithms).
struct PipelineConfig {
  std::string ratings_path;
  std::string catalog_path;
  TableFormat format = TableFormat::kCsv;
  RatingScale scale;
  std::string out_dir;
  double split_fraction = 0.8;
  std::uint64_t split_seed = 42;
  int list_size = 10;
  int cohort_count = 10;
  std::optional<double> relevance_threshold;
  int jobs = 1;
  std::vector<ModelConfig> algorithms;  // run / report order

  std::string config_path;  // for manifests; empty for programmatic configs
};

// Parses and validates the flat key-value config format described in the
// README (global keys plus one optional `[algorithm <name>]` section per
// algorithm). Missing required keys, unknown keys/names and out-of-range
// values raise ConfigError naming the key.
PipelineConfig load_config(const std::string& path);

// Same, from in-memory text (config_path left empty).
PipelineConfig parse_config(const std::string& text);

struct ConfigOverrides {
  std::optional<std::uint64_t> split_seed;
  std::optional<std::string> out_dir;
  std::optional<int> jobs;
  std::optional<std::string> algorithm;  // restrict the run to one algorithm
};

void apply_overrides(PipelineConfig& config, const ConfigOverrides& overrides);

}  // namespace recaudit
