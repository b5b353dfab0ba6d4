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

#include "recaudit/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "recaudit/io.hpp"
#include "recaudit/metrics.hpp"
#include "recaudit/version.hpp"

namespace recaudit {

namespace fs = std::filesystem;
using nlohmann::json;

OutputLayout::OutputLayout(const std::string& out_dir) : dir_(out_dir) {
  const fs::path dir(out_dir);
  train_csv = (dir / "train.csv").string();
  test_csv = (dir / "test.csv").string();
  split_manifest = (dir / "split_manifest.json").string();
  cohort_report_csv = (dir / "cohort_report.csv").string();
  significance_csv = (dir / "significance.csv").string();
  genre_frequency_csv = (dir / "genre_frequency.csv").string();
  amplification_csv = (dir / "amplification.csv").string();
  run_manifest = (dir / "run_manifest.json").string();
}

std::string OutputLayout::model_manifest(const std::string& algorithm) const {
  return (fs::path(dir_) / ("model_" + algorithm + ".json")).string();
}
std::string OutputLayout::recommendations_tsv(const std::string& algorithm) const {
  return (fs::path(dir_) / ("recs_" + algorithm + ".tsv")).string();
}
std::string OutputLayout::audit_csv(const std::string& algorithm) const {
  return (fs::path(dir_) / ("audit_" + algorithm + ".csv")).string();
}

namespace {

bool is_validation(const Error& e) {
  return dynamic_cast<const ConfigError*>(&e) != nullptr ||
         dynamic_cast<const ValidationError*>(&e) != nullptr ||
         dynamic_cast<const ArgumentError*>(&e) != nullptr ||
         dynamic_cast<const ParseError*>(&e) != nullptr ||
         dynamic_cast<const DataError*>(&e) != nullptr;
}

template <typename Fn>
void with_stage(const char* stage, Fn&& fn) {
  try {
    fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.what(), is_validation(e));
  } catch (const std::exception& e) {
    throw StageError(stage, e.what(), false);
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

void require_file(const std::string& path, const std::string& hint) {
  if (!fs::exists(path)) throw ValidationError("missing input " + path + " (" + hint + ")");
}

void ensure_out_dir(const PipelineConfig& config) {
  if (config.out_dir.empty()) {
    throw ConfigError("no output directory configured (key 'out' or --out)");
  }
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.out_dir);
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out.flush()) throw IoError("failed writing " + path);
}

json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid JSON in ") + path + ": " + e.what());
  }
  return j;
}

json model_config_json(const ModelConfig& mc) {
  json j;
  j["algorithm"] = to_string(mc.algorithm);
  j["seed"] = mc.seed;
  switch (mc.algorithm) {
    case Algorithm::kUserKnn:
    case Algorithm::kItemKnn:
      j["similarity"] = to_string(mc.similarity);
      j["neighborhood"] = mc.neighborhood_size;
      break;
    case Algorithm::kBmf:
    case Algorithm::kSvdpp:
      j["factors"] = mc.factors;
      j["learning_rate"] = mc.learning_rate;
      j["regularization"] = mc.regularization;
      j["epochs"] = mc.epochs;
      break;
    case Algorithm::kMostPopular:
      break;
  }
  return j;
}

RatingsTable load_split_table(const PipelineConfig& config, const std::string& path,
                              const std::string& hint) {
  require_file(path, hint);
  return load_ratings(path, TableFormat::kCsv, config.scale);
}

ItemCatalog load_base_catalog(const PipelineConfig& config) {
  require_file(config.catalog_path, "catalog path from config");
  return load_catalog(config.catalog_path, config.format);
}

// Catalog extended with any referenced-but-unlisted items under the Unknown
// category, so every audit and genre profile stays well-defined. The count
// of added items lands in the run manifest.
ItemCatalog extend_catalog(const ItemCatalog& base,
                           const std::vector<const RatingsTable*>& tables,
                           const std::vector<const std::vector<UserRecList>*>& rec_lists,
                           std::size_t* added_count = nullptr) {
  std::vector<ItemId> missing;
  std::unordered_set<ItemId> seen;
  const auto consider = [&](ItemId item) {
    if (!base.contains(item) && seen.insert(item).second) missing.push_back(item);
  };
  for (const RatingsTable* table : tables) {
    for (const ItemId item : table->items()) consider(item);
  }
  for (const auto* lists : rec_lists) {
    for (const UserRecList& list : *lists) {
      for (const ItemId item : list.items) consider(item);
    }
  }
  if (added_count != nullptr) *added_count = missing.size();
  if (missing.empty()) return base;
  return base.with_unknown_items(missing);
}

// --- stage bodies (shared between stage commands and run_pipeline) -------

void split_impl(const PipelineConfig& config, const OutputLayout& layout) {
  require_file(config.ratings_path, "ratings path from config");
  const RatingsTable table = load_ratings(config.ratings_path, config.format, config.scale);
  const Split split = split_ratings(table, config.split_fraction, config.split_seed);
  save_ratings_csv(layout.train_csv, split.train);
  save_ratings_csv(layout.test_csv, split.test);

  json manifest;
  manifest["rng"] = kRngAlgorithm;
  manifest["hash"] = kHashAlgorithm;
  manifest["seed"] = split.seed;
  manifest["fraction"] = split.fraction;
  manifest["input"] = {{"path", config.ratings_path},
                       {"hash", hash_file(config.ratings_path)},
                       {"n_ratings", table.size()}};
  manifest["train"] = {{"path", layout.train_csv},
                       {"hash", hash_file(layout.train_csv)},
                       {"n_ratings", split.train.size()}};
  manifest["test"] = {{"path", layout.test_csv},
                      {"hash", hash_file(layout.test_csv)},
                      {"n_ratings", split.test.size()}};
  write_json(layout.split_manifest, manifest);
}

void write_model_manifest(const OutputLayout& layout, const ModelConfig& mc,
                          const std::string& train_hash, double fit_ms) {
  json manifest;
  manifest["algorithm"] = to_string(mc.algorithm);
  manifest["config"] = model_config_json(mc);
  manifest["train"] = {{"path", layout.train_csv}, {"hash", train_hash}};
  manifest["fit_ms"] = fit_ms;
  write_json(layout.model_manifest(to_string(mc.algorithm)), manifest);
}

std::vector<std::unique_ptr<FittedModel>> train_impl(const PipelineConfig& config,
                                                     const OutputLayout& layout,
                                                     const RatingsTable& train) {
  const std::string train_hash = hash_file(layout.train_csv);
  std::vector<std::unique_ptr<FittedModel>> models;
  for (const ModelConfig& mc : config.algorithms) {
    const auto started = std::chrono::steady_clock::now();
    models.push_back(fit(train, mc, config.jobs));
    const double ms = elapsed_ms(started);
    std::cerr << "[train] " << to_string(mc.algorithm) << ": " << std::llround(ms) << " ms\n";
    write_model_manifest(layout, mc, train_hash, ms);
  }
  return models;
}

void recommend_impl(const PipelineConfig& config, const OutputLayout& layout,
                    const ItemCatalog& catalog,
                    const std::vector<std::unique_ptr<FittedModel>>& models) {
  for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
    const std::string name = to_string(config.algorithms[a].algorithm);
    const auto started = std::chrono::steady_clock::now();
    const RecommendationSet set =
        recommend_top_n(*models[a], config.list_size, catalog.item_ids(), config.jobs);
    write_recommendations_tsv(layout.recommendations_tsv(name), set);
    std::cerr << "[recommend] " << name << ": " << std::llround(elapsed_ms(started)) << " ms";
    if (!set.short_listed.empty()) {
      std::cerr << " (" << set.short_listed.size() << " users with short lists)";
    }
    std::cerr << '\n';
  }
}

// Verifies that a model manifest matches the current train.csv and config.
void check_model_manifest(const OutputLayout& layout, const ModelConfig& mc,
                          const std::string& train_hash) {
  const std::string name = to_string(mc.algorithm);
  const std::string path = layout.model_manifest(name);
  require_file(path, "run the train stage first");
  const json manifest = load_json(path);
  if (manifest.value("algorithm", "") != name) {
    throw ValidationError("model manifest " + path + " is for a different algorithm");
  }
  if (manifest.contains("train") && manifest["train"].value("hash", "") != train_hash) {
    throw ValidationError("model manifest " + path +
                          " was trained on a different train.csv; re-run train");
  }
  if (manifest.value("config", json::object()) != model_config_json(mc)) {
    throw ValidationError("model manifest " + path +
                          " was trained with different settings; re-run train");
  }
}

std::map<std::string, std::size_t> audit_impl(const PipelineConfig& config,
                                              const OutputLayout& layout,
                                              const RatingsTable& train,
                                              const RatingsTable& test,
                                              const ItemCatalog& base_catalog) {
  // Load every recommendations file first so the audits of all algorithms
  // share one category universe.
  std::vector<std::vector<UserRecList>> all_lists;
  for (const ModelConfig& mc : config.algorithms) {
    const std::string path = layout.recommendations_tsv(to_string(mc.algorithm));
    require_file(path, "run the recommend stage first");
    all_lists.push_back(read_recommendations_tsv(path, config.list_size));
  }
  std::vector<const std::vector<UserRecList>*> list_ptrs;
  for (const auto& lists : all_lists) list_ptrs.push_back(&lists);
  const ItemCatalog catalog = extend_catalog(base_catalog, {&train}, list_ptrs);
  const PopularityIndex theta = popularity(train);

  std::map<std::string, std::size_t> skipped;
  for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
    const std::string name = to_string(config.algorithms[a].algorithm);
    const AuditResult result =
        compute_user_audits(train, catalog, theta, all_lists[a], test,
                            config.relevance_threshold, config.list_size, config.jobs);
    write_audit_csv(layout.audit_csv(name), result.audits);
    skipped[name] = result.skipped.size();
    if (!result.skipped.empty()) {
      std::cerr << "[audit] " << name << ": skipped " << result.skipped.size()
                << " users (first: user " << result.skipped.front().user << ", "
                << result.skipped.front().reason << ")\n";
    }
  }
  return skipped;
}

struct ReportStats {
  std::size_t universe = 0;
  std::size_t dropped = 0;
};

ReportStats report_impl(const PipelineConfig& config, const OutputLayout& layout,
                        const RatingsTable& train, const ItemCatalog& base_catalog) {
  // Audit rows per algorithm, keyed by user.
  std::vector<std::vector<AuditRow>> rows_per_algo;
  for (const ModelConfig& mc : config.algorithms) {
    const std::string path = layout.audit_csv(to_string(mc.algorithm));
    require_file(path, "run the audit stage first");
    rows_per_algo.push_back(read_audit_csv(path));
  }

  // Cohorts partition the users audited for every algorithm; the profile
  // side is algorithm-independent, which is validated here.
  std::unordered_map<UserId, std::size_t> seen_count;
  std::unordered_map<UserId, double> profile_gap;
  for (const auto& rows : rows_per_algo) {
    for (const AuditRow& row : rows) {
      auto [it, inserted] = profile_gap.try_emplace(row.user, row.profile_gap);
      if (!inserted && std::fabs(it->second - row.profile_gap) > 1e-9) {
        throw ValidationError("profile_gap differs across audit files for user " +
                              std::to_string(row.user));
      }
      seen_count[row.user] += 1;
    }
  }
  std::vector<std::pair<UserId, double>> universe;
  for (const AuditRow& row : rows_per_algo.front()) {
    if (seen_count[row.user] == config.algorithms.size()) {
      universe.emplace_back(row.user, row.profile_gap);
    }
  }
  ReportStats stats;
  stats.universe = universe.size();
  stats.dropped = seen_count.size() - universe.size();
  if (stats.dropped > 0) {
    std::cerr << "[report] " << stats.dropped
              << " users lack audits for some algorithm and are excluded from cohorts\n";
  }

  const std::vector<Cohort> cohorts = form_cohorts(universe, config.cohort_count);

  std::vector<CohortMetrics> report_rows;
  std::vector<SignificanceRow> significance_rows;
  std::unordered_set<UserId> in_universe;
  for (const auto& [user, gap] : universe) in_universe.insert(user);
  for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
    std::vector<UserAudit> audits;
    audits.reserve(rows_per_algo[a].size());
    for (const AuditRow& row : rows_per_algo[a]) {
      if (in_universe.count(row.user) == 0) continue;
      UserAudit audit;
      audit.user = row.user;
      audit.profile_gap = row.profile_gap;
      audit.rec_gap = row.rec_gap;
      audit.mc = row.mc;
      audit.precision = row.precision;
      audit.n_profile = row.n_profile;
      audit.n_recs = row.n_recs;
      audits.push_back(std::move(audit));
    }
    const CohortReport report =
        cohort_report(cohorts, to_string(config.algorithms[a].algorithm), audits);
    report_rows.insert(report_rows.end(), report.rows.begin(), report.rows.end());
    significance_rows.insert(significance_rows.end(), report.significance.begin(),
                             report.significance.end());
  }
  write_cohort_report_csv(layout.cohort_report_csv, report_rows);
  write_significance_csv(layout.significance_csv, significance_rows);

  // Genre frequency of the training interactions vs each algorithm's
  // recommendations, over one shared category universe.
  std::vector<std::vector<UserRecList>> all_lists;
  for (const ModelConfig& mc : config.algorithms) {
    const std::string path = layout.recommendations_tsv(to_string(mc.algorithm));
    require_file(path, "run the recommend stage first");
    all_lists.push_back(read_recommendations_tsv(path, config.list_size));
  }
  std::vector<const std::vector<UserRecList>*> list_ptrs;
  for (const auto& lists : all_lists) list_ptrs.push_back(&lists);
  const ItemCatalog catalog = extend_catalog(base_catalog, {&train}, list_ptrs);

  std::vector<GenreFrequencyProfile> profiles;
  profiles.push_back(genre_frequency(train, catalog, "ratings"));
  std::vector<AmplificationBlock> blocks;
  for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
    const std::string name = to_string(config.algorithms[a].algorithm);
    std::vector<ItemId> interactions;
    for (const UserRecList& list : all_lists[a]) {
      interactions.insert(interactions.end(), list.items.begin(), list.items.end());
    }
    profiles.push_back(genre_frequency(interactions, catalog, name));
    blocks.push_back({name, amplification_profile(profiles.front(), profiles.back(), catalog)});
  }
  write_genre_frequency_csv(layout.genre_frequency_csv, profiles, catalog);
  write_amplification_csv(layout.amplification_csv, blocks);
  return stats;
}

}  // namespace

void stage_split(const PipelineConfig& config) {
  with_stage("split", [&] {
    ensure_out_dir(config);
    split_impl(config, OutputLayout(config.out_dir));
  });
}

void stage_train(const PipelineConfig& config) {
  with_stage("train", [&] {
    ensure_out_dir(config);
    const OutputLayout layout(config.out_dir);
    const RatingsTable train =
        load_split_table(config, layout.train_csv, "run the split stage first");
    train_impl(config, layout, train);
  });
}

void stage_recommend(const PipelineConfig& config) {
  with_stage("recommend", [&] {
    ensure_out_dir(config);
    const OutputLayout layout(config.out_dir);
    const RatingsTable train =
        load_split_table(config, layout.train_csv, "run the split stage first");
    const std::string train_hash = hash_file(layout.train_csv);
    for (const ModelConfig& mc : config.algorithms) {
      check_model_manifest(layout, mc, train_hash);
    }
    const ItemCatalog catalog = extend_catalog(load_base_catalog(config), {&train}, {});
    // Models are not serialized; fitting is deterministic, so refitting from
    // the verified train.csv reproduces the trained model exactly.
    std::vector<std::unique_ptr<FittedModel>> models;
    for (const ModelConfig& mc : config.algorithms) {
      models.push_back(fit(train, mc, config.jobs));
    }
    recommend_impl(config, layout, catalog, models);
  });
}

void stage_audit(const PipelineConfig& config) {
  with_stage("audit", [&] {
    ensure_out_dir(config);
    const OutputLayout layout(config.out_dir);
    const RatingsTable train =
        load_split_table(config, layout.train_csv, "run the split stage first");
    const RatingsTable test =
        load_split_table(config, layout.test_csv, "run the split stage first");
    audit_impl(config, layout, train, test, load_base_catalog(config));
  });
}

void stage_report(const PipelineConfig& config) {
  with_stage("report", [&] {
    ensure_out_dir(config);
    const OutputLayout layout(config.out_dir);
    const RatingsTable train =
        load_split_table(config, layout.train_csv, "run the split stage first");
    report_impl(config, layout, train, load_base_catalog(config));
  });
}

void run_pipeline(const PipelineConfig& config) {
  json manifest;
  manifest["tool"] = "recaudit";
  manifest["version"] = kVersion;
  manifest["rng"] = kRngAlgorithm;
  manifest["hash"] = kHashAlgorithm;
  json stages_ms = json::object();

  const auto timed = [&](const char* name, auto&& body) {
    const auto started = std::chrono::steady_clock::now();
    with_stage(name, body);
    stages_ms[name] = elapsed_ms(started);
    std::cerr << "[" << name << "] done in " << std::llround(elapsed_ms(started)) << " ms\n";
  };

  with_stage("split", [&] { ensure_out_dir(config); });
  const OutputLayout layout(config.out_dir);

  timed("split", [&] { split_impl(config, layout); });

  RatingsTable train, test;
  ItemCatalog base_catalog;
  with_stage("train", [&] {
    train = load_split_table(config, layout.train_csv, "internal: split output missing");
    test = load_split_table(config, layout.test_csv, "internal: split output missing");
    base_catalog = load_base_catalog(config);
  });

  std::vector<std::unique_ptr<FittedModel>> models;
  timed("train", [&] { models = train_impl(config, layout, train); });
  timed("recommend", [&] {
    const ItemCatalog catalog = extend_catalog(base_catalog, {&train}, {});
    recommend_impl(config, layout, catalog, models);
  });
  models.clear();

  std::map<std::string, std::size_t> skipped;
  timed("audit", [&] { skipped = audit_impl(config, layout, train, test, base_catalog); });
  ReportStats report_stats;
  timed("report", [&] { report_stats = report_impl(config, layout, train, base_catalog); });

  with_stage("report", [&] {
    std::size_t items_without_genres = 0;
    extend_catalog(base_catalog, {&train, &test}, {}, &items_without_genres);

    manifest["config"] = {{"path", config.config_path},
                          {"hash", config.config_path.empty()
                                       ? ""
                                       : hash_file(config.config_path)}};
    manifest["inputs"] = {{"ratings",
                           {{"path", config.ratings_path},
                            {"hash", hash_file(config.ratings_path)}}},
                          {"catalog",
                           {{"path", config.catalog_path},
                            {"hash", hash_file(config.catalog_path)}}}};
    json params;
    params["format"] = to_string(config.format);
    params["rating_min"] = config.scale.min;
    params["rating_max"] = config.scale.max;
    params["split_fraction"] = config.split_fraction;
    params["split_seed"] = config.split_seed;
    params["list_size"] = config.list_size;
    params["cohorts"] = config.cohort_count;
    params["jobs"] = config.jobs;
    if (config.relevance_threshold) params["relevance_threshold"] = *config.relevance_threshold;
    manifest["parameters"] = params;
    json algos = json::array();
    for (const ModelConfig& mc : config.algorithms) algos.push_back(model_config_json(mc));
    manifest["algorithms"] = algos;
    manifest["data"] = {{"n_users", train.n_users()},
                        {"n_items", train.n_items()},
                        {"train_ratings", train.size()},
                        {"test_ratings", test.size()},
                        {"catalog_items", base_catalog.n_items()},
                        {"categories", base_catalog.n_categories()},
                        {"items_outside_catalog", items_without_genres}};
    manifest["audit"] = {{"skipped_users", skipped},
                         {"report_universe", report_stats.universe},
                         {"users_dropped_from_cohorts", report_stats.dropped}};
    manifest["stages_ms"] = stages_ms;
    write_json(layout.run_manifest, manifest);
  });
}

}  // namespace recaudit
