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

#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "recaudit/pipeline.hpp"
#include "recaudit/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
  std::optional<std::string> algo;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("-c,--config", opts.config_path, "pipeline config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", [&opts](const CLI::results_t& res) {
        std::uint64_t value = 0;
        if (!CLI::detail::lexical_cast(res[0], value)) return false;
        opts.seed = value;
        return true;
      },
      "override the split seed");
  cmd->add_option("--out", [&opts](const CLI::results_t& res) {
        opts.out = res[0];
        return true;
      },
      "override the output directory");
  cmd->add_option("--jobs", [&opts](const CLI::results_t& res) {
        int value = 0;
        if (!CLI::detail::lexical_cast(res[0], value)) return false;
        opts.jobs = value;
        return true;
      },
      "worker threads for similarity/scoring (never changes results)");
  cmd->add_option("--algo", [&opts](const CLI::results_t& res) {
        opts.algo = res[0];
        return true;
      },
      "restrict the run to a single algorithm");
}

recaudit::PipelineConfig resolve(const CommonOptions& opts) {
  recaudit::PipelineConfig config = recaudit::load_config(opts.config_path);
  recaudit::ConfigOverrides overrides;
  overrides.split_seed = opts.seed;
  overrides.out_dir = opts.out;
  overrides.jobs = opts.jobs;
  overrides.algorithm = opts.algo;
  recaudit::apply_overrides(config, overrides);
  return config;
}

int dispatch(const CommonOptions& opts,
             const std::function<void(const recaudit::PipelineConfig&)>& stage) {
  try {
    stage(resolve(opts));
    return kExitOk;
  } catch (const recaudit::StageError& e) {
    std::cerr << "recaudit: error " << e.what() << '\n';
    return e.validation() ? kExitValidation : kExitRuntime;
  } catch (const recaudit::ConfigError& e) {
    std::cerr << "recaudit: config error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const recaudit::Error& e) {
    std::cerr << "recaudit: error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "recaudit: error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recaudit - train collaborative-filtering recommenders and audit "
               "their popularity bias and calibration across user cohorts"};
  app.set_version_flag("--version", std::string(recaudit::kVersion));
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    void (*stage)(const recaudit::PipelineConfig&);
  };
  const Command commands[] = {
      {"run", "run the full pipeline (split, train, recommend, audit, report)",
       &recaudit::run_pipeline},
      {"split", "write train.csv/test.csv and the split manifest", &recaudit::stage_split},
      {"train", "fit the configured algorithms and write model manifests",
       &recaudit::stage_train},
      {"recommend", "write top-N recommendation files", &recaudit::stage_recommend},
      {"audit", "write per-user audit files from recommendation files", &recaudit::stage_audit},
      {"report", "write cohort, significance and genre-frequency reports",
       &recaudit::stage_report},
  };

  CommonOptions opts[std::size(commands)];
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    CLI::App* cmd = app.add_subcommand(commands[i].name, commands[i].help);
    add_common(cmd, opts[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  for (std::size_t i = 0; i < std::size(commands); ++i) {
    if (app.get_subcommand(commands[i].name)->parsed()) {
      return dispatch(opts[i], commands[i].stage);
    }
  }
  return kExitValidation;
}
