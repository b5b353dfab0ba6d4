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

#include <string>

#include "recaudit/config.hpp"
#include "recaudit/error.hpp"

namespace recaudit {

// Error thrown out of a pipeline stage, tagged with the stage name and
// whether the cause was a validation problem (bad config/input files) or a
// runtime failure.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& message, bool validation)
      : Error("[" + stage + "] " + message), stage_(stage), validation_(validation) {}
  const std::string& stage() const { return stage_; }
  bool validation() const { return validation_; }

 private:
  std::string stage_;
  bool validation_;
};

// Output file locations inside the configured output directory.
struct OutputLayout {
  explicit OutputLayout(const std::string& out_dir);

  std::string train_csv;
  std::string test_csv;
  std::string split_manifest;
  std::string cohort_report_csv;
  std::string significance_csv;
  std::string genre_frequency_csv;
  std::string amplification_csv;
  std::string run_manifest;

  std::string model_manifest(const std::string& algorithm) const;
  std::string recommendations_tsv(const std::string& algorithm) const;
  std::string audit_csv(const std::string& algorithm) const;

 private:
  std::string dir_;
};

// Individual stages. Each consumes/produces only the documented files, so
// stages compose with externally produced inputs (e.g. a third-party
// recommendations file before `audit`). All throw StageError.
void stage_split(const PipelineConfig& config);
void stage_train(const PipelineConfig& config);
void stage_recommend(const PipelineConfig& config);
void stage_audit(const PipelineConfig& config);
void stage_report(const PipelineConfig& config);

// Full pipeline: split, train, recommend, audit, report, plus a run
// manifest. Fitted models are reused in memory between train and recommend;
// every metric file still flows through the documented file formats, so a
// full run is byte-identical to running the five stages one by one.
void run_pipeline(const PipelineConfig& config);

}  // namespace recaudit
