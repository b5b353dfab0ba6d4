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
#include <span>
#include <string>
#include <vector>

#include "recaudit/analysis.hpp"
#include "recaudit/metrics.hpp"
#include "recaudit/recommender.hpp"

namespace recaudit {

// Fixed-precision float form shared by every metric file so runs are
// byte-comparable.
std::string format_metric(double value);

// --- Recommendations file --------------------------------------------------
// Tab-separated `user_id  item_id  rank  score`, sorted by (user, rank).
// This file is the audit input contract; third-party recommenders can be
// audited by producing it.

void write_recommendations_tsv(const std::string& path, const RecommendationSet& set);

// Validates the schema (4 columns, contiguous 1-based ranks per user,
// ascending user blocks, no list longer than max_list_size) and returns the
// ranked item lists. Schema violations carry the offending row number.
std::vector<UserRecList> read_recommendations_tsv(const std::string& path, int max_list_size);

// --- Per-user audit file ----------------------------------------------------
// CSV `user_id,profile_gap,rec_gap,mc,precision,n_profile,n_recs`; the
// precision field is empty for users without relevant test interactions.

void write_audit_csv(const std::string& path, std::span<const UserAudit> audits);

struct AuditRow {
  UserId user = 0;
  double profile_gap = 0.0;
  double rec_gap = 0.0;
  double mc = 0.0;
  std::optional<double> precision;
  std::uint32_t n_profile = 0;
  std::uint32_t n_recs = 0;
};

std::vector<AuditRow> read_audit_csv(const std::string& path);

// --- Report files -------------------------------------------------------

void write_cohort_report_csv(const std::string& path, std::span<const CohortMetrics> rows);
void write_significance_csv(const std::string& path, std::span<const SignificanceRow> rows);
void write_genre_frequency_csv(const std::string& path,
                               std::span<const GenreFrequencyProfile> profiles,
                               const ItemCatalog& catalog);

struct AmplificationBlock {
  std::string algorithm;
  std::vector<GenreLift> lifts;
};
void write_amplification_csv(const std::string& path, std::span<const AmplificationBlock> blocks);

}  // namespace recaudit
