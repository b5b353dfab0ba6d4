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
#include <utility>
#include <vector>

#include "recaudit/metrics.hpp"
#include "recaudit/recommender.hpp"
#include "recaudit/stats.hpp"

namespace recaudit {

// Equal-size user group ordered by profile popularity (G1 = most niche).
struct Cohort {
  std::string label;
  std::vector<UserId> members;
  double mean_profile_gap = 0.0;
};

// Sorts users ascending by profile_gap (ties by ascending user id) and cuts
// k contiguous blocks; when sizes cannot be equal the extra users go to the
// lowest-popularity cohorts. Throws ArgumentError for k < 2 or k > #users.
std::vector<Cohort> form_cohorts(std::span<const std::pair<UserId, double>> profile_gaps, int k);

// One (algorithm, cohort) aggregate row.
struct CohortMetrics {
  std::string algorithm;
  std::string cohort;
  std::size_t n = 0;
  double gap_p = 0.0;
  double gap_q = 0.0;
  double pl = 0.0;
  double mc_mean = 0.0;
  std::optional<double> precision_mean;  // absent when no member has test items
};

struct SignificanceRow {
  std::string algorithm;
  std::string metric;  // "pl" or "mc"
  std::string g_low;
  std::string g_high;
  double welch_p = 1.0;
  double mannwhitney_p = 1.0;
  bool significant = false;  // welch_p < 0.05
};

struct CohortReport {
  std::vector<CohortMetrics> rows;
  std::vector<SignificanceRow> significance;
};

// Aggregates one algorithm's per-user audits over the given cohorts: group
// GAPs are means of the members' per-user popularity means, PL follows from
// the GAPs, group MC is the member mean. The significance rows compare
// per-user PL and MC samples of the first vs the last cohort (Welch primary,
// Mann-Whitney companion). Every cohort member must have an audit.
CohortReport cohort_report(const std::vector<Cohort>& cohorts,
                           const std::string& algorithm,
                           std::span<const UserAudit> audits);

struct SignificanceResult {
  TTestResult welch;
  MannWhitneyResult mannwhitney;
};

// Two-sided tests between two per-user value samples.
SignificanceResult significance_test(std::span<const double> sample_a,
                                     std::span<const double> sample_b);

// Normalized genre-frequency vector of an interaction bag, plus the raw
// per-genre interaction counts (an interaction counts toward every genre of
// its item; the normalized masses split each interaction equally instead).
struct GenreFrequencyProfile {
  std::string source;
  std::vector<double> freq;             // aligned with catalog categories, sums to 1
  std::vector<std::uint64_t> raw_count; // unsplit indicator counts
};

GenreFrequencyProfile genre_frequency(std::span<const ItemId> interactions,
                                      const ItemCatalog& catalog, const std::string& source);
GenreFrequencyProfile genre_frequency(const RatingsTable& table, const ItemCatalog& catalog,
                                      const std::string& source);
GenreFrequencyProfile genre_frequency(const RecommendationSet& recommendations,
                                      const ItemCatalog& catalog, const std::string& source);

// Per-genre relative change of recommendation frequency vs rating frequency.
struct GenreLift {
  std::string genre;
  double rating_freq = 0.0;
  double rec_freq = 0.0;
  double lift = 0.0;    // (rec - rating) / rating when defined
  bool defined = true;  // false when the genre never occurs in the ratings
};

std::vector<GenreLift> amplification_profile(const GenreFrequencyProfile& ratings,
                                             const GenreFrequencyProfile& recommendations,
                                             const ItemCatalog& catalog);

}  // namespace recaudit
