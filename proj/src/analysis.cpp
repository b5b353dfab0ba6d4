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

#include "recaudit/analysis.hpp"

#include <algorithm>
#include <unordered_map>

namespace recaudit {

std::vector<Cohort> form_cohorts(std::span<const std::pair<UserId, double>> profile_gaps, int k) {
  if (k < 2) throw ArgumentError("cohort count must be >= 2");
  if (static_cast<std::size_t>(k) > profile_gaps.size()) {
    throw ArgumentError("cohort count " + std::to_string(k) + " exceeds user count " +
                        std::to_string(profile_gaps.size()));
  }

  std::vector<std::pair<UserId, double>> sorted(profile_gaps.begin(), profile_gaps.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });

  const std::size_t n = sorted.size();
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t remainder = n % static_cast<std::size_t>(k);

  std::vector<Cohort> cohorts;
  cohorts.reserve(k);
  std::size_t pos = 0;
  for (int g = 0; g < k; ++g) {
    const std::size_t size = base + (static_cast<std::size_t>(g) < remainder ? 1 : 0);
    Cohort cohort;
    cohort.label = "G" + std::to_string(g + 1);
    cohort.members.reserve(size);
    double sum = 0.0;
    for (std::size_t s = 0; s < size; ++s, ++pos) {
      cohort.members.push_back(sorted[pos].first);
      sum += sorted[pos].second;
    }
    cohort.mean_profile_gap = sum / static_cast<double>(size);
    cohorts.push_back(std::move(cohort));
  }
  return cohorts;
}

SignificanceResult significance_test(std::span<const double> sample_a,
                                     std::span<const double> sample_b) {
  SignificanceResult result;
  result.welch = welch_t_test(sample_a, sample_b);
  result.mannwhitney = mann_whitney_u_test(sample_a, sample_b);
  return result;
}

CohortReport cohort_report(const std::vector<Cohort>& cohorts, const std::string& algorithm,
                           std::span<const UserAudit> audits) {
  std::unordered_map<UserId, const UserAudit*> by_user;
  by_user.reserve(audits.size());
  for (const UserAudit& audit : audits) by_user.emplace(audit.user, &audit);

  CohortReport report;
  // Per-user popularity-lift and miscalibration samples of the two extreme
  // cohorts, for the significance tests.
  std::vector<double> pl_low, pl_high, mc_low, mc_high;

  for (std::size_t g = 0; g < cohorts.size(); ++g) {
    const Cohort& cohort = cohorts[g];
    if (cohort.members.empty()) throw ArgumentError("cohort " + cohort.label + " is empty");

    CohortMetrics row;
    row.algorithm = algorithm;
    row.cohort = cohort.label;
    row.n = cohort.members.size();

    double sum_profile_gap = 0.0, sum_rec_gap = 0.0, sum_mc = 0.0;
    double sum_precision = 0.0;
    std::size_t n_precision = 0;
    for (const UserId user : cohort.members) {
      const auto it = by_user.find(user);
      if (it == by_user.end()) {
        throw ArgumentError("user " + std::to_string(user) + " has no audit for " + algorithm);
      }
      const UserAudit& audit = *it->second;
      sum_profile_gap += audit.profile_gap;
      sum_rec_gap += audit.rec_gap;
      sum_mc += audit.mc;
      if (audit.precision) {
        sum_precision += *audit.precision;
        ++n_precision;
      }
      const bool extreme_low = g == 0;
      const bool extreme_high = g + 1 == cohorts.size();
      if (extreme_low || extreme_high) {
        const double user_pl = (audit.rec_gap - audit.profile_gap) / audit.profile_gap;
        (extreme_low ? pl_low : pl_high).push_back(user_pl);
        (extreme_low ? mc_low : mc_high).push_back(audit.mc);
      }
    }
    const double dn = static_cast<double>(row.n);
    row.gap_p = sum_profile_gap / dn;
    row.gap_q = sum_rec_gap / dn;
    row.pl = popularity_lift(row.gap_q, row.gap_p);
    row.mc_mean = sum_mc / dn;
    if (n_precision > 0) row.precision_mean = sum_precision / static_cast<double>(n_precision);
    report.rows.push_back(std::move(row));
  }

  const std::string g_low = cohorts.front().label;
  const std::string g_high = cohorts.back().label;
  const auto make_row = [&](const std::string& metric, std::span<const double> low,
                            std::span<const double> high) {
    SignificanceRow row;
    row.algorithm = algorithm;
    row.metric = metric;
    row.g_low = g_low;
    row.g_high = g_high;
    if (low.size() < 2 || high.size() < 2) {
      // single-member cohorts carry no evidence either way
      row.welch_p = 1.0;
      row.mannwhitney_p = 1.0;
    } else {
      const SignificanceResult tests = significance_test(low, high);
      row.welch_p = tests.welch.p;
      row.mannwhitney_p = tests.mannwhitney.p;
    }
    row.significant = row.welch_p < 0.05;
    return row;
  };
  report.significance.push_back(make_row("pl", pl_low, pl_high));
  report.significance.push_back(make_row("mc", mc_low, mc_high));
  return report;
}

GenreFrequencyProfile genre_frequency(std::span<const ItemId> interactions,
                                      const ItemCatalog& catalog, const std::string& source) {
  if (interactions.empty()) throw ArgumentError("genre frequency requires a non-empty source");
  GenreFrequencyProfile profile;
  profile.source = source;
  profile.freq.assign(catalog.n_categories(), 0.0);
  profile.raw_count.assign(catalog.n_categories(), 0);
  const double per_interaction = 1.0 / static_cast<double>(interactions.size());
  for (const ItemId item : interactions) {
    const auto cats = catalog.item_categories(item);
    const double share = per_interaction / static_cast<double>(cats.size());
    for (const std::uint16_t c : cats) {
      profile.freq[c] += share;
      profile.raw_count[c] += 1;
    }
  }
  return profile;
}

GenreFrequencyProfile genre_frequency(const RatingsTable& table, const ItemCatalog& catalog,
                                      const std::string& source) {
  std::vector<ItemId> interactions;
  interactions.reserve(table.size());
  for (const Rating& r : table.ratings()) interactions.push_back(r.item);
  return genre_frequency(interactions, catalog, source);
}

GenreFrequencyProfile genre_frequency(const RecommendationSet& recommendations,
                                      const ItemCatalog& catalog, const std::string& source) {
  std::vector<ItemId> interactions;
  for (const auto& list : recommendations.lists) {
    for (const ScoredItem& entry : list) interactions.push_back(entry.item);
  }
  return genre_frequency(interactions, catalog, source);
}

std::vector<GenreLift> amplification_profile(const GenreFrequencyProfile& ratings,
                                             const GenreFrequencyProfile& recommendations,
                                             const ItemCatalog& catalog) {
  if (ratings.freq.size() != recommendations.freq.size() ||
      ratings.freq.size() != catalog.n_categories()) {
    throw ArgumentError("amplification profile requires profiles over the same categories");
  }
  std::vector<GenreLift> lifts;
  lifts.reserve(catalog.n_categories());
  for (std::size_t c = 0; c < catalog.n_categories(); ++c) {
    GenreLift lift;
    lift.genre = catalog.categories()[c];
    lift.rating_freq = ratings.freq[c];
    lift.rec_freq = recommendations.freq[c];
    if (ratings.freq[c] == 0.0) {
      lift.defined = false;
      lift.lift = 0.0;
    } else {
      lift.lift = (recommendations.freq[c] - ratings.freq[c]) / ratings.freq[c];
    }
    lifts.push_back(std::move(lift));
  }
  return lifts;
}

}  // namespace recaudit
