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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "recaudit/analysis.hpp"
#include "recaudit/rng.hpp"
#include "support/oracles.hpp"

using namespace recaudit;

namespace {

ItemCatalog make_catalog(const std::vector<std::pair<ItemId, std::vector<std::string>>>& spec) {
  std::vector<ItemCatalog::Entry> entries;
  for (const auto& [item, genres] : spec) entries.push_back({item, genres});
  return ItemCatalog::from_entries(entries);
}

std::vector<std::pair<UserId, double>> gaps_for(int n, double value) {
  std::vector<std::pair<UserId, double>> gaps;
  for (int u = 1; u <= n; ++u) gaps.emplace_back(u, value);
  return gaps;
}

}  // namespace

TEST_CASE("20 users in 10 cohorts gives cohorts of 2") {
  std::vector<std::pair<UserId, double>> gaps;
  for (int u = 1; u <= 20; ++u) gaps.emplace_back(u, 0.01 * u);
  const auto cohorts = form_cohorts(gaps, 10);
  REQUIRE(cohorts.size() == 10);
  for (const Cohort& cohort : cohorts) CHECK(cohort.members.size() == 2);
  CHECK(cohorts.front().label == "G1");
  CHECK(cohorts.back().label == "G10");
  CHECK(cohorts.front().members == std::vector<UserId>{1, 2});
  CHECK(cohorts.back().members == std::vector<UserId>{19, 20});
}

TEST_CASE("25 users in 10 cohorts puts the extra users in the lowest cohorts") {
  std::vector<std::pair<UserId, double>> gaps;
  for (int u = 1; u <= 25; ++u) gaps.emplace_back(u, 0.01 * u);
  const auto cohorts = form_cohorts(gaps, 10);
  const std::vector<std::size_t> expected = {3, 3, 3, 3, 3, 2, 2, 2, 2, 2};
  REQUIRE(cohorts.size() == expected.size());
  for (std::size_t g = 0; g < cohorts.size(); ++g) {
    CHECK(cohorts[g].members.size() == expected[g]);
  }
}

TEST_CASE("identical gaps fall back to the user-id tie-break") {
  const auto cohorts = form_cohorts(gaps_for(6, 0.5), 3);
  REQUIRE(cohorts.size() == 3);
  CHECK(cohorts[0].members == std::vector<UserId>{1, 2});
  CHECK(cohorts[1].members == std::vector<UserId>{3, 4});
  CHECK(cohorts[2].members == std::vector<UserId>{5, 6});
}

TEST_CASE("cohort count bounds are enforced") {
  CHECK_THROWS_AS(form_cohorts(gaps_for(5, 0.1), 6), ArgumentError);
  CHECK_THROWS_AS(form_cohorts(gaps_for(5, 0.1), 1), ArgumentError);
}

TEST_CASE("property: cohorts are a disjoint, exhaustive, ordered partition") {
  Rng rng(64);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(60));
    const int k = 2 + static_cast<int>(rng.below(std::min(9, n - 1)));
    std::vector<std::pair<UserId, double>> gaps;
    for (int u = 1; u <= n; ++u) {
      gaps.emplace_back(u, rng.real01() < 0.2 ? 0.5 : rng.real01());
    }
    const auto cohorts = form_cohorts(gaps, k);
    REQUIRE(cohorts.size() == static_cast<std::size_t>(k));
    std::set<UserId> seen;
    std::size_t total = 0;
    double last_mean = -1.0;
    std::size_t last_size = cohorts.front().members.size();
    for (const Cohort& cohort : cohorts) {
      CHECK(cohort.members.size() <= last_size);  // extras go to the front
      CHECK(cohort.members.size() + 1 >= last_size);
      total += cohort.members.size();
      for (const UserId user : cohort.members) CHECK(seen.insert(user).second);
      CHECK(cohort.mean_profile_gap >= last_mean - 1e-12);
      last_mean = cohort.mean_profile_gap;
      last_size = std::min(last_size, cohort.members.size());
    }
    CHECK(total == static_cast<std::size_t>(n));
  }
}

namespace {

UserAudit audit_of(UserId user, double profile_gap, double rec_gap, double mc,
                   std::optional<double> precision = std::nullopt) {
  UserAudit audit;
  audit.user = user;
  audit.profile_gap = profile_gap;
  audit.rec_gap = rec_gap;
  audit.mc = mc;
  audit.precision = precision;
  return audit;
}

}  // namespace

TEST_CASE("a cohort of identical users reports the single-user values") {
  std::vector<UserAudit> audits;
  std::vector<std::pair<UserId, double>> gaps;
  for (int u = 1; u <= 4; ++u) {
    audits.push_back(audit_of(u, 0.25, 0.5, 0.3, 0.1));
    gaps.emplace_back(u, 0.25);
  }
  const auto cohorts = form_cohorts(gaps, 2);
  const CohortReport report = cohort_report(cohorts, "most-popular", audits);
  REQUIRE(report.rows.size() == 2);
  for (const CohortMetrics& row : report.rows) {
    CHECK(row.gap_p == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(row.gap_q == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(row.pl == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(row.mc_mean == doctest::Approx(0.3).epsilon(1e-12));
    REQUIRE(row.precision_mean.has_value());
    CHECK(*row.precision_mean == doctest::Approx(0.1).epsilon(1e-12));
  }
}

TEST_CASE("niche users receiving only popular recommendations show the higher lift") {
  // profile popularity 0.1/0.2 for the niche pair, 0.8/0.9 for the
  // mainstream pair; everyone receives the same popular recommendations
  const std::vector<UserAudit> audits = {
      audit_of(1, 0.1, 0.85, 0.9),
      audit_of(2, 0.2, 0.85, 0.8),
      audit_of(3, 0.8, 0.85, 0.2),
      audit_of(4, 0.9, 0.85, 0.1),
  };
  std::vector<std::pair<UserId, double>> gaps;
  for (const UserAudit& audit : audits) gaps.emplace_back(audit.user, audit.profile_gap);
  const auto cohorts = form_cohorts(gaps, 2);
  const CohortReport report = cohort_report(cohorts, "most-popular", audits);
  REQUIRE(report.rows.size() == 2);

  // brute-force expected values
  const double gap_p_low = (0.1 + 0.2) / 2.0;
  const double gap_p_high = (0.8 + 0.9) / 2.0;
  CHECK(report.rows[0].pl ==
        doctest::Approx(oracle::popularity_lift(0.85, gap_p_low)).epsilon(1e-12));
  CHECK(report.rows[1].pl ==
        doctest::Approx(oracle::popularity_lift(0.85, gap_p_high)).epsilon(1e-12));
  CHECK(report.rows[0].pl > report.rows[1].pl);
  CHECK(report.rows[0].mc_mean > report.rows[1].mc_mean);

  REQUIRE(report.significance.size() == 2);
  CHECK(report.significance[0].metric == "pl");
  CHECK(report.significance[0].g_low == "G1");
  CHECK(report.significance[0].g_high == "G2");
  CHECK(report.significance[1].metric == "mc");
}

TEST_CASE("property: reported PL is consistent with its GAPs, MC bounded by members") {
  Rng rng(4242);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 6 + static_cast<int>(rng.below(40));
    const int k = 2 + static_cast<int>(rng.below(4));
    if (k > n) continue;
    std::vector<UserAudit> audits;
    std::vector<std::pair<UserId, double>> gaps;
    for (int u = 1; u <= n; ++u) {
      const double pg = 0.05 + 0.9 * rng.real01();
      audits.push_back(audit_of(u, pg, 0.05 + 0.9 * rng.real01(), rng.real01()));
      gaps.emplace_back(u, pg);
    }
    const auto cohorts = form_cohorts(gaps, k);
    const CohortReport report = cohort_report(cohorts, "bmf", audits);
    std::size_t total = 0;
    for (std::size_t g = 0; g < cohorts.size(); ++g) {
      const CohortMetrics& row = report.rows[g];
      total += row.n;
      CHECK(std::fabs(row.pl - (row.gap_q - row.gap_p) / row.gap_p) < 1e-12);
      double mc_min = 1.0, mc_max = 0.0;
      for (const UserId user : cohorts[g].members) {
        for (const UserAudit& audit : audits) {
          if (audit.user == user) {
            mc_min = std::min(mc_min, audit.mc);
            mc_max = std::max(mc_max, audit.mc);
          }
        }
      }
      CHECK(row.mc_mean >= mc_min - 1e-12);
      CHECK(row.mc_mean <= mc_max + 1e-12);
    }
    CHECK(total == static_cast<std::size_t>(n));
  }
}

TEST_CASE("group GAPs computed from audits equal group_gap over member item lists") {
  // theta over 5 items through a real training table: raters 1,2,3,4,5 of 5 users
  std::vector<Rating> ratings;
  for (int i = 1; i <= 5; ++i) {
    for (int r = 0; r < i; ++r) ratings.push_back({r + 1, i, 3.0, kNoTimestamp});
  }
  const RatingsTable train = RatingsTable::from_ratings(std::move(ratings));
  const PopularityIndex theta = popularity(train);

  const std::vector<std::vector<ItemId>> profiles = {{1, 2}, {3}, {4, 5}, {2, 5}};
  std::vector<UserAudit> audits;
  std::vector<std::pair<UserId, double>> gaps;
  for (std::size_t u = 0; u < profiles.size(); ++u) {
    double sum = 0.0;
    for (const ItemId item : profiles[u]) sum += theta.theta(item);
    const double pg = sum / static_cast<double>(profiles[u].size());
    audits.push_back(audit_of(static_cast<UserId>(u + 1), pg, 0.5, 0.1));
    gaps.emplace_back(static_cast<UserId>(u + 1), pg);
  }
  const auto cohorts = form_cohorts(gaps, 2);
  const CohortReport report = cohort_report(cohorts, "user-knn", audits);
  for (std::size_t g = 0; g < cohorts.size(); ++g) {
    std::vector<std::vector<ItemId>> member_lists;
    for (const UserId user : cohorts[g].members) {
      member_lists.push_back(profiles[static_cast<std::size_t>(user - 1)]);
    }
    CHECK(report.rows[g].gap_p ==
          doctest::Approx(group_gap(member_lists, theta)).epsilon(1e-12));
  }
}

TEST_CASE("significance_test conventions") {
  const std::vector<double> same = {0.1, 0.2, 0.3, 0.4};
  const SignificanceResult equal = significance_test(same, same);
  CHECK(equal.welch.p == 1.0);

  std::vector<double> zeros(30, 0.0), ones(30, 1.0);
  const SignificanceResult split = significance_test(zeros, ones);
  CHECK(split.welch.p < 1e-10);
  CHECK(split.mannwhitney.p < 1e-10);
}

TEST_CASE("genre frequency of single-genre interactions is a point mass") {
  const ItemCatalog catalog = make_catalog({{1, {"Comedy"}}, {2, {"Comedy"}}});
  const std::vector<ItemId> interactions = {1, 2, 1, 1};
  const GenreFrequencyProfile profile = genre_frequency(interactions, catalog, "ratings");
  CHECK(profile.freq[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(profile.raw_count[0] == 4);
}

TEST_CASE("genre frequency splits multi-genre interactions") {
  const ItemCatalog catalog = make_catalog({{1, {"Action", "SciFi"}}, {2, {"Action"}}});
  const std::vector<ItemId> interactions = {1, 2};
  const GenreFrequencyProfile profile = genre_frequency(interactions, catalog, "x");
  CHECK(profile.freq[0] == doctest::Approx(0.75).epsilon(1e-12));  // Action
  CHECK(profile.freq[1] == doctest::Approx(0.25).epsilon(1e-12));  // SciFi
  CHECK(profile.raw_count[0] == 2);
  CHECK(profile.raw_count[1] == 1);

  oracle::FlatCatalog flat;
  flat.universe = {"Action", "SciFi"};
  flat.genres[1] = {"Action", "SciFi"};
  flat.genres[2] = {"Action"};
  const auto expected = oracle::genre_frequency(interactions, flat);
  for (std::size_t c = 0; c < expected.freq.size(); ++c) {
    CHECK(profile.freq[c] == doctest::Approx(expected.freq[c]).epsilon(1e-12));
    CHECK(profile.raw_count[c] == expected.count[c]);
  }
}

TEST_CASE("property: genre frequency of a union is the size-weighted mixture") {
  Rng rng(9000);
  const ItemCatalog catalog = make_catalog({{1, {"Action"}},
                                            {2, {"Action", "Comedy"}},
                                            {3, {"Drama"}},
                                            {4, {"Comedy", "Drama", "Romance"}},
                                            {5, {"Romance"}}});
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<ItemId> a, b;
    const std::size_t na = 1 + rng.below(15);
    const std::size_t nb = 1 + rng.below(15);
    for (std::size_t i = 0; i < na; ++i) a.push_back(1 + static_cast<ItemId>(rng.below(5)));
    for (std::size_t i = 0; i < nb; ++i) b.push_back(1 + static_cast<ItemId>(rng.below(5)));
    std::vector<ItemId> both = a;
    both.insert(both.end(), b.begin(), b.end());

    const GenreFrequencyProfile fa = genre_frequency(a, catalog, "a");
    const GenreFrequencyProfile fb = genre_frequency(b, catalog, "b");
    const GenreFrequencyProfile fboth = genre_frequency(both, catalog, "both");
    const double wa = static_cast<double>(na) / static_cast<double>(na + nb);
    for (std::size_t c = 0; c < fboth.freq.size(); ++c) {
      CHECK(fboth.freq[c] ==
            doctest::Approx(wa * fa.freq[c] + (1.0 - wa) * fb.freq[c]).epsilon(1e-9));
    }
  }
}

TEST_CASE("amplification profile lifts and undefined flags") {
  const ItemCatalog catalog = make_catalog({{1, {"Action"}}, {2, {"Comedy"}}, {3, {"Drama"}}});
  GenreFrequencyProfile ratings;
  ratings.source = "ratings";
  ratings.freq = {0.2, 0.8, 0.0};
  ratings.raw_count = {2, 8, 0};
  GenreFrequencyProfile recs;
  recs.source = "most-popular";
  recs.freq = {0.3, 0.5, 0.2};
  recs.raw_count = {3, 5, 2};

  const auto lifts = amplification_profile(ratings, recs, catalog);
  REQUIRE(lifts.size() == 3);
  CHECK(lifts[0].lift == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lifts[0].defined);
  CHECK(lifts[1].lift == doctest::Approx(-0.375).epsilon(1e-12));
  CHECK_FALSE(lifts[2].defined);

  const auto identical = amplification_profile(ratings, ratings, catalog);
  CHECK(identical[0].lift == 0.0);
  CHECK(identical[1].lift == 0.0);
  CHECK_FALSE(identical[2].defined);
}
