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
#include <unordered_set>
#include <vector>

#include "recaudit/dataset.hpp"

namespace recaudit {

// Normalized category-mass vector aligned with a catalog's category
// universe C. Masses are non-negative and sum to 1.
struct CategoryDistribution {
  std::vector<double> mass;
};

// Each item contributes total mass 1/|items|, split equally across its
// categories, so multi-genre items still yield a proper distribution.
// Throws ArgumentError on an empty item set or an item missing from the
// catalog.
CategoryDistribution category_distribution(std::span<const ItemId> items,
                                           const ItemCatalog& catalog);

// Hellinger distance ||sqrt(p) - sqrt(q)||_2 / sqrt(2), in [0, 1].
// Throws ArgumentError when the distributions span different universes.
double hellinger(const CategoryDistribution& p, const CategoryDistribution& q);

// Hellinger distance between the category distributions of a user's profile
// and their recommendation list.
double miscalibration(std::span<const ItemId> profile, std::span<const ItemId> recommendations,
                      const ItemCatalog& catalog);

// Two-level average: mean over users of each user's mean item popularity.
// Computes GAP_p when the lists are profiles and GAP_q when they are
// recommendation lists. Every list must be non-empty.
double group_gap(const std::vector<std::vector<ItemId>>& user_item_lists,
                 const PopularityIndex& theta);

// Relative popularity amplification (gap_q - gap_p) / gap_p. Positive means
// the recommendations concentrate on popular items more than the profiles
// do. Throws ArgumentError when gap_p is zero.
double popularity_lift(double gap_q, double gap_p);

// |recommendations ∩ relevant| / n.
double precision_at_n(std::span<const ItemId> recommendations,
                      const std::unordered_set<ItemId>& relevant, int n);

// Everything the audit measures for one user under one algorithm.
struct UserAudit {
  UserId user = 0;
  CategoryDistribution profile_distribution;
  CategoryDistribution recommendation_distribution;
  double mc = 0.0;            // hellinger(profile, recommendations)
  double profile_gap = 0.0;   // mean theta over the training profile
  double rec_gap = 0.0;       // mean theta over the recommendation list
  std::optional<double> precision;  // absent when the user has no relevant test items
  std::uint32_t n_profile = 0;
  std::uint32_t n_recs = 0;
};

struct AuditSkip {
  UserId user = 0;
  std::string reason;
};

struct AuditResult {
  std::vector<UserAudit> audits;    // ordered as the input lists
  std::vector<AuditSkip> skipped;
};

// One user's recommendation list, as consumed by the audit. The pipeline
// builds these either from an in-memory RecommendationSet or from a
// recommendations file, so third-party lists can be audited too.
struct UserRecList {
  UserId user = 0;
  std::vector<ItemId> items;
};

// Audits each listed user against their training profile: distributions,
// miscalibration, profile/recommendation popularity means, and (when the
// user has relevant test interactions) precision at `list_size`. Users with
// an empty recommendation list are skipped with a recorded reason. The
// profile side never reads test data.
AuditResult compute_user_audits(const RatingsTable& train, const ItemCatalog& catalog,
                                const PopularityIndex& theta,
                                std::span<const UserRecList> recommendations,
                                const RatingsTable& test, std::optional<double> relevance_threshold,
                                int list_size, int jobs = 1);

}  // namespace recaudit
