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

#include "recaudit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "recaudit/parallel.hpp"

namespace recaudit {

CategoryDistribution category_distribution(std::span<const ItemId> items,
                                           const ItemCatalog& catalog) {
  if (items.empty()) {
    throw ArgumentError("category distribution is undefined for an empty item set");
  }
  CategoryDistribution dist;
  dist.mass.assign(catalog.n_categories(), 0.0);
  const double per_item = 1.0 / static_cast<double>(items.size());
  for (const ItemId item : items) {
    const auto cats = catalog.item_categories(item);  // throws if missing
    const double share = per_item / static_cast<double>(cats.size());
    for (const std::uint16_t c : cats) dist.mass[c] += share;
  }
  return dist;
}

double hellinger(const CategoryDistribution& p, const CategoryDistribution& q) {
  if (p.mass.size() != q.mass.size()) {
    throw ArgumentError("hellinger distance requires distributions over the same categories");
  }
  double sum_sq = 0.0;
  for (std::size_t c = 0; c < p.mass.size(); ++c) {
    const double d = std::sqrt(p.mass[c]) - std::sqrt(q.mass[c]);
    sum_sq += d * d;
  }
  // Clamp tiny negative drift and the >1 overshoot from rounding.
  return std::min(1.0, std::sqrt(sum_sq / 2.0));
}

double miscalibration(std::span<const ItemId> profile, std::span<const ItemId> recommendations,
                      const ItemCatalog& catalog) {
  return hellinger(category_distribution(profile, catalog),
                   category_distribution(recommendations, catalog));
}

double group_gap(const std::vector<std::vector<ItemId>>& user_item_lists,
                 const PopularityIndex& theta) {
  if (user_item_lists.empty()) throw ArgumentError("group gap requires at least one user");
  double sum_of_means = 0.0;
  for (const auto& list : user_item_lists) {
    if (list.empty()) throw ArgumentError("group gap requires non-empty item lists");
    double sum = 0.0;
    for (const ItemId item : list) sum += theta.theta(item);
    sum_of_means += sum / static_cast<double>(list.size());
  }
  return sum_of_means / static_cast<double>(user_item_lists.size());
}

double popularity_lift(double gap_q, double gap_p) {
  if (gap_p == 0.0) throw ArgumentError("popularity lift is undefined when gap_p is zero");
  return (gap_q - gap_p) / gap_p;
}

double precision_at_n(std::span<const ItemId> recommendations,
                      const std::unordered_set<ItemId>& relevant, int n) {
  if (n < 1) throw ArgumentError("precision requires n >= 1");
  std::size_t hits = 0;
  for (const ItemId item : recommendations) {
    if (relevant.count(item) > 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

AuditResult compute_user_audits(const RatingsTable& train, const ItemCatalog& catalog,
                                const PopularityIndex& theta,
                                std::span<const UserRecList> recommendations,
                                const RatingsTable& test, std::optional<double> relevance_threshold,
                                int list_size, int jobs) {
  if (list_size < 1) throw ArgumentError("list size must be >= 1");

  struct Slot {
    bool skipped = false;
    std::string skip_reason;
    UserAudit audit;
  };
  std::vector<Slot> slots(recommendations.size());

  parallel_for(recommendations.size(), jobs, [&](std::size_t idx) {
    const UserRecList& rec = recommendations[idx];
    Slot& slot = slots[idx];
    slot.audit.user = rec.user;

    if (rec.items.empty()) {
      slot.skipped = true;
      slot.skip_reason = "empty recommendation list";
      return;
    }
    const auto uidx = train.user_index(rec.user);
    if (!uidx) {
      slot.skipped = true;
      slot.skip_reason = "user absent from training table";
      return;
    }

    std::vector<ItemId> profile;
    profile.reserve(train.user_profile(*uidx).size());
    for (const IndexedRating& ir : train.user_profile(*uidx)) {
      profile.push_back(train.item_id(ir.index));
    }

    UserAudit& audit = slot.audit;
    audit.profile_distribution = category_distribution(profile, catalog);
    audit.recommendation_distribution = category_distribution(rec.items, catalog);
    audit.mc = hellinger(audit.profile_distribution, audit.recommendation_distribution);

    double profile_theta = 0.0;
    for (const ItemId item : profile) profile_theta += theta.theta(item);
    audit.profile_gap = profile_theta / static_cast<double>(profile.size());

    double rec_theta = 0.0;
    for (const ItemId item : rec.items) rec_theta += theta.theta(item);
    audit.rec_gap = rec_theta / static_cast<double>(rec.items.size());

    audit.n_profile = static_cast<std::uint32_t>(profile.size());
    audit.n_recs = static_cast<std::uint32_t>(rec.items.size());

    if (const auto test_uidx = test.user_index(rec.user)) {
      std::unordered_set<ItemId> relevant;
      for (const IndexedRating& ir : test.user_profile(*test_uidx)) {
        if (!relevance_threshold || ir.value >= *relevance_threshold) {
          relevant.insert(test.item_id(ir.index));
        }
      }
      if (!relevant.empty()) {
        audit.precision = precision_at_n(rec.items, relevant, list_size);
      }
    }
  });

  AuditResult result;
  result.audits.reserve(slots.size());
  for (Slot& slot : slots) {
    if (slot.skipped) {
      result.skipped.push_back({slot.audit.user, std::move(slot.skip_reason)});
    } else {
      result.audits.push_back(std::move(slot.audit));
    }
  }
  return result;
}

}  // namespace recaudit
