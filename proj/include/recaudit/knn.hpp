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

#include <vector>

#include "recaudit/recommender.hpp"

namespace recaudit {

struct Neighbor {
  std::uint32_t index;  // counterpart user/item training index
  double sim;
};

// Neighborhood model over plain Pearson/cosine similarity computed on
// co-rated entries only; pairs with fewer than 2 co-ratings get similarity
// 0 and are dropped. Predictions are similarity-weighted deviations from
// the mean (user means for user-based, item means for item-based); when no
// neighbor information exists the score falls back to the user's training
// mean.
class KnnModel : public FittedModel {
 public:
  enum class Kind { kUserBased, kItemBased };

  KnnModel(const RatingsTable& train, Kind kind, Similarity similarity, int neighborhood_size,
           int jobs = 1);

  Algorithm algorithm() const override {
    return kind_ == Kind::kUserBased ? Algorithm::kUserKnn : Algorithm::kItemKnn;
  }
  void score_candidates(std::uint32_t user_index, std::span<const std::int64_t> items,
                        std::span<double> out) const override;

  Kind kind() const { return kind_; }
  // Top-k neighbors per user (user-based) or per item (item-based), sorted
  // by similarity descending, index ascending.
  const std::vector<std::vector<Neighbor>>& neighbor_lists() const { return neighbors_; }

 private:
  void score_user_based(std::uint32_t user_index, std::span<const std::int64_t> items,
                        std::span<double> out) const;
  void score_item_based(std::uint32_t user_index, std::span<const std::int64_t> items,
                        std::span<double> out) const;

  Kind kind_;
  Similarity similarity_;
  int neighborhood_size_;
  std::vector<std::vector<Neighbor>> neighbors_;
  // Item-based only: for item j, the items i having j among their top-k,
  // with sim(i, j); lets per-user scoring walk the profile instead of every
  // candidate's neighbor list.
  std::vector<std::vector<Neighbor>> reverse_neighbors_;
};

}  // namespace recaudit
