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

// Non-personalized baseline: score(u, i) = theta(i) for every user.
class MostPopularModel : public FittedModel {
 public:
  MostPopularModel(const RatingsTable& train, PopularityIndex theta);

  Algorithm algorithm() const override { return Algorithm::kMostPopular; }
  void score_candidates(std::uint32_t user_index, std::span<const std::int64_t> items,
                        std::span<double> out) const override;

  const PopularityIndex& theta() const { return theta_; }

 private:
  PopularityIndex theta_;
  std::vector<double> theta_by_index_;  // aligned with train item indices
};

}  // namespace recaudit
