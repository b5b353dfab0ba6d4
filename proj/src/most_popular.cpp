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

#include "recaudit/most_popular.hpp"

namespace recaudit {

MostPopularModel::MostPopularModel(const RatingsTable& train, PopularityIndex theta)
    : FittedModel(train), theta_(std::move(theta)) {
  theta_by_index_.resize(train.n_items());
  for (std::uint32_t i = 0; i < train.n_items(); ++i) {
    theta_by_index_[i] = theta_.theta(train.item_id(i));
  }
}

void MostPopularModel::score_candidates(std::uint32_t /*user_index*/,
                                        std::span<const std::int64_t> items,
                                        std::span<double> out) const {
  for (std::size_t k = 0; k < items.size(); ++k) {
    out[k] = items[k] == kUnseenItem ? 0.0 : theta_by_index_[items[k]];
  }
}

}  // namespace recaudit
