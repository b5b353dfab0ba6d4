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

#include "recaudit/knn.hpp"

#include <algorithm>
#include <cmath>

#include "recaudit/parallel.hpp"

namespace recaudit {

namespace {

// Co-rating accumulators for one (row, counterpart) pair.
struct PairSums {
  std::uint32_t n = 0;
  double sx = 0.0, sy = 0.0, sxy = 0.0, sxx = 0.0, syy = 0.0;
};

double pair_similarity(const PairSums& s, Similarity similarity) {
  if (s.n < 2) return 0.0;
  double num, den;
  if (similarity == Similarity::kPearson) {
    const double n = static_cast<double>(s.n);
    num = n * s.sxy - s.sx * s.sy;
    den = std::sqrt(n * s.sxx - s.sx * s.sx) * std::sqrt(n * s.syy - s.sy * s.sy);
  } else {
    num = s.sxy;
    den = std::sqrt(s.sxx) * std::sqrt(s.syy);
  }
  if (!(den > 0.0)) return 0.0;
  return num / den;
}

}  // namespace

KnnModel::KnnModel(const RatingsTable& train, Kind kind, Similarity similarity,
                   int neighborhood_size, int jobs)
    : FittedModel(train),
      kind_(kind),
      similarity_(similarity),
      neighborhood_size_(neighborhood_size) {
  if (neighborhood_size < 1) throw ConfigError("neighborhood_size must be >= 1");
  if (train.empty()) throw ArgumentError("knn requires a non-empty training table");

  const bool user_based = kind == Kind::kUserBased;
  const std::size_t n_rows = user_based ? train.n_users() : train.n_items();
  neighbors_.resize(n_rows);

  // Rows are independent; scratch is per chunk so thread count never
  // changes any similarity value.
  const std::size_t n_chunks = jobs <= 1 ? 1 : static_cast<std::size_t>(jobs) * 4;
  const std::size_t chunk_size = (n_rows + n_chunks - 1) / n_chunks;
  parallel_for(n_chunks, jobs, [&](std::size_t chunk) {
    const std::size_t begin = chunk * chunk_size;
    const std::size_t end = std::min(n_rows, begin + chunk_size);
    if (begin >= end) return;

    std::vector<PairSums> sums(n_rows);
    std::vector<std::uint32_t> touched;
    touched.reserve(n_rows);

    for (std::size_t row = begin; row < end; ++row) {
      const auto row32 = static_cast<std::uint32_t>(row);
      const auto& profile =
          user_based ? train.user_profile(row32) : train.item_raters(row32);
      for (const IndexedRating& entry : profile) {
        const auto& co_raters =
            user_based ? train.item_raters(entry.index) : train.user_profile(entry.index);
        for (const IndexedRating& other : co_raters) {
          if (other.index == row32) continue;
          PairSums& s = sums[other.index];
          if (s.n == 0) touched.push_back(other.index);
          ++s.n;
          s.sx += entry.value;
          s.sy += other.value;
          s.sxy += entry.value * other.value;
          s.sxx += entry.value * entry.value;
          s.syy += other.value * other.value;
        }
      }

      std::vector<Neighbor> candidates;
      candidates.reserve(touched.size());
      // touched order depends on input order; sort so selection is stable
      std::sort(touched.begin(), touched.end());
      for (const std::uint32_t other : touched) {
        const double sim = pair_similarity(sums[other], similarity_);
        if (sim != 0.0) candidates.push_back({other, sim});
        sums[other] = PairSums{};
      }
      touched.clear();

      const std::size_t keep =
          std::min<std::size_t>(static_cast<std::size_t>(neighborhood_size), candidates.size());
      std::partial_sort(candidates.begin(), candidates.begin() + keep, candidates.end(),
                        [](const Neighbor& a, const Neighbor& b) {
                          if (a.sim != b.sim) return a.sim > b.sim;
                          return a.index < b.index;
                        });
      candidates.resize(keep);
      candidates.shrink_to_fit();
      neighbors_[row] = std::move(candidates);
    }
  });

  if (!user_based) {
    reverse_neighbors_.resize(n_rows);
    for (std::uint32_t i = 0; i < n_rows; ++i) {
      for (const Neighbor& nb : neighbors_[i]) {
        reverse_neighbors_[nb.index].push_back({i, nb.sim});
      }
    }
  }
}

void KnnModel::score_candidates(std::uint32_t user_index, std::span<const std::int64_t> items,
                                std::span<double> out) const {
  if (kind_ == Kind::kUserBased) {
    score_user_based(user_index, items, out);
  } else {
    score_item_based(user_index, items, out);
  }
}

void KnnModel::score_user_based(std::uint32_t user_index, std::span<const std::int64_t> items,
                                std::span<double> out) const {
  const RatingsTable& train = *train_;
  const double user_mean = train.user_mean(user_index);

  std::vector<double> num(train.n_items(), 0.0);
  std::vector<double> den(train.n_items(), 0.0);
  for (const Neighbor& nb : neighbors_[user_index]) {
    const double neighbor_mean = train.user_mean(nb.index);
    for (const IndexedRating& ir : train.user_profile(nb.index)) {
      num[ir.index] += nb.sim * (ir.value - neighbor_mean);
      den[ir.index] += std::fabs(nb.sim);
    }
  }

  for (std::size_t k = 0; k < items.size(); ++k) {
    if (items[k] == kUnseenItem || den[items[k]] <= 0.0) {
      out[k] = user_mean;
    } else {
      out[k] = user_mean + num[items[k]] / den[items[k]];
    }
  }
}

void KnnModel::score_item_based(std::uint32_t user_index, std::span<const std::int64_t> items,
                                std::span<double> out) const {
  const RatingsTable& train = *train_;
  const double user_mean = train.user_mean(user_index);

  std::vector<double> num(train.n_items(), 0.0);
  std::vector<double> den(train.n_items(), 0.0);
  for (const IndexedRating& ir : train.user_profile(user_index)) {
    const double rated_item_mean = train.item_mean(ir.index);
    for (const Neighbor& nb : reverse_neighbors_[ir.index]) {
      num[nb.index] += nb.sim * (ir.value - rated_item_mean);
      den[nb.index] += std::fabs(nb.sim);
    }
  }

  for (std::size_t k = 0; k < items.size(); ++k) {
    if (items[k] == kUnseenItem || den[items[k]] <= 0.0) {
      out[k] = user_mean;
    } else {
      out[k] = train.item_mean(static_cast<std::uint32_t>(items[k])) +
               num[items[k]] / den[items[k]];
    }
  }
}

}  // namespace recaudit
