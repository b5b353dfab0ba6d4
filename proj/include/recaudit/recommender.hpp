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

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "recaudit/dataset.hpp"

namespace recaudit {

enum class Algorithm { kUserKnn, kItemKnn, kMostPopular, kBmf, kSvdpp };

inline constexpr Algorithm kAllAlgorithms[] = {
    Algorithm::kUserKnn, Algorithm::kItemKnn, Algorithm::kMostPopular,
    Algorithm::kBmf, Algorithm::kSvdpp,
};

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm algorithm);

enum class Similarity { kPearson, kCosine };

Similarity parse_similarity(const std::string& name);
std::string to_string(Similarity similarity);

struct ModelConfig {
  Algorithm algorithm = Algorithm::kMostPopular;
  // KNN
  int neighborhood_size = 0;
  Similarity similarity = Similarity::kCosine;
  // Matrix factorization
  int factors = 0;
  double learning_rate = 0.0;
  double regularization = 0.0;
  int epochs = 0;
  // Seed for factor initialization and epoch shuffling
  std::uint64_t seed = 1;
};

// Tuned-for-precision defaults per algorithm; every field can be overridden
// in the pipeline config.
ModelConfig default_model_config(Algorithm algorithm);

// Dense candidate representation for batch scoring: the item's index in the
// training table, or kUnseenItem for catalog items with no training ratings.
inline constexpr std::int64_t kUnseenItem = -1;

// A trained recommender. Immutable after fit; scoring is pure and safe for
// concurrent per-user fan-out.
class FittedModel {
 public:
  explicit FittedModel(const RatingsTable& train) : train_(&train) {}
  virtual ~FittedModel() = default;

  virtual Algorithm algorithm() const = 0;

  // Scores a batch of candidate items for one training user. `items` holds
  // training item indices (kUnseenItem for items outside the training
  // table); `out` has the same length.
  virtual void score_candidates(std::uint32_t user_index, std::span<const std::int64_t> items,
                                std::span<double> out) const = 0;

  // Single-pair convenience. The user must appear in the training table;
  // unknown items get the model's documented fallback score.
  double score(UserId user, ItemId item) const;

  const RatingsTable& train() const { return *train_; }

 protected:
  const RatingsTable* train_;
};

// Trains `config.algorithm` on the training table. Deterministic given
// (train, config); throws ConfigError on degenerate settings. `jobs` bounds
// internal parallelism and never affects results.
std::unique_ptr<FittedModel> fit(const RatingsTable& train, const ModelConfig& config,
                                 int jobs = 1);

struct ScoredItem {
  ItemId item = 0;
  double score = 0.0;
};

// Per-user ranked top-N lists. Users are ordered by ascending id; scores are
// non-increasing within a list with ties broken by ascending item id.
struct RecommendationSet {
  int list_size = 0;
  std::vector<UserId> users;
  std::vector<std::vector<ScoredItem>> lists;  // aligned with users
  std::vector<UserId> short_listed;            // users with fewer than list_size candidates
};

// Ranks every candidate item absent from the user's training profile by
// score (descending, ties by ascending item id) and keeps the top n, for
// every training user.
RecommendationSet recommend_top_n(const FittedModel& model, int n,
                                  std::span<const ItemId> candidate_items, int jobs = 1);

}  // namespace recaudit
