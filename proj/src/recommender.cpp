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

#include "recaudit/recommender.hpp"

#include <algorithm>
#include <unordered_set>

#include "recaudit/knn.hpp"
#include "recaudit/mf.hpp"
#include "recaudit/most_popular.hpp"
#include "recaudit/parallel.hpp"

namespace recaudit {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "user-knn") return Algorithm::kUserKnn;
  if (name == "item-knn") return Algorithm::kItemKnn;
  if (name == "most-popular") return Algorithm::kMostPopular;
  if (name == "bmf") return Algorithm::kBmf;
  if (name == "svdpp") return Algorithm::kSvdpp;
  throw ConfigError("unknown algorithm '" + name +
                    "' (valid: user-knn, item-knn, most-popular, bmf, svdpp)");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kUserKnn: return "user-knn";
    case Algorithm::kItemKnn: return "item-knn";
    case Algorithm::kMostPopular: return "most-popular";
    case Algorithm::kBmf: return "bmf";
    case Algorithm::kSvdpp: return "svdpp";
  }
  return "unknown";
}

Similarity parse_similarity(const std::string& name) {
  if (name == "pearson") return Similarity::kPearson;
  if (name == "cosine") return Similarity::kCosine;
  throw ConfigError("unknown similarity '" + name + "' (valid: pearson, cosine)");
}

std::string to_string(Similarity similarity) {
  return similarity == Similarity::kPearson ? "pearson" : "cosine";
}

ModelConfig default_model_config(Algorithm algorithm) {
  ModelConfig config;
  config.algorithm = algorithm;
  switch (algorithm) {
    case Algorithm::kUserKnn:
      config.neighborhood_size = 50;
      config.similarity = Similarity::kPearson;
      break;
    case Algorithm::kItemKnn:
      config.neighborhood_size = 50;
      config.similarity = Similarity::kCosine;
      break;
    case Algorithm::kMostPopular:
      break;
    case Algorithm::kBmf:
      config.factors = 50;
      config.learning_rate = 0.005;
      config.regularization = 0.02;
      config.epochs = 30;
      break;
    case Algorithm::kSvdpp:
      config.factors = 30;
      config.learning_rate = 0.005;
      config.regularization = 0.02;
      config.epochs = 20;
      break;
  }
  return config;
}

double FittedModel::score(UserId user, ItemId item) const {
  const auto uidx = train_->user_index(user);
  if (!uidx) throw ArgumentError("user " + std::to_string(user) + " not in training table");
  const auto iidx = train_->item_index(item);
  const std::int64_t resolved = iidx ? static_cast<std::int64_t>(*iidx) : kUnseenItem;
  double out = 0.0;
  score_candidates(*uidx, {&resolved, 1}, {&out, 1});
  return out;
}

std::unique_ptr<FittedModel> fit(const RatingsTable& train, const ModelConfig& config, int jobs) {
  if (train.empty()) throw ArgumentError("fit requires a non-empty training table");
  switch (config.algorithm) {
    case Algorithm::kMostPopular:
      return std::make_unique<MostPopularModel>(train, popularity(train));
    case Algorithm::kUserKnn:
      return std::make_unique<KnnModel>(train, KnnModel::Kind::kUserBased, config.similarity,
                                        config.neighborhood_size, jobs);
    case Algorithm::kItemKnn:
      return std::make_unique<KnnModel>(train, KnnModel::Kind::kItemBased, config.similarity,
                                        config.neighborhood_size, jobs);
    case Algorithm::kBmf:
      return BmfModel::fit_model(train, config);
    case Algorithm::kSvdpp:
      return SvdppModel::fit_model(train, config);
  }
  throw ConfigError("unknown algorithm");
}

RecommendationSet recommend_top_n(const FittedModel& model, int n,
                                  std::span<const ItemId> candidate_items, int jobs) {
  if (n < 1) throw ArgumentError("list size must be >= 1");
  const RatingsTable& train = model.train();

  // Resolve candidate training indices once.
  std::vector<std::int64_t> candidate_index(candidate_items.size());
  for (std::size_t k = 0; k < candidate_items.size(); ++k) {
    const auto idx = train.item_index(candidate_items[k]);
    candidate_index[k] = idx ? static_cast<std::int64_t>(*idx) : kUnseenItem;
  }

  RecommendationSet set;
  set.list_size = n;
  set.users = train.users();
  std::sort(set.users.begin(), set.users.end());
  set.lists.resize(set.users.size());

  std::vector<std::uint8_t> is_short(set.users.size(), 0);

  parallel_for(set.users.size(), jobs, [&](std::size_t slot) {
    const std::uint32_t uidx = *train.user_index(set.users[slot]);

    std::unordered_set<ItemId> seen;
    seen.reserve(train.user_profile(uidx).size() * 2);
    for (const IndexedRating& ir : train.user_profile(uidx)) {
      seen.insert(train.item_id(ir.index));
    }

    std::vector<double> scores(candidate_items.size());
    model.score_candidates(uidx, candidate_index, scores);

    std::vector<ScoredItem> ranked;
    ranked.reserve(candidate_items.size());
    for (std::size_t k = 0; k < candidate_items.size(); ++k) {
      if (seen.count(candidate_items[k]) > 0) continue;
      ranked.push_back({candidate_items[k], scores[k]});
    }
    const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(n), ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end(),
                      [](const ScoredItem& a, const ScoredItem& b) {
                        if (a.score != b.score) return a.score > b.score;
                        return a.item < b.item;
                      });
    ranked.resize(keep);
    if (keep < static_cast<std::size_t>(n)) is_short[slot] = 1;
    set.lists[slot] = std::move(ranked);
  });

  for (std::size_t slot = 0; slot < set.users.size(); ++slot) {
    if (is_short[slot]) set.short_listed.push_back(set.users[slot]);
  }
  return set;
}

}  // namespace recaudit
