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

#include "recaudit/mf.hpp"

#include <cmath>

#include "recaudit/rng.hpp"

namespace recaudit {

namespace mf_math {

double predict(double mu, double bu, double bi, std::span<const double> pu,
               std::span<const double> qi) {
  double dot = 0.0;
  for (std::size_t f = 0; f < pu.size(); ++f) dot += pu[f] * qi[f];
  return mu + bu + bi + dot;
}

double pointwise_loss(double rating, double mu, double bu, double bi, std::span<const double> pu,
                      std::span<const double> qi, double reg) {
  const double e = rating - predict(mu, bu, bi, pu, qi);
  double norms = bu * bu + bi * bi;
  for (std::size_t f = 0; f < pu.size(); ++f) norms += pu[f] * pu[f] + qi[f] * qi[f];
  return e * e + reg * norms;
}

void pointwise_gradient(double rating, double mu, double bu, double bi,
                        std::span<const double> pu, std::span<const double> qi, double reg,
                        double& grad_bu, double& grad_bi, std::span<double> grad_pu,
                        std::span<double> grad_qi) {
  const double e = rating - predict(mu, bu, bi, pu, qi);
  grad_bu = -2.0 * e + 2.0 * reg * bu;
  grad_bi = -2.0 * e + 2.0 * reg * bi;
  for (std::size_t f = 0; f < pu.size(); ++f) {
    grad_pu[f] = -2.0 * e * qi[f] + 2.0 * reg * pu[f];
    grad_qi[f] = -2.0 * e * pu[f] + 2.0 * reg * qi[f];
  }
}

}  // namespace mf_math

namespace {

void validate_mf_config(const ModelConfig& config) {
  if (config.factors < 1) throw ConfigError("factors must be >= 1");
  if (config.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (config.epochs > 0 && !(config.learning_rate > 0.0)) {
    throw ConfigError("learning_rate must be > 0");
  }
  if (config.regularization < 0.0) throw ConfigError("regularization must be >= 0");
}

MfParams init_params(const RatingsTable& train, const ModelConfig& config, Rng& rng,
                     bool with_implicit) {
  MfParams params;
  params.n_factors = config.factors;
  params.global_mean = train.global_mean();
  params.user_bias.assign(train.n_users(), 0.0);
  params.item_bias.assign(train.n_items(), 0.0);
  params.user_factors.resize(train.n_users() * static_cast<std::size_t>(config.factors));
  params.item_factors.resize(train.n_items() * static_cast<std::size_t>(config.factors));
  for (double& v : params.user_factors) v = rng.uniform(-0.01, 0.01);
  for (double& v : params.item_factors) v = rng.uniform(-0.01, 0.01);
  if (with_implicit) {
    params.implicit_factors.resize(train.n_items() * static_cast<std::size_t>(config.factors));
    for (double& v : params.implicit_factors) v = rng.uniform(-0.01, 0.01);
  }
  return params;
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return s;
}

}  // namespace

// --- BMF -----------------------------------------------------------------

BmfModel::BmfModel(const RatingsTable& train, MfParams params)
    : FittedModel(train), params_(std::move(params)) {}

std::unique_ptr<BmfModel> BmfModel::fit_model(const RatingsTable& train,
                                              const ModelConfig& config) {
  validate_mf_config(config);
  if (train.empty()) throw ArgumentError("bmf requires a non-empty training table");

  Rng rng(config.seed);
  MfParams params = init_params(train, config, rng, /*with_implicit=*/false);
  const int f = params.n_factors;
  const double lr = config.learning_rate;
  const double reg = config.regularization;

  // Resolve (user index, item index) once per rating.
  const std::size_t n = train.size();
  std::vector<std::uint32_t> rating_user(n), rating_item(n);
  std::vector<double> rating_value(n);
  {
    std::size_t pos = 0;
    for (const Rating& r : train.ratings()) {
      rating_user[pos] = *train.user_index(r.user);
      rating_item[pos] = *train.item_index(r.item);
      rating_value[pos] = r.value;
      ++pos;
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  auto model = std::make_unique<BmfModel>(train, std::move(params));
  MfParams& p = model->params_;
  std::vector<double> grad_pu(f), grad_qi(f);

  auto objective = [&] {
    double j = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double e = rating_value[r] - mf_math::predict(p.global_mean,
                                                          p.user_bias[rating_user[r]],
                                                          p.item_bias[rating_item[r]],
                                                          p.user_row(rating_user[r]),
                                                          p.item_row(rating_item[r]));
      j += e * e;
    }
    j += reg * (squared_norm(p.user_bias) + squared_norm(p.item_bias) +
                squared_norm(p.user_factors) + squared_norm(p.item_factors));
    return std::sqrt(j / static_cast<double>(n));
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (const std::size_t r : order) {
      const std::uint32_t u = rating_user[r];
      const std::uint32_t i = rating_item[r];
      double* pu = p.user_factors.data() + static_cast<std::size_t>(u) * f;
      double* qi = p.item_factors.data() + static_cast<std::size_t>(i) * f;
      double grad_bu, grad_bi;
      mf_math::pointwise_gradient(rating_value[r], p.global_mean, p.user_bias[u],
                                  p.item_bias[i], {pu, static_cast<std::size_t>(f)},
                                  {qi, static_cast<std::size_t>(f)}, reg, grad_bu, grad_bi,
                                  grad_pu, grad_qi);
      p.user_bias[u] -= 0.5 * lr * grad_bu;
      p.item_bias[i] -= 0.5 * lr * grad_bi;
      for (int k = 0; k < f; ++k) {
        pu[k] -= 0.5 * lr * grad_pu[k];
        qi[k] -= 0.5 * lr * grad_qi[k];
      }
    }
    model->trace_.push_back(objective());
  }
  return model;
}

void BmfModel::score_candidates(std::uint32_t user_index, std::span<const std::int64_t> items,
                                std::span<double> out) const {
  const auto pu = params_.user_row(user_index);
  const double base = params_.global_mean + params_.user_bias[user_index];
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (items[k] == kUnseenItem) {
      out[k] = base;
      continue;
    }
    const auto i = static_cast<std::uint32_t>(items[k]);
    const auto qi = params_.item_row(i);
    double dot = 0.0;
    for (std::size_t c = 0; c < pu.size(); ++c) dot += pu[c] * qi[c];
    out[k] = base + params_.item_bias[i] + dot;
  }
}

// --- SVD++ ---------------------------------------------------------------

SvdppModel::SvdppModel(const RatingsTable& train, MfParams params)
    : FittedModel(train), params_(std::move(params)) {
  rebuild_composite();
}

void SvdppModel::rebuild_composite() {
  const int f = params_.n_factors;
  composite_.assign(params_.user_factors.size(), 0.0);
  for (std::uint32_t u = 0; u < train_->n_users(); ++u) {
    const auto& profile = train_->user_profile(u);
    const double w = 1.0 / std::sqrt(static_cast<double>(profile.size()));
    double* comp = composite_.data() + static_cast<std::size_t>(u) * f;
    const double* pu = params_.user_factors.data() + static_cast<std::size_t>(u) * f;
    for (int k = 0; k < f; ++k) comp[k] = pu[k];
    if (params_.implicit_factors.empty()) continue;
    for (const IndexedRating& ir : profile) {
      const double* y = params_.implicit_factors.data() + static_cast<std::size_t>(ir.index) * f;
      for (int k = 0; k < f; ++k) comp[k] += w * y[k];
    }
  }
}

std::unique_ptr<SvdppModel> SvdppModel::fit_model(const RatingsTable& train,
                                                  const ModelConfig& config) {
  validate_mf_config(config);
  if (train.empty()) throw ArgumentError("svdpp requires a non-empty training table");

  Rng rng(config.seed);
  MfParams params = init_params(train, config, rng, /*with_implicit=*/true);
  const int f = params.n_factors;
  const double lr = config.learning_rate;
  const double reg = config.regularization;
  const double decay = 1.0 - lr * reg;
  const std::size_t n_users = train.n_users();

  // Examples are visited user block by user block so the implicit-feedback
  // sum can be maintained incrementally; both the user order and the order
  // of each user's ratings are reshuffled every epoch.
  std::vector<std::uint32_t> user_order(n_users);
  for (std::uint32_t u = 0; u < n_users; ++u) user_order[u] = u;

  std::vector<double> implicit_sum(f), old_qi(f), pending(f);

  auto objective = [&](const MfParams& p, const std::vector<double>& composite) {
    double j = 0.0;
    for (std::uint32_t u = 0; u < n_users; ++u) {
      const double* comp = composite.data() + static_cast<std::size_t>(u) * f;
      for (const IndexedRating& ir : train.user_profile(u)) {
        const double* qi = p.item_factors.data() + static_cast<std::size_t>(ir.index) * f;
        double dot = 0.0;
        for (int k = 0; k < f; ++k) dot += comp[k] * qi[k];
        const double e = ir.value - (p.global_mean + p.user_bias[u] + p.item_bias[ir.index] + dot);
        j += e * e;
      }
    }
    j += reg * (squared_norm(p.user_bias) + squared_norm(p.item_bias) +
                squared_norm(p.user_factors) + squared_norm(p.item_factors) +
                squared_norm(p.implicit_factors));
    return std::sqrt(j / static_cast<double>(train.size()));
  };

  auto model = std::make_unique<SvdppModel>(train, std::move(params));
  MfParams& p = model->params_;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(user_order);
    for (const std::uint32_t u : user_order) {
      const auto& profile = train.user_profile(u);
      const auto m = profile.size();
      const double w = 1.0 / std::sqrt(static_cast<double>(m));

      std::vector<std::uint32_t> positions(m);
      for (std::uint32_t s = 0; s < m; ++s) positions[s] = s;
      rng.shuffle(positions);

      // implicit_sum = sum of y_j over the user's profile, kept exact while
      // this block owns those rows.
      for (int k = 0; k < f; ++k) implicit_sum[k] = 0.0;
      for (const IndexedRating& ir : profile) {
        const double* y = p.implicit_factors.data() + static_cast<std::size_t>(ir.index) * f;
        for (int k = 0; k < f; ++k) implicit_sum[k] += y[k];
      }

      // Every rating of the block applies the same affine update
      // y <- decay * y + d to each profile y_j, so the per-row writes are
      // deferred: scale factors and additive terms accumulate in
      // (y_scale, pending) and materialize once at block end.
      double y_scale = 1.0;
      for (int k = 0; k < f; ++k) pending[k] = 0.0;

      double* pu = p.user_factors.data() + static_cast<std::size_t>(u) * f;
      for (const std::uint32_t s : positions) {
        const IndexedRating& ir = profile[s];
        const std::uint32_t i = ir.index;
        double* qi = p.item_factors.data() + static_cast<std::size_t>(i) * f;

        double dot = 0.0;
        for (int k = 0; k < f; ++k) dot += (pu[k] + w * implicit_sum[k]) * qi[k];
        const double e = ir.value - (p.global_mean + p.user_bias[u] + p.item_bias[i] + dot);

        p.user_bias[u] += lr * (e - reg * p.user_bias[u]);
        p.item_bias[i] += lr * (e - reg * p.item_bias[i]);
        for (int k = 0; k < f; ++k) {
          old_qi[k] = qi[k];
          qi[k] += lr * (e * (pu[k] + w * implicit_sum[k]) - reg * qi[k]);
          pu[k] += lr * (e * old_qi[k] - reg * pu[k]);
        }
        const double dm = static_cast<double>(m);
        y_scale *= decay;
        for (int k = 0; k < f; ++k) {
          const double d = lr * e * w * old_qi[k];
          pending[k] = decay * pending[k] + d;
          implicit_sum[k] = decay * implicit_sum[k] + dm * d;
        }
      }

      for (const IndexedRating& ir : profile) {
        double* y = p.implicit_factors.data() + static_cast<std::size_t>(ir.index) * f;
        for (int k = 0; k < f; ++k) y[k] = y_scale * y[k] + pending[k];
      }
    }
    model->rebuild_composite();
    model->trace_.push_back(objective(p, model->composite_));
  }
  model->rebuild_composite();
  return model;
}

void SvdppModel::score_candidates(std::uint32_t user_index, std::span<const std::int64_t> items,
                                  std::span<double> out) const {
  const int f = params_.n_factors;
  const double* comp = composite_.data() + static_cast<std::size_t>(user_index) * f;
  const double base = params_.global_mean + params_.user_bias[user_index];
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (items[k] == kUnseenItem) {
      out[k] = base;
      continue;
    }
    const auto i = static_cast<std::uint32_t>(items[k]);
    const double* qi = params_.item_factors.data() + static_cast<std::size_t>(i) * f;
    double dot = 0.0;
    for (int c = 0; c < f; ++c) dot += comp[c] * qi[c];
    out[k] = base + params_.item_bias[i] + dot;
  }
}

}  // namespace recaudit
