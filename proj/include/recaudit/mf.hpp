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
#include <vector>

#include "recaudit/recommender.hpp"

namespace recaudit {

// Learned state shared by the factorization models. Biases start at zero and
// factor entries are drawn uniform in [-0.01, 0.01] from the seeded
// generator, so fits are bit-reproducible.
struct MfParams {
  int n_factors = 0;
  double global_mean = 0.0;
  std::vector<double> user_bias;         // by training user index
  std::vector<double> item_bias;         // by training item index
  std::vector<double> user_factors;      // row-major, user index * n_factors
  std::vector<double> item_factors;      // row-major, item index * n_factors
  std::vector<double> implicit_factors;  // y_j, row-major by item index; empty for plain MF

  std::span<const double> user_row(std::uint32_t u) const {
    return {user_factors.data() + static_cast<std::size_t>(u) * n_factors,
            static_cast<std::size_t>(n_factors)};
  }
  std::span<const double> item_row(std::uint32_t i) const {
    return {item_factors.data() + static_cast<std::size_t>(i) * n_factors,
            static_cast<std::size_t>(n_factors)};
  }
};

// Pointwise training math, shared between the SGD loop and the gradient
// tests: loss(r, u, i) = (r - pred)^2 + reg * (bu^2 + bi^2 + |pu|^2 + |qi|^2)
// with pred = mu + bu + bi + pu.qi.
namespace mf_math {

double predict(double mu, double bu, double bi, std::span<const double> pu,
               std::span<const double> qi);

double pointwise_loss(double rating, double mu, double bu, double bi, std::span<const double> pu,
                      std::span<const double> qi, double reg);

// Analytic d(loss)/d(parameter). grad_pu/grad_qi must have n_factors slots.
void pointwise_gradient(double rating, double mu, double bu, double bi,
                        std::span<const double> pu, std::span<const double> qi, double reg,
                        double& grad_bu, double& grad_bi, std::span<double> grad_pu,
                        std::span<double> grad_qi);

}  // namespace mf_math

// Biased matrix factorization trained by SGD on the regularized squared
// error, examples shuffled each epoch with the seeded generator.
// score(u, i) = mu + b_u + b_i + p_u . q_i.
class BmfModel : public FittedModel {
 public:
  static std::unique_ptr<BmfModel> fit_model(const RatingsTable& train,
                                             const ModelConfig& config);
  // Wraps existing parameters without training (tests, reductions).
  BmfModel(const RatingsTable& train, MfParams params);

  Algorithm algorithm() const override { return Algorithm::kBmf; }
  void score_candidates(std::uint32_t user_index, std::span<const std::int64_t> items,
                        std::span<double> out) const override;

  const MfParams& params() const { return params_; }
  // Regularized training RMSE after each epoch.
  const std::vector<double>& objective_trace() const { return trace_; }

 private:
  MfParams params_;
  std::vector<double> trace_;
};

// SVD++: score(u, i) = mu + b_u + b_i + q_i . (p_u + |G_u|^{-1/2} sum_{j in G_u} y_j).
// With all y_j zero this reduces exactly to BMF scoring.
class SvdppModel : public FittedModel {
 public:
  static std::unique_ptr<SvdppModel> fit_model(const RatingsTable& train,
                                               const ModelConfig& config);
  SvdppModel(const RatingsTable& train, MfParams params);

  Algorithm algorithm() const override { return Algorithm::kSvdpp; }
  void score_candidates(std::uint32_t user_index, std::span<const std::int64_t> items,
                        std::span<double> out) const override;

  const MfParams& params() const { return params_; }
  const std::vector<double>& objective_trace() const { return trace_; }
  // p_u + |G_u|^{-1/2} sum y_j, row-major by user index.
  const std::vector<double>& composite_user_factors() const { return composite_; }

 private:
  void rebuild_composite();

  MfParams params_;
  std::vector<double> composite_;
  std::vector<double> trace_;
};

}  // namespace recaudit
