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

#include "recaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "recaudit/error.hpp"

namespace recaudit {

MeanVar mean_variance(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("mean_variance requires a non-empty sample");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return {mean, values.size() > 1 ? ss / (n - 1.0) : 0.0};
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 300;
  constexpr double kEps = 3e-14;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("incomplete beta requires a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw ArgumentError("t distribution requires df > 0");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw ArgumentError("welch t-test requires at least 2 values per sample");
  }
  const MeanVar ma = mean_variance(a);
  const MeanVar mb = mean_variance(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ga = ma.variance / na;
  const double gb = mb.variance / nb;

  TTestResult result;
  if (ga + gb == 0.0) {
    // No spread at all in either sample.
    result.t = 0.0;
    result.df = na + nb - 2.0;
    result.p = ma.mean == mb.mean ? 1.0 : 0.0;
    return result;
  }
  result.t = (ma.mean - mb.mean) / std::sqrt(ga + gb);
  // Welch-Satterthwaite degrees of freedom.
  result.df = (ga + gb) * (ga + gb) /
              (ga * ga / (na - 1.0) + gb * gb / (nb - 1.0));
  result.p = student_t_two_sided_p(result.t, result.df);
  return result;
}

MannWhitneyResult mann_whitney_u_test(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw ArgumentError("mann-whitney test requires non-empty samples");
  }
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t n = na + nb;

  struct Tagged {
    double value;
    bool from_a;
  };
  std::vector<Tagged> pooled;
  pooled.reserve(n);
  for (const double v : a) pooled.push_back({v, true});
  for (const double v : b) pooled.push_back({v, false});
  std::sort(pooled.begin(), pooled.end(),
            [](const Tagged& x, const Tagged& y) { return x.value < y.value; });

  // Average ranks within tie groups; accumulate the tie correction term.
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && pooled[j].value == pooled[i].value) ++j;
    const double tied = static_cast<double>(j - i);
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].from_a) rank_sum_a += avg_rank;
    }
    tie_term += tied * tied * tied - tied;
    i = j;
  }

  MannWhitneyResult result;
  result.u = rank_sum_a - static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;

  const double dn = static_cast<double>(n);
  const double mean_u = static_cast<double>(na) * static_cast<double>(nb) / 2.0;
  const double var_u = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                       ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (var_u <= 0.0) {
    // Every pooled value tied.
    result.z = 0.0;
    result.p = 1.0;
    return result;
  }
  const double diff = result.u - mean_u;
  // Continuity correction toward the mean.
  const double corrected = diff > 0.0 ? diff - 0.5 : diff < 0.0 ? diff + 0.5 : 0.0;
  result.z = corrected / std::sqrt(var_u);
  result.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::fabs(result.z))));
  return result;
}

}  // namespace recaudit
