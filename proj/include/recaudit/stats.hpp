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

#include <span>

namespace recaudit {

// Sample mean and unbiased variance (two-pass).
struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;
};
MeanVar mean_variance(std::span<const double> values);

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation (Lentz). Accurate to ~1e-12 for the parameter ranges used here.
double regularized_incomplete_beta(double a, double b, double x);

// Standard normal CDF.
double normal_cdf(double z);

// Two-sided tail probability P(|T_df| >= |t|) of Student's t distribution.
double student_t_two_sided_p(double t, double df);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

// Two-sided Welch unequal-variance t-test. Both samples need >= 2 values.
// Degenerate samples (zero pooled standard error) give p = 1 when the means
// agree and p = 0 otherwise.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct MannWhitneyResult {
  double u = 0.0;  // U statistic of the first sample
  double z = 0.0;
  double p = 1.0;
};

// Two-sided Mann-Whitney U test, normal approximation with tie correction
// and continuity correction. Both samples need >= 1 value; all-tied input
// gives p = 1.
MannWhitneyResult mann_whitney_u_test(std::span<const double> a, std::span<const double> b);

}  // namespace recaudit
