// Copyright 2026 The Mace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MACE_SPECIAL_FUNCTIONS_HPP
#define MACE_SPECIAL_FUNCTIONS_HPP

namespace mace {

// Standard normal CDF.
double normal_cdf(double x);

// Inverse of the standard normal CDF for prob in (0, 1).  Rational
// approximation refined with one Halley step; absolute error is near
// machine precision over the full open interval.
double normal_quantile(double prob);

// log of the Beta function B(a, b), a > 0, b > 0.
double log_beta(double a, double b);

// Regularized incomplete beta function I_x(a, b) for a > 0, b > 0 and
// x in [0, 1], evaluated with a Lentz-style continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// Smallest x with I_x(a, b) >= prob, found by bisection to absolute
// tolerance 1e-10.  prob must lie in [0, 1].
double incomplete_beta_inv(double a, double b, double prob);

}  // namespace mace

#endif  // MACE_SPECIAL_FUNCTIONS_HPP
