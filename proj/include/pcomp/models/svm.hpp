/*
 * Copyright 2026 The pcomp Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PCOMP_MODELS_SVM_HPP_
#define PCOMP_MODELS_SVM_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pcomp/matrix.hpp"

namespace pcomp::models {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);
// Full symmetric kernel matrix of the rows of x.
Matrix rbf_gram(const Matrix& x, double gamma);

// Dual problem in the common form
//   minimize 0.5 a'Qa + p'a   s.t.  y'a = 0,  0 <= a_t <= C
// with Q_ts = y_t y_s K(base_t, base_s). Classification uses one variable per
// sample; epsilon-regression uses two (base_t = t mod n).
struct DualProblem {
  const Matrix* gram = nullptr;
  std::vector<std::size_t> base;
  std::vector<double> y;  // +1 / -1
  std::vector<double> p;
  double c = 1.0;
};

struct DualSolution {
  std::vector<double> alpha;
  // Decision function offset: f(x) = sum_t y_t a_t K(x_t, x) - rho.
  double rho = 0.0;
  double objective = 0.0;
  // Maximal KKT violation m(a) - M(a) at exit.
  double kkt_gap = 0.0;
  long iterations = 0;
  bool converged = false;
};

// Sequential minimal optimization with second-order working-set selection.
// Stops once the maximal violating pair gap falls below `tol`.
DualSolution solve_dual(const DualProblem& problem, double tol, long max_iterations);

double dual_objective(const DualProblem& problem, std::span<const double> alpha);

// Sigmoid P(y=1 | f) = 1 / (1 + exp(a f + b)) fitted by regularized maximum
// likelihood with Newton's method and backtracking.
struct PlattScaling {
  double a = 0.0;
  double b = 0.0;

  // {P(class 0), P(class 1)}.
  std::array<double, 2> probabilities(double decision) const;
};

PlattScaling fit_platt(std::span<const double> decisions, std::span<const double> labels01);

struct SvmParams {
  double c = 10.0;
  // <= 0 selects 1 / (d * var(x)).
  double gamma = 0.0;
  double epsilon = 0.1;
  double tol = 1e-3;
  long max_iterations = 10'000'000;
};

class KernelMachine {
 public:
  bool regression = false;
  double gamma = 1.0;
  Matrix support;
  std::vector<double> coef;
  double rho = 0.0;
  PlattScaling platt;
  DualSolution diagnostics;  // alpha cleared after training

  double decision(std::span<const double> x) const;

  nlohmann::json to_json() const;
  static KernelMachine from_json(const nlohmann::json& j);
};

double auto_gamma(const Matrix& x);

// Soft-margin classifier on 0/1 labels with Platt calibration on the training
// decision values.
KernelMachine fit_svc(const Matrix& x, std::span<const double> labels01, const SvmParams& params);
// Epsilon-insensitive regression.
KernelMachine fit_svr(const Matrix& x, std::span<const double> y, const SvmParams& params);

}  // namespace pcomp::models

#endif  // PCOMP_MODELS_SVM_HPP_
