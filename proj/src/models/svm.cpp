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

#include "pcomp/models/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "pcomp/error.hpp"

namespace pcomp::models {

namespace {

constexpr double kTau = 1e-12;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

Matrix rbf_gram(const Matrix& x, double gamma) {
  const std::size_t n = x.rows();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = rbf_kernel(x.row(i), x.row(j), gamma);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

double dual_objective(const DualProblem& pr, std::span<const double> alpha) {
  const std::size_t m = alpha.size();
  const Matrix& k = *pr.gram;
  double quad = 0.0, lin = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    if (alpha[t] == 0.0) continue;
    lin += pr.p[t] * alpha[t];
    for (std::size_t s = 0; s < m; ++s) {
      if (alpha[s] == 0.0) continue;
      quad += alpha[t] * alpha[s] * pr.y[t] * pr.y[s] * k(pr.base[t], pr.base[s]);
    }
  }
  return 0.5 * quad + lin;
}

DualSolution solve_dual(const DualProblem& pr, double tol, long max_iterations) {
  const std::size_t m = pr.y.size();
  if (pr.gram == nullptr || pr.base.size() != m || pr.p.size() != m) {
    throw InputError("solve_dual: inconsistent problem");
  }
  const Matrix& k = *pr.gram;
  const double c = pr.c;
  const auto kern = [&](std::size_t a, std::size_t b) { return k(pr.base[a], pr.base[b]); };

  DualSolution sol;
  sol.alpha.assign(m, 0.0);
  std::vector<double>& alpha = sol.alpha;
  std::vector<double> grad(pr.p);
  const auto in_up = [&](std::size_t t) {
    return pr.y[t] > 0 ? alpha[t] < c : alpha[t] > 0.0;
  };
  const auto in_low = [&](std::size_t t) {
    return pr.y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < c;
  };

  double gap = 0.0;
  long iter = 0;
  for (;; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::size_t i = m;
    for (std::size_t t = 0; t < m; ++t) {
      if (in_up(t) && -pr.y[t] * grad[t] >= gmax) {
        gmax = -pr.y[t] * grad[t];
        i = t;
      }
    }
    std::size_t j = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < m; ++t) {
      if (!in_low(t)) continue;
      const double yg = pr.y[t] * grad[t];
      gmax2 = std::max(gmax2, yg);
      if (i == m) continue;
      const double diff = gmax + yg;
      if (diff > 0.0) {
        double quad = kern(i, i) + kern(t, t) - 2.0 * kern(i, t);
        if (quad <= 0.0) quad = kTau;
        const double obj = -(diff * diff) / quad;
        if (obj <= best) {
          best = obj;
          j = t;
        }
      }
    }
    gap = gmax + gmax2;
    if (i == m || j == m || gap < tol) break;
    if (iter >= max_iterations) break;

    const double old_i = alpha[i], old_j = alpha[j];
    double quad = kern(i, i) + kern(j, j) - 2.0 * kern(i, j);
    if (quad <= 0.0) quad = kTau;
    if (pr.y[i] != pr.y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = (alpha[i] - old_i) * pr.y[i];
    const double dj = (alpha[j] - old_j) * pr.y[j];
    for (std::size_t t = 0; t < m; ++t) {
      grad[t] += pr.y[t] * (di * kern(t, i) + dj * kern(t, j));
    }
  }
  sol.iterations = iter;
  sol.kkt_gap = std::max(gap, 0.0);
  sol.converged = gap < tol;

  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < m; ++t) {
    const double yg = pr.y[t] * grad[t];
    if (alpha[t] >= c) {
      if (pr.y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (pr.y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  sol.rho = n_free > 0 ? free_sum / static_cast<double>(n_free) : (ub + lb) / 2.0;

  double obj = 0.0;
  for (std::size_t t = 0; t < m; ++t) obj += alpha[t] * (grad[t] + pr.p[t]);
  sol.objective = obj / 2.0;
  return sol;
}

std::array<double, 2> PlattScaling::probabilities(double decision) const {
  const double z = a * decision + b;
  return {sigmoid(z), sigmoid(-z)};
}

PlattScaling fit_platt(std::span<const double> dec, std::span<const double> labels01) {
  const std::size_t n = dec.size();
  double prior1 = 0.0;
  for (double v : labels01) prior1 += v > 0.5 ? 1.0 : 0.0;
  const double prior0 = static_cast<double>(n) - prior1;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = labels01[i] > 0.5 ? hi : lo;

  const auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = dec[i] * a + b;
      f += z >= 0.0 ? target[i] * z + std::log1p(std::exp(-z))
                    : (target[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };

  PlattScaling s;
  s.b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(s.a, s.b);
  constexpr double kSigma = 1e-12, kEps = 1e-5, kMinStep = 1e-10;
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = dec[i] * s.a + s.b;
      // p = P(y=1) = 1 / (1 + exp(z)), q = 1 - p.
      const double p = sigmoid(-z);
      const double q = sigmoid(z);
      const double d2 = p * q;
      h11 += dec[i] * dec[i] * d2;
      h22 += d2;
      h21 += dec[i] * d2;
      const double d1 = target[i] - p;
      g1 += dec[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= kMinStep) {
      const double na = s.a + step * da, nb = s.b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        s.a = na;
        s.b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return s;
}

double KernelMachine::decision(std::span<const double> x) const {
  double f = 0.0;
  for (std::size_t i = 0; i < support.rows(); ++i) f += coef[i] * rbf_kernel(support.row(i), x, gamma);
  return f - rho;
}

nlohmann::json KernelMachine::to_json() const {
  std::vector<double> sv(support.data().begin(), support.data().end());
  return {{"regression", regression},
          {"gamma", gamma},
          {"support_rows", support.rows()},
          {"support_cols", support.cols()},
          {"support", sv},
          {"coef", coef},
          {"rho", rho},
          {"platt_a", platt.a},
          {"platt_b", platt.b},
          {"objective", diagnostics.objective},
          {"kkt_gap", diagnostics.kkt_gap},
          {"iterations", diagnostics.iterations},
          {"converged", diagnostics.converged}};
}

KernelMachine KernelMachine::from_json(const nlohmann::json& j) {
  KernelMachine m;
  m.regression = j.at("regression").get<bool>();
  m.gamma = j.at("gamma").get<double>();
  const auto rows = j.at("support_rows").get<std::size_t>();
  const auto cols = j.at("support_cols").get<std::size_t>();
  const auto sv = j.at("support").get<std::vector<double>>();
  if (sv.size() != rows * cols) throw InputError("kernel machine: support size mismatch");
  m.support = Matrix(rows, cols);
  std::copy(sv.begin(), sv.end(), m.support.data().begin());
  m.coef = j.at("coef").get<std::vector<double>>();
  if (m.coef.size() != rows) throw InputError("kernel machine: coefficient count mismatch");
  m.rho = j.at("rho").get<double>();
  m.platt.a = j.at("platt_a").get<double>();
  m.platt.b = j.at("platt_b").get<double>();
  m.diagnostics.objective = j.at("objective").get<double>();
  m.diagnostics.kkt_gap = j.at("kkt_gap").get<double>();
  m.diagnostics.iterations = j.at("iterations").get<long>();
  m.diagnostics.converged = j.at("converged").get<bool>();
  return m;
}

double auto_gamma(const Matrix& x) {
  const auto d = x.data();
  if (d.empty() || x.cols() == 0) return 1.0;
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(d.size());
  double var = 0.0;
  for (double v : d) var += (v - mean) * (v - mean);
  var /= static_cast<double>(d.size());
  const double dims = static_cast<double>(x.cols());
  return var > 0.0 ? 1.0 / (dims * var) : 1.0 / dims;
}

namespace {

void check_params(const Matrix& x, std::size_t n_targets, const SvmParams& params) {
  if (x.rows() < 2) throw InputError("svm: at least two training samples are required");
  if (n_targets != x.rows()) throw InputError("svm: target count does not match rows");
  if (!(params.c > 0.0)) throw InputError("svm: C must be > 0");
  if (!(params.tol > 0.0)) throw InputError("svm: tolerance must be > 0");
}

KernelMachine assemble(const Matrix& x, const std::vector<double>& coef, DualSolution sol,
                       double gamma, bool regression) {
  KernelMachine m;
  m.regression = regression;
  m.gamma = gamma;
  std::size_t count = 0;
  for (double v : coef) count += v != 0.0 ? 1 : 0;
  m.support = Matrix(count, x.cols());
  std::size_t r = 0;
  for (std::size_t i = 0; i < coef.size(); ++i) {
    if (coef[i] == 0.0) continue;
    std::copy(x.row(i).begin(), x.row(i).end(), m.support.row(r).begin());
    m.coef.push_back(coef[i]);
    ++r;
  }
  m.rho = sol.rho;
  sol.alpha.clear();
  m.diagnostics = std::move(sol);
  return m;
}

}  // namespace

KernelMachine fit_svc(const Matrix& x, std::span<const double> labels01, const SvmParams& params) {
  check_params(x, labels01.size(), params);
  const std::size_t n = x.rows();
  // Solve in the orientation where the first sample is positive and mirror
  // the result otherwise, so that relabeling flips every output exactly.
  const bool flip = labels01[0] < 0.5;
  bool pos = false, neg = false;
  DualProblem pr;
  pr.c = params.c;
  pr.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool one = (labels01[i] > 0.5) != flip;
    pr.y[i] = one ? 1.0 : -1.0;
    (one ? pos : neg) = true;
  }
  if (!pos || !neg) throw InputError("svm: both classes are required");
  const double gamma = params.gamma > 0.0 ? params.gamma : auto_gamma(x);
  const Matrix gram = rbf_gram(x, gamma);
  pr.gram = &gram;
  pr.base.resize(n);
  for (std::size_t i = 0; i < n; ++i) pr.base[i] = i;
  pr.p.assign(n, -1.0);
  DualSolution sol = solve_dual(pr, params.tol, params.max_iterations);

  std::vector<double> coef(n);
  for (std::size_t i = 0; i < n; ++i) coef[i] = pr.y[i] * sol.alpha[i];
  std::vector<double> dec(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double f = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      if (coef[t] != 0.0) f += coef[t] * gram(t, i);
    }
    dec[i] = f - sol.rho;
  }
  std::vector<double> canon(n);
  for (std::size_t i = 0; i < n; ++i) canon[i] = pr.y[i] > 0 ? 1.0 : 0.0;
  const PlattScaling platt = fit_platt(dec, canon);

  KernelMachine m = assemble(x, coef, std::move(sol), gamma, false);
  m.platt = platt;
  if (flip) {
    for (double& v : m.coef) v = -v;
    m.rho = -m.rho;
    m.platt.b = -m.platt.b;
  }
  return m;
}

KernelMachine fit_svr(const Matrix& x, std::span<const double> y, const SvmParams& params) {
  check_params(x, y.size(), params);
  if (params.epsilon < 0.0) throw InputError("svm: epsilon must be >= 0");
  const std::size_t n = x.rows();
  const double gamma = params.gamma > 0.0 ? params.gamma : auto_gamma(x);
  const Matrix gram = rbf_gram(x, gamma);
  DualProblem pr;
  pr.gram = &gram;
  pr.c = params.c;
  pr.base.resize(2 * n);
  pr.y.resize(2 * n);
  pr.p.resize(2 * n);
  for (std::size_t t = 0; t < 2 * n; ++t) {
    const std::size_t i = t % n;
    pr.base[t] = i;
    pr.y[t] = t < n ? 1.0 : -1.0;
    pr.p[t] = t < n ? params.epsilon - y[i] : params.epsilon + y[i];
  }
  DualSolution sol = solve_dual(pr, params.tol, params.max_iterations);
  std::vector<double> coef(n);
  for (std::size_t i = 0; i < n; ++i) coef[i] = sol.alpha[i] - sol.alpha[i + n];
  return assemble(x, coef, std::move(sol), gamma, true);
}

}  // namespace pcomp::models
