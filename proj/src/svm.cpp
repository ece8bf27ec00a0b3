// Copyright 2026 The Poisonlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <set>

#include "poisonlab/models.hpp"

namespace poisonlab {

namespace {

constexpr double kDualTol = 1e-8;
constexpr double kFeasTol = 1e-9;
constexpr double kSupportTol = 1e-6;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Gaussian elimination with partial pivoting; returns false when singular.
bool solve_linear(std::vector<std::vector<double>> A, std::vector<double> rhs,
                  std::vector<double>* out) {
  size_t n = A.size();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[pivot][col])) pivot = r;
    if (std::fabs(A[pivot][col]) < 1e-12) return false;
    std::swap(A[col], A[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = A[r][col] / A[col][col];
      for (size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  out->assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) (*out)[i] = rhs[i] / A[i][i];
  return true;
}

struct BinaryView {
  std::vector<std::span<const double>> x;
  std::vector<double> s;  // +1 / -1
  int positive_label = 0, negative_label = 0;
};

BinaryView binary_view(const LabeledDataset& d) {
  std::set<int> labels;
  for (const Example& e : d.examples) labels.insert(e.label);
  if (labels.size() != 2) throw ArgumentError("svm: dataset must contain exactly two classes");
  BinaryView v;
  v.negative_label = *labels.begin();
  v.positive_label = *labels.rbegin();
  v.x.reserve(d.size());
  v.s.reserve(d.size());
  for (const Example& e : d.examples) {
    v.x.emplace_back(e.features);
    v.s.push_back(e.label == v.positive_label ? 1.0 : -1.0);
  }
  return v;
}

struct Candidate {
  std::vector<double> w;
  double b = 0.0;
  double margin = -1.0;
};

// Enumerates candidate support sets of size 2..d+1, solves each KKT equality
// system, keeps the feasible maximizer. Exact up to linear-solve arithmetic.
std::optional<Candidate> solve_exact(const BinaryView& v, int dim) {
  size_t n = v.x.size();
  Candidate best;
  std::vector<int> subset;
  auto try_subset = [&](const std::vector<int>& S) {
    size_t m = S.size();
    // Unknowns: alpha_0..alpha_{m-1}, b. Rows: margin equalities + balance.
    std::vector<std::vector<double>> A(m + 1, std::vector<double>(m + 1, 0.0));
    std::vector<double> rhs(m + 1, 0.0);
    for (size_t j = 0; j < m; ++j) {
      for (size_t i = 0; i < m; ++i)
        A[j][i] = v.s[S[i]] * v.s[S[j]] * dot(v.x[S[i]], v.x[S[j]]);
      A[j][m] = v.s[S[j]];
      rhs[j] = 1.0;
    }
    for (size_t i = 0; i < m; ++i) A[m][i] = v.s[S[i]];
    rhs[m] = 0.0;
    std::vector<double> sol;
    if (!solve_linear(A, rhs, &sol)) return;
    for (size_t i = 0; i < m; ++i)
      if (sol[i] < -1e-10) return;  // dual infeasible
    std::vector<double> w(dim, 0.0);
    for (size_t i = 0; i < m; ++i)
      for (int c = 0; c < dim; ++c) w[c] += sol[i] * v.s[S[i]] * v.x[S[i]][c];
    double b = sol[m];
    double wn = norm(w);
    if (wn < 1e-12) return;
    for (size_t i = 0; i < n; ++i)
      if (v.s[i] * (dot(w, v.x[i]) + b) < 1.0 - kFeasTol) return;  // primal infeasible
    double margin = 1.0 / wn;
    if (margin > best.margin) best = Candidate{std::move(w), b, margin};
  };
  // Size must be >= 2 (the balance constraint needs both classes).
  size_t max_size = std::min(n, static_cast<size_t>(dim) + 1);
  std::vector<int> idx;
  auto rec = [&](auto&& self, size_t start, size_t want) -> void {
    if (idx.size() == want) {
      try_subset(idx);
      return;
    }
    for (size_t i = start; i + (want - idx.size()) <= n; ++i) {
      idx.push_back(static_cast<int>(i));
      self(self, i + 1, want);
      idx.pop_back();
    }
  };
  for (size_t size = 2; size <= max_size; ++size) rec(rec, 0, size);
  if (best.margin < 0.0) return std::nullopt;
  return best;
}

// Bisection projection onto {alpha >= 0, s . alpha = 0}.
void project_balanced(std::vector<double>& v, const std::vector<double>& s) {
  double hi = 1.0;
  for (double x : v) hi = std::max(hi, std::fabs(x));
  double lo = -hi;
  auto g = [&](double lambda) {
    double acc = 0.0;
    for (size_t i = 0; i < v.size(); ++i) acc += s[i] * std::max(0.0, v[i] - lambda * s[i]);
    return acc;
  };
  // g is non-increasing; widen until bracketed.
  while (g(lo) < 0.0) lo *= 2.0;
  while (g(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double lambda = 0.5 * (lo + hi);
  for (size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, v[i] - lambda * s[i]);
}

std::optional<Candidate> solve_projected_gradient(const BinaryView& v, int dim) {
  size_t n = v.x.size();
  std::vector<std::vector<double>> Q(n, std::vector<double>(n));
  double trace = 0.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Q[i][j] = v.s[i] * v.s[j] * dot(v.x[i], v.x[j]);
      if (i == j) trace += Q[i][j];
    }
  double eta = 1.0 / std::max(trace, 1e-9);
  std::vector<double> alpha(n, 0.0), grad(n), next(n);
  const int max_iter = 500000;
  for (int it = 0; it < max_iter; ++it) {
    for (size_t i = 0; i < n; ++i) {
      double qa = 0.0;
      for (size_t j = 0; j < n; ++j) qa += Q[i][j] * alpha[j];
      grad[i] = 1.0 - qa;
    }
    next = alpha;
    for (size_t i = 0; i < n; ++i) next[i] += eta * grad[i];
    project_balanced(next, v.s);
    double move = 0.0, total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      move = std::max(move, std::fabs(next[i] - alpha[i]));
      total += next[i];
    }
    alpha = next;
    if (total > 1e8) return std::nullopt;  // dual unbounded: not separable
    if (move < kDualTol * eta) break;
    if (it == max_iter - 1) throw SolverError("svm: projected gradient did not converge");
  }
  std::vector<double> w(dim, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) w[c] += alpha[i] * v.s[i] * v.x[i][c];
  if (norm(w) < 1e-12) return std::nullopt;
  double b_acc = 0.0;
  int b_count = 0;
  double alpha_max = *std::max_element(alpha.begin(), alpha.end());
  for (size_t i = 0; i < n; ++i) {
    if (alpha[i] > 1e-6 * alpha_max) {
      b_acc += v.s[i] - dot(w, v.x[i]);
      ++b_count;
    }
  }
  if (b_count == 0) return std::nullopt;
  Candidate c;
  c.w = std::move(w);
  c.b = b_acc / b_count;
  for (size_t i = 0; i < n; ++i)
    if (v.s[i] * (dot(c.w, v.x[i]) + c.b) < 1.0 - 1e-5) return std::nullopt;
  c.margin = 1.0 / norm(c.w);
  return c;
}

}  // namespace

SvmModel train_svm_hard_margin(const LabeledDataset& dataset) {
  dataset.validate();
  BinaryView v = binary_view(dataset);
  int dim = dataset.feature_dim;
  std::optional<Candidate> cand =
      dim <= 3 ? solve_exact(v, dim) : solve_projected_gradient(v, dim);
  if (!cand) throw SolverError("svm: classes are not linearly separable");
  SvmModel m;
  m.w = cand->w;
  m.b = cand->b;
  m.margin = cand->margin;
  m.positive_label = v.positive_label;
  m.negative_label = v.negative_label;
  for (size_t i = 0; i < v.x.size(); ++i)
    if (v.s[i] * (dot(m.w, v.x[i]) + m.b) <= 1.0 + kSupportTol)
      m.support_indices.push_back(static_cast<int>(i));
  return m;
}

double svm_decision(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.w.size()) throw ArgumentError("svm_decision: dimension mismatch");
  return dot(model.w, x) + model.b;
}

double svm_distance_to_plane(const SvmModel& model, std::span<const double> x) {
  return std::fabs(svm_decision(model, x)) / norm(model.w);
}

std::optional<std::vector<double>> min_norm_separator(
    const std::vector<std::vector<double>>& constraints) {
  if (constraints.empty()) throw ArgumentError("min_norm_separator: no constraints");
  size_t n = constraints.size();
  int dim = static_cast<int>(constraints[0].size());
  auto feasible = [&](const std::vector<double>& w) {
    for (const std::vector<double>& a : constraints)
      if (dot(w, a) < 1.0 - kFeasTol) return false;
    return true;
  };

  if (dim <= 3) {
    std::vector<double> best;
    double best_norm2 = 0.0;
    std::vector<int> idx;
    auto try_subset = [&](const std::vector<int>& S) {
      size_t m = S.size();
      std::vector<std::vector<double>> G(m, std::vector<double>(m));
      for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j) G[i][j] = dot(constraints[S[i]], constraints[S[j]]);
      std::vector<double> coef;
      if (!solve_linear(G, std::vector<double>(m, 1.0), &coef)) return;
      for (double c : coef)
        if (c < -1e-10) return;
      std::vector<double> w(dim, 0.0);
      for (size_t i = 0; i < m; ++i)
        for (int c = 0; c < dim; ++c) w[c] += coef[i] * constraints[S[i]][c];
      if (!feasible(w)) return;
      double n2 = dot(w, w);
      if (best.empty() || n2 < best_norm2) {
        best = std::move(w);
        best_norm2 = n2;
      }
    };
    auto rec = [&](auto&& self, size_t start, size_t want) -> void {
      if (idx.size() == want) {
        try_subset(idx);
        return;
      }
      for (size_t i = start; i + (want - idx.size()) <= n; ++i) {
        idx.push_back(static_cast<int>(i));
        self(self, i + 1, want);
        idx.pop_back();
      }
    };
    size_t max_size = std::min(n, static_cast<size_t>(dim));
    for (size_t size = 1; size <= max_size; ++size) rec(rec, 0, size);
    if (best.empty()) return std::nullopt;
    return best;
  }

  // Projected gradient on the dual of min ||w||^2 s.t. w . a_i >= 1;
  // the only constraint on the dual is alpha >= 0.
  std::vector<std::vector<double>> G(n, std::vector<double>(n));
  double trace = 0.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      G[i][j] = dot(constraints[i], constraints[j]);
      if (i == j) trace += G[i][j];
    }
  double eta = 1.0 / std::max(trace, 1e-9);
  std::vector<double> alpha(n, 0.0);
  for (int it = 0; it < 500000; ++it) {
    double move = 0.0, total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double ga = 0.0;
      for (size_t j = 0; j < n; ++j) ga += G[i][j] * alpha[j];
      double next = std::max(0.0, alpha[i] + eta * (1.0 - ga));
      move = std::max(move, std::fabs(next - alpha[i]));
      alpha[i] = next;
      total += next;
    }
    if (total > 1e8) return std::nullopt;
    if (move < kDualTol * eta) break;
  }
  std::vector<double> w(dim, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) w[c] += alpha[i] * constraints[i][c];
  if (!feasible(w)) return std::nullopt;
  return w;
}

}  // namespace poisonlab
