// Copyright 2026 The hidpoly Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hidpoly/reduction.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace hidpoly {

std::uint64_t kappa(unsigned n, unsigned m) {
  if (n == 0 || m == 0) throw std::invalid_argument("kappa needs n >= 1 and m >= 1");
  std::uint64_t k = 1;
  for (unsigned i = 1; i < m; ++i) {
    if (k > (std::numeric_limits<std::uint64_t>::max() - 1) / n) throw std::overflow_error("kappa overflows 64 bits");
    k = 1 + n * k;
  }
  return k;
}

FeltVec slice_points(const FieldCtx& ctx, unsigned n) {
  if (ctx.d() <= n) {
    throw std::invalid_argument("the reduction needs d > n (d = " + std::to_string(ctx.d()) + ", n = " +
                                std::to_string(n) + ")");
  }
  FeltVec t(n);
  for (unsigned j = 0; j < n; ++j) t[j] = ctx.element(j + 1);
  return t;
}

OracleView::OracleView(Oracle& parent, FeltVec assignment, std::vector<unsigned> free_vars)
    : parent_(&parent), assignment_(std::move(assignment)), free_(std::move(free_vars)) {
  if (assignment_.size() != parent.arity()) throw std::invalid_argument("assignment does not match the oracle arity");
  if (free_.empty()) throw std::invalid_argument("a view needs at least one free variable");
  for (std::size_t i = 0; i < free_.size(); ++i) {
    if (free_[i] >= assignment_.size() || (i > 0 && free_[i] <= free_[i - 1])) {
      throw std::invalid_argument("free variables must be increasing and in range");
    }
  }
  for (Felt a : assignment_) parent.field().check(a);
}

Felt OracleView::query(std::span<const Felt> r, Felt s) {
  if (r.size() != free_.size()) throw std::invalid_argument("view query has the wrong arity");
  FeltVec full = assignment_;
  for (std::size_t i = 0; i < free_.size(); ++i) full[free_[i]] = r[i];
  return parent_->query(full, s);
}

MultiPoly OracleView::reveal_polynomial() const {
  MultiPoly q = parent_->reveal_polynomial();
  const FieldCtx& ctx = parent_->field();
  for (unsigned var = static_cast<unsigned>(assignment_.size()); var-- > 0;) {
    if (std::find(free_.begin(), free_.end(), var) != free_.end()) continue;
    q = substitute(ctx, q, var, assignment_[var]);
  }
  return q;
}

OracleView OracleView::fix(unsigned var, Felt t) const {
  if (var >= free_.size()) throw std::invalid_argument("view variable out of range");
  FeltVec a = assignment_;
  a[free_[var]] = t;
  std::vector<unsigned> f = free_;
  f.erase(f.begin() + var);
  return OracleView(*parent_, std::move(a), std::move(f));
}

OracleView OracleView::last_only() const {
  FeltVec a = assignment_;
  for (std::size_t i = 0; i + 1 < free_.size(); ++i) a[free_[i]] = Felt{0};
  return OracleView(*parent_, std::move(a), {free_.back()});
}

OracleView full_view(Oracle& parent) {
  std::vector<unsigned> free(parent.arity());
  for (unsigned i = 0; i < parent.arity(); ++i) free[i] = i;
  return OracleView(parent, FeltVec(parent.arity(), Felt{0}), std::move(free));
}

OracleView univariate_oracle_view(Oracle& parent, const std::vector<std::optional<Felt>>& fixed) {
  if (fixed.size() != parent.arity()) throw std::invalid_argument("assignment does not match the oracle arity");
  FeltVec a(fixed.size(), Felt{0});
  std::vector<unsigned> free;
  for (unsigned i = 0; i < fixed.size(); ++i) {
    if (fixed[i]) {
      a[i] = *fixed[i];
    } else {
      free.push_back(i);
    }
  }
  if (free.size() != 1) throw std::invalid_argument("a univariate view leaves exactly one variable free");
  return OracleView(parent, std::move(a), std::move(free));
}

UniSolver reveal_solver() {
  return [](Oracle& view) -> std::optional<UniPoly> { return to_uni(view.reveal_polynomial()).without_constant(); };
}

std::uint64_t PlanNode::leaf_count() const {
  if (children.empty()) return 1;
  std::uint64_t c = 0;
  for (const PlanNode& ch : children) c += ch.leaf_count();
  return c;
}

namespace {

PlanNode plan_node(std::vector<unsigned> free, std::vector<std::pair<unsigned, Felt>> fixed, const FeltVec& points) {
  PlanNode node;
  node.free_vars = free;
  node.fixed = fixed;
  if (free.size() == 1) return node;
  PlanNode origin;
  origin.free_vars = {free.back()};
  origin.fixed = fixed;
  for (std::size_t i = 0; i + 1 < free.size(); ++i) origin.fixed.emplace_back(free[i], Felt{0});
  std::sort(origin.fixed.begin(), origin.fixed.end());
  node.children.push_back(std::move(origin));
  std::vector<unsigned> rest(free.begin(), free.end() - 1);
  for (Felt t : points) {
    auto f = fixed;
    f.emplace_back(free.back(), t);
    std::sort(f.begin(), f.end());
    node.children.push_back(plan_node(rest, std::move(f), points));
  }
  return node;
}

nlohmann::json node_json(const PlanNode& node) {
  nlohmann::json j;
  nlohmann::json free = nlohmann::json::array();
  for (unsigned v : node.free_vars) free.push_back("X" + std::to_string(v));
  j["free"] = free;
  nlohmann::json fixed = nlohmann::json::object();
  for (const auto& [v, t] : node.fixed) fixed["X" + std::to_string(v)] = t.value;
  j["fixed"] = fixed;
  if (node.children.empty()) {
    j["step"] = "univariate_solve";
  } else {
    j["step"] = "split";
    j["leaves"] = node.leaf_count();
    nlohmann::json ch = nlohmann::json::array();
    for (const PlanNode& c : node.children) ch.push_back(node_json(c));
    j["children"] = ch;
  }
  return j;
}

}  // namespace

ReductionPlan make_plan(const FieldCtx& ctx, unsigned m, unsigned n) {
  ReductionPlan plan;
  plan.m = m;
  plan.n = n;
  plan.slice_points = slice_points(ctx, n);
  plan.kappa = kappa(n, m);
  std::vector<unsigned> free(m);
  for (unsigned i = 0; i < m; ++i) free[i] = i + 1;
  plan.root = plan_node(free, {}, plan.slice_points);
  return plan;
}

nlohmann::json to_json(const ReductionPlan& plan) {
  nlohmann::json pts = nlohmann::json::array();
  for (Felt t : plan.slice_points) pts.push_back(t.value);
  return nlohmann::json{{"m", plan.m}, {"n", plan.n}, {"kappa", plan.kappa}, {"slice_points", pts},
                        {"plan", node_json(plan.root)}};
}

std::optional<MultiPoly> reduce_once(OracleView view, unsigned n, const FeltVec& points, const UniSolver& solver,
                                     ReductionResult& stats) {
  const FieldCtx& ctx = view.field();
  const unsigned k = view.arity();
  auto call = [&](OracleView& v) -> std::optional<UniPoly> {
    ++stats.solver_calls;
    ++stats.solves_per_round.back();
    std::optional<UniPoly> r = solver(v);
    if (!r || r->degree() > static_cast<int>(n)) {
      ++stats.solver_failures;
      return std::nullopt;
    }
    return r->without_constant();
  };
  if (k == 1) {
    std::optional<UniPoly> r = call(view);
    if (!r) return std::nullopt;
    return to_multi(*r);
  }

  // Step 1: X_1 = ... = X_{k-1} = 0 leaves Q_0(X_k).
  OracleView origin = view.last_only();
  const std::optional<UniPoly> q0 = call(origin);

  // Step 2: the (k-1)-variate slices at X_k = t_j. Every slice is solved so
  // that a round always costs kappa calls.
  std::vector<std::optional<MultiPoly>> slices;
  for (Felt t : points) slices.push_back(reduce_once(view.fix(k - 1, t), n, points, solver, stats));
  if (!q0) return std::nullopt;
  for (const auto& s : slices) {
    if (!s) return std::nullopt;
  }

  MultiPoly out(k);
  for (std::size_t i = 0; i < q0->coeffs().size(); ++i) {
    Exponents alpha(k, 0);
    alpha[k - 1] = static_cast<unsigned>(i);
    out.set(alpha, q0->coeffs()[i]);
  }
  // Values Q_alpha(t_j) for every non-constant alpha seen in any slice.
  std::map<Exponents, FeltVec, GrlexLess> values;
  for (std::size_t j = 0; j < slices.size(); ++j) {
    for (const auto& [alpha, c] : slices[j]->terms()) {
      auto [it, inserted] = values.try_emplace(alpha, FeltVec(points.size(), Felt{0}));
      it->second[j] = c;
    }
  }
  for (const auto& [alpha, vals] : values) {
    const unsigned a = total_degree(alpha);
    if (a == 0 || a > n) return std::nullopt;
    std::vector<std::pair<Felt, Felt>> pts;
    for (std::size_t j = 0; j < points.size(); ++j) pts.emplace_back(points[j], vals[j]);
    const UniPoly qa = lagrange_interpolate(ctx, pts, static_cast<unsigned>(points.size()) - 1);
    if (qa.degree() > static_cast<int>(n - a)) return std::nullopt;
    for (std::size_t i = 0; i < qa.coeffs().size(); ++i) {
      Exponents beta = alpha;
      beta.push_back(static_cast<unsigned>(i));
      out.set(beta, qa.coeffs()[i]);
    }
  }
  return out;
}

ReductionResult solve_multivariate(Oracle& oracle, unsigned n, const UniSolver& solver, const ReductionOptions& opts,
                                   Rng& rng) {
  if (opts.rounds == 0) throw std::invalid_argument("amplification needs at least one round");
  const FieldCtx& ctx = oracle.field();
  const FeltVec points = slice_points(ctx, n);
  const unsigned trials = opts.verify_trials == 0 ? default_verify_trials(n) : opts.verify_trials;
  const std::uint64_t start = oracle.query_count();
  ReductionResult res;
  for (unsigned round = 0; round < opts.rounds; ++round) {
    ++res.rounds_used;
    res.solves_per_round.push_back(0);
    std::optional<MultiPoly> cand = reduce_once(full_view(oracle), n, points, solver, res);
    if (cand && cand->total_degree() <= n && verify_candidate(oracle, *cand, trials, rng)) {
      res.poly = std::move(cand);
      break;
    }
  }
  res.queries = oracle.query_count() - start;
  return res;
}

}  // namespace hidpoly
