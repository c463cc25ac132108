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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hidpoly/blackbox.hpp"
#include "hidpoly/gf.hpp"
#include "hidpoly/polyring.hpp"
#include "hidpoly/rng.hpp"

namespace hidpoly {

/// n^(m-1) + ... + n + 1. Throws std::overflow_error past 2^64.
std::uint64_t kappa(unsigned n, unsigned m);

/// Slice points t_1..t_n: the field elements 1..n. Requires d > n.
FeltVec slice_points(const FieldCtx& ctx, unsigned n);

/// Black-box access to B with some variables fixed: B'(r, s) = B(..., r, ..., s).
/// Queries and charges go to the parent's counter. The hidden polynomial of
/// the view may have a constant term, which the univariate solver treats as
/// part of the offset z.
class OracleView : public Oracle {
 public:
  /// `assignment` has the parent's arity; the entries at `free_vars`
  /// (strictly increasing, 0-based) are placeholders.
  OracleView(Oracle& parent, FeltVec assignment, std::vector<unsigned> free_vars);

  const FieldCtx& field() const override { return parent_->field(); }
  unsigned arity() const override { return static_cast<unsigned>(free_.size()); }
  Felt query(std::span<const Felt> r, Felt s) override;
  std::uint64_t query_count() const override { return parent_->query_count(); }
  void charge_queries(std::uint64_t k) override { parent_->charge_queries(k); }
  MultiPoly reveal_polynomial() const override;

  /// Fixes the view's free variable `var` (0-based in the view) to t.
  OracleView fix(unsigned var, Felt t) const;
  /// Fixes every free variable but the last one to zero.
  OracleView last_only() const;

  const std::vector<unsigned>& free_vars() const { return free_; }
  const FeltVec& assignment() const { return assignment_; }

 private:
  Oracle* parent_;
  FeltVec assignment_;
  std::vector<unsigned> free_;
};

/// The whole oracle as a view (no variable fixed).
OracleView full_view(Oracle& parent);

/// `fixed[i]` holds the value of variable i; exactly one entry is empty.
OracleView univariate_oracle_view(Oracle& parent, const std::vector<std::optional<Felt>>& fixed);

/// Returns the non-constant part of the hidden univariate polynomial of the
/// view, or nothing on failure. Only the returned coefficients of degree 1..n
/// are used.
using UniSolver = std::function<std::optional<UniPoly>(Oracle&)>;

/// Audit solver that reads the view's hidden polynomial.
UniSolver reveal_solver();

struct PlanNode {
  std::vector<unsigned> free_vars;                 // 1-based variable numbers
  std::vector<std::pair<unsigned, Felt>> fixed;  // 1-based variable, value
  std::vector<PlanNode> children;                  // empty for a univariate solve

  std::uint64_t leaf_count() const;
};

struct ReductionPlan {
  unsigned m = 0;
  unsigned n = 0;
  FeltVec slice_points;
  std::uint64_t kappa = 0;
  PlanNode root;
};

ReductionPlan make_plan(const FieldCtx& ctx, unsigned m, unsigned n);
nlohmann::json to_json(const ReductionPlan& plan);

struct ReductionOptions {
  unsigned rounds = 1;         // amplification repetitions
  unsigned verify_trials = 0;  // 0 selects default_verify_trials(n)
};

struct ReductionResult {
  std::optional<MultiPoly> poly;  // set iff a round verified
  unsigned rounds_used = 0;
  std::uint64_t solver_calls = 0;
  std::uint64_t solver_failures = 0;
  std::uint64_t queries = 0;  // including verification
  std::vector<std::uint64_t> solves_per_round;
};

/// Recovers Q (without constant term) from an m-variate oracle of degree <= n.
/// Each round makes exactly kappa(n, m) solver calls and then checks the
/// result with verify_candidate; the first verified round wins.
ReductionResult solve_multivariate(Oracle& oracle, unsigned n, const UniSolver& solver, const ReductionOptions& opts,
                                   Rng& rng);

/// One unverified round; nothing if any solve or interpolation fails.
std::optional<MultiPoly> reduce_once(OracleView view, unsigned n, const FeltVec& points, const UniSolver& solver,
                                     ReductionResult& stats);

}  // namespace hidpoly
