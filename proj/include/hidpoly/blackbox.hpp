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
#include <memory>
#include <span>

#include "json.hpp"

#include "hidpoly/gf.hpp"
#include "hidpoly/polyring.hpp"
#include "hidpoly/rng.hpp"

namespace hidpoly {

/// Query access to a black box B(r, s) = pi(s - P(r)) over F^m x F.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual const FieldCtx& field() const = 0;
  virtual unsigned arity() const = 0;
  virtual Felt query(std::span<const Felt> r, Felt s) = 0;
  virtual std::uint64_t query_count() const = 0;
  /// Accounts for queries made in superposition by a simulated quantum run.
  virtual void charge_queries(std::uint64_t k) = 0;
  /// The hidden polynomial P. Simulation and audit only; solvers must not call it.
  virtual MultiPoly reveal_polynomial() const = 0;
};

/// A hidden polynomial Q (zero constant term, total degree <= n) together with
/// the secret permutation pi. Single-writer: query() bumps the counter.
class HiddenInstance : public Oracle {
 public:
  /// Q uniform over polynomials of total degree <= n with zero constant term,
  /// pi uniform (Fisher-Yates). Deterministic in `seed`. Requires d > n.
  static HiddenInstance sample(const FieldCtx& ctx, unsigned m, unsigned n, std::uint64_t seed);

  /// Test and audit hook with a chosen Q and pi.
  static HiddenInstance with_fixed(const FieldCtx& ctx, MultiPoly q, FeltVec pi, unsigned n);
  static HiddenInstance with_identity(const FieldCtx& ctx, MultiPoly q, unsigned n);

  const FieldCtx& field() const override { return *ctx_; }
  std::shared_ptr<const FieldCtx> field_ptr() const { return ctx_; }
  unsigned arity() const override { return q_.arity(); }
  unsigned degree_bound() const { return n_; }
  std::uint64_t seed() const { return seed_; }

  /// pi(s - Q(r)).
  Felt query(std::span<const Felt> r, Felt s) override;
  std::uint64_t query_count() const override { return query_count_; }
  void charge_queries(std::uint64_t k) override { query_count_ += k; }
  MultiPoly reveal_polynomial() const override { return q_; }

  /// Ground truth, for simulation and audit only.
  const MultiPoly& reveal() const { return q_; }
  const FeltVec& reveal_permutation() const { return pi_; }

  /// {field, modulus, seed, m, n}; Q and pi only when `reveal` is set.
  nlohmann::json to_json(bool reveal) const;

 private:
  HiddenInstance(std::shared_ptr<const FieldCtx> ctx, MultiPoly q, FeltVec pi, unsigned n, std::uint64_t seed);

  std::shared_ptr<const FieldCtx> ctx_;
  MultiPoly q_;
  FeltVec pi_;
  unsigned n_;
  std::uint64_t seed_;
  std::uint64_t query_count_ = 0;
};

/// Default number of verification points: n + 3.
inline unsigned default_verify_trials(unsigned n) { return n + 3; }

/// Queries B(r_i, cand(r_i)) at `trials` distinct random points (all of F^m if
/// there are fewer) and accepts iff every answer is the same. A candidate that
/// differs from the hidden polynomial only in the constant term is accepted.
/// Requires trials >= 2 and a candidate with zero constant term.
bool verify_candidate(Oracle& oracle, const MultiPoly& cand, unsigned trials, Rng& rng);

}  // namespace hidpoly
