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
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "json.hpp"

#include "hidpoly/gf.hpp"

namespace hidpoly {

/// Default cap on the number of points enumerated in one fiber pass.
inline constexpr std::uint64_t kEnumerationBudget = 100'000'000;

/// w = Phi_n(b) x with w_i = sum_j b_j^i x_j, i = 1..n, where n = |x| = |b|.
FeltVec apply_map(const FieldCtx& ctx, std::span<const Felt> x, std::span<const Felt> b);
/// Same map with k = |x| = |b| copies and an explicit output length n.
FeltVec apply_map_rect(const FieldCtx& ctx, unsigned n, std::span<const Felt> x, std::span<const Felt> b);

/// Fiber sizes eta_w^x = |S_w^x| for one x, over every w in F^n, optionally
/// with the solution sets. Tuples are addressed by their lexicographic index
/// (see tuple_index); solution lists are sorted lexicographically.
class EtaTable {
 public:
  const FeltVec& x() const { return x_; }
  unsigned n() const { return n_; }
  unsigned k() const { return static_cast<unsigned>(x_.size()); }
  std::uint32_t d() const { return d_; }
  /// Number of w, d^n.
  std::uint64_t size() const { return counts_.size(); }

  std::uint32_t eta(std::uint64_t w_index) const { return counts_[w_index]; }
  std::uint32_t eta(const FieldCtx& ctx, std::span<const Felt> w) const;
  const std::vector<std::uint32_t>& counts() const { return counts_; }
  /// Sum of all eta (always d^k).
  std::uint64_t total() const;

  bool has_solutions() const { return !offsets_.empty(); }
  /// Indices of the b in S_w^x, ascending. Requires has_solutions().
  std::span<const std::uint32_t> solutions(std::uint64_t w_index) const;
  std::vector<FeltVec> solution_tuples(const FieldCtx& ctx, std::span<const Felt> w) const;

 private:
  friend EtaTable eta_table_rect(const FieldCtx&, unsigned, std::span<const Felt>, bool, std::uint64_t);

  FeltVec x_;
  unsigned n_ = 0;
  std::uint32_t d_ = 0;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> solutions_;
};

/// One pass over all b in F^n. Throws GuardExceeded when d^n > budget.
EtaTable eta_table(const FieldCtx& ctx, std::span<const Felt> x, bool store_solutions,
                   std::uint64_t budget = kEnumerationBudget);
EtaTable eta_table_rect(const FieldCtx& ctx, unsigned n, std::span<const Felt> x, bool store_solutions,
                        std::uint64_t budget = kEnumerationBudget);

/// CSV rows "x,w,eta" (tuples joined by ';') for every w with eta > 0.
std::string eta_csv(const EtaTable& table, const FieldCtx& ctx, bool header);

/// a T^2 + b T + c.
struct Quadratic {
  Felt a, b, c;
};

Felt eval_quadratic(const FieldCtx& ctx, const Quadratic& q, Felt t);

/// Distinct roots in F of a T^2 + b T + c (a != 0), ascending. Odd p uses the
/// discriminant and Tonelli-Shanks; p = 2 reduces to U^2 + U = ac/b^2.
std::vector<Felt> quadratic_roots(const FieldCtx& ctx, const Quadratic& q);

/// The n = 2 elimination polynomials in their reference labeling, in the variables
/// (X1, X2, W1, W2) and specialised to a quadratic in T:
///   P1 = (-X1 X2 - X1^2) T^2 + 2 W2 X1 T + (W1 X2 - W2^2)
///   P2 = (-X1 X2 - X2^2) T^2 + 2 W2 X2 T + (W1 X1 - W2^2)
Quadratic printed_p1(const FieldCtx& ctx, Felt x1, Felt x2, Felt big_w1, Felt big_w2);
Quadratic printed_p2(const FieldCtx& ctx, Felt x1, Felt x2, Felt big_w1, Felt big_w2);

/// P_i(x, f(x, b), b_i) = 0 holds when the W1 slot receives w_2 and
/// the W2 slot receives w_1 (w as in Phi_n(b) x = w). Direct elimination of
/// b_2 from w_1 = b_1 x_1 + b_2 x_2, w_2 = b_1^2 x_1 + b_2^2 x_2 gives
/// (-x1 x2 - x1^2) T^2 + 2 w_1 x_1 T + (w_2 x_2 - w_1^2).
struct PrintedSlots {
  Felt big_w1, big_w2;
};
PrintedSlots printed_slots(std::span<const Felt> w);

/// g(x) = h(x, w) = x1 x2 (x1 + x2)^2.
Felt g_n2(const FieldCtx& ctx, std::span<const Felt> x);

/// Cap on fiber sizes in the n = 2 second analysis: D = d_1 d_2 = 4.
inline constexpr std::uint64_t kSecondAnalysisCap = 4;

/// S_w^x for n = 2 from the roots of P1 (candidates b_1) and P2 (candidates
/// b_2), keeping the combinations with apply_map(x, b) = w. Lexicographic.
/// Requires g(x) != 0.
std::vector<FeltVec> solve_n2_triangular(const FieldCtx& ctx, std::span<const Felt> x, std::span<const Felt> w);

enum class Analysis { First, Second };

std::string to_string(Analysis a);
Analysis parse_analysis(const std::string& s);

/// Cap for the first analysis: the Bezout number n! of the degree 1, 2, ..., n
/// system, which bounds every zero-dimensional fiber.
std::uint64_t first_analysis_cap(unsigned n);

/// x in (F^x)^n and 1 <= eta_w^x <= n!. Requires p > n and a table for this x.
bool classify_first(const FieldCtx& ctx, unsigned n, std::span<const Felt> x, std::span<const Felt> w,
                    const EtaTable& table);
/// x1 x2 (x1 + x2)^2 != 0 and eta_w^x >= 1. Throws InvariantViolation if a
/// pair it accepts has eta > 4.
bool classify_second_n2(const FieldCtx& ctx, std::span<const Felt> x, std::span<const Felt> w, const EtaTable& table);

/// Membership rules for X_good and W_good^x under one analysis.
class GoodSets {
 public:
  /// Throws std::invalid_argument when the analysis does not apply
  /// (first: p <= n; second: n != 2).
  static GoodSets make(const FieldCtx& ctx, unsigned n, Analysis analysis);
  /// First when p > n, otherwise second (n = 2 only).
  static GoodSets make_auto(const FieldCtx& ctx, unsigned n);

  Analysis analysis() const { return analysis_; }
  unsigned n() const { return n_; }
  std::uint64_t cap() const { return cap_; }
  const FieldCtx& field() const { return *ctx_; }

  bool x_good(std::span<const Felt> x) const;
  /// Membership of w (by index) in W_good^x for the table's x; false if x is not good.
  bool w_good(const EtaTable& table, std::uint64_t w_index) const;

 private:
  std::shared_ptr<const FieldCtx> ctx_;
  unsigned n_ = 0;
  Analysis analysis_ = Analysis::First;
  std::uint64_t cap_ = 0;
};

struct GoodSummary {
  Analysis analysis = Analysis::First;
  std::uint64_t cap = 0;
  std::uint64_t x_good_count = 0;
  std::uint64_t w_good_min = 0;  // over x in X_good; 0 when X_good is empty
  double w_good_mean = 0.0;
};

nlohmann::json to_json(const GoodSummary& s);

/// Cardinalities of X_good and W_good^x by enumerating every x (d^(2n) work).
GoodSummary summarize_good_sets(const GoodSets& good, std::uint64_t budget = 1'000'000'000, unsigned jobs = 0);

struct EtaMoments {
  boost::rational<std::int64_t> first;
  boost::rational<std::int64_t> second;
};

/// Exact averages of eta and eta^2 over (x, w) in F^k x F^n (k = n by default).
/// Throws GuardExceeded when d^(2k) > budget.
EtaMoments eta_moments(const FieldCtx& ctx, unsigned n, unsigned k = 0, std::uint64_t budget = 1'000'000'000);

}  // namespace hidpoly
