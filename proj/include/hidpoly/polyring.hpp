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

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hidpoly/gf.hpp"

namespace hidpoly {

/// Univariate polynomial sum_i c_i X^i with trailing zeros trimmed.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(FeltVec coeffs);

  const FeltVec& coeffs() const { return coeffs_; }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  Felt coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Felt{0}; }

  /// Copy with the constant coefficient cleared.
  UniPoly without_constant() const;

  friend bool operator==(const UniPoly&, const UniPoly&) = default;

 private:
  FeltVec coeffs_;
};

Felt eval_uni(const FieldCtx& ctx, const UniPoly& q, Felt r);

/// The unique polynomial of degree <= degree_bound through `points`.
/// Uses the first degree_bound+1 points and rejects any later point that
/// disagrees with them. Abscissae must be pairwise distinct.
UniPoly lagrange_interpolate(const FieldCtx& ctx, std::span<const std::pair<Felt, Felt>> points, unsigned degree_bound);

using Exponents = std::vector<unsigned>;

unsigned total_degree(const Exponents& alpha);

/// Graded lexicographic order: total degree first, then lexicographic.
struct GrlexLess {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

/// Sparse multivariate polynomial in X1..Xm. Zero coefficients are never stored.
class MultiPoly {
 public:
  using Terms = std::map<Exponents, Felt, GrlexLess>;

  explicit MultiPoly(unsigned arity = 1) : arity_(arity) {}

  unsigned arity() const { return arity_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Felt coeff(const Exponents& alpha) const;
  /// Overwrites the coefficient of X^alpha (removing it when c = 0).
  void set(const Exponents& alpha, Felt c);
  /// Adds c * X^alpha. Exponents >= d are reduced using x^d = x on F.
  void add_term(const FieldCtx& ctx, Exponents alpha, Felt c);

  unsigned total_degree() const;
  Felt constant_term() const { return coeff(Exponents(arity_, 0)); }
  MultiPoly without_constant() const;

  friend bool operator==(const MultiPoly&, const MultiPoly&) = default;

 private:
  unsigned arity_;
  Terms terms_;
};

Felt eval_multi(const FieldCtx& ctx, const MultiPoly& q, std::span<const Felt> point);

/// Substitutes X_m = t, returning a polynomial in X1..X_{m-1}. Requires m >= 2.
MultiPoly slice_multi(const FieldCtx& ctx, const MultiPoly& q, Felt t);

/// Substitutes X_{var+1} = t (0-based var) and drops that variable. Requires m >= 2.
MultiPoly substitute(const FieldCtx& ctx, const MultiPoly& q, unsigned var, Felt t);

MultiPoly to_multi(const UniPoly& q);
/// Requires arity 1.
UniPoly to_uni(const MultiPoly& q);

/// "c1*X^1+c2*X^2"; "0" for the zero polynomial. Coefficients are element encodings.
std::string to_string(const UniPoly& q);
/// "c*X1^a1*X2^a2+..." in graded-lex order, zero exponents omitted.
std::string to_string(const MultiPoly& q);

UniPoly parse_uni(const FieldCtx& ctx, std::string_view text);
MultiPoly parse_multi(const FieldCtx& ctx, std::string_view text, unsigned arity);

}  // namespace hidpoly
