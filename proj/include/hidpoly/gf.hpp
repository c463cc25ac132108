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

#include <complex>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hidpoly {

/// Element of GF(p^e) in polynomial-basis form: the base-p digits of `value`
/// are the coefficients c_0, c_1, ..., c_{e-1} of c_0 + c_1 t + ... .
/// Elements are ordered by `value`; tuples over F are ordered lexicographically
/// on top of that.
struct Felt {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(Felt, Felt) = default;
};

using FeltVec = std::vector<Felt>;
using CharValue = std::complex<double>;

/// Largest supported field size.
inline constexpr std::uint32_t kMaxFieldSize = 1u << 20;

/// Finite field GF(p^e). Immutable after construction.
class FieldCtx {
 public:
  std::uint32_t p() const { return p_; }
  unsigned e() const { return e_; }
  std::uint32_t d() const { return d_; }

  /// Monic modulus, coefficients low to high (size e+1). {0, 1} for e = 1.
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }
  /// "p^e", the descriptor accepted by parse_field.
  std::string descriptor() const;
  /// Human-readable modulus, e.g. "t^2+t+1".
  std::string modulus_string() const;

  bool contains(Felt a) const { return a.value < d_; }
  /// Throws std::invalid_argument if `a` is not an element of this field.
  void check(Felt a) const;
  Felt element(std::uint64_t v) const;
  /// Image of the integer k under Z -> GF(p).
  Felt from_int(std::int64_t k) const;

  Felt zero() const { return Felt{0}; }
  Felt one() const { return Felt{1}; }

  Felt add(Felt a, Felt b) const;
  Felt sub(Felt a, Felt b) const;
  Felt neg(Felt a) const;
  Felt mul(Felt a, Felt b) const;
  Felt pow(Felt a, std::uint64_t k) const;
  /// Multiplicative inverse a^(d-2). Throws on zero.
  Felt inv(Felt a) const;
  Felt div(Felt a, Felt b) const { return mul(a, inv(b)); }

  /// Tr(a) = a + a^p + ... + a^(p^(e-1)), as an element of the prime subfield.
  Felt trace(Felt a) const { return Felt{trace_value(a)}; }
  /// Tr(a) as an integer in [0, p).
  std::uint32_t trace_value(Felt a) const;
  /// Additive character exp(2 pi i Tr(a) / p).
  CharValue chi(Felt a) const;
  /// exp(2 pi i t / p) for t in [0, p).
  CharValue root_of_unity(std::uint32_t t) const { return roots_[t % p_]; }

  bool is_square(Felt a) const;
  /// A square root of `a` (Tonelli-Shanks for odd p, a^(d/2) for p = 2).
  std::optional<Felt> sqrt(Felt a) const;
  /// Characteristic 2 only: a solution U of U^2 + U = delta (the other one is
  /// U + 1), or nothing when Tr(delta) != 0.
  std::optional<Felt> solve_artin_schreier(Felt delta) const;

 private:
  friend FieldCtx make_field(std::uint32_t p, unsigned e);

  std::uint32_t digit(std::uint32_t v, unsigned i) const;
  Felt mul_slow(Felt a, Felt b) const;

  std::uint32_t p_ = 0;
  unsigned e_ = 0;
  std::uint32_t d_ = 0;
  std::vector<std::uint32_t> modulus_;
  std::vector<std::uint32_t> pow_p_;
  std::vector<std::uint32_t> basis_trace_;
  std::vector<CharValue> roots_;
  std::vector<std::uint32_t> mul_table_;  // only for small extension fields
  Felt non_residue_{0};                   // odd d
  std::uint32_t two_adicity_ = 0;         // d - 1 = 2^s * odd
  Felt trace_one_{0};                     // p = 2: element with Tr = 1
};

bool is_prime(std::uint64_t n);

/// GF(p^e) with the lexicographically least monic irreducible modulus
/// (ordered by the integer encoding of the non-leading coefficients).
/// Throws std::invalid_argument for non-prime p, e = 0 or p^e > kMaxFieldSize.
FieldCtx make_field(std::uint32_t p, unsigned e);

/// Parses "p^e" (or a bare "p").
FieldCtx parse_field(std::string_view descriptor);

/// Field whose size is the prime power q. Throws if q is not one.
FieldCtx field_of_size(std::uint64_t q);

/// <v, w> = v_1 w_1 + ... + v_n w_n.
Felt dot(const FieldCtx& ctx, std::span<const Felt> v, std::span<const Felt> w);

/// Position of `tuple` in the lexicographic enumeration of F^len.
std::uint64_t tuple_index(const FieldCtx& ctx, std::span<const Felt> tuple);
FeltVec tuple_at(const FieldCtx& ctx, std::uint64_t index, std::size_t len);

/// d^k, throwing GuardExceeded if it exceeds `limit`.
std::uint64_t checked_power(std::uint64_t d, unsigned k, std::uint64_t limit, std::string_view guard);

std::string to_string(std::span<const Felt> tuple, char sep = ',');

}  // namespace hidpoly
