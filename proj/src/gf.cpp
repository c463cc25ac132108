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

#include "hidpoly/gf.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hidpoly/errors.hpp"

namespace hidpoly {
namespace {

using Coeffs = std::vector<std::uint32_t>;

void trim(Coeffs& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo the monic polynomial m over GF(p).
Coeffs poly_mod(Coeffs a, const Coeffs& m, std::uint32_t p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  while (a.size() > dm) {
    const std::uint64_t c = a.back();
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) {
      const std::uint64_t sub = (c * m[i]) % p;
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - sub) % p);
    }
    trim(a);
  }
  return a;
}

// Monic polynomial of degree `deg` whose lower coefficients are the base-p digits of k.
Coeffs monic_from_index(std::uint64_t k, unsigned deg, std::uint32_t p) {
  Coeffs m(deg + 1, 0);
  for (unsigned i = 0; i < deg; ++i) {
    m[i] = static_cast<std::uint32_t>(k % p);
    k /= p;
  }
  m[deg] = 1;
  return m;
}

bool is_irreducible(const Coeffs& f, std::uint32_t p) {
  const unsigned deg = static_cast<unsigned>(f.size() - 1);
  if (deg <= 1) return true;
  for (unsigned k = 1; k <= deg / 2; ++k) {
    std::uint64_t count = 1;
    for (unsigned i = 0; i < k; ++i) count *= p;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      if (poly_mod(f, monic_from_index(idx, k, p), p).empty()) return false;
    }
  }
  return true;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q = 2; q * q <= n; ++q) {
    if (n % q == 0) return false;
  }
  return true;
}

FieldCtx make_field(std::uint32_t p, unsigned e) {
  if (!is_prime(p)) throw std::invalid_argument("field characteristic " + std::to_string(p) + " is not prime");
  if (e == 0) throw std::invalid_argument("extension degree must be at least 1");
  std::uint64_t d = 1;
  for (unsigned i = 0; i < e; ++i) {
    d *= p;
    if (d > kMaxFieldSize) {
      throw std::invalid_argument("field size " + std::to_string(p) + "^" + std::to_string(e) + " exceeds 2^20");
    }
  }

  FieldCtx ctx;
  ctx.p_ = p;
  ctx.e_ = e;
  ctx.d_ = static_cast<std::uint32_t>(d);
  ctx.pow_p_.resize(e + 1);
  ctx.pow_p_[0] = 1;
  for (unsigned i = 1; i <= e; ++i) ctx.pow_p_[i] = ctx.pow_p_[i - 1] * p;

  if (e == 1) {
    ctx.modulus_ = {0, 1};
  } else {
    bool found = false;
    for (std::uint64_t k = 0; k < d && !found; ++k) {
      Coeffs cand = monic_from_index(k, e, p);
      if (cand[0] != 0 && is_irreducible(cand, p)) {
        ctx.modulus_ = std::move(cand);
        found = true;
      }
    }
    if (!found) throw InvariantViolation("no irreducible polynomial of degree " + std::to_string(e) + " found");
  }

  ctx.roots_.resize(p);
  for (std::uint32_t t = 0; t < p; ++t) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(p);
    ctx.roots_[t] = CharValue(std::cos(angle), std::sin(angle));
  }
  ctx.roots_[0] = CharValue(1.0, 0.0);

  if (e > 1 && d <= 256) {
    ctx.mul_table_.resize(d * d);
    for (std::uint32_t a = 0; a < d; ++a) {
      for (std::uint32_t b = 0; b < d; ++b) ctx.mul_table_[a * d + b] = ctx.mul_slow(Felt{a}, Felt{b}).value;
    }
  }

  // Trace is GF(p)-linear, so the traces of the basis t^i determine it.
  ctx.basis_trace_.resize(e);
  for (unsigned i = 0; i < e; ++i) {
    Felt x{ctx.pow_p_[i]};
    Felt acc = x;
    for (unsigned j = 1; j < e; ++j) {
      x = ctx.pow(x, p);
      acc = ctx.add(acc, x);
    }
    if (acc.value >= p) throw InvariantViolation("trace left the prime subfield");
    ctx.basis_trace_[i] = acc.value;
  }

  if (p == 2) {
    for (std::uint32_t v = 1; v < d; ++v) {
      if (ctx.trace_value(Felt{v}) == 1) {
        ctx.trace_one_ = Felt{v};
        break;
      }
    }
  } else {
    std::uint32_t odd = ctx.d_ - 1;
    while (odd % 2 == 0) {
      odd /= 2;
      ++ctx.two_adicity_;
    }
    for (std::uint32_t v = 2; v < d; ++v) {
      const Felt z{v};
      if (ctx.pow(z, (d - 1) / 2) != ctx.one()) {
        ctx.non_residue_ = z;
        break;
      }
    }
  }
  return ctx;
}

FieldCtx parse_field(std::string_view descriptor) {
  auto parse_uint = [&](std::string_view s) -> std::uint64_t {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
      throw std::invalid_argument("malformed field descriptor '" + std::string(descriptor) + "' (expected p^e)");
    }
    return v;
  };
  const auto caret = descriptor.find('^');
  const std::uint64_t p = parse_uint(descriptor.substr(0, caret));
  const std::uint64_t e = caret == std::string_view::npos ? 1 : parse_uint(descriptor.substr(caret + 1));
  if (p > kMaxFieldSize || e > 64) throw std::invalid_argument("field descriptor out of range: " + std::string(descriptor));
  return make_field(static_cast<std::uint32_t>(p), static_cast<unsigned>(e));
}

FieldCtx field_of_size(std::uint64_t q) {
  if (q < 2 || q > kMaxFieldSize) throw std::invalid_argument("field size " + std::to_string(q) + " out of range");
  std::uint64_t p = 2;
  while (q % p != 0) ++p;
  unsigned e = 0;
  std::uint64_t rest = q;
  while (rest % p == 0) {
    rest /= p;
    ++e;
  }
  if (rest != 1) throw std::invalid_argument(std::to_string(q) + " is not a prime power");
  return make_field(static_cast<std::uint32_t>(p), e);
}

std::string FieldCtx::descriptor() const { return std::to_string(p_) + "^" + std::to_string(e_); }

std::string FieldCtx::modulus_string() const {
  std::ostringstream os;
  bool first = true;
  for (int i = static_cast<int>(modulus_.size()) - 1; i >= 0; --i) {
    const std::uint32_t c = modulus_[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    if (!first) os << '+';
    first = false;
    if (c != 1 || i == 0) os << c;
    if (i >= 1) os << (c != 1 ? "*t" : "t");
    if (i >= 2) os << '^' << i;
  }
  return os.str();
}

void FieldCtx::check(Felt a) const {
  if (!contains(a)) {
    throw std::invalid_argument("element " + std::to_string(a.value) + " is not in GF(" + descriptor() + ")");
  }
}

Felt FieldCtx::element(std::uint64_t v) const {
  if (v >= d_) throw std::invalid_argument("element " + std::to_string(v) + " is not in GF(" + descriptor() + ")");
  return Felt{static_cast<std::uint32_t>(v)};
}

Felt FieldCtx::from_int(std::int64_t k) const {
  const std::int64_t r = k % static_cast<std::int64_t>(p_);
  return Felt{static_cast<std::uint32_t>(r < 0 ? r + p_ : r)};
}

std::uint32_t FieldCtx::digit(std::uint32_t v, unsigned i) const { return (v / pow_p_[i]) % p_; }

Felt FieldCtx::add(Felt a, Felt b) const {
  if (e_ == 1) {
    const std::uint32_t s = a.value + b.value;
    return Felt{s >= p_ ? s - p_ : s};
  }
  if (p_ == 2) return Felt{a.value ^ b.value};
  std::uint32_t out = 0;
  for (unsigned i = 0; i < e_; ++i) out += ((digit(a.value, i) + digit(b.value, i)) % p_) * pow_p_[i];
  return Felt{out};
}

Felt FieldCtx::neg(Felt a) const {
  if (e_ == 1) return Felt{a.value == 0 ? 0 : p_ - a.value};
  if (p_ == 2) return a;
  std::uint32_t out = 0;
  for (unsigned i = 0; i < e_; ++i) out += ((p_ - digit(a.value, i)) % p_) * pow_p_[i];
  return Felt{out};
}

Felt FieldCtx::sub(Felt a, Felt b) const { return add(a, neg(b)); }

Felt FieldCtx::mul_slow(Felt a, Felt b) const {
  Coeffs prod(2 * e_ - 1, 0);
  for (unsigned i = 0; i < e_; ++i) {
    const std::uint64_t ai = digit(a.value, i);
    if (ai == 0) continue;
    for (unsigned j = 0; j < e_; ++j) {
      prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + ai * digit(b.value, j)) % p_);
    }
  }
  const Coeffs r = poly_mod(std::move(prod), modulus_, p_);
  std::uint32_t out = 0;
  for (std::size_t i = 0; i < r.size(); ++i) out += r[i] * pow_p_[i];
  return Felt{out};
}

Felt FieldCtx::mul(Felt a, Felt b) const {
  if (e_ == 1) return Felt{static_cast<std::uint32_t>(static_cast<std::uint64_t>(a.value) * b.value % p_)};
  if (!mul_table_.empty()) return Felt{mul_table_[a.value * d_ + b.value]};
  return mul_slow(a, b);
}

Felt FieldCtx::pow(Felt a, std::uint64_t k) const {
  Felt result = one();
  while (k > 0) {
    if (k & 1) result = mul(result, a);
    a = mul(a, a);
    k >>= 1;
  }
  return result;
}

Felt FieldCtx::inv(Felt a) const {
  if (a.value == 0) throw std::invalid_argument("division by zero in GF(" + descriptor() + ")");
  return pow(a, d_ - 2);
}

std::uint32_t FieldCtx::trace_value(Felt a) const {
  check(a);
  if (e_ == 1) return a.value;
  std::uint64_t acc = 0;
  for (unsigned i = 0; i < e_; ++i) acc += static_cast<std::uint64_t>(digit(a.value, i)) * basis_trace_[i];
  return static_cast<std::uint32_t>(acc % p_);
}

CharValue FieldCtx::chi(Felt a) const { return roots_[trace_value(a)]; }

bool FieldCtx::is_square(Felt a) const {
  check(a);
  if (p_ == 2 || a.value == 0) return true;
  return pow(a, (d_ - 1) / 2) == one();
}

std::optional<Felt> FieldCtx::sqrt(Felt a) const {
  check(a);
  if (a.value == 0) return zero();
  if (p_ == 2) return pow(a, d_ / 2);
  if (!is_square(a)) return std::nullopt;

  // Tonelli-Shanks with d - 1 = 2^s * odd.
  const std::uint64_t odd = (d_ - 1) >> two_adicity_;
  std::uint32_t m = two_adicity_;
  Felt c = pow(non_residue_, odd);
  Felt t = pow(a, odd);
  Felt r = pow(a, (odd + 1) / 2);
  while (t != one()) {
    std::uint32_t i = 0;
    Felt t2 = t;
    while (t2 != one()) {
      t2 = mul(t2, t2);
      ++i;
    }
    if (i >= m) throw InvariantViolation("Tonelli-Shanks failed to converge");
    Felt b = c;
    for (std::uint32_t k = 0; k + i + 1 < m; ++k) b = mul(b, b);
    m = i;
    c = mul(b, b);
    t = mul(t, c);
    r = mul(r, b);
  }
  return r;
}

std::optional<Felt> FieldCtx::solve_artin_schreier(Felt delta) const {
  check(delta);
  if (p_ != 2) throw std::invalid_argument("Artin-Schreier solver requires characteristic 2");
  if (trace_value(delta) != 0) return std::nullopt;
  // z = sum_{i=0}^{e-2} delta^(2^i) * sum_{j=i+1}^{e-1} tau^(2^j), with Tr(tau) = 1.
  std::vector<Felt> tau_pows(e_);
  tau_pows[0] = trace_one_;
  for (unsigned j = 1; j < e_; ++j) tau_pows[j] = mul(tau_pows[j - 1], tau_pows[j - 1]);
  Felt z = zero();
  Felt delta_pow = delta;
  for (unsigned i = 0; i + 1 < e_; ++i) {
    Felt inner = zero();
    for (unsigned j = i + 1; j < e_; ++j) inner = add(inner, tau_pows[j]);
    z = add(z, mul(delta_pow, inner));
    delta_pow = mul(delta_pow, delta_pow);
  }
  if (add(mul(z, z), z) != delta) throw InvariantViolation("Artin-Schreier solution check failed");
  return z;
}

Felt dot(const FieldCtx& ctx, std::span<const Felt> v, std::span<const Felt> w) {
  if (v.size() != w.size()) {
    throw std::invalid_argument("dot: length mismatch (" + std::to_string(v.size()) + " vs " + std::to_string(w.size()) + ")");
  }
  Felt acc = ctx.zero();
  for (std::size_t i = 0; i < v.size(); ++i) {
    ctx.check(v[i]);
    ctx.check(w[i]);
    acc = ctx.add(acc, ctx.mul(v[i], w[i]));
  }
  return acc;
}

std::uint64_t tuple_index(const FieldCtx& ctx, std::span<const Felt> tuple) {
  std::uint64_t idx = 0;
  for (const Felt a : tuple) {
    ctx.check(a);
    idx = idx * ctx.d() + a.value;
  }
  return idx;
}

FeltVec tuple_at(const FieldCtx& ctx, std::uint64_t index, std::size_t len) {
  FeltVec out(len);
  for (std::size_t i = len; i-- > 0;) {
    out[i] = Felt{static_cast<std::uint32_t>(index % ctx.d())};
    index /= ctx.d();
  }
  return out;
}

std::uint64_t checked_power(std::uint64_t d, unsigned k, std::uint64_t limit, std::string_view guard) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (r > limit / d) {
      throw GuardExceeded(std::string(guard) + ": " + std::to_string(d) + "^" + std::to_string(k) + " exceeds budget " +
                          std::to_string(limit));
    }
    r *= d;
  }
  if (r > limit) throw GuardExceeded(std::string(guard) + ": exceeds budget " + std::to_string(limit));
  return r;
}

std::string to_string(std::span<const Felt> tuple, char sep) {
  std::string out;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(tuple[i].value);
  }
  return out;
}

}  // namespace hidpoly
