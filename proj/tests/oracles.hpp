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

// Slow, independent reference computations shared by the tests. Nothing here
// calls into the library's arithmetic beyond element encoding.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "hidpoly/gf.hpp"

namespace hidpoly::testing {

/// Schoolbook GF(p)[t] / (modulus) arithmetic on digit vectors.
class NaiveField {
 public:
  explicit NaiveField(const FieldCtx& ctx) : p_(ctx.p()), e_(ctx.e()), mod_(ctx.modulus()) {}

  std::vector<std::uint32_t> digits(Felt a) const {
    std::vector<std::uint32_t> out(e_);
    std::uint32_t v = a.value;
    for (unsigned i = 0; i < e_; ++i) {
      out[i] = v % p_;
      v /= p_;
    }
    return out;
  }

  Felt encode(const std::vector<std::uint32_t>& dg) const {
    std::uint32_t v = 0;
    for (unsigned i = e_; i-- > 0;) v = v * p_ + dg[i];
    return Felt{v};
  }

  Felt add(Felt a, Felt b) const {
    auto x = digits(a), y = digits(b);
    for (unsigned i = 0; i < e_; ++i) x[i] = (x[i] + y[i]) % p_;
    return encode(x);
  }

  Felt mul(Felt a, Felt b) const {
    const auto x = digits(a), y = digits(b);
    std::vector<std::uint64_t> prod(2 * e_, 0);
    for (unsigned i = 0; i < e_; ++i) {
      for (unsigned j = 0; j < e_; ++j) prod[i + j] = (prod[i + j] + std::uint64_t{x[i]} * y[j]) % p_;
    }
    for (unsigned k = 2 * e_ - 1; k >= e_; --k) {
      const std::uint64_t c = prod[k];
      if (c == 0) continue;
      prod[k] = 0;
      for (unsigned i = 0; i < e_; ++i) prod[k - e_ + i] = (prod[k - e_ + i] + (p_ - c) * mod_[i]) % p_;
    }
    std::vector<std::uint32_t> out(e_);
    for (unsigned i = 0; i < e_; ++i) out[i] = static_cast<std::uint32_t>(prod[i]);
    return encode(out);
  }

  Felt pow(Felt a, std::uint64_t k) const {
    Felt r{1};
    for (std::uint64_t i = 0; i < k; ++i) r = mul(r, a);
    return r;
  }

  /// a + a^p + ... by repeated multiplication.
  std::uint32_t trace(Felt a) const {
    Felt acc{0};
    Felt term = a;
    for (unsigned i = 0; i < e_; ++i) {
      acc = add(acc, term);
      term = pow(term, p_);
    }
    return acc.value;  // lies in the prime subfield
  }

  std::complex<double> chi(Felt a) const {
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(trace(a)) / static_cast<double>(p_));
  }

 private:
  std::uint32_t p_;
  unsigned e_;
  std::vector<std::uint32_t> mod_;
};

/// Fiber counts eta_w^x by direct enumeration with naive arithmetic.
inline std::vector<std::uint32_t> naive_counts(const FieldCtx& ctx, const FeltVec& x, unsigned n) {
  const NaiveField f(ctx);
  const std::uint32_t d = ctx.d();
  std::uint64_t size = 1;
  for (unsigned i = 0; i < n; ++i) size *= d;
  const unsigned k = static_cast<unsigned>(x.size());
  std::uint64_t bs = 1;
  for (unsigned i = 0; i < k; ++i) bs *= d;
  std::vector<std::uint32_t> counts(size, 0);
  for (std::uint64_t bi = 0; bi < bs; ++bi) {
    FeltVec b(k);
    std::uint64_t v = bi;
    for (unsigned j = k; j-- > 0;) {
      b[j] = Felt{static_cast<std::uint32_t>(v % d)};
      v /= d;
    }
    std::uint64_t wi = 0;
    for (unsigned i = 1; i <= n; ++i) {
      Felt w{0};
      for (unsigned j = 0; j < k; ++j) w = f.add(w, f.mul(f.pow(b[j], i), x[j]));
      wi = wi * d + w.value;
    }
    ++counts[wi];
  }
  return counts;
}

}  // namespace hidpoly::testing
