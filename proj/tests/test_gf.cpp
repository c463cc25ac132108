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

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"

#include "hidpoly/errors.hpp"
#include "hidpoly/rng.hpp"
#include "oracles.hpp"

namespace hidpoly {
namespace {

using testing::NaiveField;

const std::vector<std::pair<std::uint32_t, unsigned>> kFields = {{2, 1}, {3, 1}, {7, 1}, {101, 1}, {2, 2},
                                                                  {2, 3}, {3, 2}, {5, 2}, {2, 4}, {3, 3}};

Felt random_elt(const FieldCtx& ctx, Rng& rng) { return Felt{static_cast<std::uint32_t>(uniform_below(rng, ctx.d()))}; }

TEST(Field, PrimeField) {
  const FieldCtx f = make_field(3, 1);
  EXPECT_EQ(f.d(), 3u);
  EXPECT_EQ(f.p(), 3u);
  EXPECT_EQ(f.e(), 1u);
  EXPECT_EQ(f.descriptor(), "3^1");
}

TEST(Field, GF4Modulus) {
  const FieldCtx f = make_field(2, 2);
  EXPECT_EQ(f.d(), 4u);
  EXPECT_EQ(f.modulus(), (std::vector<std::uint32_t>{1, 1, 1}));
  EXPECT_EQ(f.modulus_string(), "t^2+t+1");
}

TEST(Field, RejectsBadParameters) {
  EXPECT_THROW(make_field(4, 1), std::invalid_argument);
  EXPECT_THROW(make_field(3, 0), std::invalid_argument);
  EXPECT_THROW(make_field(2, 21), std::invalid_argument);
  EXPECT_THROW(parse_field("6^1"), std::invalid_argument);
  EXPECT_THROW(parse_field("7^"), std::invalid_argument);
  EXPECT_THROW(field_of_size(12), std::invalid_argument);
}

TEST(Field, ParseDescriptors) {
  EXPECT_EQ(parse_field("7^1").d(), 7u);
  EXPECT_EQ(parse_field("2^3").d(), 8u);
  EXPECT_EQ(parse_field("11").d(), 11u);
  const FieldCtx f = field_of_size(9);
  EXPECT_EQ(f.p(), 3u);
  EXPECT_EQ(f.e(), 2u);
}

// The modulus is the first monic irreducible when the lower coefficients are
// read as a base-p number (constant term least significant). For e <= 3,
// irreducible means no root in GF(p).
TEST(Field, ModulusIsLexicographicallyLeast) {
  for (auto [p, e] : std::vector<std::pair<std::uint32_t, unsigned>>{{2, 2}, {2, 3}, {3, 2}, {3, 3}, {5, 2}, {7, 3}}) {
    std::uint64_t pe = 1;
    for (unsigned i = 0; i < e; ++i) pe *= p;
    std::vector<std::uint32_t> expected;
    for (std::uint64_t k = 0; k < pe && expected.empty(); ++k) {
      std::vector<std::uint32_t> c(e + 1, 0);
      std::uint64_t v = k;
      for (unsigned i = 0; i < e; ++i) {
        c[i] = static_cast<std::uint32_t>(v % p);
        v /= p;
      }
      c[e] = 1;
      bool root = false;
      for (std::uint32_t r = 0; r < p && !root; ++r) {
        std::uint64_t acc = 0;
        for (unsigned i = e + 1; i-- > 0;) acc = (acc * r + c[i]) % p;
        root = acc == 0;
      }
      if (!root) expected = c;
    }
    EXPECT_EQ(make_field(p, e).modulus(), expected) << p << "^" << e;
  }
}

TEST(Field, ArithmeticMatchesSchoolbook) {
  for (auto [p, e] : kFields) {
    const FieldCtx f = make_field(p, e);
    const NaiveField naive(f);
    Rng rng(p * 31 + e);
    for (int i = 0; i < 1000; ++i) {
      const Felt a = random_elt(f, rng), b = random_elt(f, rng);
      ASSERT_EQ(f.add(a, b), naive.add(a, b));
      ASSERT_EQ(f.mul(a, b), naive.mul(a, b)) << f.descriptor() << " " << a.value << "*" << b.value;
    }
  }
}

TEST(Field, AxiomsOnRandomTriples) {
  for (auto [p, e] : kFields) {
    const FieldCtx f = make_field(p, e);
    Rng rng(p * 17 + e);
    for (int i = 0; i < 1000; ++i) {
      const Felt a = random_elt(f, rng), b = random_elt(f, rng), c = random_elt(f, rng);
      ASSERT_EQ(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
      ASSERT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
      ASSERT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
      ASSERT_EQ(f.add(a, f.neg(a)), f.zero());
      ASSERT_EQ(f.sub(f.add(a, b), b), a);
      if (a.value != 0) {
        ASSERT_EQ(f.mul(a, f.inv(a)), f.one());
        ASSERT_EQ(f.mul(f.div(b, a), a), b);
      }
    }
    EXPECT_THROW(f.inv(f.zero()), std::invalid_argument);
  }
}

TEST(Field, MultiplicativeGroupOrder) {
  for (auto [p, e] : kFields) {
    const FieldCtx f = make_field(p, e);
    for (std::uint32_t v = 1; v < f.d(); ++v) ASSERT_EQ(f.pow(Felt{v}, f.d() - 1), f.one());
  }
}

TEST(Trace, Examples) {
  EXPECT_EQ(make_field(3, 1).trace(Felt{2}), Felt{2});
  const FieldCtx gf4 = make_field(2, 2);
  EXPECT_EQ(gf4.trace(Felt{2}), Felt{1});  // t
  for (auto [p, e] : kFields) EXPECT_EQ(make_field(p, e).trace(Felt{0}), Felt{0});
}

TEST(Trace, MatchesFrobeniusSumAndIsLinear) {
  for (auto [p, e] : kFields) {
    const FieldCtx f = make_field(p, e);
    const NaiveField naive(f);
    std::vector<int> hits(p, 0);
    for (std::uint32_t v = 0; v < f.d(); ++v) {
      ASSERT_EQ(f.trace_value(Felt{v}), naive.trace(Felt{v}));
      ++hits[f.trace_value(Felt{v})];
    }
    for (std::uint32_t t = 0; t < p; ++t) EXPECT_EQ(hits[t], static_cast<int>(f.d() / p));  // surjective, balanced
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
      const Felt a = random_elt(f, rng), b = random_elt(f, rng);
      ASSERT_EQ(f.trace(f.add(a, b)), f.add(f.trace(a), f.trace(b)));
    }
  }
}

TEST(Trace, FixesPrimeSubfield) {
  for (auto [p, e] : kFields) {
    const FieldCtx f = make_field(p, e);
    for (std::uint32_t a = 0; a < p; ++a) EXPECT_EQ(f.trace_value(Felt{a}), (e * a) % p);
  }
}

TEST(Character, Examples) {
  EXPECT_NEAR(std::abs(make_field(5, 1).chi(Felt{0}) - std::complex<double>(1, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(make_field(2, 2).chi(Felt{2}) - std::complex<double>(-1, 0)), 0.0, 1e-15);
  const FieldCtx gf3 = make_field(3, 1);
  std::complex<double> sum = 0;
  for (std::uint32_t a = 0; a < 3; ++a) sum += gf3.chi(Felt{a});
  EXPECT_LT(std::abs(sum), 1e-12);
}

TEST(Character, HomomorphismAndOrthogonality) {
  for (auto [p, e] : kFields) {
    const FieldCtx f = make_field(p, e);
    const NaiveField naive(f);
    for (std::uint32_t a = 0; a < f.d(); ++a) {
      ASSERT_NEAR(std::abs(f.chi(Felt{a})), 1.0, 1e-12);
      ASSERT_LT(std::abs(f.chi(Felt{a}) - naive.chi(Felt{a})), 1e-12);
    }
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
      const Felt a = random_elt(f, rng), b = random_elt(f, rng);
      ASSERT_LT(std::abs(f.chi(a) * f.chi(b) - f.chi(f.add(a, b))), 1e-12);
    }
    if (f.d() > 200) continue;
    for (std::uint32_t m = 0; m < f.d(); ++m) {
      std::complex<double> sum = 0;
      for (std::uint32_t a = 0; a < f.d(); ++a) sum += f.chi(f.mul(Felt{a}, Felt{m}));
      if (m == 0) {
        EXPECT_NEAR(sum.real(), static_cast<double>(f.d()), 1e-9);
      } else {
        EXPECT_LT(std::abs(sum), 1e-9) << f.descriptor() << " m=" << m;
      }
    }
  }
}

TEST(Dot, Examples) {
  const FieldCtx f3 = make_field(3, 1);
  EXPECT_EQ(dot(f3, FeltVec{Felt{1}, Felt{2}}, FeltVec{Felt{2}, Felt{2}}), Felt{0});
  EXPECT_EQ(dot(f3, FeltVec{Felt{1}, Felt{2}}, FeltVec{Felt{0}, Felt{0}}), Felt{0});
  const FieldCtx f7 = make_field(7, 1);
  EXPECT_EQ(dot(f7, FeltVec{Felt{1}}, FeltVec{Felt{5}}), Felt{5});
  EXPECT_THROW(dot(f7, FeltVec{Felt{1}}, FeltVec{Felt{5}, Felt{1}}), std::invalid_argument);
}

TEST(Sqrt, MatchesSquaringTable) {
  for (auto [p, e] : kFields) {
    const FieldCtx f = make_field(p, e);
    std::vector<char> square(f.d(), 0);
    for (std::uint32_t a = 0; a < f.d(); ++a) square[f.mul(Felt{a}, Felt{a}).value] = 1;
    for (std::uint32_t a = 0; a < f.d(); ++a) {
      ASSERT_EQ(f.is_square(Felt{a}), square[a] != 0);
      const auto r = f.sqrt(Felt{a});
      ASSERT_EQ(r.has_value(), square[a] != 0);
      if (r) ASSERT_EQ(f.mul(*r, *r), Felt{a});
    }
  }
}

TEST(ArtinSchreier, SolvableExactlyForTraceZero) {
  for (unsigned e = 1; e <= 6; ++e) {
    const FieldCtx f = make_field(2, e);
    for (std::uint32_t v = 0; v < f.d(); ++v) {
      const Felt delta{v};
      const auto u = f.solve_artin_schreier(delta);
      ASSERT_EQ(u.has_value(), f.trace_value(delta) == 0) << "e=" << e << " delta=" << v;
      if (u) ASSERT_EQ(f.add(f.mul(*u, *u), *u), delta);
    }
  }
  EXPECT_THROW(make_field(3, 1).solve_artin_schreier(Felt{1}), std::invalid_argument);
}

TEST(Tuples, IndexRoundTrip) {
  const FieldCtx f = make_field(5, 1);
  for (std::uint64_t i = 0; i < 125; ++i) ASSERT_EQ(tuple_index(f, tuple_at(f, i, 3)), i);
  EXPECT_EQ(tuple_index(f, FeltVec{Felt{1}, Felt{0}}), 5u);  // first coordinate most significant
  EXPECT_EQ(to_string(FeltVec{Felt{1}, Felt{2}}, ';'), "1;2");
}

TEST(Guards, CheckedPower) {
  EXPECT_EQ(checked_power(7, 4, 10000, "g"), 2401u);
  EXPECT_THROW(checked_power(101, 5, 1'000'000, "g"), GuardExceeded);
  try {
    checked_power(101, 5, 1'000'000, "fiber guard");
  } catch (const GuardExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("fiber guard"), std::string::npos);
  }
}

TEST(Field, RejectsForeignElements) {
  const FieldCtx f = make_field(5, 1);
  EXPECT_THROW(f.check(Felt{5}), std::invalid_argument);
}

}  // namespace
}  // namespace hidpoly
