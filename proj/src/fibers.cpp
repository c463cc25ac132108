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

#include "hidpoly/fibers.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "hidpoly/errors.hpp"
#include "hidpoly/parallel.hpp"

namespace hidpoly {
namespace {

// terms[(i * k + j) * d + v] = v^(i+1) * x_j.
std::vector<Felt> power_terms(const FieldCtx& ctx, unsigned n, std::span<const Felt> x) {
  const std::size_t k = x.size();
  const std::uint32_t d = ctx.d();
  std::vector<Felt> terms(static_cast<std::size_t>(n) * k * d);
  for (std::uint32_t v = 0; v < d; ++v) {
    Felt power = Felt{v};
    for (unsigned i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) terms[(i * k + j) * d + v] = ctx.mul(power, x[j]);
      power = ctx.mul(power, Felt{v});
    }
  }
  return terms;
}

// Calls visit(w_index) for every b in F^k in lexicographic order.
template <typename Visit>
void enumerate_images(const FieldCtx& ctx, unsigned n, std::span<const Felt> x, Visit&& visit) {
  const std::size_t k = x.size();
  const std::uint32_t d = ctx.d();
  const std::vector<Felt> terms = power_terms(ctx, n, x);
  std::vector<std::uint32_t> b(k, 0);
  while (true) {
    std::uint64_t w_index = 0;
    for (unsigned i = 0; i < n; ++i) {
      Felt wi = ctx.zero();
      const Felt* row = &terms[static_cast<std::size_t>(i) * k * d];
      for (std::size_t j = 0; j < k; ++j) wi = ctx.add(wi, row[j * d + b[j]]);
      w_index = w_index * d + wi.value;
    }
    visit(w_index);
    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (++b[pos] < d) break;
      b[pos] = 0;
      if (pos == 0) return;
    }
    if (k == 0) return;
  }
}

void check_tuple(const FieldCtx& ctx, std::span<const Felt> v, const char* what) {
  for (const Felt a : v) {
    if (!ctx.contains(a)) throw std::invalid_argument(std::string(what) + " has an element outside GF(" + ctx.descriptor() + ")");
  }
}

}  // namespace

FeltVec apply_map_rect(const FieldCtx& ctx, unsigned n, std::span<const Felt> x, std::span<const Felt> b) {
  if (x.size() != b.size()) {
    throw std::invalid_argument("apply_map: |x| = " + std::to_string(x.size()) + " but |b| = " + std::to_string(b.size()));
  }
  check_tuple(ctx, x, "x");
  check_tuple(ctx, b, "b");
  FeltVec w(n, ctx.zero());
  FeltVec powers(b.begin(), b.end());
  for (unsigned i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) w[i] = ctx.add(w[i], ctx.mul(powers[j], x[j]));
    for (std::size_t j = 0; j < b.size(); ++j) powers[j] = ctx.mul(powers[j], b[j]);
  }
  return w;
}

FeltVec apply_map(const FieldCtx& ctx, std::span<const Felt> x, std::span<const Felt> b) {
  return apply_map_rect(ctx, static_cast<unsigned>(x.size()), x, b);
}

std::uint32_t EtaTable::eta(const FieldCtx& ctx, std::span<const Felt> w) const {
  if (w.size() != n_) throw std::invalid_argument("eta: w has the wrong length");
  return counts_[tuple_index(ctx, w)];
}

std::uint64_t EtaTable::total() const {
  std::uint64_t s = 0;
  for (const std::uint32_t c : counts_) s += c;
  return s;
}

std::span<const std::uint32_t> EtaTable::solutions(std::uint64_t w_index) const {
  if (!has_solutions()) throw std::logic_error("eta table was built without solution sets");
  return std::span<const std::uint32_t>(solutions_).subspan(offsets_[w_index], offsets_[w_index + 1] - offsets_[w_index]);
}

std::vector<FeltVec> EtaTable::solution_tuples(const FieldCtx& ctx, std::span<const Felt> w) const {
  std::vector<FeltVec> out;
  for (const std::uint32_t b : solutions(tuple_index(ctx, w))) out.push_back(tuple_at(ctx, b, k()));
  return out;
}

EtaTable eta_table_rect(const FieldCtx& ctx, unsigned n, std::span<const Felt> x, bool store_solutions,
                        std::uint64_t budget) {
  if (n == 0 || x.empty()) throw std::invalid_argument("eta_table: n and |x| must be positive");
  check_tuple(ctx, x, "x");
  const std::uint64_t points = checked_power(ctx.d(), static_cast<unsigned>(x.size()), budget, "fiber enumeration guard (d^k)");
  const std::uint64_t outputs = checked_power(ctx.d(), n, budget, "fiber enumeration guard (d^n)");

  EtaTable t;
  t.x_.assign(x.begin(), x.end());
  t.n_ = n;
  t.d_ = ctx.d();
  t.counts_.assign(outputs, 0);
  if (!store_solutions) {
    enumerate_images(ctx, n, x, [&](std::uint64_t w) { ++t.counts_[w]; });
    return t;
  }
  std::vector<std::uint32_t> image(points);
  std::uint32_t b = 0;
  enumerate_images(ctx, n, x, [&](std::uint64_t w) {
    ++t.counts_[w];
    image[b++] = static_cast<std::uint32_t>(w);
  });
  t.offsets_.assign(outputs + 1, 0);
  for (std::uint64_t w = 0; w < outputs; ++w) t.offsets_[w + 1] = t.offsets_[w] + t.counts_[w];
  std::vector<std::uint32_t> fill(t.offsets_.begin(), t.offsets_.end() - 1);
  t.solutions_.resize(points);
  for (std::uint32_t i = 0; i < points; ++i) t.solutions_[fill[image[i]]++] = i;
  return t;
}

EtaTable eta_table(const FieldCtx& ctx, std::span<const Felt> x, bool store_solutions, std::uint64_t budget) {
  return eta_table_rect(ctx, static_cast<unsigned>(x.size()), x, store_solutions, budget);
}

std::string eta_csv(const EtaTable& table, const FieldCtx& ctx, bool header) {
  std::ostringstream os;
  if (header) os << "x,w,eta\n";
  const std::string x = to_string(table.x(), ';');
  for (std::uint64_t w = 0; w < table.size(); ++w) {
    if (table.eta(w) == 0) continue;
    os << x << ',' << to_string(tuple_at(ctx, w, table.n()), ';') << ',' << table.eta(w) << '\n';
  }
  return os.str();
}

Felt eval_quadratic(const FieldCtx& ctx, const Quadratic& q, Felt t) {
  return ctx.add(ctx.mul(ctx.add(ctx.mul(q.a, t), q.b), t), q.c);
}

std::vector<Felt> quadratic_roots(const FieldCtx& ctx, const Quadratic& q) {
  if (q.a.value == 0) throw std::invalid_argument("quadratic_roots: leading coefficient is zero");
  std::vector<Felt> roots;
  if (ctx.p() != 2) {
    const Felt four_ac = ctx.mul(ctx.from_int(4), ctx.mul(q.a, q.c));
    const Felt disc = ctx.sub(ctx.mul(q.b, q.b), four_ac);
    const auto s = ctx.sqrt(disc);
    if (!s) return roots;
    const Felt inv_2a = ctx.inv(ctx.mul(ctx.from_int(2), q.a));
    roots.push_back(ctx.mul(ctx.sub(*s, q.b), inv_2a));
    roots.push_back(ctx.mul(ctx.sub(ctx.neg(*s), q.b), inv_2a));
  } else if (q.b.value == 0) {
    // T^2 = c / a; squaring is a bijection in characteristic 2.
    roots.push_back(*ctx.sqrt(ctx.div(q.c, q.a)));
  } else {
    // T = (b/a) U turns the equation into U^2 + U = ac / b^2.
    const Felt delta = ctx.div(ctx.mul(q.a, q.c), ctx.mul(q.b, q.b));
    const auto u = ctx.solve_artin_schreier(delta);
    if (!u) return roots;
    const Felt scale = ctx.div(q.b, q.a);
    roots.push_back(ctx.mul(scale, *u));
    roots.push_back(ctx.mul(scale, ctx.add(*u, ctx.one())));
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  for (const Felt r : roots) {
    if (eval_quadratic(ctx, q, r).value != 0) throw InvariantViolation("quadratic root check failed");
  }
  return roots;
}

Quadratic printed_p1(const FieldCtx& ctx, Felt x1, Felt x2, Felt big_w1, Felt big_w2) {
  return Quadratic{ctx.neg(ctx.add(ctx.mul(x1, x2), ctx.mul(x1, x1))),
                   ctx.mul(ctx.from_int(2), ctx.mul(big_w2, x1)),
                   ctx.sub(ctx.mul(big_w1, x2), ctx.mul(big_w2, big_w2))};
}

Quadratic printed_p2(const FieldCtx& ctx, Felt x1, Felt x2, Felt big_w1, Felt big_w2) {
  return Quadratic{ctx.neg(ctx.add(ctx.mul(x1, x2), ctx.mul(x2, x2))),
                   ctx.mul(ctx.from_int(2), ctx.mul(big_w2, x2)),
                   ctx.sub(ctx.mul(big_w1, x1), ctx.mul(big_w2, big_w2))};
}

PrintedSlots printed_slots(std::span<const Felt> w) {
  if (w.size() != 2) throw std::invalid_argument("printed_slots: w must have length 2");
  return PrintedSlots{w[1], w[0]};
}

Felt g_n2(const FieldCtx& ctx, std::span<const Felt> x) {
  if (x.size() != 2) throw std::invalid_argument("g: x must have length 2");
  const Felt s = ctx.add(x[0], x[1]);
  return ctx.mul(ctx.mul(x[0], x[1]), ctx.mul(s, s));
}

std::vector<FeltVec> solve_n2_triangular(const FieldCtx& ctx, std::span<const Felt> x, std::span<const Felt> w) {
  if (x.size() != 2 || w.size() != 2) throw std::invalid_argument("solve_n2_triangular: x and w must have length 2");
  check_tuple(ctx, w, "w");
  if (g_n2(ctx, x).value == 0) {
    throw std::invalid_argument("solve_n2_triangular: x1 x2 (x1 + x2)^2 vanishes at x = (" + to_string(x) + ")");
  }
  const PrintedSlots slots = printed_slots(w);
  const auto b1_roots = quadratic_roots(ctx, printed_p1(ctx, x[0], x[1], slots.big_w1, slots.big_w2));
  const auto b2_roots = quadratic_roots(ctx, printed_p2(ctx, x[0], x[1], slots.big_w1, slots.big_w2));
  std::vector<FeltVec> out;
  for (const Felt b1 : b1_roots) {
    for (const Felt b2 : b2_roots) {
      const FeltVec b{b1, b2};
      if (apply_map(ctx, x, b) == FeltVec(w.begin(), w.end())) out.push_back(b);
    }
  }
  if (out.size() > kSecondAnalysisCap) throw InvariantViolation("triangular solver returned more than D = 4 solutions");
  return out;
}

std::string to_string(Analysis a) { return a == Analysis::First ? "first" : "second"; }

Analysis parse_analysis(const std::string& s) {
  if (s == "first") return Analysis::First;
  if (s == "second") return Analysis::Second;
  throw std::invalid_argument("unknown analysis '" + s + "'");
}

std::uint64_t first_analysis_cap(unsigned n) {
  std::uint64_t f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

namespace {

void require_table_for(const EtaTable& table, std::span<const Felt> x, std::span<const Felt> w) {
  if (table.x() != FeltVec(x.begin(), x.end())) throw std::invalid_argument("eta table was computed for a different x");
  if (w.size() != table.n()) throw std::invalid_argument("w has the wrong length");
}

bool all_nonzero(std::span<const Felt> x) {
  return std::all_of(x.begin(), x.end(), [](Felt a) { return a.value != 0; });
}

}  // namespace

bool classify_first(const FieldCtx& ctx, unsigned n, std::span<const Felt> x, std::span<const Felt> w,
                    const EtaTable& table) {
  if (ctx.p() <= n) {
    throw std::invalid_argument("first analysis needs characteristic p > n (p = " + std::to_string(ctx.p()) +
                                ", n = " + std::to_string(n) + ")");
  }
  if (x.size() != n) throw std::invalid_argument("classify_first: |x| != n");
  require_table_for(table, x, w);
  if (!all_nonzero(x)) return false;
  const std::uint32_t eta = table.eta(ctx, w);
  return eta >= 1 && eta <= first_analysis_cap(n);
}

bool classify_second_n2(const FieldCtx& ctx, std::span<const Felt> x, std::span<const Felt> w, const EtaTable& table) {
  if (x.size() != 2) throw std::invalid_argument("second analysis is implemented for n = 2 only");
  require_table_for(table, x, w);
  if (g_n2(ctx, x).value == 0) return false;
  const std::uint32_t eta = table.eta(ctx, w);
  if (eta > kSecondAnalysisCap) {
    throw InvariantViolation("fiber of size " + std::to_string(eta) + " exceeds D = 4 at x = (" + to_string(x) + ")");
  }
  return eta >= 1;
}

GoodSets GoodSets::make(const FieldCtx& ctx, unsigned n, Analysis analysis) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  GoodSets g;
  g.ctx_ = std::make_shared<const FieldCtx>(ctx);
  g.n_ = n;
  g.analysis_ = analysis;
  if (analysis == Analysis::First) {
    if (ctx.p() <= n) {
      throw std::invalid_argument("first analysis needs characteristic p > n (p = " + std::to_string(ctx.p()) +
                                  ", n = " + std::to_string(n) + ")");
    }
    g.cap_ = first_analysis_cap(n);
  } else {
    if (n != 2) throw std::invalid_argument("second analysis is implemented for n = 2 only");
    g.cap_ = kSecondAnalysisCap;
  }
  return g;
}

GoodSets GoodSets::make_auto(const FieldCtx& ctx, unsigned n) {
  if (ctx.p() > n) return make(ctx, n, Analysis::First);
  if (n == 2) return make(ctx, n, Analysis::Second);
  throw std::invalid_argument("no analysis applies: p = " + std::to_string(ctx.p()) + " <= n = " + std::to_string(n) +
                              " and n != 2");
}

bool GoodSets::x_good(std::span<const Felt> x) const {
  if (x.size() != n_) throw std::invalid_argument("x_good: |x| != n");
  if (analysis_ == Analysis::First) return all_nonzero(x);
  return g_n2(*ctx_, x).value != 0;
}

bool GoodSets::w_good(const EtaTable& table, std::uint64_t w_index) const {
  if (!x_good(table.x())) return false;
  const std::uint32_t eta = table.eta(w_index);
  if (eta == 0) return false;
  if (analysis_ == Analysis::Second && eta > cap_) {
    throw InvariantViolation("fiber of size " + std::to_string(eta) + " exceeds D = 4 at x = (" + to_string(table.x()) + ")");
  }
  return eta <= cap_;
}

nlohmann::json to_json(const GoodSummary& s) {
  return nlohmann::json{{"analysis", to_string(s.analysis)},
                        {"D", s.cap},
                        {"x_good_count", s.x_good_count},
                        {"w_good_min", s.w_good_min},
                        {"w_good_mean", s.w_good_mean}};
}

GoodSummary summarize_good_sets(const GoodSets& good, std::uint64_t budget, unsigned jobs) {
  const FieldCtx& ctx = good.field();
  const unsigned n = good.n();
  const std::uint64_t xs = checked_power(ctx.d(), n, budget, "good-set summary guard (d^n)");
  checked_power(ctx.d(), 2 * n, budget, "good-set summary guard (d^(2n))");
  std::vector<std::uint64_t> w_counts(xs, 0);
  std::vector<char> is_good(xs, 0);
  parallel_for(xs, jobs, [&](std::uint64_t xi) {
    const FeltVec x = tuple_at(ctx, xi, n);
    if (!good.x_good(x)) return;
    is_good[xi] = 1;
    const EtaTable table = eta_table(ctx, x, false, budget);
    std::uint64_t c = 0;
    for (std::uint64_t w = 0; w < table.size(); ++w) c += good.w_good(table, w) ? 1 : 0;
    w_counts[xi] = c;
  });
  GoodSummary s;
  s.analysis = good.analysis();
  s.cap = good.cap();
  std::uint64_t sum = 0;
  for (std::uint64_t xi = 0; xi < xs; ++xi) {
    if (!is_good[xi]) continue;
    s.w_good_min = s.x_good_count == 0 ? w_counts[xi] : std::min(s.w_good_min, w_counts[xi]);
    ++s.x_good_count;
    sum += w_counts[xi];
  }
  s.w_good_mean = s.x_good_count == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(s.x_good_count);
  return s;
}

EtaMoments eta_moments(const FieldCtx& ctx, unsigned n, unsigned k, std::uint64_t budget) {
  if (k == 0) k = n;
  if (n == 0) throw std::invalid_argument("eta_moments: n must be positive");
  const std::uint64_t xs = checked_power(ctx.d(), k, budget, "moment enumeration guard (d^k)");
  const std::uint64_t ws = checked_power(ctx.d(), n, budget, "moment enumeration guard (d^n)");
  checked_power(ctx.d(), 2 * k, budget, "moment enumeration guard (d^(2k))");
  std::vector<std::uint64_t> first(xs, 0), second(xs, 0);
  for (std::uint64_t xi = 0; xi < xs; ++xi) {
    const FeltVec x = tuple_at(ctx, xi, k);
    const EtaTable table = eta_table_rect(ctx, n, x, false, budget);
    for (const std::uint32_t c : table.counts()) {
      first[xi] += c;
      second[xi] += static_cast<std::uint64_t>(c) * c;
    }
  }
  std::int64_t s1 = 0, s2 = 0;
  for (std::uint64_t xi = 0; xi < xs; ++xi) {
    s1 += static_cast<std::int64_t>(first[xi]);
    s2 += static_cast<std::int64_t>(second[xi]);
  }
  const auto pairs = static_cast<std::int64_t>(xs * ws);
  return EtaMoments{boost::rational<std::int64_t>(s1, pairs), boost::rational<std::int64_t>(s2, pairs)};
}

}  // namespace hidpoly
