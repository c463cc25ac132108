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

#include "hidpoly/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hidpoly/errors.hpp"
#include "hidpoly/parallel.hpp"

namespace hidpoly {

namespace {

struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

double d3n(const FieldCtx& ctx, unsigned n) { return std::pow(static_cast<double>(ctx.d()), 3.0 * n); }

/// Checks that the tables cover every x in F^n exactly once (k = n).
unsigned check_cover(const FieldCtx& ctx, std::span<const EtaTable> tables) {
  if (tables.empty()) throw std::invalid_argument("no eta tables given");
  const unsigned n = tables.front().n();
  const std::uint64_t xs = checked_power(ctx.d(), n, kEnumerationBudget, "x enumeration guard (d^n)");
  if (tables.size() != xs) throw std::invalid_argument("eta tables do not cover every x (missing x)");
  std::vector<char> seen(xs, 0);
  for (const EtaTable& t : tables) {
    if (t.n() != n || t.k() != n || t.d() != ctx.d()) throw std::invalid_argument("eta tables have mixed shapes");
    const std::uint64_t xi = tuple_index(ctx, t.x());
    if (seen[xi]) throw std::invalid_argument("eta table for x = (" + to_string(t.x()) + ") given twice");
    seen[xi] = 1;
  }
  return n;
}

double sqrt_sum(const EtaTable& t) {
  Kahan k;
  for (std::uint32_t e : t.counts()) {
    if (e != 0) k.add(std::sqrt(static_cast<double>(e)));
  }
  return k.sum;
}

struct GoodSums {
  double sqrt_sum = 0.0;
  std::uint64_t w_count = 0;
  std::uint64_t b_count = 0;
};

GoodSums good_sums(const EtaTable& t, const GoodSets& good) {
  GoodSums g;
  if (!good.x_good(t.x())) return g;
  Kahan k;
  for (std::uint64_t w = 0; w < t.size(); ++w) {
    if (!good.w_good(t, w)) continue;
    k.add(std::sqrt(static_cast<double>(t.eta(w))));
    ++g.w_count;
    g.b_count += t.eta(w);
  }
  g.sqrt_sum = k.sum;
  return g;
}

/// A(delta) = sum_w c_w chi(<delta, w>) for all delta, by one d-point
/// transform per axis.
std::vector<std::complex<double>> character_transform(const FieldCtx& ctx, unsigned n,
                                                      std::vector<std::complex<double>> a) {
  const std::uint32_t d = ctx.d();
  std::vector<std::complex<double>> table(static_cast<std::size_t>(d) * d);
  for (std::uint32_t u = 0; u < d; ++u) {
    for (std::uint32_t v = 0; v < d; ++v) table[u * d + v] = ctx.chi(ctx.mul(Felt{u}, Felt{v}));
  }
  std::vector<std::complex<double>> line(d);
  std::uint64_t stride = a.size();
  for (unsigned axis = 0; axis < n; ++axis) {
    stride /= d;
    const std::uint64_t block = stride * d;
    for (std::uint64_t base = 0; base < a.size(); base += block) {
      for (std::uint64_t off = 0; off < stride; ++off) {
        for (std::uint32_t u = 0; u < d; ++u) {
          std::complex<double> acc = 0.0;
          for (std::uint32_t v = 0; v < d; ++v) acc += table[u * d + v] * a[base + off + v * stride];
          line[u] = acc;
        }
        for (std::uint32_t u = 0; u < d; ++u) a[base + off + u * stride] = line[u];
      }
    }
  }
  return a;
}

/// Probabilities of delta = q - q' given fiber weights c_w (zero off the kept
/// set); normalized by d^n * sum c_w^2.
std::vector<double> shift_probabilities(const FieldCtx& ctx, unsigned n, const std::vector<double>& weights) {
  std::vector<std::complex<double>> a(weights.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    a[i] = weights[i];
    norm += weights[i] * weights[i];
  }
  const auto amp = character_transform(ctx, n, std::move(a));
  const double scale = 1.0 / (static_cast<double>(weights.size()) * norm);
  std::vector<double> out(amp.size());
  for (std::size_t i = 0; i < amp.size(); ++i) out[i] = std::norm(amp[i]) * scale;
  return out;
}

OutcomeDist dist_from_shift(const FieldCtx& ctx, const FeltVec& x, std::span<const Felt> q,
                            const std::vector<double>& shift) {
  OutcomeDist dist;
  dist.x = x;
  dist.probabilities.resize(shift.size());
  const unsigned n = static_cast<unsigned>(q.size());
  FeltVec delta(n);
  for (std::uint64_t qi = 0; qi < shift.size(); ++qi) {
    const FeltVec qp = tuple_at(ctx, qi, n);
    for (unsigned i = 0; i < n; ++i) delta[i] = ctx.sub(q[i], qp[i]);
    dist.probabilities[qi] = shift[tuple_index(ctx, delta)];
  }
  return dist;
}

void check_q(const FieldCtx& ctx, const EtaTable& table, std::span<const Felt> q) {
  if (q.size() != table.n()) throw std::invalid_argument("q has length " + std::to_string(q.size()) + ", expected n");
  for (Felt c : q) ctx.check(c);
}

}  // namespace

double ideal_success(const FieldCtx& ctx, std::span<const EtaTable> tables) {
  const unsigned n = check_cover(ctx, tables);
  Kahan total;
  for (const EtaTable& t : tables) {
    const double s = sqrt_sum(t);
    total.add(s * s);
  }
  return total.sum / d3n(ctx, n);
}

double approx_success(std::span<const EtaTable> tables, const GoodSets& good) {
  const FieldCtx& ctx = good.field();
  const unsigned n = check_cover(ctx, tables);
  if (n != good.n()) throw std::invalid_argument("good sets were classified for a different n");
  Kahan total;
  for (const EtaTable& t : tables) {
    const double s = good_sums(t, good).sqrt_sum;
    total.add(s * s);
  }
  return total.sum / d3n(ctx, n);
}

double lemma2_lower_bound(std::span<const EtaTable> tables, const GoodSets& good) {
  const FieldCtx& ctx = good.field();
  const unsigned n = check_cover(ctx, tables);
  if (n != good.n()) throw std::invalid_argument("good sets were classified for a different n");
  std::uint64_t x_good = 0;
  std::uint64_t w_min = 0;
  for (const EtaTable& t : tables) {
    if (!good.x_good(t.x())) continue;
    const std::uint64_t c = good_sums(t, good).w_count;
    w_min = x_good == 0 ? c : std::min(w_min, c);
    ++x_good;
  }
  const double w = static_cast<double>(w_min);
  return static_cast<double>(x_good) * w * w / d3n(ctx, n);
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::Ideal:
      return "ideal";
    case Branch::GoodBranch:
      return "good";
    case Branch::BadBranch:
      return "bad";
  }
  return "?";
}

OutcomeDist outcome_distribution(const FieldCtx& ctx, const EtaTable& table, const GoodSets& good,
                                 std::span<const Felt> q) {
  check_q(ctx, table, q);
  if (table.n() != good.n()) throw std::invalid_argument("good sets were classified for a different n");
  std::vector<double> weights(table.size(), 0.0);
  std::uint64_t b_good = 0;
  if (good.x_good(table.x())) {
    for (std::uint64_t w = 0; w < table.size(); ++w) {
      if (!good.w_good(table, w)) continue;
      weights[w] = std::sqrt(static_cast<double>(table.eta(w)));
      b_good += table.eta(w);
    }
  }
  if (b_good == 0) {
    OutcomeDist bad;
    bad.x = table.x();
    return bad;
  }
  OutcomeDist dist = dist_from_shift(ctx, table.x(), q, shift_probabilities(ctx, table.n(), weights));
  dist.branch = Branch::GoodBranch;
  dist.good_mass = static_cast<double>(b_good) / static_cast<double>(table.size());
  return dist;
}

OutcomeDist ideal_outcome_distribution(const FieldCtx& ctx, const EtaTable& table, std::span<const Felt> q) {
  check_q(ctx, table, q);
  if (table.k() != table.n()) throw std::invalid_argument("ideal distribution needs k = n");
  std::vector<double> weights(table.size());
  for (std::uint64_t w = 0; w < table.size(); ++w) weights[w] = std::sqrt(static_cast<double>(table.eta(w)));
  OutcomeDist dist = dist_from_shift(ctx, table.x(), q, shift_probabilities(ctx, table.n(), weights));
  dist.branch = Branch::Ideal;
  dist.good_mass = 1.0;
  return dist;
}

std::string dist_csv(const FieldCtx& ctx, const OutcomeDist& dist, bool header) {
  std::ostringstream out;
  out.precision(17);
  if (header) out << "x,q_prime,probability\n";
  const unsigned n = static_cast<unsigned>(dist.x.size());
  for (std::uint64_t i = 0; i < dist.probabilities.size(); ++i) {
    out << to_string(dist.x, ';') << ',' << to_string(tuple_at(ctx, i, n), ';') << ',' << dist.probabilities[i]
        << '\n';
  }
  return out.str();
}

FeltVec coefficient_vector(const MultiPoly& q, unsigned n) {
  if (q.arity() != 1) throw std::invalid_argument("expected a univariate polynomial");
  if (q.total_degree() > n) throw std::invalid_argument("polynomial degree exceeds n");
  FeltVec out(n);
  for (unsigned i = 1; i <= n; ++i) out[i - 1] = q.coeff(Exponents{i});
  return out;
}

OutcomeSampler::OutcomeSampler(GoodSets good, std::uint64_t budget) : good_(std::move(good)), budget_(budget) {
  x_count_ = checked_power(good_.field().d(), good_.n(), budget_, "sampler guard (d^n)");
  checked_power(good_.field().d(), 2 * good_.n(), budget_, "sampler guard (d^(2n))");
  cache_.resize(x_count_);
}

const OutcomeSampler::PerX& OutcomeSampler::per_x(std::uint64_t x_index) {
  PerX& slot = cache_[x_index];
  if (slot.ready) return slot;
  const FieldCtx& ctx = good_.field();
  const unsigned n = good_.n();
  const FeltVec x = tuple_at(ctx, x_index, n);
  slot.ready = true;
  if (!good_.x_good(x)) return slot;
  const EtaTable table = eta_table(ctx, x, false, budget_);
  std::vector<double> weights(table.size(), 0.0);
  std::uint64_t b_good = 0;
  for (std::uint64_t w = 0; w < table.size(); ++w) {
    if (!good_.w_good(table, w)) continue;
    weights[w] = std::sqrt(static_cast<double>(table.eta(w)));
    b_good += table.eta(w);
  }
  if (b_good == 0) return slot;
  slot.good_mass = static_cast<double>(b_good) / static_cast<double>(table.size());
  slot.shift_cdf = shift_probabilities(ctx, n, weights);
  double acc = 0.0;
  for (double& v : slot.shift_cdf) {
    acc += v;
    v = acc;
  }
  return slot;
}

void OutcomeSampler::precompute(unsigned jobs) {
  parallel_for(x_count_, jobs, [&](std::uint64_t xi) { per_x(xi); });
}

RunOutcome OutcomeSampler::run_once(std::span<const Felt> q, Rng& rng) {
  const FieldCtx& ctx = good_.field();
  if (q.size() != n()) throw std::invalid_argument("hidden coefficient vector has the wrong length");
  RunOutcome out;
  out.x_index = uniform_below(rng, x_count_);
  const PerX& slot = per_x(out.x_index);
  if (slot.shift_cdf.empty() || uniform_unit(rng) >= slot.good_mass) return out;
  const double u = uniform_unit(rng) * slot.shift_cdf.back();
  const auto it = std::upper_bound(slot.shift_cdf.begin(), slot.shift_cdf.end(), u);
  const std::uint64_t di =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(it - slot.shift_cdf.begin()), slot.shift_cdf.size() - 1);
  const FeltVec delta = tuple_at(ctx, di, n());
  FeltVec qp(n());
  for (unsigned i = 0; i < n(); ++i) qp[i] = ctx.sub(q[i], delta[i]);
  out.branch = Branch::GoodBranch;
  out.q_prime = std::move(qp);
  return out;
}

RunOutcome OutcomeSampler::run_once(Oracle& oracle, Rng& rng) {
  if (oracle.arity() != 1) throw std::invalid_argument("the sampler runs univariate instances only");
  if (oracle.field().d() != good_.field().d() || oracle.field().p() != good_.field().p()) {
    throw std::invalid_argument("oracle and good sets use different fields");
  }
  const FeltVec q = coefficient_vector(oracle.reveal_polynomial(), n());
  oracle.charge_queries(n());
  return run_once(q, rng);
}

nlohmann::json to_json(const McEstimate& mc) {
  return nlohmann::json{{"runs", mc.runs},
                        {"successes", mc.successes},
                        {"bad_branch", mc.bad_branch},
                        {"estimate", mc.estimate},
                        {"stderr", mc.stderr_}};
}

McEstimate monte_carlo(Oracle& oracle, OutcomeSampler& sampler, std::uint64_t runs, Rng& rng) {
  if (runs == 0) throw std::invalid_argument("monte carlo needs at least one run");
  const FeltVec q = coefficient_vector(oracle.reveal_polynomial(), sampler.n());
  McEstimate mc;
  mc.runs = runs;
  for (std::uint64_t i = 0; i < runs; ++i) {
    const RunOutcome r = sampler.run_once(oracle, rng);
    if (r.branch == Branch::BadBranch) {
      ++mc.bad_branch;
    } else if (*r.q_prime == q) {
      ++mc.successes;
    }
  }
  const double p = static_cast<double>(mc.successes) / static_cast<double>(runs);
  mc.estimate = p;
  mc.stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(runs));
  return mc;
}

VoteResult identify_univariate(Oracle& oracle, OutcomeSampler& sampler, unsigned votes, std::uint64_t max_runs,
                               Rng& rng) {
  if (votes == 0) throw std::invalid_argument("need at least one vote");
  VoteResult result;
  std::map<FeltVec, unsigned> tally;
  unsigned collected = 0;
  while (collected < votes && result.runs < max_runs) {
    const RunOutcome r = sampler.run_once(oracle, rng);
    ++result.runs;
    if (r.branch == Branch::BadBranch) {
      ++result.bad_runs;
      continue;
    }
    ++tally[*r.q_prime];
    ++collected;
  }
  if (tally.empty()) return result;
  unsigned best = 0;
  for (const auto& [qp, c] : tally) best = std::max(best, c);
  std::vector<FeltVec> tied;
  for (const auto& [qp, c] : tally) {
    if (c == best) tied.push_back(qp);
  }
  auto as_poly = [](const FeltVec& coeffs) {
    FeltVec full(coeffs.size() + 1, Felt{0});
    std::copy(coeffs.begin(), coeffs.end(), full.begin() + 1);
    return UniPoly(std::move(full));
  };
  if (tied.size() > 1) {
    const unsigned trials = default_verify_trials(sampler.n());
    for (const FeltVec& qp : tied) {
      if (verify_candidate(oracle, to_multi(as_poly(qp)), trials, rng)) {
        result.candidate = as_poly(qp);
        return result;
      }
    }
  }
  result.candidate = as_poly(tied.front());
  return result;
}

nlohmann::json to_json(const SuccessReport& r) {
  nlohmann::json j{{"field", r.field},
                   {"modulus", r.modulus},
                   {"d", r.d},
                   {"n", r.n},
                   {"analysis", to_string(r.good.analysis)},
                   {"good_sets", to_json(r.good)},
                   {"ideal_success", r.ideal_success},
                   {"approx_success", r.approx_success},
                   {"lemma2_lower_bound", r.lemma2_lower_bound},
                   {"corollary_bound", r.corollary_bound}};
  if (r.good.analysis == Analysis::First) j["kappa"] = r.kappa;
  if (r.mc) j["mc"] = to_json(*r.mc);
  return j;
}

void check_sandwich(const SuccessReport& r) {
  constexpr double kTol = 1e-9;
  auto fail = [&](const std::string& what) {
    throw InvariantViolation("success sandwich violated: " + what + " (lemma2 = " + std::to_string(r.lemma2_lower_bound) +
                             ", approx = " + std::to_string(r.approx_success) +
                             ", ideal = " + std::to_string(r.ideal_success) + ")");
  };
  if (r.lemma2_lower_bound < -kTol) fail("negative lower bound");
  if (r.lemma2_lower_bound > r.approx_success + kTol) fail("lemma2 > approx");
  if (r.approx_success > r.ideal_success + kTol) fail("approx > ideal");
  if (r.ideal_success > 1.0 + kTol) fail("ideal > 1");
  if (r.corollary_bound > r.lemma2_lower_bound + kTol) fail("corollary bound > lemma2");
}

SuccessReport success_report(const GoodSets& good, unsigned jobs, std::uint64_t budget) {
  const FieldCtx& ctx = good.field();
  const unsigned n = good.n();
  const std::uint64_t xs = checked_power(ctx.d(), n, budget, "success report guard (d^n)");
  checked_power(ctx.d(), 2 * n, budget, "success report guard (d^(2n))");
  const bool first = good.analysis() == Analysis::First;

  struct PerX {
    double ideal = 0.0;
    double approx = 0.0;
    std::uint64_t w_good = 0;
    std::uint64_t repeated_image = 0;
  };
  std::vector<PerX> per_x(xs);
  std::vector<char> is_good(xs, 0);
  parallel_for(xs, jobs, [&](std::uint64_t xi) {
    const FeltVec x = tuple_at(ctx, xi, n);
    const EtaTable table = eta_table(ctx, x, false, budget);
    PerX& px = per_x[xi];
    const double s = sqrt_sum(table);
    px.ideal = s * s;
    if (!good.x_good(x)) return;
    is_good[xi] = 1;
    const GoodSums g = good_sums(table, good);
    px.approx = g.sqrt_sum * g.sqrt_sum;
    px.w_good = g.w_count;
    if (!first) return;
    // Image of the points b with a repeated coordinate; outside it every fiber
    // consists of nonsingular points only.
    std::vector<char> hit(table.size(), 0);
    FeltVec b(n);
    for (std::uint64_t bi = 0; bi < table.size(); ++bi) {
      b = tuple_at(ctx, bi, n);
      FeltVec sorted = b;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) continue;
      const std::uint64_t wi = tuple_index(ctx, apply_map(ctx, x, b));
      if (!hit[wi]) {
        hit[wi] = 1;
        ++px.repeated_image;
      }
    }
  });

  SuccessReport r;
  r.field = ctx.descriptor();
  r.modulus = ctx.modulus_string();
  r.d = ctx.d();
  r.n = n;
  r.good.analysis = good.analysis();
  r.good.cap = good.cap();
  Kahan ideal, approx, w_sum;
  std::uint64_t repeated_max = 0;
  for (std::uint64_t xi = 0; xi < xs; ++xi) {
    ideal.add(per_x[xi].ideal);
    if (!is_good[xi]) continue;
    approx.add(per_x[xi].approx);
    const std::uint64_t c = per_x[xi].w_good;
    r.good.w_good_min = r.good.x_good_count == 0 ? c : std::min(r.good.w_good_min, c);
    ++r.good.x_good_count;
    w_sum.add(static_cast<double>(c));
    repeated_max = std::max(repeated_max, per_x[xi].repeated_image);
  }
  r.good.w_good_mean = r.good.x_good_count == 0 ? 0.0 : w_sum.sum / static_cast<double>(r.good.x_good_count);

  const double scale = d3n(ctx, n);
  const double dd = static_cast<double>(ctx.d());
  const double dn = std::pow(dd, n);
  r.ideal_success = ideal.sum / scale;
  r.approx_success = approx.sum / scale;
  const double wmin = static_cast<double>(r.good.w_good_min);
  r.lemma2_lower_bound = static_cast<double>(r.good.x_good_count) * wmin * wmin / scale;
  const double cap = static_cast<double>(good.cap());
  if (first) {
    const std::uint64_t layer = xs / ctx.d();  // d^(n-1)
    r.kappa = (repeated_max + layer - 1) / layer;
    double falling = 1.0;
    for (unsigned i = 0; i < n; ++i) falling *= dd - i;
    const double per = std::max(0.0, falling / cap - static_cast<double>(r.kappa * layer));
    r.corollary_bound = std::pow(dd - 1.0, n) * per * per / scale;
  } else {
    const double per = dn / cap;
    r.corollary_bound = static_cast<double>(r.good.x_good_count) * per * per / scale;
  }
  check_sandwich(r);
  return r;
}

}  // namespace hidpoly
