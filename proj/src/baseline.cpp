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

#include "hidpoly/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

#include "hidpoly/errors.hpp"
#include "hidpoly/parallel.hpp"

namespace hidpoly {

ClassicalTrial solve_linear_classical(HiddenInstance& inst, Rng& rng, std::uint64_t max_queries) {
  if (inst.arity() != 1 || inst.degree_bound() != 1) {
    throw std::invalid_argument("the classical baseline handles univariate degree-1 instances only");
  }
  const FieldCtx& ctx = inst.field();
  const std::uint64_t d = ctx.d();
  const std::uint64_t pairs = d * d;
  if (max_queries == 0 || max_queries > pairs) max_queries = pairs;

  ClassicalTrial trial;
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;  // sparse Fisher-Yates state
  std::unordered_map<std::uint32_t, std::size_t> seen;       // answer -> transcript index
  const std::uint64_t start = inst.query_count();
  for (std::uint64_t i = 0; i < max_queries; ++i) {
    const std::uint64_t j = i + uniform_below(rng, pairs - i);
    auto at = [&](std::uint64_t k) {
      const auto it = swapped.find(k);
      return it == swapped.end() ? k : it->second;
    };
    const std::uint64_t pick = at(j);
    swapped[j] = at(i);
    const Felt r = ctx.element(pick / d);
    const Felt s = ctx.element(pick % d);
    const Felt v = inst.query(std::span<const Felt>(&r, 1), s);
    trial.transcript.push_back({r, s, v});
    const auto [it, fresh] = seen.try_emplace(v.value, trial.transcript.size() - 1);
    if (fresh) continue;
    const Observation& o = trial.transcript[it->second];
    if (o.r == r) throw InvariantViolation("collision at equal r for distinct query pairs");
    trial.queries = inst.query_count() - start;
    const Felt slope = ctx.div(ctx.sub(s, o.s), ctx.sub(r, o.r));
    MultiPoly cand(1);
    cand.set({1}, slope);
    const std::uint64_t before = inst.query_count();
    const bool ok = verify_candidate(inst, cand, default_verify_trials(1), rng);
    trial.verify_queries = inst.query_count() - before;
    if (!ok) throw InvariantViolation("collision slope failed verification");
    trial.slope = slope;
    return trial;
  }
  trial.queries = inst.query_count() - start;
  return trial;
}

std::uint64_t consistent_slopes(const FieldCtx& ctx, std::span<const Observation> transcript) {
  std::uint64_t count = 0;
  for (std::uint32_t cv = 0; cv < ctx.d(); ++cv) {
    const Felt c{cv};
    bool ok = true;
    for (std::size_t i = 0; ok && i < transcript.size(); ++i) {
      const Felt zi = ctx.sub(transcript[i].s, ctx.mul(c, transcript[i].r));
      for (std::size_t j = i + 1; j < transcript.size(); ++j) {
        const Felt zj = ctx.sub(transcript[j].s, ctx.mul(c, transcript[j].r));
        if ((zi == zj) != (transcript[i].value == transcript[j].value)) {
          ok = false;
          break;
        }
      }
    }
    count += ok ? 1 : 0;
  }
  return count;
}

namespace {

double median(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  if (v.size() % 2 == 1) return static_cast<double>(v[h]);
  return 0.5 * (static_cast<double>(v[h - 1]) + static_cast<double>(v[h]));
}

}  // namespace

ScalingFit fit_loglog(std::span<const double> ds, std::span<const double> medians) {
  if (ds.size() != medians.size()) throw std::invalid_argument("fit needs as many medians as sizes");
  if (ds.size() < 2) throw std::invalid_argument("need at least two field sizes for a fit");
  const std::size_t k = ds.size();
  std::vector<double> x(k), y(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (ds[i] <= 0.0 || medians[i] <= 0.0) throw std::invalid_argument("fit needs positive values");
    x[i] = std::log(ds[i]);
    y[i] = std::log(medians[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit needs distinct field sizes");
  ScalingFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  if (k > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double e = y[i] - fit.intercept - fit.exponent * x[i];
      rss += e * e;
    }
    const double dof = static_cast<double>(k - 2);
    const double se = std::sqrt(rss / dof / sxx);
    const boost::math::students_t dist(dof);
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    fit.ci95 = std::make_pair(fit.exponent - t * se, fit.exponent + t * se);
  }
  return fit;
}

ScalingResult scaling_experiment(std::span<const std::uint64_t> ds, unsigned trials, std::uint64_t seed,
                                 unsigned jobs) {
  if (trials < 30) throw std::invalid_argument("the scaling experiment needs at least 30 trials per size");
  if (ds.size() < 2) throw std::invalid_argument("need at least two field sizes for a fit");
  ScalingResult res;
  std::vector<double> xs, meds;
  for (std::uint64_t dv : ds) {
    const FieldCtx ctx = field_of_size(dv);
    BaselineStats st;
    st.d = ctx.d();
    st.trials = trials;
    st.queries_per_trial.assign(trials, 0);
    std::vector<char> ok(trials, 0);
    parallel_for(trials, jobs, [&](std::uint64_t t) {
      const std::uint64_t trial_seed = splitmix64(seed ^ splitmix64(dv) ^ splitmix64(t + 0x5bd1e995ULL));
      HiddenInstance inst = HiddenInstance::sample(ctx, 1, 1, trial_seed);
      Rng rng = split_rng(trial_seed, 1);
      const ClassicalTrial tr = solve_linear_classical(inst, rng);
      st.queries_per_trial[t] = tr.queries;
      ok[t] = tr.slope.has_value() && *tr.slope == inst.reveal().coeff({1});
    });
    st.success_flags.assign(ok.begin(), ok.end());
    st.median_queries = median(st.queries_per_trial);
    xs.push_back(static_cast<double>(st.d));
    meds.push_back(st.median_queries);
    res.per_d.push_back(std::move(st));
  }
  res.fit = fit_loglog(xs, meds);
  return res;
}

std::string baseline_csv(const ScalingResult& r, bool header) {
  std::ostringstream out;
  if (header) out << "d,trial,queries,success\n";
  for (const BaselineStats& st : r.per_d) {
    for (unsigned t = 0; t < st.trials; ++t) {
      out << st.d << ',' << t << ',' << st.queries_per_trial[t] << ',' << (st.success_flags[t] ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

nlohmann::json to_json(const ScalingResult& r) {
  nlohmann::json sizes = nlohmann::json::array();
  for (const BaselineStats& st : r.per_d) {
    const auto successes = std::count(st.success_flags.begin(), st.success_flags.end(), true);
    sizes.push_back({{"d", st.d}, {"trials", st.trials}, {"successes", successes}, {"median_queries", st.median_queries},
                     {"sqrt_d", std::sqrt(static_cast<double>(st.d))}});
  }
  nlohmann::json fit{{"exponent", r.fit.exponent}, {"intercept", r.fit.intercept}};
  if (r.fit.ci95) {
    fit["ci95"] = {r.fit.ci95->first, r.fit.ci95->second};
  } else {
    fit["ci95"] = nullptr;
  }
  return nlohmann::json{{"sizes", sizes}, {"fit", fit}};
}

}  // namespace hidpoly
