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
#include <set>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"

namespace hidpoly {
namespace {

HiddenInstance linear_instance(const FieldCtx& f, std::uint64_t seed) { return HiddenInstance::sample(f, 1, 1, seed); }

Felt true_slope(const HiddenInstance& inst) { return to_uni(inst.reveal()).coeff(1); }

double median(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? double(v[m]) : (double(v[m - 1]) + double(v[m])) / 2.0;
}

TEST(Classical, RecoversSlopeD101) {
  const FieldCtx f = make_field(101, 1);
  int successes = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    auto inst = linear_instance(f, t);
    Rng rng(t + 7);
    const ClassicalTrial tr = solve_linear_classical(inst, rng);
    if (!tr.slope) continue;
    ++successes;
    ASSERT_EQ(*tr.slope, true_slope(inst));
    EXPECT_GE(tr.queries, 2u);
    EXPECT_EQ(tr.transcript.size(), tr.queries);
    EXPECT_EQ(inst.query_count(), tr.queries + tr.verify_queries);
  }
  EXPECT_EQ(successes, 1000);
}

TEST(Classical, MedianAtD1009IsOrderSqrtD) {
  const FieldCtx f = make_field(1009, 1);
  std::vector<std::uint64_t> q;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    auto inst = linear_instance(f, 10'000 + t);
    Rng rng(t);
    q.push_back(solve_linear_classical(inst, rng).queries);
  }
  const double med = median(q);
  const double s = std::sqrt(1009.0);
  EXPECT_GE(med, s / 2);
  EXPECT_LE(med, 4 * s);
}

TEST(Classical, TinyFieldCollidesFast) {
  const FieldCtx f = make_field(2, 1);
  for (std::uint64_t t = 0; t < 200; ++t) {
    auto inst = linear_instance(f, t);
    Rng rng(t);
    const ClassicalTrial tr = solve_linear_classical(inst, rng);
    ASSERT_TRUE(tr.slope.has_value());
    EXPECT_LE(tr.queries, 3u);
  }
}

TEST(Classical, BudgetExhaustion) {
  const FieldCtx f = make_field(4001, 1);
  auto inst = linear_instance(f, 3);
  Rng rng(3);
  const ClassicalTrial tr = solve_linear_classical(inst, rng, 2);
  if (!tr.slope) {
    EXPECT_EQ(tr.queries, 2u);
  }
  EXPECT_LE(tr.queries, 2u);
}

TEST(Classical, RejectsWrongShape) {
  const FieldCtx f = make_field(7, 1);
  auto quad = HiddenInstance::sample(f, 1, 2, 1);
  Rng rng(0);
  EXPECT_THROW(solve_linear_classical(quad, rng), std::invalid_argument);
  auto bi = HiddenInstance::sample(f, 2, 1, 1);
  EXPECT_THROW(solve_linear_classical(bi, rng), std::invalid_argument);
}

// Slopes c with: equal answers exactly where s - c r agree.
std::uint64_t brute_consistent(const FieldCtx& f, const std::vector<Observation>& tr) {
  std::uint64_t count = 0;
  for (std::uint32_t c = 0; c < f.d(); ++c) {
    bool ok = true;
    for (std::size_t i = 0; i < tr.size() && ok; ++i) {
      for (std::size_t j = i + 1; j < tr.size() && ok; ++j) {
        const Felt ui = f.sub(tr[i].s, f.mul(Felt{c}, tr[i].r));
        const Felt uj = f.sub(tr[j].s, f.mul(Felt{c}, tr[j].r));
        ok = (ui == uj) == (tr[i].value == tr[j].value);
      }
    }
    count += ok;
  }
  return count;
}

TEST(ConsistentSlopes, NoCollisionLeavesManySlopes) {
  for (std::uint32_t d : {11u, 13u, 31u}) {
    const FieldCtx f = make_field(d, 1);
    for (std::uint64_t t = 0; t < 50; ++t) {
      auto inst = linear_instance(f, t);
      Rng rng(t);
      std::vector<Observation> tr;
      std::set<std::uint32_t> seen_pairs, seen_values;
      while (true) {
        const std::uint32_t idx = static_cast<std::uint32_t>(uniform_below(rng, std::uint64_t{d} * d));
        if (!seen_pairs.insert(idx).second) continue;
        const Felt r{idx / d}, s{idx % d};
        const Felt v = inst.query(FeltVec{r}, s);
        if (!seen_values.insert(v.value).second) break;
        tr.push_back({r, s, v});
        const std::uint64_t n = tr.size();
        const std::uint64_t c = consistent_slopes(f, tr);
        ASSERT_EQ(c, brute_consistent(f, tr));
        ASSERT_GE(static_cast<std::int64_t>(c), static_cast<std::int64_t>(d) - static_cast<std::int64_t>(n * (n - 1) / 2));
      }
    }
  }
}

TEST(ConsistentSlopes, CollisionPinsTheSlope) {
  const FieldCtx f = make_field(13, 1);
  for (std::uint64_t t = 0; t < 30; ++t) {
    auto inst = linear_instance(f, t);
    Rng rng(t);
    const ClassicalTrial tr = solve_linear_classical(inst, rng);
    ASSERT_TRUE(tr.slope.has_value());
    EXPECT_EQ(consistent_slopes(f, tr.transcript), 1u);
    EXPECT_EQ(brute_consistent(f, tr.transcript), 1u);
  }
}

TEST(FitLogLog, ExactPowerLaw) {
  const std::vector<double> ds{10, 100, 1000, 10000};
  std::vector<double> med;
  for (double d : ds) med.push_back(3.0 * std::pow(d, 0.5));
  const ScalingFit fit = fit_loglog(ds, med);
  EXPECT_NEAR(fit.exponent, 0.5, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-12);
  ASSERT_TRUE(fit.ci95.has_value());
  EXPECT_NEAR(fit.ci95->first, 0.5, 1e-9);
  EXPECT_NEAR(fit.ci95->second, 0.5, 1e-9);
  const std::vector<double> two{10, 100}, two_med{1, 10};
  EXPECT_FALSE(fit_loglog(two, two_med).ci95.has_value());
  const std::vector<double> one{10}, one_med{1};
  EXPECT_THROW(fit_loglog(one, one_med), std::invalid_argument);
}

TEST(ScalingExperiment, Errors) {
  const std::vector<std::uint64_t> one{101};
  EXPECT_THROW(scaling_experiment(one, 50, 1), std::invalid_argument);
  const std::vector<std::uint64_t> two{101, 401};
  EXPECT_THROW(scaling_experiment(two, 29, 1), std::invalid_argument);
}

TEST(ScalingExperiment, DeterministicAcrossJobs) {
  const std::vector<std::uint64_t> ds{101, 211};
  const ScalingResult a = scaling_experiment(ds, 40, 99, 1);
  const ScalingResult b = scaling_experiment(ds, 40, 99, 3);
  EXPECT_EQ(baseline_csv(a, true), baseline_csv(b, true));
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  const ScalingResult c = scaling_experiment(ds, 40, 100, 1);
  EXPECT_NE(baseline_csv(a, true), baseline_csv(c, true));
  EXPECT_EQ(baseline_csv(a, true).rfind("d,trial,queries,success\n101,0,", 0), 0u);
}

TEST(ScalingExperiment, MedianGrowth) {
  const std::vector<std::uint64_t> ds{101, 4001};
  const ScalingResult r = scaling_experiment(ds, 200, 4242);
  ASSERT_EQ(r.per_d.size(), 2u);
  EXPECT_GT(r.per_d[1].median_queries / r.per_d[0].median_queries, 3.0);
  for (const auto& s : r.per_d) {
    EXPECT_EQ(s.queries_per_trial.size(), 200u);
    EXPECT_EQ(std::count(s.success_flags.begin(), s.success_flags.end(), true), 200);
    EXPECT_DOUBLE_EQ(s.median_queries, median(s.queries_per_trial));
  }
}

}  // namespace
}  // namespace hidpoly
