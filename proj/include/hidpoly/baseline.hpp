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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hidpoly/blackbox.hpp"
#include "hidpoly/gf.hpp"
#include "hidpoly/rng.hpp"

namespace hidpoly {

struct Observation {
  Felt r, s, value;
};

struct ClassicalTrial {
  std::optional<Felt> slope;
  std::uint64_t queries = 0;         // queries until the collision
  std::uint64_t verify_queries = 0;  // spent by verify_candidate
  std::vector<Observation> transcript;
};

/// Queries fresh (r, s) pairs, drawn without replacement by a lazy Fisher-Yates
/// shuffle of F^2, until two answers collide; the slope is (s - s')/(r - r').
/// The slope is checked with verify_candidate before it is returned. The
/// instance must be univariate of degree bound 1. max_queries = 0 means d^2.
ClassicalTrial solve_linear_classical(HiddenInstance& inst, Rng& rng, std::uint64_t max_queries = 0);

/// Number of slopes c for which some injective pi explains the transcript,
/// i.e. equal answers exactly where s - c r agree.
std::uint64_t consistent_slopes(const FieldCtx& ctx, std::span<const Observation> transcript);

struct BaselineStats {
  std::uint32_t d = 0;
  unsigned trials = 0;
  std::vector<std::uint64_t> queries_per_trial;
  std::vector<bool> success_flags;
  double median_queries = 0.0;
};

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;
  /// 95% confidence interval of the exponent; absent with only two sizes.
  std::optional<std::pair<double, double>> ci95;
};

struct ScalingResult {
  std::vector<BaselineStats> per_d;
  ScalingFit fit;
};

/// Least squares of log(median) against log(d).
ScalingFit fit_loglog(std::span<const double> ds, std::span<const double> medians);

/// Instance and RNG for trial t at size d derive from (seed, d, t) only, so
/// results do not depend on `jobs`. Requires trials >= 30 and two or more sizes.
ScalingResult scaling_experiment(std::span<const std::uint64_t> ds, unsigned trials, std::uint64_t seed,
                                 unsigned jobs = 0);

/// Rows "d,trial,queries,success".
std::string baseline_csv(const ScalingResult& r, bool header);
nlohmann::json to_json(const ScalingResult& r);

}  // namespace hidpoly
