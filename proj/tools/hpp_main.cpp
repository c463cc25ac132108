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

// hpp: experiments for the hidden polynomial problem.
//
//   hpp eta --field 3^1 --n 2 --x 1,1
//   hpp success --field 7^1 --n 2 --analysis auto --mc 10000 --seed 42
//   hpp e2e --field 7^1 --m 2 --n 2 --trials 200 --seed 7 --output runs.csv
//   hpp baseline --ds 101,401,1009,4001 --trials 200 --seed 1
//   hpp plan --field 7^1 --m 3 --n 2

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hidpoly/baseline.hpp"
#include "hidpoly/blackbox.hpp"
#include "hidpoly/densmat.hpp"
#include "hidpoly/errors.hpp"
#include "hidpoly/fibers.hpp"
#include "hidpoly/gf.hpp"
#include "hidpoly/parallel.hpp"
#include "hidpoly/pgm.hpp"
#include "hidpoly/reduction.hpp"

namespace {

using namespace hidpoly;

constexpr int kExitUsage = 2;
constexpr int kExitGuard = 3;
constexpr int kExitInvariant = 4;

/// Rows written by --dump-dist before the guard trips.
constexpr std::uint64_t kDumpRowLimit = 1'000'000;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  unsigned jobs = 0;
  std::string output;
  std::string format = "csv";
  std::uint64_t budget = 1'000'000'000;
  std::optional<std::uint64_t> seed;
};

std::uint64_t require_seed(const Common& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("HPP_SEED")) {
    try {
      std::size_t pos = 0;
      const std::uint64_t v = std::stoull(env, &pos);
      if (pos == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("HPP_SEED is not an unsigned integer");
  }
  throw UsageError("this command samples; pass --seed or set HPP_SEED");
}

void emit(const Common& c, const std::string& text) {
  if (c.output.empty() || c.output == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(c.output, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + c.output + " for writing");
  f << text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

FeltVec parse_tuple(const FieldCtx& ctx, const std::string& text) {
  FeltVec out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      throw UsageError("bad field element '" + item + "'");
    }
    if (pos != item.size() || v >= ctx.d()) throw UsageError("bad field element '" + item + "'");
    out.push_back(Felt{static_cast<std::uint32_t>(v)});
  }
  return out;
}

GoodSets make_good(const FieldCtx& ctx, unsigned n, const std::string& analysis) {
  try {
    if (analysis == "auto") return GoodSets::make_auto(ctx, n);
    return GoodSets::make(ctx, n, parse_analysis(analysis));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

FieldCtx field_arg(const std::string& s) {
  try {
    if (s.find('^') == std::string::npos) return field_of_size(std::stoull(s));
    return parse_field(s);
  } catch (const std::logic_error& e) {
    throw UsageError(e.what());
  }
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) { return splitmix64(seed ^ splitmix64(trial + 1)); }

// ---------------------------------------------------------------- eta

struct EtaArgs {
  std::string field;
  unsigned n = 2;
  std::string x;
  bool moments = false;
  bool summary = false;
  std::string analysis = "auto";
};

void cmd_eta(const Common& c, const EtaArgs& a) {
  const FieldCtx ctx = field_arg(a.field);
  if (a.moments) {
    if (!a.x.empty()) throw UsageError("--moments averages over all x; drop --x");
    nlohmann::json rows = nlohmann::json::array();
    for (unsigned k = 1; k <= a.n; ++k) {
      const EtaMoments m = eta_moments(ctx, a.n, k, c.budget);
      rows.push_back({{"k", k},
                      {"first_moment", std::to_string(m.first.numerator()) + "/" + std::to_string(m.first.denominator())},
                      {"second_moment",
                       std::to_string(m.second.numerator()) + "/" + std::to_string(m.second.denominator())}});
    }
    emit(c, dump({{"field", ctx.descriptor()}, {"n", a.n}, {"moments", rows}}));
    return;
  }
  if (a.summary) {
    const GoodSets good = make_good(ctx, a.n, a.analysis);
    emit(c, dump(to_json(summarize_good_sets(good, c.budget, c.jobs))));
    return;
  }
  if (a.x.empty()) throw UsageError("--x is required");
  const FeltVec x = parse_tuple(ctx, a.x);
  const EtaTable table = eta_table_rect(ctx, a.n, x, false, c.budget);
  if (c.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (std::uint64_t w = 0; w < table.size(); ++w) {
      if (table.eta(w) == 0) continue;
      rows.push_back({{"w", to_string(tuple_at(ctx, w, a.n), ';')}, {"eta", table.eta(w)}});
    }
    emit(c, dump({{"field", ctx.descriptor()}, {"n", a.n}, {"x", to_string(x, ';')}, {"rows", rows}}));
  } else {
    emit(c, eta_csv(table, ctx, true));
  }
}

// ---------------------------------------------------------------- success

struct SuccessArgs {
  std::string field;
  unsigned n = 2;
  std::string analysis = "auto";
  std::uint64_t mc = 0;
  std::string dump_dist;
  std::string dump_matrix;
  std::string q;
  bool densmat_check = false;
};

void cmd_success(const Common& c, const SuccessArgs& a) {
  const FieldCtx ctx = field_arg(a.field);
  const GoodSets good = make_good(ctx, a.n, a.analysis);
  SuccessReport report = success_report(good, c.jobs, c.budget);

  // The hidden coefficients for MC, dumps and the dense check: --q, else a
  // seeded sample when a seed is available, else zero.
  std::optional<HiddenInstance> inst;
  FeltVec q(a.n, Felt{0});
  const bool need_q = a.mc > 0 || !a.dump_dist.empty() || !a.dump_matrix.empty() || a.densmat_check;
  if (!a.q.empty()) {
    q = parse_tuple(ctx, a.q);
    if (q.size() != a.n) throw UsageError("--q needs n coefficients");
  } else if (a.mc > 0 || (need_q && (c.seed || std::getenv("HPP_SEED")))) {
    inst = HiddenInstance::sample(ctx, 1, a.n, require_seed(c));
    q = coefficient_vector(inst->reveal(), a.n);
  }
  if (!inst && need_q) {
    MultiPoly p(1);
    for (unsigned i = 0; i < a.n; ++i) p.set({i + 1}, q[i]);
    inst = HiddenInstance::with_identity(ctx, p, a.n);
  }

  nlohmann::json out = to_json(report);
  out["q"] = to_string(q, ';');
  if (a.mc > 0) {
    OutcomeSampler sampler(good);
    Rng rng = split_rng(require_seed(c), 2);
    report.mc = monte_carlo(*inst, sampler, a.mc, rng);
    out["mc"] = to_json(*report.mc);
  }
  if (a.densmat_check) {
    const MultiPoly p = inst->reveal();
    const UniPoly uq = to_uni(p);
    const std::uint64_t xs = checked_power(ctx.d(), a.n, kEnumerationBudget, "x enumeration guard (d^n)");
    double worst = 0.0;
    for (std::uint64_t xi = 0; xi < xs; ++xi) {
      const FeltVec x = tuple_at(ctx, xi, a.n);
      const PipelineResult pr = pipeline_probability(ctx, uq, x, good);
      const EtaTable table = eta_table(ctx, x, false);
      const OutcomeDist dist = outcome_distribution(ctx, table, good, q);
      worst = std::max(worst, std::abs(pr.good_mass - dist.good_mass));
      for (std::size_t i = 0; i < pr.probabilities.size(); ++i) {
        worst = std::max(worst, std::abs(pr.probabilities[i] - dist.probabilities[i]));
      }
    }
    out["densmat_max_deviation"] = worst;
    if (worst > 1e-9) throw InvariantViolation("dense pipeline disagrees with the analytic distribution by " +
                                               std::to_string(worst));
  }
  if (!a.dump_dist.empty()) {
    const std::uint64_t xs = checked_power(ctx.d(), a.n, kDumpRowLimit, "--dump-dist size guard (d^n)");
    checked_power(ctx.d(), 2 * a.n, kDumpRowLimit, "--dump-dist size guard (d^(2n) rows)");
    std::string text = "x,q_prime,probability\n";
    for (std::uint64_t xi = 0; xi < xs; ++xi) {
      const EtaTable table = eta_table(ctx, tuple_at(ctx, xi, a.n), false);
      const OutcomeDist dist = outcome_distribution(ctx, table, good, q);
      text += dist_csv(ctx, dist, false);
    }
    write_file(a.dump_dist, text);
  }
  if (!a.dump_matrix.empty()) {
    std::ostringstream m;
    write_matrix(m, conjugate_fourier(ctx, build_rho_q(ctx, to_uni(inst->reveal()))));
    write_file(a.dump_matrix, m.str());
  }
  emit(c, dump(out));
}

// ---------------------------------------------------------------- e2e

struct E2eArgs {
  std::string field;
  unsigned m = 1;
  unsigned n = 2;
  unsigned trials = 100;
  std::string analysis = "auto";
  unsigned votes = 9;
  unsigned rounds = 3;
  std::uint64_t max_runs = 0;
  bool reveal = false;
  bool baseline = false;
  bool explain_plan = false;
  std::string summary;
};

void cmd_e2e(const Common& c, const E2eArgs& a) {
  const FieldCtx ctx = field_arg(a.field);
  const std::uint64_t seed = require_seed(c);
  if (a.trials == 0) throw UsageError("--trials must be positive");
  if (a.m == 0) throw UsageError("--m must be positive");
  if (ctx.d() <= a.n) throw UsageError("the reduction needs d > n");
  const GoodSets good = make_good(ctx, a.n, a.analysis);
  const std::uint64_t kap = kappa(a.n, a.m);
  const std::uint64_t max_runs = a.max_runs == 0 ? 50ull * a.votes : a.max_runs;

  OutcomeSampler sampler(good, c.budget);
  sampler.precompute(c.jobs);

  struct Row {
    bool success = false;
    unsigned rounds = 0;
    std::uint64_t solver_calls = 0;
    std::uint64_t queries = 0;
    std::uint64_t runs = 0;
    std::uint64_t bad_runs = 0;
    std::uint64_t classical_queries = 0;
    std::string q;
  };
  std::vector<Row> rows(a.trials);
  parallel_for(a.trials, c.jobs, [&](std::uint64_t t) {
    const std::uint64_t ts = trial_seed(seed, t);
    HiddenInstance inst = HiddenInstance::sample(ctx, a.m, a.n, ts);
    Rng rng = split_rng(ts, 1);
    Row& row = rows[t];
    UniSolver solver = [&](Oracle& view) -> std::optional<UniPoly> {
      const VoteResult v = identify_univariate(view, sampler, a.votes, max_runs, rng);
      row.runs += v.runs;
      row.bad_runs += v.bad_runs;
      return v.candidate;
    };
    ReductionOptions opts;
    opts.rounds = a.rounds;
    const ReductionResult r = solve_multivariate(inst, a.n, solver, opts, rng);
    row.success = r.poly.has_value() && *r.poly == inst.reveal();
    row.rounds = r.rounds_used;
    row.solver_calls = r.solver_calls;
    row.queries = r.queries;
    if (a.reveal) row.q = to_string(inst.reveal());
    if (a.baseline) {
      HiddenInstance lin = HiddenInstance::sample(ctx, 1, 1, ts);
      Rng brng = split_rng(ts, 2);
      row.classical_queries = solve_linear_classical(lin, brng).queries;
    }
  });

  std::ostringstream csv;
  csv << "trial,success,rounds,solver_calls,queries,runs,bad_runs";
  if (a.baseline) csv << ",classical_queries";
  if (a.reveal) csv << ",Q";
  csv << '\n';
  std::uint64_t successes = 0, calls = 0, queries = 0, runs = 0, bad = 0, classical = 0;
  for (unsigned t = 0; t < a.trials; ++t) {
    const Row& r = rows[t];
    csv << t << ',' << (r.success ? 1 : 0) << ',' << r.rounds << ',' << r.solver_calls << ',' << r.queries << ','
        << r.runs << ',' << r.bad_runs;
    if (a.baseline) csv << ',' << r.classical_queries;
    if (a.reveal) csv << ',' << r.q;
    csv << '\n';
    successes += r.success ? 1 : 0;
    calls += r.solver_calls;
    queries += r.queries;
    runs += r.runs;
    bad += r.bad_runs;
    classical += r.classical_queries;
    if (r.solver_calls % kap != 0) {
      throw InvariantViolation("trial " + std::to_string(t) + " made " + std::to_string(r.solver_calls) +
                               " solver calls, not a multiple of kappa = " + std::to_string(kap));
    }
  }
  const double tr = static_cast<double>(a.trials);
  nlohmann::json summary{{"field", ctx.descriptor()},
                         {"m", a.m},
                         {"n", a.n},
                         {"analysis", to_string(good.analysis())},
                         {"seed", seed},
                         {"trials", a.trials},
                         {"kappa", kap},
                         {"success_rate", static_cast<double>(successes) / tr},
                         {"mean_solver_calls", static_cast<double>(calls) / tr},
                         {"mean_queries", static_cast<double>(queries) / tr},
                         {"bad_branch_fraction", runs == 0 ? 0.0 : static_cast<double>(bad) / static_cast<double>(runs)}};
  if (a.baseline) summary["mean_classical_queries"] = static_cast<double>(classical) / tr;
  if (a.explain_plan) summary["plan"] = to_json(make_plan(ctx, a.m, a.n));
  if (c.format == "json") {
    emit(c, dump(summary));
    return;
  }
  emit(c, csv.str());
  if (!a.summary.empty()) {
    write_file(a.summary, dump(summary));
  } else if (!c.output.empty() && c.output != "-") {
    std::cout << dump(summary);
  }
}

// ---------------------------------------------------------------- baseline

struct BaselineArgs {
  std::vector<std::uint64_t> ds{101, 401, 1009, 4001};
  unsigned trials = 200;
  std::string summary;
};

void cmd_baseline(const Common& c, const BaselineArgs& a) {
  const std::uint64_t seed = require_seed(c);
  ScalingResult r;
  try {
    r = scaling_experiment(a.ds, a.trials, seed, c.jobs);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  nlohmann::json summary = to_json(r);
  summary["seed"] = seed;
  if (c.format == "json") {
    emit(c, dump(summary));
    return;
  }
  emit(c, baseline_csv(r, true));
  if (!a.summary.empty()) {
    write_file(a.summary, dump(summary));
  } else if (!c.output.empty() && c.output != "-") {
    std::cout << dump(summary);
  }
}

// ---------------------------------------------------------------- plan

struct PlanArgs {
  std::string field;
  unsigned m = 2;
  unsigned n = 2;
};

void cmd_plan(const Common& c, const PlanArgs& a) {
  const FieldCtx ctx = field_arg(a.field);
  if (a.m == 0 || a.n == 0) throw UsageError("--m and --n must be positive");
  try {
    emit(c, dump(to_json(make_plan(ctx, a.m, a.n))));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hidden polynomial problem experiments"};
  app.require_subcommand(1);
  Common common;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub, bool sampling) {
    sub->add_option("--jobs", common.jobs, "Worker threads (0 = all cores)");
    sub->add_option("--output,-o", common.output, "Output file (default stdout)");
    sub->add_option("--format", common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--budget", common.budget, "Enumeration guard (d^(2n) limit)");
    if (sampling) sub->add_option("--seed", seed, "Seed (falls back to HPP_SEED)");
  };

  EtaArgs eta;
  auto* s_eta = app.add_subcommand("eta", "Fiber sizes eta_w^x for one x, moments, or good-set summary");
  s_eta->add_option("--field", eta.field, "Field p^e")->required();
  s_eta->add_option("--n", eta.n, "Degree bound n")->check(CLI::PositiveNumber);
  s_eta->add_option("--x", eta.x, "Comma-separated x (its length is the copy count k)");
  s_eta->add_flag("--moments", eta.moments, "Exact first and second moments for k = 1..n");
  s_eta->add_flag("--summary", eta.summary, "Good-set summary JSON");
  s_eta->add_option("--analysis", eta.analysis, "first, second or auto")
      ->check(CLI::IsMember({"first", "second", "auto"}));
  add_common(s_eta, false);

  SuccessArgs suc;
  auto* s_suc = app.add_subcommand("success", "Ideal, approximate and bound success probabilities");
  s_suc->add_option("--field", suc.field, "Field p^e")->required();
  s_suc->add_option("--n", suc.n, "Degree bound n")->check(CLI::PositiveNumber);
  s_suc->add_option("--analysis", suc.analysis, "first, second or auto")
      ->check(CLI::IsMember({"first", "second", "auto"}));
  s_suc->add_option("--mc", suc.mc, "Monte Carlo runs (needs a seed)");
  s_suc->add_option("--q", suc.q, "Hidden coefficients q_1..q_n for dumps and checks");
  s_suc->add_option("--dump-dist", suc.dump_dist, "Write per-x outcome distributions (CSV)");
  s_suc->add_option("--dump-matrix", suc.dump_matrix, "Write the single-copy Fourier-conjugated state");
  s_suc->add_flag("--densmat-check", suc.densmat_check, "Cross-check against the dense pipeline (small d)");
  add_common(s_suc, true);

  E2eArgs e2e;
  auto* s_e2e = app.add_subcommand("e2e", "Full recovery pipeline on sampled instances");
  s_e2e->add_option("--field", e2e.field, "Field p^e")->required();
  s_e2e->add_option("--m", e2e.m, "Number of variables")->check(CLI::PositiveNumber);
  s_e2e->add_option("--n", e2e.n, "Degree bound n")->check(CLI::PositiveNumber);
  s_e2e->add_option("--trials", e2e.trials, "Instances");
  s_e2e->add_option("--analysis", e2e.analysis, "first, second or auto")
      ->check(CLI::IsMember({"first", "second", "auto"}));
  s_e2e->add_option("--votes", e2e.votes, "Good-branch outcomes per univariate solve")->check(CLI::PositiveNumber);
  s_e2e->add_option("--rounds", e2e.rounds, "Amplification rounds")->check(CLI::PositiveNumber);
  s_e2e->add_option("--max-runs", e2e.max_runs, "Run cap per univariate solve (0 = 50 * votes)");
  s_e2e->add_flag("--reveal", e2e.reveal, "Add the ground-truth Q column");
  s_e2e->add_flag("--baseline", e2e.baseline, "Add classical collision-solver query counts");
  s_e2e->add_flag("--explain-plan", e2e.explain_plan, "Include the reduction plan in the summary");
  s_e2e->add_option("--summary", e2e.summary, "Write the summary JSON here");
  add_common(s_e2e, true);

  BaselineArgs base;
  auto* s_base = app.add_subcommand("baseline", "Classical collision baseline and scaling fit");
  s_base->add_option("--ds", base.ds, "Field sizes")->delimiter(',');
  s_base->add_option("--trials", base.trials, "Trials per size (>= 30)");
  s_base->add_option("--summary", base.summary, "Write the summary JSON here");
  add_common(s_base, true);

  PlanArgs plan;
  auto* s_plan = app.add_subcommand("plan", "Reduction plan as a JSON tree");
  s_plan->add_option("--field", plan.field, "Field p^e")->required();
  s_plan->add_option("--m", plan.m, "Number of variables")->check(CLI::PositiveNumber);
  s_plan->add_option("--n", plan.n, "Degree bound n")->check(CLI::PositiveNumber);
  add_common(s_plan, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    const CLI::Option* opt = sub->get_option_no_throw("--seed");
    if (opt != nullptr && opt->count() > 0) common.seed = seed;
  }

  try {
    if (s_eta->parsed()) cmd_eta(common, eta);
    if (s_suc->parsed()) cmd_success(common, suc);
    if (s_e2e->parsed()) cmd_e2e(common, e2e);
    if (s_base->parsed()) cmd_baseline(common, base);
    if (s_plan->parsed()) cmd_plan(common, plan);
  } catch (const UsageError& e) {
    std::cerr << "hpp: " << e.what() << '\n';
    return kExitUsage;
  } catch (const GuardExceeded& e) {
    std::cerr << "hpp: guard exceeded: " << e.what() << '\n';
    return kExitGuard;
  } catch (const InvariantViolation& e) {
    std::cerr << "hpp: invariant violated: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    std::cerr << "hpp: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "hpp: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
