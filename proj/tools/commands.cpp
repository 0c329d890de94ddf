#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ttr/examples.hpp"
#include "ttr/specfile.hpp"

namespace ttr::cli {

namespace {

using nlohmann::json;

struct Common {
  std::string spec_path;
  std::string out_path;
  std::optional<double> tol;
  bool timing = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SpecFile load_spec(const std::string& path) {
  std::string text = read_file(path);
  try {
    return parse_spec(text);
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

NumericPolicy resolve_policy(const SpecFile& spec, const std::optional<double>& tol) {
  NumericPolicy pol;
  if (const char* env = std::getenv("TTR_POLICY_FILE"); env && *env) {
    json doc;
    try {
      doc = json::parse(read_file(env));
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string(env) + ": malformed JSON: " + e.what());
    }
    pol = apply_policy_overrides(pol, doc);
  }
  pol = apply_policy_overrides(pol, spec.policy_overrides);
  if (tol) {
    if (!(*tol > 0)) throw SchemaError("--tol must be positive");
    pol.equality_tol = *tol;
  }
  return pol;
}

json header(const std::string& command, const json& args, const SpecFile& spec, const NumericPolicy& pol) {
  return {{"tool", "ttr"},
          {"version", kVersion},
          {"command", command},
          {"args", args},
          {"policy", policy_to_json(pol)},
          {"spec", spec_to_json(spec)}};
}

void emit(const json& report, const Common& c, std::ostream& out) {
  std::string text = report.dump(2) + "\n";
  if (c.out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(c.out_path, std::ios::binary);
    if (!f) throw SchemaError("cannot write " + c.out_path);
    f << text;
  }
}

void write_csv(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SchemaError("cannot write " + path);
  f << body;
}

json common_args(const Common& c) {
  json a = {{"spec", c.spec_path}};
  if (c.tol) a["tol"] = *c.tol;
  return a;
}

// check-exact

struct CheckExactOpts {
  Common c;
  std::optional<double> dt;
};

int check_exact(const CheckExactOpts& o, std::ostream& out) {
  SpecFile spec = load_spec(o.c.spec_path);
  NumericPolicy pol = resolve_policy(spec, o.c.tol);
  json args = common_args(o.c);
  if (o.dt) args["dt"] = *o.dt;
  if (!spec.unitary && !o.dt) throw SchemaError(o.c.spec_path + ": a Hamiltonian spec needs --dt");
  Dilation dil = spec.dilation(o.dt);
  TTRInstance inst{dil, spec.gamma, spec.xi_prime};
  validate_instance(inst, pol);

  json res;
  int code = kExitUndetermined;
  std::string verdict;
  if (spec.xi_prime) {
    res["xi_prime_source"] = "spec";
    bool degenerate = degenerate_spectra(inst, pol);
    double gap = choi_gap(inst, pol);
    res["theorem1_residual"] = exact_ttr_residual(inst, pol);
    res["residual_advisory"] = degenerate;
    res["choi_gap"] = gap;
    res["bayes_residual"] = bayes_residual(inst, pol);
    res["degenerate_spectra"] = degenerate;
    code = gap <= pol.equality_tol ? kExitTtr : kExitNotTtr;
  } else {
    res["xi_prime_source"] = "solved";
    ExactTTRReport rep = feasible_xi_prime(dil, spec.gamma, pol);
    json f = {{"verdict", to_string(rep.feasible)},
              {"least_squares_residual", rep.ls_residual},
              {"best_min_eigenvalue", rep.best_min_eig},
              {"nullity", rep.nullity},
              {"iterations", rep.iterations}};
    if (rep.witness_xi_prime) {
      f["witness_xi_prime"] = matrix_to_json(rep.witness_xi_prime->mat());
      TTRInstance w{dil, spec.gamma, rep.witness_xi_prime};
      res["bayes_residual"] = bayes_residual(w, pol);
    }
    res["feasibility"] = f;
    if (rep.theorem1_residual) res["theorem1_residual"] = *rep.theorem1_residual;
    res["residual_advisory"] = rep.degenerate_spectra_flag;
    res["choi_gap"] = rep.choi_gap;
    res["degenerate_spectra"] = rep.degenerate_spectra_flag;
    code = rep.feasible == Verdict::Feasible     ? kExitTtr
           : rep.feasible == Verdict::Infeasible ? kExitNotTtr
                                                 : kExitUndetermined;
  }
  ProductPreservation pp = product_preservation_check(dil, spec.gamma, pol);
  res["product_preservation"] = {{"preserved", pp.preserved},
                                 {"defect", pp.defect},
                                 {"gamma_out", matrix_to_json(pp.gamma_out.mat())},
                                 {"xi_out", matrix_to_json(pp.xi_out.mat())}};
  verdict = code == kExitTtr ? "ttr" : code == kExitNotTtr ? "not_ttr" : "undetermined";

  json report = header("check-exact", args, spec, pol);
  report["verdict"] = verdict;
  report["results"] = res;
  emit(report, o.c, out);
  return code;
}

// approx

struct ApproxOpts {
  Common c;
  int order = 1;
  double dt_min = 1e-3;
  double dt_max = 1e-1;
  int points = 12;
  std::string mode = "general";
  std::string xi_prime = "spec";
  std::string csv_path;
};

int approx(const ApproxOpts& o, std::ostream& out) {
  if (o.points < 6) throw FitError("fit error: --points must be at least 6 (got " + std::to_string(o.points) + ")");
  SpecFile spec = load_spec(o.c.spec_path);
  NumericPolicy pol = resolve_policy(spec, o.c.tol);
  if (!spec.has_hamiltonian()) throw SchemaError(o.c.spec_path + ": approx needs a Hamiltonian spec");
  SecondOrderMode mode = parse_mode(o.mode);
  HamiltonianDilation hd = spec.hamiltonian_dilation();
  HermMatrix xp = spec.xi_prime.value_or(spec.xi);
  json solved;
  if (o.xi_prime == "solve") {
    OrderWitness w = solve_order_xi_prime(hd, spec.gamma, o.order, mode, pol);
    xp = w.xi_prime;
    solved = {{"feasible", w.feasible}, {"residual", w.residual}, {"min_eigenvalue", w.min_eig}};
  }

  json args = common_args(o.c);
  args["order"] = o.order;
  args["dt_min"] = o.dt_min;
  args["dt_max"] = o.dt_max;
  args["points"] = o.points;
  args["mode"] = o.mode;
  args["xi_prime"] = o.xi_prime;

  FirstOrderResidual r1 = first_order_residual(hd, spec.gamma, xp, pol);
  json residuals = {{"first_order_line1", r1.line1}, {"first_order_line2", r1.line2}};
  double worst = r1.max();
  if (o.order == 2) {
    double r2 = second_order_residual(hd, spec.gamma, xp, mode, pol);
    residuals["second_order"] = r2;
    worst = std::max(worst, r2);
  }

  auto grid = mismatch_grid(hd, spec.gamma, xp, log_grid(o.dt_min, o.dt_max, o.points), pol);
  json mism = json::array();
  std::string csv = "dt,mismatch\n";
  bool all_floor = true;
  for (const auto& [dt, v] : grid) {
    mism.push_back({dt, v});
    csv += fmt(dt) + "," + fmt(v) + "\n";
    if (v > 1e-13) all_floor = false;
  }
  json slope;
  if (all_floor) {
    slope = {{"status", "floor"}};
  } else {
    try {
      SlopeFit f = scaling_exponent(grid);
      slope = {{"status", "fit"}, {"slope", f.slope}, {"r2", f.r2}, {"points_used", f.used}};
    } catch (const FitError& e) {
      slope = {{"status", "insufficient"}, {"message", e.what()}};
    }
  }
  if (!o.csv_path.empty()) write_csv(o.csv_path, csv);

  json report = header("approx", args, spec, pol);
  report["verdict"] = worst <= pol.equality_tol ? "conditions_hold" : "conditions_violated";
  report["results"] = {{"xi_prime", matrix_to_json(xp.mat())},
                       {"residuals", residuals},
                       {"mismatch", mism},
                       {"slope_fit", slope}};
  if (!solved.is_null()) report["results"]["xi_prime_solve"] = solved;
  emit(report, o.c, out);
  return worst <= pol.equality_tol ? kExitTtr : kExitNotTtr;
}

// collision

struct CollisionOpts {
  Common c;
  double total_time = 1.0;
  std::string steps = "16";
  std::string xi_policy = "constant";
  std::uint64_t seed = 0;
  std::string dt_dist = "fixed";
  std::string csv_path;
};

std::vector<std::size_t> parse_steps(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw SchemaError("--N expects positive integers separated by commas, got \"" + s + "\"");
    }
  }
  if (out.empty()) throw SchemaError("--N is empty");
  return out;
}

int collision(const CollisionOpts& o, std::ostream& out, std::ostream& err) {
  std::vector<std::size_t> ns = parse_steps(o.steps);
  if (!(o.total_time > 0)) throw SchemaError("--T must be positive");
  SpecFile spec = load_spec(o.c.spec_path);
  NumericPolicy pol = resolve_policy(spec, o.c.tol);
  CollisionSpec cs = spec.collision_spec();
  for (const auto& w : cs.warnings()) err << "warning: " << w << "\n";
  DtDistribution dist = o.dt_dist == "exponential" ? DtDistribution::Exponential : DtDistribution::Fixed;

  XiPrimePolicy policy = o.xi_policy == "solve" ? solve_policy(cs, pol)
                                                : constant_policy(spec.xi_prime.value_or(spec.xi));

  std::vector<std::future<SequentialRun>> jobs;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    std::vector<double> dts = sample_dts(o.total_time, ns[i], dist, o.seed + i);
    jobs.push_back(std::async(std::launch::async, [&, dts] {
      return sequential_reverse(cs, spec.gamma, policy, dts, pol);
    }));
  }
  std::vector<SequentialRun> runs;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      runs.push_back(jobs[i].get());
    } catch (const TrajectoryRankError& e) {
      for (std::size_t k = i + 1; k < jobs.size(); ++k) jobs[k].wait();
      throw TrajectoryRankError("N = " + std::to_string(ns[i]) + ": " + e.what(), e.eigenvalue(), e.step());
    }
  }

  const bool sweep = ns.size() > 1;
  std::string csv = sweep ? "N,step,dt,per_step_gap,cumulative_gap,min_eig_prior\n"
                          : "step,dt,per_step_gap,cumulative_gap,min_eig_prior\n";
  json jruns = json::array();
  std::vector<std::pair<double, double>> sweep_pts;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const SequentialRun& r = runs[i];
    for (std::size_t n = 0; n < r.steps; ++n) {
      if (sweep) csv += std::to_string(ns[i]) + ",";
      csv += std::to_string(n + 1) + "," + fmt(r.dts[n]) + "," + fmt(r.per_step_gaps[n]) + "," +
             fmt(r.cumulative_gaps[n]) + "," + fmt(r.min_eig_prior[n]) + "\n";
    }
    jruns.push_back({{"N", r.steps},
                     {"T", r.total_time},
                     {"total_gap", r.total_gap},
                     {"dts", r.dts},
                     {"per_step_gaps", r.per_step_gaps},
                     {"cumulative_gaps", r.cumulative_gaps},
                     {"min_eig_prior", r.min_eig_prior},
                     {"final_prior", matrix_to_json(r.prior_trajectory.back().mat())},
                     {"final_xi_prime", matrix_to_json(r.xi_primes.back().mat())}});
    sweep_pts.emplace_back(static_cast<double>(r.steps), r.total_gap);
  }
  if (!o.csv_path.empty()) write_csv(o.csv_path, csv);

  json args = common_args(o.c);
  args["T"] = o.total_time;
  args["N"] = o.steps;
  args["xi_policy"] = o.xi_policy;
  args["seed"] = o.seed;
  args["dt_dist"] = o.dt_dist;
  json report = header("collision", args, spec, pol);
  report["results"] = {{"runs", jruns}};
  if (sweep) {
    try {
      SlopeFit f = fit_loglog(sweep_pts, 1e-13, 2);
      report["results"]["sweep_fit"] = {{"status", "fit"}, {"slope", f.slope}, {"r2", f.r2}};
    } catch (const FitError&) {
      report["results"]["sweep_fit"] = {{"status", "floor"}};
    }
  }
  emit(report, o.c, out);
  return 0;
}

// example

int example(const std::string& name, bool emit_spec, const std::string& out_path, std::ostream& out) {
  if (name == "list") {
    for (const auto& n : examples::example_names()) out << n << "\n";
    return 0;
  }
  examples::NamedExample ex = examples::make_named(name);
  if (!emit_spec) {
    json summary = {{"name", ex.name}};
    if (ex.expected.exact_ttr) summary["expected_exact_ttr"] = *ex.expected.exact_ttr;
    if (ex.expected.product_preserving) summary["expected_product_preserving"] = *ex.expected.product_preserving;
    out << summary.dump(2) << "\n";
    return 0;
  }
  Common c;
  c.out_path = out_path;
  emit(spec_to_json(examples::to_spec_file(ex)), c, out);
  return 0;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("spec", c.spec_path, "Spec file (JSON)")->required();
  sub->add_option("--out", c.out_path, "Write the report here instead of stdout");
  sub->add_option("--tol", c.tol, "Equality tolerance");
  sub->add_flag("--timing", c.timing, "Print wall time to stderr");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Petz recovery versus tabletop reversal checks", "ttr"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CheckExactOpts ce;
  auto* s_exact = app.add_subcommand("check-exact", "Exact tabletop time-reversibility");
  add_common(s_exact, ce.c);
  s_exact->add_option("--dt", ce.dt, "Evolution time for Hamiltonian specs");

  ApproxOpts ap;
  auto* s_approx = app.add_subcommand("approx", "First/second-order matching and mismatch scaling");
  add_common(s_approx, ap.c);
  s_approx->add_option("--order", ap.order, "Matching order")->check(CLI::IsMember({1, 2}));
  s_approx->add_option("--dt-min", ap.dt_min)->check(CLI::PositiveNumber);
  s_approx->add_option("--dt-max", ap.dt_max)->check(CLI::PositiveNumber);
  s_approx->add_option("--points", ap.points);
  s_approx->add_option("--mode", ap.mode)->check(CLI::IsMember({"general", "steady_commuting", "maximally_mixed"}));
  s_approx->add_option("--xi-prime", ap.xi_prime, "Use the spec ancilla or solve the order conditions")
      ->check(CLI::IsMember({"spec", "solve"}));
  s_approx->add_option("--csv", ap.csv_path, "Write (dt, mismatch) rows here");

  CollisionOpts co;
  auto* s_coll = app.add_subcommand("collision", "Sequential reversal of a collision model");
  add_common(s_coll, co.c);
  s_coll->add_option("--T", co.total_time, "Total evolution time");
  s_coll->add_option("--N", co.steps, "Step count, or a comma list for a sweep");
  s_coll->add_option("--xi-policy", co.xi_policy)->check(CLI::IsMember({"constant", "solve"}));
  s_coll->add_option("--seed", co.seed, "Seed for random step lengths");
  s_coll->add_option("--dt-dist", co.dt_dist)->check(CLI::IsMember({"fixed", "exponential"}));
  s_coll->add_option("--csv", co.csv_path, "Write per-step rows here");

  std::string ex_name;
  bool ex_emit = false;
  std::string ex_out;
  auto* s_ex = app.add_subcommand("example", "Built-in examples (`example list` names them)");
  s_ex->add_option("name", ex_name)->required();
  s_ex->add_flag("--emit-spec", ex_emit, "Print the example as a spec file");
  s_ex->add_option("--out", ex_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  auto start = std::chrono::steady_clock::now();
  int code = 0;
  bool timing = false;
  try {
    if (*s_exact) {
      timing = ce.c.timing;
      code = check_exact(ce, out);
    } else if (*s_approx) {
      timing = ap.c.timing;
      code = approx(ap, out);
    } else if (*s_coll) {
      timing = co.c.timing;
      code = collision(co, out, err);
    } else {
      code = example(ex_name, ex_emit, ex_out, out);
    }
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FitError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TrajectoryRankError& e) {
    err << "error: " << e.what() << "\n";
    return kExitRank;
  } catch (const RankError& e) {
    err << "error: " << e.what() << "\n";
    return kExitRank;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  if (timing) {
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << "wall time: " << secs << " s\n";
  }
  return code;
}

}  // namespace ttr::cli
