#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "support/instances.hpp"
#include "support/oracles.hpp"
#include "ttr/approx.hpp"
#include "ttr/collision.hpp"
#include "ttr/examples.hpp"
#include "ttr/petz.hpp"
#include "ttr/random.hpp"

using namespace ttr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fix(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

const std::vector<double>& dt_grid() {
  static const std::vector<double> g = log_grid(1e-3, 1e-1, 12);
  return g;
}

Outcome petz_prior_recovery() {
  Rng rng(1001);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    TTRInstance inst = gen::generic(rng);
    QuantumChannel ch = channel_from_dilation(inst.dilation);
    QuantumChannel p = petz_map(ch, inst.gamma);
    CMatrix back = ttr::apply(p, ttr::apply(ch, inst.gamma.mat()));
    worst = std::max(worst, oracle::herm_trace_norm(back - inst.gamma.mat()));
  }
  return {worst <= 1e-9, "100 instances, max trace-norm error " + sci(worst)};
}

Outcome thermal_reversal() {
  Rng rng(1002);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    Rng local(rng());
    for (double time : {0.01, 0.1, 1.0}) {
      Rng same = local;
      examples::NamedExample ex = gen::thermal(same, time);
      TTRInstance inst = *ex.instance;
      inst.xi_prime = inst.dilation.xi();
      worst = std::max(worst, choi_gap(inst));
    }
  }
  return {worst <= 1e-9, "20 instances x 3 times, max choi_gap " + sci(worst)};
}

Outcome criterion_equivalence() {
  std::vector<std::pair<std::string, TTRInstance>> cases;
  for (const char* name : {"unital-swap", "cx", "xx"}) {
    examples::NamedExample ex = examples::make_named(name);
    TTRInstance inst = *ex.instance;
    inst.xi_prime = *ex.expected.xi_prime;
    cases.emplace_back(name, inst);
  }
  Rng rng(1003);
  const std::vector<std::function<TTRInstance(Rng&)>> makers = {gen::generic, gen::cx, gen::xx, gen::xx_off};
  int random = 0;
  for (int i = 0; random < 100; ++i) {
    TTRInstance inst = makers[static_cast<std::size_t>(i) % makers.size()](rng);
    if (!gen::nondegenerate(inst)) continue;
    cases.emplace_back("random", inst);
    ++random;
  }
  int disagreements = 0, ttr_count = 0;
  for (const auto& [name, inst] : cases) {
    bool by_residual = exact_ttr_residual(inst) <= 1e-9;
    bool by_gap = choi_gap(inst) <= 1e-9;
    if (by_residual != by_gap) ++disagreements;
    if (by_gap) ++ttr_count;
  }
  return {disagreements == 0, std::to_string(cases.size()) + " instances (" + std::to_string(ttr_count) +
                                  " reversible), disagreements " + std::to_string(disagreements)};
}

Outcome feasibility_certification() {
  std::vector<TTRInstance> pool;
  for (const char* name : {"unital-swap", "cx", "xx", "thermal"}) pool.push_back(*examples::make_named(name).instance);
  Rng rng(1004);
  for (int t = 0; t < 4; ++t) pool.push_back(gen::cx(rng));
  for (int t = 0; t < 4; ++t) pool.push_back(gen::generic(rng));
  HermMatrix xi = HermMatrix::symmetrize(0.5 * (identity(2) + 0.3 * pauli_x() + 0.4 * pauli_y() + 0.2 * pauli_z()));
  HermMatrix gamma = HermMatrix::symmetrize(0.5 * (identity(2) - 0.4 * pauli_x()));
  const double tr_x = (xi.mat() * pauli_x()).trace().real();
  std::size_t first_xx = pool.size();
  for (int k = 0; k < 8; ++k) {
    double theta = 0.15 + k * (std::numbers::pi / 2 - 0.2) / 7;
    pool.push_back(*examples::make_xx(theta, xi, gamma).instance);
  }
  double worst_gap = 0, worst_tr = 0;
  int feasible = 0;
  bool ok = true;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    ExactTTRReport rep = feasible_xi_prime(pool[i].dilation, pool[i].gamma);
    if (i >= first_xx && rep.feasible != Verdict::Feasible) ok = false;
    if (rep.feasible != Verdict::Feasible) continue;
    ++feasible;
    if (!rep.witness_xi_prime) {
      ok = false;
      continue;
    }
    TTRInstance w = pool[i];
    w.xi_prime = *rep.witness_xi_prime;
    worst_gap = std::max(worst_gap, choi_gap(w));
    if (i >= first_xx)
      worst_tr = std::max(worst_tr, std::abs((rep.witness_xi_prime->mat() * pauli_x()).trace().real() - tr_x));
  }
  ok = ok && worst_gap <= 1e-9 && worst_tr <= 1e-8;
  return {ok, std::to_string(feasible) + " feasible verdicts, max witness choi_gap " + sci(worst_gap) +
                  ", max |Tr(xi' X) - Tr(xi X)| over 8 angles " + sci(worst_tr)};
}

Outcome product_preservation_strictness() {
  bool ok = true;
  double worst_gap = 0, least_defect = 1e300;
  for (double p : {0.1, 0.3, 0.45, 0.6, 0.9}) {
    for (double r : {0.2, 0.7}) {
      examples::NamedExample ex = examples::make_cx(p, r);
      TTRInstance inst = *ex.instance;
      inst.xi_prime = *ex.expected.xi_prime;
      ProductPreservation pp = product_preservation_check(inst.dilation, inst.gamma);
      double gap = choi_gap(inst);
      worst_gap = std::max(worst_gap, gap);
      least_defect = std::min(least_defect, pp.defect);
      ok = ok && !pp.preserved && gap <= 1e-9;
    }
  }
  return {ok, "10 controlled-X instances, max choi_gap " + sci(worst_gap) + ", min product defect " +
                  sci(least_defect)};
}

Outcome first_order_scaling() {
  Rng rng(1006);
  HermMatrix gamma = maximally_mixed(2);
  double lo = 1e9, hi = -1e9, r2 = 1.0, res = 0;
  bool ok = true;
  for (int t = 0; t < 10; ++t) {
    HamiltonianDilation hd{2, 2, random_hermitian(4, rng), random_density_mixed(2, 0.3, rng), 1.0};
    double r = first_order_residual(hd, gamma, hd.xi).max();
    res = std::max(res, r);
    if (r > 1e-9) ok = false;
    SlopeFit f = scaling_exponent(mismatch_grid(hd, gamma, hd.xi, dt_grid()));
    lo = std::min(lo, f.slope);
    hi = std::max(hi, f.slope);
    r2 = std::min(r2, f.r2);
  }
  ok = ok && lo >= 1.9 && hi <= 2.1 && r2 >= 0.999;
  return {ok, "10 instances, max first-order residual " + sci(res) + ", slopes [" + fix(lo) + ", " + fix(hi) +
                  "], min R^2 " + fix(r2)};
}

Outcome second_order_scaling() {
  struct Case {
    HamiltonianDilation hd;
    HermMatrix gamma;
    HermMatrix xi_prime;
  };
  std::vector<Case> cases;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    examples::NamedExample ex = examples::make_block_dephasing(seed);
    OrderWitness w = solve_order_xi_prime(*ex.hamiltonian, ex.gamma, 2);
    if (!w.feasible) continue;
    cases.push_back({*ex.hamiltonian, ex.gamma, w.xi_prime});
  }
  Rng rng(1007);
  for (int t = 0; t < 3; ++t) {
    examples::NamedExample ex = gen::thermal(rng, 1.0);
    cases.push_back({*ex.hamiltonian, ex.gamma, ex.instance->dilation.xi()});
  }
  int used = 0, at_floor = 0;
  double lo = 1e9;
  bool ok = true;
  for (const Case& c : cases) {
    double r1 = first_order_residual(c.hd, c.gamma, c.xi_prime).max();
    double r2 = second_order_residual(c.hd, c.gamma, c.xi_prime, SecondOrderMode::General);
    if (std::max(r1, r2) > 1e-9) continue;
    ++used;
    auto grid = mismatch_grid(c.hd, c.gamma, c.xi_prime, dt_grid());
    bool floor = std::all_of(grid.begin(), grid.end(), [](const auto& p) { return p.second <= 1e-12; });
    if (floor) {
      ++at_floor;
      continue;
    }
    double slope = scaling_exponent(grid).slope;
    lo = std::min(lo, slope);
    if (slope < 2.9) ok = false;
  }
  ok = ok && used > at_floor;
  return {ok, std::to_string(used) + " instances passing both conditions, " + std::to_string(at_floor) +
                  " at floor, min slope " + (used > at_floor ? fix(lo) : std::string("n/a"))};
}

Outcome generator_approximation() {
  Rng rng(1008);
  double lo = 1e9, hi = -1e9;
  for (int t = 0; t < 10; ++t) {
    CollisionSpec cs = gen::collision(rng, 2, t % 2 ? 3 : 2);
    HermMatrix g = gen::prior(rng, 2);
    std::vector<std::pair<double, double>> pts;
    for (double dt : dt_grid()) pts.emplace_back(dt, lemma1_gap(cs, g, dt));
    double s = scaling_exponent(pts).slope;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  double steady = 0;
  for (double beta : {0.3, 1.0, 2.0}) {
    examples::NamedExample th = examples::make_collision_thermal(beta, 1.0, 0.5);
    for (double dt : dt_grid()) steady = std::max(steady, lemma1_gap(*th.collision, th.gamma, dt));
  }
  bool ok = lo >= 1.9 && hi <= 2.1 && steady <= 1e-10;
  return {ok, "10 non-steady slopes [" + fix(lo) + ", " + fix(hi) + "], steady max gap " + sci(steady)};
}

Outcome b_matrix_and_correction() {
  Rng rng(1009);
  double b = 0;
  for (int t = 0; t < 50; ++t) {
    CollisionSpec cs = gen::collision(rng, 2, t % 2 ? 3 : 2);
    b = std::max(b, petz_generator_b_matrix(cs, gen::prior(rng, 2)).cwiseAbs().maxCoeff());
  }
  double hc = 0, balance = 0;
  for (int t = 0; t < 10; ++t) {
    examples::NamedExample th = examples::make_collision_thermal(
        oracle::uniform(rng, 0.2, 2.0), oracle::uniform(rng, 0.5, 1.5), oracle::uniform(rng, 0.1, 1.0));
    balance = std::max(balance, detailed_balance_defect(*th.collision, th.gamma));
    hc = std::max(hc, correction_hamiltonian(th.gamma, forward_generator(*th.collision).jumps()).mat().norm());
  }
  bool ok = b <= 1e-9 && balance <= 1e-9 && hc <= 1e-10;
  return {ok, "max |B| entry over 50 instances " + sci(b) + "; 10 thermal instances (detailed-balance defect " + sci(balance) +
                  "), max ||H_C||_F " + sci(hc)};
}

Outcome sequential_sweep() {
  examples::NamedExample ex = examples::make_named("collision-qutrit");
  GeneratorMatchResidual violating = theorem4_check(*ex.collision, ex.gamma, ex.collision->xi);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t n : {4u, 8u, 16u, 32u, 64u})
    pts.emplace_back(static_cast<double>(n),
                     sequential_reverse(*ex.collision, ex.gamma, solve_policy(*ex.collision), 1.0, n).total_gap);
  SlopeFit f = fit_loglog(pts, 1e-13, 5);
  bool ok = violating.dissipator > 1e-3 && f.slope >= -1.15 && f.slope <= -0.85;
  return {ok, "constant ancilla dissipator residual " + sci(violating.dissipator) + ", corrected sweep slope " +
                  fix(f.slope)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& exe) {
  if (exe.empty()) return {false, "no CLI path given"};
  fs::path dir = fs::temp_directory_path() / ("ttr_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };
  const std::string bin = q(exe);
  int failures = 0, compared = 0;
  for (const char* name : {"cx", "xx", "thermal", "collision-thermal", "collision-qutrit", "block-dephasing"}) {
    if (std::system((bin + " example " + name + " --emit-spec --out " + q(dir / (std::string(name) + ".json"))).c_str()) != 0)
      ++failures;
  }
  const std::vector<std::string> commands = {
      "check-exact " + q(dir / "cx.json"),
      "check-exact " + q(dir / "xx.json") + " --dt 0.7",
      "approx " + q(dir / "block-dephasing.json") + " --order 2 --xi-prime solve --csv {csv}",
      "approx " + q(dir / "thermal.json") + " --order 1 --csv {csv}",
      "collision " + q(dir / "collision-qutrit.json") + " --N 4,8,16 --xi-policy solve --csv {csv}",
      "collision " + q(dir / "collision-thermal.json") + " --N 12 --dt-dist exponential --seed 17 --csv {csv}",
  };
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::string outs[2], csvs[2];
    for (int rep = 0; rep < 2; ++rep) {
      fs::path out = dir / ("out" + std::to_string(i) + "_" + std::to_string(rep) + ".json");
      fs::path csv = dir / ("out" + std::to_string(i) + "_" + std::to_string(rep) + ".csv");
      std::string cmd = commands[i];
      if (auto pos = cmd.find("{csv}"); pos != std::string::npos) cmd.replace(pos, 5, q(csv));
      int rc = std::system((bin + " " + cmd + " --out " + q(out)).c_str());
      if (rc == -1) ++failures;
      outs[rep] = slurp(out);
      csvs[rep] = slurp(csv);
    }
    ++compared;
    if (outs[0].empty() || outs[0] != outs[1] || csvs[0] != csvs[1]) ++failures;
  }
  fs::remove_all(dir);
  return {failures == 0, std::to_string(compared) + " invocations repeated, mismatches " + std::to_string(failures)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string exe = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"petz prior recovery", petz_prior_recovery},
      {"thermal reversal", thermal_reversal},
      {"exact criterion equals Choi equality", criterion_equivalence},
      {"feasibility witnesses certified", feasibility_certification},
      {"product preservation is not necessary", product_preservation_strictness},
      {"first-order mismatch scaling", first_order_scaling},
      {"second-order mismatch scaling", second_order_scaling},
      {"Petz generator approximation", generator_approximation},
      {"B matrix and correction Hamiltonian vanish", b_matrix_and_correction},
      {"sequential reversal error O(1/N)", sequential_sweep},
      {"CLI determinism", [&] { return determinism(exe); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
