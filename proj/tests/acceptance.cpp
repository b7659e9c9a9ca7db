// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rgtl/rgtl.hpp"
#include "support.hpp"

using namespace rgtl;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * (1.0 + std::abs(b)); }

SolveResult exact(const Instance& inst, Approach a, RobustMode m, RobustForm f = RobustForm::aggregated) {
  return solve_milp(build_model(inst, a, m, f).model);
}

// Shared between criteria 3 and 4.
std::vector<LdReport> g_family_reports;

Outcome gap_fixture() {
  const double a = compute_gap(7258546.335, 7252045.364);
  const double b = compute_gap(12691067, 12690733);
  const bool ok = std::abs(a - 0.089563) <= 1e-5 && std::abs(b - 0.00263) <= 1e-4;
  return {ok, fmt("gaps %.6f", a) + fmt(" and %.6f", b)};
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::size_t cases = 0, agree = 0;
  std::string first_miss;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance inst = support::random_small_instance(seed);
    for (auto a : {Approach::hybrid_purchase, Approach::chance_constrained})
      for (auto m : {RobustMode::deterministic, RobustMode::robust}) {
        ++cases;
        const auto o = oracle::brute_force_solve(inst, a, m);
        const auto r = exact(inst, a, m);
        if (r.optimal() && close(r.objective_value, o.objective, 1e-6)) {
          ++agree;
        } else if (first_miss.empty()) {
          first_miss = " first mismatch: seed " + std::to_string(seed);
        }
      }
  }
  const double secs = since(t0);
  return {agree == cases && secs < 60.0,
          std::to_string(agree) + "/" + std::to_string(cases) + " agree" + fmt(" in %.1f s", secs) + first_miss};
}

Outcome weak_duality_and_gap() {
  const auto t0 = Clock::now();
  const auto family = generate_family(1, {3, 5, 2, 2}, 10, 0.05);
  std::size_t valid = 0, under = 0;
  std::string gaps;
  for (const auto& inst : family) {
    const auto r = exact(inst, Approach::hybrid_purchase, RobustMode::deterministic);
    const auto rep = run_ld(inst, Approach::hybrid_purchase, RobustMode::deterministic);
    g_family_reports.push_back(rep);
    if (!r.optimal()) continue;
    if (rep.bound <= r.objective_value + 1e-6 * (1 + std::abs(r.objective_value))) ++valid;
    const double g = compute_gap(r.objective_value, rep.bound);
    if (g < 1.0) ++under;
    gaps += (gaps.empty() ? "" : " ") + fmt("%.2f", g);
  }
  const double secs = since(t0);
  return {valid == 10 && under >= 9 && secs < 300.0,
          "bound <= optimum on " + std::to_string(valid) + "/10, gap < 1% on " + std::to_string(under) +
              "/10 (gaps %: " + gaps + ")" + fmt(", %.1f s", secs)};
}

Outcome bound_monotonicity() {
  std::size_t good = 0;
  for (const auto& rep : g_family_reports) {
    bool ok = true;
    for (std::size_t k = 1; k < rep.history.size(); ++k) {
      ok = ok && rep.history[k].z_lb >= rep.history[k - 1].z_lb && rep.history[k].z_up <= rep.history[k - 1].z_up;
    }
    if (rep.converged) ok = ok && rep.z_up - rep.bound < ld_tolerance(1e-6, rep.bound);
    good += ok;
  }
  const std::size_t n = g_family_reports.size();
  return {n == 10 && good == n, std::to_string(good) + "/" + std::to_string(n) + " runs monotone"};
}

Outcome robust_consistency() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dev(0, 50), gam(0, 2), w(1, 200), dem(0, 300);
  std::size_t cell_ok = 0;
  for (int k = 0; k < 200; ++k) {
    Instance inst = make_zero_instance({1, 1, 1, 1});
    inst.truck_capacity(0, 0) = inst.origin_capacity(0, 0) = 1000;
    inst.transport_cost(0, 0, 0, 0) = 1;
    inst.shortage_penalty(0, 0) = w(rng);
    inst.nominal_demand(0, 0) = dem(rng);
    inst.robust.dev_plus(0, 0) = dev(rng);
    inst.robust.dev_minus(0, 0) = std::min(dev(rng), inst.nominal_demand(0, 0));
    inst.robust.budget(0, 0) = gam(rng);
    inst.chance.threshold(0, 0) = 1;
    auto b = build_model(inst, Approach::hybrid_purchase, RobustMode::robust);
    b.model.variable(b.vars.x(0, 0, 0, 0)).upper = 0;  // no flow: v carries D plus protection
    const auto r = solve_milp(b.model);
    if (!r.optimal()) continue;
    const double wv = inst.shortage_penalty(0, 0);
    const double in_model = r.primal_values[b.vars.v()] - wv * inst.nominal_demand(0, 0);
    const double dual = wv * (r.primal_values[b.vars.alpha1(0, 0)] +
                              inst.robust.budget(0, 0) * r.primal_values[b.vars.mu(0, 0)]);
    const double want = oracle::protection_oracle(inst.robust.dev_plus(0, 0), inst.robust.dev_minus(0, 0),
                                                  inst.robust.budget(0, 0), wv);
    if (std::abs(in_model - want) <= 1e-8 * (1 + want) && std::abs(dual - want) <= 1e-8 * (1 + want)) ++cell_ok;
  }

  std::size_t dominated = 0, checked_equal = 0, equal = 0;
  const std::size_t n = 30;
  for (std::uint64_t seed = 1; seed <= n; ++seed) {
    Instance inst = support::random_small_instance(1000 + seed);
    for (double& g : inst.robust.budget.flat()) g = 0;
    const auto det = exact(inst, Approach::hybrid_purchase, RobustMode::deterministic);
    const auto rob = exact(inst, Approach::hybrid_purchase, RobustMode::robust);
    if (!det.optimal() || !rob.optimal()) continue;
    if (rob.objective_value <= det.objective_value + 1e-6 * (1 + std::abs(det.objective_value))) ++dominated;
    const auto o = oracle::brute_force_solve(inst, Approach::hybrid_purchase, RobustMode::robust);
    bool offsets = false;
    for (std::size_t j = 0; j < inst.dims.destinations; ++j)
      for (std::size_t l = 0; l < inst.dims.products; ++l)
        offsets = offsets || delivered(o.assignment, j, l) > inst.nominal_demand(j, l) + 1e-7;
    if (!offsets) {
      ++checked_equal;
      equal += close(rob.objective_value, det.objective_value, 1e-6);
    }
  }
  const double secs = since(t0);
  return {cell_ok == 200 && dominated == n && equal == checked_equal && secs < 30.0,
          std::to_string(cell_ok) + "/200 cells match; robust <= deterministic on " + std::to_string(dominated) +
              "/" + std::to_string(n) + "; equal on " + std::to_string(equal) + "/" +
              std::to_string(checked_equal) + " without offsetting" + fmt(", %.1f s", secs)};
}

Outcome chance_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> mean(0, 15), var(0, 9), td(0, 60), zq(-3, 3);
  std::size_t links = 0, links_ok = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t P = 1 + trial % 6;
    Instance inst = make_zero_instance({1, 3, P, 1});
    for (double& e : inst.chance.emission_mean.flat()) e = std::round(mean(rng) * 10) / 10;
    for (double& v : inst.chance.emission_var.flat()) v = std::round(var(rng) * 10) / 10;
    for (double& t : inst.chance.threshold.flat()) t = std::round(td(rng));
    inst.chance.quantile = trial % 3 == 0 ? 3.0 : trial % 3 == 1 ? -3.0 : zq(rng);
    const auto cuts = linearize_chance_constraints(inst);
    for (std::size_t j = 0; j < 3; ++j) {
      ++links;
      bool ok = true;
      for (unsigned mask = 0; mask < (1u << P); ++mask) {
        std::vector<int> y(P);
        for (std::size_t p = 0; p < P; ++p) y[p] = (mask >> p) & 1u;
        bool cut_ok = true;
        for (const auto& c : cuts)
          if (c.destination == j) cut_ok = cut_ok && c.satisfied_by(y);
        ok = ok && cut_ok == oracle::chance_feasible(y, 0, j, inst.chance);
      }
      links_ok += ok;
    }
  }
  std::size_t ordered = 0;
  const std::size_t n = 10;
  for (std::uint64_t seed = 1; seed <= n; ++seed) {
    Instance hi = generate_family(seed, {2, 3, 3, 1}, 1, 0.05)[0];
    Instance lo = hi;
    hi.chance.quantile = 3;
    lo.chance.quantile = -3;
    const auto a = exact(hi, Approach::chance_constrained, RobustMode::deterministic);
    const auto b = exact(lo, Approach::chance_constrained, RobustMode::deterministic);
    if (a.optimal() && b.optimal() && a.objective_value >= b.objective_value - 1e-6 * (1 + std::abs(b.objective_value)))
      ++ordered;
  }
  const double secs = since(t0);
  return {links_ok == links && ordered == n && secs < 60.0,
          std::to_string(links_ok) + "/" + std::to_string(links) + " links agree; Z ordering holds on " +
              std::to_string(ordered) + "/" + std::to_string(n) + fmt(", %.1f s", secs)};
}

LinearModel beale() {
  LinearModel m;
  for (const char* n : {"x4", "x5", "x6", "x7"}) m.add_variable(n, 0, kInf);
  m.set_objective_coef(0, -0.75);
  m.set_objective_coef(1, 150);
  m.set_objective_coef(2, -0.02);
  m.set_objective_coef(3, 6);
  m.add_constraint("r1", {{0, 0.25}, {1, -60}, {2, -0.04}, {3, 9}}, RowSense::less_equal, 0);
  m.add_constraint("r2", {{0, 0.5}, {1, -90}, {2, -0.02}, {3, 3}}, RowSense::less_equal, 0);
  m.add_constraint("r3", {{2, 1}}, RowSense::less_equal, 1);
  return m;
}

Outcome lp_soundness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(7);
  std::size_t ok = 0;
  for (int k = 0; k < 500; ++k) {
    const LinearModel lp = support::random_feasible_lp(rng, 15);
    const auto r = solve_lp(lp);
    if (!r.optimal()) continue;
    const bool feas = lp.max_scaled_violation(r.primal_values) <= 1e-7;
    const bool dual = std::abs(support::dual_objective(lp, r.dual_values) - r.objective_value) <=
                      1e-6 * (1 + std::abs(r.objective_value));
    ok += feas && dual;
  }
  bool cycling = true;
  for (std::size_t bland_after : {std::size_t{0}, std::size_t{1000}}) {
    LpOptions opt;
    opt.bland_after = bland_after;
    const auto r = solve_lp(beale(), opt);
    cycling = cycling && r.optimal() && std::abs(r.objective_value + 0.05) <= 1e-9;
  }
  const double secs = since(t0);
  return {ok == 500 && cycling && secs < 60.0,
          std::to_string(ok) + "/500 LPs sound; cycling example " + (cycling ? "terminates" : "FAILS") +
              fmt(", %.1f s", secs)};
}

// Best of three wall times, each covering model construction and solve.
double best_time(const std::function<void()>& f) {
  double best = kInf;
  for (int k = 0; k < 3; ++k) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, since(t0));
  }
  return best;
}

Outcome relative_speed() {
  const auto family = generate_family(1, {3, 5, 2, 2}, 10, 0.05);
  std::vector<double> milp, ld;
  for (const auto& inst : family) {
    milp.push_back(best_time([&] { exact(inst, Approach::chance_constrained, RobustMode::robust); }));
    ld.push_back(best_time([&] { run_ld(inst, Approach::chance_constrained, RobustMode::robust); }));
  }
  const double mm = support::median(milp), ml = support::median(ld);
  return {ml < mm, fmt("median run_ld %.4f s", ml) + fmt(" vs solve_milp %.4f s", mm)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 gap formula fixture", gap_fixture},
      {"2 oracle equivalence", oracle_equivalence},
      {"3 weak duality and gap target", weak_duality_and_gap},
      {"4 bound monotonicity", bound_monotonicity},
      {"5 robust consistency", robust_consistency},
      {"6 chance equivalence and ordering", chance_equivalence},
      {"7 LP core soundness", lp_soundness},
      {"8 relative speed", relative_speed},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
