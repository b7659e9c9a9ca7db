#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rgtl/branch_and_bound.hpp"
#include "rgtl/formulation.hpp"
#include "rgtl/instance.hpp"
#include "rgtl/lp_model.hpp"
#include "rgtl/simplex.hpp"

namespace rgtl {

// One multiplier per relaxed truck-capacity row, indexed [i][j][p].
using Multipliers = Tensor<3>;

inline Multipliers zero_multipliers(const Dimensions& d) {
  return Multipliers({d.origins, d.destinations, d.trucks});
}

// Link-side solution: theta <= sum (c - lambda B) y_hat + sum cbc nc_hat.
struct ThetaCut {
  Tensor<3> y;
  Tensor<1> nc;
};

// Flow-side solution: eta <= sum (q + lambda) x_hat + sum h z_hat + penalty.
// The penalty is the stored robust v (robust mode) or sum w u (otherwise).
struct EtaCut {
  Tensor<4> x;
  Tensor<2> z;
  double penalty = 0.0;
};

using Cut = std::variant<ThetaCut, EtaCut>;

class LagrangianError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double theta_rhs(const ThetaCut& cut, const Instance& inst, const Multipliers& lambda,
                        Approach approach) {
  const auto& d = inst.dims;
  double total = 0.0;
  for (std::size_t i = 0; i < d.origins; ++i)
    for (std::size_t j = 0; j < d.destinations; ++j)
      for (std::size_t p = 0; p < d.trucks; ++p)
        total += (inst.link_setup_cost(i, j, p) - lambda(i, j, p) * inst.link_capacity(p)) *
                 cut.y(i, j, p);
  if (approach == Approach::hybrid_purchase)
    for (std::size_t p = 0; p < d.trucks; ++p) total += inst.hybrid_truck_cost(p) * cut.nc(p);
  return total;
}

inline double eta_rhs(const EtaCut& cut, const Instance& inst, const Multipliers& lambda) {
  const auto& d = inst.dims;
  double total = cut.penalty;
  for (std::size_t i = 0; i < d.origins; ++i)
    for (std::size_t j = 0; j < d.destinations; ++j)
      for (std::size_t l = 0; l < d.products; ++l)
        for (std::size_t p = 0; p < d.trucks; ++p)
          total += (inst.transport_cost(i, j, l, p) + lambda(i, j, p)) * cut.x(i, j, l, p);
  for (std::size_t i = 0; i < d.origins; ++i)
    for (std::size_t l = 0; l < d.products; ++l) total += inst.origin_open_cost(i, l) * cut.z(i, l);
  return total;
}

struct Subproblem {
  LinearModel model;
  VariableMap vars;
};

// Link subproblem: price every link at c - lambda * (sum_l b) and keep the
// link-only rows (coverage, truck counting, chance cuts).
inline Subproblem build_subproblem1(const Instance& inst, const Multipliers& lambda,
                                    Approach approach) {
  Subproblem sp;
  sp.vars.dims = inst.dims;
  blocks::add_y(sp.model, sp.vars, inst);
  const auto& d = inst.dims;
  for (std::size_t i = 0; i < d.origins; ++i)
    for (std::size_t j = 0; j < d.destinations; ++j)
      for (std::size_t p = 0; p < d.trucks; ++p)
        sp.model.set_objective_coef(sp.vars.y(i, j, p), inst.link_setup_cost(i, j, p) -
                                                            lambda(i, j, p) * inst.link_capacity(p));
  blocks::add_coverage(sp.model, sp.vars, d);
  if (approach == Approach::hybrid_purchase) {
    blocks::add_nc(sp.model, sp.vars, inst);
    blocks::add_counting(sp.model, sp.vars, d);
  } else {
    check_chance_coverage(inst);
    blocks::add_chance(sp.model, sp.vars, linearize_chance_constraints(inst));
  }
  return sp;
}

// Flow subproblem: price flows at q + lambda and keep origin capacity plus
// the shortage (or robust penalty) rows. No link variables appear.
inline Subproblem build_subproblem2(const Instance& inst, const Multipliers& lambda,
                                    RobustMode mode, RobustForm form = RobustForm::aggregated) {
  Subproblem sp;
  sp.vars.dims = inst.dims;
  blocks::add_x(sp.model, sp.vars, inst);
  const auto& d = inst.dims;
  for (std::size_t i = 0; i < d.origins; ++i)
    for (std::size_t j = 0; j < d.destinations; ++j)
      for (std::size_t l = 0; l < d.products; ++l)
        for (std::size_t p = 0; p < d.trucks; ++p)
          sp.model.set_objective_coef(sp.vars.x(i, j, l, p),
                                      inst.transport_cost(i, j, l, p) + lambda(i, j, p));
  blocks::add_z(sp.model, sp.vars, inst);
  blocks::add_origin_capacity(sp.model, sp.vars, inst);
  if (mode == RobustMode::deterministic) {
    blocks::add_u(sp.model, sp.vars, inst);
    blocks::add_shortage(sp.model, sp.vars, inst);
  } else {
    RowMap rows;
    blocks::add_robust(sp.model, sp.vars, rows, inst, form);
  }
  return sp;
}

// The full model with the truck-capacity rows moved into the objective at
// price lambda. Its optimum is the Lagrangian dual function at lambda.
inline ModelBundle build_relaxed_model(const Instance& inst, const Multipliers& lambda,
                                       Approach approach, RobustMode mode,
                                       RobustForm form = RobustForm::aggregated) {
  ModelBundle b = build_model(inst, approach, mode, form);
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < b.rows.truck_capacity.count; ++r)
    rows.push_back(b.rows.truck_capacity.begin + r);
  b.model.remove_constraints(rows);
  const auto& d = inst.dims;
  for (std::size_t i = 0; i < d.origins; ++i)
    for (std::size_t j = 0; j < d.destinations; ++j)
      for (std::size_t p = 0; p < d.trucks; ++p) {
        b.model.add_objective_coef(b.vars.y(i, j, p), -lambda(i, j, p) * inst.link_capacity(p));
        for (std::size_t l = 0; l < d.products; ++l)
          b.model.add_objective_coef(b.vars.x(i, j, l, p), lambda(i, j, p));
      }
  b.rows = {};
  return b;
}

struct MasterModel {
  LinearModel model;
  std::size_t theta = 0;
  std::size_t eta = 0;
  VariableMap lambda;  // only y-shaped indexing is used: lambda.y(i, j, p)
};

// max theta + eta over lambda in [0, lambda_max], one row per stored cut.
inline MasterModel build_master(const std::vector<Cut>& cuts, const Instance& inst,
                                double lambda_max, Approach approach) {
  const bool has_theta = std::any_of(cuts.begin(), cuts.end(), [](const Cut& c) {
    return std::holds_alternative<ThetaCut>(c);
  });
  const bool has_eta = std::any_of(cuts.begin(), cuts.end(), [](const Cut& c) {
    return std::holds_alternative<EtaCut>(c);
  });
  if (!has_theta || !has_eta) {
    throw LagrangianError("master needs at least one theta and one eta cut");
  }
  const auto& d = inst.dims;
  MasterModel mm;
  mm.model.set_objective_sense(ObjSense::maximize);
  mm.theta = mm.model.add_variable("theta", -kInf, kInf);
  mm.eta = mm.model.add_variable("eta", -kInf, kInf);
  mm.model.set_objective_coef(mm.theta, 1.0);
  mm.model.set_objective_coef(mm.eta, 1.0);
  mm.lambda.dims = d;
  mm.lambda.y_base = mm.model.num_variables();
  for (std::size_t i = 0; i < d.origins; ++i)
    for (std::size_t j = 0; j < d.destinations; ++j)
      for (std::size_t p = 0; p < d.trucks; ++p)
        mm.model.add_variable("lambda[" + std::to_string(i) + "," + std::to_string(j) + "," +
                                  std::to_string(p) + "]",
                              0.0, lambda_max);

  const Multipliers zero = zero_multipliers(d);
  std::size_t k = 0;
  for (const auto& cut : cuts) {
    std::vector<Term> terms;
    double rhs = 0.0;
    if (const auto* t = std::get_if<ThetaCut>(&cut)) {
      terms.push_back({mm.theta, 1.0});
      for (std::size_t i = 0; i < d.origins; ++i)
        for (std::size_t j = 0; j < d.destinations; ++j)
          for (std::size_t p = 0; p < d.trucks; ++p) {
            const double coef = inst.link_capacity(p) * t->y(i, j, p);
            if (coef != 0.0) terms.push_back({mm.lambda.y(i, j, p), coef});
          }
      rhs = theta_rhs(*t, inst, zero, approach);
    } else {
      const auto& e = std::get<EtaCut>(cut);
      terms.push_back({mm.eta, 1.0});
      for (std::size_t i = 0; i < d.origins; ++i)
        for (std::size_t j = 0; j < d.destinations; ++j)
          for (std::size_t p = 0; p < d.trucks; ++p) {
            double flow = 0.0;
            for (std::size_t l = 0; l < d.products; ++l) flow += e.x(i, j, l, p);
            if (flow != 0.0) terms.push_back({mm.lambda.y(i, j, p), -flow});
          }
      rhs = eta_rhs(e, inst, zero);
    }
    mm.model.add_constraint("cut#" + std::to_string(k++), std::move(terms),
                            RowSense::less_equal, rhs);
  }
  return mm;
}

struct LdConfig {
  // Stop once Z_up - Z_lb < epsilon * (1 + |Z_lb|).
  double epsilon = 1e-6;
  std::size_t max_iter = 200;
  // Multiplier box; defaults to 10 * max transport cost.
  std::optional<double> lambda_max;
  RobustForm robust_form = RobustForm::aggregated;
  MilpParams subproblem_params;
};

struct LdIteration {
  std::size_t iter = 0;
  double sp1 = 0.0;
  double sp2 = 0.0;
  double master = 0.0;
  double z_lb = 0.0;
  double z_up = 0.0;
  double sp1_time = 0.0;
  double sp2_time = 0.0;
  double master_time = 0.0;
};

struct LdReport {
  double bound = -kInf;  // best Z_lb: a valid lower bound on the MILP optimum
  double z_up = kInf;
  std::size_t iterations = 0;
  bool converged = false;
  bool box_active = false;
  double total_time = 0.0;
  double lambda_max = 0.0;
  std::vector<LdIteration> history;
  std::vector<Cut> cuts;
  Multipliers multipliers;  // master optimum of the last iteration
  double theta = 0.0;
  double eta = 0.0;
};

inline double default_lambda_max(const Instance& inst) {
  double q = 0.0;
  for (double v : inst.transport_cost.flat()) q = std::max(q, v);
  return 10.0 * q;
}

inline double ld_tolerance(double epsilon, double z_lb) {
  return epsilon * (1.0 + std::abs(z_lb));
}

// Cutting-plane Lagrangian decomposition. Starting from lambda = 0, each
// iteration solves both subproblems, stores their solutions as cuts, raises
// Z_lb to the best subproblem sum, then solves the master over the cuts to
// lower Z_up and pick the next multipliers.
inline LdReport run_ld(const Instance& inst, Approach approach, RobustMode mode,
                       const LdConfig& config = {}) {
  require_valid(inst);
  using clock = std::chrono::steady_clock;
  const auto seconds = [](clock::time_point a) {
    return std::chrono::duration<double>(clock::now() - a).count();
  };
  const auto start = clock::now();
  const auto& d = inst.dims;

  LdReport report;
  report.lambda_max = config.lambda_max.value_or(default_lambda_max(inst));
  Multipliers lambda = zero_multipliers(d);
  double z_up = kInf, z_lb = -kInf;
  // Subproblem feasible sets do not depend on lambda, so the previous
  // optimum is a valid starting incumbent.
  MilpParams p1 = config.subproblem_params, p2 = config.subproblem_params;

  for (std::size_t iter = 1;; ++iter) {
    LdIteration rec;
    rec.iter = iter;

    auto t0 = clock::now();
    const Subproblem sp1 = build_subproblem1(inst, lambda, approach);
    const SolveResult r1 = solve_milp(sp1.model, p1);
    rec.sp1_time = seconds(t0);
    t0 = clock::now();
    const Subproblem sp2 = build_subproblem2(inst, lambda, mode, config.robust_form);
    const SolveResult r2 = solve_milp(sp2.model, p2);
    rec.sp2_time = seconds(t0);
    if (!r1.optimal() || !r2.optimal()) {
      throw LagrangianError(std::string("subproblem not solved to optimality (") +
                            to_string(r1.optimal() ? r2.status : r1.status) + ")");
    }
    rec.sp1 = r1.objective_value;
    rec.sp2 = r2.objective_value;
    p1.initial_solution = r1.primal_values;
    p2.initial_solution = r2.primal_values;
    z_lb = std::max(z_lb, rec.sp1 + rec.sp2);

    ThetaCut theta{Tensor<3>({d.origins, d.destinations, d.trucks}), Tensor<1>({d.trucks})};
    for (std::size_t i = 0; i < d.origins; ++i)
      for (std::size_t j = 0; j < d.destinations; ++j)
        for (std::size_t p = 0; p < d.trucks; ++p)
          theta.y(i, j, p) = r1.primal_values[sp1.vars.y(i, j, p)];
    if (sp1.vars.has_nc())
      for (std::size_t p = 0; p < d.trucks; ++p) theta.nc(p) = r1.primal_values[sp1.vars.nc(p)];

    EtaCut eta{Tensor<4>({d.origins, d.destinations, d.products, d.trucks}),
               Tensor<2>({d.origins, d.products}), 0.0};
    for (std::size_t i = 0; i < d.origins; ++i)
      for (std::size_t j = 0; j < d.destinations; ++j)
        for (std::size_t l = 0; l < d.products; ++l)
          for (std::size_t p = 0; p < d.trucks; ++p)
            eta.x(i, j, l, p) = r2.primal_values[sp2.vars.x(i, j, l, p)];
    for (std::size_t i = 0; i < d.origins; ++i)
      for (std::size_t l = 0; l < d.products; ++l) eta.z(i, l) = r2.primal_values[sp2.vars.z(i, l)];
    if (sp2.vars.has_robust()) {
      for (std::size_t k = 0; k < sp2.vars.v_count; ++k)
        eta.penalty += r2.primal_values[sp2.vars.v(k)];
    } else {
      for (std::size_t j = 0; j < d.destinations; ++j)
        for (std::size_t l = 0; l < d.products; ++l)
          eta.penalty += inst.shortage_penalty(j, l) * r2.primal_values[sp2.vars.u(j, l)];
    }
    report.cuts.emplace_back(std::move(theta));
    report.cuts.emplace_back(std::move(eta));

    t0 = clock::now();
    const MasterModel master = build_master(report.cuts, inst, report.lambda_max, approach);
    const SolveResult rm = solve_lp(master.model, config.subproblem_params.lp);
    rec.master_time = seconds(t0);
    if (rm.status == SolveStatus::unbounded) {
      throw LagrangianError("master problem unbounded despite the multiplier box");
    }
    if (!rm.optimal()) {
      throw LagrangianError(std::string("master problem: ") + to_string(rm.status));
    }
    rec.master = rm.objective_value;
    z_up = std::min(z_up, rm.objective_value);
    for (std::size_t i = 0; i < d.origins; ++i)
      for (std::size_t j = 0; j < d.destinations; ++j)
        for (std::size_t p = 0; p < d.trucks; ++p)
          lambda(i, j, p) = rm.primal_values[master.lambda.y(i, j, p)];
    report.theta = rm.primal_values[master.theta];
    report.eta = rm.primal_values[master.eta];

    rec.z_lb = z_lb;
    rec.z_up = z_up;
    report.history.push_back(rec);
    report.iterations = iter;

    if (z_up - z_lb < ld_tolerance(config.epsilon, z_lb)) {
      report.converged = true;
      break;
    }
    if (iter >= config.max_iter) break;
  }

  report.bound = z_lb;
  report.z_up = z_up;
  report.multipliers = lambda;
  report.box_active = report.lambda_max > 0.0 &&
                      std::any_of(lambda.flat().begin(), lambda.flat().end(), [&](double v) {
                        return v >= report.lambda_max * (1.0 - 1e-9);
                      });
  report.total_time = seconds(start);
  return report;
}

// Percentage gap between an exact optimum and a bound.
inline double compute_gap(double exact_obj, double bound) {
  if (exact_obj == 0.0) throw std::domain_error("compute_gap: exact objective is zero");
  return (exact_obj - bound) / exact_obj * 100.0;
}

}  // namespace rgtl
