#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "rgtl/instance.hpp"
#include "rgtl/lp_model.hpp"
#include "rgtl/plan.hpp"

namespace rgtl {

class FormulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Coverage cannot be met at destination `destination` because every link
// into it breaks the emission threshold for every non-empty truck set.
class StructuralInfeasibility : public FormulationError {
 public:
  explicit StructuralInfeasibility(std::size_t destination)
      : FormulationError("structurally infeasible: destination " +
                         std::to_string(destination) +
                         " has no link whose emissions stay within the threshold"),
        destination_(destination) {}
  std::size_t destination() const { return destination_; }

 private:
  std::size_t destination_;
};

inline constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

// Column offsets of each variable block. Blocks are contiguous and indexed
// row-major in the order of their subscripts.
struct VariableMap {
  Dimensions dims;
  std::size_t y_base = kAbsent;
  std::size_t x_base = kAbsent;
  std::size_t z_base = kAbsent;
  std::size_t u_base = kAbsent;
  std::size_t nc_base = kAbsent;
  std::size_t v_base = kAbsent;
  std::size_t v_count = 0;
  std::size_t alpha1_base = kAbsent;
  std::size_t alpha2_base = kAbsent;
  std::size_t mu_base = kAbsent;

  std::size_t y(std::size_t i, std::size_t j, std::size_t p) const {
    return y_base + (i * dims.destinations + j) * dims.trucks + p;
  }
  std::size_t x(std::size_t i, std::size_t j, std::size_t l, std::size_t p) const {
    return x_base + ((i * dims.destinations + j) * dims.products + l) * dims.trucks + p;
  }
  std::size_t z(std::size_t i, std::size_t l) const { return z_base + i * dims.products + l; }
  std::size_t u(std::size_t j, std::size_t l) const { return u_base + j * dims.products + l; }
  std::size_t nc(std::size_t p) const { return nc_base + p; }
  std::size_t v(std::size_t k = 0) const { return v_base + k; }
  std::size_t alpha1(std::size_t j, std::size_t l) const { return alpha1_base + j * dims.products + l; }
  std::size_t alpha2(std::size_t j, std::size_t l) const { return alpha2_base + j * dims.products + l; }
  std::size_t mu(std::size_t j, std::size_t l) const { return mu_base + j * dims.products + l; }

  bool has_y() const { return y_base != kAbsent; }
  bool has_x() const { return x_base != kAbsent; }
  bool has_z() const { return z_base != kAbsent; }
  bool has_u() const { return u_base != kAbsent; }
  bool has_nc() const { return nc_base != kAbsent; }
  bool has_robust() const { return v_base != kAbsent; }
};

struct RowGroup {
  std::size_t begin = 0;
  std::size_t count = 0;
};

struct RowMap {
  RowGroup coverage;
  RowGroup truck_capacity;
  RowGroup origin_capacity;
  RowGroup shortage;
  RowGroup counting;
  RowGroup chance;
  RowGroup robust_penalty;
  RowGroup robust_plus;
  RowGroup robust_minus;
};

// Linear cut over the link-open binaries of one link (i, j):
//   sum_{p in in_set} y[i][j][p] - sum_{p in out_set} y[i][j][p] <= rhs.
// Cover cuts have an empty out_set; a single-truck cover fixes that truck off.
struct ChanceCut {
  std::size_t origin;
  std::size_t destination;
  std::vector<std::size_t> in_set;
  std::vector<std::size_t> out_set;
  double rhs;

  bool satisfied_by(const std::vector<int>& link_y) const {
    double lhs = 0.0;
    for (std::size_t p : in_set) lhs += link_y[p];
    for (std::size_t p : out_set) lhs -= link_y[p];
    return lhs <= rhs + 1e-9;
  }
};

struct ModelBundle {
  LinearModel model;
  VariableMap vars;
  RowMap rows;
  Approach approach = Approach::hybrid_purchase;
  RobustMode robust_mode = RobustMode::deterministic;
  RobustForm robust_form = RobustForm::aggregated;
  std::vector<ChanceCut> chance_cuts;
};

// ---------------------------------------------------------------------------
// Chance constraint linearization

inline constexpr std::size_t kMaxChanceTrucks = 12;

// Mean-plus-quantile emission of the truck set encoded by `mask`.
inline double link_emission(const ChanceConfig& chance, unsigned mask, double quantile) {
  double mean = 0.0, var = 0.0;
  for (std::size_t p = 0; mask >> p; ++p) {
    if (mask >> p & 1u) {
      mean += chance.emission_mean(p);
      var += chance.emission_var(p);
    }
  }
  return mean + quantile * std::sqrt(var);
}

namespace detail {

// violating[mask] for every truck subset of one link.
inline std::vector<bool> violating_sets(const Instance& inst, std::size_t i, std::size_t j) {
  const std::size_t P = inst.dims.trucks;
  const unsigned full = (1u << P) - 1u;
  std::vector<bool> viol(full + 1u, false);
  const double td = inst.chance.threshold(i, j);
  for (unsigned mask = 1; mask <= full; ++mask) {
    viol[mask] = link_emission(inst.chance, mask, inst.chance.quantile) > td + 1e-9;
  }
  return viol;
}

inline std::vector<std::size_t> members(unsigned mask, std::size_t P) {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < P; ++p)
    if (mask >> p & 1u) out.push_back(p);
  return out;
}

}  // namespace detail

// Exact linear description of the emission chance constraint over binary
// link-open variables. Violating sets whose every superset also violates are
// covered by minimal cover cuts; any other violating set (possible only when
// the quantile is negative) is excluded by a no-good cut.
inline std::vector<ChanceCut> linearize_chance_constraints(const Instance& inst) {
  const std::size_t P = inst.dims.trucks;
  if (P > kMaxChanceTrucks) {
    throw FormulationError("chance linearization supports at most " +
                           std::to_string(kMaxChanceTrucks) + " trucks, got " +
                           std::to_string(P));
  }
  const unsigned full = (1u << P) - 1u;
  std::vector<ChanceCut> cuts;
  for (std::size_t i = 0; i < inst.dims.origins; ++i) {
    for (std::size_t j = 0; j < inst.dims.destinations; ++j) {
      const auto viol = detail::violating_sets(inst, i, j);
      // closed[mask]: mask and all of its supersets violate.
      std::vector<bool> closed(full + 1u, false);
      for (unsigned mask = full + 1u; mask-- > 1u;) {
        bool ok = viol[mask];
        for (std::size_t p = 0; ok && p < P; ++p) {
          if (!(mask >> p & 1u)) ok = closed[mask | (1u << p)];
        }
        closed[mask] = ok;
      }
      for (unsigned mask = 1; mask <= full; ++mask) {
        if (closed[mask]) {
          bool minimal = true;
          for (std::size_t p = 0; minimal && p < P; ++p) {
            if (mask >> p & 1u) minimal = !closed[mask ^ (1u << p)];
          }
          if (!minimal) continue;
          auto in = detail::members(mask, P);
          const double rhs = static_cast<double>(in.size()) - 1.0;
          cuts.push_back({i, j, std::move(in), {}, rhs});
        } else if (viol[mask]) {
          auto in = detail::members(mask, P);
          auto out = detail::members(full ^ mask, P);
          const double rhs = static_cast<double>(in.size()) - 1.0;
          cuts.push_back({i, j, std::move(in), std::move(out), rhs});
        }
      }
    }
  }
  return cuts;
}

// Throws StructuralInfeasibility for the first destination no link can serve.
inline void check_chance_coverage(const Instance& inst) {
  const unsigned full = (1u << inst.dims.trucks) - 1u;
  for (std::size_t j = 0; j < inst.dims.destinations; ++j) {
    bool served = false;
    for (std::size_t i = 0; !served && i < inst.dims.origins; ++i) {
      const auto viol = detail::violating_sets(inst, i, j);
      for (unsigned mask = 1; !served && mask <= full; ++mask) served = !viol[mask];
    }
    if (!served) throw StructuralInfeasibility(j);
  }
}

// ---------------------------------------------------------------------------
// Block builders shared by the full models and the Lagrangian subproblems.

namespace blocks {

inline void add_y(LinearModel& m, VariableMap& vm, const Instance& inst) {
  const auto& d = inst.dims;
  vm.y_base = m.num_variables();
  for (std::size_t i = 0; i < d.origins; ++i)
    for (std::size_t j = 0; j < d.destinations; ++j)
      for (std::size_t p = 0; p < d.trucks; ++p) {
        const auto col = m.add_variable("y[" + std::to_string(i) + "," + std::to_string(j) +
                                            "," + std::to_string(p) + "]",
                                        0.0, 1.0, VarKind::binary);
        m.set_objective_coef(col, inst.link_setup_cost(i, j, p));
      }
}

inline void add_x(LinearModel& m, VariableMap& vm, const Instance& inst) {
  const auto& d = inst.dims;
  vm.x_base = m.num_variables();
  for (std::size_t i = 0; i < d.origins; ++i)
    for (std::size_t j = 0; j < d.destinations; ++j)
      for (std::size_t l = 0; l < d.products; ++l)
        for (std::size_t p = 0; p < d.trucks; ++p) {
          const auto col = m.add_variable("x[" + std::to_string(i) + "," + std::to_string(j) +
                                              "," + std::to_string(l) + "," +
                                              std::to_string(p) + "]",
                                          0.0, kInf);
          m.set_objective_coef(col, inst.transport_cost(i, j, l, p));
        }
}

inline void add_z(LinearModel& m, VariableMap& vm, const Instance& inst) {
  vm.z_base = m.num_variables();
  for (std::size_t i = 0; i < inst.dims.origins; ++i)
    for (std::size_t l = 0; l < inst.dims.products; ++l) {
      const auto col = m.add_variable("z[" + std::to_string(i) + "," + std::to_string(l) + "]",
                                      0.0, 1.0, VarKind::binary);
      m.set_objective_coef(col, inst.origin_open_cost(i, l));
    }
}

inline void add_u(LinearModel& m, VariableMap& vm, const Instance& inst) {
  vm.u_base = m.num_variables();
  for (std::size_t j = 0; j < inst.dims.destinations; ++j)
    for (std::size_t l = 0; l < inst.dims.products; ++l) {
      const auto col = m.add_variable("u[" + std::to_string(j) + "," + std::to_string(l) + "]",
                                      0.0, kInf);
      m.set_objective_coef(col, inst.shortage_penalty(j, l));
    }
}

inline void add_nc(LinearModel& m, VariableMap& vm, const Instance& inst) {
  vm.nc_base = m.num_variables();
  for (std::size_t p = 0; p < inst.dims.trucks; ++p) {
    const auto col = m.add_variable("nc[" + std::to_string(p) + "]", 0.0, kInf);
    m.set_objective_coef(col, inst.hybrid_truck_cost(p));
  }
}

// Every destination is reached by at least one open link.
inline RowGroup add_coverage(LinearModel& m, const VariableMap& vm, const Dimensions& d) {
  RowGroup g{m.num_constraints(), d.destinations};
  for (std::size_t j = 0; j < d.destinations; ++j) {
    std::vector<Term> terms;
    for (std::size_t i = 0; i < d.origins; ++i)
      for (std::size_t p = 0; p < d.trucks; ++p) terms.push_back({vm.y(i, j, p), 1.0});
    m.add_constraint("coverage[" + std::to_string(j) + "]", std::move(terms),
                     RowSense::greater_equal, 1.0);
  }
  return g;
}

// sum_l x[i][j][l][p] <= (sum_l b[l][p]) y[i][j][p]
inline RowGroup add_truck_capacity(LinearModel& m, const VariableMap& vm, const Instance& inst) {
  const auto& d = inst.dims;
  RowGroup g{m.num_constraints(), d.origins * d.destinations * d.trucks};
  for (std::size_t i = 0; i < d.origins; ++i)
    for (std::size_t j = 0; j < d.destinations; ++j)
      for (std::size_t p = 0; p < d.trucks; ++p) {
        std::vector<Term> terms;
        for (std::size_t l = 0; l < d.products; ++l) terms.push_back({vm.x(i, j, l, p), 1.0});
        terms.push_back({vm.y(i, j, p), -inst.link_capacity(p)});
        m.add_constraint("truck_cap[" + std::to_string(i) + "," + std::to_string(j) + "," +
                             std::to_string(p) + "]",
                         std::move(terms), RowSense::less_equal, 0.0);
      }
  return g;
}

// sum_{j,p} x[i][j][l][p] <= k[i][l] z[i][l]
inline RowGroup add_origin_capacity(LinearModel& m, const VariableMap& vm, const Instance& inst) {
  const auto& d = inst.dims;
  RowGroup g{m.num_constraints(), d.origins * d.products};
  for (std::size_t i = 0; i < d.origins; ++i)
    for (std::size_t l = 0; l < d.products; ++l) {
      std::vector<Term> terms;
      for (std::size_t j = 0; j < d.destinations; ++j)
        for (std::size_t p = 0; p < d.trucks; ++p) terms.push_back({vm.x(i, j, l, p), 1.0});
      terms.push_back({vm.z(i, l), -inst.origin_capacity(i, l)});
      m.add_constraint("origin_cap[" + std::to_string(i) + "," + std::to_string(l) + "]",
                       std::move(terms), RowSense::less_equal, 0.0);
    }
  return g;
}

// u[j][l] + sum_{i,p} x[i][j][l][p] >= D[j][l]
inline RowGroup add_shortage(LinearModel& m, const VariableMap& vm, const Instance& inst) {
  const auto& d = inst.dims;
  RowGroup g{m.num_constraints(), d.destinations * d.products};
  for (std::size_t j = 0; j < d.destinations; ++j)
    for (std::size_t l = 0; l < d.products; ++l) {
      std::vector<Term> terms{{vm.u(j, l), 1.0}};
      for (std::size_t i = 0; i < d.origins; ++i)
        for (std::size_t p = 0; p < d.trucks; ++p) terms.push_back({vm.x(i, j, l, p), 1.0});
      m.add_constraint("shortage[" + std::to_string(j) + "," + std::to_string(l) + "]",
                       std::move(terms), RowSense::greater_equal, inst.nominal_demand(j, l));
    }
  return g;
}

// nc[p] = sum_{i,j} y[i][j][p]
inline RowGroup add_counting(LinearModel& m, const VariableMap& vm, const Dimensions& d) {
  RowGroup g{m.num_constraints(), d.trucks};
  for (std::size_t p = 0; p < d.trucks; ++p) {
    std::vector<Term> terms{{vm.nc(p), 1.0}};
    for (std::size_t i = 0; i < d.origins; ++i)
      for (std::size_t j = 0; j < d.destinations; ++j) terms.push_back({vm.y(i, j, p), -1.0});
    m.add_constraint("count[" + std::to_string(p) + "]", std::move(terms), RowSense::equal, 0.0);
  }
  return g;
}

// Installs the chance cuts: single-truck covers become upper bounds of zero,
// the rest become rows.
inline RowGroup add_chance(LinearModel& m, const VariableMap& vm,
                           const std::vector<ChanceCut>& cuts) {
  RowGroup g{m.num_constraints(), 0};
  for (const auto& cut : cuts) {
    if (cut.in_set.size() == 1 && cut.out_set.empty()) {
      m.variable(vm.y(cut.origin, cut.destination, cut.in_set.front())).upper = 0.0;
      continue;
    }
    std::vector<Term> terms;
    for (std::size_t p : cut.in_set) terms.push_back({vm.y(cut.origin, cut.destination, p), 1.0});
    for (std::size_t p : cut.out_set) terms.push_back({vm.y(cut.origin, cut.destination, p), -1.0});
    m.add_constraint("chance[" + std::to_string(cut.origin) + "," +
                         std::to_string(cut.destination) + "]#" + std::to_string(g.count),
                     std::move(terms), RowSense::less_equal, cut.rhs);
    ++g.count;
  }
  return g;
}

// Dualized worst-case shortage penalty: penalty columns v plus the dual
// columns alpha1, alpha2, mu of the per-cell deviation polytope.
inline void add_robust(LinearModel& m, VariableMap& vm, RowMap& rows, const Instance& inst,
                       RobustForm form) {
  const auto& d = inst.dims;
  const std::size_t cells = d.destinations * d.products;
  vm.v_base = m.num_variables();
  vm.v_count = form == RobustForm::aggregated ? 1 : cells;
  for (std::size_t k = 0; k < vm.v_count; ++k) {
    const auto col = m.add_variable("v[" + std::to_string(k) + "]", 0.0, kInf);
    m.set_objective_coef(col, 1.0);
  }
  const auto add_cells = [&](const char* name) {
    const std::size_t base = m.num_variables();
    for (std::size_t j = 0; j < d.destinations; ++j)
      for (std::size_t l = 0; l < d.products; ++l)
        m.add_variable(std::string(name) + "[" + std::to_string(j) + "," + std::to_string(l) + "]",
                       0.0, kInf);
    return base;
  };
  vm.alpha1_base = add_cells("alpha1");
  vm.alpha2_base = add_cells("alpha2");
  vm.mu_base = add_cells("mu");

  // sum w (D + alpha1 + Gamma mu - sum x) <= v, per cell or aggregated.
  rows.robust_penalty = {m.num_constraints(), 0};
  std::vector<Term> agg;
  double agg_rhs = 0.0;
  for (std::size_t j = 0; j < d.destinations; ++j)
    for (std::size_t l = 0; l < d.products; ++l) {
      const double w = inst.shortage_penalty(j, l);
      std::vector<Term> terms{{vm.alpha1(j, l), w},
                              {vm.mu(j, l), w * inst.robust.budget(j, l)}};
      for (std::size_t i = 0; i < d.origins; ++i)
        for (std::size_t p = 0; p < d.trucks; ++p) terms.push_back({vm.x(i, j, l, p), -w});
      if (form == RobustForm::aggregated) {
        agg.insert(agg.end(), terms.begin(), terms.end());
        agg_rhs -= w * inst.nominal_demand(j, l);
      } else {
        terms.push_back({vm.v(j * d.products + l), -1.0});
        m.add_constraint("robust_penalty[" + std::to_string(j) + "," + std::to_string(l) + "]",
                         std::move(terms), RowSense::less_equal,
                         -w * inst.nominal_demand(j, l));
        ++rows.robust_penalty.count;
      }
    }
  if (form == RobustForm::aggregated) {
    agg.push_back({vm.v(), -1.0});
    m.add_constraint("robust_penalty", std::move(agg), RowSense::less_equal, agg_rhs);
    rows.robust_penalty.count = 1;
  }

  rows.robust_plus = {m.num_constraints(), cells};
  for (std::size_t j = 0; j < d.destinations; ++j)
    for (std::size_t l = 0; l < d.products; ++l)
      m.add_constraint("robust_plus[" + std::to_string(j) + "," + std::to_string(l) + "]",
                       {{vm.alpha1(j, l), 1.0}, {vm.mu(j, l), 1.0}}, RowSense::greater_equal,
                       inst.robust.dev_plus(j, l));
  rows.robust_minus = {m.num_constraints(), cells};
  for (std::size_t j = 0; j < d.destinations; ++j)
    for (std::size_t l = 0; l < d.products; ++l)
      m.add_constraint("robust_minus[" + std::to_string(j) + "," + std::to_string(l) + "]",
                       {{vm.alpha2(j, l), 1.0}, {vm.mu(j, l), 1.0}}, RowSense::greater_equal,
                       inst.robust.dev_minus(j, l));
}

}  // namespace blocks

// ---------------------------------------------------------------------------
// Full models

// Replaces the shortage variables and their penalty with the dualized robust
// penalty block. The bundle must still be deterministic.
inline ModelBundle apply_robust_counterpart(ModelBundle bundle, const Instance& inst,
                                            RobustForm form = RobustForm::aggregated) {
  if (bundle.robust_mode == RobustMode::robust || bundle.vars.has_robust()) {
    throw FormulationError("robust counterpart already applied");
  }
  if (!bundle.vars.has_u() || !bundle.vars.has_x()) {
    throw FormulationError("robust counterpart needs shortage and flow columns");
  }
  auto& rows = bundle.rows;
  const RowGroup cut = rows.shortage;
  std::vector<std::size_t> drop_rows;
  for (std::size_t r = 0; r < cut.count; ++r) drop_rows.push_back(cut.begin + r);
  bundle.model.remove_constraints(drop_rows);
  for (RowGroup* g : {&rows.coverage, &rows.truck_capacity, &rows.origin_capacity,
                      &rows.counting, &rows.chance}) {
    if (g->count > 0 && g->begin > cut.begin) g->begin -= cut.count;
  }
  rows.shortage = {};

  auto& vm = bundle.vars;
  std::vector<std::size_t> drop_cols;
  const std::size_t cells = inst.dims.destinations * inst.dims.products;
  for (std::size_t k = 0; k < cells; ++k) drop_cols.push_back(vm.u_base + k);
  const auto remap = bundle.model.remove_variables(drop_cols);
  for (std::size_t* base : {&vm.y_base, &vm.x_base, &vm.z_base, &vm.nc_base}) {
    if (*base != kAbsent) *base = *remap[*base];
  }
  vm.u_base = kAbsent;

  blocks::add_robust(bundle.model, vm, rows, inst, form);
  bundle.robust_mode = RobustMode::robust;
  bundle.robust_form = form;
  return bundle;
}

// Hybrid-truck purchase model: link, opening, transport, shortage and hybrid
// purchase costs under coverage, truck/origin capacity and truck counting.
inline ModelBundle build_approach1(const Instance& inst, RobustMode mode,
                                   RobustForm form = RobustForm::aggregated) {
  require_valid(inst);
  ModelBundle b;
  b.approach = Approach::hybrid_purchase;
  b.vars.dims = inst.dims;
  blocks::add_y(b.model, b.vars, inst);
  blocks::add_x(b.model, b.vars, inst);
  blocks::add_z(b.model, b.vars, inst);
  blocks::add_u(b.model, b.vars, inst);
  blocks::add_nc(b.model, b.vars, inst);
  b.rows.coverage = blocks::add_coverage(b.model, b.vars, inst.dims);
  b.rows.truck_capacity = blocks::add_truck_capacity(b.model, b.vars, inst);
  b.rows.origin_capacity = blocks::add_origin_capacity(b.model, b.vars, inst);
  b.rows.shortage = blocks::add_shortage(b.model, b.vars, inst);
  b.rows.counting = blocks::add_counting(b.model, b.vars, inst.dims);
  if (mode == RobustMode::robust) return apply_robust_counterpart(std::move(b), inst, form);
  return b;
}

// Emission-threshold model: as the hybrid model without hybrid trucks, with
// the chance constraint installed as its exact cut set.
inline ModelBundle build_approach2(const Instance& inst, RobustMode mode,
                                   RobustForm form = RobustForm::aggregated) {
  require_valid(inst);
  auto cuts = linearize_chance_constraints(inst);
  check_chance_coverage(inst);
  ModelBundle b;
  b.approach = Approach::chance_constrained;
  b.vars.dims = inst.dims;
  blocks::add_y(b.model, b.vars, inst);
  blocks::add_x(b.model, b.vars, inst);
  blocks::add_z(b.model, b.vars, inst);
  blocks::add_u(b.model, b.vars, inst);
  b.rows.coverage = blocks::add_coverage(b.model, b.vars, inst.dims);
  b.rows.truck_capacity = blocks::add_truck_capacity(b.model, b.vars, inst);
  b.rows.origin_capacity = blocks::add_origin_capacity(b.model, b.vars, inst);
  b.rows.shortage = blocks::add_shortage(b.model, b.vars, inst);
  b.rows.chance = blocks::add_chance(b.model, b.vars, cuts);
  b.chance_cuts = std::move(cuts);
  if (mode == RobustMode::robust) return apply_robust_counterpart(std::move(b), inst, form);
  return b;
}

inline ModelBundle build_model(const Instance& inst, Approach approach, RobustMode mode,
                               RobustForm form = RobustForm::aggregated) {
  return approach == Approach::hybrid_purchase ? build_approach1(inst, mode, form)
                                               : build_approach2(inst, mode, form);
}

// ---------------------------------------------------------------------------
// Objective recomputation

struct ObjectiveBreakdown {
  double link_setup = 0.0;
  double origin_opening = 0.0;
  double transport = 0.0;
  double penalty = 0.0;
  double hybrid_purchase = 0.0;
  // Deterministic mode: every u equals max(0, D - delivered) within 1e-6.
  bool shortage_tight = true;

  double total() const {
    return link_setup + origin_opening + transport + penalty + hybrid_purchase;
  }
};

// Worst-case extra demand of one cell under a per-cell budget.
inline double cell_protection(const Instance& inst, std::size_t j, std::size_t l) {
  return inst.robust.dev_plus(j, l) * std::min(1.0, inst.robust.budget(j, l));
}

// Objective of `plan` computed from raw instance data. Robust penalties are
// the smallest value the penalty columns can take for the plan's flows; the
// hybrid term counts open links directly.
inline ObjectiveBreakdown evaluate_objective(const Instance& inst, const Plan& plan,
                                             Approach approach, RobustMode mode,
                                             RobustForm form = RobustForm::aggregated) {
  const auto [I, J, P, L] = inst.dims;
  if (plan.y.shape() != std::array<std::size_t, 3>{I, J, P} ||
      plan.x.shape() != std::array<std::size_t, 4>{I, J, L, P} ||
      plan.z.shape() != std::array<std::size_t, 2>{I, L} ||
      (mode == RobustMode::deterministic &&
       plan.u.shape() != std::array<std::size_t, 2>{J, L})) {
    throw FormulationError("evaluate_objective: plan is missing variable values");
  }
  ObjectiveBreakdown out;
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t p = 0; p < P; ++p) {
        out.link_setup += inst.link_setup_cost(i, j, p) * plan.y(i, j, p);
        if (approach == Approach::hybrid_purchase)
          out.hybrid_purchase += inst.hybrid_truck_cost(p) * plan.y(i, j, p);
        for (std::size_t l = 0; l < L; ++l)
          out.transport += inst.transport_cost(i, j, l, p) * plan.x(i, j, l, p);
      }
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t l = 0; l < L; ++l)
      out.origin_opening += inst.origin_open_cost(i, l) * plan.z(i, l);

  double aggregated = 0.0;
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t l = 0; l < L; ++l) {
      const double w = inst.shortage_penalty(j, l);
      const double gap = inst.nominal_demand(j, l) - delivered(plan, j, l);
      if (mode == RobustMode::deterministic) {
        out.penalty += w * plan.u(j, l);
        const double expect = std::max(0.0, gap);
        if (std::abs(plan.u(j, l) - expect) > 1e-6 * (1.0 + inst.nominal_demand(j, l)))
          out.shortage_tight = false;
      } else {
        const double cell = w * (gap + cell_protection(inst, j, l));
        if (form == RobustForm::aggregated) {
          aggregated += cell;
        } else {
          out.penalty += std::max(0.0, cell);
        }
      }
    }
  if (mode == RobustMode::robust && form == RobustForm::aggregated) {
    out.penalty = std::max(0.0, aggregated);
  }
  return out;
}

// Reads a plan back out of a solved bundle's primal vector.
inline Plan extract_plan(const ModelBundle& bundle, const std::vector<double>& primal) {
  if (primal.size() != bundle.model.num_variables()) {
    throw FormulationError("extract_plan: expected " +
                           std::to_string(bundle.model.num_variables()) +
                           " variable values, got " + std::to_string(primal.size()));
  }
  const auto& vm = bundle.vars;
  const auto [I, J, P, L] = vm.dims;
  Plan plan = make_zero_plan(vm.dims);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t p = 0; p < P; ++p) {
        if (vm.has_y()) plan.y(i, j, p) = primal[vm.y(i, j, p)];
        for (std::size_t l = 0; l < L; ++l)
          if (vm.has_x()) plan.x(i, j, l, p) = primal[vm.x(i, j, l, p)];
      }
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t l = 0; l < L; ++l)
      if (vm.has_z()) plan.z(i, l) = primal[vm.z(i, l)];
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t l = 0; l < L; ++l) {
      if (vm.has_u()) plan.u(j, l) = primal[vm.u(j, l)];
      if (vm.has_robust()) {
        plan.alpha1(j, l) = primal[vm.alpha1(j, l)];
        plan.alpha2(j, l) = primal[vm.alpha2(j, l)];
        plan.mu(j, l) = primal[vm.mu(j, l)];
      }
    }
  if (vm.has_nc())
    for (std::size_t p = 0; p < P; ++p) plan.nc(p) = primal[vm.nc(p)];
  for (std::size_t k = 0; k < vm.v_count; ++k) plan.v.push_back(primal[vm.v(k)]);
  return plan;
}

inline ObjectiveBreakdown evaluate_objective(const Instance& inst, const ModelBundle& bundle,
                                             const std::vector<double>& primal) {
  return evaluate_objective(inst, extract_plan(bundle, primal), bundle.approach,
                            bundle.robust_mode, bundle.robust_form);
}

}  // namespace rgtl
