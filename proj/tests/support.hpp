#pragma once

// Helpers shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rgtl/rgtl.hpp"

namespace rgtl::support {

// The 1x1x1x1 hand fixture: one origin, destination, truck and product with
// q = 1, w = 10, b = k = 5, D = 5 and every fixed cost zero. Optimum 5.
inline Instance unit_fixture() {
  Instance inst = make_zero_instance({1, 1, 1, 1});
  inst.transport_cost(0, 0, 0, 0) = 1;
  inst.shortage_penalty(0, 0) = 10;
  inst.truck_capacity(0, 0) = 5;
  inst.origin_capacity(0, 0) = 5;
  inst.nominal_demand(0, 0) = 5;
  inst.chance.emission_mean(0) = 1;
  inst.chance.emission_var(0) = 1;
  inst.chance.threshold(0, 0) = 100;
  inst.chance.quantile = 3;
  return inst;
}

// Random LP with at most `max_dim` rows and columns, feasible by
// construction (rows are built around a known point) and bounded (every
// column is boxed by a bound or by a covering row).
inline LinearModel random_feasible_lp(std::mt19937_64& rng, std::size_t max_dim = 15) {
  std::uniform_int_distribution<std::size_t> dim(1, max_dim);
  std::uniform_real_distribution<double> coef(-10.0, 10.0), pos(0.0, 10.0), unit(0.0, 1.0);
  const std::size_t n = dim(rng), m = dim(rng);
  LinearModel lp;
  std::vector<double> x0(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double r = unit(rng);
    double lo = 0.0, hi = kInf;
    if (r < 0.15) {
      lo = -kInf;
      hi = pos(rng);
    } else if (r < 0.25) {
      lo = -pos(rng);
      hi = lo + pos(rng) + 0.5;
    } else if (r < 0.6) {
      hi = pos(rng) + 0.5;
    }
    const double a = std::isfinite(lo) ? lo : hi - 10.0;
    const double b = std::isfinite(hi) ? hi : a + 10.0;
    x0[j] = a + (b - a) * unit(rng);
    lp.add_variable("x" + std::to_string(j), lo, hi);
    lp.set_objective_coef(j, std::round(coef(rng) * 100) / 100);
  }
  lp.set_objective_sense(unit(rng) < 0.5 ? ObjSense::minimize : ObjSense::maximize);
  const std::size_t rows = m > 1 ? m - 1 : m;
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<Term> terms;
    double lhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (unit(rng) < 0.35) continue;
      const double a = std::round(coef(rng) * 10) / 10;
      if (a == 0.0) continue;
      terms.push_back({j, a});
      lhs += a * x0[j];
    }
    const double r = unit(rng);
    if (r < 0.2) {
      lp.add_constraint("r" + std::to_string(i), terms, RowSense::equal, lhs);
    } else if (r < 0.6) {
      lp.add_constraint("r" + std::to_string(i), terms, RowSense::less_equal, lhs + pos(rng) * (unit(rng) < 0.3 ? 0 : 1));
    } else {
      lp.add_constraint("r" + std::to_string(i), terms, RowSense::greater_equal, lhs - pos(rng) * (unit(rng) < 0.3 ? 0 : 1));
    }
  }
  // Box whatever is still unbounded: |x_j| sums stay within a ball around x0.
  std::vector<Term> up, down;
  double up_rhs = 0.0, down_rhs = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = lp.variable(j);
    if (!std::isfinite(v.upper)) {
      up.push_back({j, 1.0});
      up_rhs += x0[j];
    }
    if (!std::isfinite(v.lower)) {
      down.push_back({j, 1.0});
      down_rhs += x0[j];
    }
  }
  if (!up.empty()) lp.add_constraint("box_up", up, RowSense::less_equal, up_rhs + 20.0);
  if (!down.empty()) lp.add_constraint("box_down", down, RowSense::greater_equal, down_rhs - 20.0);
  return lp;
}

// Lagrangian dual bound certified by the reported row duals:
//   g(y) = sum_i rhs_i y_i + sum_j min_{x_j in [l_j, u_j]} (c_j - a_j.y) x_j
// in minimization form, returned in the model's sense. Wrong-signed duals
// or an unbounded inner minimum give an infinitely bad value.
inline double dual_objective(const LinearModel& lp, const std::vector<double>& y) {
  const double s = lp.objective_sense() == ObjSense::minimize ? 1.0 : -1.0;
  const double bad = -kInf;
  std::vector<double> d(lp.num_variables());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = s * lp.objective()[j];
  double g = 0.0;
  for (std::size_t i = 0; i < lp.num_constraints(); ++i) {
    const auto& row = lp.constraint(i);
    const double yi = s * y[i];  // minimization-form dual
    if (row.sense == RowSense::less_equal && yi > 1e-9) return s * bad;
    if (row.sense == RowSense::greater_equal && yi < -1e-9) return s * bad;
    g += row.rhs * yi;
    for (const auto& t : row.terms) d[t.var] -= t.coef * yi;
  }
  for (std::size_t j = 0; j < d.size(); ++j) {
    const auto& v = lp.variable(j);
    if (std::abs(d[j]) <= 1e-9) continue;
    const double at = d[j] > 0 ? v.lower : v.upper;
    if (!std::isfinite(at)) return s * bad;
    g += d[j] * at;
  }
  return s * g;
}

// The same LP in the oracle's dense form (x >= 0 only): columns are shifted,
// mirrored or split and finite upper bounds become rows.
inline oracle::DenseLp to_dense(const LinearModel& lp, double* offset) {
  struct Col {
    std::size_t var;
    double sign;
  };
  std::vector<Col> cols;
  std::vector<double> shift(lp.num_variables(), 0.0);
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (col, bound)
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    const auto& v = lp.variable(j);
    if (std::isfinite(v.lower)) {
      shift[j] = v.lower;
      cols.push_back({j, 1.0});
      if (std::isfinite(v.upper)) upper_rows.push_back({cols.size() - 1, v.upper - v.lower});
    } else if (std::isfinite(v.upper)) {
      shift[j] = v.upper;
      cols.push_back({j, -1.0});
    } else {
      cols.push_back({j, 1.0});
      cols.push_back({j, -1.0});
    }
  }
  const double s = lp.objective_sense() == ObjSense::minimize ? 1.0 : -1.0;
  oracle::DenseLp d;
  *offset = 0.0;
  for (std::size_t j = 0; j < lp.num_variables(); ++j) *offset += lp.objective()[j] * shift[j];
  for (const auto& c : cols) d.cost.push_back(s * c.sign * lp.objective()[c.var]);
  for (std::size_t i = 0; i < lp.num_constraints(); ++i) {
    const auto& row = lp.constraint(i);
    std::vector<double> a(cols.size(), 0.0);
    double rhs = row.rhs;
    for (const auto& t : row.terms) {
      rhs -= t.coef * shift[t.var];
      for (std::size_t k = 0; k < cols.size(); ++k)
        if (cols[k].var == t.var) a[k] += t.coef * cols[k].sign;
    }
    d.rows.push_back(a);
    d.sense.push_back(row.sense == RowSense::less_equal      ? '<'
                      : row.sense == RowSense::greater_equal ? '>'
                                                             : '=');
    d.rhs.push_back(rhs);
  }
  for (const auto& [k, ub] : upper_rows) {
    std::vector<double> a(cols.size(), 0.0);
    a[k] = 1.0;
    d.rows.push_back(a);
    d.sense.push_back('<');
    d.rhs.push_back(ub);
  }
  return d;
}

// Random small instance for oracle comparisons. Dimensions are drawn from
// {1..2} x {1..3} x {1..2} x {1..2}, so y and z together stay within 16
// binaries. Fixed costs are scaled down so the binary choices interact.
inline Instance random_small_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> d2(1, 2), d3(1, 3);
  const Dimensions dims{d2(rng), d3(rng), d2(rng), d2(rng)};
  GeneratorRanges ranges;
  ranges.link_setup = {10, 300};
  ranges.origin_open = {50, 800};
  ranges.hybrid_cost = {50, 800};
  ranges.origin_capacity = {50, 400};
  ranges.truck_capacity = {20, 150};
  ranges.demand = {20, 200};
  Instance inst = generate_family(seed * 7919 + 1, dims, 1, 0.05, ranges)[0];
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double& g : inst.robust.budget.flat()) g = std::round(unit(rng) * 200) / 100;
  for (std::size_t k = 0; k < inst.nominal_demand.size(); ++k) {
    inst.robust.dev_minus.flat()[k] = std::round(unit(rng) * 0.3 * inst.nominal_demand.flat()[k] * 100) / 100;
  }
  return inst;
}

// Median of a sample; 0 when empty.
inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace rgtl::support
