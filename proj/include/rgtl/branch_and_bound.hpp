#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "rgtl/lp_model.hpp"
#include "rgtl/simplex.hpp"

namespace rgtl {

struct MilpParams {
  // Absolute gap, scaled by (1 + |bound|).
  double gap_tolerance = 1e-9;
  std::size_t node_limit = 2'000'000;
  double time_limit = kInf;  // seconds
  double integrality_tol = 1e-6;
  LpOptions lp;
  // Called at every processed node with (incumbent, best bound), both in
  // minimization form. The incumbent is +inf until one is found.
  std::function<void(double, double)> on_node;
  // Optional starting incumbent; ignored unless feasible and integral.
  std::vector<double> initial_solution;
};

namespace detail {

struct BbNode {
  double bound;  // parent LP value, minimization form
  std::size_t depth;
  std::size_t id;
  std::vector<double> lower;
  std::vector<double> upper;
  // Branching that created this node, for pseudo-cost updates.
  std::size_t var = static_cast<std::size_t>(-1);
  bool up = false;
  double frac = 0.0;  // distance moved by the branching bound
};

// Average objective increase per unit of bound change, per column and
// direction. Columns never branched on borrow the mean of those that have.
class PseudoCosts {
 public:
  explicit PseudoCosts(std::size_t n) : sum_(2 * n, 0.0), count_(2 * n, 0) {}

  void record(std::size_t j, bool up, double gain_per_unit) {
    const std::size_t k = 2 * j + up;
    sum_[k] += gain_per_unit;
    ++count_[k];
    total_[up] += gain_per_unit;
    ++seen_[up];
  }

  double estimate(std::size_t j, bool up) const {
    const std::size_t k = 2 * j + up;
    if (count_[k] > 0) return sum_[k] / count_[k];
    return seen_[up] > 0 ? total_[up] / seen_[up] : 1.0;
  }

 private:
  std::vector<double> sum_;
  std::vector<std::size_t> count_;
  double total_[2] = {0.0, 0.0};
  std::size_t seen_[2] = {0, 0};
};

struct BbNodeOrder {
  // Best bound first; deeper nodes, then older nodes, break ties.
  bool operator()(const BbNode& a, const BbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

}  // namespace detail

// Best-bound branch-and-bound with pseudo-cost branching (product score,
// lowest column index on ties). LP relaxations are solved from scratch at every node.
inline SolveResult solve_milp(const LinearModel& model, const MilpParams& params = {}) {
  model.require_valid();
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const double sense = model.objective_sense() == ObjSense::minimize ? 1.0 : -1.0;
  const std::size_t n = model.num_variables();

  std::vector<std::size_t> integer_cols;
  detail::BbNode root{-kInf, 0, 0, {}, {}};
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = model.variable(j);
    double lo = v.lower, hi = v.upper;
    if (v.kind != VarKind::continuous) {
      integer_cols.push_back(j);
      lo = std::ceil(lo - params.integrality_tol);
      hi = std::floor(hi + params.integrality_tol);
    }
    root.lower.push_back(lo);
    root.upper.push_back(hi);
  }

  SolveResult best;
  best.status = SolveStatus::infeasible;
  double incumbent = kInf;
  std::size_t nodes = 0, pivots = 0, next_id = 1;
  bool hit_limit = false;
  // True when a node with this bound cannot improve the incumbent.
  auto fathomed = [&](double bound) {
    return incumbent < kInf && bound >= incumbent - params.gap_tolerance * (1.0 + std::abs(incumbent));
  };

  if (params.initial_solution.size() == n &&
      model.max_scaled_violation(params.initial_solution) <= params.lp.feasibility_tol) {
    bool integral = true;
    for (std::size_t j : integer_cols) {
      const double x = params.initial_solution[j];
      integral = integral && std::abs(x - std::round(x)) <= params.integrality_tol;
    }
    if (integral) {
      best.status = SolveStatus::optimal;
      best.primal_values = params.initial_solution;
      for (std::size_t j : integer_cols) best.primal_values[j] = std::round(best.primal_values[j]);
      best.objective_value = model.objective_value(best.primal_values);
      incumbent = sense * best.objective_value;
    }
  }

  std::priority_queue<detail::BbNode, std::vector<detail::BbNode>, detail::BbNodeOrder> open;
  open.push(std::move(root));
  double best_bound = -kInf;
  detail::PseudoCosts pseudo(n);

  while (!open.empty()) {
    const double top = open.top().bound;
    if (fathomed(top)) {
      best_bound = std::min(incumbent, top);
      while (!open.empty()) open.pop();
      break;
    }
    if (nodes >= params.node_limit || elapsed() > params.time_limit) {
      hit_limit = true;
      best_bound = top;
      break;
    }
    detail::BbNode node = open.top();
    open.pop();
    ++nodes;

    SolveResult lp = solve_lp(model, node.lower, node.upper, params.lp);
    pivots += lp.pivot_count;
    if (lp.status == SolveStatus::unbounded) {
      if (incumbent == kInf) {
        best = std::move(lp);
        best.node_count = nodes;
        best.pivot_count = pivots;
        best.relaxed_integrality = false;
        best.wall_time = elapsed();
        best.best_bound = -sense * kInf;
        return best;
      }
      continue;
    }
    if (lp.status == SolveStatus::iteration_limit) {
      hit_limit = true;
      continue;
    }
    if (lp.status != SolveStatus::optimal) continue;

    const double value = sense * lp.objective_value;
    if (node.var != static_cast<std::size_t>(-1) && node.frac > 0.0) {
      pseudo.record(node.var, node.up, std::max(0.0, value - node.bound) / node.frac);
    }
    if (params.on_node) params.on_node(incumbent, node.bound);
    if (fathomed(value)) continue;

    std::size_t branch = static_cast<std::size_t>(-1);
    double best_score = -1.0;
    for (std::size_t j : integer_cols) {
      const double x = lp.primal_values[j];
      if (std::abs(x - std::round(x)) <= params.integrality_tol) continue;
      const double f = x - std::floor(x);
      const double score = std::max(pseudo.estimate(j, false) * f, 1e-6) *
                           std::max(pseudo.estimate(j, true) * (1.0 - f), 1e-6);
      if (score > best_score * (1.0 + 1e-12)) {
        best_score = score;
        branch = j;
      }
    }
    if (branch == static_cast<std::size_t>(-1)) {
      for (std::size_t j : integer_cols) lp.primal_values[j] = std::round(lp.primal_values[j]);
      lp.objective_value = model.objective_value(lp.primal_values);
      incumbent = sense * lp.objective_value;
      best = std::move(lp);
      continue;
    }

    const double x = lp.primal_values[branch];
    const double f = x - std::floor(x);
    detail::BbNode down{value, node.depth + 1, next_id++, node.lower, node.upper, branch, false, f};
    down.upper[branch] = std::floor(x);
    detail::BbNode up{value,         node.depth + 1, next_id++, std::move(node.lower),
                      std::move(node.upper), branch, true, 1.0 - f};
    up.lower[branch] = std::ceil(x);
    open.push(std::move(down));
    open.push(std::move(up));
  }
  if (open.empty() && !hit_limit) best_bound = incumbent;

  best.node_count = nodes;
  best.pivot_count = pivots;
  best.relaxed_integrality = false;
  best.wall_time = elapsed();
  best.dual_values.clear();
  if (incumbent == kInf) {
    best.status = hit_limit ? SolveStatus::iteration_limit : SolveStatus::infeasible;
    best.best_bound = sense * best_bound;
    return best;
  }
  best.status = hit_limit ? SolveStatus::iteration_limit : SolveStatus::optimal;
  best.best_bound = sense * best_bound;
  return best;
}

}  // namespace rgtl
