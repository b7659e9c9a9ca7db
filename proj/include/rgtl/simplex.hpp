#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rgtl/lp_model.hpp"

namespace rgtl {

struct LpOptions {
  double pivot_tol = 1e-9;
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  std::size_t max_pivots = 50'000;
  // Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t bland_after = 1'000;
};

namespace detail {

// Two-phase primal simplex on a dense tableau with bounded columns. Every
// internal column lives in [0, upper]; original variables are shifted,
// mirrored or split to fit that form. Nonbasic columns sit at 0 or at their
// upper bound, and basic values are tracked explicitly.
class BoundedTableau {
 public:
  BoundedTableau(const LinearModel& model, std::span<const double> lower,
                 std::span<const double> upper, const LpOptions& opt)
      : model_(model), opt_(opt) {
    build(lower, upper);
  }

  SolveResult solve() {
    const auto start = std::chrono::steady_clock::now();
    SolveResult res = run_phases();
    res.pivot_count = pivots_;
    res.relaxed_integrality = model_.has_integers();
    res.wall_time = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();
    return res;
  }

 private:
  struct Column {
    std::size_t var;  // original variable, or npos for slacks/artificials
    double sign;
    double upper;
    bool artificial;
  };
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  enum class Outcome { optimal, unbounded, limit };

  double& at(std::size_t i, std::size_t j) { return tab_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return tab_[i * n_ + j]; }

  void build(std::span<const double> lower, std::span<const double> upper) {
    const std::size_t nv = model_.num_variables();
    m_ = model_.num_constraints();
    shift_.assign(nv, 0.0);
    var_cols_.assign(nv, {});
    for (std::size_t j = 0; j < nv; ++j) {
      const double lo = lower[j], hi = upper[j];
      if (lo > hi + opt_.feasibility_tol * (1.0 + std::abs(lo))) bound_conflict_ = true;
      if (std::isfinite(lo)) {
        shift_[j] = lo;
        add_column({j, 1.0, std::max(0.0, hi - lo), false});
      } else if (std::isfinite(hi)) {
        shift_[j] = hi;
        add_column({j, -1.0, kInf, false});
      } else {
        add_column({j, 1.0, kInf, false});
        add_column({j, -1.0, kInf, false});
      }
    }

    rhs_.assign(m_, 0.0);
    row_sign_.assign(m_, 1.0);
    std::vector<std::size_t> slack_col(m_, npos);
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = model_.constraint(i);
      double r = row.rhs;
      for (const auto& t : row.terms) r -= t.coef * shift_[t.var];
      rhs_[i] = r;
      if (row.sense != RowSense::equal) slack_col[i] = add_column({npos, 1.0, kInf, false});
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const auto sense = model_.constraint(i).sense;
      const double slack_coef = sense == RowSense::less_equal ? 1.0 : -1.0;
      if (rhs_[i] < 0.0) row_sign_[i] = -1.0;
      const bool slack_is_identity =
          slack_col[i] != npos && slack_coef * row_sign_[i] > 0.0;
      identity_col_.push_back(slack_is_identity ? slack_col[i] : npos);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (identity_col_[i] == npos) identity_col_[i] = add_column({npos, 1.0, kInf, true});
    }

    n_ = cols_.size();
    tab_.assign(m_ * n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = model_.constraint(i);
      const double s = row_sign_[i];
      for (const auto& t : row.terms) {
        for (std::size_t c : var_cols_[t.var]) at(i, c) += s * t.coef * cols_[c].sign;
      }
      if (slack_col[i] != npos) {
        at(i, slack_col[i]) = s * (row.sense == RowSense::less_equal ? 1.0 : -1.0);
      }
      if (cols_[identity_col_[i]].artificial) at(i, identity_col_[i]) = 1.0;
      rhs_[i] *= s;
    }

    basis_ = identity_col_;
    beta_ = rhs_;
    is_basic_.assign(n_, false);
    for (std::size_t c : basis_) is_basic_[c] = true;
    at_upper_.assign(n_, false);
    barred_.assign(n_, false);
  }

  std::size_t add_column(Column c) {
    cols_.push_back(c);
    if (c.var != npos) var_cols_[c.var].push_back(cols_.size() - 1);
    return cols_.size() - 1;
  }

  double nonbasic_value(std::size_t c) const { return at_upper_[c] ? cols_[c].upper : 0.0; }

  void price(const std::vector<double>& cost) {
    d_ = cost;
    obj_ = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < n_; ++j) d_[j] -= cb * at(i, j);
    }
    for (std::size_t j = 0; j < n_; ++j) {
      obj_ += cost[j] * (is_basic_[j] ? 0.0 : nonbasic_value(j));
    }
    for (std::size_t i = 0; i < m_; ++i) obj_ += cost[basis_[i]] * beta_[i];
  }

  void pivot(std::size_t r, std::size_t q) {
    const double piv = at(r, q);
    std::vector<std::size_t> nz;
    nz.reserve(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      double& v = at(r, j);
      if (v != 0.0) {
        v /= piv;
        nz.push_back(j);
      }
    }
    at(r, q) = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = at(i, q);
      if (f == 0.0) continue;
      for (std::size_t j : nz) at(i, j) -= f * at(r, j);
      at(i, q) = 0.0;
    }
    const double fd = d_[q];
    if (fd != 0.0) {
      for (std::size_t j : nz) d_[j] -= fd * at(r, j);
      d_[q] = 0.0;
    }
    is_basic_[basis_[r]] = false;
    basis_[r] = q;
    is_basic_[q] = true;
    at_upper_[q] = false;
  }

  Outcome iterate() {
    bool bland = false;
    std::size_t degenerate_run = 0;
    while (true) {
      if (pivots_ >= opt_.max_pivots) return Outcome::limit;

      std::size_t q = npos;
      double best = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (is_basic_[j] || barred_[j]) continue;
        double score = 0.0;
        if (!at_upper_[j]) {
          if (cols_[j].upper > 0.0 && d_[j] < -opt_.optimality_tol) score = -d_[j];
        } else if (d_[j] > opt_.optimality_tol) {
          score = d_[j];
        }
        if (score <= 0.0) continue;
        if (bland) {
          q = j;
          break;
        }
        if (score > best) {
          best = score;
          q = j;
        }
      }
      if (q == npos) return Outcome::optimal;

      const double dir = at_upper_[q] ? -1.0 : 1.0;
      double t_min = kInf;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = dir * at(i, q);
        if (a > opt_.pivot_tol) {
          t_min = std::min(t_min, std::max(0.0, beta_[i]) / a);
        } else if (a < -opt_.pivot_tol && std::isfinite(cols_[basis_[i]].upper)) {
          t_min = std::min(t_min, std::max(0.0, cols_[basis_[i]].upper - beta_[i]) / -a);
        }
      }
      const double flip = cols_[q].upper;
      if (!std::isfinite(t_min) && !std::isfinite(flip)) {
        ray_ = q;
        return Outcome::unbounded;
      }

      std::size_t r = npos;
      bool leave_upper = false;
      double t = flip;
      if (t_min < flip) {
        const double cap = t_min * (1.0 + 1e-9) + 1e-12;
        double best_a = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
          const double a = dir * at(i, q);
          double ti;
          bool up = false;
          if (a > opt_.pivot_tol) {
            ti = std::max(0.0, beta_[i]) / a;
          } else if (a < -opt_.pivot_tol && std::isfinite(cols_[basis_[i]].upper)) {
            ti = std::max(0.0, cols_[basis_[i]].upper - beta_[i]) / -a;
            up = true;
          } else {
            continue;
          }
          if (ti > cap) continue;
          const bool better = bland ? (r == npos || basis_[i] < basis_[r])
                                    : std::abs(a) > best_a;
          if (better) {
            r = i;
            best_a = std::abs(a);
            leave_upper = up;
            t = ti;
          }
        }
      }

      ++pivots_;
      if (t <= 1e-12) {
        if (++degenerate_run >= opt_.bland_after) bland = true;
      } else {
        degenerate_run = 0;
      }

      if (t > 0.0) {
        for (std::size_t i = 0; i < m_; ++i) {
          const double a = at(i, q);
          if (a != 0.0) beta_[i] -= dir * t * a;
        }
        obj_ += d_[q] * dir * t;
      }
      if (r == npos) {
        at_upper_[q] = !at_upper_[q];
        continue;
      }
      const double entering = nonbasic_value(q) + dir * t;
      const std::size_t leaving = basis_[r];
      pivot(r, q);
      beta_[r] = entering;
      at_upper_[leaving] = leave_upper;
    }
  }

  SolveResult run_phases() {
    SolveResult res;
    if (bound_conflict_) {
      res.status = SolveStatus::infeasible;
      return res;
    }

    bool has_artificial = false;
    std::vector<double> cost(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (cols_[j].artificial) {
        cost[j] = 1.0;
        has_artificial = true;
      }
    }
    if (has_artificial) {
      price(cost);
      const Outcome o = iterate();
      if (o == Outcome::limit) {
        res.status = SolveStatus::iteration_limit;
        return res;
      }
      double scale = 1.0;
      for (double r : rhs_) scale = std::max(scale, std::abs(r));
      if (obj_ > opt_.feasibility_tol * scale) {
        res.status = SolveStatus::infeasible;
        return res;
      }
      drive_out_artificials();
    }

    const double sense = model_.objective_sense() == ObjSense::minimize ? 1.0 : -1.0;
    std::fill(cost.begin(), cost.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (cols_[j].var != npos) cost[j] = sense * cols_[j].sign * model_.objective()[cols_[j].var];
    }
    price(cost);
    const Outcome o = iterate();

    res.primal_values = primal();
    res.objective_value = model_.objective_value(res.primal_values);
    if (o == Outcome::unbounded) {
      res.status = SolveStatus::unbounded;
      res.unbounded_ray = ray_variable(*ray_);
      return res;
    }
    res.status = o == Outcome::optimal ? SolveStatus::optimal : SolveStatus::iteration_limit;
    res.dual_values.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      res.dual_values[i] = -sense * row_sign_[i] * d_[identity_col_[i]];
    }
    return res;
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (!cols_[basis_[r]].artificial) continue;
      std::size_t best = npos;
      double best_a = 1e-7;
      for (std::size_t j = 0; j < n_; ++j) {
        if (is_basic_[j] || cols_[j].artificial) continue;
        if (std::abs(at(r, j)) > best_a) {
          best_a = std::abs(at(r, j));
          best = j;
        }
      }
      if (best == npos) continue;  // redundant row; artificial stays basic at 0
      const double value = nonbasic_value(best);
      const std::size_t leaving = basis_[r];
      pivot(r, best);
      beta_[r] = value;
      at_upper_[leaving] = false;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (cols_[j].artificial) {
        cols_[j].upper = 0.0;
        barred_[j] = true;
      }
    }
  }

  // Structural variable moving along the ray entered through column q. A
  // slack entering drags some structural basic variable with it.
  std::size_t ray_variable(std::size_t q) const {
    if (cols_[q].var != npos) return cols_[q].var;
    std::size_t best = npos;
    double mag = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = std::abs(at(i, q));
      if (cols_[basis_[i]].var != npos && a > opt_.pivot_tol && a > mag) {
        mag = a;
        best = cols_[basis_[i]].var;
      }
    }
    return best;
  }

  std::vector<double> primal() const {
    std::vector<double> internal(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (!is_basic_[j]) internal[j] = nonbasic_value(j);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      internal[basis_[i]] = std::clamp(beta_[i], 0.0, cols_[basis_[i]].upper);
    }
    std::vector<double> x(shift_);
    for (std::size_t j = 0; j < n_; ++j) {
      if (cols_[j].var != npos) x[cols_[j].var] += cols_[j].sign * internal[j];
    }
    return x;
  }

  const LinearModel& model_;
  LpOptions opt_;
  std::size_t m_ = 0, n_ = 0;
  std::vector<Column> cols_;
  std::vector<std::vector<std::size_t>> var_cols_;
  std::vector<double> shift_;
  std::vector<double> rhs_;
  std::vector<double> row_sign_;
  std::vector<std::size_t> identity_col_;
  std::vector<double> tab_;
  std::vector<std::size_t> basis_;
  std::vector<double> beta_;
  std::vector<char> is_basic_;
  std::vector<char> at_upper_;
  std::vector<char> barred_;
  std::vector<double> d_;
  double obj_ = 0.0;
  std::size_t pivots_ = 0;
  std::optional<std::size_t> ray_;
  bool bound_conflict_ = false;
};

}  // namespace detail

// Solves the LP with bounds overridden by `lower`/`upper` (one entry per
// column). Integrality is ignored and flagged in the result.
inline SolveResult solve_lp(const LinearModel& model, std::span<const double> lower,
                            std::span<const double> upper, const LpOptions& opt = {}) {
  model.require_valid();
  detail::BoundedTableau tableau(model, lower, upper, opt);
  return tableau.solve();
}

inline SolveResult solve_lp(const LinearModel& model, const LpOptions& opt = {}) {
  std::vector<double> lower, upper;
  lower.reserve(model.num_variables());
  upper.reserve(model.num_variables());
  for (const auto& v : model.variables()) {
    lower.push_back(v.lower);
    upper.push_back(v.upper);
  }
  return solve_lp(model, lower, upper, opt);
}

}  // namespace rgtl
