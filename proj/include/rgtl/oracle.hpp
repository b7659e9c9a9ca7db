#pragma once

// Brute-force reference solvers. Nothing here reuses the model builders or
// the bounded simplex: the inner LP is a separate textbook tableau and every
// constraint is written straight from the instance data.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rgtl/instance.hpp"
#include "rgtl/plan.hpp"

namespace rgtl::oracle {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

enum class Mode { deterministic, robust_aggregated, robust_disaggregated };

// ---------------------------------------------------------------------------
// Textbook two-phase simplex: min c.x, rows sense in {'<', '>', '='}, x >= 0.
// Dantzig pricing only, an artificial column on every row.

struct DenseLp {
  std::vector<std::vector<double>> rows;
  std::vector<char> sense;
  std::vector<double> rhs;
  std::vector<double> cost;
};

struct DenseLpResult {
  enum class Status { optimal, infeasible, unbounded } status = Status::infeasible;
  double value = 0.0;
  std::vector<double> x;
};

inline DenseLpResult solve_dense_lp(const DenseLp& lp) {
  constexpr double eps = 1e-10;
  const std::size_t m = lp.rows.size();
  const std::size_t n = lp.cost.size();
  std::size_t slacks = 0;
  for (char s : lp.sense) slacks += s != '=';
  const std::size_t art0 = n + slacks;
  const std::size_t width = art0 + m + 1;  // last column holds the rhs
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(width, 0.0));
  std::vector<std::size_t> basis(m);

  std::size_t s = n;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = lp.rows[i][j];
    if (lp.sense[i] == '<') t[i][s++] = 1.0;
    if (lp.sense[i] == '>') t[i][s++] = -1.0;
    t[i][width - 1] = lp.rhs[i];
    if (lp.rhs[i] < 0.0) {
      for (double& v : t[i]) v = -v;
    }
    t[i][art0 + i] = 1.0;
    basis[i] = art0 + i;
  }

  auto pivot = [&](std::size_t r, std::size_t q) {
    const double p = t[r][q];
    for (double& v : t[r]) v /= p;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r || t[i][q] == 0.0) continue;
      const double f = t[i][q];
      for (std::size_t j = 0; j < width; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = q;
  };

  // Runs until no improving column among the first `limit` columns.
  auto run = [&](std::size_t limit) -> bool {
    for (std::size_t guard = 0; guard < 100000; ++guard) {
      std::size_t q = limit;
      double best = -1e-9;
      for (std::size_t j = 0; j < limit; ++j) {
        if (t[m][j] < best) {
          best = t[m][j];
          q = j;
        }
      }
      if (q == limit) return true;
      std::size_t r = m;
      double ratio = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][q] > eps) {
          const double cand = t[i][width - 1] / t[i][q];
          if (r == m || cand < ratio - 1e-12) {
            r = i;
            ratio = cand;
          }
        }
      }
      if (r == m) return false;
      pivot(r, q);
    }
    throw OracleError("dense simplex: iteration guard exceeded");
  };

  // Phase 1: minimise the sum of artificials.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      if (j < art0 || j == width - 1) t[m][j] -= t[i][j];
    }
  }
  run(art0 + m);
  DenseLpResult res;
  double scale = 1.0;
  for (double b : lp.rhs) scale = std::max(scale, std::abs(b));
  if (-t[m][width - 1] > 1e-7 * scale) return res;

  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < art0) continue;
    for (std::size_t j = 0; j < art0; ++j) {
      if (std::abs(t[i][j]) > 1e-9) {
        pivot(i, j);
        break;
      }
    }
  }

  // Phase 2 objective row over the real columns.
  std::fill(t[m].begin(), t[m].end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) t[m][j] = lp.cost[j];
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = basis[i];
    const double cb = b < n ? lp.cost[b] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < width; ++j) t[m][j] -= cb * t[i][j];
  }
  if (!run(art0)) {
    res.status = DenseLpResult::Status::unbounded;
    return res;
  }
  res.status = DenseLpResult::Status::optimal;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) res.x[basis[i]] = t[i][width - 1];
  }
  res.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.value += lp.cost[j] * res.x[j];
  return res;
}

// ---------------------------------------------------------------------------

// Worst-case penalty of one (destination, product) cell:
//   max w (dplus b+ - dminus b-)  s.t.  0 <= b+, b- <= 1,  b+ + b- <= gamma,
// by enumerating the vertices of the two-variable polytope.
inline double protection_oracle(double dev_plus, double dev_minus, double gamma, double w) {
  // Lines a.x = c bounding the polytope.
  const std::array<std::array<double, 3>, 5> lines{{
      {1, 0, 0}, {1, 0, 1}, {0, 1, 0}, {0, 1, 1}, {1, 1, gamma}}};
  auto feasible = [&](double bp, double bm) {
    const double tol = 1e-12;
    return bp >= -tol && bp <= 1 + tol && bm >= -tol && bm <= 1 + tol && bp + bm <= gamma + tol;
  };
  double best = -kUnbounded;
  for (std::size_t a = 0; a < lines.size(); ++a) {
    for (std::size_t b = a + 1; b < lines.size(); ++b) {
      const auto& L1 = lines[a];
      const auto& L2 = lines[b];
      const double det = L1[0] * L2[1] - L1[1] * L2[0];
      if (std::abs(det) < 1e-15) continue;
      const double bp = (L1[2] * L2[1] - L1[1] * L2[2]) / det;
      const double bm = (L1[0] * L2[2] - L1[2] * L2[0]) / det;
      if (!feasible(bp, bm)) continue;
      best = std::max(best, w * (dev_plus * bp - dev_minus * bm));
    }
  }
  return best;
}

// Direct evaluation of the emission chance constraint on link (i, j).
inline bool chance_feasible(const std::vector<int>& link_y, std::size_t i, std::size_t j,
                            const ChanceConfig& chance) {
  double mean = 0.0, var = 0.0;
  for (std::size_t p = 0; p < link_y.size(); ++p) {
    const double y = link_y[p];
    mean += chance.emission_mean(p) * y;
    var += chance.emission_var(p) * y * y;
  }
  return mean + chance.quantile * std::sqrt(var) <= chance.threshold(i, j) + 1e-9;
}

struct OracleResult {
  double objective = kUnbounded;
  Plan assignment;
  std::size_t enumerated_count = 0;
};

inline constexpr std::size_t kMaxOracleBinaries = 20;

namespace detail {

// Continuous part for fixed y and z; returns the LP and fills plan.x/u/v.
inline double solve_continuous(const Instance& inst, Mode mode, Plan& plan) {
  const auto [I, J, P, L] = inst.dims;
  struct Flow { std::size_t i, j, l, p; };
  std::vector<Flow> flows;
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t l = 0; l < L; ++l)
        for (std::size_t p = 0; p < P; ++p)
          if (plan.y(i, j, p) > 0.5 && plan.z(i, l) > 0.5) flows.push_back({i, j, l, p});

  const std::size_t nf = flows.size();
  const std::size_t cells = J * L;
  const std::size_t extra = mode == Mode::robust_aggregated ? 1 : cells;
  const std::size_t n = nf + extra;
  DenseLp lp;
  lp.cost.assign(n, 0.0);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& fl = flows[f];
    lp.cost[f] = inst.transport_cost(fl.i, fl.j, fl.l, fl.p);
  }
  for (std::size_t k = 0; k < extra; ++k) {
    lp.cost[nf + k] = mode == Mode::deterministic
                          ? inst.shortage_penalty(k / L, k % L)
                          : 1.0;
  }
  auto add_row = [&](std::vector<double> row, char sense, double rhs) {
    lp.rows.push_back(std::move(row));
    lp.sense.push_back(sense);
    lp.rhs.push_back(rhs);
  };
  // Truck capacity on every open link.
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t p = 0; p < P; ++p) {
        if (plan.y(i, j, p) < 0.5) continue;
        std::vector<double> row(n, 0.0);
        bool any = false;
        for (std::size_t f = 0; f < nf; ++f)
          if (flows[f].i == i && flows[f].j == j && flows[f].p == p) row[f] = 1.0, any = true;
        double cap = 0.0;
        for (std::size_t l = 0; l < L; ++l) cap += inst.truck_capacity(l, p);
        if (any) add_row(std::move(row), '<', cap);
      }
  // Origin capacity for every open origin-product.
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t l = 0; l < L; ++l) {
      if (plan.z(i, l) < 0.5) continue;
      std::vector<double> row(n, 0.0);
      bool any = false;
      for (std::size_t f = 0; f < nf; ++f)
        if (flows[f].i == i && flows[f].l == l) row[f] = 1.0, any = true;
      if (any) add_row(std::move(row), '<', inst.origin_capacity(i, l));
    }
  // Shortage / penalty rows.
  if (mode == Mode::robust_aggregated) {
    std::vector<double> row(n, 0.0);
    double rhs = 0.0;
    for (std::size_t f = 0; f < nf; ++f)
      row[f] = inst.shortage_penalty(flows[f].j, flows[f].l);
    row[nf] = 1.0;
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t l = 0; l < L; ++l) {
        const double w = inst.shortage_penalty(j, l);
        rhs += w * inst.nominal_demand(j, l) +
               protection_oracle(inst.robust.dev_plus(j, l), inst.robust.dev_minus(j, l),
                                 inst.robust.budget(j, l), w);
      }
    add_row(std::move(row), '>', rhs);
  } else {
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t l = 0; l < L; ++l) {
        const std::size_t k = j * L + l;
        const double w = inst.shortage_penalty(j, l);
        std::vector<double> row(n, 0.0);
        double rhs = 0.0;
        if (mode == Mode::deterministic) {
          for (std::size_t f = 0; f < nf; ++f)
            if (flows[f].j == j && flows[f].l == l) row[f] = 1.0;
          rhs = inst.nominal_demand(j, l);
        } else {
          for (std::size_t f = 0; f < nf; ++f)
            if (flows[f].j == j && flows[f].l == l) row[f] = w;
          rhs = w * inst.nominal_demand(j, l) +
                protection_oracle(inst.robust.dev_plus(j, l), inst.robust.dev_minus(j, l),
                                  inst.robust.budget(j, l), w);
        }
        row[nf + k] = 1.0;
        add_row(std::move(row), '>', rhs);
      }
  }

  const auto res = solve_dense_lp(lp);
  if (res.status != DenseLpResult::Status::optimal) {
    throw OracleError("oracle: continuous subproblem not optimal");
  }
  for (double& v : plan.x.flat()) v = 0.0;
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& fl = flows[f];
    plan.x(fl.i, fl.j, fl.l, fl.p) = res.x[f];
  }
  plan.v.clear();
  for (double& v : plan.u.flat()) v = 0.0;
  for (std::size_t k = 0; k < extra; ++k) {
    if (mode == Mode::deterministic) {
      plan.u(k / L, k % L) = res.x[nf + k];
    } else {
      plan.v.push_back(res.x[nf + k]);
    }
  }
  return res.value;
}

}  // namespace detail

// Exhaustive search over all (y, z) binaries in lexicographic order (y first,
// then z), solving the continuous remainder of each by LP. Ties keep the
// lexicographically smallest assignment. The chance-constrained approach is
// enforced by evaluating the emission constraint on every link directly.
inline OracleResult brute_force_solve(const Instance& inst, Approach approach,
                                      RobustMode robust_mode,
                                      RobustForm form = RobustForm::aggregated) {
  const bool hybrid = approach == Approach::hybrid_purchase;
  const Mode mode = robust_mode == RobustMode::deterministic ? Mode::deterministic
                    : form == RobustForm::aggregated         ? Mode::robust_aggregated
                                                             : Mode::robust_disaggregated;
  const auto violations = validate(inst);
  if (!violations.empty()) throw OracleError("oracle: invalid instance: " + violations.front());
  const auto [I, J, P, L] = inst.dims;
  const std::size_t ny = I * J * P, nz = I * L;
  if (ny + nz > kMaxOracleBinaries) {
    throw OracleError("oracle: " + std::to_string(ny + nz) + " binaries exceed the cap of " +
                      std::to_string(kMaxOracleBinaries));
  }

  OracleResult best;
  Plan plan = make_zero_plan(inst.dims);
  // Bit k of the mask (counted from the most significant end) is entry k.
  auto bit = [](std::uint32_t mask, std::size_t k, std::size_t width) {
    return static_cast<int>(mask >> (width - 1 - k) & 1u);
  };

  for (std::uint32_t ymask = 0; ymask < (1u << ny); ++ymask) {
    for (std::size_t k = 0; k < ny; ++k) plan.y.flat()[k] = bit(ymask, k, ny);

    bool ok = true;
    for (std::size_t j = 0; ok && j < J; ++j) {
      double open = 0.0;
      for (std::size_t i = 0; i < I; ++i)
        for (std::size_t p = 0; p < P; ++p) open += plan.y(i, j, p);
      ok = open >= 1.0;
    }
    if (!hybrid) {
      for (std::size_t i = 0; ok && i < I; ++i)
        for (std::size_t j = 0; ok && j < J; ++j) {
          std::vector<int> link(P);
          for (std::size_t p = 0; p < P; ++p) link[p] = static_cast<int>(plan.y(i, j, p));
          ok = chance_feasible(link, i, j, inst.chance);
        }
    }
    if (!ok) continue;

    double link_cost = 0.0;
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t j = 0; j < J; ++j)
        for (std::size_t p = 0; p < P; ++p) {
          link_cost += inst.link_setup_cost(i, j, p) * plan.y(i, j, p);
          if (hybrid) link_cost += inst.hybrid_truck_cost(p) * plan.y(i, j, p);
        }

    for (std::uint32_t zmask = 0; zmask < (1u << nz); ++zmask) {
      ++best.enumerated_count;
      double fixed = link_cost;
      for (std::size_t k = 0; k < nz; ++k) {
        plan.z.flat()[k] = bit(zmask, k, nz);
        fixed += inst.origin_open_cost.flat()[k] * plan.z.flat()[k];
      }
      // The continuous remainder is never negative.
      if (fixed >= best.objective) continue;
      const double total = fixed + detail::solve_continuous(inst, mode, plan);
      if (total < best.objective - 1e-9 * (1.0 + std::abs(total))) {
        best.objective = total;
        best.assignment = plan;
      }
    }
  }
  if (best.objective == kUnbounded) throw OracleError("oracle: no feasible binary assignment");

  Plan& a = best.assignment;
  for (std::size_t p = 0; p < P; ++p) {
    double count = 0.0;
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t j = 0; j < J; ++j) count += a.y(i, j, p);
    a.nc(p) = hybrid ? count : 0.0;
  }
  if (mode != Mode::deterministic) {
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t l = 0; l < L; ++l) {
        const double dp = inst.robust.dev_plus(j, l);
        const bool full = inst.robust.budget(j, l) >= 1.0;
        a.alpha1(j, l) = full ? dp : 0.0;
        a.mu(j, l) = full ? 0.0 : dp;
        a.alpha2(j, l) = std::max(0.0, inst.robust.dev_minus(j, l) - a.mu(j, l));
      }
  }
  return best;
}

}  // namespace rgtl::oracle
