#pragma once

#include <vector>

#include "rgtl/instance.hpp"
#include "rgtl/tensor.hpp"

namespace rgtl {

enum class Approach { hybrid_purchase = 1, chance_constrained = 2 };
enum class RobustMode { deterministic, robust };
// Aggregated: one penalty variable bounded by the sum over all cells.
// Disaggregated: one non-negative penalty variable per (j, l) cell.
enum class RobustForm { aggregated, disaggregated };

inline const char* to_string(Approach a) {
  return a == Approach::hybrid_purchase ? "hybrid_purchase" : "chance_constrained";
}

// A full assignment of the network decisions, laid out by index rather than
// by model column.
struct Plan {
  Tensor<3> y;  // link open [i][j][p]
  Tensor<4> x;  // flow [i][j][l][p]
  Tensor<2> z;  // origin open [i][l]
  Tensor<2> u;  // shortage [j][l] (deterministic mode)
  Tensor<1> nc; // hybrid trucks [p] (hybrid-purchase approach)
  // Robust mode: aggregated penalty (one entry) or one per (j, l) cell.
  std::vector<double> v;
  Tensor<2> alpha1;
  Tensor<2> alpha2;
  Tensor<2> mu;
};

inline Plan make_zero_plan(const Dimensions& dims) {
  const auto [I, J, P, L] = dims;
  Plan plan;
  plan.y = Tensor<3>({I, J, P});
  plan.x = Tensor<4>({I, J, L, P});
  plan.z = Tensor<2>({I, L});
  plan.u = Tensor<2>({J, L});
  plan.nc = Tensor<1>({P});
  plan.alpha1 = Tensor<2>({J, L});
  plan.alpha2 = Tensor<2>({J, L});
  plan.mu = Tensor<2>({J, L});
  return plan;
}

// Total inbound flow of product l at destination j.
inline double delivered(const Plan& plan, std::size_t j, std::size_t l) {
  double total = 0.0;
  for (std::size_t i = 0; i < plan.x.extent(0); ++i) {
    for (std::size_t p = 0; p < plan.x.extent(3); ++p) total += plan.x(i, j, l, p);
  }
  return total;
}

}  // namespace rgtl
