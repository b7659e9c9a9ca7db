#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rgtl/tensor.hpp"

namespace rgtl {

struct Dimensions {
  std::size_t origins = 0;       // I
  std::size_t destinations = 0;  // J
  std::size_t trucks = 0;        // P
  std::size_t products = 0;      // L

  bool operator==(const Dimensions&) const = default;
};

// Box-shaped demand uncertainty with a per-(destination, product) budget.
struct RobustConfig {
  Tensor<2> dev_plus;   // [j][l]
  Tensor<2> dev_minus;  // [j][l]
  Tensor<2> budget;     // [j][l], in [0, 2]

  bool operator==(const RobustConfig&) const = default;
};

// Normally distributed truck emissions and per-link thresholds. `quantile`
// is the standard-normal quantile of the confidence level and may be
// negative.
struct ChanceConfig {
  Tensor<1> emission_mean;  // [p]
  Tensor<1> emission_var;   // [p]
  Tensor<2> threshold;      // [i][j]
  double quantile = 0.0;

  bool operator==(const ChanceConfig&) const = default;
};

struct Instance {
  Dimensions dims;
  Tensor<3> link_setup_cost;    // c[i][j][p]
  Tensor<4> transport_cost;     // q[i][j][l][p]
  Tensor<2> origin_open_cost;   // h[i][l]
  Tensor<2> shortage_penalty;   // w[j][l]
  Tensor<2> truck_capacity;     // b[l][p]
  Tensor<2> origin_capacity;    // k[i][l]
  Tensor<1> hybrid_truck_cost;  // cbc[p]
  Tensor<2> nominal_demand;     // D[j][l]
  RobustConfig robust;
  ChanceConfig chance;

  // Right-hand-side multiplier of the truck capacity constraint: the sum over
  // products of b[l][p].
  double link_capacity(std::size_t p) const {
    double total = 0.0;
    for (std::size_t l = 0; l < dims.products; ++l) {
      total += truck_capacity(l, p);
    }
    return total;
  }

  bool operator==(const Instance&) const = default;
};

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All-zero instance with every array shaped for `dims`.
inline Instance make_zero_instance(const Dimensions& dims) {
  const auto [I, J, P, L] = dims;
  Instance inst;
  inst.dims = dims;
  inst.link_setup_cost = Tensor<3>({I, J, P});
  inst.transport_cost = Tensor<4>({I, J, L, P});
  inst.origin_open_cost = Tensor<2>({I, L});
  inst.shortage_penalty = Tensor<2>({J, L});
  inst.truck_capacity = Tensor<2>({L, P});
  inst.origin_capacity = Tensor<2>({I, L});
  inst.hybrid_truck_cost = Tensor<1>({P});
  inst.nominal_demand = Tensor<2>({J, L});
  inst.robust.dev_plus = Tensor<2>({J, L});
  inst.robust.dev_minus = Tensor<2>({J, L});
  inst.robust.budget = Tensor<2>({J, L});
  inst.chance.emission_mean = Tensor<1>({P});
  inst.chance.emission_var = Tensor<1>({P});
  inst.chance.threshold = Tensor<2>({I, J});
  return inst;
}

namespace detail {

template <std::size_t Rank>
void check_array(std::vector<std::string>& out, const std::string& field,
                 const Tensor<Rank>& t,
                 const std::array<std::size_t, Rank>& expected,
                 bool non_negative) {
  if (t.shape() != expected) {
    out.push_back(field + ": shape " + index_string(t.shape()) +
                  " does not match dims " + index_string(expected));
    return;
  }
  for (std::size_t pos = 0; pos < t.size(); ++pos) {
    const double v = t.flat()[pos];
    const std::string where = field + index_string(t.unravel(pos));
    if (!std::isfinite(v)) {
      out.push_back(where + " is not finite");
    } else if (non_negative && v < 0.0) {
      out.push_back(where + " = " + std::to_string(v) + " is negative");
    }
  }
}

}  // namespace detail

// Every broken invariant of `inst`, one description per violation naming the
// field and index. Empty means the instance is well formed.
inline std::vector<std::string> validate(const Instance& inst) {
  std::vector<std::string> out;
  const auto [I, J, P, L] = inst.dims;
  if (I == 0 || J == 0 || P == 0 || L == 0) {
    out.push_back("dims: every count must be at least 1");
    return out;
  }
  using detail::check_array;
  check_array<3>(out, "link_setup_cost", inst.link_setup_cost, {I, J, P}, true);
  check_array<4>(out, "transport_cost", inst.transport_cost, {I, J, L, P}, true);
  check_array<2>(out, "origin_open_cost", inst.origin_open_cost, {I, L}, true);
  check_array<2>(out, "shortage_penalty", inst.shortage_penalty, {J, L}, true);
  check_array<2>(out, "truck_capacity", inst.truck_capacity, {L, P}, true);
  check_array<2>(out, "origin_capacity", inst.origin_capacity, {I, L}, true);
  check_array<1>(out, "hybrid_truck_cost", inst.hybrid_truck_cost, {P}, true);
  check_array<2>(out, "nominal_demand", inst.nominal_demand, {J, L}, true);
  check_array<2>(out, "dev_plus", inst.robust.dev_plus, {J, L}, true);
  check_array<2>(out, "dev_minus", inst.robust.dev_minus, {J, L}, true);
  check_array<2>(out, "budget", inst.robust.budget, {J, L}, true);
  check_array<1>(out, "emission_mean", inst.chance.emission_mean, {P}, true);
  check_array<1>(out, "emission_var", inst.chance.emission_var, {P}, true);
  check_array<2>(out, "threshold", inst.chance.threshold, {I, J}, true);
  if (!std::isfinite(inst.chance.quantile)) {
    out.push_back("quantile is not finite");
  }

  const std::array<std::size_t, 2> cell{J, L};
  if (inst.robust.dev_minus.shape() == cell &&
      inst.nominal_demand.shape() == cell) {
    for (std::size_t j = 0; j < J; ++j) {
      for (std::size_t l = 0; l < L; ++l) {
        if (inst.robust.dev_minus(j, l) > inst.nominal_demand(j, l)) {
          out.push_back("dev_minus" + index_string<2>({j, l}) +
                        " exceeds nominal_demand" + index_string<2>({j, l}));
        }
      }
    }
  }
  if (inst.robust.budget.shape() == cell) {
    for (std::size_t j = 0; j < J; ++j) {
      for (std::size_t l = 0; l < L; ++l) {
        if (inst.robust.budget(j, l) > 2.0) {
          out.push_back("budget" + index_string<2>({j, l}) +
                        " exceeds 2 (two deviation indicators per cell)");
        }
      }
    }
  }
  return out;
}

inline void require_valid(const Instance& inst) {
  const auto violations = validate(inst);
  if (!violations.empty()) {
    std::string msg = "invalid instance:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw InstanceError(msg);
  }
}

// ---------------------------------------------------------------------------
// Generation

// Uniform sampling ranges for the generator. Deviations are a fraction of
// the (scaled) nominal demand.
struct GeneratorRanges {
  std::pair<double, double> link_setup{100, 1000};
  std::pair<double, double> transport{1, 20};
  std::pair<double, double> origin_open{500, 5000};
  std::pair<double, double> shortage{50, 200};
  std::pair<double, double> truck_capacity{50, 150};
  std::pair<double, double> origin_capacity{200, 800};
  std::pair<double, double> hybrid_cost{1000, 10000};
  std::pair<double, double> demand{50, 300};
  std::pair<double, double> emission_mean{5, 15};
  std::pair<double, double> emission_var{1, 9};
  double deviation_fraction = 0.1;
  double budget = 1.0;
  double quantile = 3.0;
};

namespace detail {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  // Two-decimal values keep instance files readable.
  double uniform(std::pair<double, double> range) {
    std::uniform_real_distribution<double> dist(range.first, range.second);
    return std::round(dist(engine_) * 100.0) / 100.0;
  }

  template <std::size_t Rank>
  void fill(Tensor<Rank>& t, std::pair<double, double> range) {
    for (double& v : t.flat()) v = uniform(range);
  }

 private:
  std::mt19937_64 engine_;
};

inline double emission_at(const ChanceConfig& chance,
                          const std::vector<std::size_t>& trucks, double z) {
  double mean = 0.0, var = 0.0;
  for (std::size_t p : trucks) {
    mean += chance.emission_mean(p);
    var += chance.emission_var(p);
  }
  return mean + z * std::sqrt(var);
}

// Thresholds near the median pair emission at the configured quantile, so
// about half of the truck pairs violate, floored just above the worst single
// truck so every link stays usable by at least one truck.
inline void tune_thresholds(Instance& inst, Sampler& sampler, double z) {
  const std::size_t P = inst.dims.trucks;
  double worst_single = 0.0;
  for (std::size_t p = 0; p < P; ++p) {
    worst_single = std::max(worst_single, emission_at(inst.chance, {p}, z));
  }
  std::vector<double> pairs;
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t r = p + 1; r < P; ++r) {
      pairs.push_back(emission_at(inst.chance, {p, r}, z));
    }
  }
  double centre = 1.5 * worst_single;
  if (!pairs.empty()) {
    std::sort(pairs.begin(), pairs.end());
    const std::size_t n = pairs.size();
    centre = n % 2 ? pairs[n / 2] : 0.5 * (pairs[n / 2 - 1] + pairs[n / 2]);
  }
  const double floor = std::ceil(worst_single * 1.01 * 100.0) / 100.0;
  for (double& td : inst.chance.threshold.flat()) {
    td = std::max(floor, std::round(centre * sampler.uniform({0.9, 1.1}) * 100.0) / 100.0);
  }
}

}  // namespace detail

// Seeded family of `num_instances` instances sharing one base draw; instance
// t has nominal demand D * (1 + t * scale_step) and deviations proportional
// to it.
inline std::vector<Instance> generate_family(std::uint64_t seed,
                                             const Dimensions& dims,
                                             std::size_t num_instances,
                                             double scale_step,
                                             const GeneratorRanges& ranges = {}) {
  if (dims.origins == 0 || dims.destinations == 0 || dims.trucks == 0 ||
      dims.products == 0) {
    throw InstanceError("generate_family: every dimension must be at least 1");
  }
  if (num_instances == 0) {
    throw InstanceError("generate_family: num_instances must be at least 1");
  }
  if (!(scale_step > 0.0)) {
    throw InstanceError("generate_family: scale_step must be positive");
  }

  detail::Sampler sampler(seed);
  Instance base = make_zero_instance(dims);
  sampler.fill(base.link_setup_cost, ranges.link_setup);
  sampler.fill(base.transport_cost, ranges.transport);
  sampler.fill(base.origin_open_cost, ranges.origin_open);
  sampler.fill(base.shortage_penalty, ranges.shortage);
  sampler.fill(base.truck_capacity, ranges.truck_capacity);
  sampler.fill(base.origin_capacity, ranges.origin_capacity);
  sampler.fill(base.hybrid_truck_cost, ranges.hybrid_cost);
  sampler.fill(base.nominal_demand, ranges.demand);
  sampler.fill(base.chance.emission_mean, ranges.emission_mean);
  sampler.fill(base.chance.emission_var, ranges.emission_var);
  base.chance.quantile = ranges.quantile;
  detail::tune_thresholds(base, sampler, ranges.quantile);
  for (double& g : base.robust.budget.flat()) g = ranges.budget;

  std::vector<Instance> family;
  family.reserve(num_instances);
  for (std::size_t t = 0; t < num_instances; ++t) {
    Instance inst = base;
    const double scale = 1.0 + static_cast<double>(t) * scale_step;
    for (std::size_t pos = 0; pos < inst.nominal_demand.size(); ++pos) {
      const double d = base.nominal_demand.flat()[pos] * scale;
      inst.nominal_demand.flat()[pos] = d;
      inst.robust.dev_plus.flat()[pos] = ranges.deviation_fraction * d;
      inst.robust.dev_minus.flat()[pos] = ranges.deviation_fraction * d;
    }
    family.push_back(std::move(inst));
  }
  return family;
}

// ---------------------------------------------------------------------------
// JSON (de)serialization

namespace detail {

template <std::size_t Rank>
nlohmann::json to_nested(const Tensor<Rank>& t, std::size_t axis = 0,
                         std::size_t base = 0) {
  nlohmann::json arr = nlohmann::json::array();
  std::size_t stride = 1;
  for (std::size_t a = axis + 1; a < Rank; ++a) stride *= t.extent(a);
  for (std::size_t k = 0; k < t.extent(axis); ++k) {
    if (axis + 1 == Rank) {
      arr.push_back(t.flat()[base + k]);
    } else {
      arr.push_back(to_nested(t, axis + 1, base + k * stride));
    }
  }
  return arr;
}

template <std::size_t Rank>
void from_nested(const nlohmann::json& node, Tensor<Rank>& t,
                 const std::string& field, std::size_t axis, std::size_t& pos,
                 std::array<std::size_t, Rank>& at) {
  std::string prefix;
  for (std::size_t a = 0; a < axis; ++a) {
    prefix += '[' + std::to_string(at[a]) + ']';
  }
  if (!node.is_array()) {
    throw InstanceError("field '" + field + prefix + "': expected an array");
  }
  if (node.size() != t.extent(axis)) {
    throw InstanceError("field '" + field + prefix + "': shape mismatch, expected " +
                        std::to_string(t.extent(axis)) + " entries, found " +
                        std::to_string(node.size()));
  }
  for (std::size_t k = 0; k < node.size(); ++k) {
    at[axis] = k;
    if (axis + 1 == Rank) {
      if (!node[k].is_number()) {
        throw InstanceError("field '" + field + index_string(at) +
                            "': expected a number");
      }
      t.flat()[pos++] = node[k].get<double>();
    } else {
      from_nested(node[k], t, field, axis + 1, pos, at);
    }
  }
}

inline const nlohmann::json& require_key(const nlohmann::json& obj,
                                         const char* key, const char* role) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw InstanceError(std::string("missing field '") + key + "' (" + role +
                        ")");
  }
  return obj.at(key);
}

template <std::size_t Rank>
void read_tensor(const nlohmann::json& obj, const char* key, const char* role,
                 Tensor<Rank>& t) {
  const auto& node = require_key(obj, key, role);
  std::size_t pos = 0;
  std::array<std::size_t, Rank> at{};
  from_nested(node, t, std::string(key) + " (" + role + ")", 0, pos, at);
}

}  // namespace detail

inline nlohmann::json to_json(const Instance& inst) {
  using detail::to_nested;
  nlohmann::json doc;
  doc["dims"] = {{"I", inst.dims.origins},
                 {"J", inst.dims.destinations},
                 {"P", inst.dims.trucks},
                 {"L", inst.dims.products}};
  doc["c"] = to_nested(inst.link_setup_cost);
  doc["q"] = to_nested(inst.transport_cost);
  doc["h"] = to_nested(inst.origin_open_cost);
  doc["w"] = to_nested(inst.shortage_penalty);
  doc["b"] = to_nested(inst.truck_capacity);
  doc["k"] = to_nested(inst.origin_capacity);
  doc["cbc"] = to_nested(inst.hybrid_truck_cost);
  doc["D"] = to_nested(inst.nominal_demand);
  doc["robust"] = {{"dev_plus", to_nested(inst.robust.dev_plus)},
                   {"dev_minus", to_nested(inst.robust.dev_minus)},
                   {"budget", to_nested(inst.robust.budget)}};
  doc["chance"] = {{"mean", to_nested(inst.chance.emission_mean)},
                   {"var", to_nested(inst.chance.emission_var)},
                   {"threshold", to_nested(inst.chance.threshold)},
                   {"z", inst.chance.quantile}};
  return doc;
}

inline std::string serialize_instance(const Instance& inst) {
  return to_json(inst).dump(1) + "\n";
}

inline Instance parse_instance(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError(std::string("malformed instance text: ") + e.what());
  }

  const auto& dims_node = detail::require_key(doc, "dims", "dimensions");
  Dimensions dims;
  auto count = [&](const char* key) -> std::size_t {
    const auto& v = detail::require_key(dims_node, key, "dimensions");
    if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) {
      throw InstanceError(std::string("field 'dims.") + key +
                          "': expected a positive integer");
    }
    return v.get<std::size_t>();
  };
  dims.origins = count("I");
  dims.destinations = count("J");
  dims.trucks = count("P");
  dims.products = count("L");

  Instance inst = make_zero_instance(dims);
  using detail::read_tensor;
  read_tensor(doc, "c", "link_setup_cost", inst.link_setup_cost);
  read_tensor(doc, "q", "transport_cost", inst.transport_cost);
  read_tensor(doc, "h", "origin_open_cost", inst.origin_open_cost);
  read_tensor(doc, "w", "shortage_penalty", inst.shortage_penalty);
  read_tensor(doc, "b", "truck_capacity", inst.truck_capacity);
  read_tensor(doc, "k", "origin_capacity", inst.origin_capacity);
  read_tensor(doc, "cbc", "hybrid_truck_cost", inst.hybrid_truck_cost);
  read_tensor(doc, "D", "nominal_demand", inst.nominal_demand);

  const auto& robust = detail::require_key(doc, "robust", "robust");
  read_tensor(robust, "dev_plus", "dev_plus", inst.robust.dev_plus);
  read_tensor(robust, "dev_minus", "dev_minus", inst.robust.dev_minus);
  read_tensor(robust, "budget", "budget", inst.robust.budget);

  const auto& chance = detail::require_key(doc, "chance", "chance");
  read_tensor(chance, "mean", "emission_mean", inst.chance.emission_mean);
  read_tensor(chance, "var", "emission_var", inst.chance.emission_var);
  read_tensor(chance, "threshold", "threshold", inst.chance.threshold);
  const auto& z = detail::require_key(chance, "z", "quantile");
  if (!z.is_number()) {
    throw InstanceError("field 'chance.z' (quantile): expected a number");
  }
  inst.chance.quantile = z.get<double>();
  return inst;
}

}  // namespace rgtl
