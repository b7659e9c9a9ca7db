#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "rgtl/branch_and_bound.hpp"
#include "rgtl/formulation.hpp"
#include "rgtl/instance.hpp"
#include "rgtl/lagrangian.hpp"

namespace rgtl {

inline constexpr const char* kBenchHeader = "id,exact_obj,exact_time_s,ld_obj,ld_time_s,gap_percent";

// Returns a copy with every budget set to `gamma` and/or the emission
// quantile replaced by `z`.
inline Instance with_overrides(Instance inst, std::optional<double> gamma, std::optional<double> z) {
  if (gamma) {
    for (double& g : inst.robust.budget.flat()) g = *gamma;
  }
  if (z) inst.chance.quantile = *z;
  return inst;
}

struct BenchConfig {
  Approach approach = Approach::hybrid_purchase;
  RobustMode mode = RobustMode::deterministic;
  RobustForm form = RobustForm::aggregated;
  std::optional<double> gamma;
  // One run per entry; empty keeps each instance's own quantile.
  std::vector<double> z_values;
  MilpParams milp;
  LdConfig ld;
  std::size_t workers = 1;
};

struct BenchRow {
  std::string id;
  std::string group;  // z suffix shared by rows averaged together
  SolveStatus exact_status = SolveStatus::optimal;
  std::string failure;  // non-empty when the row carries no numbers
  double exact_objective = 0.0;
  double exact_time = 0.0;
  double ld_bound = 0.0;
  double ld_time = 0.0;
  std::optional<double> gap_percent;
  bool ld_converged = false;

  bool ok() const { return failure.empty(); }
};

struct BenchEntry {
  std::string id;
  Instance instance;
};

inline std::string format_z(double z) {
  std::ostringstream os;
  os << z;
  return os.str();
}

// Solves one instance exactly and by decomposition. Timing covers model
// construction and solving, never file I/O.
inline BenchRow bench_one(const std::string& id, const Instance& inst, const BenchConfig& cfg) {
  BenchRow row;
  row.id = id;
  using clock = std::chrono::steady_clock;
  try {
    auto t0 = clock::now();
    const ModelBundle bundle = build_model(inst, cfg.approach, cfg.mode, cfg.form);
    const SolveResult exact = solve_milp(bundle.model, cfg.milp);
    row.exact_time = std::chrono::duration<double>(clock::now() - t0).count();
    row.exact_status = exact.status;
    if (!exact.optimal()) {
      row.failure = to_string(exact.status);
      return row;
    }
    row.exact_objective = exact.objective_value;

    LdConfig ld = cfg.ld;
    ld.robust_form = cfg.form;
    t0 = clock::now();
    const LdReport report = run_ld(inst, cfg.approach, cfg.mode, ld);
    row.ld_time = std::chrono::duration<double>(clock::now() - t0).count();
    row.ld_bound = report.bound;
    row.ld_converged = report.converged;
    if (row.exact_objective != 0.0) row.gap_percent = compute_gap(row.exact_objective, row.ld_bound);
  } catch (const StructuralInfeasibility&) {
    row.exact_status = SolveStatus::infeasible;
    row.failure = to_string(SolveStatus::infeasible);
  } catch (const std::exception&) {
    row.failure = "error";
  }
  return row;
}

// Runs every (entry, z) pair on up to cfg.workers threads. Rows come back in
// entry order, z values varying fastest.
inline std::vector<BenchRow> run_bench(const std::vector<BenchEntry>& entries,
                                       const BenchConfig& cfg) {
  struct Job {
    std::string id, group;
    Instance inst;
  };
  std::vector<Job> jobs;
  const bool suffix = cfg.z_values.size() > 1;
  for (const auto& e : entries) {
    if (cfg.z_values.empty()) {
      jobs.push_back({e.id, "", with_overrides(e.instance, cfg.gamma, std::nullopt)});
      continue;
    }
    for (double z : cfg.z_values) {
      const std::string g = suffix ? "/z=" + format_z(z) : "";
      jobs.push_back({e.id + g, g, with_overrides(e.instance, cfg.gamma, z)});
    }
  }

  std::vector<BenchRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      rows[k] = bench_one(jobs[k].id, jobs[k].inst, cfg);
      rows[k].group = jobs[k].group;
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(cfg.workers, jobs.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

inline std::string format_bench_row(const BenchRow& r) {
  if (!r.ok()) return r.id + "," + r.failure + ",,,,";
  return r.id + "," + detail::fixed(r.exact_objective, 6) + "," + detail::fixed(r.exact_time, 3) +
         "," + detail::fixed(r.ld_bound, 6) + "," + detail::fixed(r.ld_time, 3) + "," +
         (r.gap_percent ? detail::fixed(*r.gap_percent, 6) : std::string());
}

// Header, one line per row, then one average line per z group. Averages
// cover successful rows only and name how many were averaged.
inline std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = std::string(kBenchHeader) + "\n";
  std::vector<std::string> groups;
  for (const auto& r : rows) {
    out += format_bench_row(r) + "\n";
    if (std::find(groups.begin(), groups.end(), r.group) == groups.end()) groups.push_back(r.group);
  }
  for (const auto& g : groups) {
    std::size_t n = 0, n_gap = 0;
    double eo = 0, et = 0, lo = 0, lt = 0, gap = 0;
    for (const auto& r : rows) {
      if (r.group != g || !r.ok()) continue;
      ++n;
      eo += r.exact_objective;
      et += r.exact_time;
      lo += r.ld_bound;
      lt += r.ld_time;
      if (r.gap_percent) {
        gap += *r.gap_percent;
        ++n_gap;
      }
    }
    std::string line = "average(n=" + std::to_string(n) + ")" + g;
    if (n == 0) {
      line += ",,,,,";
    } else {
      line += "," + detail::fixed(eo / n, 6) + "," + detail::fixed(et / n, 3) + "," +
              detail::fixed(lo / n, 6) + "," + detail::fixed(lt / n, 3) + "," +
              (n_gap ? detail::fixed(gap / n_gap, 6) : std::string());
    }
    out += line + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instance family manifest

struct ManifestEntry {
  std::string id;
  std::string file;  // relative to the manifest's directory
};

struct Manifest {
  std::uint64_t seed = 0;
  Dimensions dims;
  double step = 0.0;
  std::vector<ManifestEntry> instances;
};

inline std::string serialize_manifest(const Manifest& m) {
  nlohmann::json j;
  j["seed"] = m.seed;
  j["dims"] = {{"I", m.dims.origins}, {"J", m.dims.destinations}, {"P", m.dims.trucks},
               {"L", m.dims.products}};
  j["step"] = m.step;
  j["instances"] = nlohmann::json::array();
  for (const auto& e : m.instances) j["instances"].push_back({{"id", e.id}, {"file", e.file}});
  return j.dump(1) + "\n";
}

inline Manifest parse_manifest(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError(std::string("manifest: malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("instances") || !j["instances"].is_array()) {
    throw InstanceError("manifest: missing field 'instances'");
  }
  Manifest m;
  m.seed = j.value("seed", std::uint64_t{0});
  m.step = j.value("step", 0.0);
  if (j.contains("dims")) {
    const auto& d = j["dims"];
    m.dims = {d.value("I", std::size_t{0}), d.value("J", std::size_t{0}),
              d.value("P", std::size_t{0}), d.value("L", std::size_t{0})};
  }
  for (const auto& e : j["instances"]) {
    if (!e.contains("id") || !e.contains("file")) {
      throw InstanceError("manifest: every instance needs 'id' and 'file'");
    }
    m.instances.push_back({e["id"].get<std::string>(), e["file"].get<std::string>()});
  }
  return m;
}

// Zero-padded ids keep lexicographic and numeric order identical.
inline std::string instance_id(std::size_t k, std::size_t n) {
  const std::size_t width = std::max<std::size_t>(3, std::to_string(n).size());
  std::string s = std::to_string(k + 1);
  return "inst_" + std::string(width - std::min(width, s.size()), '0') + s;
}

}  // namespace rgtl
