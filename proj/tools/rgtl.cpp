// Command-line driver: generate instance families, solve them exactly or by
// Lagrangian decomposition, export LP files and write benchmark tables.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rgtl/rgtl.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kInfeasible = 3, kLimit = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelOptions {
  int approach = 1;
  bool robust = false;
  bool disaggregated = false;
  std::optional<double> gamma;
  std::vector<double> z;
};

void add_model_options(CLI::App* cmd, ModelOptions& o) {
  cmd->add_option("--approach", o.approach, "1: hybrid-truck purchase, 2: emission threshold")
      ->check(CLI::IsMember({1, 2}));
  cmd->add_flag("--robust", o.robust, "Protect against budgeted demand deviations");
  cmd->add_flag("--disaggregated", o.disaggregated, "One robust penalty variable per cell");
  cmd->add_option("--gamma", o.gamma, "Override every uncertainty budget")
      ->check(CLI::Range(0.0, 2.0));
  cmd->add_option("--z", o.z, "Override the emission quantile (repeatable for bench)");
}

rgtl::Approach approach_of(const ModelOptions& o) {
  return o.approach == 1 ? rgtl::Approach::hybrid_purchase : rgtl::Approach::chance_constrained;
}
rgtl::RobustMode mode_of(const ModelOptions& o) {
  return o.robust ? rgtl::RobustMode::robust : rgtl::RobustMode::deterministic;
}
rgtl::RobustForm form_of(const ModelOptions& o) {
  return o.disaggregated ? rgtl::RobustForm::disaggregated : rgtl::RobustForm::aggregated;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

rgtl::Dimensions parse_dims(const std::string& s) {
  std::vector<std::size_t> v;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const long long x = std::stoll(part, &used);
      if (used != part.size() || x < 1) throw std::invalid_argument(part);
      v.push_back(static_cast<std::size_t>(x));
    } catch (const std::exception&) {
      throw UsageError("--dims expects four positive integers I,J,P,L, got '" + s + "'");
    }
  }
  if (v.size() != 4) throw UsageError("--dims expects four positive integers I,J,P,L, got '" + s + "'");
  return {v[0], v[1], v[2], v[3]};
}

rgtl::Instance load_instance(const std::string& path, const ModelOptions& o) {
  if (o.z.size() > 1) throw UsageError("--z may be repeated only for bench");
  rgtl::Instance inst = rgtl::parse_instance(read_file(path));
  std::optional<double> z;
  if (!o.z.empty()) z = o.z.front();
  return rgtl::with_overrides(std::move(inst), o.gamma, z);
}

int cmd_generate(std::uint64_t seed, const std::string& dims, std::size_t n, double step,
                 const std::string& out_dir) {
  if (n == 0) throw UsageError("--n must be at least 1");
  if (!(step > 0.0)) throw UsageError("--step must be positive");
  const rgtl::Dimensions d = parse_dims(dims);
  const auto family = rgtl::generate_family(seed, d, n, step);
  fs::create_directories(out_dir);
  rgtl::Manifest manifest{seed, d, step, {}};
  for (std::size_t k = 0; k < family.size(); ++k) {
    const std::string id = rgtl::instance_id(k, n);
    const std::string file = id + ".json";
    write_file(fs::path(out_dir) / file, rgtl::serialize_instance(family[k]));
    manifest.instances.push_back({id, file});
  }
  write_file(fs::path(out_dir) / "manifest.json", rgtl::serialize_manifest(manifest));
  std::cout << "wrote " << n << " instances and manifest.json to " << out_dir << "\n";
  return kOk;
}

int cmd_solve(const std::string& path, const ModelOptions& o, double time_limit) {
  const rgtl::Instance inst = load_instance(path, o);
  rgtl::ModelBundle bundle;
  try {
    bundle = rgtl::build_model(inst, approach_of(o), mode_of(o), form_of(o));
  } catch (const rgtl::StructuralInfeasibility& e) {
    std::cout << "status: infeasible\n"
              << "diagnosis: " << e.what() << "\n";
    return kInfeasible;
  }
  rgtl::MilpParams params;
  params.time_limit = time_limit;
  const rgtl::SolveResult r = rgtl::solve_milp(bundle.model, params);
  std::printf("status: %s\n", rgtl::to_string(r.status));
  if (!r.primal_values.empty()) std::printf("objective: %.6f\n", r.objective_value);
  if (r.status == rgtl::SolveStatus::iteration_limit) std::printf("best_bound: %.6f\n", r.best_bound);
  std::printf("nodes: %zu\ntime_s: %.3f\n", r.node_count, r.wall_time);
  switch (r.status) {
    case rgtl::SolveStatus::optimal: return kOk;
    case rgtl::SolveStatus::infeasible: return kInfeasible;
    case rgtl::SolveStatus::iteration_limit: return kLimit;
    case rgtl::SolveStatus::unbounded: return kFailure;
  }
  return kFailure;
}

void write_trace(const fs::path& path, const rgtl::LdReport& report) {
  std::string out = "iter,SP1,SP2,Z_lb,Z_up,gap\n";
  char buf[256];
  for (const auto& h : report.history) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g,%.9g,%.9g\n", h.iter, h.sp1, h.sp2, h.z_lb,
                  h.z_up, h.z_up - h.z_lb);
    out += buf;
  }
  write_file(path, out);
}

int cmd_ld(const std::string& path, const ModelOptions& o, const rgtl::LdConfig& base,
           const std::string& trace) {
  const rgtl::Instance inst = load_instance(path, o);
  rgtl::LdConfig cfg = base;
  cfg.robust_form = form_of(o);
  rgtl::LdReport report;
  try {
    report = rgtl::run_ld(inst, approach_of(o), mode_of(o), cfg);
  } catch (const rgtl::StructuralInfeasibility& e) {
    std::cout << "status: infeasible\n"
              << "diagnosis: " << e.what() << "\n";
    return kInfeasible;
  }
  if (!trace.empty()) write_trace(trace, report);
  std::printf("status: %s\n", report.converged ? "converged" : "iteration_limit");
  std::printf("bound: %.6f\nz_up: %.6f\niterations: %zu\ntime_s: %.3f\n", report.bound,
              report.z_up, report.iterations, report.total_time);
  if (report.box_active) {
    std::cerr << "warning: a multiplier sits at the box limit " << report.lambda_max << "\n";
  }
  return report.converged ? kOk : kLimit;
}

int cmd_export(const std::string& path, const ModelOptions& o, const std::string& out) {
  const rgtl::Instance inst = load_instance(path, o);
  rgtl::ModelBundle bundle;
  try {
    bundle = rgtl::build_model(inst, approach_of(o), mode_of(o), form_of(o));
  } catch (const rgtl::StructuralInfeasibility& e) {
    std::cout << "status: infeasible\n"
              << "diagnosis: " << e.what() << "\n";
    return kInfeasible;
  }
  const std::string text = rgtl::to_lp_format(bundle.model);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return kOk;
}

int cmd_bench(const std::string& manifest_path, const ModelOptions& o, const rgtl::LdConfig& ld,
              std::optional<std::uint64_t> seed, const std::string& dims, std::size_t n,
              double step, std::size_t workers, const std::string& out) {
  std::vector<rgtl::BenchEntry> entries;
  if (!manifest_path.empty()) {
    const rgtl::Manifest m = rgtl::parse_manifest(read_file(manifest_path));
    const fs::path dir = fs::path(manifest_path).parent_path();
    for (const auto& e : m.instances) {
      entries.push_back({e.id, rgtl::parse_instance(read_file(dir / e.file))});
    }
  } else {
    if (!seed) throw UsageError("bench needs a manifest or --seed to generate a family");
    if (n == 0) throw UsageError("--n must be at least 1");
    const auto family = rgtl::generate_family(*seed, parse_dims(dims), n, step);
    for (std::size_t k = 0; k < family.size(); ++k) {
      entries.push_back({rgtl::instance_id(k, n), family[k]});
    }
  }
  if (workers == 0) throw UsageError("--workers must be at least 1");
  rgtl::BenchConfig cfg;
  cfg.approach = approach_of(o);
  cfg.mode = mode_of(o);
  cfg.form = form_of(o);
  cfg.gamma = o.gamma;
  cfg.z_values = o.z;
  cfg.ld = ld;
  cfg.workers = workers;
  const std::string csv = rgtl::bench_csv(rgtl::run_bench(entries, cfg));
  if (out.empty() || out == "-") {
    std::cout << csv;
  } else {
    write_file(out, csv);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust green transportation-location toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string dims = "3,5,2,2";
  std::size_t n = 10;
  double step = 0.05;
  std::string out;
  std::string out_dir = "instances";
  auto* gen = app.add_subcommand("generate", "Write a seeded instance family and manifest");
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--dims", dims, "I,J,P,L");
  gen->add_option("--n", n, "Number of instances");
  gen->add_option("--step", step, "Relative demand growth between consecutive instances");
  gen->add_option("--out", out_dir, "Output directory");

  ModelOptions model;
  std::string instance_path;
  double time_limit = rgtl::kInf;
  auto* solve = app.add_subcommand("solve", "Solve one instance by branch-and-bound");
  solve->add_option("instance", instance_path, "Instance JSON file")->required();
  add_model_options(solve, model);
  solve->add_option("--time-limit", time_limit, "Seconds before stopping with the incumbent");

  rgtl::LdConfig ld;
  std::string trace;
  auto* ldc = app.add_subcommand("ld", "Run the Lagrangian decomposition on one instance");
  ldc->add_option("instance", instance_path, "Instance JSON file")->required();
  add_model_options(ldc, model);
  ldc->add_option("--epsilon", ld.epsilon, "Relative convergence tolerance");
  ldc->add_option("--max-iter", ld.max_iter, "Iteration cap");
  ldc->add_option("--trace", trace, "Per-iteration CSV output");

  auto* exp = app.add_subcommand("export-lp", "Write the model in LP format");
  exp->add_option("instance", instance_path, "Instance JSON file")->required();
  add_model_options(exp, model);
  exp->add_option("--out", out, "Output file (default stdout)");

  std::string manifest;
  std::optional<std::uint64_t> bench_seed;
  std::size_t workers = 1;
  auto* bench = app.add_subcommand("bench", "Exact versus decomposition table as CSV");
  bench->add_option("manifest", manifest, "manifest.json written by generate");
  add_model_options(bench, model);
  bench->add_option("--epsilon", ld.epsilon, "Relative convergence tolerance");
  bench->add_option("--max-iter", ld.max_iter, "Iteration cap");
  bench->add_option("--seed", bench_seed, "Generate the family in memory instead of a manifest");
  bench->add_option("--dims", dims, "I,J,P,L for --seed");
  bench->add_option("--n", n, "Family size for --seed");
  bench->add_option("--step", step, "Demand growth for --seed");
  bench->add_option("--workers", workers, "Concurrent instances");
  bench->add_option("--out", out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_generate(seed, dims, n, step, out_dir);
    if (*solve) return cmd_solve(instance_path, model, time_limit);
    if (*ldc) return cmd_ld(instance_path, model, ld, trace);
    if (*exp) return cmd_export(instance_path, model, out);
    if (*bench) return cmd_bench(manifest, model, ld, bench_seed, dims, n, step, workers, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const rgtl::InstanceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
