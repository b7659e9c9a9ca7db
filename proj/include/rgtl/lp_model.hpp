#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rgtl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary, integer };
enum class RowSense { less_equal, greater_equal, equal };
enum class ObjSense { minimize, maximize };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  VarKind kind = VarKind::continuous;
};

struct Term {
  std::size_t var;
  double coef;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  RowSense sense = RowSense::less_equal;
  double rhs = 0.0;
};

class ModelError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A mixed-integer linear model: variables with bounds and kinds, sparse rows,
// and a sparse objective plus a constant.
class LinearModel {
 public:
  std::size_t add_variable(std::string name, double lower, double upper,
                           VarKind kind = VarKind::continuous) {
    if (kind == VarKind::binary) {
      lower = std::max(lower, 0.0);
      upper = std::min(upper, 1.0);
    }
    vars_.push_back({std::move(name), lower, upper, kind});
    objective_.push_back(0.0);
    return vars_.size() - 1;
  }

  std::size_t add_constraint(std::string name, std::vector<Term> terms,
                             RowSense sense, double rhs) {
    rows_.push_back({std::move(name), std::move(terms), sense, rhs});
    return rows_.size() - 1;
  }

  void set_objective_sense(ObjSense sense) { sense_ = sense; }
  void set_objective_coef(std::size_t var, double coef) { objective_.at(var) = coef; }
  void add_objective_coef(std::size_t var, double coef) { objective_.at(var) += coef; }
  void set_constant(double c) { constant_ = c; }

  Variable& variable(std::size_t j) { return vars_.at(j); }
  const Variable& variable(std::size_t j) const { return vars_.at(j); }
  Constraint& constraint(std::size_t i) { return rows_.at(i); }
  const Constraint& constraint(std::size_t i) const { return rows_.at(i); }

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  const std::vector<double>& objective() const { return objective_; }
  ObjSense objective_sense() const { return sense_; }
  double constant() const { return constant_; }

  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_constraints() const { return rows_.size(); }

  bool has_integers() const {
    return std::any_of(vars_.begin(), vars_.end(), [](const Variable& v) {
      return v.kind != VarKind::continuous;
    });
  }

  double objective_value(const std::vector<double>& x) const {
    double total = constant_;
    for (std::size_t j = 0; j < vars_.size(); ++j) total += objective_[j] * x[j];
    return total;
  }

  // Largest violation of rows and bounds, each scaled by 1 + |rhs| (or bound).
  double max_scaled_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (const auto& row : rows_) {
      double lhs = 0.0;
      for (const auto& t : row.terms) lhs += t.coef * x[t.var];
      double viol = 0.0;
      if (row.sense != RowSense::greater_equal) viol = std::max(viol, lhs - row.rhs);
      if (row.sense != RowSense::less_equal) viol = std::max(viol, row.rhs - lhs);
      worst = std::max(worst, viol / (1.0 + std::abs(row.rhs)));
    }
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      const auto& v = vars_[j];
      if (std::isfinite(v.lower))
        worst = std::max(worst, (v.lower - x[j]) / (1.0 + std::abs(v.lower)));
      if (std::isfinite(v.upper))
        worst = std::max(worst, (x[j] - v.upper) / (1.0 + std::abs(v.upper)));
    }
    return worst;
  }

  // Structural problems: dangling indices, non-finite data, bad binary bounds.
  std::vector<std::string> check() const {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      const auto& v = vars_[j];
      if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower == kInf ||
          v.upper == -kInf) {
        out.push_back("variable " + v.name + ": invalid bounds");
      }
      if (v.kind == VarKind::binary && (v.lower < 0.0 || v.upper > 1.0)) {
        out.push_back("variable " + v.name + ": binary bounds outside [0,1]");
      }
      if (!std::isfinite(objective_[j])) {
        out.push_back("variable " + v.name + ": objective coefficient not finite");
      }
    }
    for (const auto& row : rows_) {
      for (const auto& t : row.terms) {
        if (t.var >= vars_.size()) {
          out.push_back("row " + row.name + ": unknown variable index " +
                        std::to_string(t.var));
        } else if (!std::isfinite(t.coef)) {
          out.push_back("row " + row.name + ": coefficient not finite");
        }
      }
      if (!std::isfinite(row.rhs)) out.push_back("row " + row.name + ": rhs not finite");
    }
    if (!std::isfinite(constant_)) out.push_back("objective constant not finite");
    return out;
  }

  void require_valid() const {
    const auto problems = check();
    if (!problems.empty()) throw ModelError("invalid model: " + problems.front());
  }

  // Drops the given rows (indices into the current row list).
  void remove_constraints(const std::vector<std::size_t>& which) {
    std::vector<bool> drop(rows_.size(), false);
    for (std::size_t i : which) drop.at(i) = true;
    std::vector<Constraint> kept;
    kept.reserve(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (!drop[i]) kept.push_back(std::move(rows_[i]));
    }
    rows_ = std::move(kept);
  }

  // Drops the given columns. Terms on dropped columns must already be gone
  // from every row. Returns old-index -> new-index (nullopt when dropped).
  std::vector<std::optional<std::size_t>> remove_variables(
      const std::vector<std::size_t>& which) {
    std::vector<bool> drop(vars_.size(), false);
    for (std::size_t j : which) drop.at(j) = true;
    std::vector<std::optional<std::size_t>> remap(vars_.size());
    std::vector<Variable> vars;
    std::vector<double> obj;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      if (drop[j]) continue;
      remap[j] = vars.size();
      vars.push_back(std::move(vars_[j]));
      obj.push_back(objective_[j]);
    }
    for (auto& row : rows_) {
      for (auto& t : row.terms) {
        if (!remap[t.var]) {
          throw ModelError("remove_variables: row " + row.name +
                           " still references a dropped column");
        }
        t.var = *remap[t.var];
      }
    }
    vars_ = std::move(vars);
    objective_ = std::move(obj);
    return remap;
  }

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::vector<double> objective_;
  ObjSense sense_ = ObjSense::minimize;
  double constant_ = 0.0;
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  double objective_value = 0.0;
  std::vector<double> primal_values;
  // Row duals in the model's own sense: objective = sum(rhs * dual) plus
  // reduced-cost contributions of variables resting at non-zero bounds.
  std::vector<double> dual_values;
  std::size_t node_count = 0;
  std::size_t pivot_count = 0;
  double wall_time = 0.0;
  // MILP: best proven bound on the optimum (in the objective's sense).
  double best_bound = 0.0;
  // LP solve of a model that declares integer columns.
  bool relaxed_integrality = false;
  // Column whose increase (or decrease) proves unboundedness.
  std::optional<std::size_t> unbounded_ray;

  bool optimal() const { return status == SolveStatus::optimal; }
};

// Writes the model in the common CPLEX-style LP text format.
inline void write_lp_format(const LinearModel& model, std::ostream& os) {
  auto name_of = [&](std::size_t j) {
    std::string n = model.variable(j).name;
    for (char& ch : n) {
      if (ch == '[' || ch == ']' || ch == ',' || ch == ' ') ch = '_';
    }
    return n.empty() ? "v" + std::to_string(j) : n;
  };
  auto write_terms = [&](const std::vector<Term>& terms) {
    if (terms.empty()) {
      os << " 0";
      if (model.num_variables() > 0) os << ' ' << name_of(0);
      return;
    }
    for (const auto& t : terms) {
      os << (t.coef < 0 ? " - " : " + ") << std::abs(t.coef) << ' ' << name_of(t.var);
    }
  };
  os.precision(17);
  os << (model.objective_sense() == ObjSense::minimize ? "Minimize" : "Maximize")
     << "\n obj:";
  std::vector<Term> obj;
  for (std::size_t j = 0; j < model.num_variables(); ++j) {
    if (model.objective()[j] != 0.0) obj.push_back({j, model.objective()[j]});
  }
  write_terms(obj);
  if (model.constant() != 0.0) {
    os << (model.constant() < 0 ? " - " : " + ") << std::abs(model.constant());
  }
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < model.num_constraints(); ++i) {
    const auto& row = model.constraint(i);
    os << ' ' << "c" << i << ':';
    write_terms(row.terms);
    os << (row.sense == RowSense::less_equal      ? " <= "
           : row.sense == RowSense::greater_equal ? " >= "
                                                  : " = ")
       << row.rhs << '\n';
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variable(j);
    if (v.kind == VarKind::binary && v.lower == 0.0 && v.upper == 1.0) continue;
    if (v.lower == -kInf && v.upper == kInf) {
      os << ' ' << name_of(j) << " free\n";
    } else {
      os << ' ';
      if (v.lower == -kInf) os << "-inf"; else os << v.lower;
      os << " <= " << name_of(j) << " <= ";
      if (v.upper == kInf) os << "+inf"; else os << v.upper;
      os << '\n';
    }
  }
  bool any_bin = false, any_gen = false;
  for (const auto& v : model.variables()) {
    any_bin |= v.kind == VarKind::binary;
    any_gen |= v.kind == VarKind::integer;
  }
  if (any_gen) {
    os << "General\n";
    for (std::size_t j = 0; j < model.num_variables(); ++j)
      if (model.variable(j).kind == VarKind::integer) os << ' ' << name_of(j) << '\n';
  }
  if (any_bin) {
    os << "Binary\n";
    for (std::size_t j = 0; j < model.num_variables(); ++j)
      if (model.variable(j).kind == VarKind::binary) os << ' ' << name_of(j) << '\n';
  }
  os << "End\n";
}

inline std::string to_lp_format(const LinearModel& model) {
  std::ostringstream os;
  write_lp_format(model, os);
  return os.str();
}

}  // namespace rgtl
