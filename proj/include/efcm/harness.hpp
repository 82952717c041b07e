#pragma once

#include "efcm/solver.hpp"

#include <map>
#include <string>
#include <vector>

namespace efcm {

/// Method identifier: "efcm:k,n", "hbvm:k,n", "gauss:k" or "radau:k".
/// EFCM and HBVM use k-point Gauss-Legendre nodes.
struct MethodId {
  enum class Family { Efcm, Hbvm, Gauss, Radau };
  Family family;
  int k = 0;
  int n = 0;  // Efcm/Hbvm only
  std::string text;

  static MethodId parse(const std::string& text);
};

struct ExperimentSpec {
  std::string problem;
  std::map<std::string, double> problem_opts;
  std::vector<std::string> methods;
  std::vector<double> stepsizes;
  double t_end = 0.0;
  IterationPolicy policy;
  std::string out_path;  // CSV written here when nonempty
  unsigned seed = 0;     // recorded for randomized extensions; runs are deterministic
  bool serial = false;   // disable parallel (method, h) execution for clean timings
  bool gnuplot = false;  // also emit a gnuplot script next to the CSV

  void validate() const;
};

/// One experiment datum.
struct RunRecord {
  std::string method;
  double h = 0.0;
  double global_error = 0.0;  // +inf when the run diverged
  double wall_time_s = 0.0;        // integration loop only
  double wall_time_total_s = 0.0;  // including scheme/tableau assembly
  long total_iterations = 0;
  bool diverged = false;
  std::vector<std::pair<double, double>> energy_drift;  // (t, |H_n - H_0|)
};

/// Global error vs reference for every (method, h) pair; CSV columns
/// method,h,global_error,wall_time_s,total_iterations,wall_time_total_s.
std::vector<RunRecord> work_precision(const ExperimentSpec& spec);
/// Same, on an already-constructed problem (spec.problem/problem_opts ignored).
std::vector<RunRecord> work_precision(const Problem& problem, const ExperimentSpec& spec);

/// Per-step |H_n - H_0| series; CSV columns method,t,geh.  Requires a
/// Hamiltonian problem and exactly one stepsize.
std::vector<RunRecord> energy_drift(const ExperimentSpec& spec);
/// Same, on an already-constructed problem.
std::vector<RunRecord> energy_drift(const Problem& problem, const ExperimentSpec& spec);

/// Total fixed-point iterations per (method, tolerance); diverged cells -1.
struct IterationTable {
  std::vector<std::string> methods;
  std::vector<double> tolerances;
  std::vector<std::vector<long>> totals;  // [method][tolerance], -1 = diverged
};

IterationTable iteration_table(const Problem& problem, const std::vector<std::string>& methods,
                               double h, double t_end, const std::vector<double>& tolerances,
                               const std::string& out_path = "", bool serial = false);

/// Named desk-scale reproductions: fig1 fig2 fig3 tab1 tab2 tab3.
/// Returns true when every contained run converged.
bool run_preset(const std::string& name, const std::string& out_dir, bool serial = false,
                bool gnuplot = false);

std::vector<std::string> preset_names();

/// CSV text assembly (exposed for tests; writers use these exact bytes).
std::string work_precision_csv(const std::vector<RunRecord>& records);
std::string energy_drift_csv(const std::vector<RunRecord>& records);
std::string iteration_table_csv(const IterationTable& table);

}  // namespace efcm
