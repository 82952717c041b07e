#include "efcm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

namespace efcm {

namespace {

void parse_positive_int_pair(const std::string& text, const std::string& what, int& k, int& n) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw_invalid(what + ": expected k,n");
  try {
    k = std::stoi(text.substr(0, comma));
    n = std::stoi(text.substr(comma + 1));
  } catch (const std::exception&) {
    throw_invalid(what + ": cannot parse '" + text + "'");
  }
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Method ids carry commas ("efcm:2,2"): quote such fields per RFC 4180.
std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(Errc::io, "write to '" + path + "' failed");
}

struct PreparedRun {
  StepKernel kernel;
  double assembly_seconds = 0.0;
};

// Build the step kernel for one (problem, method, h, policy) combination.
// Kernel assembly (phi blocks, tableaux) is timed separately from stepping.
PreparedRun prepare(const Problem& problem, const MethodId& method, double h,
                    const IterationPolicy& policy) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  PreparedRun run;
  switch (method.family) {
    case MethodId::Family::Efcm: {
      auto scheme = std::make_shared<EfcmScheme>(
          build_efcm(problem.a, h, method.k, method.n, gauss_legendre(method.k)));
      run.kernel = make_efcm_kernel(std::move(scheme), problem.g, policy);
      break;
    }
    case MethodId::Family::Hbvm:
    case MethodId::Family::Gauss:
    case MethodId::Family::Radau: {
      ButcherTableau tableau;
      if (method.family == MethodId::Family::Radau) {
        tableau = radau_iia_tableau(method.k);
      } else {
        const int n = method.family == MethodId::Family::Gauss ? method.k : method.n;
        tableau = hbvm_tableau(method.k, n, gauss_legendre(method.k));
      }
      const LinearOperator a = problem.a;
      const RhsFn g = problem.g;
      RhsFn f = [a, g](double t, const Vector& u) { return Vector(g(t, u) - a.apply(u)); };
      IterationPolicy irk_policy = policy;
      irk_policy.guess = IterationPolicy::Guess::InitialState;
      run.kernel = make_irk_kernel(std::move(tableau), std::move(f), h, irk_policy);
      break;
    }
  }
  run.assembly_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return run;
}

std::vector<long> sample_indices(long steps, int max_samples) {
  std::vector<long> idx;
  for (int s = 1; s <= max_samples; ++s) {
    const long i = std::lround(static_cast<double>(steps) * s / max_samples);
    if (i >= 1 && (idx.empty() || idx.back() != i)) idx.push_back(i);
  }
  return idx;
}

RunRecord execute_work_precision(const Problem& problem, const std::string& method_text,
                                 double h, double t_end, const IterationPolicy& policy) {
  using clock = std::chrono::steady_clock;
  RunRecord rec;
  rec.method = method_text;
  rec.h = h;
  const MethodId method = MethodId::parse(method_text);

  PreparedRun run = prepare(problem, method, h, policy);

  const auto start = clock::now();
  Trajectory traj;
  try {
    traj = integrate(run.kernel, problem.u0, t_end, h);
  } catch (const DivergenceError&) {
    rec.diverged = true;
    rec.global_error = std::numeric_limits<double>::infinity();
    rec.wall_time_s = std::chrono::duration<double>(clock::now() - start).count();
    rec.wall_time_total_s = rec.wall_time_s + run.assembly_seconds;
    return rec;
  }
  rec.wall_time_s = std::chrono::duration<double>(clock::now() - start).count();
  rec.wall_time_total_s = rec.wall_time_s + run.assembly_seconds;
  rec.total_iterations = traj.total_iterations;

  if (problem.has_exact()) {
    rec.global_error =
        (traj.states.back() - problem.exact(t_end)).lpNorm<Eigen::Infinity>();
  } else {
    const auto indices = sample_indices(traj.steps(), 100);
    std::vector<double> times;
    times.reserve(indices.size());
    for (long i : indices) times.push_back(traj.time(i));
    const auto refs = reference_states(problem, times, 1e-13);
    double err = 0.0;
    for (std::size_t s = 0; s < indices.size(); ++s) {
      err = std::max(err, (traj.states[static_cast<std::size_t>(indices[s])] - refs[s])
                              .lpNorm<Eigen::Infinity>());
    }
    rec.global_error = err;
  }
  return rec;
}

RunRecord execute_energy_drift(const Problem& problem, const std::string& method_text, double h,
                               double t_end, const IterationPolicy& policy) {
  RunRecord rec;
  rec.method = method_text;
  rec.h = h;
  const MethodId method = MethodId::parse(method_text);
  const double h0 = energy(problem, problem.u0);

  PreparedRun run = prepare(problem, method, h, policy);
  const long steps = std::llround(t_end / h);
  Vector u = problem.u0;
  for (long s = 0; s < steps; ++s) {
    try {
      StepResult r = run.kernel(static_cast<double>(s) * h, u);
      u = std::move(r.state);
      rec.total_iterations += r.iterations;
    } catch (const DivergenceError&) {
      rec.diverged = true;
      rec.global_error = std::numeric_limits<double>::infinity();
      break;
    }
    rec.energy_drift.emplace_back(static_cast<double>(s + 1) * h,
                                  std::abs(energy(problem, u) - h0));
  }
  return rec;
}

template <typename Fn>
std::vector<RunRecord> run_all(const std::vector<Fn>& jobs, bool serial) {
  std::vector<RunRecord> records;
  records.reserve(jobs.size());
  if (serial || jobs.size() <= 1) {
    for (const auto& job : jobs) records.push_back(job());
    return records;
  }
  std::vector<std::future<RunRecord>> futures;
  futures.reserve(jobs.size());
  for (const auto& job : jobs) futures.push_back(std::async(std::launch::async, job));
  for (auto& f : futures) records.push_back(f.get());
  return records;
}

std::string gnuplot_wp_script(const std::string& csv_name,
                              const std::vector<std::string>& methods) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set logscale xy\n"
     << "set xlabel 'wall time [s]'\n"
     << "set ylabel 'global error'\n"
     << "set key outside\n"
     << "plot ";
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (i) os << ", \\\n     ";
    os << "'" << csv_name << "' using (strcol(1) eq '" << methods[i]
       << "' ? $4 : 1/0):($3) with linespoints title '" << methods[i] << "'";
  }
  os << "\n";
  return os.str();
}

std::string gnuplot_drift_script(const std::string& csv_name,
                                 const std::vector<std::string>& methods) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set logscale y\n"
     << "set xlabel 't'\n"
     << "set ylabel '|H_n - H_0|'\n"
     << "set key outside\n"
     << "plot ";
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (i) os << ", \\\n     ";
    os << "'" << csv_name << "' using (strcol(1) eq '" << methods[i]
       << "' ? $2 : 1/0):($3) with lines title '" << methods[i] << "'";
  }
  os << "\n";
  return os.str();
}

void maybe_emit(const ExperimentSpec& spec, const std::string& csv,
                const std::string& gp_script) {
  if (spec.out_path.empty()) return;
  write_file(spec.out_path, csv);
  if (spec.gnuplot) write_file(spec.out_path + ".gp", gp_script);
}

}  // namespace

MethodId MethodId::parse(const std::string& text) {
  MethodId id;
  id.text = text;
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw_invalid("method '" + text + "': expected family:args");
  const std::string family = text.substr(0, colon);
  const std::string args = text.substr(colon + 1);
  if (family == "efcm" || family == "hbvm") {
    id.family = family == "efcm" ? Family::Efcm : Family::Hbvm;
    parse_positive_int_pair(args, "method '" + text + "'", id.k, id.n);
  } else if (family == "gauss" || family == "radau") {
    id.family = family == "gauss" ? Family::Gauss : Family::Radau;
    try {
      id.k = std::stoi(args);
    } catch (const std::exception&) {
      throw_invalid("method '" + text + "': cannot parse stage count");
    }
    id.n = id.k;
  } else {
    throw_invalid("method '" + text + "': unknown family (efcm, hbvm, gauss, radau)");
  }
  if (id.k < 1) throw_invalid("method '" + text + "': stage count must be positive");
  return id;
}

void ExperimentSpec::validate() const {
  if (t_end <= 0.0) throw_invalid("spec: t_end must be positive");
  if (stepsizes.empty()) throw_invalid("spec: at least one stepsize required");
  for (double h : stepsizes) {
    if (!(h > 0.0)) throw_invalid("spec: stepsizes must be positive");
    const double ratio = t_end / h;
    if (std::abs(ratio - std::llround(ratio)) >
        4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, ratio)) {
      throw_invalid("spec: t_end must be divisible by every stepsize");
    }
  }
  std::vector<double> sorted = stepsizes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw_invalid("spec: stepsizes must be distinct");
  }
  for (const auto& m : methods) MethodId::parse(m);
}

std::vector<RunRecord> work_precision(const Problem& problem, const ExperimentSpec& spec) {
  spec.validate();
  std::vector<std::function<RunRecord()>> jobs;
  for (const auto& method : spec.methods) {
    for (double h : spec.stepsizes) {
      jobs.push_back([&problem, method, h, &spec] {
        return execute_work_precision(problem, method, h, spec.t_end, spec.policy);
      });
    }
  }
  auto records = run_all(jobs, spec.serial);
  maybe_emit(spec, work_precision_csv(records),
             gnuplot_wp_script(std::filesystem::path(spec.out_path).filename().string(),
                               spec.methods));
  return records;
}

std::vector<RunRecord> work_precision(const ExperimentSpec& spec) {
  return work_precision(make_problem(spec.problem, spec.problem_opts), spec);
}

std::vector<RunRecord> energy_drift(const Problem& problem, const ExperimentSpec& spec) {
  spec.validate();
  if (spec.stepsizes.size() != 1) throw_invalid("energy_drift: exactly one stepsize expected");
  if (!problem.has_hamiltonian()) {
    throw Error(Errc::structure_absent,
                "energy_drift: problem '" + problem.name + "' has no Hamiltonian");
  }
  const double h = spec.stepsizes.front();
  std::vector<std::function<RunRecord()>> jobs;
  for (const auto& method : spec.methods) {
    jobs.push_back([&problem, method, h, &spec] {
      return execute_energy_drift(problem, method, h, spec.t_end, spec.policy);
    });
  }
  auto records = run_all(jobs, spec.serial);
  maybe_emit(spec, energy_drift_csv(records),
             gnuplot_drift_script(std::filesystem::path(spec.out_path).filename().string(),
                                  spec.methods));
  return records;
}

std::vector<RunRecord> energy_drift(const ExperimentSpec& spec) {
  return energy_drift(make_problem(spec.problem, spec.problem_opts), spec);
}

IterationTable iteration_table(const Problem& problem, const std::vector<std::string>& methods,
                               double h, double t_end, const std::vector<double>& tolerances,
                               const std::string& out_path, bool serial) {
  if (tolerances.empty()) throw_invalid("iteration_table: tolerance list must be nonempty");
  for (std::size_t i = 1; i < tolerances.size(); ++i) {
    if (!(tolerances[i] < tolerances[i - 1])) {
      throw_invalid("iteration_table: tolerance list must be strictly decreasing");
    }
  }
  IterationTable table;
  table.methods = methods;
  table.tolerances = tolerances;
  table.totals.assign(methods.size(), std::vector<long>(tolerances.size(), 0));

  std::vector<std::function<RunRecord()>> jobs;
  for (const auto& method : methods) {
    for (double tol : tolerances) {
      jobs.push_back([&problem, method, h, t_end, tol] {
        const IterationPolicy policy = IterationPolicy::tol(tol);
        RunRecord rec;
        rec.method = method;
        try {
          const PreparedRun run = prepare(problem, MethodId::parse(method), h, policy);
          const Trajectory traj = integrate(run.kernel, problem.u0, t_end, h);
          rec.total_iterations = traj.total_iterations;
        } catch (const DivergenceError&) {
          rec.diverged = true;
        }
        return rec;
      });
    }
  }
  const auto records = run_all(jobs, serial);
  std::size_t idx = 0;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    for (std::size_t t = 0; t < tolerances.size(); ++t, ++idx) {
      table.totals[m][t] = records[idx].diverged ? -1 : records[idx].total_iterations;
    }
  }
  if (!out_path.empty()) write_file(out_path, iteration_table_csv(table));
  return table;
}

std::string work_precision_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "method,h,global_error,wall_time_s,total_iterations,wall_time_total_s\n";
  for (const auto& r : records) {
    os << csv_field(r.method) << ',' << format_double(r.h) << ','
       << format_double(r.global_error) << ',' << format_double(r.wall_time_s) << ','
       << r.total_iterations << ',' << format_double(r.wall_time_total_s) << '\n';
  }
  return os.str();
}

std::string energy_drift_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "method,t,geh\n";
  for (const auto& r : records) {
    for (const auto& [t, geh] : r.energy_drift) {
      os << csv_field(r.method) << ',' << format_double(t) << ',' << format_double(geh) << '\n';
    }
  }
  return os.str();
}

std::string iteration_table_csv(const IterationTable& table) {
  std::ostringstream os;
  os << "method";
  for (double tol : table.tolerances) os << ",tol=" << format_short(tol);
  os << '\n';
  for (std::size_t m = 0; m < table.methods.size(); ++m) {
    os << csv_field(table.methods[m]);
    for (std::size_t t = 0; t < table.tolerances.size(); ++t) {
      if (table.totals[m][t] < 0) {
        os << ",div";
      } else {
        os << ',' << table.totals[m][t];
      }
    }
    os << '\n';
  }
  return os.str();
}

namespace {

ExperimentSpec base_spec(const std::string& problem, std::vector<std::string> methods,
                         std::vector<double> hs, double t_end, const IterationPolicy& policy,
                         const std::string& out, bool serial, bool gnuplot) {
  ExperimentSpec spec;
  spec.problem = problem;
  spec.methods = std::move(methods);
  spec.stepsizes = std::move(hs);
  spec.t_end = t_end;
  spec.policy = policy;
  spec.out_path = out;
  spec.serial = serial;
  spec.gnuplot = gnuplot;
  return spec;
}

bool all_converged(const std::vector<RunRecord>& records) {
  return std::none_of(records.begin(), records.end(),
                      [](const RunRecord& r) { return r.diverged; });
}

bool table_converged(const IterationTable& t) {
  for (const auto& row : t.totals) {
    for (long cell : row) {
      if (cell < 0) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "fig3", "tab1", "tab2", "tab3"};
}

bool run_preset(const std::string& name, const std::string& out_dir, bool serial, bool gnuplot) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto out = [&out_dir](const std::string& file) {
    return (fs::path(out_dir) / file).string();
  };
  const std::vector<std::string> implicit_pair = {"efcm:2,2", "hbvm:2,2"};
  // Work-precision runs follow the one-sweep protocol; comparator entries
  // that blow up under it are recorded as inf (the source figures drop such
  // points).  Energy series use converged stages: one sweep is unstable at
  // the figure stepsizes and would swamp the drift signal.
  const IterationPolicy one_iteration = IterationPolicy::fixed(1);
  const IterationPolicy solved_stages = IterationPolicy::tol(1e-10, 200);
  const std::vector<double> table_tols = {1e-6, 1e-8, 1e-10, 1e-12};

  if (name == "fig1") {
    auto wp = base_spec("henon-heiles", {"efcm:2,2", "hbvm:2,2", "radau:2"},
                        {0.25, 0.125, 0.0625, 0.03125}, 1000.0, one_iteration,
                        out("fig1_wp.csv"), serial, gnuplot);
    const bool ok_wp = all_converged(work_precision(wp));
    auto drift = base_spec("henon-heiles", implicit_pair, {1.5}, 3000.0, solved_stages,
                           out("fig1_geh.csv"), serial, gnuplot);
    const bool ok_drift = all_converged(energy_drift(drift));
    return ok_wp && ok_drift;
  }
  if (name == "fig2") {
    auto wp = base_spec("fpu", {"efcm:2,2", "hbvm:2,2", "radau:2"},
                        {0.125, 0.0625, 0.03125, 0.015625}, 10.0, one_iteration,
                        out("fig2_wp.csv"), serial, gnuplot);
    const bool ok_wp = all_converged(work_precision(wp));
    // Desk scale of the paper's [0,1000] energy run.
    auto drift = base_spec("fpu", implicit_pair, {0.1}, 100.0, solved_stages,
                           out("fig2_geh.csv"), serial, gnuplot);
    const bool ok_drift = all_converged(energy_drift(drift));
    return ok_wp && ok_drift;
  }
  if (name == "fig3") {
    auto wp = base_spec("heat", {"efcm:2,2", "hbvm:2,2", "radau:2"},
                        {0.25, 0.125, 0.0625, 0.03125}, 1.0, one_iteration,
                        out("fig3_wp.csv"), serial, gnuplot);
    return all_converged(work_precision(wp));
  }
  if (name == "tab1") {
    const Problem p = henon_heiles();
    return table_converged(
        iteration_table(p, implicit_pair, 0.01, 10.0, table_tols, out("tab1.csv"), serial));
  }
  if (name == "tab2") {
    const Problem p = fpu();
    return table_converged(
        iteration_table(p, implicit_pair, 0.01, 10.0, table_tols, out("tab2.csv"), serial));
  }
  if (name == "tab3") {
    const Problem p = semilinear_heat(200);
    return table_converged(
        iteration_table(p, implicit_pair, 0.1, 1.0, table_tols, out("tab3.csv"), serial));
  }
  throw_invalid("unknown preset '" + name + "'");
}

}  // namespace efcm
