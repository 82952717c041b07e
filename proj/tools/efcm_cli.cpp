// Command-line front end for the EFCM toolkit.  Talks to the shared
// library exclusively through the C interface in efcm/efcm.h.

#include <efcm/efcm.h>

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitDiverged = 3;

int fail(efcm_status status) {
  std::fprintf(stderr, "error: %s\n", efcm_last_error());
  switch (status) {
    case EFCM_ERR_INVALID_ARGUMENT:
    case EFCM_ERR_EXACTNESS:
    case EFCM_ERR_STRUCTURE_ABSENT:
      return kExitInvalid;
    case EFCM_ERR_DIVERGENCE:
      return kExitDiverged;
    default:
      return kExitInvalid;
  }
}

std::vector<const char*> c_strings(const std::vector<std::string>& items) {
  std::vector<const char*> out;
  out.reserve(items.size());
  for (const auto& s : items) out.push_back(s.c_str());
  return out;
}

std::string join_options(const std::vector<std::string>& opts) {
  std::string joined;
  for (const auto& o : opts) {
    if (!joined.empty()) joined += ',';
    joined += o;
  }
  return joined;
}

struct ProblemHandle {
  efcm_problem* ptr = nullptr;
  ~ProblemHandle() { efcm_problem_destroy(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EFCM exponential-integrator benchmark toolkit"};
  // --h is a stepsize here, so help lives on --help alone.
  app.set_help_flag("--help", "print usage");
  app.set_config("--config", "", "key=value file with defaults; flags win");
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  auto* run = app.add_subcommand("run", "integrate one problem and record results");
  std::string problem_name, policy = "tol:1e-10", out_csv = "results.csv", energy_out;
  std::vector<std::string> methods{"efcm:2,2"}, problem_opts;
  std::vector<double> stepsizes{0.125};
  double t_end = 1.0;
  bool serial = false, gnuplot = false;
  run->add_option("--problem", problem_name, "henon-heiles | fpu | heat")->required();
  run->add_option("--method", methods, "efcm:k,n | hbvm:k,n | gauss:k | radau:k");
  run->add_option("--h", stepsizes, "stepsize(s)");
  run->add_option("--t-end", t_end, "end time");
  run->add_option("--policy", policy, "tol:<x> | fixed:<n>, optional :u0/:exp guess");
  run->add_option("--out", out_csv, "output CSV path");
  run->add_option("--energy-out", energy_out, "also write |H_n - H_0| series (Hamiltonian problems)");
  run->add_option("--problem-opt", problem_opts, "problem parameter key=value (e.g. N=200)");
  run->add_flag("--serial", serial, "run (method, h) combinations sequentially for clean timings");
  run->add_flag("--gnuplot", gnuplot, "emit a gnuplot script next to each CSV");

  // --- preset ------------------------------------------------------------
  auto* preset = app.add_subcommand("preset", "desk-scale reproduction presets");
  std::string preset_name, out_dir = ".";
  preset->add_option("name", preset_name, "fig1 | fig2 | fig3 | tab1 | tab2 | tab3")->required();
  preset->add_option("--out-dir", out_dir, "directory for the CSV artifacts");
  preset->add_flag("--serial", serial, "run combinations sequentially");
  preset->add_flag("--gnuplot", gnuplot, "emit gnuplot scripts");

  // --- tableau -----------------------------------------------------------
  auto* tableau = app.add_subcommand("tableau", "print a Butcher tableau");
  std::string tableau_method;
  tableau->add_option("method", tableau_method, "gauss:k | radau:k | hbvm:k,n")->required();

  // --- bound -------------------------------------------------------------
  auto* bound = app.add_subcommand("bound", "fixed-point stepsize bound");
  double lipschitz = 1.0, c_semigroup = 1.0, omega = 0.0;
  int truncation = 2;
  std::string rule = "gauss:2";
  bound->add_option("--L", lipschitz, "Lipschitz constant of g")->required();
  bound->add_option("--C", c_semigroup, "semigroup constant (>= 1)");
  bound->add_option("--omega", omega, "semigroup exponent (>= 0)");
  bound->add_option("--rule", rule, "gauss:k | radau:k");
  bound->add_option("--n", truncation, "Fourier truncation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  if (run->parsed()) {
    ProblemHandle handle;
    const std::string opts = join_options(problem_opts);
    efcm_status st = efcm_problem_create(problem_name.c_str(),
                                         opts.empty() ? nullptr : opts.c_str(), &handle.ptr);
    if (st != EFCM_OK) return fail(st);
    const auto method_ptrs = c_strings(methods);
    int diverged = 0;
    st = efcm_work_precision(handle.ptr, method_ptrs.data(),
                             static_cast<int>(method_ptrs.size()), stepsizes.data(),
                             static_cast<int>(stepsizes.size()), t_end, policy.c_str(),
                             serial ? 1 : 0, gnuplot ? 1 : 0, out_csv.c_str(), &diverged);
    if (st != EFCM_OK) return fail(st);
    std::printf("wrote %s\n", out_csv.c_str());
    if (!energy_out.empty()) {
      int drift_diverged = 0;
      if (stepsizes.size() != 1) {
        std::fprintf(stderr, "error: --energy-out needs exactly one --h\n");
        return kExitInvalid;
      }
      st = efcm_energy_drift(handle.ptr, method_ptrs.data(),
                             static_cast<int>(method_ptrs.size()), stepsizes.front(), t_end,
                             policy.c_str(), serial ? 1 : 0, gnuplot ? 1 : 0,
                             energy_out.c_str(), &drift_diverged);
      if (st != EFCM_OK) return fail(st);
      std::printf("wrote %s\n", energy_out.c_str());
      diverged |= drift_diverged;
    }
    return diverged ? kExitDiverged : kExitOk;
  }

  if (preset->parsed()) {
    int diverged = 0;
    const efcm_status st =
        efcm_preset(preset_name.c_str(), out_dir.c_str(), serial ? 1 : 0, gnuplot ? 1 : 0,
                    &diverged);
    if (st != EFCM_OK) return fail(st);
    std::printf("preset %s written to %s\n", preset_name.c_str(), out_dir.c_str());
    return diverged ? kExitDiverged : kExitOk;
  }

  if (tableau->parsed()) {
    int k = 0;
    efcm_status st = efcm_tableau_stages(tableau_method.c_str(), &k);
    if (st != EFCM_OK) return fail(st);
    std::vector<double> c(static_cast<std::size_t>(k)), b(static_cast<std::size_t>(k)),
        a(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
    st = efcm_tableau(tableau_method.c_str(), c.data(), a.data(), b.data());
    if (st != EFCM_OK) return fail(st);
    std::printf("%s (%d stages)\n", tableau_method.c_str(), k);
    for (int i = 0; i < k; ++i) {
      std::printf("% .15f |", c[static_cast<std::size_t>(i)]);
      for (int j = 0; j < k; ++j) std::printf(" % .15f", a[static_cast<std::size_t>(i * k + j)]);
      std::printf("\n");
    }
    std::printf("%*s |", 17, "");
    for (int j = 0; j < k; ++j) std::printf(" % .15f", b[static_cast<std::size_t>(j)]);
    std::printf("\n");
    return kExitOk;
  }

  if (bound->parsed()) {
    double value = 0.0;
    const efcm_status st =
        efcm_step_bound(lipschitz, c_semigroup, omega, rule.c_str(), truncation, &value);
    if (st != EFCM_OK) return fail(st);
    std::printf("max convergent stepsize: %.17g\n", value);
    return kExitOk;
  }

  return kExitInvalid;
}
