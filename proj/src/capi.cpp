#include "efcm/efcm.h"

#include "efcm/harness.hpp"

#include <memory>
#include <string>

struct efcm_problem {
  efcm::Problem impl;
};

namespace {

thread_local std::string g_last_error;

efcm_status status_from(efcm::Errc code) {
  switch (code) {
    case efcm::Errc::invalid_argument:
      return EFCM_ERR_INVALID_ARGUMENT;
    case efcm::Errc::exactness_violation:
      return EFCM_ERR_EXACTNESS;
    case efcm::Errc::divergence:
      return EFCM_ERR_DIVERGENCE;
    case efcm::Errc::structure_absent:
      return EFCM_ERR_STRUCTURE_ABSENT;
    case efcm::Errc::evaluation:
      return EFCM_ERR_EVALUATION;
    case efcm::Errc::budget_exceeded:
      return EFCM_ERR_BUDGET;
    case efcm::Errc::io:
      return EFCM_ERR_IO;
    case efcm::Errc::internal:
      return EFCM_ERR_INTERNAL;
  }
  return EFCM_ERR_INTERNAL;
}

template <typename Fn>
efcm_status guarded(Fn&& fn) {
  try {
    fn();
    return EFCM_OK;
  } catch (const efcm::Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return EFCM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return EFCM_ERR_INTERNAL;
  }
}

std::map<std::string, double> parse_options(const char* options) {
  std::map<std::string, double> out;
  if (options == nullptr) return out;
  std::string text(options);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        efcm::throw_invalid("option '" + item + "': expected key=value");
      }
      try {
        out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
      } catch (const std::exception&) {
        efcm::throw_invalid("option '" + item + "': value is not a number");
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<std::string> to_strings(const char* const* items, int count, const char* what) {
  if (count < 0 || (count > 0 && items == nullptr)) {
    efcm::throw_invalid(std::string(what) + ": null list");
  }
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    if (items[i] == nullptr) efcm::throw_invalid(std::string(what) + ": null entry");
    out.emplace_back(items[i]);
  }
  return out;
}

efcm::ButcherTableau tableau_for(const std::string& method_text) {
  const auto id = efcm::MethodId::parse(method_text);
  switch (id.family) {
    case efcm::MethodId::Family::Gauss:
      return efcm::gauss_tableau(id.k);
    case efcm::MethodId::Family::Radau:
      return efcm::radau_iia_tableau(id.k);
    case efcm::MethodId::Family::Hbvm:
      return efcm::hbvm_tableau(id.k, id.n, efcm::gauss_legendre(id.k));
    case efcm::MethodId::Family::Efcm:
      efcm::throw_invalid("tableau: efcm methods have operator-valued coefficients; "
                          "request gauss:k, radau:k or hbvm:k,n");
  }
  throw efcm::Error(efcm::Errc::internal, "tableau: bad method family");
}

efcm::QuadratureRule rule_for(const std::string& rule_text) {
  const auto colon = rule_text.find(':');
  if (colon == std::string::npos) {
    efcm::throw_invalid("rule '" + rule_text + "': expected gauss:k or radau:k");
  }
  const std::string family = rule_text.substr(0, colon);
  int k = 0;
  try {
    k = std::stoi(rule_text.substr(colon + 1));
  } catch (const std::exception&) {
    efcm::throw_invalid("rule '" + rule_text + "': cannot parse node count");
  }
  if (family == "gauss") return efcm::gauss_legendre(k);
  if (family == "radau") return efcm::radau_right(k);
  efcm::throw_invalid("rule '" + rule_text + "': unknown family (gauss, radau)");
}

}  // namespace

extern "C" {

const char* efcm_version(void) { return "0.1.0"; }

const char* efcm_last_error(void) { return g_last_error.c_str(); }

efcm_status efcm_problem_create(const char* name, const char* options, efcm_problem** out) {
  return guarded([&] {
    if (name == nullptr || out == nullptr) efcm::throw_invalid("problem_create: null argument");
    auto handle = std::make_unique<efcm_problem>();
    handle->impl = efcm::make_problem(name, parse_options(options));
    *out = handle.release();
  });
}

void efcm_problem_destroy(efcm_problem* problem) { delete problem; }

int efcm_problem_dim(const efcm_problem* problem) {
  return problem == nullptr ? -1 : problem->impl.dim;
}

int efcm_problem_has_hamiltonian(const efcm_problem* problem) {
  return problem != nullptr && problem->impl.has_hamiltonian() ? 1 : 0;
}

efcm_status efcm_work_precision(const efcm_problem* problem, const char* const* methods,
                                int n_methods, const double* stepsizes, int n_stepsizes,
                                double t_end, const char* policy, int serial, int gnuplot,
                                const char* out_csv, int* any_diverged) {
  return guarded([&] {
    if (problem == nullptr || policy == nullptr) {
      efcm::throw_invalid("work_precision: null argument");
    }
    if (n_stepsizes < 1 || stepsizes == nullptr) {
      efcm::throw_invalid("work_precision: stepsize list required");
    }
    efcm::ExperimentSpec spec;
    spec.problem = problem->impl.name;
    spec.methods = to_strings(methods, n_methods, "work_precision methods");
    spec.stepsizes.assign(stepsizes, stepsizes + n_stepsizes);
    spec.t_end = t_end;
    spec.policy = efcm::IterationPolicy::parse(policy);
    spec.serial = serial != 0;
    spec.gnuplot = gnuplot != 0;
    if (out_csv != nullptr) spec.out_path = out_csv;
    const auto records = efcm::work_precision(problem->impl, spec);
    if (any_diverged != nullptr) {
      *any_diverged = 0;
      for (const auto& r : records) {
        if (r.diverged) *any_diverged = 1;
      }
    }
  });
}

efcm_status efcm_energy_drift(const efcm_problem* problem, const char* const* methods,
                              int n_methods, double h, double t_end, const char* policy,
                              int serial, int gnuplot, const char* out_csv, int* any_diverged) {
  return guarded([&] {
    if (problem == nullptr || policy == nullptr) efcm::throw_invalid("energy_drift: null argument");
    efcm::ExperimentSpec spec;
    spec.problem = problem->impl.name;
    spec.methods = to_strings(methods, n_methods, "energy_drift methods");
    spec.stepsizes = {h};
    spec.t_end = t_end;
    spec.policy = efcm::IterationPolicy::parse(policy);
    spec.serial = serial != 0;
    spec.gnuplot = gnuplot != 0;
    if (out_csv != nullptr) spec.out_path = out_csv;
    const auto records = efcm::energy_drift(problem->impl, spec);
    if (any_diverged != nullptr) {
      *any_diverged = 0;
      for (const auto& r : records) {
        if (r.diverged) *any_diverged = 1;
      }
    }
  });
}

efcm_status efcm_iteration_table(const efcm_problem* problem, const char* const* methods,
                                 int n_methods, double h, double t_end, const double* tolerances,
                                 int n_tolerances, const char* out_csv, int* any_diverged) {
  return guarded([&] {
    if (problem == nullptr) efcm::throw_invalid("iteration_table: null problem");
    if (n_tolerances < 1 || tolerances == nullptr) {
      efcm::throw_invalid("iteration_table: tolerance list required");
    }
    const auto table = efcm::iteration_table(
        problem->impl, to_strings(methods, n_methods, "iteration_table methods"), h, t_end,
        std::vector<double>(tolerances, tolerances + n_tolerances),
        out_csv == nullptr ? "" : out_csv);
    if (any_diverged != nullptr) {
      *any_diverged = 0;
      for (const auto& row : table.totals) {
        for (long cell : row) {
          if (cell < 0) *any_diverged = 1;
        }
      }
    }
  });
}

efcm_status efcm_preset(const char* name, const char* out_dir, int serial, int gnuplot,
                        int* any_diverged) {
  return guarded([&] {
    if (name == nullptr || out_dir == nullptr) efcm::throw_invalid("preset: null argument");
    const bool ok = efcm::run_preset(name, out_dir, serial != 0, gnuplot != 0);
    if (any_diverged != nullptr) *any_diverged = ok ? 0 : 1;
  });
}

efcm_status efcm_tableau_stages(const char* method, int* k) {
  return guarded([&] {
    if (method == nullptr || k == nullptr) efcm::throw_invalid("tableau_stages: null argument");
    *k = tableau_for(method).stages();
  });
}

efcm_status efcm_tableau(const char* method, double* c, double* a_rowmajor, double* b) {
  return guarded([&] {
    if (method == nullptr || c == nullptr || a_rowmajor == nullptr || b == nullptr) {
      efcm::throw_invalid("tableau: null argument");
    }
    const auto t = tableau_for(method);
    const int k = t.stages();
    for (int i = 0; i < k; ++i) {
      c[i] = t.c(i);
      b[i] = t.b(i);
      for (int j = 0; j < k; ++j) a_rowmajor[i * k + j] = t.a(i, j);
    }
  });
}

efcm_status efcm_step_bound(double lipschitz, double c_semigroup, double omega, const char* rule,
                            int n, double* out) {
  return guarded([&] {
    if (rule == nullptr || out == nullptr) efcm::throw_invalid("step_bound: null argument");
    *out = efcm::max_convergent_stepsize(lipschitz, c_semigroup, omega, rule_for(rule), n);
  });
}

}  // extern "C"
