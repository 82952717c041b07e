#include "efcm/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace efcm;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Split one CSV line honouring RFC 4180 quoting.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

// CSV text with the wall-time fields blanked (timings are not reproducible).
std::string strip_timings(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    auto fields = split_csv(line);
    if (fields.size() == 6) fields[3] = fields[5] = "_";
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("method id parsing") {
  const MethodId efcm = MethodId::parse("efcm:2,2");
  CHECK(efcm.family == MethodId::Family::Efcm);
  CHECK(efcm.k == 2);
  CHECK(efcm.n == 2);
  const MethodId radau = MethodId::parse("radau:3");
  CHECK(radau.family == MethodId::Family::Radau);
  CHECK(radau.k == 3);
  CHECK_THROWS_AS(MethodId::parse("efcm:2"), Error);
  CHECK_THROWS_AS(MethodId::parse("rk4:2"), Error);
  CHECK_THROWS_AS(MethodId::parse("gauss:x"), Error);
}

TEST_CASE("spec validation") {
  ExperimentSpec spec;
  spec.problem = "henon-heiles";
  spec.methods = {"efcm:2,2"};
  spec.stepsizes = {0.25, 0.125};
  spec.t_end = 1.0;
  CHECK_NOTHROW(spec.validate());

  ExperimentSpec bad = spec;
  bad.stepsizes = {0.25, 0.25};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = spec;
  bad.stepsizes = {0.3};  // does not divide 1.0
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = spec;
  bad.t_end = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = spec;
  bad.methods = {"efcm:nope"};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("work precision on the heat problem decreases monotonically") {
  ExperimentSpec spec;
  spec.problem = "heat";
  spec.problem_opts["N"] = 100;
  spec.methods = {"efcm:2,2"};
  spec.stepsizes = {0.25, 0.125, 0.0625, 0.03125};
  spec.t_end = 1.0;
  spec.policy = IterationPolicy::tol(1e-12, 200);
  const auto records = work_precision(spec);
  REQUIRE(records.size() == 4);
  for (std::size_t i = 1; i < records.size(); ++i) {
    CHECK(records[i].global_error < records[i - 1].global_error);
    const double order = std::log2(records[i - 1].global_error / records[i].global_error);
    // Stiff order reduction holds EFCM(2,2) near three on this problem at
    // desk-scale stepsizes; the nonstiff fourth order is checked elsewhere.
    CHECK(order > 2.5);
    CHECK(order < 4.6);
  }
  for (const auto& r : records) {
    CHECK(!r.diverged);
    CHECK(r.wall_time_s > 0.0);
    CHECK(r.wall_time_total_s >= r.wall_time_s);
    CHECK(r.total_iterations > 0);
  }
}

TEST_CASE("work precision error decreases ~16x per halving on Henon-Heiles") {
  ExperimentSpec spec;
  spec.problem = "henon-heiles";
  spec.methods = {"efcm:2,2"};
  spec.stepsizes = {0.25, 0.125, 0.0625};
  spec.t_end = 10.0;
  spec.policy = IterationPolicy::tol(1e-13, 300);
  const auto records = work_precision(spec);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double ratio = records[i - 1].global_error / records[i].global_error;
    CHECK(ratio > 8.0);
    CHECK(ratio < 32.0);
  }
}

TEST_CASE("empty method list produces a header-only CSV") {
  ExperimentSpec spec;
  spec.problem = "henon-heiles";
  spec.methods = {};
  spec.stepsizes = {0.25};
  spec.t_end = 1.0;
  const auto records = work_precision(spec);
  CHECK(records.empty());
  CHECK(work_precision_csv(records) ==
        "method,h,global_error,wall_time_s,total_iterations,wall_time_total_s\n");
}

TEST_CASE("energy drift runs and CSV shape") {
  ExperimentSpec spec;
  spec.problem = "henon-heiles";
  spec.methods = {"efcm:2,2"};
  spec.stepsizes = {0.5};
  spec.t_end = 5.0;
  spec.policy = IterationPolicy::tol(1e-12);
  const auto records = energy_drift(spec);
  REQUIRE(records.size() == 1);
  CHECK(records[0].energy_drift.size() == 10);
  const std::string csv = energy_drift_csv(records);
  CHECK(csv.rfind("method,t,geh\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);

  // Pure rotation with g = 0: drift at roundoff level throughout.
  ExperimentSpec rot = spec;
  rot.problem = "henon-heiles";
  const Problem p = [] {
    Problem q = henon_heiles();
    q.g = [](double, const Vector& u) { return Vector(Vector::Zero(u.size())); };
    q.hamiltonian = [](const Vector& u) { return 0.5 * u.squaredNorm(); };
    return q;
  }();
  const auto rot_records = energy_drift(p, rot);
  for (const auto& [t, geh] : rot_records[0].energy_drift) CHECK(geh <= 1e-11);
}

TEST_CASE("energy drift demands a Hamiltonian") {
  ExperimentSpec spec;
  spec.problem = "heat";
  spec.problem_opts["N"] = 50;
  spec.methods = {"efcm:2,2"};
  spec.stepsizes = {0.5};
  spec.t_end = 1.0;
  try {
    energy_drift(spec);
    FAIL("expected structure-absent error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::structure_absent);
  }
}

TEST_CASE("iteration table shape, ordering and sentinels") {
  const Problem p = henon_heiles();
  const std::vector<double> tols = {1e-6, 1e-8};
  const IterationTable table = iteration_table(p, {"efcm:2,2", "hbvm:2,2"}, 0.1, 2.0, tols);
  REQUIRE(table.totals.size() == 2);
  REQUIRE(table.totals[0].size() == 2);
  // Tighter tolerances never reduce the work.
  CHECK(table.totals[0][1] >= table.totals[0][0]);
  CHECK(table.totals[1][1] >= table.totals[1][0]);

  CHECK_THROWS_AS(iteration_table(p, {"efcm:2,2"}, 0.1, 2.0, {1e-8, 1e-6}), Error);
  CHECK_THROWS_AS(iteration_table(p, {"efcm:2,2"}, 0.1, 2.0, {}), Error);

  SUBCASE("single tolerance gives a single column") {
    const IterationTable single = iteration_table(p, {"efcm:2,2"}, 0.1, 1.0, {1e-8});
    CHECK(single.totals.size() == 1);
    CHECK(single.totals[0].size() == 1);
    const std::string csv = iteration_table_csv(single);
    CHECK(csv.rfind("method,tol=1e-08\n", 0) == 0);
  }

  SUBCASE("diverged cells print as div") {
    IterationTable t;
    t.methods = {"hbvm:2,2"};
    t.tolerances = {1e-8};
    t.totals = {{-1}};
    CHECK(iteration_table_csv(t) == "method,tol=1e-08\n\"hbvm:2,2\",div\n");
  }
}

TEST_CASE("CSV bytes are stable for deterministic fields") {
  const std::string dir = (std::filesystem::temp_directory_path() / "efcm_csv_test").string();
  std::filesystem::create_directories(dir);
  ExperimentSpec spec;
  spec.problem = "henon-heiles";
  spec.methods = {"efcm:2,2", "hbvm:2,2"};
  spec.stepsizes = {0.25, 0.125};
  spec.t_end = 2.0;
  spec.policy = IterationPolicy::tol(1e-10);
  spec.serial = true;
  spec.out_path = dir + "/a.csv";
  work_precision(spec);
  const std::string first = slurp(spec.out_path);
  spec.out_path = dir + "/b.csv";
  work_precision(spec);
  const std::string second = slurp(spec.out_path);
  CHECK(strip_timings(first) == strip_timings(second));

  // Drift CSVs carry no timings and are bitwise stable.
  ExperimentSpec drift = spec;
  drift.stepsizes = {0.25};
  drift.out_path = dir + "/d1.csv";
  energy_drift(drift);
  drift.out_path = dir + "/d2.csv";
  energy_drift(drift);
  CHECK(slurp(dir + "/d1.csv") == slurp(dir + "/d2.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("gnuplot scripts are emitted on request") {
  const std::string dir = (std::filesystem::temp_directory_path() / "efcm_gp_test").string();
  std::filesystem::create_directories(dir);
  ExperimentSpec spec;
  spec.problem = "henon-heiles";
  spec.methods = {"efcm:2,2"};
  spec.stepsizes = {0.5};
  spec.t_end = 1.0;
  spec.policy = IterationPolicy::fixed(1);
  spec.gnuplot = true;
  spec.out_path = dir + "/wp.csv";
  work_precision(spec);
  CHECK(std::filesystem::exists(dir + "/wp.csv.gp"));
  const std::string script = slurp(dir + "/wp.csv.gp");
  CHECK(script.find("logscale") != std::string::npos);
  CHECK(script.find("wp.csv") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("preset registry") {
  const auto names = preset_names();
  CHECK(names.size() == 6);
  CHECK_THROWS_AS(run_preset("fig9", "/tmp"), Error);
}
