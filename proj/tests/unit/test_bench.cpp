#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "risopt/bench.hpp"
#include "risopt/json_format.hpp"

using namespace risopt;
using namespace risopt::bench;

namespace {

const char* kOnePoint = R"(
[experiment]
id = tiny
problem = quadratic
methods = manifold
trials = 1
seed = 5

[grid]
param = M
values = 8
)";

const char* kSecrecy = R"(
[experiment]
id = sec
problem = secrecy
methods = manifold, mm
trials = 2
seed = 11

[grid]
param = p_max_db
values = 0, 10

[dims]
M = 6
N = 4
K = 1
)";

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (const char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("smallest sweep is one row") {
  const auto table = run_experiment(parse_spec(kOnePoint));
  REQUIRE(table.size() == 1);
  const Row& r = table[0];
  CHECK(r.experiment_id == "tiny");
  CHECK(r.method == "manifold");
  CHECK(r.grid_param == "M");
  CHECK(r.grid_value == 8.0);
  CHECK(r.status == "converged");
  CHECK(std::isfinite(r.objective));
}

TEST_CASE("methods of one instance share its channels") {
  const auto table = run_experiment(parse_spec(kSecrecy));
  REQUIRE(table.size() == 8);
  for (std::size_t i = 0; i < table.size(); i += 2) {
    CHECK(table[i].method == "manifold");
    CHECK(table[i + 1].method == "mm");
    CHECK(table[i].fingerprint == table[i + 1].fingerprint);
    CHECK(table[i].seed == table[i + 1].seed);
  }
  // A power grid keeps the trial's channels at every point.
  CHECK(table[0].fingerprint == table[4].fingerprint);
  CHECK(table[0].fingerprint != table[2].fingerprint);
  // More power cannot lower the secrecy rate of the same channels by much.
  CHECK(table[4].objective >= table[0].objective - 1e-6);
}

TEST_CASE("dimension grids draw a fresh instance per point") {
  ExperimentSpec spec = parse_spec(kOnePoint);
  spec.grid_values = {4, 8};
  CHECK(instance_seed(spec, 0, 3) != instance_seed(spec, 1, 3));
  CHECK(grid_dims(spec, 4).M == 4);
}

TEST_CASE("csv accounting") {
  ExperimentSpec spec = parse_spec(kSecrecy);
  const auto table = run_experiment(spec);
  const std::string csv = format_csv(table);
  CHECK(count_lines(csv) == spec.grid_values.size() * spec.methods.size() * spec.trials + 1);
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(format_csv({}) == std::string(kCsvHeader) + "\n");
}

TEST_CASE("csv rendering") {
  Row r;
  r.experiment_id = "x";
  r.method = "gd";
  r.grid_param = "M";
  r.grid_value = 16;
  r.trial = 2;
  r.seed = 7;
  r.objective = 0.1;
  r.wall_time_s = 0.5;
  r.iterations = 12;
  r.status = "converged";
  const std::string csv = format_csv({r});
  CHECK(csv == std::string(kCsvHeader) +
                   "\nx,gd,M,16.0,2,7,0.10000000000000001,0.5,12,converged\n");
  r.objective = std::nan("");
  CHECK(format_csv({r}).find(",nan,") != std::string::npos);
}

TEST_CASE("json round trip") {
  auto table = run_experiment(parse_spec(kSecrecy));
  table[1].objective = std::nan("");
  table[1].status = "infeasible";
  const std::string text = dump_json17(to_json(table));
  const auto back = from_json(nlohmann::json::parse(text));
  REQUIRE(back.size() == table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    Row expected = table[i];
    expected.fingerprint = 0;
    Row got = back[i];
    got.fingerprint = 0;
    if (i == 1) {
      CHECK(std::isnan(got.objective));
      got.objective = expected.objective = 0.0;
    }
    CHECK(got == expected);
  }
}

TEST_CASE("emit writes files") {
  const auto table = run_experiment(parse_spec(kOnePoint));
  const auto dir = std::filesystem::temp_directory_path();
  emit(table, "csv", dir / "risopt_bench_test.csv");
  emit(table, "json", dir / "risopt_bench_test.json");
  std::ifstream csv(dir / "risopt_bench_test.csv");
  std::stringstream buf;
  buf << csv.rdbuf();
  CHECK(buf.str() == format_csv(table));
  std::ifstream js(dir / "risopt_bench_test.json");
  CHECK(from_json(nlohmann::json::parse(js)).size() == 1);
  CHECK_THROWS_AS(emit(table, "xml", dir / "x.xml"), InvalidArgument);
  CHECK_THROWS_AS(emit(table, "csv", "/nonexistent/dir/out.csv"), IoError);
}

TEST_CASE("slopes") {
  ResultTable t;
  for (const double M : {16.0, 32.0, 64.0}) {
    Row r;
    r.method = "manifold";
    r.grid_param = "M";
    r.grid_value = M;
    r.wall_time_s = 1e-3 * M * M;
    t.push_back(r);
  }
  const auto slopes = fit_slopes(t);
  REQUIRE(slopes.count("manifold") == 1);
  CHECK(slopes.at("manifold") == doctest::Approx(2.0));

  ResultTable single(1);
  single[0].method = "sdr";
  single[0].grid_value = 16;
  single[0].wall_time_s = 1.0;
  CHECK(fit_slopes(single).empty());
}

TEST_CASE("determinism across thread counts") {
  ExperimentSpec spec = parse_spec(kSecrecy);
  auto strip = [](ResultTable t) {
    for (auto& r : t) r.wall_time_s = 0.0;
    return format_csv(t);
  };
  const std::string one = strip(run_experiment(spec));
  spec.threads = 3;
  CHECK(strip(run_experiment(spec)) == one);
  CHECK(strip(run_experiment(spec)) == one);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_spec("[experiment]\nproblem = quadratic\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_spec(std::string(kOnePoint) + "\n[bogus]\nx = 1\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_spec(std::string(kOnePoint) + "\n[solver]\nspeed = 3\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_spec("[experiment\nid = 1\n"), ParseError);
  std::string bad_method = kOnePoint;
  bad_method.replace(bad_method.find("manifold"), 8, "newton");
  CHECK_THROWS_AS(parse_spec(bad_method), InvalidArgument);
  CHECK_THROWS_AS(load_spec("/nonexistent/spec.ini"), IoError);
}

TEST_CASE("dB parameters convert per grid point") {
  const ExperimentSpec spec = parse_spec(kSecrecy);
  CHECK(problem_params(spec, 10.0)["p_max"].get<double>() == doctest::Approx(10.0));
  CHECK(problem_params(spec, 0.0)["p_max"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("quantization study pairs rows") {
  const std::string text = R"(
[experiment]
id = q
problem = quadratic
methods = manifold
trials = 3
seed = 2

[grid]
param = levels
values = 2, 8

[dims]
M = 6
)";
  const auto table = run_quantize_study(parse_spec(text));
  REQUIRE(table.size() == 12);
  for (std::size_t i = 0; i < table.size(); i += 2) {
    CHECK(table[i].method == "manifold");
    CHECK(table[i + 1].method == "manifold_q");
    CHECK(table[i + 1].objective >= table[i].objective - 1e-9);
  }
}

TEST_CASE("oracle check on small instances") {
  const std::string text = R"(
[experiment]
id = o
problem = quadratic
methods = manifold, sdr
trials = 4
seed = 9

[grid]
param = M
values = 3
)";
  std::vector<OracleSummary> summary;
  const auto table = run_oracle_check(parse_spec(text), &summary);
  CHECK(table.size() == 12);
  CHECK(table[0].method == "grid_oracle");
  REQUIRE(summary.size() == 2);
  for (const auto& s : summary) {
    CHECK(s.instances == 4);
    CHECK(s.within >= 3);
  }
  const auto o = grid_oracle(random_quadratic(2, 1), 36);
  CHECK(o.polished_value <= o.grid_value);
}
