#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "risopt/bcd.hpp"
#include "risopt/channels.hpp"
#include "risopt/problems.hpp"
#include "risopt/solvers.hpp"

namespace risopt::bench {

/// What one trial solves: a random quadratic e-subproblem, or a full
/// application problem through the BCD loop.
enum class Workload { kQuadratic, kSecrecy, kUplinkPower, kNetworkCost };

std::string workload_name(Workload w);

struct ExperimentSpec {
  std::string id = "experiment";
  Workload workload = Workload::kQuadratic;
  std::vector<Method> methods;
  int trials = 1;
  std::uint64_t seed = 0;
  Dims dims{10, 1, 1};
  FadingModel fading;
  double noise_power = 1.0;
  std::string grid_param = "M";
  std::vector<double> grid_values;
  /// Problem parameters as read from [params]; unit suffixes (_db, _dbm) are
  /// converted per instance so a grid may sweep either form.
  std::map<std::string, std::string> params;
  SolverConfig solver;
  BcdConfig bcd;
  Index signal_rank = 2;  // quadratic workload
  int threads = 1;
  std::string output_path;
  std::string format = "csv";

  /// Throws InvalidArgument on an empty grid/method list or bad combinations.
  void validate() const;
};

/// Parses the INI text of an experiment. Throws ParseError/InvalidArgument.
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::filesystem::path& path);

struct Row {
  std::string experiment_id;
  std::string method;
  std::string grid_param;
  double grid_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double objective = 0.0;
  double wall_time_s = 0.0;
  int iterations = 0;
  std::string status;
  /// Channel fingerprint of the instance; not part of the emitted schema.
  std::uint64_t fingerprint = 0;

  bool operator==(const Row&) const = default;
};

using ResultTable = std::vector<Row>;

inline constexpr const char* kCsvHeader =
    "experiment_id,method,grid_param,grid_value,trial,seed,objective,wall_time_s,iterations,status";

/// Seed of the instance at (grid index, trial). Grids over M, N or K get a
/// fresh instance per point; other grids reuse the trial's instance at every
/// point so curves compare like with like.
std::uint64_t instance_seed(const ExperimentSpec& spec, std::size_t grid_index, int trial);

/// Dims after applying a grid value (M, N or K grids).
Dims grid_dims(const ExperimentSpec& spec, double grid_value);

/// Problem parameters for one grid value, as accepted by make_problem.
nlohmann::json problem_params(const ExperimentSpec& spec, double grid_value);

/// Every (grid point, trial, method) cell; rows are ordered by grid point,
/// trial, then the method order of the spec, independent of `threads`.
ResultTable run_experiment(const ExperimentSpec& spec);

/// Quantization study: for each grid value of `levels` the continuous
/// solution of every method is quantized and re-scored; the continuous row
/// is emitted under the method name and the quantized row as "<method>_q".
ResultTable run_quantize_study(const ExperimentSpec& spec);

struct OracleSummary {
  std::string method;
  int instances = 0;
  int within = 0;
  double tolerance = 0.0;
  bool relative = false;
};

/// M=3 quadratic instances against a 72^3 grid search polished by exact
/// coordinate descent. The oracle itself is emitted as method "grid_oracle".
ResultTable run_oracle_check(const ExperimentSpec& spec, std::vector<OracleSummary>* summary);

/// Minimum of a unit-modulus objective of size <= 3 over a `resolution`^M
/// phase grid, refined by cyclic exact coordinate minimization.
struct GridOracle {
  double grid_value = 0.0;
  double polished_value = 0.0;
  CVector e;
};
GridOracle grid_oracle(const QuadraticObjective& obj, int resolution);

/// Log-log least-squares slope of mean wall time against the grid value per
/// method; methods with fewer than two distinct grid points get no entry.
std::map<std::string, double> fit_slopes(const ResultTable& table);

std::string format_csv(const ResultTable& table);
nlohmann::json to_json(const ResultTable& table);
ResultTable from_json(const nlohmann::json& j);
/// Writes CSV or JSON; throws IoError.
void emit(const ResultTable& table, const std::string& format, const std::filesystem::path& path);

}  // namespace risopt::bench
