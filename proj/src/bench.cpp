#include "risopt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "risopt/json_format.hpp"
#include "solvers/solver_util.hpp"

namespace risopt::bench {

namespace pt = boost::property_tree;

std::string workload_name(Workload w) {
  switch (w) {
    case Workload::kQuadratic: return "quadratic";
    case Workload::kSecrecy: return "secrecy";
    case Workload::kUplinkPower: return "uplink_power";
    case Workload::kNetworkCost: return "network_cost";
  }
  return "unknown";
}

namespace {

Workload parse_workload(const std::string& s) {
  for (const Workload w : {Workload::kQuadratic, Workload::kSecrecy, Workload::kUplinkPower,
                           Workload::kNetworkCost}) {
    if (workload_name(w) == s) return w;
  }
  throw InvalidArgument("unknown problem '" + s + "'");
}

ProblemKind problem_kind(Workload w) {
  switch (w) {
    case Workload::kSecrecy: return ProblemKind::kSecrecy;
    case Workload::kUplinkPower: return ProblemKind::kUplinkPower;
    case Workload::kNetworkCost: return ProblemKind::kNetworkCost;
    case Workload::kQuadratic: break;
  }
  throw InvalidArgument("quadratic workload has no application problem");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  boost::split(parts, s, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("'" + key + "' expects a number, got '" + s + "'");
  }
}

std::vector<double> parse_doubles(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split_list(s)) out.push_back(parse_double(key, p));
  return out;
}

long long parse_int(const std::string& key, const std::string& s) {
  const double v = parse_double(key, s);
  if (v != std::floor(v)) throw InvalidArgument("'" + key + "' expects an integer");
  return static_cast<long long>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size() || s.front() == '-') throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("'" + key + "' expects an unsigned integer, got '" + s + "'");
  }
}

PhaseModel parse_model(const std::string& s) {
  std::string name = boost::algorithm::to_lower_copy(s);
  if (name == "c1") return C1Model{};
  if (name == "c2") return C2Model{};
  if (name == "c3") return C3Model{};
  throw InvalidArgument("unknown phase model '" + s + "' (c1, c2 or c3)");
}

const std::set<std::string>& known_params() {
  static const std::set<std::string> keys = {
      "p_max", "p_max_db", "weights", "caps", "caps_dbm", "targets", "targets_db",
      "rates", "bandwidth", "eta", "storage"};
  return keys;
}

/// Fetches every key of a section, rejecting keys not in `allowed`.
std::map<std::string, std::string> section(const pt::ptree& tree, const std::string& name,
                                           const std::set<std::string>& allowed) {
  std::map<std::string, std::string> out;
  const auto child = tree.get_child_optional(name);
  if (!child) return out;
  for (const auto& [key, value] : *child) {
    if (!allowed.count(key)) throw InvalidArgument("unknown key '" + key + "' in [" + name + "]");
    out[key] = boost::trim_copy(value.data());
  }
  return out;
}

bool needs_unit_circle(Method m) {
  return m == Method::kSdr || m == Method::kPenalty || m == Method::kMm ||
         m == Method::kManifold || m == Method::kBruteForce || m == Method::kAoDiscrete;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (methods.empty()) throw InvalidArgument("experiment needs at least one method");
  if (grid_values.empty()) throw InvalidArgument("experiment needs at least one grid value");
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (threads < 1) throw InvalidArgument("threads must be at least 1");
  if (format != "csv" && format != "json") throw InvalidArgument("format must be csv or json");
  if (dims.M < 1 || dims.N < 1 || dims.K < 1) throw InvalidArgument("M, N and K must be positive");
  if (!(noise_power > 0.0)) throw InvalidArgument("noise_power must be positive");
  const bool dim_grid = grid_param == "M" || grid_param == "N" || grid_param == "K";
  if (!dim_grid && grid_param != "levels" && !known_params().count(grid_param)) {
    throw InvalidArgument("unknown grid parameter '" + grid_param + "'");
  }
  if (dim_grid) {
    for (const double v : grid_values) {
      if (v < 1 || v != std::floor(v)) throw InvalidArgument("dimension grid values must be positive integers");
    }
  }
  if (workload == Workload::kQuadratic && grid_param != "M" && grid_param != "levels") {
    throw InvalidArgument("quadratic workload only sweeps M or levels");
  }
  const bool c1 = std::holds_alternative<C1Model>(solver.model);
  for (const Method m : methods) {
    if (m == Method::kFixed) continue;
    if (needs_unit_circle(m) && !c1) {
      throw InvalidArgument(method_name(m) + " requires phase_model = c1");
    }
    if (m == Method::kCrPg && std::holds_alternative<C3Model>(solver.model)) {
      throw InvalidArgument("cr_pg supports c1 or c2 only");
    }
  }
  solver.validate();
  bcd.validate();
}

ExperimentSpec parse_spec(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& err) {
    throw ParseError("config: " + err.message() + " on line " + std::to_string(err.line()), 0);
  }
  for (const auto& [name, child] : tree) {
    static const std::set<std::string> sections = {"experiment", "grid",   "dims",   "channel",
                                                   "params",     "solver", "bcd",    "output"};
    if (child.empty() && !child.data().empty()) {
      throw InvalidArgument("key '" + name + "' must live inside a [section]");
    }
    if (!sections.count(name)) throw InvalidArgument("unknown section [" + name + "]");
  }

  ExperimentSpec spec;
  const auto exp = section(tree, "experiment",
                           {"id", "problem", "methods", "trials", "seed", "phase_model", "signal_rank"});
  if (exp.count("id")) spec.id = exp.at("id");
  if (!exp.count("problem")) throw InvalidArgument("[experiment] needs 'problem'");
  spec.workload = parse_workload(exp.at("problem"));
  if (!exp.count("methods")) throw InvalidArgument("[experiment] needs 'methods'");
  for (const auto& m : split_list(exp.at("methods"))) spec.methods.push_back(parse_method(m));
  if (exp.count("trials")) spec.trials = static_cast<int>(parse_int("trials", exp.at("trials")));
  if (exp.count("seed")) spec.seed = parse_u64("seed", exp.at("seed"));
  if (exp.count("phase_model")) spec.solver.model = parse_model(exp.at("phase_model"));
  if (exp.count("signal_rank")) spec.signal_rank = parse_int("signal_rank", exp.at("signal_rank"));

  const auto grid = section(tree, "grid", {"param", "values"});
  if (!grid.count("param") || !grid.count("values")) {
    throw InvalidArgument("[grid] needs 'param' and 'values'");
  }
  spec.grid_param = grid.at("param");
  spec.grid_values = parse_doubles("values", grid.at("values"));

  const auto dims = section(tree, "dims", {"M", "N", "K"});
  if (dims.count("M")) spec.dims.M = parse_int("M", dims.at("M"));
  if (dims.count("N")) spec.dims.N = parse_int("N", dims.at("N"));
  if (dims.count("K")) spec.dims.K = parse_int("K", dims.at("K"));

  const auto ch = section(tree, "channel", {"fading", "k_factor", "noise_power", "noise_power_dbm"});
  if (ch.count("fading")) {
    const std::string f = ch.at("fading");
    if (f == "rayleigh") {
      spec.fading = FadingModel::rayleigh();
    } else if (f == "rician") {
      spec.fading = FadingModel::rician(ch.count("k_factor") ? parse_double("k_factor", ch.at("k_factor")) : 1.0);
    } else {
      throw InvalidArgument("fading must be rayleigh or rician");
    }
  }
  if (ch.count("noise_power")) spec.noise_power = parse_double("noise_power", ch.at("noise_power"));
  if (ch.count("noise_power_dbm")) {
    spec.noise_power = dbm_to_linear(parse_double("noise_power_dbm", ch.at("noise_power_dbm")));
  }

  spec.params = section(tree, "params", known_params());
  for (const auto& [key, value] : spec.params) parse_doubles(key, value);

  const auto sv = section(tree, "solver",
                          {"max_iters", "rel_tol", "admm_iters", "admm_rho", "admm_tol",
                           "n_randomizations", "mu0", "mu_decay", "penalty_relative_weight",
                           "armijo_c1", "backtrack", "initial_step", "gd_starts", "sweeps",
                           "levels", "dinkelbach_rounds", "dinkelbach_tol"});
  SolverConfig& s = spec.solver;
  auto set_int = [&](const char* key, int& field) {
    if (sv.count(key)) field = static_cast<int>(parse_int(key, sv.at(key)));
  };
  auto set_real = [&](const char* key, double& field) {
    if (sv.count(key)) field = parse_double(key, sv.at(key));
  };
  set_int("max_iters", s.max_iters);
  set_real("rel_tol", s.rel_tol);
  set_int("admm_iters", s.sdr.admm_iters);
  set_real("admm_rho", s.sdr.admm_rho);
  set_real("admm_tol", s.sdr.admm_tol);
  set_int("n_randomizations", s.sdr.n_randomizations);
  set_real("mu0", s.penalty.mu0);
  set_real("mu_decay", s.penalty.mu_decay);
  set_real("penalty_relative_weight", s.penalty.relative_weight);
  set_real("armijo_c1", s.line_search.c1);
  set_real("backtrack", s.line_search.backtrack);
  set_real("initial_step", s.line_search.initial_step);
  set_int("gd_starts", s.gd_starts);
  set_int("sweeps", s.ao_sweeps);
  set_int("levels", s.levels);
  set_int("dinkelbach_rounds", s.dinkelbach_rounds);
  set_real("dinkelbach_tol", s.dinkelbach_tol);

  const auto bc = section(tree, "bcd", {"outer_max_iters", "outer_rel_tol"});
  if (bc.count("outer_max_iters")) {
    spec.bcd.outer_max_iters = static_cast<int>(parse_int("outer_max_iters", bc.at("outer_max_iters")));
  }
  if (bc.count("outer_rel_tol")) spec.bcd.outer_rel_tol = parse_double("outer_rel_tol", bc.at("outer_rel_tol"));
  spec.bcd.record_trajectory = false;

  const auto out = section(tree, "output", {"path", "format", "threads"});
  if (out.count("path")) spec.output_path = out.at("path");
  if (out.count("format")) spec.format = out.at("format");
  if (out.count("threads")) spec.threads = static_cast<int>(parse_int("threads", out.at("threads")));

  spec.validate();
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

std::uint64_t instance_seed(const ExperimentSpec& spec, std::size_t grid_index, int trial) {
  const bool dimension_grid =
      spec.grid_param == "M" || spec.grid_param == "N" || spec.grid_param == "K";
  const std::uint64_t g = dimension_grid ? static_cast<std::uint64_t>(grid_index) : 0;
  return trial_seed(spec.seed, static_cast<std::uint64_t>(trial)) ^ (g << 32);
}

Dims grid_dims(const ExperimentSpec& spec, double grid_value) {
  Dims d = spec.dims;
  if (spec.grid_param == "M") d.M = static_cast<Index>(grid_value);
  if (spec.grid_param == "N") d.N = static_cast<Index>(grid_value);
  if (spec.grid_param == "K") d.K = static_cast<Index>(grid_value);
  return d;
}

nlohmann::json problem_params(const ExperimentSpec& spec, double grid_value) {
  std::map<std::string, std::vector<double>> raw;
  for (const auto& [key, value] : spec.params) raw[key] = parse_doubles(key, value);
  if (known_params().count(spec.grid_param)) {
    raw[spec.grid_param] = {grid_value};
    // A grid over one unit form replaces the other.
    static const std::map<std::string, std::string> twin = {
        {"p_max", "p_max_db"}, {"p_max_db", "p_max"}, {"caps", "caps_dbm"},
        {"caps_dbm", "caps"},  {"targets", "targets_db"}, {"targets_db", "targets"}};
    if (twin.count(spec.grid_param)) raw.erase(twin.at(spec.grid_param));
  }
  nlohmann::json out = nlohmann::json::object();
  auto put = [&](const std::string& key, std::vector<double> v,
                 const std::function<double(double)>& convert) {
    for (double& x : v) x = convert(x);
    if (v.size() == 1) {
      out[key] = v.front();
    } else {
      out[key] = v;
    }
  };
  const auto same = [](double x) { return x; };
  for (const auto& [key, v] : raw) {
    if (key == "p_max_db") {
      put("p_max", v, [](double x) { return db_to_linear(x); });
    } else if (key == "caps_dbm") {
      put("caps", v, [](double x) { return dbm_to_linear(x); });
    } else if (key == "targets_db") {
      put("targets", v, [](double x) { return db_to_linear(x); });
    } else {
      put(key, v, same);
    }
  }
  return out;
}

namespace {

SolverConfig cell_solver(const ExperimentSpec& spec, Method m, std::uint64_t seed) {
  SolverConfig cfg = spec.solver;
  cfg.method = m;
  cfg.seed = seed;
  return cfg;
}

std::uint64_t seed_fingerprint(std::uint64_t seed, Index M) {
  return detail::mix_seed(seed, static_cast<std::uint64_t>(M));
}

template <typename Fn>
void fill_error(Row& row, Fn&& fn) {
  try {
    fn();
  } catch (const FeasibilityError&) {
    row.status = status_name(SolverStatus::kInfeasible);
    row.objective = std::nan("");
  } catch (const Error&) {
    row.status = status_name(SolverStatus::kNumericalFailure);
    row.objective = std::nan("");
  }
}

struct Cell {
  std::size_t grid_index = 0;
  int trial = 0;
  std::size_t method_index = 0;
};

/// Runs fn(cell, rows_out) over all cells on `threads` workers; each cell
/// writes a fixed-size block of rows, so the output order never depends on
/// scheduling.
ResultTable run_cells(const ExperimentSpec& spec, std::size_t rows_per_cell,
                      const std::function<void(const Cell&, Row*)>& fn) {
  std::vector<Cell> cells;
  for (std::size_t g = 0; g < spec.grid_values.size(); ++g) {
    for (int t = 0; t < spec.trials; ++t) {
      for (std::size_t m = 0; m < spec.methods.size(); ++m) cells.push_back({g, t, m});
    }
  }
  ResultTable table(cells.size() * rows_per_cell);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        fn(cells[i], &table[i * rows_per_cell]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(spec.threads, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return table;
}

Row base_row(const ExperimentSpec& spec, const Cell& c) {
  Row row;
  row.experiment_id = spec.id;
  row.method = method_name(spec.methods[c.method_index]);
  row.grid_param = spec.grid_param;
  row.grid_value = spec.grid_values[c.grid_index];
  row.trial = c.trial;
  row.seed = instance_seed(spec, c.grid_index, c.trial);
  return row;
}

int grid_levels(const ExperimentSpec& spec, double grid_value) {
  return spec.grid_param == "levels" ? static_cast<int>(grid_value) : spec.solver.levels;
}

}  // namespace

ResultTable run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  return run_cells(spec, 1, [&](const Cell& c, Row* out) {
    Row& row = *out;
    row = base_row(spec, c);
    const Method m = spec.methods[c.method_index];
    const Dims dims = grid_dims(spec, row.grid_value);
    SolverConfig cfg = cell_solver(spec, m, row.seed);
    cfg.levels = grid_levels(spec, row.grid_value);
    if (spec.workload == Workload::kQuadratic) {
      row.fingerprint = seed_fingerprint(row.seed, dims.M);
      fill_error(row, [&] {
        const QuadraticObjective obj = random_quadratic(dims.M, row.seed, spec.signal_rank);
        const SolverReport r = solve(obj, CVector::Ones(dims.M), cfg);
        row.objective = r.final_objective;
        row.wall_time_s = r.wall_time;
        row.iterations = r.iterations;
        row.status = status_name(r.status);
      });
      return;
    }
    const ChannelSet cs = sample_channels(dims, spec.fading, row.seed, spec.noise_power);
    row.fingerprint = fingerprint(cs);
    fill_error(row, [&] {
      auto problem = make_problem(problem_kind(spec.workload), cs, problem_params(spec, row.grid_value));
      BcdConfig bcd = spec.bcd;
      bcd.e_method = cfg;
      const BcdReport r = run_bcd(*problem, std::nullopt, bcd);
      row.objective = r.final_objective;
      row.wall_time_s = r.wall_time;
      row.iterations = r.outer_iterations;
      row.status = status_name(r.status);
    });
  });
}

ResultTable run_quantize_study(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.grid_param != "levels") throw InvalidArgument("quantize-study sweeps 'levels'");
  for (const double v : spec.grid_values) {
    if (v < 2 || v != std::floor(v)) throw InvalidArgument("levels must be integers >= 2");
  }
  for (const Method m : spec.methods) {
    if (m == Method::kBruteForce || m == Method::kAoDiscrete) {
      throw InvalidArgument("quantize-study takes continuous methods");
    }
  }
  return run_cells(spec, 2, [&](const Cell& c, Row* out) {
    Row& cont = out[0];
    Row& quant = out[1];
    cont = base_row(spec, c);
    const int levels = static_cast<int>(cont.grid_value);
    const Method m = spec.methods[c.method_index];
    const Dims dims = grid_dims(spec, cont.grid_value);
    const SolverConfig cfg = cell_solver(spec, m, cont.seed);
    quant = cont;
    quant.method = cont.method + "_q";
    auto quantized_e = [&](const PhaseVector& e) {
      return quantize(PhaseVector::from_theta(e.theta(), C1Model{}), levels).coefficients();
    };
    if (spec.workload == Workload::kQuadratic) {
      cont.fingerprint = quant.fingerprint = seed_fingerprint(cont.seed, dims.M);
      fill_error(cont, [&] {
        const QuadraticObjective obj = random_quadratic(dims.M, cont.seed, spec.signal_rank);
        const SolverReport r = solve(obj, CVector::Ones(dims.M), cfg);
        cont.objective = r.final_objective;
        cont.wall_time_s = r.wall_time;
        cont.iterations = r.iterations;
        cont.status = status_name(r.status);
        detail::Stopwatch clock;
        quant.objective = obj.value(quantized_e(r.final_e));
        quant.wall_time_s = clock.seconds();
        quant.iterations = 0;
        quant.status = cont.status;
      });
      if (std::isnan(cont.objective)) {
        quant.objective = cont.objective;
        quant.status = cont.status;
      }
      return;
    }
    const ChannelSet cs = sample_channels(dims, spec.fading, cont.seed, spec.noise_power);
    cont.fingerprint = quant.fingerprint = fingerprint(cs);
    fill_error(cont, [&] {
      auto problem = make_problem(problem_kind(spec.workload), cs, problem_params(spec, cont.grid_value));
      BcdConfig bcd = spec.bcd;
      bcd.e_method = cfg;
      const BcdReport r = run_bcd(*problem, std::nullopt, bcd);
      cont.objective = r.final_objective;
      cont.wall_time_s = r.wall_time;
      cont.iterations = r.outer_iterations;
      cont.status = status_name(r.status);
      if (r.status == SolverStatus::kInfeasible) {
        quant.objective = cont.objective;
        quant.status = cont.status;
        return;
      }
      fill_error(quant, [&] {
        detail::Stopwatch clock;
        const CVector eq = quantized_e(project_unit_circle(r.final_e));
        problem->update_x(eq);
        quant.objective = problem->reported_objective(eq);
        quant.wall_time_s = clock.seconds();
        quant.iterations = 1;
        quant.status = problem->violated_constraints(eq).empty()
                           ? status_name(SolverStatus::kConverged)
                           : status_name(SolverStatus::kInfeasible);
      });
    });
  });
}

GridOracle grid_oracle(const QuadraticObjective& obj, int resolution) {
  const Index M = obj.dim();
  if (M < 1 || M > 3) throw CapacityError("grid oracle supports M <= 3");
  if (resolution < 2) throw InvalidArgument("grid resolution must be at least 2");
  std::vector<Complex> pts(static_cast<std::size_t>(resolution));
  for (int l = 0; l < resolution; ++l) {
    pts[static_cast<std::size_t>(l)] = std::polar(1.0, 2.0 * std::numbers::pi * l / resolution);
  }
  const CMatrix A = obj.model().A.to_dense();
  const CVector& b = obj.model().b;
  std::vector<int> idx(static_cast<std::size_t>(M), 0);
  CVector e(M), best_e(M);
  double best = 0.0;
  bool have = false;
  const long long total = static_cast<long long>(std::pow(resolution, static_cast<double>(M)));
  for (long long n = 0; n < total; ++n) {
    long long rest = n;
    for (Index m = 0; m < M; ++m) {
      e(m) = pts[static_cast<std::size_t>(rest % resolution)];
      rest /= resolution;
    }
    const double f = obj.value(e);
    if (!have || f < best) {
      best = f;
      best_e = e;
      have = true;
    }
  }
  GridOracle out;
  out.grid_value = best;
  // Exact coordinate minimization: with the others fixed, e_m enters
  // through 2 Re(conj(e_m) r_m), minimized by e_m = -r_m / |r_m|.
  e = best_e;
  double f = best;
  for (int sweep = 0; sweep < 10000; ++sweep) {
    for (Index m = 0; m < M; ++m) {
      Complex r = b(m);
      for (Index j = 0; j < M; ++j) {
        if (j != m) r += A(m, j) * e(j);
      }
      if (std::abs(r) > 0.0) e(m) = -r / std::abs(r);
    }
    const double next = obj.value(e);
    const bool done = f - next <= 1e-15 * (1.0 + std::abs(f));
    f = std::min(f, next);
    if (done) break;
  }
  out.polished_value = f;
  out.e = e;
  return out;
}

ResultTable run_oracle_check(const ExperimentSpec& spec, std::vector<OracleSummary>* summary) {
  spec.validate();
  if (spec.workload != Workload::kQuadratic) throw InvalidArgument("oracle-check uses problem = quadratic");
  for (const double v : spec.grid_values) {
    if (spec.grid_param != "M" || v > 3) throw InvalidArgument("oracle-check needs an M grid with M <= 3");
  }
  constexpr int kResolution = 72;
  // Oracles depend only on the instance; compute them once per (grid, trial).
  std::vector<GridOracle> oracles(spec.grid_values.size() * static_cast<std::size_t>(spec.trials));
  ExperimentSpec oracle_spec = spec;
  oracle_spec.methods = {Method::kFixed};
  run_cells(oracle_spec, 1, [&](const Cell& c, Row*) {
    const Index M = static_cast<Index>(spec.grid_values[c.grid_index]);
    const std::uint64_t seed = instance_seed(spec, c.grid_index, c.trial);
    oracles[c.grid_index * static_cast<std::size_t>(spec.trials) + static_cast<std::size_t>(c.trial)] =
        grid_oracle(random_quadratic(M, seed, spec.signal_rank), kResolution);
  });

  ResultTable methods = run_experiment(spec);
  ResultTable table;
  std::map<std::string, OracleSummary> tally;
  std::size_t i = 0;
  for (std::size_t g = 0; g < spec.grid_values.size(); ++g) {
    for (int t = 0; t < spec.trials; ++t) {
      const GridOracle& o = oracles[g * static_cast<std::size_t>(spec.trials) + static_cast<std::size_t>(t)];
      Row orow;
      orow.experiment_id = spec.id;
      orow.method = "grid_oracle";
      orow.grid_param = spec.grid_param;
      orow.grid_value = spec.grid_values[g];
      orow.trial = t;
      orow.seed = instance_seed(spec, g, t);
      orow.fingerprint = seed_fingerprint(orow.seed, static_cast<Index>(orow.grid_value));
      orow.objective = o.polished_value;
      orow.iterations = kResolution;
      orow.status = status_name(SolverStatus::kConverged);
      table.push_back(orow);
      for (std::size_t m = 0; m < spec.methods.size(); ++m, ++i) {
        const Row& row = methods[i];
        table.push_back(row);
        OracleSummary& s = tally[row.method];
        s.method = row.method;
        const Method method = spec.methods[m];
        s.relative = method == Method::kSdr;
        s.tolerance = method == Method::kSdr ? 0.05 : (method == Method::kGd || method == Method::kManifold) ? 1e-3 : 1e-2;
        const double slack = s.relative ? s.tolerance * std::abs(o.polished_value) : s.tolerance;
        ++s.instances;
        if (std::isfinite(row.objective) && row.objective <= o.polished_value + slack) ++s.within;
      }
    }
  }
  if (summary != nullptr) {
    summary->clear();
    for (const Method m : spec.methods) {
      const auto it = tally.find(method_name(m));
      if (it != tally.end()) summary->push_back(it->second);
    }
  }
  return table;
}

std::map<std::string, double> fit_slopes(const ResultTable& table) {
  // method -> grid value -> (sum, count)
  std::map<std::string, std::map<double, std::pair<double, int>>> acc;
  for (const Row& r : table) {
    if (!(r.grid_value > 0.0) || !(r.wall_time_s > 0.0)) continue;
    auto& cell = acc[r.method][r.grid_value];
    cell.first += r.wall_time_s;
    cell.second += 1;
  }
  std::map<std::string, double> out;
  for (const auto& [method, points] : acc) {
    if (points.size() < 2) continue;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(points.size());
    for (const auto& [x, cell] : points) {
      const double lx = std::log(x);
      const double ly = std::log(cell.first / cell.second);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    out[method] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return out;
}

std::string format_csv(const ResultTable& table) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const Row& r : table) {
    out += r.experiment_id + ',' + r.method + ',' + r.grid_param + ',' + format_double17(r.grid_value) +
           ',' + std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' +
           format_double17(r.objective) + ',' + format_double17(r.wall_time_s) + ',' +
           std::to_string(r.iterations) + ',' + r.status + '\n';
  }
  return out;
}

nlohmann::json to_json(const ResultTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const Row& r : table) {
    rows.push_back({{"experiment_id", r.experiment_id},
                    {"method", r.method},
                    {"grid_param", r.grid_param},
                    {"grid_value", r.grid_value},
                    {"trial", r.trial},
                    {"seed", r.seed},
                    {"objective", r.objective},
                    {"wall_time_s", r.wall_time_s},
                    {"iterations", r.iterations},
                    {"status", r.status}});
  }
  return rows;
}

ResultTable from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("result JSON must be an array", 0);
  ResultTable table;
  for (const auto& o : j) {
    Row r;
    r.experiment_id = o.at("experiment_id").get<std::string>();
    r.method = o.at("method").get<std::string>();
    r.grid_param = o.at("grid_param").get<std::string>();
    r.grid_value = o.at("grid_value").get<double>();
    r.trial = o.at("trial").get<int>();
    r.seed = o.at("seed").get<std::uint64_t>();
    r.objective = o.at("objective").is_null() ? std::nan("") : o.at("objective").get<double>();
    r.wall_time_s = o.at("wall_time_s").get<double>();
    r.iterations = o.at("iterations").get<int>();
    r.status = o.at("status").get<std::string>();
    table.push_back(std::move(r));
  }
  return table;
}

void emit(const ResultTable& table, const std::string& format, const std::filesystem::path& path) {
  std::string text;
  if (format == "csv") {
    text = format_csv(table);
  } else if (format == "json") {
    text = dump_json17(to_json(table), 1) + "\n";
  } else {
    throw InvalidArgument("format must be csv or json");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace risopt::bench
