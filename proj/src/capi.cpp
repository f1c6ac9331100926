#include "risopt/risopt.h"

#include <memory>
#include <string>

#include "risopt/bcd.hpp"
#include "risopt/bench.hpp"
#include "risopt/channels.hpp"
#include "risopt/json_format.hpp"
#include "risopt/problems.hpp"

struct risopt_channels {
  risopt::ChannelSet cs;
};

struct risopt_problem {
  std::unique_ptr<risopt::Problem> problem;
  std::string report;
};

struct risopt_experiment {
  risopt::bench::ExperimentSpec spec;
};

struct risopt_table {
  risopt::bench::ResultTable rows;
  std::string summary = "{}";
  std::string rendered;
};

namespace {

thread_local std::string last_error;

risopt_status fail(risopt_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename Fn>
risopt_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return RISOPT_OK;
  } catch (const risopt::Error& err) {
    return fail(static_cast<risopt_status>(err.code()), err.what());
  } catch (const nlohmann::json::exception& err) {
    return fail(RISOPT_ERR_PARSE, err.what());
  } catch (const std::bad_alloc&) {
    return fail(RISOPT_ERR_CAPACITY, "out of memory");
  } catch (const std::exception& err) {
    return fail(RISOPT_ERR_INTERNAL, err.what());
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw risopt::InvalidArgument(std::string(what) + " must not be NULL");
}

risopt::CVector read_phase(const double* e, risopt::Index M) {
  require(e, "e");
  risopt::CVector out(M);
  for (risopt::Index m = 0; m < M; ++m) out(m) = {e[2 * m], e[2 * m + 1]};
  return out;
}

risopt::SolverConfig solver_from_json(const nlohmann::json& j) {
  risopt::SolverConfig cfg;
  if (j.contains("method")) cfg.method = risopt::parse_method(j.at("method").get<std::string>());
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.rel_tol = j.value("rel_tol", cfg.rel_tol);
  cfg.sdr.admm_iters = j.value("admm_iters", cfg.sdr.admm_iters);
  cfg.sdr.admm_rho = j.value("admm_rho", cfg.sdr.admm_rho);
  cfg.sdr.n_randomizations = j.value("n_randomizations", cfg.sdr.n_randomizations);
  cfg.penalty.mu0 = j.value("mu0", cfg.penalty.mu0);
  cfg.penalty.mu_decay = j.value("mu_decay", cfg.penalty.mu_decay);
  cfg.gd_starts = j.value("gd_starts", cfg.gd_starts);
  cfg.levels = j.value("levels", cfg.levels);
  return cfg;
}

}  // namespace

extern "C" {

const char* risopt_version(void) { return "1.0.0"; }

const char* risopt_last_error(void) { return last_error.c_str(); }

const char* risopt_status_name(risopt_status status) {
  return risopt::error_code_name(static_cast<risopt::ErrorCode>(status));
}

risopt_status risopt_channels_sample(size_t M, size_t N, size_t K, const char* fading,
                                     double k_factor, uint64_t seed, double noise_power,
                                     risopt_channels** out) {
  return guarded([&] {
    require(out, "out");
    const std::string f = fading ? fading : "rayleigh";
    risopt::FadingModel model;
    if (f == "rician") {
      model = risopt::FadingModel::rician(k_factor);
    } else if (f != "rayleigh") {
      throw risopt::InvalidArgument("fading must be rayleigh or rician");
    }
    const risopt::Dims dims{static_cast<risopt::Index>(M), static_cast<risopt::Index>(N),
                            static_cast<risopt::Index>(K)};
    *out = new risopt_channels{risopt::sample_channels(dims, model, seed, noise_power)};
  });
}

risopt_status risopt_channels_load(const char* path, risopt_channels** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new risopt_channels{risopt::load_dataset(path)};
  });
}

risopt_status risopt_channels_save(const risopt_channels* channels, const char* path) {
  return guarded([&] {
    require(channels, "channels");
    require(path, "path");
    risopt::save_dataset(channels->cs, path);
  });
}

risopt_status risopt_channels_fingerprint(const risopt_channels* channels, uint64_t* out) {
  return guarded([&] {
    require(channels, "channels");
    require(out, "out");
    *out = risopt::fingerprint(channels->cs);
  });
}

void risopt_channels_free(risopt_channels* channels) { delete channels; }

risopt_status risopt_problem_create(const char* kind, const risopt_channels* channels,
                                    const char* params_json, risopt_problem** out) {
  return guarded([&] {
    require(kind, "kind");
    require(channels, "channels");
    require(out, "out");
    const nlohmann::json params =
        params_json ? nlohmann::json::parse(params_json) : nlohmann::json::object();
    auto p = risopt::make_problem(risopt::parse_kind(kind), channels->cs, params);
    *out = new risopt_problem{std::move(p), {}};
  });
}

risopt_status risopt_problem_update_x(risopt_problem* problem, const double* e) {
  return guarded([&] {
    require(problem, "problem");
    problem->problem->update_x(read_phase(e, problem->problem->dims().M));
  });
}

risopt_status risopt_problem_objective(const risopt_problem* problem, const double* e,
                                       double* out) {
  return guarded([&] {
    require(problem, "problem");
    require(out, "out");
    *out = problem->problem->reported_objective(read_phase(e, problem->problem->dims().M));
  });
}

risopt_status risopt_problem_run_bcd(risopt_problem* problem, const char* solver_json,
                                     const char** report_json) {
  return guarded([&] {
    require(problem, "problem");
    require(report_json, "report_json");
    const nlohmann::json j =
        solver_json ? nlohmann::json::parse(solver_json) : nlohmann::json::object();
    risopt::BcdConfig cfg;
    cfg.e_method = solver_from_json(j);
    cfg.outer_max_iters = j.value("outer_max_iters", cfg.outer_max_iters);
    cfg.outer_rel_tol = j.value("outer_rel_tol", cfg.outer_rel_tol);
    const risopt::BcdReport report = risopt::run_bcd(*problem->problem, std::nullopt, cfg);
    problem->report = risopt::dump_json17(report.to_json());
    *report_json = problem->report.c_str();
  });
}

void risopt_problem_free(risopt_problem* problem) { delete problem; }

risopt_status risopt_experiment_load(const char* path, risopt_experiment** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new risopt_experiment{risopt::bench::load_spec(path)};
  });
}

risopt_status risopt_experiment_parse(const char* text, risopt_experiment** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new risopt_experiment{risopt::bench::parse_spec(text)};
  });
}

risopt_status risopt_experiment_override(risopt_experiment* experiment, int threads, int has_seed,
                                         uint64_t seed) {
  return guarded([&] {
    require(experiment, "experiment");
    risopt::bench::ExperimentSpec spec = experiment->spec;
    if (threads >= 0) spec.threads = threads;
    if (has_seed) spec.seed = seed;
    spec.validate();
    experiment->spec = std::move(spec);
  });
}

const char* risopt_experiment_output_path(const risopt_experiment* experiment) {
  return experiment ? experiment->spec.output_path.c_str() : nullptr;
}

const char* risopt_experiment_format(const risopt_experiment* experiment) {
  return experiment ? experiment->spec.format.c_str() : nullptr;
}

risopt_status risopt_experiment_execute(const risopt_experiment* experiment, const char* mode,
                                        risopt_table** out) {
  return guarded([&] {
    require(experiment, "experiment");
    require(mode, "mode");
    require(out, "out");
    namespace bench = risopt::bench;
    const std::string m = mode;
    auto table = std::make_unique<risopt_table>();
    nlohmann::json summary = nlohmann::json::object();
    if (m == "run") {
      table->rows = bench::run_experiment(experiment->spec);
    } else if (m == "scale") {
      table->rows = bench::run_experiment(experiment->spec);
      nlohmann::json slopes = nlohmann::json::object();
      for (const auto& [method, slope] : bench::fit_slopes(table->rows)) slopes[method] = slope;
      summary["slopes"] = slopes;
    } else if (m == "quantize-study") {
      table->rows = bench::run_quantize_study(experiment->spec);
    } else if (m == "oracle-check") {
      std::vector<bench::OracleSummary> tally;
      table->rows = bench::run_oracle_check(experiment->spec, &tally);
      nlohmann::json methods = nlohmann::json::array();
      for (const auto& s : tally) {
        methods.push_back({{"method", s.method},
                           {"instances", s.instances},
                           {"within", s.within},
                           {"tolerance", s.tolerance},
                           {"relative", s.relative}});
      }
      summary["oracle"] = methods;
    } else {
      throw risopt::InvalidArgument("unknown mode '" + m + "'");
    }
    table->summary = risopt::dump_json17(summary);
    *out = table.release();
  });
}

void risopt_experiment_free(risopt_experiment* experiment) { delete experiment; }

size_t risopt_table_rows(const risopt_table* table) { return table ? table->rows.size() : 0; }

risopt_status risopt_table_write(const risopt_table* table, const char* format, const char* path) {
  return guarded([&] {
    require(table, "table");
    require(format, "format");
    require(path, "path");
    risopt::bench::emit(table->rows, format, path);
  });
}

risopt_status risopt_table_render(risopt_table* table, const char* format, const char** out) {
  return guarded([&] {
    require(table, "table");
    require(format, "format");
    require(out, "out");
    const std::string f = format;
    if (f == "csv") {
      table->rendered = risopt::bench::format_csv(table->rows);
    } else if (f == "json") {
      table->rendered = risopt::dump_json17(risopt::bench::to_json(table->rows), 1) + "\n";
    } else {
      throw risopt::InvalidArgument("format must be csv or json");
    }
    *out = table->rendered.c_str();
  });
}

const char* risopt_table_summary(const risopt_table* table) {
  return table ? table->summary.c_str() : nullptr;
}

void risopt_table_free(risopt_table* table) { delete table; }

}  // extern "C"
