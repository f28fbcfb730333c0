#pragma once

// Monte Carlo campaign driver: runs the selected algorithms over a sweep
// axis with paired trials (identical scenario and initial beams per trial
// across algorithms) and exports rows as CSV or JSONL.

#include "eebeam/orchestrators.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace eebeam {

enum class Algorithm { dapb, limited_dapb, noncoop, centralized };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::dapb: return "dapb";
    case Algorithm::limited_dapb: return "limited-dapb";
    case Algorithm::noncoop: return "noncoop";
    case Algorithm::centralized: return "centralized";
  }
  return "?";
}

inline std::optional<Algorithm> algorithm_from_string(const std::string& s) {
  if (s == "dapb") return Algorithm::dapb;
  if (s == "limited-dapb") return Algorithm::limited_dapb;
  if (s == "noncoop") return Algorithm::noncoop;
  if (s == "centralized") return Algorithm::centralized;
  return std::nullopt;
}

enum class SweepAxis { num_pairs, pmax_dbm, num_antennas, dlen_m, dth_m, weights };

inline std::optional<SweepAxis> sweep_axis_from_string(const std::string& s) {
  if (s == "num_pairs" || s == "users") return SweepAxis::num_pairs;
  if (s == "pmax_dbm" || s == "pmax-dbm") return SweepAxis::pmax_dbm;
  if (s == "num_antennas" || s == "antennas") return SweepAxis::num_antennas;
  if (s == "dlen_m" || s == "dlen") return SweepAxis::dlen_m;
  if (s == "dth_m" || s == "dth") return SweepAxis::dth_m;
  if (s == "weights") return SweepAxis::weights;
  return std::nullopt;
}

struct Campaign {
  SimConfig base;
  SweepAxis axis = SweepAxis::pmax_dbm;
  std::vector<double> sweep_values;               // single point when empty
  std::vector<std::vector<double>> weight_sets;   // used by the weights axis
  std::vector<Algorithm> algorithms{Algorithm::dapb};
  int trials = 1;
  std::uint64_t master_seed = 1;
  int jobs = 0;  // 0 means hardware concurrency
  ArmijoParams armijo{};
  GradKind gradient = GradKind::exact;

  void validate() const {
    if (trials < 1) throw validation_error("trials must be >= 1");
    if (algorithms.empty()) throw validation_error("at least one algorithm is required");
    for (std::size_t i = 1; i < sweep_values.size(); ++i)
      if (!(sweep_values[i] > sweep_values[i - 1]))
        throw validation_error("sweep values must be strictly increasing");
    if (axis == SweepAxis::weights) {
      for (double v : sweep_values) {
        const auto i = static_cast<std::size_t>(v);
        if (v != std::floor(v) || i >= weight_sets.size())
          throw validation_error("weights sweep values must index the configured weight sets");
      }
    }
  }
};

struct ResultRow {
  double sweep_value = 0.0;
  int trial = 0;
  Algorithm algorithm = Algorithm::dapb;
  int iterations = 0;
  double wsee = 0.0;
  std::vector<double> per_user_ee;
  long long overhead_scalars = 0;
  double wallclock_ms = 0.0;
  bool converged = false;
  std::uint64_t scenario_hash = 0;  // internal pairing check, not exported
  std::string error;                // nonempty when the run failed
};

inline SimConfig apply_sweep(const Campaign& c, double value) {
  SimConfig cfg = c.base;
  switch (c.axis) {
    case SweepAxis::num_pairs:
      cfg.num_pairs = static_cast<int>(value);
      if (!cfg.weights.empty() && static_cast<int>(cfg.weights.size()) != cfg.num_pairs)
        cfg.weights.clear();
      break;
    case SweepAxis::pmax_dbm: cfg.pmax_dbm = value; break;
    case SweepAxis::num_antennas: cfg.num_antennas = static_cast<int>(value); break;
    case SweepAxis::dlen_m: cfg.dlen_m = value; break;
    case SweepAxis::dth_m: cfg.dth_m = value; break;
    case SweepAxis::weights:
      cfg.weights = c.weight_sets.at(static_cast<std::size_t>(value));
      break;
  }
  cfg.seed = c.master_seed;
  return cfg;
}

namespace detail {

inline ResultRow run_one(const Campaign& c, const SimConfig& cfg, const NetworkScenario& s,
                         const BeamState& init, Algorithm alg) {
  RunReport rep;
  switch (alg) {
    case Algorithm::dapb:
      rep = run_dapb(s, ExchangeRegime::full, init, cfg.tolerance, cfg.max_outer_iters);
      break;
    case Algorithm::limited_dapb:
      rep = run_dapb(s, ExchangeRegime::limited, init, cfg.tolerance, cfg.max_outer_iters);
      break;
    case Algorithm::noncoop:
      rep = run_noncooperative(s, init, cfg.tolerance, cfg.max_outer_iters);
      break;
    case Algorithm::centralized: {
      ArmijoParams p = c.armijo;
      rep = run_centralized(s, init, p, c.gradient);
      break;
    }
  }
  ResultRow row;
  row.iterations = rep.iterations;
  row.wsee = rep.wsee_trace.empty() ? 0.0 : rep.wsee_trace.back();
  row.per_user_ee = std::move(rep.per_user_ee);
  row.overhead_scalars = rep.overhead_scalars;
  row.wallclock_ms = rep.wallclock_ms;
  row.converged = rep.converged;
  return row;
}

}  // namespace detail

// Runs the whole campaign. Rows come back in deterministic order
// (sweep point, trial, algorithm) regardless of the parallelism degree; every
// algorithm at a given (point, trial) sees the identical scenario and initial
// beams. Per-trial failures are recorded in their rows.
inline std::vector<ResultRow> run_campaign(const Campaign& c) {
  c.validate();
  const std::vector<double> points = c.sweep_values.empty()
                                         ? std::vector<double>{std::nan("")}
                                         : c.sweep_values;
  const std::size_t n_algs = c.algorithms.size();
  const std::size_t n_tasks = points.size() * static_cast<std::size_t>(c.trials);
  std::vector<ResultRow> rows(n_tasks * n_algs);

  auto run_task = [&](std::size_t task) {
    const std::size_t point_idx = task / static_cast<std::size_t>(c.trials);
    const int trial = static_cast<int>(task % static_cast<std::size_t>(c.trials));
    const double value = points[point_idx];
    const bool single_point = c.sweep_values.empty();
    for (std::size_t a = 0; a < n_algs; ++a) {
      ResultRow& row = rows[task * n_algs + a];
      row.sweep_value = single_point ? 0.0 : value;
      row.trial = trial;
      row.algorithm = c.algorithms[a];
      row.converged = false;
      row.wsee = std::nan("");
    }
    try {
      const SimConfig cfg = single_point ? [&] {
        SimConfig b = c.base;
        b.seed = c.master_seed;
        return b;
      }() : apply_sweep(c, value);
      const NetworkScenario scenario = generate(cfg, static_cast<std::uint64_t>(trial));
      const BeamState init = init_beams(scenario);
      for (std::size_t a = 0; a < n_algs; ++a) {
        ResultRow& row = rows[task * n_algs + a];
        try {
          ResultRow res = detail::run_one(c, cfg, scenario, init, c.algorithms[a]);
          res.sweep_value = row.sweep_value;
          res.trial = row.trial;
          res.algorithm = row.algorithm;
          res.scenario_hash = scenario.hash();
          row = std::move(res);
        } catch (const std::exception& e) {
          row.error = e.what();
        }
      }
    } catch (const std::exception& e) {
      for (std::size_t a = 0; a < n_algs; ++a) rows[task * n_algs + a].error = e.what();
    }
  };

  unsigned jobs = c.jobs > 0 ? static_cast<unsigned>(c.jobs) : std::thread::hardware_concurrency();
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n_tasks)));
  if (jobs <= 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (unsigned i = 0; i < jobs; ++i) {
      workers.emplace_back([&] {
        for (std::size_t t = next.fetch_add(1); t < n_tasks; t = next.fetch_add(1)) run_task(t);
      });
    }
    for (auto& w : workers) w.join();
  }
  return rows;
}

// --------------------------------------------------------------------------
// Export.
// --------------------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "sweep_value,trial,algorithm,iterations,wsee_bits_per_hz_per_joule,overhead_scalars,"
    "wallclock_ms,converged";

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

}  // namespace detail

inline void export_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << detail::format_double(r.sweep_value) << ',' << r.trial << ',' << to_string(r.algorithm)
       << ',' << r.iterations << ',' << detail::format_double(r.wsee) << ','
       << r.overhead_scalars << ',' << detail::format_double(r.wallclock_ms) << ','
       << (r.converged ? "true" : "false") << '\n';
  }
}

inline void export_jsonl(const std::vector<ResultRow>& rows, std::ostream& os) {
  for (const auto& r : rows) {
    nlohmann::json j;
    j["sweep_value"] = r.sweep_value;
    j["trial"] = r.trial;
    j["algorithm"] = to_string(r.algorithm);
    j["iterations"] = r.iterations;
    j["wsee_bits_per_hz_per_joule"] = r.wsee;
    j["overhead_scalars"] = r.overhead_scalars;
    j["wallclock_ms"] = r.wallclock_ms;
    j["converged"] = r.converged;
    j["per_user_ee"] = r.per_user_ee;
    if (!r.error.empty()) j["error"] = r.error;
    os << j.dump() << '\n';
  }
}

enum class ExportFormat { csv, jsonl };

inline void export_rows(const std::vector<ResultRow>& rows, ExportFormat format,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  if (format == ExportFormat::csv)
    export_csv(rows, out);
  else
    export_jsonl(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace eebeam
