// Command-line front end: configures a Monte Carlo campaign, runs the
// selected algorithms over an optional sweep axis, and writes CSV/JSONL rows.

#include "eebeam/eebeam.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<double> parse_weights_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--weights", "cannot open weights file: " + path);
  std::vector<double> weights;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    double v;
    if (ls >> v) weights.push_back(v);
  }
  if (weights.empty())
    throw CLI::ValidationError("--weights", "weights file has no values: " + path);
  return weights;
}

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    values.push_back(std::stod(item));
  }
  return values;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> items;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Monte Carlo simulator for distributed pricing-based energy-efficient "
      "beamforming on MISO interference channels"};
  app.set_config("--config", "", "Read options from a key=value config file");

  eebeam::Campaign campaign;
  eebeam::SimConfig& cfg = campaign.base;

  double pa_efficiency = 0.35;
  std::vector<std::string> alg_names;
  std::vector<std::string> sweep_spec;
  std::string weights_spec = "equal";
  std::string out_path = "-";
  std::string format_name = "csv";
  std::string gradient_name = "exact";
  std::vector<double> circuit_tx{50.0, 200.0};
  std::vector<double> circuit_rx{200.0, 400.0};
  int trials = 1;
  std::uint64_t seed = 1;
  int jobs = 0;

  app.add_option("--users", cfg.num_pairs, "Number of transmitter-receiver pairs K")
      ->capture_default_str();
  app.add_option("--antennas", cfg.num_antennas, "Transmit antennas per user M")
      ->capture_default_str();
  app.add_option("--pmax-dbm", cfg.pmax_dbm, "Per-transmitter power cap in dBm")
      ->capture_default_str();
  app.add_option("--dlen", cfg.dlen_m, "Deployment square side in meters")
      ->capture_default_str();
  app.add_option("--dth", cfg.dth_m, "Price broadcast radius in meters (limited regime)")
      ->capture_default_str();
  app.add_option("--bandwidth-hz", cfg.bandwidth_hz, "Channel bandwidth in Hz")
      ->capture_default_str();
  app.add_option("--noise-psd", cfg.noise_psd_dbm_hz, "Noise PSD in dBm/Hz")
      ->capture_default_str();
  app.add_option("--pa-efficiency", pa_efficiency, "Power amplifier efficiency 1/rho")
      ->capture_default_str();
  app.add_option("--gamma-db", cfg.gamma_snr_db, "Target SNR for message exchange in dB")
      ->capture_default_str();
  app.add_option("--tolerance", cfg.tolerance, "Relative convergence tolerance")
      ->capture_default_str();
  app.add_option("--max-iters", cfg.max_outer_iters, "Outer iteration cap")
      ->capture_default_str();
  app.add_option("--circuit-tx-mw", circuit_tx, "TX circuit power range per antenna in mW")
      ->expected(2);
  app.add_option("--circuit-rx-mw", circuit_rx, "RX circuit power range in mW")->expected(2);
  app.add_option("--trials", trials, "Monte Carlo trials per sweep point")
      ->capture_default_str();
  app.add_option("--seed", seed, "Master seed")->capture_default_str();
  app.add_option("--jobs", jobs, "Parallel trial workers (0 = hardware)")
      ->capture_default_str();
  app.add_option("--alg", alg_names,
                 "Algorithm to run: dapb|limited-dapb|noncoop|centralized (repeatable)");
  app.add_option("--sweep", sweep_spec,
                 "Sweep axis and comma-separated values, e.g. --sweep pmax_dbm -20,0,20,40; "
                 "axis weights takes weight files")
      ->expected(2);
  app.add_option("--weights", weights_spec, "Per-user weights file, or 'equal'")
      ->capture_default_str();
  app.add_option("--out", out_path, "Output path ('-' for stdout)")->capture_default_str();
  app.add_option("--format", format_name, "Output format: csv|jsonl")->capture_default_str();
  app.add_option("--centralized-tolerance", campaign.armijo.tolerance,
                 "Convergence tolerance of the centralized benchmark")
      ->capture_default_str();
  app.add_option("--centralized-max-iters", campaign.armijo.max_iters,
                 "Iteration cap of the centralized benchmark")
      ->capture_default_str();
  app.add_option("--centralized-gradient", gradient_name, "Gradient formula: exact|legacy")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!(pa_efficiency > 0.0 && pa_efficiency <= 1.0))
      throw eebeam::validation_error("--pa-efficiency must be in (0, 1]");
    cfg.amp_inefficiency = 1.0 / pa_efficiency;
    cfg.circuit_tx_range_mw = {circuit_tx[0], circuit_tx[1]};
    cfg.circuit_rx_range_mw = {circuit_rx[0], circuit_rx[1]};
    campaign.trials = trials;
    campaign.master_seed = seed;
    campaign.jobs = jobs;

    if (weights_spec != "equal") cfg.weights = parse_weights_file(weights_spec);

    campaign.algorithms.clear();
    if (alg_names.empty()) alg_names.push_back("dapb");
    for (const auto& name : alg_names) {
      const auto alg = eebeam::algorithm_from_string(name);
      if (!alg) throw eebeam::validation_error("unknown algorithm: " + name);
      campaign.algorithms.push_back(*alg);
    }

    if (gradient_name == "exact")
      campaign.gradient = eebeam::GradKind::exact;
    else if (gradient_name == "legacy")
      campaign.gradient = eebeam::GradKind::legacy;
    else
      throw eebeam::validation_error("unknown gradient mode: " + gradient_name);

    if (!sweep_spec.empty()) {
      const auto axis = eebeam::sweep_axis_from_string(sweep_spec[0]);
      if (!axis) throw eebeam::validation_error("unknown sweep axis: " + sweep_spec[0]);
      campaign.axis = *axis;
      if (*axis == eebeam::SweepAxis::weights) {
        for (const auto& path : split_list(sweep_spec[1])) {
          campaign.sweep_values.push_back(static_cast<double>(campaign.weight_sets.size()));
          campaign.weight_sets.push_back(path == "equal" ? std::vector<double>{}
                                                         : parse_weights_file(path));
        }
      } else {
        campaign.sweep_values = parse_value_list(sweep_spec[1]);
      }
    }

    eebeam::ExportFormat format;
    if (format_name == "csv")
      format = eebeam::ExportFormat::csv;
    else if (format_name == "jsonl")
      format = eebeam::ExportFormat::jsonl;
    else
      throw eebeam::validation_error("unknown format: " + format_name);

    const auto rows = eebeam::run_campaign(campaign);

    if (out_path == "-") {
      if (format == eebeam::ExportFormat::csv)
        eebeam::export_csv(rows, std::cout);
      else
        eebeam::export_jsonl(rows, std::cout);
    } else {
      eebeam::export_rows(rows, format, out_path);
    }

    for (const auto& row : rows) {
      if (!row.error.empty())
        std::cerr << "warning: trial " << row.trial << " (" << eebeam::to_string(row.algorithm)
                  << "): " << row.error << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
