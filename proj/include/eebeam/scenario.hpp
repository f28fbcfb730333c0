#pragma once

// Monte Carlo network realization: geometry, channels, power model and
// per-user weights for a K-pair MISO interference channel.

#include "eebeam/linalg.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <random>
#include <vector>

namespace eebeam {

// Which receivers exchange price/IPNP feedback with each transmitter, and
// which backhaul power model applies.
enum class ExchangeRegime { full, limited, noncoop };

class generation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SimConfig {
  int num_pairs = 4;             // K
  int num_antennas = 4;          // M
  double pmax_dbm = 33.0;        // per-transmitter cap
  double dlen_m = 350.0;         // square side
  double dth_m = 100.0;          // price-broadcast radius (limited regime)
  double bandwidth_hz = 20e6;
  double noise_psd_dbm_hz = -174.0;
  double amp_inefficiency = 1.0 / 0.35;  // rho >= 1
  double gamma_snr_db = 4.0;             // target SNR for message exchange
  double tolerance = 1e-3;
  int max_outer_iters = 100;
  std::vector<double> weights;   // alpha_k; empty means all ones
  Interval circuit_tx_range_mw{50.0, 200.0};
  Interval circuit_rx_range_mw{200.0, 400.0};
  std::uint64_t seed = 1;

  double weight(int k) const {
    return weights.empty() ? 1.0 : weights.at(static_cast<std::size_t>(k));
  }

  void validate() const {
    if (num_pairs < 1) throw validation_error("num_pairs must be >= 1");
    if (num_antennas < 1) throw validation_error("num_antennas must be >= 1");
    if (!(dlen_m > 0)) throw validation_error("dlen_m must be positive");
    if (!(tolerance > 0)) throw validation_error("tolerance must be positive");
    if (!(amp_inefficiency >= 1.0)) throw validation_error("amp_inefficiency must be >= 1");
    if (!(bandwidth_hz > 0)) throw validation_error("bandwidth_hz must be positive");
    if (max_outer_iters < 1) throw validation_error("max_outer_iters must be >= 1");
    if (!weights.empty() && static_cast<int>(weights.size()) != num_pairs)
      throw validation_error("weights size must equal num_pairs");
    for (double a : weights)
      if (!(a >= 0)) throw validation_error("weights must be nonnegative");
    if (circuit_tx_range_mw.lo > circuit_tx_range_mw.hi || circuit_tx_range_mw.lo <= 0)
      throw validation_error("invalid circuit_tx_range_mw");
    if (circuit_rx_range_mw.lo > circuit_rx_range_mw.hi || circuit_rx_range_mw.lo <= 0)
      throw validation_error("invalid circuit_rx_range_mw");
  }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double path_loss_db(double d_m) { return 38.46 + 35.0 * std::log10(d_m); }
inline double path_loss_linear(double d_m) { return std::pow(10.0, path_loss_db(d_m) / 10.0); }
inline double channel_gain(double d_m) { return std::pow(10.0, -path_loss_db(d_m) / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Power needed to close a message-exchange link over distance_m at the
// target SNR: gamma * sigma^2 * PL(d).
inline double backhaul_power(double gamma_snr_db, double noise_w, double distance_m) {
  return db_to_linear(gamma_snr_db) * noise_w * path_loss_linear(distance_m);
}

// One Monte Carlo draw. channels[j][k] is the channel from transmitter j to
// receiver k; all powers in watts.
struct NetworkScenario {
  int num_pairs = 0;
  int num_antennas = 0;
  std::vector<Point> tx_positions;
  std::vector<Point> rx_positions;
  std::vector<std::vector<CVector>> channels;
  double noise_power_w = 0.0;            // sigma^2, identical at every receiver
  std::vector<double> pmax_w;            // P_k
  std::vector<double> circuit_tx_w;      // P_ct,k per antenna
  std::vector<double> circuit_rx_w;      // P_cr,k
  std::vector<double> backhaul_full_w;   // exchange with all K receivers
  std::vector<double> backhaul_limited_w;  // exchange radius fixed at dth
  std::vector<double> backhaul_noncoop_w;  // own-link feedback only
  std::vector<double> weights;           // alpha_k
  double amp_inefficiency = 1.0;
  double dth_m = 0.0;
  std::uint64_t trial_seed = 0;  // deterministic stream for downstream draws

  double backhaul_w(ExchangeRegime regime, int k) const {
    switch (regime) {
      case ExchangeRegime::full: return backhaul_full_w[static_cast<std::size_t>(k)];
      case ExchangeRegime::limited: return backhaul_limited_w[static_cast<std::size_t>(k)];
      case ExchangeRegime::noncoop: return backhaul_noncoop_w[static_cast<std::size_t>(k)];
    }
    return 0.0;
  }

  double own_link_distance(int k) const {
    return distance(tx_positions[static_cast<std::size_t>(k)],
                    rx_positions[static_cast<std::size_t>(k)]);
  }

  // Static power floor of user k (everything except the RF term).
  double circuit_power_w(ExchangeRegime regime, int k) const {
    const auto i = static_cast<std::size_t>(k);
    return num_antennas * circuit_tx_w[i] + circuit_rx_w[i] + backhaul_w(regime, k);
  }

  std::uint64_t hash() const;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream) {
  return splitmix64(splitmix64(seed ^ splitmix64(trial)) ^ stream);
}

inline void hash_combine(std::uint64_t& h, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  h = splitmix64(h ^ bits);
}

// Channel vector with i.i.d. CN(0,1) entries scaled so E[|entry|^2] = gain.
inline CVector draw_channel(std::mt19937_64& rng, double gain, int m) {
  std::normal_distribution<double> comp(0.0, std::sqrt(0.5));
  CVector h(m);
  const double amp = std::sqrt(gain);
  for (int i = 0; i < m; ++i) {
    const double re = comp(rng);
    const double im = comp(rng);
    h[i] = amp * cxd(re, im);
  }
  return h;
}

}  // namespace detail

inline std::uint64_t NetworkScenario::hash() const {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  detail::hash_combine(h, static_cast<double>(num_pairs));
  detail::hash_combine(h, static_cast<double>(num_antennas));
  detail::hash_combine(h, noise_power_w);
  for (int k = 0; k < num_pairs; ++k) {
    const auto i = static_cast<std::size_t>(k);
    detail::hash_combine(h, tx_positions[i].x);
    detail::hash_combine(h, tx_positions[i].y);
    detail::hash_combine(h, rx_positions[i].x);
    detail::hash_combine(h, rx_positions[i].y);
    detail::hash_combine(h, pmax_w[i]);
    detail::hash_combine(h, circuit_tx_w[i]);
    detail::hash_combine(h, circuit_rx_w[i]);
    detail::hash_combine(h, backhaul_full_w[i]);
    detail::hash_combine(h, backhaul_limited_w[i]);
    detail::hash_combine(h, backhaul_noncoop_w[i]);
    detail::hash_combine(h, weights[i]);
    for (int j = 0; j < num_pairs; ++j) {
      const auto& v = channels[static_cast<std::size_t>(j)][i];
      for (Eigen::Index a = 0; a < v.size(); ++a) {
        detail::hash_combine(h, v[a].real());
        detail::hash_combine(h, v[a].imag());
      }
    }
  }
  return h;
}

// Draws one network realization. Deterministic in (config.seed, trial_index).
// Geometry is rejection-sampled until the pairwise distance constraints hold:
// own-link distance in [30, 60] m, every cross tx-rx distance >= 30 m, all
// nodes inside the dlen x dlen square.
inline NetworkScenario generate(const SimConfig& config, std::uint64_t trial_index) {
  config.validate();
  const int k_pairs = config.num_pairs;
  const int m = config.num_antennas;

  std::mt19937_64 rng(detail::derive_seed(config.seed, trial_index, 0));
  std::uniform_real_distribution<double> upos(0.0, config.dlen_m);
  std::uniform_real_distribution<double> ulink(30.0, 60.0);
  std::uniform_real_distribution<double> uang(0.0, 2.0 * std::numbers::pi);

  NetworkScenario s;
  s.num_pairs = k_pairs;
  s.num_antennas = m;
  s.amp_inefficiency = config.amp_inefficiency;
  s.dth_m = config.dth_m;
  s.trial_seed = detail::derive_seed(config.seed, trial_index, 1);

  constexpr long kMaxAttempts = 1000000;
  long attempts = 0;
  for (int k = 0; k < k_pairs; ++k) {
    while (true) {
      if (++attempts > kMaxAttempts)
        throw generation_error("geometry rejection sampling exceeded 1e6 attempts");
      const Point tx{upos(rng), upos(rng)};
      const double d = ulink(rng);
      const double ang = uang(rng);
      const Point rx{tx.x + d * std::cos(ang), tx.y + d * std::sin(ang)};
      if (rx.x < 0.0 || rx.x > config.dlen_m || rx.y < 0.0 || rx.y > config.dlen_m) continue;
      bool ok = true;
      for (int j = 0; j < k && ok; ++j) {
        const auto i = static_cast<std::size_t>(j);
        if (distance(tx, s.rx_positions[i]) < 30.0) ok = false;
        if (distance(s.tx_positions[i], rx) < 30.0) ok = false;
      }
      if (!ok) continue;
      s.tx_positions.push_back(tx);
      s.rx_positions.push_back(rx);
      break;
    }
  }

  s.channels.resize(static_cast<std::size_t>(k_pairs));
  for (int j = 0; j < k_pairs; ++j) {
    auto& row = s.channels[static_cast<std::size_t>(j)];
    row.resize(static_cast<std::size_t>(k_pairs));
    for (int k = 0; k < k_pairs; ++k) {
      const double d = distance(s.tx_positions[static_cast<std::size_t>(j)],
                                s.rx_positions[static_cast<std::size_t>(k)]);
      row[static_cast<std::size_t>(k)] = detail::draw_channel(rng, channel_gain(d), m);
    }
  }

  s.noise_power_w = dbm_to_watts(config.noise_psd_dbm_hz) * config.bandwidth_hz;
  s.pmax_w.assign(static_cast<std::size_t>(k_pairs), dbm_to_watts(config.pmax_dbm));

  std::uniform_real_distribution<double> utx(config.circuit_tx_range_mw.lo,
                                             config.circuit_tx_range_mw.hi);
  std::uniform_real_distribution<double> urx(config.circuit_rx_range_mw.lo,
                                             config.circuit_rx_range_mw.hi);
  for (int k = 0; k < k_pairs; ++k) {
    s.circuit_tx_w.push_back(utx(rng) * 1e-3);
    s.circuit_rx_w.push_back(urx(rng) * 1e-3);
  }

  for (int k = 0; k < k_pairs; ++k) {
    double dmax = 0.0;
    for (int j = 0; j < k_pairs; ++j) {
      dmax = std::max(dmax, distance(s.tx_positions[static_cast<std::size_t>(k)],
                                     s.rx_positions[static_cast<std::size_t>(j)]));
    }
    s.backhaul_full_w.push_back(backhaul_power(config.gamma_snr_db, s.noise_power_w, dmax));
    s.backhaul_limited_w.push_back(
        backhaul_power(config.gamma_snr_db, s.noise_power_w, config.dth_m));
    s.backhaul_noncoop_w.push_back(
        backhaul_power(config.gamma_snr_db, s.noise_power_w, s.own_link_distance(k)));
  }

  s.weights.resize(static_cast<std::size_t>(k_pairs));
  for (int k = 0; k < k_pairs; ++k) s.weights[static_cast<std::size_t>(k)] = config.weight(k);

  for (const auto& row : s.channels)
    for (const auto& h : row)
      if (!is_finite(h)) throw generation_error("non-finite channel draw");

  return s;
}

}  // namespace eebeam
