#pragma once

// Physical-layer objective evaluation: interference, SINR, spectral
// efficiency, per-user EE and the weighted-sum EE.

#include "eebeam/scenario.hpp"

#include <vector>

namespace eebeam {

inline double abs2(const cxd& z) { return std::norm(z); }

// Beam-vectors of all transmitters plus the cached interference power seen at
// each receiver. The cache is updated with a rank-1 delta on single-beam
// writes; refresh() recomputes it from scratch.
struct BeamState {
  std::vector<CVector> beams;
  std::vector<double> interference_w;

  static BeamState from_beams(const NetworkScenario& s, std::vector<CVector> beams) {
    BeamState st;
    st.beams = std::move(beams);
    st.refresh(s);
    return st;
  }

  static BeamState zero(const NetworkScenario& s) {
    std::vector<CVector> beams(static_cast<std::size_t>(s.num_pairs),
                               CVector::Zero(s.num_antennas));
    return from_beams(s, std::move(beams));
  }

  void refresh(const NetworkScenario& s) {
    const auto k_pairs = static_cast<std::size_t>(s.num_pairs);
    interference_w.assign(k_pairs, 0.0);
    for (std::size_t k = 0; k < k_pairs; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k_pairs; ++j) {
        if (j == k) continue;
        acc += abs2(s.channels[j][k].dot(beams[j]));
      }
      interference_w[k] = acc;
    }
  }

  // Replaces beam k and applies the interference delta at every other receiver.
  void set_beam(const NetworkScenario& s, int k, const CVector& w) {
    const auto idx = static_cast<std::size_t>(k);
    for (std::size_t j = 0; j < beams.size(); ++j) {
      if (j == idx) continue;
      const auto& h = s.channels[idx][j];
      interference_w[j] += abs2(h.dot(w)) - abs2(h.dot(beams[idx]));
      interference_w[j] = std::max(interference_w[j], 0.0);
    }
    beams[idx] = w;
  }
};

// I_k recomputed directly from the beams (ignores the cache).
inline double interference(const NetworkScenario& s, const BeamState& state, int k) {
  double acc = 0.0;
  const auto idx = static_cast<std::size_t>(k);
  for (std::size_t j = 0; j < state.beams.size(); ++j) {
    if (j == idx) continue;
    acc += abs2(s.channels[j][idx].dot(state.beams[j]));
  }
  return acc;
}

inline double signal_power(const NetworkScenario& s, const CVector& w, int k) {
  const auto idx = static_cast<std::size_t>(k);
  return abs2(s.channels[idx][idx].dot(w));
}

inline double sinr(const NetworkScenario& s, const BeamState& state, int k) {
  const auto idx = static_cast<std::size_t>(k);
  return signal_power(s, state.beams[idx], k) / (s.noise_power_w + state.interference_w[idx]);
}

inline double rate_bps_hz(double sinr_value) { return std::log2(1.0 + sinr_value); }

// rho*||w_k||^2 + M*P_ct,k + P_cr,k + P_bh(regime).
inline double total_power(const NetworkScenario& s, const BeamState& state, int k,
                          ExchangeRegime regime) {
  const auto idx = static_cast<std::size_t>(k);
  return s.amp_inefficiency * state.beams[idx].squaredNorm() + s.circuit_power_w(regime, k);
}

struct UtilityReport {
  std::vector<double> sinr;
  std::vector<double> rate_bps_hz;         // bit/s/Hz
  std::vector<double> total_power_w;
  std::vector<double> ee;                  // bit/Hz/Joule
  double wsee = 0.0;                       // sum of alpha_k * ee_k
};

inline UtilityReport wsee(const NetworkScenario& s, const BeamState& state,
                          ExchangeRegime regime) {
  UtilityReport r;
  const int k_pairs = s.num_pairs;
  r.sinr.resize(static_cast<std::size_t>(k_pairs));
  r.rate_bps_hz.resize(static_cast<std::size_t>(k_pairs));
  r.total_power_w.resize(static_cast<std::size_t>(k_pairs));
  r.ee.resize(static_cast<std::size_t>(k_pairs));
  for (int k = 0; k < k_pairs; ++k) {
    const auto i = static_cast<std::size_t>(k);
    r.sinr[i] = sinr(s, state, k);
    r.rate_bps_hz[i] = eebeam::rate_bps_hz(r.sinr[i]);
    r.total_power_w[i] = total_power(s, state, k, regime);
    r.ee[i] = r.rate_bps_hz[i] / r.total_power_w[i];
    r.wsee += s.weights[i] * r.ee[i];
  }
  return r;
}

}  // namespace eebeam
