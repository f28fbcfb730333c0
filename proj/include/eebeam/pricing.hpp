#pragma once

// Interference pricing: per-receiver prices, the feedback sets that model
// which transmitters actually receive them, and the leakage matrices built
// from the visible prices.

#include "eebeam/metrics.hpp"

#include <numbers>
#include <vector>

namespace eebeam {

// Marginal decrease of user j's weighted EE per unit of extra interference:
// pi_j = (1/ln2) * alpha_j |h_jj^H w_j|^2 / (P_jT (1+eta_j) (sigma^2+I_j)^2).
inline double price(const NetworkScenario& s, const BeamState& state, ExchangeRegime regime,
                    int j) {
  const auto idx = static_cast<std::size_t>(j);
  const double sig = signal_power(s, state.beams[idx], j);
  if (sig == 0.0) return 0.0;
  const double ipnp = s.noise_power_w + state.interference_w[idx];
  const double eta = sig / ipnp;
  const double ptot = total_power(s, state, j, regime);
  return s.weights[idx] * sig / (std::numbers::ln2 * ptot * (1.0 + eta) * ipnp * ipnp);
}

// Receivers that feed information (price, and for j == k the IPNP) back to
// transmitter k. Full: everyone. Limited: receivers within dth of the
// transmitter, plus its own. Noncoop: own receiver only.
inline std::vector<int> feedback_set(const NetworkScenario& s, ExchangeRegime regime, int k) {
  std::vector<int> set;
  switch (regime) {
    case ExchangeRegime::full:
      for (int j = 0; j < s.num_pairs; ++j) set.push_back(j);
      break;
    case ExchangeRegime::limited:
      for (int j = 0; j < s.num_pairs; ++j) {
        if (j == k || distance(s.tx_positions[static_cast<std::size_t>(k)],
                               s.rx_positions[static_cast<std::size_t>(j)]) <= s.dth_m)
          set.push_back(j);
      }
      break;
    case ExchangeRegime::noncoop:
      set.push_back(k);
      break;
  }
  return set;
}

struct PriceSet {
  std::vector<double> prices;              // pi_j for every receiver
  std::vector<std::vector<int>> feedback_sets;  // T_k per transmitter

  int feedback_count(int k) const {
    return static_cast<int>(feedback_sets[static_cast<std::size_t>(k)].size());
  }
};

inline PriceSet compute_prices(const NetworkScenario& s, const BeamState& state,
                               ExchangeRegime regime) {
  PriceSet p;
  p.prices.resize(static_cast<std::size_t>(s.num_pairs));
  p.feedback_sets.resize(static_cast<std::size_t>(s.num_pairs));
  for (int j = 0; j < s.num_pairs; ++j)
    p.prices[static_cast<std::size_t>(j)] = price(s, state, regime, j);
  for (int k = 0; k < s.num_pairs; ++k)
    p.feedback_sets[static_cast<std::size_t>(k)] = feedback_set(s, regime, k);
  return p;
}

struct LeakageMatrix {
  CMatrix matrix;           // L_k, Hermitian PSD
  EigenDecomposition eig;   // descending
  Eigen::Index rank = 0;    // thresholded positive rank
};

// L_k = sum over visible receivers j != k of pi_j h_kj h_kj^H.
inline LeakageMatrix leakage(const NetworkScenario& s, const PriceSet& prices, int k) {
  const int m = s.num_antennas;
  LeakageMatrix l;
  l.matrix = CMatrix::Zero(m, m);
  for (int j : prices.feedback_sets[static_cast<std::size_t>(k)]) {
    if (j == k) continue;
    const double pi = prices.prices[static_cast<std::size_t>(j)];
    if (pi <= 0.0) continue;
    const auto& h = s.channels[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
    l.matrix.noalias() += pi * (h * h.adjoint());
  }
  l.matrix = 0.5 * (l.matrix + l.matrix.adjoint());
  l.eig = eig_hermitian(l.matrix);
  l.rank = positive_rank(l.eig);
  return l;
}

inline LeakageMatrix zero_leakage(int num_antennas) {
  LeakageMatrix l;
  l.matrix = CMatrix::Zero(num_antennas, num_antennas);
  l.eig.eigenvalues = RVector::Zero(num_antennas);
  l.eig.eigenvectors = CMatrix::Identity(num_antennas, num_antennas);
  l.rank = 0;
  return l;
}

// Quadratic-form pricing cost w^H L w.
inline double pricing_cost(const LeakageMatrix& l, const CVector& w) {
  return (w.adjoint() * l.matrix * w)(0, 0).real();
}

}  // namespace eebeam
