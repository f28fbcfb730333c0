#pragma once

// Closed-form solvers for the per-transmitter priced-EE problem.
//
// The problem maximizes  alpha*log2(1+SINR)/P_total - w^H L w  over
// ||w||^2 <= P. With a full-rank leakage matrix the beam reduces to a single
// direction in a whitened space and a scalar power problem (solve_scenario1).
// With a rank-deficient leakage matrix the beam is split across the range and
// null-space projections of the own channel and a two-power problem is solved
// by enumerating its KKT cases (solve_scenario2).

#include "eebeam/pricing.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace eebeam {

// Principal branch of the Lambert W function: w(x)*e^(w(x)) = x for
// x >= -1/e, w >= -1. Halley iteration; series start near the branch point.
inline double lambert_w0(double x) {
  constexpr double kBranch = -0.36787944117144233;  // -1/e
  if (x < kBranch) {
    if (x > kBranch - 1e-15) return -1.0;  // representable round-off at the branch point
    throw std::domain_error("lambert_w0: argument below -1/e");
  }
  if (x == 0.0) return 0.0;
  if (x == kBranch) return -1.0;

  double w;
  if (x < -0.3) {
    // Branch-point expansion in p = sqrt(2(e*x + 1)).
    const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0;
  } else {
    w = std::log1p(x);
  }

  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * (w + 1.0));
    if (denom == 0.0) break;
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(w))) break;
  }
  return w;
}

// ---------------------------------------------------------------------------
// Scenario 1: full-rank leakage. Reduced problem
//   max_{0 <= p <= pbar}  phi(p) = ln(1 + g*p)/(p + p_c) - a*p.
// ---------------------------------------------------------------------------

struct Scenario1Coefficients {
  double g_kk = 0.0;   // effective channel gain over IPNP
  double a_k = 0.0;    // pricing slope rho*(u^H L^-1 u)*ln2/alpha
  double pbar_k = 0.0; // transformed power cap
  double p_c_k = 0.0;  // static power in transformed units
};

constexpr double kBisectTol = 1e-8;  // absolute, on the power variable

namespace detail {

inline double s1_objective(const Scenario1Coefficients& c, double p) {
  return std::log1p(c.g_kk * p) / (p + c.p_c_k) - c.a_k * p;
}

inline double s1_derivative(const Scenario1Coefficients& c, double p) {
  const double d = p + c.p_c_k;
  return (c.g_kk * d / (1.0 + c.g_kk * p) - std::log1p(c.g_kk * p)) / (d * d) - c.a_k;
}

// Root of a function that crosses from positive at a to negative at b.
template <typename F>
double bisect_pos_to_neg(F&& f, double a, double b, double eps) {
  for (int it = 0; it < 200 && b - a > eps; ++it) {
    const double mid = 0.5 * (a + b);
    (f(mid) > 0.0 ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Globally optimal power for the scenario-1 problem. The derivative of phi is
// strictly decreasing on the feasible range, so the optimum is either a
// boundary point or the unique stationary point found by bisection.
inline double solve_scenario1(const Scenario1Coefficients& c) {
  if (detail::s1_derivative(c, 0.0) <= 0.0) return 0.0;
  if (detail::s1_derivative(c, c.pbar_k) >= 0.0) return c.pbar_k;
  return detail::bisect_pos_to_neg([&](double p) { return detail::s1_derivative(c, p); }, 0.0,
                                   c.pbar_k, kBisectTol);
}

// ---------------------------------------------------------------------------
// Scenario 2: rank-deficient leakage. Two-power problem
//   max  F(p1,p2) = ln(1 + g1*p1 + g2*p2)/(p1 + p2 + p_c) - g3*p1
//   s.t. p1, p2 >= 0, p1 + p2 <= p_k,
// where p1 rides the leaky (range-space) direction and p2 the leakage-free
// (null-space) direction.
// ---------------------------------------------------------------------------

struct Scenario2Coefficients {
  double g1 = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
  double p_c = 0.0;
  double p_k = 0.0;
  CVector w1;  // unit norm or empty/zero when degenerate
  CVector w2;
};

struct PowerSplit {
  double p1 = 0.0;
  double p2 = 0.0;
};

struct Scenario2Candidate {
  PowerSplit split;
  int case_id = 0;  // 1..6 per the KKT pattern, 7 for the (0,0) corner
};

struct Scenario2Result {
  PowerSplit split;
  int case_id = 0;
  bool fallback = false;  // no KKT candidate was admissible; returned (0,0)
};

inline double scenario2_objective(const Scenario2Coefficients& c, double p1, double p2) {
  return std::log1p(c.g1 * p1 + c.g2 * p2) / (p1 + p2 + c.p_c) - c.g3 * p1;
}

namespace detail {

inline double s2_f1(const Scenario2Coefficients& c, double x) {
  return -(1.0 + c.g2 * x) * std::log1p(c.g2 * x) + c.g2 * (x + c.p_c);
}

inline double s2_f2(const Scenario2Coefficients& c, double x) {
  const double d = x + c.p_c;
  return -(1.0 + c.g1 * x) * std::log1p(c.g1 * x) + c.g1 * d - c.g3 * d * d * (1.0 + c.g1 * x);
}

inline double s2_f3(const Scenario2Coefficients& c, double x) {
  const double r = (c.g1 - c.g2) / c.g3;
  return std::log(x) + (c.g2 * c.g3 / (c.g1 - c.g2)) * x * x - std::log(r);
}

// Interior stationary power on a single direction with gain g and no pricing
// term: unique root of g*(p + p_c) = (1 + g*p)*ln(1 + g*p).
inline double single_direction_power(double g, double p_c) {
  const double arg = (g * p_c - 1.0) / std::numbers::e;
  const double w = lambert_w0(std::max(arg, -1.0 / std::numbers::e));
  return std::max(std::expm1(w + 1.0) / g, 0.0);
}

}  // namespace detail

// All admissible KKT candidates of the two-power problem (cases 1..6; the
// all-zero corner is appended by solve_scenario2). Each case checks its dual
// variables at face value and its primal pattern numerically.
inline std::vector<Scenario2Candidate> scenario2_candidates(const Scenario2Coefficients& c) {
  std::vector<Scenario2Candidate> out;
  const double g1 = c.g1, g2 = c.g2, g3 = c.g3, p_c = c.p_c, p_k = c.p_k;
  const double cap_d = p_k + p_c;

  if (g2 > 0.0) {
    // Case 1: p1 = 0, p2 interior. Stationary p2 in closed form via Lambert W.
    if (detail::s2_f1(c, p_k) < 0.0) {
      const double p2 = detail::single_direction_power(g2, p_c);
      const double d = p2 + p_c;
      const double sig = 1.0 + g2 * p2;
      const double alpha = std::log(sig) / (d * d) + g3 - g1 / (d * sig);
      if (alpha >= 0.0 && p2 > 0.0 && p2 < p_k)
        out.push_back({{0.0, p2}, 1});
    }
    // Case 4: p1 = 0, p2 = p_k.
    {
      const double sig = 1.0 + g2 * p_k;
      const double gamma = g2 / (cap_d * sig) - std::log(sig) / (cap_d * cap_d);
      if (gamma >= 0.0) {
        const double alpha = g3 - (g1 - g2) / (cap_d * sig);
        if (alpha >= 0.0) out.push_back({{0.0, p_k}, 4});
      }
    }
  }

  if (g1 > 0.0) {
    // Case 5: p1 interior, p2 = 0.
    if (detail::s2_f2(c, 0.0) > 0.0 && detail::s2_f2(c, p_k) < 0.0) {
      const double p1 =
          detail::bisect_pos_to_neg([&](double x) { return detail::s2_f2(c, x); }, 0.0, p_k,
                                    kBisectTol);
      const double d = p1 + p_c;
      const double sig = 1.0 + g1 * p1;
      const double beta = std::log(sig) / (d * d) - g2 / (d * sig);
      if (beta >= 0.0 && p1 > 0.0 && p1 < p_k) out.push_back({{p1, 0.0}, 5});
    }
    // Case 6: p1 = p_k, p2 = 0.
    {
      const double sig = 1.0 + g1 * p_k;
      const double gamma = -std::log(sig) / (cap_d * cap_d) + g1 / (cap_d * sig) - g3;
      if (gamma >= 0.0) {
        const double beta = (g1 - g2) / (cap_d * sig) - g3;
        if (beta >= 0.0) out.push_back({{p_k, 0.0}, 6});
      }
    }
  }

  if (g1 > g2 && g3 > 0.0) {
    const double r = (g1 - g2) / g3;
    // Case 2: both powers interior. Stationarity pins
    // (p1+p2+p_c)*(1+g1*p1+g2*p2) = r; solve for theta = p1+p2+p_c.
    if (cap_d * (1.0 + g1 * p_k) > r && r > p_c) {
      if (detail::s2_f3(c, p_c) < 0.0 && detail::s2_f3(c, cap_d) > 0.0) {
        const double theta =
            detail::bisect_pos_to_neg([&](double x) { return -detail::s2_f3(c, x); }, p_c, cap_d,
                                      kBisectTol);
        const double p1 = (g2 * p_c + r / theta - 1.0 - g2 * theta) / (g1 - g2);
        const double p2 = theta - p_c - p1;
        if (p1 > 0.0 && p2 > 0.0 && p1 + p2 < p_k) out.push_back({{p1, p2}, 2});
      }
    }
    // Case 3: both positive, p1 + p2 = p_k.
    {
      const double gamma =
          g2 * g3 / (g1 - g2) - (std::log(g1 - g2) - std::log(g3 * cap_d)) / (cap_d * cap_d);
      if (gamma >= 0.0) {
        const double p1 = 1.0 / (g3 * cap_d) - (1.0 + g2 * p_k) / (g1 - g2);
        const double p2 = p_k - p1;
        if (p1 > 0.0 && p2 > 0.0) out.push_back({{p1, p2}, 3});
      }
    }
  }

  return out;
}

// Globally optimal split. When g1 <= g2 the leaky direction is dominated and
// the optimum is on the p2 axis in closed form; otherwise every KKT candidate
// is scored and the best one returned. Ties within 1e-12 prefer smaller p1.
inline Scenario2Result solve_scenario2(const Scenario2Coefficients& c) {
  if (c.g1 <= c.g2) {
    if (c.g2 <= 0.0) return {{0.0, 0.0}, 7, true};
    const double p2 = std::min(detail::single_direction_power(c.g2, c.p_c), c.p_k);
    return {{0.0, p2}, p2 < c.p_k ? 1 : 4, false};
  }
  const auto cands = scenario2_candidates(c);
  Scenario2Result best{{0.0, 0.0}, 7, cands.empty()};
  double best_obj = scenario2_objective(c, 0.0, 0.0);
  for (const auto& cand : cands) {
    const double obj = scenario2_objective(c, cand.split.p1, cand.split.p2);
    const bool wins = obj > best_obj + 1e-12 ||
                      (std::abs(obj - best_obj) <= 1e-12 && cand.split.p1 < best.split.p1);
    if (wins) {
      best.split = cand.split;
      best.case_id = cand.case_id;
      best_obj = obj;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Per-user best response.
// ---------------------------------------------------------------------------

// Exact priced objective alpha*U_k(w) - w^H L w at the receiver's current
// interference level (which does not depend on w_k itself).
inline double priced_utility(const NetworkScenario& s, const BeamState& state,
                             const LeakageMatrix& leak, int k, ExchangeRegime regime,
                             const CVector& w, double alpha) {
  const auto idx = static_cast<std::size_t>(k);
  const double ipnp = s.noise_power_w + state.interference_w[idx];
  const double sig = abs2(s.channels[idx][idx].dot(w));
  const double ptot = s.amp_inefficiency * w.squaredNorm() + s.circuit_power_w(regime, k);
  return alpha * std::log2(1.0 + sig / ipnp) / ptot - pricing_cost(leak, w);
}

// Candidate beam for user k given its leakage matrix and the current state.
// Full-rank leakage routes through the whitened single-direction problem;
// otherwise the channel is split across the leakage range and null space.
// weight_override > 0 replaces the user's weight (the selfish best response
// passes 1 so the update is weight-independent).
inline CVector solve_peruser(const NetworkScenario& s, const BeamState& state,
                             const LeakageMatrix& leak, int k, ExchangeRegime regime,
                             double weight_override = -1.0) {
  const auto idx = static_cast<std::size_t>(k);
  const int m = s.num_antennas;
  const double alpha = weight_override > 0.0 ? weight_override : s.weights[idx];
  const CVector& h = s.channels[idx][idx];
  const double hnorm = h.norm();
  if (alpha <= 0.0 || hnorm == 0.0) return CVector::Zero(m);

  const double ipnp = s.noise_power_w + state.interference_w[idx];
  const double p_k = s.pmax_w[idx];
  const double rho = s.amp_inefficiency;
  const double p_static = s.circuit_power_w(regime, k);

  CVector w;
  if (leak.rank == m) {
    const CMatrix whiten = inv_sqrt(leak.matrix);  // L^(-1/2)
    const CVector hbar = whiten * h;
    const CVector u = hbar / hbar.norm();
    const double q = (whiten * u).squaredNorm();  // u^H L^-1 u
    Scenario1Coefficients c;
    c.g_kk = hbar.squaredNorm() / ipnp;
    c.a_k = rho * q * std::numbers::ln2 / alpha;
    c.pbar_k = p_k / q;
    c.p_c_k = p_static / (rho * q);
    const double p = solve_scenario1(c);
    w = std::sqrt(p) * (whiten * u);
  } else {
    const CVector range_h = project_onto_range(leak.eig, leak.rank, h);
    const CVector null_h = h - range_h;
    const double rn = range_h.norm();
    const double nn = null_h.norm();
    Scenario2Coefficients c;
    c.p_c = p_static / rho;
    c.p_k = p_k;
    c.w1 = CVector::Zero(m);
    c.w2 = CVector::Zero(m);
    if (rn > 1e-10 * hnorm) {
      c.w1 = range_h / rn;
      c.g1 = rn * rn / ipnp;
      c.g3 = rho * std::numbers::ln2 *
             (c.w1.adjoint() * leak.matrix * c.w1)(0, 0).real() / alpha;
    }
    if (nn > 1e-10 * hnorm) {
      c.w2 = null_h / nn;
      c.g2 = nn * nn / ipnp;
    }
    const Scenario2Result r = solve_scenario2(c);
    w = std::sqrt(r.split.p1) * c.w1 + std::sqrt(r.split.p2) * c.w2;
  }

  // Clamp round-off overshoot of the power constraint.
  const double n2 = w.squaredNorm();
  if (n2 > p_k) w *= std::sqrt(p_k / n2);
  return w;
}

}  // namespace eebeam
