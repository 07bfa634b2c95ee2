#pragma once

/*
 * One-bit line search over a sinusoidal objective: single-minimum-interval
 * (SMI) determination from three grid probes, then bisection driven purely
 * by one-bit comparisons. determine_smi / one_bit_binary_search are generic
 * over the comparison source; find_phi / find_theta bind them to a feedback
 * oracle with the probe family the learner transmits.
 *
 * Comparator contract: u(z1, z2) returns 1 when w(z1) >= w(z2), else 0
 * (the +/-1 observable maps -1 to 0; the SMI closed form needs {1,0}).
 */

#include <cmath>
#include <stdexcept>

#include "nslab/complex_matrix.hpp"
#include "nslab/feedback.hpp"

namespace nslab {

struct SmiInterval {
  double lo = 0, hi = 0;  // hi - lo = L/2; may extend past L (wrap case)
};

// Quadrant selection for w(z) = B - A cos(pi (z - z0) / L) over [-L, L].
// Three probes (-L, -L/2, 0), two comparisons, closed-form quadrant.
template <class Cmp>
SmiInterval determine_smi(Cmp&& u, double half_period) {
  const double L = half_period;
  if (!(L > 0)) throw std::invalid_argument("determine_smi: bad half period");
  const int a = u(-L, -L / 2.0) ? 1 : 0;
  const int b = u(0.0, -L / 2.0) ? 1 : 0;
  const double z_max = (3.0 + 2.0 * b - 2.0 * a * (1.0 + 2.0 * b)) * L / 4.0;
  return {z_max - L / 2.0, z_max};
}

// Endpoint-comparison bisection; returns the last midpoint, which is within
// eta of the minimizer when the interval is an SMI of a noiseless sinusoid.
template <class Cmp>
double one_bit_binary_search(Cmp&& u, double z_min, double z_max, double eta,
                             int* iterations = nullptr) {
  if (!(z_max > z_min))
    throw std::invalid_argument("one_bit_binary_search: empty interval");
  if (!(eta > 0)) throw std::invalid_argument("one_bit_binary_search: eta <= 0");
  double z = 0.5 * (z_min + z_max);
  int iters = 0;
  while (std::abs(z_max - z_min) >= eta) {
    z = 0.5 * (z_min + z_max);
    const int a = u(z_max, z_min) ? 1 : 0;
    if (a == 1)
      z_max = z;
    else
      z_min = z;
    ++iters;
  }
  if (iterations) *iterations = iters;
  return z;
}

namespace detail {

// Probe family of the phi search: x(z) = W r_{l,m}(pi/4, z), scaled to the
// oracle's probe power.
inline cvec phi_probe(const FeedbackOracle& o, const ComplexMatrix& w, int l,
                      int m, double z) {
  cvec x = rotated_column(w, l, m, kPi / 4.0, z);
  const double scale = std::sqrt(o.probe_power()) / norm2(x);
  for (auto& v : x) v *= scale;
  return x;
}

// Probe family of the theta search: x(z) = W r_{l,m}(z, phi_hat).
inline cvec theta_probe(const FeedbackOracle& o, const ComplexMatrix& w, int l,
                        int m, double phi_hat, double z) {
  cvec x = rotated_column(w, l, m, z, phi_hat);
  const double scale = std::sqrt(o.probe_power()) / norm2(x);
  for (auto& v : x) v *= scale;
  return x;
}

}  // namespace detail

struct PhiSearch {
  double phi_hat = 0;
  long tcs = 0;
};

struct ThetaSearch {
  double theta_tilde = 0;  // minimizer estimate in [-pi/2, pi/2)
  double theta_hat = 0;    // folded into [-pi/4, pi/4]
  long tcs = 0;
};

// Fold a raw theta minimizer into [-pi/4, pi/4]; both angles annihilate the
// same off-diagonal entry, the fold keeps the linear-rate guarantee.
inline double fold_theta(double theta_tilde) {
  if (std::abs(theta_tilde) <= kPi / 4.0) return theta_tilde;
  return theta_tilde - (theta_tilde > 0 ? 1.0 : -1.0) * kPi / 2.0;
}

// votes > 1 turns each comparison into a fresh-probe majority vote, a
// robustness extension for noisy feedback; the default is the plain
// algorithm.
inline PhiSearch find_phi(FeedbackOracle& oracle, const ComplexMatrix& w,
                          int l, int m, double eta, int votes = 1) {
  const long tc0 = oracle.tc_count();
  auto u = [&](double z1, double z2) {
    return oracle
               .compare_voted(detail::phi_probe(oracle, w, l, m, z1),
                              detail::phi_probe(oracle, w, l, m, z2), votes)
               .sign > 0
               ? 1
               : 0;
  };
  const SmiInterval smi = determine_smi(u, kPi);
  const double z = one_bit_binary_search(u, smi.lo, smi.hi, eta);
  PhiSearch out;
  out.phi_hat = wrap_angle(z, kPi);
  out.tcs = oracle.tc_count() - tc0;
  return out;
}

inline ThetaSearch find_theta(FeedbackOracle& oracle, const ComplexMatrix& w,
                              int l, int m, double phi_hat, double eta,
                              int votes = 1) {
  const long tc0 = oracle.tc_count();
  auto u = [&](double z1, double z2) {
    return oracle
               .compare_voted(detail::theta_probe(oracle, w, l, m, phi_hat, z1),
                              detail::theta_probe(oracle, w, l, m, phi_hat, z2),
                              votes)
               .sign > 0
               ? 1
               : 0;
  };
  const SmiInterval smi = determine_smi(u, kPi / 2.0);
  const double z = one_bit_binary_search(u, smi.lo, smi.hi, eta);
  ThetaSearch out;
  out.theta_tilde = wrap_angle(z, kPi / 2.0);
  out.theta_hat = fold_theta(out.theta_tilde);
  out.tcs = oracle.tc_count() - tc0;
  return out;
}

// Worst-case comparisons for one search: 3 for the SMI, 2 for the first
// endpoint pair, one per remaining bisection step.
inline long search_tc_budget(double smi_length, double eta) {
  if (!(eta > 0) || !(smi_length > 0))
    throw std::invalid_argument("search_tc_budget: bad arguments");
  const long iters =
      static_cast<long>(std::floor(std::log2(smi_length / eta))) + 1;
  return 5 + std::max(iters, 0L);
}

}  // namespace nslab
