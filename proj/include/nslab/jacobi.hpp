#pragma once

/*
 * Exact (full-information) cyclic Jacobi diagonalization for Hermitian
 * matrices, with per-rotation off-diagonal-norm instrumentation. This is
 * the convergence oracle the one-bit learner is measured against, so the
 * rotation convention here has to match rotation_matrix() exactly:
 * annihilation of the (l,m) entry is achieved by phi = pi + arg(a_lm) and
 * tan(2 theta) = 2|a_lm| / (a_mm - a_ll), with theta folded into
 * [-pi/4, pi/4] to keep the global linear convergence guarantee.
 */

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nslab/complex_matrix.hpp"

namespace nslab {

// Row-major cyclic pair order (1,2),(1,3),...,(1,n),(2,3),...,(n-1,n).
inline std::vector<std::pair<int, int>> sweep_schedule(int n_t) {
  if (n_t < 2) throw std::invalid_argument("sweep_schedule: need n_t >= 2");
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n_t) * (n_t - 1) / 2);
  for (int l = 1; l < n_t; ++l)
    for (int m = l + 1; m <= n_t; ++m) pairs.emplace_back(l, m);
  return pairs;
}

// Optimal annihilating rotation for the (l,m) pair (1-based, l < m).
// a_lm == 0 yields the identity rotation.
inline RotationParams exact_rotation_angles(const HermitianMatrix& a, int l,
                                            int m) {
  validate_rotation_indices(a.order(), RotationParams{l, m, 0.0, 0.0});
  const std::size_t li = static_cast<std::size_t>(l - 1);
  const std::size_t mi = static_cast<std::size_t>(m - 1);
  const cplx g = a.at(li, mi);
  RotationParams p{l, m, 0.0, 0.0};
  const double mag = std::abs(g);
  if (mag == 0.0) return p;
  p.phi = wrap_angle(kPi + std::arg(g));
  const double d = a.diag(mi) - a.diag(li);
  // minimizer of the quadratic form along the rotated column
  const double theta_tilde = 0.5 * std::atan2(2.0 * mag, d);
  p.theta = (theta_tilde <= kPi / 4.0) ? theta_tilde : theta_tilde - kPi / 2.0;
  return p;
}

// A <- R^* A R restricted to rows/columns l,m (O(n) per rotation).
inline void apply_rotation_similarity(HermitianMatrix& a,
                                      const RotationParams& p) {
  validate_rotation_indices(a.order(), p);
  const std::size_t l = static_cast<std::size_t>(p.l - 1);
  const std::size_t m = static_cast<std::size_t>(p.m - 1);
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  const cplx ep = std::polar(1.0, p.phi);
  const cplx g = a.at(l, m);
  const double all = a.diag(l), amm = a.diag(m);

  const double cross = 2.0 * c * s * (g * std::conj(ep)).real();
  const double new_ll = c * c * all + s * s * amm + cross;
  const double new_mm = s * s * all + c * c * amm - cross;
  const cplx new_lm =
      (amm - all) * c * s * ep + g * c * c - std::conj(g) * ep * ep * s * s;

  auto store = [&a](std::size_t i, std::size_t j, cplx v) {
    if (i < j)
      a.set_upper(i, j, v);
    else
      a.set_upper(j, i, std::conj(v));
  };

  for (std::size_t j = 0; j < a.order(); ++j) {
    if (j == l || j == m) continue;
    const cplx ajl = a.at(j, l), ajm = a.at(j, m);
    store(j, l, c * ajl + std::conj(ep) * s * ajm);
    store(j, m, -ep * s * ajl + c * ajm);
  }
  a.set_diag(l, new_ll);
  a.set_diag(m, new_mm);
  a.set_upper(l, m, new_lm);
}

struct CjtTraceRow {
  long k;      // rotation counter, 1-based
  int l, m;    // pair, 1-based
  double theta, phi;
  double p_k;  // off-diagonal norm after this rotation
};

struct CjtResult {
  ComplexMatrix v;            // accumulated rotations, V^* G V = diag
  std::vector<double> diag;   // final diagonal, position order
  std::vector<CjtTraceRow> trace;
  int sweeps = 0;
  bool converged = false;
};

inline CjtResult cjt_diagonalize(const HermitianMatrix& g,
                                 double stop_tol = 1e-12,
                                 int max_sweeps = 30) {
  const int n = static_cast<int>(g.order());
  if (n < 1) throw std::invalid_argument("cjt_diagonalize: empty matrix");
  CjtResult res;
  res.v = ComplexMatrix::identity(static_cast<std::size_t>(n));
  HermitianMatrix a = g;
  if (n == 1) {
    res.diag = {a.diag(0)};
    res.converged = true;
    return res;
  }
  const double gnorm = a.frobenius_norm();
  const auto schedule = sweep_schedule(n);
  double off = off_diag_norm(a);
  long k = 0;
  for (int sweep = 1; sweep <= max_sweeps && !res.converged; ++sweep) {
    for (const auto& [l, m] : schedule) {
      if (off <= stop_tol * gnorm) {
        res.converged = true;
        break;
      }
      const RotationParams p = exact_rotation_angles(a, l, m);
      apply_rotation_similarity(a, p);
      apply_rotation_right(res.v, p);
      off = off_diag_norm(a);
      ++k;
      res.trace.push_back({k, l, m, p.theta, p.phi, off});
    }
    if (!res.converged) res.sweeps = sweep;
  }
  if (off <= stop_tol * gnorm) res.converged = true;
  res.diag.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) res.diag[static_cast<std::size_t>(i)] = a.diag(static_cast<std::size_t>(i));
  return res;
}

inline void export_cjt_trace_csv(const std::vector<CjtTraceRow>& trace,
                                 std::ostream& os) {
  os << "k,l,m,theta,phi,P_k\n";
  char buf[160];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof(buf), "%ld,%d,%d,%.12g,%.12g,%.12g\n", r.k, r.l,
                  r.m, r.theta, r.phi, r.p_k);
    os << buf;
  }
}

}  // namespace nslab
