#pragma once

/*
 * Closed-form convergence and interference bounds for the one-bit learner,
 * plus eigenvalue-gap bookkeeping (SpectrumInfo) and the four-region
 * classification used to read convergence traces. All functions are pure.
 *
 * Conventions: p_sq denotes the squared off-diagonal norm P_k^2 of the
 * rotated Gram matrix, g_norm its Frobenius norm, eta the line-search
 * accuracy and n_t the transmit antenna count.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace nslab {

// Worst-case factor mapping line-search accuracy to the squared residual of
// one imperfectly annihilated entry.
inline constexpr double kSearchResidualFactor = 7.0 + 2.0 * 1.4142135623730951;

// Per-sweep contraction factor 1 - 2^{-(n_t-2)(n_t-1)/2}.
inline double sweep_contraction(int n_t) {
  return 1.0 - std::exp2(-0.5 * (n_t - 2) * (n_t - 1));
}

// RHS of the per-sweep linear-rate inequality:
//   P^2 after one more sweep <= p_sq * contraction + residual term.
inline double linear_bound_rhs(double p_sq, int n_t, double eta,
                               double g_norm) {
  if (p_sq < 0 || eta < 0 || g_norm < 0 || n_t < 2)
    throw std::invalid_argument("linear_bound_rhs: bad arguments");
  const double nn = static_cast<double>(n_t) * n_t - n_t;
  return p_sq * sweep_contraction(n_t) +
         nn * kSearchResidualFactor * eta * eta * g_norm * g_norm;
}

// Asymptotic ceiling of P_k^2 (fixed point of the linear recursion).
inline double limsup_bound(int n_t, double eta, double g_norm) {
  if (eta < 0 || g_norm < 0 || n_t < 2)
    throw std::invalid_argument("limsup_bound: bad arguments");
  const double nn = static_cast<double>(n_t) * n_t - n_t;
  return nn * kSearchResidualFactor * eta * eta * g_norm * g_norm *
         std::exp2(0.5 * (n_t - 2) * (n_t - 1));
}

struct InterferenceBounds {
  double per_column_cap;    // 2 P_k^2, holds at every rotation
  double sup_bound;         // asymptotic ceiling on max column interference
  double asymptotic_floor;  // leading O(eta^2) term of the small-P regime
};

inline InterferenceBounds interference_bounds(double p_k, int n_t, int n_r,
                                              double eta, double g_norm) {
  if (p_k < 0 || eta < 0 || g_norm < 0 || n_t < 2 || n_r < 1 || n_r >= n_t)
    throw std::invalid_argument("interference_bounds: bad arguments");
  InterferenceBounds b{};
  b.per_column_cap = 2.0 * p_k * p_k;
  b.sup_bound = 2.0 * limsup_bound(n_t, eta, g_norm);
  const double nn = static_cast<double>(n_t) * n_t - n_t;
  b.asymptotic_floor = 2.0 * nn * eta * eta * g_norm * g_norm;
  return b;
}

// Declared eigenvalue cluster: indices into the eigenvalue list. The center
// is the member mean, so the deviations always sum to zero.
struct ClusterSpec {
  std::vector<std::size_t> indices;
};

struct SpectrumInfo {
  std::vector<double> eigenvalues;
  double delta = 0.0;  // min_{l != r} |lambda_l - lambda_r| / 3
  bool has_cluster = false;
  double cluster_center = 0.0;
  std::vector<double> xis;      // member deviations from the center
  double delta_c = 0.0;         // cluster-adjusted gap
  bool cluster_condition = false;  // delta_c > 16 sqrt(sum xi^2)
};

inline SpectrumInfo compute_gaps(const std::vector<double>& eigs,
                                 std::optional<ClusterSpec> cluster = {}) {
  if (eigs.size() < 2) throw std::invalid_argument("compute_gaps: need >= 2");
  SpectrumInfo info;
  info.eigenvalues = eigs;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eigs.size(); ++i)
    for (std::size_t j = i + 1; j < eigs.size(); ++j)
      if (eigs[i] != eigs[j])
        min_gap = std::min(min_gap, std::abs(eigs[i] - eigs[j]));
  if (!std::isfinite(min_gap))
    throw std::domain_error("compute_gaps: all eigenvalues equal, gap undefined");
  info.delta = min_gap / 3.0;

  if (cluster) {
    const auto& idx = cluster->indices;
    if (idx.size() < 2 || idx.size() >= eigs.size())
      throw std::invalid_argument("compute_gaps: bad cluster size");
    std::vector<bool> in_cluster(eigs.size(), false);
    double center = 0;
    for (std::size_t i : idx) {
      if (i >= eigs.size()) throw std::out_of_range("compute_gaps: cluster index");
      in_cluster[i] = true;
      center += eigs[i];
    }
    center /= static_cast<double>(idx.size());
    info.has_cluster = true;
    info.cluster_center = center;
    double sum_xi_sq = 0;
    for (std::size_t i : idx) {
      info.xis.push_back(eigs[i] - center);
      sum_xi_sq += (eigs[i] - center) * (eigs[i] - center);
    }
    // gaps among non-members, and non-members to the center
    double min_out = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < eigs.size(); ++i) {
      if (in_cluster[i]) continue;
      min_out = std::min(min_out, std::abs(eigs[i] - center));
      for (std::size_t j = i + 1; j < eigs.size(); ++j)
        if (!in_cluster[j] && eigs[i] != eigs[j])
          min_out = std::min(min_out, std::abs(eigs[i] - eigs[j]));
    }
    if (!std::isfinite(min_out))
      throw std::domain_error("compute_gaps: no gap outside cluster");
    info.delta_c = min_out / 3.0;
    info.cluster_condition = info.delta_c > 16.0 * std::sqrt(sum_xi_sq);
  }
  return info;
}

// Four-region classification of a trace point. With a declared cluster the
// boundaries are delta_c^2/8, 2 delta_c sqrt(sum xi^2) and min xi^2/8
// (region 3 is the strip between the last two); without one, region 1 is
// the pre-quadratic phase P^2 >= delta^2/8 and region 2 the rest.
inline int classify_region(double p_sq, const SpectrumInfo& info) {
  if (p_sq < 0) throw std::invalid_argument("classify_region: negative P^2");
  if (!info.has_cluster)
    return (p_sq >= info.delta * info.delta / 8.0) ? 1 : 2;
  double sum_xi_sq = 0, min_xi_sq = std::numeric_limits<double>::infinity();
  for (double x : info.xis) {
    sum_xi_sq += x * x;
    min_xi_sq = std::min(min_xi_sq, x * x);
  }
  const double b1 = info.delta_c * info.delta_c / 8.0;
  const double b2 = 2.0 * info.delta_c * std::sqrt(sum_xi_sq);
  const double b3 = min_xi_sq / 8.0;
  if (p_sq >= b1) return 1;
  if (p_sq >= b2) return 2;
  if (p_sq >= b3) return 3;
  return 4;
}

enum class GapMode { Distinct, Cluster };

// Order-of-magnitude RHS of the quadratic-rate inequalities, all hidden
// constants set to one. p is the off-diagonal norm (not squared); gap is
// delta (Distinct) or delta_c (Cluster).
inline double quadratic_bound_rhs(double p, double gap, double eta, int n_t,
                                  double g_norm, GapMode mode) {
  if (p < 0 || gap <= 0 || eta < 0 || g_norm < 0 || n_t < 2)
    throw std::invalid_argument("quadratic_bound_rhs: bad arguments");
  const double nn = static_cast<double>(n_t) * n_t - n_t;
  const double floor_term = 2.0 * nn * eta * eta * g_norm * g_norm;
  if (mode == GapMode::Distinct) {
    const double q = p * p / gap;
    return q * q + eta * std::pow(p, 1.5) / gap +
           eta * eta * std::sqrt(p) / gap + floor_term;
  }
  const double q = p / gap;
  return q * q * q * q + eta * p * p * p / gap + eta * eta * p / gap +
         floor_term;
}

struct BoundOverlayRow {
  long k;
  double p_k_sq;
  double linear_rhs;
  double limsup;
  double max_intf_cap;    // 2 P_k^2
  double intf_floor;      // O(eta^2) asymptotic interference level
};

inline void export_bound_overlay_csv(const std::vector<BoundOverlayRow>& rows,
                                     std::ostream& os) {
  os << "k,P_k_sq,linear_rhs,limsup_bound,max_intf_cap,intf_floor\n";
  char buf[200];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%ld,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.k,
                  r.p_k_sq, r.linear_rhs, r.limsup, r.max_intf_cap,
                  r.intf_floor);
    os << buf;
  }
}

}  // namespace nslab
