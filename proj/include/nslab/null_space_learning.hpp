#pragma once

/*
 * The blind null-space learning loop. Each rotation runs two one-bit line
 * searches (phi over [-pi, pi], then theta over [-pi/2, pi/2] folded into
 * [-pi/4, pi/4]) against the feedback oracle, and accumulates the rotation
 * into W. The modified variant additionally orders W's columns by the
 * one-bit diagonal comparisons collected during each sweep, so the trailing
 * columns end up spanning the interference null space. A continuous-q
 * surrogate reproduces the prior algorithm's tighter SMI for comparison
 * runs.
 *
 * Everything the learner itself touches comes from the oracle; the hidden
 * channel appears only inside HiddenInstrument, a test/metrics observer.
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "nslab/complex_matrix.hpp"
#include "nslab/feedback.hpp"
#include "nslab/jacobi.hpp"
#include "nslab/linesearch.hpp"

namespace nslab {

struct TraceRow {
  long k;
  int sweep;
  int l, m;
  double theta_hat, phi_hat;
  double delta;
  long tc_total;
  double p_k;               // NaN without an instrument
  double max_interference;  // NaN without an instrument
};

struct LearningState {
  ComplexMatrix w;
  long k = 0;                // rotations performed
  int sweeps = 0;            // completed sweeps
  std::size_t schedule_pos = 0;
  std::vector<double> delta_history;
  std::vector<int> iq;       // column source index per position, last sweep
  double eta = 0;
  long tc_total = 0;
  long iq_compare_tcs = 0;   // re-probes charged by diagonal comparisons
  bool converged = false;
  std::vector<TraceRow> trace;
};

// Test-side observer holding the hidden channel. Never handed to the
// learner; run_* only forward it for trace instrumentation.
class HiddenInstrument {
 public:
  HiddenInstrument(const ComplexMatrix& h, int n_r)
      : h_(h), g_(gram(h)), gd_(g_.to_dense()), n_r_(n_r) {
    if (n_r < 1 || static_cast<std::size_t>(n_r) >= h.cols())
      throw std::invalid_argument("HiddenInstrument: need 1 <= n_r < n_t");
    g_norm_ = g_.frobenius_norm();
  }

  const HermitianMatrix& g() const { return g_; }
  double g_norm() const { return g_norm_; }
  int n_r() const { return n_r_; }

  // Off-diagonal norm of W^* G W.
  double p_k(const ComplexMatrix& w) const {
    const ComplexMatrix a = w.adjoint() * (gd_ * w);
    double s = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = i + 1; j < a.cols(); ++j) s += std::norm(a(i, j));
    return std::sqrt(s);
  }

  // Interference of the worst precoder column, with the precoder chosen by
  // the true quadratic forms (the n_t - n_r least interfering columns).
  double max_precoder_interference(const ComplexMatrix& w) const {
    const ComplexMatrix a = w.adjoint() * (gd_ * w);
    std::vector<double> diag(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) diag[i] = a(i, i).real();
    std::sort(diag.begin(), diag.end());
    const std::size_t take = a.rows() - static_cast<std::size_t>(n_r_);
    return diag[take - 1];
  }

 private:
  ComplexMatrix h_;
  HermitianMatrix g_;
  ComplexMatrix gd_;
  double g_norm_ = 0;
  int n_r_;
};

enum class LearnerKind { OneBit, OneBitModified, ContinuousSurrogate };

struct LearnOptions {
  int n_t = 2;
  int n_r = 1;
  double eta = 1e-4;
  int max_sweeps = 12;
  bool stop_on_eta = true;
  int compare_votes = 1;  // majority-vote repeats for noisy feedback
  const HiddenInstrument* instrument = nullptr;
};

// Quarter-cell SMI from continuous probe magnitudes: three probes pin the
// minimizer phase to a pi/4 cell in half the cases, otherwise one extra
// probe at -L resolves the remaining half-cell ambiguity.
template <class QFn>
SmiInterval surrogate_smi(QFn&& q_at, double half_period) {
  const double L = half_period;
  const double q0 = q_at(0.0);
  const double qp = q_at(L / 2.0);
  const double qm = q_at(-L / 2.0);
  const bool b1 = qp >= qm;
  const bool b2 = q0 >= qp;
  const bool b3 = q0 >= qm;
  // phase cells in units of pi/4 over [-pi, pi)
  double lo = 0, hi = 0;
  bool ambiguous = false;
  if (b1 && b2) {  // (1,1,*): minimizer phase near -pi
    lo = -4;
    hi = -3;
  } else if (b1 && !b2 && b3) {
    ambiguous = true;  // [-3pi/4, -pi/4]
    lo = -3;
    hi = -1;
  } else if (b1) {  // (1,0,0)
    lo = -1;
    hi = 0;
  } else if (!b2 && !b3) {  // (0,0,*)
    lo = 0;
    hi = 1;
  } else if (b2 && !b3) {
    ambiguous = true;  // [pi/4, 3pi/4]
    lo = 1;
    hi = 3;
  } else {  // (0,1,1)
    lo = 3;
    hi = 4;
  }
  if (ambiguous) {
    const double q_min_end = q_at(-L);
    const bool b5 = q_min_end >= q0;  // cos(phase) >= 0
    if (lo == -3) {
      lo = b5 ? -2 : -3;
      hi = b5 ? -1 : -2;
    } else {
      lo = b5 ? 1 : 2;
      hi = b5 ? 2 : 3;
    }
  }
  return {lo * L / 4.0, hi * L / 4.0};
}

namespace detail {

inline cvec scaled_unit(const cvec& v, double power_mw) {
  const double s = std::sqrt(power_mw) / norm2(v);
  cvec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
  return out;
}

inline PhiSearch find_phi_surrogate(FeedbackOracle& oracle,
                                    const ComplexMatrix& w, int l, int m,
                                    double eta) {
  const long tc0 = oracle.tc_count();
  auto q_at = [&](double z) {
    return oracle.transmit(detail::phi_probe(oracle, w, l, m, z));
  };
  auto u = [&](double z1, double z2) {
    return oracle
               .compare(detail::phi_probe(oracle, w, l, m, z1),
                        detail::phi_probe(oracle, w, l, m, z2))
               .sign > 0
               ? 1
               : 0;
  };
  const SmiInterval smi = surrogate_smi(q_at, kPi);
  const double z = one_bit_binary_search(u, smi.lo, smi.hi, eta);
  return {wrap_angle(z, kPi), oracle.tc_count() - tc0};
}

inline ThetaSearch find_theta_surrogate(FeedbackOracle& oracle,
                                        const ComplexMatrix& w, int l, int m,
                                        double phi_hat, double eta) {
  const long tc0 = oracle.tc_count();
  auto q_at = [&](double z) {
    return oracle.transmit(detail::theta_probe(oracle, w, l, m, phi_hat, z));
  };
  auto u = [&](double z1, double z2) {
    return oracle
               .compare(detail::theta_probe(oracle, w, l, m, phi_hat, z1),
                        detail::theta_probe(oracle, w, l, m, phi_hat, z2))
               .sign > 0
               ? 1
               : 0;
  };
  const SmiInterval smi = surrogate_smi(q_at, kPi / 2.0);
  const double z = one_bit_binary_search(u, smi.lo, smi.hi, eta);
  ThetaSearch out;
  out.theta_tilde = wrap_angle(z, kPi / 2.0);
  out.theta_hat = fold_theta(out.theta_tilde);
  out.tcs = oracle.tc_count() - tc0;
  return out;
}

}  // namespace detail

inline LearningState run_learning(FeedbackOracle& oracle, LearnerKind kind,
                                  const LearnOptions& opt) {
  if (opt.n_t < 2) throw std::invalid_argument("run_learning: n_t >= 2");
  if (oracle.dim() != static_cast<std::size_t>(opt.n_t))
    throw std::invalid_argument("run_learning: oracle dimension mismatch");
  if (!(opt.eta > 0)) throw std::invalid_argument("run_learning: eta > 0");
  if (kind == LearnerKind::ContinuousSurrogate &&
      !oracle.provides_continuous_q())
    throw std::invalid_argument(
        "run_learning: surrogate needs a continuous-q oracle");

  LearningState st;
  st.w = ComplexMatrix::identity(static_cast<std::size_t>(opt.n_t));
  st.eta = opt.eta;
  st.iq.resize(static_cast<std::size_t>(opt.n_t));
  std::iota(st.iq.begin(), st.iq.end(), 0);
  const auto schedule = sweep_schedule(opt.n_t);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    std::vector<int> wins(static_cast<std::size_t>(opt.n_t), 0);
    bool all_small = true;
    st.schedule_pos = 0;
    for (const auto& [l, m] : schedule) {
      ++st.k;
      PhiSearch ps;
      ThetaSearch ts;
      if (kind == LearnerKind::ContinuousSurrogate) {
        ps = detail::find_phi_surrogate(oracle, st.w, l, m, opt.eta);
        ts = detail::find_theta_surrogate(oracle, st.w, l, m, ps.phi_hat,
                                          opt.eta);
      } else {
        ps = find_phi(oracle, st.w, l, m, opt.eta, opt.compare_votes);
        ts = find_theta(oracle, st.w, l, m, ps.phi_hat, opt.eta,
                        opt.compare_votes);
      }
      if (kind == LearnerKind::OneBitModified) {
        // One-bit diagonal ordering via the theta-search SMI endpoints:
        // z=0 probes W e_l exactly and z=-pi/2 probes W e_m up to a unit
        // phase the observable ignores, so this is free while both stay in
        // the oracle's memory window.
        const cvec cl = detail::theta_probe(oracle, st.w, l, m, ps.phi_hat, 0.0);
        const cvec cm =
            detail::theta_probe(oracle, st.w, l, m, ps.phi_hat, -kPi / 2.0);
        const CompareResult cr = oracle.compare(cl, cm);
        st.iq_compare_tcs += cr.tc_cost;
        if (cr.sign >= 0)
          ++wins[static_cast<std::size_t>(l - 1)];
        else
          ++wins[static_cast<std::size_t>(m - 1)];
      }
      apply_rotation_right(st.w, {l, m, ts.theta_hat, ps.phi_hat});
      const double delta = std::abs(ts.theta_hat);
      st.delta_history.push_back(delta);
      if (delta >= opt.eta) all_small = false;
      st.tc_total = oracle.tc_count();
      TraceRow row{st.k, sweep,    l,
                   m,    ts.theta_hat, ps.phi_hat,
                   delta, st.tc_total, nan,
                   nan};
      if (opt.instrument) {
        row.p_k = opt.instrument->p_k(st.w);
        row.max_interference = opt.instrument->max_precoder_interference(st.w);
      }
      st.trace.push_back(row);
      ++st.schedule_pos;
    }
    if (kind == LearnerKind::OneBitModified) {
      // permute columns to descending estimated diagonal
      std::vector<int> order(static_cast<std::size_t>(opt.n_t));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&wins](int a, int b) {
        return wins[static_cast<std::size_t>(a)] >
               wins[static_cast<std::size_t>(b)];
      });
      ComplexMatrix permuted(st.w.rows(), st.w.cols());
      for (std::size_t pos = 0; pos < order.size(); ++pos)
        permuted.set_col(pos, st.w.col(static_cast<std::size_t>(order[pos])));
      st.w = permuted;
      st.iq = order;
    }
    st.sweeps = sweep;
    if (opt.stop_on_eta && all_small) {
      st.converged = true;
      break;
    }
  }
  return st;
}

inline LearningState run_obnsla(FeedbackOracle& oracle, int n_t, double eta,
                                int max_sweeps = 12,
                                const HiddenInstrument* instrument = nullptr,
                                bool stop_on_eta = true) {
  LearnOptions opt;
  opt.n_t = n_t;
  opt.n_r = std::max(1, n_t - 1);
  opt.eta = eta;
  opt.max_sweeps = max_sweeps;
  opt.stop_on_eta = stop_on_eta;
  opt.instrument = instrument;
  return run_learning(oracle, LearnerKind::OneBit, opt);
}

inline LearningState run_modified_obnsla(
    FeedbackOracle& oracle, int n_t, int n_r, double eta, int max_sweeps = 12,
    const HiddenInstrument* instrument = nullptr, bool stop_on_eta = true) {
  LearnOptions opt;
  opt.n_t = n_t;
  opt.n_r = n_r;
  opt.eta = eta;
  opt.max_sweeps = max_sweeps;
  opt.stop_on_eta = stop_on_eta;
  opt.instrument = instrument;
  return run_learning(oracle, LearnerKind::OneBitModified, opt);
}

inline LearningState run_bnsla_surrogate(
    FeedbackOracle& oracle, int n_t, double eta, int max_sweeps = 12,
    const HiddenInstrument* instrument = nullptr, bool stop_on_eta = true) {
  LearnOptions opt;
  opt.n_t = n_t;
  opt.n_r = std::max(1, n_t - 1);
  opt.eta = eta;
  opt.max_sweeps = max_sweeps;
  opt.stop_on_eta = stop_on_eta;
  opt.instrument = instrument;
  return run_learning(oracle, LearnerKind::ContinuousSurrogate, opt);
}

// Precoder extraction: probe every column of W once, order them by one-bit
// pairwise comparisons (free while the probes stay in memory), keep the
// n_t - n_r least interfering columns, ascending.
inline ComplexMatrix extract_precoder(const LearningState& st,
                                      FeedbackOracle& oracle, int n_r) {
  const int n_t = static_cast<int>(st.w.cols());
  if (n_r < 1 || n_r >= n_t)
    throw std::invalid_argument("extract_precoder: need 1 <= n_r < n_t");
  std::vector<cvec> probes(static_cast<std::size_t>(n_t));
  for (int i = 0; i < n_t; ++i) {
    probes[static_cast<std::size_t>(i)] = detail::scaled_unit(
        st.w.col(static_cast<std::size_t>(i)), oracle.probe_power());
    oracle.transmit(probes[static_cast<std::size_t>(i)]);
  }
  // insertion sort on one-bit comparisons (robust to a comparator backed by
  // live measurements)
  std::vector<int> idx(static_cast<std::size_t>(n_t));
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0; --j) {
      const auto cr = oracle.compare(probes[static_cast<std::size_t>(idx[j - 1])],
                                     probes[static_cast<std::size_t>(idx[j])]);
      if (cr.sign > 0)
        std::swap(idx[j - 1], idx[j]);
      else
        break;
    }
  }
  ComplexMatrix t(static_cast<std::size_t>(n_t),
                  static_cast<std::size_t>(n_t - n_r));
  for (int j = 0; j < n_t - n_r; ++j)
    t.set_col(static_cast<std::size_t>(j),
              st.w.col(static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])));
  return t;
}

// Blind estimate of the interference-free dimension count: probe each
// column, count quadratic forms below rel_threshold times their sum (the
// probed trace stands in for the unobservable matrix norm).
inline int discover_null_dim(const LearningState& st, FeedbackOracle& oracle,
                             double rel_threshold = 1e-6) {
  const std::size_t n_t = st.w.cols();
  std::vector<double> q(n_t);
  double total = 0;
  for (std::size_t i = 0; i < n_t; ++i) {
    q[i] = oracle.transmit(
        detail::scaled_unit(st.w.col(i), oracle.probe_power()));
    total += q[i];
  }
  int count = 0;
  for (double v : q)
    if (v <= rel_threshold * total) ++count;
  return count;
}

inline void export_learning_trace_csv(const std::vector<TraceRow>& trace,
                                      std::ostream& os) {
  os << "k,sweep,l,m,theta_hat,phi_hat,delta,tc_total,P_k,max_interference\n";
  char buf[256];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof(buf),
                  "%ld,%d,%d,%d,%.12g,%.12g,%.12g,%ld,%.12g,%.12g\n", r.k,
                  r.sweep, r.l, r.m, r.theta_hat, r.phi_hat, r.delta,
                  r.tc_total, r.p_k, r.max_interference);
    os << buf;
  }
}

}  // namespace nslab
