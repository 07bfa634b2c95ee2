#pragma once

/*
 * The one-bit observation channel. The oracle owns the hidden interference
 * channel (or a full link session), answers probe transmissions with the
 * mode's observable q, and exposes the one-bit comparison between any two
 * probes that are still inside the memory window M. Every transmit costs
 * one transmission cycle; comparisons charge re-probes for anything that
 * aged out of the window.
 */

#include <cstdint>
#include <cstdio>
#include <deque>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nslab/complex_matrix.hpp"
#include "nslab/rng.hpp"
#include "nslab/simenv.hpp"

namespace nslab {

enum class FeedbackMode {
  Ideal,
  ContinuousPowerControl,
  IncrementalPowerControl,
  QuantizedSinr,
  NoisyPower,
};

inline const char* to_string(FeedbackMode m) {
  switch (m) {
    case FeedbackMode::Ideal: return "ideal";
    case FeedbackMode::ContinuousPowerControl: return "continuous_pc";
    case FeedbackMode::IncrementalPowerControl: return "incremental_pc";
    case FeedbackMode::QuantizedSinr: return "quantized_sinr";
    case FeedbackMode::NoisyPower: return "noisy_power";
  }
  return "?";
}

struct TcBudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CompareResult {
  int sign = 1;     // +1 iff the first probe's interference is >= the second's
  int tc_cost = 0;  // re-probes charged by this comparison
};

class FeedbackOracle {
 public:
  // Fixed hidden channel; Ideal or NoisyPower observations.
  FeedbackOracle(ComplexMatrix hidden_h, double probe_power_mw,
                 int memory_depth = 64, FeedbackMode mode = FeedbackMode::Ideal,
                 double noise_sigma = 0.0, std::uint64_t seed = 1)
      : mode_(mode),
        memory_(memory_depth),
        probe_power_mw_(probe_power_mw),
        h_(std::move(hidden_h)),
        noise_sigma_(noise_sigma),
        rng_(make_rng(seed)) {
    if (mode != FeedbackMode::Ideal && mode != FeedbackMode::NoisyPower)
      throw std::invalid_argument(
          "FeedbackOracle: power-control modes need a LinkSession");
    if (memory_depth < 1)
      throw std::invalid_argument("FeedbackOracle: memory depth >= 1");
    g_norm_ = gram(h_).frobenius_norm();
    dim_ = h_.cols();
  }

  // Link-level session; q is the SU-side received PU energy.
  FeedbackOracle(std::shared_ptr<simenv::LinkSession> session,
                 double probe_power_mw, int memory_depth, FeedbackMode mode,
                 int sinr_bits = 4)
      : mode_(mode),
        memory_(memory_depth),
        probe_power_mw_(probe_power_mw),
        session_(std::move(session)),
        sinr_bits_(sinr_bits) {
    if (!session_) throw std::invalid_argument("FeedbackOracle: null session");
    if (mode == FeedbackMode::Ideal || mode == FeedbackMode::NoisyPower)
      throw std::invalid_argument(
          "FeedbackOracle: this constructor is for power-control modes");
    if (memory_depth < 1)
      throw std::invalid_argument("FeedbackOracle: memory depth >= 1");
    dim_ = static_cast<std::size_t>(session_->config().n_ts);
  }

  std::size_t dim() const { return dim_; }
  double probe_power() const { return probe_power_mw_; }
  FeedbackMode mode() const { return mode_; }
  int memory_depth() const { return memory_; }
  long tc_count() const { return n_; }
  void set_tc_budget(long budget) { budget_ = budget; }
  simenv::LinkSession* session() { return session_.get(); }

  // Incremental power commands carry one bit per TC; every other mode's q
  // is a usable continuous magnitude.
  bool provides_continuous_q() const {
    return mode_ != FeedbackMode::IncrementalPowerControl;
  }

  // One transmission cycle: send probe x (scaled to sqrt probe power),
  // observe q. Returns q.
  double transmit(const cvec& x) {
    if (x.size() != dim_) throw std::invalid_argument("transmit: bad probe dim");
    const double nx = norm2(x);
    if (nx == 0.0) throw std::invalid_argument("transmit: zero probe");
    const double want = std::sqrt(probe_power_mw_);
    if (std::abs(nx - want) > 1e-9 * std::max(1.0, want))
      throw std::invalid_argument("transmit: probe power mismatch");
    if (budget_ && n_ >= *budget_)
      throw TcBudgetExhausted("transmit: TC budget exhausted");
    ++n_;
    double q = 0.0;
    switch (mode_) {
      case FeedbackMode::Ideal: {
        cvec y = h_ * x;
        q = squared(y);
        break;
      }
      case FeedbackMode::NoisyPower: {
        cvec y = h_ * x;
        std::normal_distribution<double> gauss(0.0, 1.0);
        q = squared(y) + noise_sigma_ * g_norm_ * gauss(rng_);
        break;
      }
      default: {
        q = session_->step(x, law(), sinr_bits_).q;
        break;
      }
    }
    history_.push_back({x, q, n_});
    while (!history_.empty() && n_ - history_.front().n > memory_)
      history_.pop_front();
    log_.push_back({n_, q, x});
    return q;
  }

  // One-bit comparison: +1 iff interference(x_a) >= interference(x_b), as
  // seen through this mode's q. Both probes must sit inside the memory
  // window once all refreshes are done; anything that does not is
  // re-transmitted and charged, so tc_cost is 0, 1 or 2.
  CompareResult compare(const cvec& xa, const cvec& xb) {
    CompareResult res;
    if (same_direction(xa, xb)) {
      if (!lookup(xa)) {
        transmit(xa);
        ++res.tc_cost;
      }
      res.sign = 1;
      return res;
    }
    std::optional<long> age_a = age_of(xa);
    std::optional<long> age_b = age_of(xb);
    bool need_a = !age_a, need_b = !age_b;
    for (;;) {
      const long k = (need_a ? 1 : 0) + (need_b ? 1 : 0);
      const bool ok_a = need_a || (*age_a + k <= memory_);
      const bool ok_b = need_b || (*age_b + k <= memory_);
      if (ok_a && ok_b) break;
      if (!ok_b)
        need_b = true;
      else
        need_a = true;
    }
    if (need_b) {
      transmit(xb);
      ++res.tc_cost;
    }
    if (need_a) {
      transmit(xa);
      ++res.tc_cost;
    }
    const double qa = *lookup(xa);
    const double qb = *lookup(xb);
    res.sign = (qa >= qb) ? 1 : -1;
    return res;
  }

  // Majority vote over 2r+1-style repeated comparisons; every vote after
  // the first re-probes both directions so it sees fresh measurements.
  // votes = 1 is the plain one-bit comparison.
  CompareResult compare_voted(const cvec& xa, const cvec& xb, int votes) {
    if (votes < 1) throw std::invalid_argument("compare_voted: votes >= 1");
    CompareResult first = compare(xa, xb);
    if (votes == 1) return first;
    int sum = first.sign;
    int cost = first.tc_cost;
    for (int v = 1; v < votes; ++v) {
      transmit(xb);
      transmit(xa);
      cost += 2;
      sum += compare(xa, xb).sign;
    }
    return {sum >= 0 ? 1 : -1, cost};
  }

  // Probe log export: n, q, mode, then the probe entries.
  void export_probe_log_csv(std::ostream& os) const {
    os << "n,q,mode";
    for (std::size_t i = 0; i < dim_; ++i)
      os << ",re" << i << ",im" << i;
    os << "\n";
    char buf[64];
    for (const auto& row : log_) {
      os << row.n << ',';
      std::snprintf(buf, sizeof(buf), "%.12g", row.q);
      os << buf << ',' << to_string(mode_);
      for (const cplx& v : row.x) {
        std::snprintf(buf, sizeof(buf), ",%.12g,%.12g", v.real(), v.imag());
        os << buf;
      }
      os << "\n";
    }
  }

 private:
  struct Probe {
    cvec x;
    double q;
    long n;
  };
  struct LogRow {
    long n;
    double q;
    cvec x;
  };

  simenv::PowerControlLaw law() const {
    switch (mode_) {
      case FeedbackMode::IncrementalPowerControl:
        return simenv::PowerControlLaw::Incremental;
      case FeedbackMode::QuantizedSinr:
        return simenv::PowerControlLaw::QuantizedSinr;
      default:
        return simenv::PowerControlLaw::Continuous;
    }
  }

  static double squared(const cvec& v) {
    double s = 0;
    for (const cplx& e : v) s += std::norm(e);
    return s;
  }

  // History lookups demand exact probe equality. Re-probing a search point
  // recomputes the identical vector bit for bit, and anything fuzzier would
  // let near-converged bisection points alias each other's cached q.
  static bool same_direction(const cvec& a, const cvec& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return false;
    return true;
  }

  std::optional<double> lookup(const cvec& x) const {
    for (auto it = history_.rbegin(); it != history_.rend(); ++it) {
      if (n_ - it->n > memory_) break;
      if (same_direction(it->x, x)) return it->q;
    }
    return std::nullopt;
  }

  std::optional<long> age_of(const cvec& x) const {
    for (auto it = history_.rbegin(); it != history_.rend(); ++it) {
      if (n_ - it->n > memory_) break;
      if (same_direction(it->x, x)) return n_ - it->n;
    }
    return std::nullopt;
  }

  FeedbackMode mode_;
  int memory_;
  double probe_power_mw_;
  std::size_t dim_ = 0;
  long n_ = 0;
  std::optional<long> budget_;

  ComplexMatrix h_;  // hidden; never exposed to the learner
  double g_norm_ = 0;
  double noise_sigma_ = 0;
  std::mt19937_64 rng_;

  std::shared_ptr<simenv::LinkSession> session_;
  int sinr_bits_ = 4;

  std::deque<Probe> history_;
  std::vector<LogRow> log_;
};

}  // namespace nslab
