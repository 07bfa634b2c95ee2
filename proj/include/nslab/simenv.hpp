#pragma once

/*
 * Link-level scenario machinery: node placement on disks, distance path
 * loss, sum-of-sinusoids Rayleigh fading with a prescribed Doppler spread,
 * the primary link's power control loop and SINR quantization. A
 * LinkSession owns one trial's world and produces, per transmission cycle,
 * the quantity the learning side actually observes.
 *
 * Power quantities are linear mW unless a name says dB/dBm. The path-loss
 * formula is plain 3GPP-style arithmetic in its argument; sessions feed it
 * distance in kilometers so receive levels land above the -121 dBm floor.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "nslab/complex_matrix.hpp"
#include "nslab/rng.hpp"

namespace nslab::simenv {

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return db_to_lin(dbm); }

inline double path_loss_db(double r) {
  if (!(r > 0)) throw std::invalid_argument("path_loss_db: r must be > 0");
  return 128.1 + 37.6 * std::log10(r);
}

// Uniform mid-rise quantizer over [-5, 20] dB with 2^bits levels,
// saturating at the range ends.
inline double quantize_sinr(double sinr_db, int bits) {
  if (bits < 1 || bits > 30)
    throw std::invalid_argument("quantize_sinr: bits out of range");
  constexpr double lo = -5.0, hi = 20.0;
  const double levels = std::exp2(bits);
  const double step = (hi - lo) / levels;
  const double x = std::clamp(sinr_db, lo, hi);
  double idx = std::floor((x - lo) / step);
  idx = std::min(idx, levels - 1.0);
  return lo + (idx + 0.5) * step;
}

inline double pu_sinr_db(double pu_power_mw, double direct_gain,
                         double interference_mw, double noise_mw) {
  return lin_to_db(pu_power_mw * direct_gain / (interference_mw + noise_mw));
}

// Multiplicative correction toward the target SINR, clamped to the power
// mask. One step lands on the fixed point when the measurement is exact.
inline double pu_power_step(double current_mw, double sinr_db,
                            double target_db = 10.0, double max_dbm = 23.0,
                            double min_dbm = -50.0) {
  const double next = current_mw * db_to_lin(target_db - sinr_db);
  return std::clamp(next, dbm_to_mw(min_dbm), dbm_to_mw(max_dbm));
}

// +/- step_db correction toward the target.
inline double pu_power_step_incremental(double current_mw, double sinr_db,
                                        double target_db = 10.0,
                                        double max_dbm = 23.0,
                                        double step_db = 1.0,
                                        double min_dbm = -50.0) {
  const double delta = (sinr_db < target_db) ? step_db : -step_db;
  const double next = current_mw * db_to_lin(delta);
  return std::clamp(next, dbm_to_mw(min_dbm), dbm_to_mw(max_dbm));
}

// One complex fading entry: improved sum-of-sinusoids with stratified
// arrival angles. Unit-variance complex Gaussian marginals; autocorrelation
// approaches the Bessel J0(2 pi f_d tau) shape as oscillators increase.
// Adding a line-of-sight term turns it Rician with linear factor k.
class FadingProcess {
 public:
  FadingProcess() = default;

  FadingProcess(std::mt19937_64& rng, double fd_hz, int n_osc,
                double rician_k = 0.0) {
    if (n_osc < 1) throw std::invalid_argument("FadingProcess: n_osc >= 1");
    std::uniform_real_distribution<double> uni(-kPi, kPi);
    const double jitter = uni(rng);
    w_cos_.resize(n_osc);
    w_sin_.resize(n_osc);
    ph_c_.resize(n_osc);
    ph_s_.resize(n_osc);
    for (int n = 0; n < n_osc; ++n) {
      const double alpha =
          (2.0 * kPi * (n + 1) - kPi + jitter) / (4.0 * n_osc);
      w_cos_[n] = 2.0 * kPi * fd_hz * std::cos(alpha);
      w_sin_[n] = 2.0 * kPi * fd_hz * std::sin(alpha);
      ph_c_[n] = uni(rng);
      ph_s_[n] = uni(rng);
    }
    amp_ = 1.0 / std::sqrt(static_cast<double>(n_osc));
    if (rician_k > 0.0) {
      los_ = std::polar(std::sqrt(rician_k / (rician_k + 1.0)), uni(rng));
      amp_ /= std::sqrt(rician_k + 1.0);
    }
  }

  cplx at(double t_sec) const {
    double xc = 0, xs = 0;
    for (std::size_t n = 0; n < w_cos_.size(); ++n) {
      xc += std::cos(w_cos_[n] * t_sec + ph_c_[n]);
      xs += std::cos(w_sin_[n] * t_sec + ph_s_[n]);
    }
    return los_ + amp_ * cplx(xc, xs);
  }

 private:
  std::vector<double> w_cos_, w_sin_, ph_c_, ph_s_;
  double amp_ = 1.0;
  cplx los_{0.0, 0.0};
};

// Matrix of independent fading entries, evaluated lazily at any time.
class FadingMatrix {
 public:
  FadingMatrix() = default;
  FadingMatrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
               double fd_hz, int n_osc, double rician_k = 0.0)
      : rows_(rows), cols_(cols) {
    procs_.reserve(rows * cols);
    for (std::size_t i = 0; i < rows * cols; ++i)
      procs_.emplace_back(rng, fd_hz, n_osc, rician_k);
  }

  ComplexMatrix at(double t_sec, double amplitude = 1.0) const {
    ComplexMatrix m(rows_, cols_);
    std::size_t idx = 0;
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i)
        m(i, j) = amplitude * procs_[idx++].at(t_sec);
    return m;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<FadingProcess> procs_;
};

// Seeded fading series, one matrix per transmission cycle.
inline std::vector<ComplexMatrix> generate_fading(std::uint64_t seed,
                                                  double fd_hz,
                                                  double tc_duration_s,
                                                  int n_tcs, std::size_t rows,
                                                  std::size_t cols,
                                                  int n_osc = 16) {
  if (n_tcs < 0) throw std::invalid_argument("generate_fading: n_tcs < 0");
  auto rng = make_rng(seed);
  FadingMatrix fm(rng, rows, cols, fd_hz, n_osc);
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(n_tcs));
  for (int n = 0; n < n_tcs; ++n)
    out.push_back(fm.at(n * tc_duration_s));
  return out;
}

struct Point {
  double x = 0, y = 0;
};

inline double distance_m(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// PU-Rx sits at the origin; PU-Tx uniform on the 300 m disk (>= 20 m away),
// SU-Tx uniform on the 400 m disk (>= 100 m away), SU-Rx uniform on the
// 400 m disk.
struct ScenarioGeometry {
  Point pu_rx{};
  Point pu_tx{};
  Point su_tx{};
  Point su_rx{};
};

inline Point sample_disk(std::mt19937_64& rng, double radius_m,
                         double min_dist_m) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int tries = 0; tries < 10000; ++tries) {
    const double r = radius_m * std::sqrt(uni(rng));
    const double ang = 2.0 * kPi * uni(rng);
    if (r >= min_dist_m) return {r * std::cos(ang), r * std::sin(ang)};
  }
  throw std::runtime_error("sample_disk: rejection failed");
}

struct GeometryConfig {
  double pu_tx_disk_m = 300.0;
  double su_disk_m = 400.0;
  double pu_tx_min_m = 20.0;
  double su_tx_min_m = 100.0;
};

inline ScenarioGeometry sample_geometry(std::mt19937_64& rng,
                                        const GeometryConfig& cfg) {
  ScenarioGeometry g;
  g.pu_tx = sample_disk(rng, cfg.pu_tx_disk_m, cfg.pu_tx_min_m);
  g.su_tx = sample_disk(rng, cfg.su_disk_m, cfg.su_tx_min_m);
  g.su_rx = sample_disk(rng, cfg.su_disk_m, 0.0);
  return g;
}

enum class PowerControlLaw { Continuous, Incremental, QuantizedSinr };

struct ChannelConfig {
  int n_tp = 2;   // PU transmit antennas
  int n_rp = 1;   // PU receive antennas
  int n_ts = 3;   // SU transmit antennas
  int n_rs = 2;   // SU receive antennas
  double noise_dbm = -121.0;
  double tc_ms = 1.0;
  double doppler_pp_hz = 15.0;
  double doppler_ps_hz = 15.0;
  double doppler_sp_hz = 15.0;
  double pu_target_sinr_db = 10.0;
  double pu_max_dbm = 23.0;
  double su_power_dbm = 5.0;
  double rician_k_ps = 0.0;  // > 0 switches the interference link to Rician
  int oscillators = 16;
  bool pu_mrt = true;  // PU transmit beam tracks its own channel (CSI at Tx)
  double meas_noise = 1.0;  // SU energy-measurement noise, x noise floor
  GeometryConfig geometry{};
};

// One trial's world: geometry, per-link fading, and the PU's closed power
// control loop. step() advances one TC under the SU probe x and returns the
// SU-side observation q (received PU signal energy), which is monotone in
// the PU transmit power.
class LinkSession {
 public:
  LinkSession(const ChannelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    auto rng = make_rng(seed);
    geom_ = sample_geometry(rng, cfg.geometry);
    const double km = 1.0 / 1000.0;
    amp_pp_ = std::sqrt(db_to_lin(
        -path_loss_db(distance_m(geom_.pu_tx, geom_.pu_rx) * km)));
    amp_ps_ = std::sqrt(db_to_lin(
        -path_loss_db(distance_m(geom_.su_tx, geom_.pu_rx) * km)));
    amp_sp_ = std::sqrt(db_to_lin(
        -path_loss_db(distance_m(geom_.pu_tx, geom_.su_rx) * km)));
    const std::size_t rp = static_cast<std::size_t>(cfg.n_rp);
    const std::size_t tp = static_cast<std::size_t>(cfg.n_tp);
    const std::size_t ts = static_cast<std::size_t>(cfg.n_ts);
    const std::size_t rs = static_cast<std::size_t>(cfg.n_rs);
    fading_pp_ = FadingMatrix(rng, rp, tp, cfg.doppler_pp_hz, cfg.oscillators);
    fading_ps_ = FadingMatrix(rng, rp, ts, cfg.doppler_ps_hz, cfg.oscillators,
                              cfg.rician_k_ps);
    fading_sp_ = FadingMatrix(rng, rs, tp, cfg.doppler_sp_hz, cfg.oscillators);
    // fixed PU beam for the whole trial
    std::normal_distribution<double> gauss(0.0, 1.0);
    pu_beam_.resize(tp);
    for (auto& v : pu_beam_) v = {gauss(rng), gauss(rng)};
    const double nb = norm2(pu_beam_);
    for (auto& v : pu_beam_) v /= nb;
    meas_rng_ = make_rng(derive_seed(seed, 0x5eed));
    noise_mw_ = dbm_to_mw(cfg.noise_dbm);
    // start at the interference-free fixed point
    const double g0 = direct_gain(0.0);
    pu_power_mw_ = std::clamp(
        db_to_lin(cfg.pu_target_sinr_db) * noise_mw_ / g0,
        dbm_to_mw(-50.0), dbm_to_mw(cfg.pu_max_dbm));
  }

  const ChannelConfig& config() const { return cfg_; }
  const ScenarioGeometry& geometry() const { return geom_; }
  long tc_index() const { return n_; }
  double su_power_mw() const { return dbm_to_mw(cfg_.su_power_dbm); }

  ComplexMatrix h_ps_at(long n) const {
    return fading_ps_.at(time_s(n), amp_ps_);
  }
  ComplexMatrix h_ps_now() const { return h_ps_at(n_); }

  struct Obs {
    double q = 0;                // SU-side received PU energy
    double interference_mw = 0;  // ||H_ps x||^2 at the PU receiver
    double sinr_db = 0;
    double pu_power_mw = 0;
  };

  // Advance one TC with SU probe x (||x||^2 = SU probe power in mW; an
  // empty vector means the SU is silent).
  Obs step(const cvec& x, PowerControlLaw law, int sinr_bits = 4) {
    ++n_;
    const double t = time_s(n_);
    Obs obs;
    if (!x.empty()) {
      const ComplexMatrix h_ps = fading_ps_.at(t, amp_ps_);
      obs.interference_mw = squared_norm(h_ps * x);
    }
    const double g_pp = direct_gain(t);
    obs.sinr_db =
        pu_sinr_db(pu_power_mw_, g_pp, obs.interference_mw, noise_mw_);
    double measured_db = obs.sinr_db;
    if (law == PowerControlLaw::QuantizedSinr)
      measured_db = quantize_sinr(measured_db, sinr_bits);
    if (law == PowerControlLaw::Incremental)
      pu_power_mw_ = pu_power_step_incremental(
          pu_power_mw_, measured_db, cfg_.pu_target_sinr_db, cfg_.pu_max_dbm);
    else
      pu_power_mw_ = pu_power_step(pu_power_mw_, measured_db,
                                   cfg_.pu_target_sinr_db, cfg_.pu_max_dbm);
    obs.pu_power_mw = pu_power_mw_;

    const ComplexMatrix h_sp = fading_sp_.at(t, amp_sp_);
    const double g_sp = squared_norm(h_sp * beam(t));
    std::normal_distribution<double> gauss(0.0, 1.0);
    obs.q = pu_power_mw_ * g_sp + cfg_.meas_noise * noise_mw_ * gauss(meas_rng_);
    return obs;
  }

  // Power-control settling with a silent SU.
  void settle(int n_tcs, PowerControlLaw law, int sinr_bits = 4) {
    for (int i = 0; i < n_tcs; ++i) step(cvec{}, law, sinr_bits);
  }

 private:
  double time_s(long n) const { return static_cast<double>(n) * cfg_.tc_ms * 1e-3; }

  // Maximum-ratio transmit beam when the PU has CSI at its transmitter,
  // otherwise the fixed random beam drawn at construction.
  cvec beam(double t) const {
    if (!cfg_.pu_mrt) return pu_beam_;
    const ComplexMatrix h_pp = fading_pp_.at(t, amp_pp_);
    cvec b(static_cast<std::size_t>(cfg_.n_tp));
    for (std::size_t j = 0; j < b.size(); ++j) {
      cplx s = 0;
      for (std::size_t i = 0; i < h_pp.rows(); ++i) s += std::conj(h_pp(i, j));
      b[j] = s;
    }
    const double nb = norm2(b);
    if (nb == 0.0) return pu_beam_;
    for (auto& v : b) v /= nb;
    return b;
  }

  double direct_gain(double t) const {
    const ComplexMatrix h_pp = fading_pp_.at(t, amp_pp_);
    return squared_norm(h_pp * beam(t));
  }

  static double squared_norm(const cvec& v) {
    double s = 0;
    for (const cplx& e : v) s += std::norm(e);
    return s;
  }

  ChannelConfig cfg_;
  ScenarioGeometry geom_;
  FadingMatrix fading_pp_, fading_ps_, fading_sp_;
  cvec pu_beam_;
  double amp_pp_ = 0, amp_ps_ = 0, amp_sp_ = 0;
  double noise_mw_ = 0;
  double pu_power_mw_ = 0;
  long n_ = 0;
  std::mt19937_64 meas_rng_;
};

}  // namespace nslab::simenv
