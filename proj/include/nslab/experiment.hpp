#pragma once

/*
 * Seeded Monte-Carlo experiment campaigns behind the CLI: convergence vs
 * bounds under ideal feedback, Doppler and SINR-quantization sweeps over
 * the link-level simulator, and a property-suite bench. Campaigns are
 * bit-reproducible: per-trial seeds derive from (seed, trial index), rows
 * are aggregated in trial order, and floats are printed with one fixed
 * format.
 */

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nslab/bounds.hpp"
#include "nslab/complex_matrix.hpp"
#include "nslab/feedback.hpp"
#include "nslab/jacobi.hpp"
#include "nslab/linesearch.hpp"
#include "nslab/null_space_learning.hpp"
#include "nslab/rng.hpp"
#include "nslab/simenv.hpp"

namespace nslab {

struct LearningConfig {
  double eta = 1e-2;
  int max_sweeps = 1;
  bool stop_on_eta = false;
  int n_t = 3;
  int n_r = 2;
  int settle_tcs = 20;
};

struct FeedbackConfig {
  std::string mode = "continuous_pc";
  int bits = 4;
  int memory = 64;
  double noise_sigma = 0.0;
  double su_power_dbm = 5.0;
  int votes = 1;  // majority-vote comparison repeats (robustness extension)
};

struct SweepConfig {
  int trials = 200;
  std::uint64_t seed = 1;
  std::vector<double> etas{1e-2, 1e-3, 1e-4};
  std::vector<double> doppler_list{1, 5, 15, 50, 100, 150};
  std::vector<int> bits_list{1, 2, 3, 4, 5, 6, 7, 8};
  std::string target = "ps";  // swept link in cmd_doppler_sweep
  int sweeps_recorded = 20;
  bool inject_violation = false;
  int jobs = 1;
};

struct ExperimentConfig {
  simenv::GeometryConfig geometry{};
  simenv::ChannelConfig channels{};
  FeedbackConfig feedback{};
  LearningConfig learning{};
  SweepConfig sweep{};
};

inline FeedbackMode parse_mode(const std::string& s) {
  if (s == "ideal") return FeedbackMode::Ideal;
  if (s == "continuous_pc") return FeedbackMode::ContinuousPowerControl;
  if (s == "incremental_pc") return FeedbackMode::IncrementalPowerControl;
  if (s == "quantized_sinr") return FeedbackMode::QuantizedSinr;
  if (s == "noisy_power") return FeedbackMode::NoisyPower;
  throw std::invalid_argument("unknown feedback mode: " + s);
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["geometry"] = {{"pu_tx_disk_m", c.geometry.pu_tx_disk_m},
                   {"su_disk_m", c.geometry.su_disk_m},
                   {"pu_tx_min_m", c.geometry.pu_tx_min_m},
                   {"su_tx_min_m", c.geometry.su_tx_min_m}};
  j["channels"] = {{"n_tp", c.channels.n_tp},
                   {"n_rp", c.channels.n_rp},
                   {"n_ts", c.channels.n_ts},
                   {"n_rs", c.channels.n_rs},
                   {"noise_dbm", c.channels.noise_dbm},
                   {"tc_ms", c.channels.tc_ms},
                   {"doppler_pp_hz", c.channels.doppler_pp_hz},
                   {"doppler_ps_hz", c.channels.doppler_ps_hz},
                   {"doppler_sp_hz", c.channels.doppler_sp_hz},
                   {"pu_target_sinr_db", c.channels.pu_target_sinr_db},
                   {"pu_max_dbm", c.channels.pu_max_dbm},
                   {"su_power_dbm", c.channels.su_power_dbm},
                   {"rician_k_ps", c.channels.rician_k_ps},
                   {"oscillators", c.channels.oscillators},
                   {"pu_mrt", c.channels.pu_mrt},
                   {"meas_noise", c.channels.meas_noise}};
  j["feedback"] = {{"mode", c.feedback.mode},
                   {"bits", c.feedback.bits},
                   {"memory", c.feedback.memory},
                   {"noise_sigma", c.feedback.noise_sigma},
                   {"su_power_dbm", c.feedback.su_power_dbm},
                   {"votes", c.feedback.votes}};
  j["learning"] = {{"eta", c.learning.eta},
                   {"max_sweeps", c.learning.max_sweeps},
                   {"stop_on_eta", c.learning.stop_on_eta},
                   {"n_t", c.learning.n_t},
                   {"n_r", c.learning.n_r},
                   {"settle_tcs", c.learning.settle_tcs}};
  j["sweep"] = {{"trials", c.sweep.trials},
                {"seed", c.sweep.seed},
                {"etas", c.sweep.etas},
                {"doppler_list", c.sweep.doppler_list},
                {"bits_list", c.sweep.bits_list},
                {"target", c.sweep.target},
                {"sweeps_recorded", c.sweep.sweeps_recorded},
                {"inject_violation", c.sweep.inject_violation},
                {"jobs", c.sweep.jobs}};
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  auto get = [](const nlohmann::json& obj, const char* key, auto& dst) {
    if (obj.contains(key)) dst = obj.at(key).get<std::decay_t<decltype(dst)>>();
  };
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    get(g, "pu_tx_disk_m", c.geometry.pu_tx_disk_m);
    get(g, "su_disk_m", c.geometry.su_disk_m);
    get(g, "pu_tx_min_m", c.geometry.pu_tx_min_m);
    get(g, "su_tx_min_m", c.geometry.su_tx_min_m);
  }
  if (j.contains("channels")) {
    const auto& ch = j.at("channels");
    get(ch, "n_tp", c.channels.n_tp);
    get(ch, "n_rp", c.channels.n_rp);
    get(ch, "n_ts", c.channels.n_ts);
    get(ch, "n_rs", c.channels.n_rs);
    get(ch, "noise_dbm", c.channels.noise_dbm);
    get(ch, "tc_ms", c.channels.tc_ms);
    get(ch, "doppler_pp_hz", c.channels.doppler_pp_hz);
    get(ch, "doppler_ps_hz", c.channels.doppler_ps_hz);
    get(ch, "doppler_sp_hz", c.channels.doppler_sp_hz);
    get(ch, "pu_target_sinr_db", c.channels.pu_target_sinr_db);
    get(ch, "pu_max_dbm", c.channels.pu_max_dbm);
    get(ch, "su_power_dbm", c.channels.su_power_dbm);
    get(ch, "rician_k_ps", c.channels.rician_k_ps);
    get(ch, "oscillators", c.channels.oscillators);
    get(ch, "pu_mrt", c.channels.pu_mrt);
    get(ch, "meas_noise", c.channels.meas_noise);
  }
  if (j.contains("feedback")) {
    const auto& f = j.at("feedback");
    get(f, "mode", c.feedback.mode);
    get(f, "bits", c.feedback.bits);
    get(f, "memory", c.feedback.memory);
    get(f, "noise_sigma", c.feedback.noise_sigma);
    get(f, "su_power_dbm", c.feedback.su_power_dbm);
    get(f, "votes", c.feedback.votes);
  }
  if (j.contains("learning")) {
    const auto& l = j.at("learning");
    get(l, "eta", c.learning.eta);
    get(l, "max_sweeps", c.learning.max_sweeps);
    get(l, "stop_on_eta", c.learning.stop_on_eta);
    get(l, "n_t", c.learning.n_t);
    get(l, "n_r", c.learning.n_r);
    get(l, "settle_tcs", c.learning.settle_tcs);
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    get(s, "trials", c.sweep.trials);
    get(s, "seed", c.sweep.seed);
    get(s, "etas", c.sweep.etas);
    get(s, "doppler_list", c.sweep.doppler_list);
    get(s, "bits_list", c.sweep.bits_list);
    get(s, "target", c.sweep.target);
    get(s, "sweeps_recorded", c.sweep.sweeps_recorded);
    get(s, "inject_violation", c.sweep.inject_violation);
    get(s, "jobs", c.sweep.jobs);
  }
  c.channels.geometry = c.geometry;
  c.channels.su_power_dbm = c.feedback.su_power_dbm;
  return c;
}

inline std::uint64_t config_hash(const ExperimentConfig& c) {
  const std::string s = config_to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct CsvTable {
  std::string provenance;  // comment line, no trailing newline
  std::string header;
  std::vector<std::string> rows;

  std::string str() const {
    std::string out = provenance + "\n" + header + "\n";
    for (const auto& r : rows) out += r + "\n";
    return out;
  }
};

inline std::string provenance_line(const ExperimentConfig& c) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "# config_hash=%016llx seed=%llu",
                static_cast<unsigned long long>(config_hash(c)),
                static_cast<unsigned long long>(c.sweep.seed));
  return buf;
}

// Deterministic trial-parallel map: results land in trial order regardless
// of the job count.
template <class Fn>
void for_each_trial(int trials, int jobs, Fn&& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    for (int t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&fn, trials, jobs, w]() {
      for (int t = w; t < trials; t += jobs) fn(t);
    });
  for (auto& th : pool) th.join();
}

// Random interference channel with iid complex Gaussian entries, scaled so
// the Gram matrix has unit Frobenius norm.
inline ComplexMatrix random_unit_gram_channel(std::mt19937_64& rng,
                                              std::size_t n_r,
                                              std::size_t n_t) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix h(n_r, n_t);
  for (std::size_t j = 0; j < n_t; ++j)
    for (std::size_t i = 0; i < n_r; ++i)
      h(i, j) = cplx{gauss(rng), gauss(rng)};
  const double gn = gram(h).frobenius_norm();
  const double s = 1.0 / std::sqrt(gn);
  for (std::size_t j = 0; j < n_t; ++j)
    for (std::size_t i = 0; i < n_r; ++i) h(i, j) *= s;
  return h;
}

// Ideal-feedback convergence campaign: per (eta, sweep), mean squared
// off-diagonal norm and mean worst-column interference, with the matching
// analytic envelopes.
inline CsvTable cmd_convergence(const ExperimentConfig& cfg) {
  const int n_t = cfg.learning.n_t;
  const int n_r = cfg.learning.n_r;
  const int sweeps = cfg.sweep.sweeps_recorded;
  const int trials = cfg.sweep.trials;
  const int m = n_t * (n_t - 1) / 2;
  CsvTable out;
  out.provenance = provenance_line(cfg);
  out.header =
      "sweep,eta,p_k_sq_mean,linear_rhs,limsup_bound,max_interference_mean,"
      "intf_floor_bound";
  for (double eta : cfg.sweep.etas) {
    // per trial: P^2 at sweep boundaries (index 0 = before learning) and
    // worst-column interference per sweep
    std::vector<std::vector<double>> psq(static_cast<std::size_t>(trials));
    std::vector<std::vector<double>> intf(static_cast<std::size_t>(trials));
    for_each_trial(trials, cfg.sweep.jobs, [&](int t) {
      auto rng = make_rng(derive_seed(cfg.sweep.seed, static_cast<std::uint64_t>(t)));
      const ComplexMatrix h = random_unit_gram_channel(
          rng, static_cast<std::size_t>(n_r), static_cast<std::size_t>(n_t));
      HiddenInstrument instr(h, n_r);
      FeedbackOracle oracle(h, 1.0, cfg.feedback.memory);
      LearningState st = run_obnsla(oracle, n_t, eta, sweeps, &instr, false);
      auto& ps = psq[static_cast<std::size_t>(t)];
      auto& in = intf[static_cast<std::size_t>(t)];
      const double p0 = instr.p_k(ComplexMatrix::identity(
          static_cast<std::size_t>(n_t)));
      ps.push_back(p0 * p0);
      for (int s = 1; s <= sweeps; ++s) {
        const TraceRow& row = st.trace[static_cast<std::size_t>(s * m - 1)];
        ps.push_back(row.p_k * row.p_k);
        in.push_back(row.max_interference);
      }
    });
    const double limsup = limsup_bound(n_t, eta, 1.0);
    const double floor =
        interference_bounds(0.0, n_t, n_r, eta, 1.0).asymptotic_floor;
    for (int s = 1; s <= sweeps; ++s) {
      double mean_p = 0, mean_prev = 0, mean_i = 0;
      for (int t = 0; t < trials; ++t) {
        mean_p += psq[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
        mean_prev +=
            psq[static_cast<std::size_t>(t)][static_cast<std::size_t>(s - 1)];
        mean_i +=
            intf[static_cast<std::size_t>(t)][static_cast<std::size_t>(s - 1)];
      }
      mean_p /= trials;
      mean_prev /= trials;
      mean_i /= trials;
      const double rhs = linear_bound_rhs(mean_prev, n_t, eta, 1.0);
      out.rows.push_back(std::to_string(s) + "," + fmt_g(eta) + "," +
                         fmt_g(mean_p) + "," + fmt_g(rhs) + "," +
                         fmt_g(limsup) + "," + fmt_g(mean_i) + "," +
                         fmt_g(floor));
    }
  }
  return out;
}

// One link-level trial: learn for the configured sweeps, extract the
// precoder, report 10 log10(untrained / trained) worst-column interference
// on the end-of-learning channel snapshot.
inline double reduction_trial_db(const simenv::ChannelConfig& cc,
                                 const ExperimentConfig& cfg,
                                 FeedbackMode mode, int bits, LearnerKind kind,
                                 std::uint64_t trial_seed) {
  auto session = std::make_shared<simenv::LinkSession>(cc, trial_seed);
  const double p_s = simenv::dbm_to_mw(cfg.feedback.su_power_dbm);
  FeedbackOracle oracle(session, p_s, cfg.feedback.memory, mode, bits);
  simenv::PowerControlLaw law = simenv::PowerControlLaw::Continuous;
  if (mode == FeedbackMode::QuantizedSinr)
    law = simenv::PowerControlLaw::QuantizedSinr;
  if (mode == FeedbackMode::IncrementalPowerControl)
    law = simenv::PowerControlLaw::Incremental;
  session->settle(cfg.learning.settle_tcs, law, bits);

  const int n_t = cc.n_ts;
  const int n_r = cc.n_rp;  // interference channel rank
  LearnOptions opt;
  opt.n_t = n_t;
  opt.n_r = n_r;
  opt.eta = cfg.learning.eta;
  opt.max_sweeps = cfg.learning.max_sweeps;
  opt.stop_on_eta = cfg.learning.stop_on_eta;
  opt.compare_votes = cfg.feedback.votes;
  LearningState st = run_learning(oracle, kind, opt);
  const ComplexMatrix t = extract_precoder(st, oracle, n_r);

  const ComplexMatrix h_eval = session->h_ps_now();
  auto worst_column = [&h_eval](const ComplexMatrix& cols) {
    double worst = 0;
    for (std::size_t j = 0; j < cols.cols(); ++j) {
      cvec y = h_eval * cols.col(j);
      double s = 0;
      for (const cplx& v : y) s += std::norm(v);
      worst = std::max(worst, s);
    }
    return worst;
  };
  ComplexMatrix untrained(static_cast<std::size_t>(n_t),
                          static_cast<std::size_t>(n_t - n_r));
  for (int j = 0; j < n_t - n_r; ++j) {
    cvec e(static_cast<std::size_t>(n_t), cplx{0.0, 0.0});
    e[static_cast<std::size_t>(n_r + j)] = 1.0;
    untrained.set_col(static_cast<std::size_t>(j), e);
  }
  const double pre = worst_column(untrained);
  const double post = std::max(worst_column(t), 1e-300);
  return 10.0 * std::log10(pre / post);
}

inline CsvTable cmd_doppler_sweep(const ExperimentConfig& cfg) {
  CsvTable out;
  out.provenance = provenance_line(cfg);
  out.header = "doppler_hz,algorithm,mean_reduction_db,trials";
  const FeedbackMode mode = parse_mode(cfg.feedback.mode);
  for (double d : cfg.sweep.doppler_list) {
    simenv::ChannelConfig cc = cfg.channels;
    if (cfg.sweep.target == "pp")
      cc.doppler_pp_hz = d;
    else if (cfg.sweep.target == "ps")
      cc.doppler_ps_hz = d;
    else
      throw std::invalid_argument("cmd_doppler_sweep: target must be ps|pp");
    for (LearnerKind kind :
         {LearnerKind::OneBit, LearnerKind::ContinuousSurrogate}) {
      std::vector<double> red(static_cast<std::size_t>(cfg.sweep.trials));
      for_each_trial(cfg.sweep.trials, cfg.sweep.jobs, [&](int t) {
        red[static_cast<std::size_t>(t)] = reduction_trial_db(
            cc, cfg, mode, cfg.feedback.bits, kind,
            derive_seed(cfg.sweep.seed, static_cast<std::uint64_t>(t)));
      });
      double mean = 0;
      for (double r : red) mean += r;
      mean /= std::max<std::size_t>(1, red.size());
      out.rows.push_back(
          fmt_g(d) + "," +
          (kind == LearnerKind::OneBit ? "obnsla" : "bnsla") + "," +
          fmt_g(mean) + "," + std::to_string(cfg.sweep.trials));
    }
  }
  return out;
}

inline CsvTable cmd_quantization_sweep(const ExperimentConfig& cfg) {
  CsvTable out;
  out.provenance = provenance_line(cfg);
  out.header = "bits,algorithm,mean_reduction_db,trials";
  for (int bits : cfg.sweep.bits_list) {
    const FeedbackMode mode = (bits == 0)
                                  ? FeedbackMode::ContinuousPowerControl
                                  : FeedbackMode::QuantizedSinr;
    for (LearnerKind kind :
         {LearnerKind::OneBit, LearnerKind::ContinuousSurrogate}) {
      std::vector<double> red(static_cast<std::size_t>(cfg.sweep.trials));
      for_each_trial(cfg.sweep.trials, cfg.sweep.jobs, [&](int t) {
        red[static_cast<std::size_t>(t)] = reduction_trial_db(
            cfg.channels, cfg, mode, bits, kind,
            derive_seed(cfg.sweep.seed, static_cast<std::uint64_t>(t)));
      });
      double mean = 0;
      for (double r : red) mean += r;
      mean /= std::max<std::size_t>(1, red.size());
      out.rows.push_back(
          std::to_string(bits) + "," +
          (kind == LearnerKind::OneBit ? "obnsla" : "bnsla") + "," +
          fmt_g(mean) + "," + std::to_string(cfg.sweep.trials));
    }
  }
  return out;
}

// Property-suite aggregates: invariant pass counts and TC budgets. The
// violation-injection knob flips a fraction of comparator answers in the
// SMI suite, which must surface as a nonzero failure count.
inline nlohmann::json cmd_unit_bench(const ExperimentConfig& cfg) {
  auto rng = make_rng(cfg.sweep.seed);
  nlohmann::json j;
  char hash_buf[24];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  j["config_hash"] = hash_buf;
  j["seed"] = cfg.sweep.seed;

  {  // rotation unitarity
    std::uniform_int_distribution<int> dim(2, 8);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    int failures = 0;
    const int runs = 2000;
    for (int i = 0; i < runs; ++i) {
      const int n = dim(rng);
      std::uniform_int_distribution<int> li(1, n - 1);
      const int l = li(rng);
      std::uniform_int_distribution<int> mi(l + 1, n);
      RotationParams p{l, mi(rng), uni(rng) * kPi / 2.0, uni(rng) * kPi};
      const ComplexMatrix r =
          rotation_matrix(static_cast<std::size_t>(n), p);
      if (unitarity_defect(r) > 1e-12) ++failures;
    }
    j["rotation_unitarity"] = {{"runs", runs}, {"failures", failures}};
  }

  {  // SMI quadrant selection on random sinusoids
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double flip_p = cfg.sweep.inject_violation ? 0.08 : 0.0;
    int failures = 0;
    const int runs = 2000;
    for (int i = 0; i < runs; ++i) {
      const double len = (i % 2 == 0) ? kPi : kPi / 2.0;
      const double amp = 0.1 + uni(rng);
      const double base = amp + uni(rng);
      const double zmin = (2.0 * uni(rng) - 1.0) * len;
      auto w = [&](double z) {
        return base - amp * std::cos(kPi / len * (z - zmin));
      };
      auto u = [&](double z1, double z2) {
        int bit = w(z1) >= w(z2) ? 1 : 0;
        if (flip_p > 0 && uni(rng) < flip_p) bit = 1 - bit;
        return bit;
      };
      const SmiInterval smi = determine_smi(u, len);
      const double period = 2.0 * len;
      double d = std::fmod(zmin - smi.lo, period);
      if (d < 0) d += period;
      const bool inside = d <= (smi.hi - smi.lo) + 1e-12;
      if (!inside) ++failures;
    }
    j["smi_quadrants"] = {{"runs", runs}, {"failures", failures}};
  }

  {  // per-rotation TC budget under ideal feedback
    int failures = 0;
    const int runs = 50;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < runs; ++i) {
      const double eta = std::pow(10.0, -2.0 - 3.0 * uni(rng));
      auto trial_rng = make_rng(derive_seed(cfg.sweep.seed, 1000 + i));
      const ComplexMatrix h = random_unit_gram_channel(trial_rng, 2, 3);
      FeedbackOracle oracle(h, 1.0, cfg.feedback.memory);
      const long before = oracle.tc_count();
      const PhiSearch ps = find_phi(oracle, ComplexMatrix::identity(3), 1, 2, eta);
      const ThetaSearch ts =
          find_theta(oracle, ComplexMatrix::identity(3), 1, 2, ps.phi_hat, eta);
      const long used = oracle.tc_count() - before;
      const long budget =
          2 * (5 + static_cast<long>(std::floor(std::log2(kPi / (2 * eta)))) + 1);
      (void)ts;
      if (used > budget) ++failures;
    }
    j["tc_budget"] = {{"runs", runs}, {"failures", failures}};
  }

  {  // per-sweep linear-rate inequality on short ideal campaigns
    int violations = 0;
    int sweeps_checked = 0;
    const int runs = 10;
    for (int i = 0; i < runs; ++i) {
      auto trial_rng = make_rng(derive_seed(cfg.sweep.seed, 2000 + i));
      const ComplexMatrix h = random_unit_gram_channel(trial_rng, 2, 3);
      HiddenInstrument instr(h, 2);
      FeedbackOracle oracle(h, 1.0, cfg.feedback.memory);
      const double eta = 1e-3;
      LearningState st = run_obnsla(oracle, 3, eta, 6, &instr, false);
      const int m = 3;
      double prev =
          instr.p_k(ComplexMatrix::identity(3));
      prev *= prev;
      for (int s = 1; s <= st.sweeps; ++s) {
        const double p = st.trace[static_cast<std::size_t>(s * m - 1)].p_k;
        const double rhs = linear_bound_rhs(prev, 3, eta, 1.0);
        ++sweeps_checked;
        if (p * p > rhs * (1.0 + 1e-9)) ++violations;
        prev = p * p;
      }
    }
    j["linear_rate"] = {{"sweeps", sweeps_checked}, {"failures", violations}};
  }

  return j;
}

// results/<command>/<tag>/data.csv (+ config.json copy)
inline std::filesystem::path write_outputs(const std::filesystem::path& out_dir,
                                           const std::string& command,
                                           const std::string& tag,
                                           const std::string& data_csv,
                                           const ExperimentConfig& cfg) {
  const std::filesystem::path dir = out_dir / command / tag;
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "data.csv", std::ios::binary);
    if (!f) throw std::runtime_error("write_outputs: cannot open data.csv");
    f << data_csv;
  }
  {
    std::ofstream f(dir / "config.json", std::ios::binary);
    f << config_to_json(cfg).dump(2) << "\n";
  }
  return dir;
}

}  // namespace nslab
