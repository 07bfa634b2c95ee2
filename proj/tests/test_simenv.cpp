#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "nslab/rng.hpp"
#include "nslab/simenv.hpp"

using namespace nslab;
using namespace nslab::simenv;
using Catch::Approx;

namespace {

// series-kernel Bessel J0 evaluation for the autocorrelation oracle
double bessel_j0(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= -(x * x) / (4.0 * k * k);
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("path_loss_db: printed arithmetic") {
  CHECK(path_loss_db(100.0) == Approx(203.3));
  CHECK(path_loss_db(1.0) == Approx(128.1));
  CHECK(path_loss_db(100.0) - path_loss_db(20.0) ==
        Approx(37.6 * std::log10(5.0)));
  CHECK_THROWS_AS(path_loss_db(0.0), std::invalid_argument);
}

TEST_CASE("quantize_sinr: step size, saturation, fine limit") {
  // 4 bits over 25 dB: 1.5625 dB steps
  const double step = 25.0 / 16.0;
  CHECK(quantize_sinr(-5.0, 4) == Approx(-5.0 + step / 2.0));
  CHECK(quantize_sinr(-30.0, 4) == Approx(-5.0 + step / 2.0));
  CHECK(quantize_sinr(50.0, 4) == Approx(20.0 - step / 2.0));
  double worst = 0.0;
  for (double s = -5.0; s <= 20.0; s += 0.01)
    worst = std::max(worst, std::abs(quantize_sinr(s, 12) - s));
  CHECK(worst <= 0.01);
  CHECK_THROWS_AS(quantize_sinr(0.0, 0), std::invalid_argument);
}

TEST_CASE("pu_power_step: fixed point, 3 dB response, clamp") {
  const double noise = dbm_to_mw(-121.0);
  // direct gain tuned so 10 dB SINR needs exactly 1 mW
  const double gain = 10.0 * noise / 1.0;
  const double p_star = pu_power_step(1.0, pu_sinr_db(1.0, gain, 0.0, noise));
  CHECK(p_star == Approx(1.0));
  // interference dominating noise: doubling it raises power by ~3 dB
  const double strong_gain = 1e4 * noise;
  const double intf = 1000.0 * noise;
  const double s1 = pu_sinr_db(1.0, strong_gain, intf, noise);
  const double s2 = pu_sinr_db(1.0, strong_gain, 2.0 * intf, noise);
  CHECK(s1 - s2 == Approx(3.0).margin(0.01));
  CHECK(pu_power_step(1.0, s2) / pu_power_step(1.0, s1) ==
        Approx(db_to_lin(3.0)).epsilon(0.01));
  // clamp at 23 dBm
  CHECK(pu_power_step(100.0, -30.0) == Approx(dbm_to_mw(23.0)));
  // incremental steps are +/-1 dB
  CHECK(pu_power_step_incremental(1.0, 0.0) == Approx(db_to_lin(1.0)));
  CHECK(pu_power_step_incremental(1.0, 20.0) == Approx(db_to_lin(-1.0)));
}

TEST_CASE("generate_fading: zero Doppler freezes the channel") {
  const auto series = generate_fading(5, 0.0, 1e-3, 50, 2, 2);
  REQUIRE(series.size() == 50);
  for (const auto& m : series)
    CHECK(max_abs_diff(m, series.front()) < 1e-15);
}

TEST_CASE("generate_fading: deterministic in the seed") {
  const auto a = generate_fading(9, 20.0, 1e-3, 32, 2, 3);
  const auto b = generate_fading(9, 20.0, 1e-3, 32, 2, 3);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(max_abs_diff(a[i], b[i]) == 0.0);
}

TEST_CASE("fading autocorrelation tracks the Bessel shape") {
  // lag 1/(4 f_d): J0(pi/2) ~ 0.472; every entry process within 10%
  const double fd = 50.0, tc = 1e-3;
  const int lag = static_cast<int>(std::round(1.0 / (4.0 * fd) / tc));
  const int n = 60000;
  auto rng = make_rng(123);
  const double target = bessel_j0(2.0 * kPi * fd * lag * tc);
  for (int proc = 0; proc < 4; ++proc) {
    FadingProcess fp(rng, fd, 16);
    std::vector<cplx> x(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) x[static_cast<std::size_t>(t)] = fp.at(t * tc);
    cplx num = 0;
    double den = 0;
    for (int t = 0; t + lag < n; ++t) {
      num += x[static_cast<std::size_t>(t)] *
             std::conj(x[static_cast<std::size_t>(t + lag)]);
      den += std::norm(x[static_cast<std::size_t>(t)]);
    }
    const double rho = (num / den).real();
    REQUIRE(std::abs(rho - target) <= 0.1 * std::abs(target) + 0.02);
  }
}

TEST_CASE("fading: slow-Doppler lag-1 autocorrelation stays near its oracle") {
  const double fd = 15.0, tc = 1e-3;
  auto rng = make_rng(77);
  FadingProcess fp(rng, fd, 16);
  const int n = 60000;
  std::vector<cplx> x(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) x[static_cast<std::size_t>(t)] = fp.at(t * tc);
  cplx num = 0;
  double den = 0;
  for (int t = 0; t + 1 < n; ++t) {
    num += x[static_cast<std::size_t>(t)] * std::conj(x[static_cast<std::size_t>(t + 1)]);
    den += std::norm(x[static_cast<std::size_t>(t)]);
  }
  const double rho = (num / den).real();
  const double target = bessel_j0(2.0 * kPi * fd * tc);  // ~0.9978
  CHECK(rho == Approx(target).margin(2e-3));
  CHECK(rho >= 0.995);
}

TEST_CASE("fading: unit power and cross-seed independence") {
  auto rng_a = make_rng(1001);
  auto rng_b = make_rng(2002);
  FadingProcess a(rng_a, 30.0, 16), b(rng_b, 30.0, 16);
  const int n = 10000;
  double pow_a = 0;
  cplx cross = 0;
  for (int t = 0; t < n; ++t) {
    const cplx va = a.at(t * 1e-3), vb = b.at(t * 1e-3);
    pow_a += std::norm(va);
    cross += va * std::conj(vb);
  }
  CHECK(pow_a / n == Approx(1.0).margin(0.15));
  CHECK(std::abs(cross) / n <= 0.05);
}

TEST_CASE("geometry sampling respects disks and minimum distances") {
  auto rng = make_rng(55);
  GeometryConfig gc;
  for (int i = 0; i < 500; ++i) {
    const ScenarioGeometry g = sample_geometry(rng, gc);
    const double d_pu = distance_m(g.pu_tx, g.pu_rx);
    const double d_su = distance_m(g.su_tx, g.pu_rx);
    REQUIRE(d_pu >= 20.0);
    REQUIRE(d_pu <= 300.0);
    REQUIRE(d_su >= 100.0);
    REQUIRE(d_su <= 400.0);
    REQUIRE(distance_m(g.su_rx, g.pu_rx) <= 400.0);
  }
}

TEST_CASE("link session: settling reaches a steady power with static channels") {
  ChannelConfig cc;
  cc.doppler_pp_hz = 0.0;
  cc.doppler_ps_hz = 0.0;
  cc.doppler_sp_hz = 0.0;
  LinkSession session(cc, 99);
  session.settle(5, PowerControlLaw::Continuous);
  const auto o1 = session.step(cvec{}, PowerControlLaw::Continuous);
  const auto o2 = session.step(cvec{}, PowerControlLaw::Continuous);
  CHECK(o1.pu_power_mw == Approx(o2.pu_power_mw).epsilon(1e-9));
  CHECK(o1.sinr_db == Approx(cc.pu_target_sinr_db).margin(0.5));
}

TEST_CASE("link session: q is constant at the power-control fixed point") {
  ChannelConfig cc;
  cc.doppler_pp_hz = 0.0;
  cc.doppler_ps_hz = 0.0;
  cc.doppler_sp_hz = 0.0;
  cc.meas_noise = 0.0;
  LinkSession session(cc, 4242);
  session.settle(5, PowerControlLaw::Continuous);
  const double q0 = session.step(cvec{}, PowerControlLaw::Continuous).q;
  for (int i = 0; i < 10; ++i) {
    const double q = session.step(cvec{}, PowerControlLaw::Continuous).q;
    REQUIRE(q == Approx(q0).epsilon(1e-12));
  }
}

TEST_CASE("link session: SU probes raise interference and PU power") {
  ChannelConfig cc;
  cc.doppler_pp_hz = 0.0;
  cc.doppler_ps_hz = 0.0;
  cc.doppler_sp_hz = 0.0;
  LinkSession session(cc, 1234);
  session.settle(5, PowerControlLaw::Continuous);
  const auto quiet = session.step(cvec{}, PowerControlLaw::Continuous);
  cvec probe(3, cplx{0, 0});
  probe[0] = std::sqrt(session.su_power_mw());
  const auto loud = session.step(probe, PowerControlLaw::Continuous);
  CHECK(loud.interference_mw > 0.0);
  CHECK(loud.pu_power_mw >= quiet.pu_power_mw);
}
