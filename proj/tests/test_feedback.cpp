#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <sstream>

#include "nslab/feedback.hpp"
#include "nslab/linesearch.hpp"
#include "nslab/rng.hpp"
#include "test_support.hpp"

using namespace nslab;
using Catch::Approx;

namespace {

cvec unit_probe(std::initializer_list<cplx> entries, double power = 1.0) {
  cvec x(entries);
  const double s = std::sqrt(power) / norm2(x);
  for (auto& v : x) v *= s;
  return x;
}

}  // namespace

TEST_CASE("transmit: ideal q values") {
  FeedbackOracle oracle(ComplexMatrix::identity(2), 1.0);
  CHECK(oracle.transmit(unit_probe({cplx{1, 0}, cplx{0, 0}})) == Approx(1.0));

  FeedbackOracle worked(testsup::worked_channel(), 1.0);
  // the null direction draws zero interference
  const cvec null_dir =
      unit_probe({cplx{-0.5, 0}, cplx{-std::sqrt(3.0) / 2.0, 0}});
  CHECK(std::abs(worked.transmit(null_dir)) < 1e-20);
}

TEST_CASE("transmit: rejects zero and wrongly scaled probes") {
  FeedbackOracle oracle(ComplexMatrix::identity(2), 1.0);
  CHECK_THROWS_AS(oracle.transmit(cvec(2, cplx{0, 0})), std::invalid_argument);
  CHECK_THROWS_AS(oracle.transmit(cvec{cplx{2.0, 0}, cplx{0, 0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(oracle.transmit(cvec{cplx{1.0, 0}}), std::invalid_argument);
}

TEST_CASE("compare: worked example basis directions") {
  FeedbackOracle oracle(testsup::worked_channel(), 1.0);
  const cvec e1 = unit_probe({cplx{1, 0}, cplx{0, 0}});
  const cvec e2 = unit_probe({cplx{0, 0}, cplx{1, 0}});
  // g11 = 3/4 > g22 = 1/4
  CHECK(oracle.compare(e1, e2).sign == 1);
  CHECK(oracle.compare(e2, e1).sign == -1);
  // equality ties resolve to +1
  CHECK(oracle.compare(e1, e1).sign == 1);
}

TEST_CASE("compare: repeated probes reuse cached observations") {
  FeedbackOracle oracle(testsup::worked_channel(), 1.0);
  const cvec e1 = unit_probe({cplx{1, 0}, cplx{0, 0}});
  oracle.transmit(e1);
  const cvec e2 = unit_probe({cplx{0, 0}, cplx{1, 0}});
  const CompareResult r = oracle.compare(e1, e2);
  CHECK(r.sign == 1);
  CHECK(r.tc_cost == 1);  // only e2 needed a TC
  // distinct but nearby probes are distinct observations
  cvec nearby = e1;
  nearby[1] = cplx{1e-7, 0.0};
  const double s = 1.0 / norm2(nearby);
  for (auto& v : nearby) v *= s;
  CHECK(oracle.compare(nearby, e2).tc_cost == 1);
}

TEST_CASE("tc accounting: transmits, fresh pairs, repeats, SMI") {
  FeedbackOracle oracle(testsup::worked_channel(), 1.0);
  CHECK(oracle.tc_count() == 0);
  const cvec e1 = unit_probe({cplx{1, 0}, cplx{0, 0}});
  oracle.transmit(e1);
  CHECK(oracle.tc_count() == 1);

  FeedbackOracle fresh(testsup::worked_channel(), 1.0);
  const cvec e2 = unit_probe({cplx{0, 0}, cplx{1, 0}});
  CHECK(fresh.compare(e1, e2).tc_cost == 2);
  CHECK(fresh.compare(e1, e2).tc_cost == 0);
  CHECK(fresh.tc_count() == 2);

  // SMI determination costs exactly 3 TCs from a cold start
  FeedbackOracle cold(testsup::worked_channel(), 1.0);
  auto u = [&cold](double z1, double z2) {
    auto probe = [](double z) {
      cvec x = rotated_column(ComplexMatrix::identity(2), 1, 2, kPi / 4.0, z);
      return x;
    };
    return cold.compare(probe(z1), probe(z2)).sign > 0 ? 1 : 0;
  };
  determine_smi(u, kPi);
  CHECK(cold.tc_count() == 3);
}

TEST_CASE("compare: memory window forces re-probes") {
  FeedbackOracle oracle(testsup::worked_channel(), 1.0, /*memory=*/2);
  const cvec e1 = unit_probe({cplx{1, 0}, cplx{0, 0}});
  const cvec e2 = unit_probe({cplx{0, 0}, cplx{1, 0}});
  const cvec mix = unit_probe({cplx{1, 0}, cplx{1, 0}});
  oracle.transmit(e1);   // n=1
  oracle.transmit(e2);   // n=2
  oracle.transmit(mix);  // n=3, e1 now 2 TCs old (still valid at M=2)
  CHECK(oracle.compare(e2, mix).tc_cost == 0);
  oracle.transmit(mix);  // n=4, e1 aged out
  const CompareResult r = oracle.compare(e1, mix);
  CHECK(r.tc_cost == 1);
}

TEST_CASE("compare: windowed pair at the edge re-probes both") {
  FeedbackOracle oracle(testsup::worked_channel(), 1.0, /*memory=*/1);
  const cvec e1 = unit_probe({cplx{1, 0}, cplx{0, 0}});
  const cvec e2 = unit_probe({cplx{0, 0}, cplx{1, 0}});
  const CompareResult r = oracle.compare(e1, e2);
  CHECK(r.tc_cost == 2);
  CHECK(r.sign == 1);
  // with M=1, only the immediately preceding probe stays comparable
  const CompareResult again = oracle.compare(e1, e2);
  CHECK(again.tc_cost <= 2);
  CHECK(again.sign == 1);
}

TEST_CASE("ideal compare is a total preorder on probe triples") {
  auto rng = make_rng(211);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const ComplexMatrix h = testsup::random_channel(rng, 2, 3);
  FeedbackOracle oracle(h, 1.0, 64);
  for (int i = 0; i < 200; ++i) {
    cvec a(3), b(3), c(3);
    for (std::size_t k = 0; k < 3; ++k) {
      a[k] = cplx{gauss(rng), gauss(rng)};
      b[k] = cplx{gauss(rng), gauss(rng)};
      c[k] = cplx{gauss(rng), gauss(rng)};
    }
    auto scale = [](cvec& v) {
      const double s = 1.0 / norm2(v);
      for (auto& e : v) e *= s;
    };
    scale(a);
    scale(b);
    scale(c);
    const int ab = oracle.compare(a, b).sign;
    const int bc = oracle.compare(b, c).sign;
    const int ac = oracle.compare(a, c).sign;
    if (ab == 1 && bc == 1) REQUIRE(ac == 1);
    // antisymmetry (ties have measure zero for random probes)
    REQUIRE(oracle.compare(b, a).sign == -ab);
  }
}

TEST_CASE("tc budget enforcement") {
  FeedbackOracle oracle(testsup::worked_channel(), 1.0);
  oracle.set_tc_budget(2);
  const cvec e1 = unit_probe({cplx{1, 0}, cplx{0, 0}});
  const cvec e2 = unit_probe({cplx{0, 0}, cplx{1, 0}});
  oracle.transmit(e1);
  oracle.transmit(e2);
  CHECK_THROWS_AS(oracle.transmit(e1), TcBudgetExhausted);
}

TEST_CASE("noisy-power mode perturbs q at the configured scale") {
  const ComplexMatrix h = testsup::worked_channel();
  FeedbackOracle oracle(h, 1.0, 64, FeedbackMode::NoisyPower, 0.1, 99);
  const cvec e1 = unit_probe({cplx{1, 0}, cplx{0, 0}});
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 50; ++i) {
    const double q = oracle.transmit(e1);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  CHECK(hi - lo > 1e-3);   // noise present
  CHECK(std::abs(0.5 * (hi + lo) - 0.75) < 0.2);  // centered near ||H e1||^2
}

TEST_CASE("probe log export") {
  FeedbackOracle oracle(testsup::worked_channel(), 1.0);
  oracle.transmit(unit_probe({cplx{1, 0}, cplx{0, 0}}));
  std::ostringstream os;
  oracle.export_probe_log_csv(os);
  const std::string s = os.str();
  CHECK(s.rfind("n,q,mode,re0,im0,re1,im1\n", 0) == 0);
  CHECK(s.find("ideal") != std::string::npos);
}

TEST_CASE("power-control session: quantizer converges to continuous") {
  simenv::ChannelConfig cc;
  cc.doppler_pp_hz = 0.0;
  cc.doppler_ps_hz = 0.0;
  cc.doppler_sp_hz = 0.0;
  auto mk = [&cc](FeedbackMode mode, int bits) {
    auto session = std::make_shared<simenv::LinkSession>(cc, 424242);
    return FeedbackOracle(session, simenv::dbm_to_mw(5.0), 64, mode, bits);
  };
  FeedbackOracle cont = mk(FeedbackMode::ContinuousPowerControl, 0);
  FeedbackOracle fine = mk(FeedbackMode::QuantizedSinr, 14);
  auto rng = make_rng(31337);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int agree = 0, total = 0;
  const double p = simenv::dbm_to_mw(5.0);
  for (int i = 0; i < 60; ++i) {
    cvec a(3), b(3);
    for (std::size_t k = 0; k < 3; ++k) {
      a[k] = cplx{gauss(rng), gauss(rng)};
      b[k] = cplx{gauss(rng), gauss(rng)};
    }
    const double sa = std::sqrt(p) / norm2(a);
    const double sb = std::sqrt(p) / norm2(b);
    for (auto& e : a) e *= sa;
    for (auto& e : b) e *= sb;
    const int s1 = cont.compare(a, b).sign;
    const int s2 = fine.compare(a, b).sign;
    ++total;
    if (s1 == s2) ++agree;
  }
  CHECK(agree >= total * 9 / 10);
}

TEST_CASE("surrogate flag: incremental mode is not continuous") {
  simenv::ChannelConfig cc;
  auto session = std::make_shared<simenv::LinkSession>(cc, 7);
  FeedbackOracle inc(session, simenv::dbm_to_mw(5.0), 64,
                     FeedbackMode::IncrementalPowerControl);
  CHECK_FALSE(inc.provides_continuous_q());
  FeedbackOracle ideal(testsup::worked_channel(), 1.0);
  CHECK(ideal.provides_continuous_q());
}
