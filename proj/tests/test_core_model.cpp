// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "uwbisac/core_model.hpp"
#include "uwbisac/experiments.hpp"

#include <cmath>
#include <functional>

using namespace uwbisac;
using doctest::Approx;

namespace {

// Frozen from a 30-digit mpmath evaluation of the pulse definition.
constexpr double kPeakAt02ns = 53112.5966013598;
constexpr double kBandwidthAt02ns = 562697697.598191;

ScenarioConfig one_path(double tau = 50e-9) {
  ScenarioConfig sc = table1_defaults();
  sc.paths = {{tau, 0.0, 1.0}};
  return sc;
}

double quad(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

TEST_CASE("pulse peak sample sits at the delay index") {
  const auto sc = one_path();
  const auto w = sample_pulse(sc.pulse, 50e-9, sc);
  REQUIRE(w.size() == 1000);
  Eigen::Index imax;
  w.maxCoeff(&imax);
  CHECK(imax == 500);
  CHECK(w[500] == Approx(kPeakAt02ns).epsilon(1e-12));
}

TEST_CASE("raw grid sampler places a zero-delay pulse centre at the origin") {
  PulseShape p;
  const auto w = sample_pulse_on_grid(p, 0.0, 16, 10e9);
  CHECK(w[0] == Approx(pulse_value(p, 0.0)).epsilon(1e-15));
  // the scenario-level sampler refuses a pulse whose support leaves the PRI
  CHECK_THROWS_AS(sample_pulse(p, 0.0, one_path()), LeakageError);
  CHECK_THROWS_AS(sample_pulse(p, 99.5e-9, one_path()), LeakageError);
  CHECK_THROWS_AS(sample_pulse(p, 120e-9, one_path()), ConfigError);
}

TEST_CASE("sampled pulse energy is unity") {
  const auto sc = one_path();
  const auto w = sample_pulse(sc.pulse, 50e-9, sc);
  CHECK(w.squaredNorm() / sc.f_s == Approx(1.0).epsilon(0.01));
  CHECK(w.squaredNorm() / sc.f_s == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("energy normalization holds across spreading factors") {
  for (double alpha : {0.1e-9, 0.2e-9, 0.5e-9, 1e-9}) {
    auto sc = one_path();
    sc.pulse.alpha = alpha;
    sc.f_s = 10.0 / alpha;
    const auto w = sample_pulse(sc.pulse, 50e-9, sc);
    const double e = w.squaredNorm() / sc.f_s;
    CHECK(e >= 0.99);
    CHECK(e <= 1.01);
  }
}

TEST_CASE("delay derivative of the pulse") {
  const auto sc = one_path();
  const auto d = pulse_time_derivative(sc.pulse, 50e-9, sc);
  CHECK(d[500] == 0.0);
  for (int k = 1; k < 20; ++k) CHECK(d[500 + k] == Approx(-d[500 - k]).epsilon(1e-12));
  // closed form of the squared-derivative integral for a unit-energy Gaussian
  const double a = sc.pulse.alpha;
  CHECK(d.squaredNorm() / sc.f_s == Approx(1.0 / (2.0 * a * a)).epsilon(1e-6));
  CHECK(d.squaredNorm() / sc.f_s == Approx(1.25e19).epsilon(1e-6));
  // matches a central difference of the sampler
  const double h = 1e-15;
  const Eigen::VectorXd fd =
      (sample_pulse(sc.pulse, 50e-9 + h, sc) - sample_pulse(sc.pulse, 50e-9 - h, sc)) / (2.0 * h);
  CHECK((fd - d).norm() / d.norm() < 1e-5);
}

TEST_CASE("effective bandwidth against quadrature oracles") {
  PulseShape p;
  const double B = effective_bandwidth(p);
  CHECK(B == Approx(kBandwidthAt02ns).epsilon(1e-12));
  CHECK(B / 1e6 == Approx(562.7).epsilon(1e-4));

  const double a = p.alpha;
  const double span = 12.0 * a;
  const double e = quad([&](double t) { return std::pow(pulse_value(p, t), 2); }, -span, span);
  const double d = quad([&](double t) { return std::pow(pulse_dt_value(p, t), 2); }, -span, span);
  const double b_time = std::sqrt(d / (4.0 * kPi * kPi * e));
  CHECK(b_time == Approx(B).epsilon(1e-6));

  // spectrum of the Gaussian: |W(f)|^2 proportional to exp(-4 pi^2 a^2 f^2)
  const double fspan = 12.0 / (2.0 * kPi * a);
  auto s = [&](double f) { return std::exp(-4.0 * kPi * kPi * a * a * f * f); };
  const double num = quad([&](double f) { return f * f * s(f); }, -fspan, fspan);
  const double den = quad(s, -fspan, fspan);
  CHECK(std::sqrt(num / den) == Approx(B).epsilon(1e-6));
  CHECK(std::sqrt(num / den) == Approx(b_time).epsilon(1e-6));

  PulseShape wide = p;
  wide.alpha = 2.0 * p.alpha;
  CHECK(effective_bandwidth(wide) == Approx(B / 2.0).epsilon(1e-15));
  CHECK(effective_bandwidth(wide) > 0.0);
  CHECK_THROWS_AS(effective_bandwidth(PulseShape{0.0, 1.0}), ConfigError);
}

TEST_CASE("received SNR") {
  auto sc = one_path();
  sc.sigma2 = 1.0;
  PathState p{50e-9, 0.0, 1.0};
  CHECK(received_snr(p, sc) == Approx(1e7).epsilon(1e-12));
  CHECK(received_snr({50e-9, 0.0, 0.0}, sc) == 0.0);
  CHECK(received_snr({50e-9, 0.0, 2.0}, sc) == Approx(4.0 * received_snr(p, sc)).epsilon(1e-15));
  sc.sigma2 = 4.0;
  CHECK(received_snr(p, sc) == Approx(2.5e6).epsilon(1e-12));
  CHECK(amplitude_for_snr(received_snr({50e-9, 0.0, 3.0}, sc), 50e-9, sc) == Approx(3.0).epsilon(1e-14));
}

TEST_CASE("regulatory energy gate") {
  auto sc = one_path();
  PulseShape p;
  p.e_tb = 3.7e-12;
  auto r = check_regulatory(p, sc);
  CHECK(r.pulses_per_ms == Approx(10000.0).epsilon(1e-15));
  CHECK(r.per_pulse_ceiling == Approx(3.7e-12).epsilon(1e-15));
  CHECK(r.passes);
  CHECK(std::abs(r.margin) < 1e-20);
  p.e_tb = 3.7000001e-12;
  CHECK_FALSE(check_regulatory(p, sc).passes);
  p.e_tb = std::nextafter(3.7e-12, 1.0);
  CHECK_FALSE(check_regulatory(p, sc).passes);
  p.e_tb = std::nextafter(3.7e-12, 0.0);
  CHECK(check_regulatory(p, sc).passes);
  p.e_tb = 1e-12;
  CHECK(check_regulatory(p, sc).margin > 0.0);

  sc.t_f = 1e-3;
  p.e_tb = 37e-9;
  r = check_regulatory(p, sc);
  CHECK(r.pulses_per_ms == Approx(1.0));
  CHECK(r.passes);
  CHECK(r.bandwidth_ok);
}

TEST_CASE("parameter layouts") {
  for (int L = 1; L <= 4; ++L) {
    CHECK(theta_layout(L, Scheme::SensingOnly).size() == 3 * L);
    CHECK(theta_layout(L, Scheme::Ppm).size() == 3 * L + 1);
    CHECK(theta_layout(L, Scheme::Bpsk).size() == 3 * L + 1);
    auto sc = table1_defaults();
    sc.paths.resize(L);
    for (int N : {1, 2, 8}) {
      sc.n_f = N;
      CHECK(eta_layout(sc, ModulationConfig::sensing_only()).size() == (N + 2) * L);
    }
  }
  const auto t = theta_layout(3, Scheme::Ppm);
  CHECK(t.index_of("tau1") == 0);
  CHECK(t.index_of("dtau_q") == 3);
  CHECK(theta_layout(3, Scheme::Bpsk).index_of("phi_bpsk") == 6);
  CHECK_THROWS(t.index_of("nope"));
}

TEST_CASE("configuration invariants") {
  auto sc = table1_defaults();
  CHECK_NOTHROW(sc.validate());
  auto bad = sc;
  bad.paths[1].tau0 = 20.5e-9;
  CHECK_NOTHROW(bad.validate());
  CHECK_THROWS_AS(bad.check_separation(), SeparationError);
  bad = sc;
  bad.paths[2].tau0 = 99e-9;
  CHECK_THROWS_AS(bad.validate(), LeakageError);
  // the PPM shift must keep every pulse inside the PRI
  CHECK_THROWS_AS(sc.validate(39e-9), LeakageError);

  auto m = ModulationConfig::bpsk(sc.n_f, Decoupling::Differential);
  CHECK_THROWS_AS(m.validate(sc), ConfigError);
  m = ModulationConfig::sensing_only();
  m.data = 2;
  CHECK_THROWS_AS(m.validate(sc), ConfigError);
  m = ModulationConfig::ppm(sc.n_f, Decoupling::Pilot, 4);
  CHECK_NOTHROW(m.validate(sc));
  m.data = 5;
  CHECK_THROWS_AS(m.validate(sc), ConfigError);
}
