// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "uwbisac/experiments.hpp"
#include "uwbisac/fim.hpp"
#include "uwbisac/signal_mean.hpp"

#include <cmath>

using namespace uwbisac;
using doctest::Approx;

namespace {

ScenarioConfig scene(int L, int N) {
  auto sc = with_paths(table1_defaults(), L);
  sc.n_f = N;
  for (int l = 0; l < L; ++l) sc.paths[l].doppler = 250.0 * (l + 1);
  return with_snr_db(sc, 10.0);
}

}  // namespace

TEST_CASE("phase sequence") {
  auto sc = scene(1, 4);
  // f_c * tau integer and no Doppler: all ones
  sc.paths[0] = {50e-9, 0.0, 1.0};
  sc.f_c = 4e9;
  auto d = phase_sequence(sc.paths[0], sc, ModulationConfig::sensing_only());
  for (int k = 0; k < 4; ++k) CHECK(std::abs(d[k] - std::complex<double>(1.0, 0.0)) < 1e-9);

  // BPSK with xi = pi negates PRIs carrying bit 1
  sc.n_f = 2;
  auto bp = ModulationConfig::bpsk(2);
  const std::vector<int> bits{0, 1};
  auto db = phase_sequence(sc.paths[0], sc, bp, bits);
  auto du = phase_sequence(sc.paths[0], sc, ModulationConfig::sensing_only());
  CHECK(std::abs(db[0] - du[0]) < 1e-15);
  CHECK(std::abs(db[1] + du[1]) < 1e-12);
  CHECK_THROWS_AS(phase_sequence(sc.paths[0], sc, bp), ConfigError);
  const std::vector<int> short_bits{1};
  CHECK_THROWS_AS(phase_sequence(sc.paths[0], sc, bp, short_bits), ConfigError);

  // 100 Hz Doppler at a 100 ns PRI: 2 pi 0.01 rad after 1e3 PRIs, ten full
  // turns after 1e6 PRIs (0.1 s)
  auto far = scene(1, 1);
  far.paths[0] = {50e-9, 100.0, 1.0};
  far.f_c = 4e9;
  far.n_f = 1'000'001;
  auto dl = phase_sequence(far.paths[0], far, ModulationConfig::sensing_only());
  CHECK(std::arg(dl[1000] / dl[0]) == Approx(2.0 * kPi * 0.01).epsilon(1e-9));
  CHECK(std::abs(std::arg(dl[1'000'000] / dl[0])) < 1e-6);
  for (Eigen::Index k = 0; k < dl.size(); k += 100'000) CHECK(std::abs(std::abs(dl[k]) - 1.0) < 1e-12);
}

TEST_CASE("single-path single-PRI mean equals the scaled pulse") {
  auto sc = scene(1, 1);
  sc.paths[0] = {50e-9, 0.0, 0.7};
  sc.f_c = 4e9;
  const auto mu = mean_vector(sc, ModulationConfig::sensing_only());
  const auto w = sample_pulse(sc.pulse, 50e-9, sc);
  CHECK(mu.values.size() == 1000);
  CHECK((mu.values.real() - 0.7 * w).cwiseAbs().maxCoeff() < 1e-9 * w.maxCoeff());
  CHECK(mu.values.imag().cwiseAbs().maxCoeff() < 1e-9 * w.maxCoeff());
}

TEST_CASE("modulated means reduce to sensing when all bits are zero") {
  auto sc = scene(3, 4);
  const std::vector<int> zeros(4, 0);
  const auto s = mean_vector(sc, ModulationConfig::sensing_only()).values;
  CHECK(mean_vector(sc, ModulationConfig::ppm(4), zeros).values == s);
  CHECK(mean_vector(sc, ModulationConfig::bpsk(4), zeros).values == s);
  // any bit set changes the waveform
  const std::vector<int> one{0, 1, 0, 0};
  CHECK_FALSE(mean_vector(sc, ModulationConfig::ppm(4), one).values == s);
}

TEST_CASE("per-PRI energy equals the summed path powers") {
  auto sc = scene(3, 3);
  const auto mu = mean_vector(sc, ModulationConfig::ppm(3));
  double expect = 0.0;
  for (const auto& p : sc.paths) expect += p.amp * p.amp;
  for (int k = 0; k < 3; ++k) {
    const double e = mu.values.segment(k * mu.n_s, mu.n_s).squaredNorm() / sc.f_s;
    CHECK(e == Approx(expect).epsilon(0.01));
  }
}

TEST_CASE("PRI slices are phase rotations of the first slice") {
  auto sc = scene(1, 5);
  const auto mu = mean_vector(sc, ModulationConfig::sensing_only());
  const auto d = phase_sequence(sc.paths[0], sc, ModulationConfig::sensing_only());
  const Eigen::VectorXcd first = mu.values.head(mu.n_s);
  for (int k = 1; k < 5; ++k) {
    const Eigen::VectorXcd expect = first * (d[k] / d[0]);
    CHECK((mu.values.segment(k * mu.n_s, mu.n_s) - expect).norm() < 1e-12 * first.norm());
  }
}

TEST_CASE("leaking modulation shift is rejected") {
  auto sc = scene(3, 2);
  auto m = ModulationConfig::ppm(2);
  m.xi_ppm = 39e-9;
  CHECK_THROWS_AS(mean_vector(sc, m), LeakageError);
  auto pilot = ModulationConfig::ppm(2, Decoupling::Pilot, 1);
  const std::vector<int> bad{1, 1};
  CHECK_THROWS_AS(mean_vector(sc, pilot, bad), ConfigError);
}

TEST_CASE("analytic mean Jacobian matches central differences") {
  const FdSteps steps;
  for (auto mod_kind : {0, 1, 2, 3, 4}) {
    for (int L = 1; L <= 3; ++L) {
      const int N = 2 * L + 2;
      auto sc = scene(L, N);
      ModulationConfig mod;
      switch (mod_kind) {
        case 0: mod = ModulationConfig::sensing_only(); break;
        case 1: mod = ModulationConfig::ppm(N); break;
        case 2: mod = ModulationConfig::bpsk(N); break;
        case 3: mod = ModulationConfig::ppm(N, Decoupling::Pilot, 2); break;
        default: mod = ModulationConfig::ppm(N, Decoupling::Differential); break;
      }
      const auto m = observation_model(sc, mod);
      const Eigen::MatrixXcd J = mean_jacobian(m);
      const Eigen::MatrixXcd F = fd_columns(m, fd_step_vector(m, steps), Exec::Serial);
      for (Eigen::Index c = 0; c < J.cols(); ++c) {
        const double err = (J.col(c) - F.col(c)).norm() / J.col(c).norm();
        CHECK_MESSAGE(err <= 1e-6, m.eta.names()[c] << " rel err " << err);
      }
    }
  }
}

TEST_CASE("mean Jacobian structure") {
  auto sc = scene(2, 3);
  const auto mod = ModulationConfig::sensing_only();
  const auto lay = eta_layout(sc, mod);
  const auto J = mean_jacobian(sc, mod, {}, lay);
  CHECK(J.rows() == 3 * 1000);
  CHECK(J.cols() == (3 + 2) * 2);

  // the phase column of PRI k lives only in PRI k and is j * mu there
  const auto mu = mean_vector(sc, mod).values;
  const auto c = lay.index_of("phi[1][1]");
  CHECK(J.col(c).head(1000).norm() == 0.0);
  CHECK(J.col(c).tail(1000).norm() == 0.0);
  const Eigen::VectorXcd slice = J.col(c).segment(1000, 1000);
  CHECK(std::abs((slice.adjoint() * mu.segment(1000, 1000))(0).real()) < 1e-12 * slice.squaredNorm());

  // squared norm of a delay column against the closed-form delay information
  auto s1 = scene(1, 8);
  s1.sigma2 = 1.0;
  const auto J1 = mean_jacobian(s1, mod, {}, eta_layout(s1, mod));
  const double discrete = fim_scale(s1.sigma2) * J1.col(0).squaredNorm();
  const double closed = 8.0 * single_pulse_info(s1, 0).tau;
  CHECK(discrete == Approx(closed).epsilon(0.02));

  ParamLayout wrong;
  wrong.add_block("bogus", {"bogus[1]"});
  CHECK_THROWS_AS(mean_jacobian(sc, mod, {}, wrong), std::out_of_range);
}
