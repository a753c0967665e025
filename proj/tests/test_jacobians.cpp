// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "uwbisac/bounds.hpp"
#include "uwbisac/experiments.hpp"
#include "uwbisac/jacobians.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace uwbisac;
using doctest::Approx;

namespace {

Eigen::Index rank_of(const Eigen::MatrixXd& m) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-12);
  return qr.rank();
}

ScenarioConfig scene(int L, int N, double snr_db = 0.0) {
  auto sc = with_paths(table1_defaults(), L);
  sc.n_f = N;
  return with_snr_db(sc, snr_db);
}

}  // namespace

TEST_CASE("H and E") {
  const Eigen::MatrixXd h = h_matrix(3).dense();
  Eigen::MatrixXd expect(3, 3);
  expect << 1, 0, 0, 1, 1, 0, 1, 0, 1;
  CHECK(h == expect);
  CHECK(e_vector(3).dense() == Eigen::VectorXd::Ones(3));
  CHECK(h_matrix(1).dense() == Eigen::MatrixXd::Ones(1, 1));
  const Eigen::VectorXd hte = h.transpose() * e_vector(3).dense();
  CHECK(hte == Eigen::Vector3d(3, 1, 1));
  CHECK(std::abs(h.determinant()) == 1.0);
  CHECK_THROWS(h_matrix(0));
}

TEST_CASE("undecoupled Jacobian shapes and ranks") {
  const double t_f = 100e-9;
  for (int L = 1; L <= 3; ++L)
    for (int N : {1, 2, 4}) {
      const auto js = jacobian({Scheme::SensingOnly, Decoupling::None}, L, N, 0, 0, t_f);
      CHECK(js.data.rows() == (N + 2) * L);
      CHECK(js.data.cols() == 3 * L);
      const auto jp = jacobian({Scheme::Ppm, Decoupling::None}, L, N, 0, 0, t_f);
      CHECK(jp.data.cols() == 3 * L + 1);
      if (N >= 2) {
        // the PPM shift column repeats the path-1 delay column
        CHECK(rank_of(jp.dense()) == jp.data.cols() - 1);
        CHECK(rank_of(js.dense()) == 3 * L);
        const auto jb = jacobian({Scheme::Bpsk, Decoupling::None}, L, N, 0, 0, t_f);
        CHECK(rank_of(jb.dense()) == jb.data.cols() - 1);
      } else {
        // a single PRI carries no Doppler information at all
        CHECK(rank_of(jp.dense()) == jp.data.cols() - 1 - L);
      }
    }
}

TEST_CASE("phase rows carry 2 pi k T_f H") {
  const double t_f = 100e-9;
  const int L = 3, N = 4;
  const auto j = jacobian({Scheme::SensingOnly, Decoupling::None}, L, N, 0, 0, t_f);
  const Eigen::MatrixXd d = j.dense();
  const Eigen::MatrixXd h = h_matrix(L).dense();
  const auto pb = j.rows.block("phi").begin, fd = j.cols.block("fd1").begin;
  for (int k = 0; k < N; ++k) {
    const Eigen::MatrixXd lk = d.block(pb + k * L, fd, L, L);
    CHECK((lk - 2.0 * kPi * k * t_f * h).cwiseAbs().maxCoeff() == 0.0);
  }
  const auto jb = jacobian({Scheme::Bpsk, Decoupling::None}, L, N, 0, 0, t_f);
  const auto q = jb.cols.index_of("phi_bpsk");
  for (int k = 0; k < N; ++k)
    CHECK(jb.dense()(jb.rows.block("phi_bpsk").begin + k * L, q) == Approx(2.0 * kPi * k * t_f));
}

TEST_CASE("differential maps") {
  const double t_f = 100e-9;
  for (int L = 1; L <= 3; ++L) {
    const auto one = differential_jacobians(L, 1, t_f);
    const Eigen::MatrixXd p1 = one.p_diff.dense();
    REQUIRE(p1.rows() == p1.cols());
    CHECK(std::abs(p1.determinant()) == Approx(1.0).epsilon(1e-14));
    for (int N : {2, 4, 8}) {
      const auto dj = differential_jacobians(L, N, t_f);
      const Eigen::MatrixXd p = dj.p_diff.dense();
      CHECK(p.rows() == (2 * N + 2) * L);
      CHECK(p.cols() == (3 * N + 1) * L);
      CHECK(rank_of(p) == p.rows());
      CHECK(dj.j_diff.data.cols() == 3 * L + 1);
      CHECK(rank_of(dj.j_diff.dense()) == 3 * L + 1);
    }
  }
  CHECK_THROWS(jacobian({Scheme::Bpsk, Decoupling::Differential}, 2, 4, 0, 0, t_f));
  CHECK_THROWS(jacobian({Scheme::Ppm, Decoupling::Pilot}, 2, 4, 1, 2, t_f));
}

TEST_CASE("chain rule on the numeric observation FIM matches the closed form") {
  struct Case {
    ModulationConfig mod;
    int L, N;
  };
  const std::vector<Case> cases{
      {ModulationConfig::sensing_only(), 2, 3},
      {ModulationConfig::ppm(4), 2, 4},
      {ModulationConfig::bpsk(4), 1, 4},
      {ModulationConfig::ppm(4, Decoupling::Pilot, 2), 2, 4},
      {ModulationConfig::bpsk(3, Decoupling::Pilot, 1), 2, 3},
      {ModulationConfig::ppm(3, Decoupling::Differential), 2, 3},
  };
  for (const auto& c : cases) {
    const auto sc = scene(c.L, c.N, 10.0);
    const auto n = observation_fim_numeric(sc, c.mod);
    SparseMatrix ns = n.data.sparseView();
    const auto chain = theta_fim_from_eta(ns, sc, c.mod);
    const auto closed = closed_form_theta_fim(sc, c.mod);
    CHECK(chain.layout == closed.layout);
    CHECK_MESSAGE(max_scaled_difference(chain.data, closed.data) < 0.02,
                  to_string(c.mod.scheme) << "/" << to_string(c.mod.decoupling));
    // analytic route is exact against the block pattern
    CHECK_NOTHROW(assemble_theta_fim(sc, c.mod));
  }
}

TEST_CASE("congruence dimension checks") {
  const auto h = h_matrix(2);
  CHECK_THROWS(congruence(h, Eigen::MatrixXd::Identity(3, 3)));
  const Eigen::MatrixXd a = Eigen::Vector2d(2.0, 5.0).asDiagonal();
  const Eigen::MatrixXd r = congruence(h, a);
  const Eigen::MatrixXd s = congruence(h, SparseMatrix(a.sparseView()));
  CHECK(r == s);
  CHECK(r(0, 0) == 7.0);
  CHECK(r(0, 1) == 5.0);
}
