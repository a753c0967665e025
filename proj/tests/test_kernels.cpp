// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "uwbisac/experiments.hpp"
#include "uwbisac/kernels.hpp"

#include <random>

using namespace uwbisac;

TEST_CASE("parallel Gram kernel reproduces the serial reference") {
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  for (int n : {1, 2, 5, 17, 33}) {
    Eigen::MatrixXcd c(301, n);
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = {g(rng), g(rng)};
    const auto s = gram_real_serial(c, 0.5);
    const auto p = gram_real_parallel(c, 0.5);
    CHECK(s == p);
    CHECK((s - s.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd ref = 0.5 * (c.adjoint() * c).real();
    CHECK((s - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("parallel finite-difference columns reproduce the serial reference") {
  auto sc = with_paths(table1_defaults(), 2);
  sc.n_f = 3;
  const auto m = observation_model(sc, ModulationConfig::ppm(3, Decoupling::Pilot, 1));
  const Eigen::VectorXd h = Eigen::VectorXd::Constant(m.eta.size(), 1e-13);
  CHECK(fd_columns_serial(m, h) == fd_columns_parallel(m, h));
  CHECK_THROWS(fd_columns_serial(m, Eigen::VectorXd::Zero(m.eta.size())));
  CHECK_THROWS(fd_columns_serial(m, Eigen::VectorXd::Ones(2)));
}

TEST_CASE("thread control") {
  CHECK(available_threads() >= 1);
  set_threads(1);
  CHECK(available_threads() == 1);
}
