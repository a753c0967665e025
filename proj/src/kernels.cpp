// SPDX-License-Identifier: Apache-2.0

#include "uwbisac/kernels.hpp"

#include <omp.h>

namespace uwbisac {

namespace {

double re_dot(const Eigen::MatrixXcd& c, Eigen::Index i, Eigen::Index j) {
  // Re{a^H b} = sum(re_a re_b + im_a im_b), accumulated in fixed order.
  double acc = 0.0;
  const auto a = c.col(i);
  const auto b = c.col(j);
  for (Eigen::Index k = 0; k < c.rows(); ++k) acc += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
  return acc;
}

Eigen::VectorXcd fd_column(const ObservationModel& m, const Eigen::VectorXd& steps, Eigen::Index p) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(m.eta.size());
  d[p] = steps[p];
  const Eigen::VectorXcd up = evaluate_mean(m, d);
  d[p] = -steps[p];
  const Eigen::VectorXcd dn = evaluate_mean(m, d);
  return (up - dn) / (2.0 * steps[p]);
}

void check_steps(const ObservationModel& m, const Eigen::VectorXd& steps) {
  if (steps.size() != m.eta.size()) throw std::invalid_argument("one finite-difference step per eta entry");
  if ((steps.array() <= 0.0).any()) throw std::invalid_argument("finite-difference steps must be > 0");
}

}  // namespace

Eigen::MatrixXd gram_real_serial(const Eigen::MatrixXcd& cols, double scale) {
  const Eigen::Index n = cols.cols();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) g(i, j) = g(j, i) = scale * re_dot(cols, i, j);
  return g;
}

Eigen::MatrixXd gram_real_parallel(const Eigen::MatrixXcd& cols, double scale) {
  const Eigen::Index n = cols.cols();
  const Eigen::Index pairs = n * (n + 1) / 2;
  Eigen::MatrixXd g(n, n);
#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index q = 0; q < pairs; ++q) {
    // unrank q into (i, j), j >= i
    Eigen::Index i = 0, rem = q;
    while (rem >= n - i) {
      rem -= n - i;
      ++i;
    }
    const Eigen::Index j = i + rem;
    g(i, j) = g(j, i) = scale * re_dot(cols, i, j);
  }
  return g;
}

Eigen::MatrixXd gram_real(const Eigen::MatrixXcd& cols, double scale, Exec exec) {
  return exec == Exec::Parallel ? gram_real_parallel(cols, scale) : gram_real_serial(cols, scale);
}

Eigen::MatrixXcd fd_columns_serial(const ObservationModel& m, const Eigen::VectorXd& steps) {
  check_steps(m, steps);
  Eigen::MatrixXcd c(m.samples(), m.eta.size());
  for (Eigen::Index p = 0; p < m.eta.size(); ++p) c.col(p) = fd_column(m, steps, p);
  return c;
}

Eigen::MatrixXcd fd_columns_parallel(const ObservationModel& m, const Eigen::VectorXd& steps) {
  check_steps(m, steps);
  Eigen::MatrixXcd c(m.samples(), m.eta.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (Eigen::Index p = 0; p < m.eta.size(); ++p) c.col(p) = fd_column(m, steps, p);
  return c;
}

Eigen::MatrixXcd fd_columns(const ObservationModel& m, const Eigen::VectorXd& steps, Exec exec) {
  return exec == Exec::Parallel ? fd_columns_parallel(m, steps) : fd_columns_serial(m, steps);
}

int available_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
  if (n >= 1) omp_set_num_threads(n);
}

}  // namespace uwbisac
