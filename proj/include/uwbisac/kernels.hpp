// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel kernels behind the numeric FIM. Each kernel has a serial
// reference twin; tests require both to agree bit-for-bit on the same input.

#pragma once

#include "uwbisac/signal_mean.hpp"

#include <Eigen/Dense>

namespace uwbisac {

enum class Exec { Serial, Parallel };

// G(i,j) = scale * Re{c_i^H c_j}, symmetric.
Eigen::MatrixXd gram_real_serial(const Eigen::MatrixXcd& cols, double scale);
Eigen::MatrixXd gram_real_parallel(const Eigen::MatrixXcd& cols, double scale);
Eigen::MatrixXd gram_real(const Eigen::MatrixXcd& cols, double scale, Exec exec);

// Central-difference columns of the mean: (mu(+h_p) - mu(-h_p)) / (2 h_p).
Eigen::MatrixXcd fd_columns_serial(const ObservationModel& m, const Eigen::VectorXd& steps);
Eigen::MatrixXcd fd_columns_parallel(const ObservationModel& m, const Eigen::VectorXd& steps);
Eigen::MatrixXcd fd_columns(const ObservationModel& m, const Eigen::VectorXd& steps, Exec exec);

int available_threads();
void set_threads(int n);

}  // namespace uwbisac
