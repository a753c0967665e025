// SPDX-License-Identifier: Apache-2.0
//
// Structural maps from observation parameters to estimated parameters.

#pragma once

#include "uwbisac/fim.hpp"

namespace uwbisac {

// Rows index the inner parameters, columns the outer ones: data = d inner / d outer.
struct StructMatrix {
  SparseMatrix data;
  ParamLayout rows;
  ParamLayout cols;

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(data); }
};

StructMatrix h_matrix(int L);
StructMatrix e_vector(int L);

struct JacobianSelector {
  Scheme scheme = Scheme::SensingOnly;
  Decoupling decoupling = Decoupling::None;
};

// For Differential this is J_diff (varpi -> theta); see differential_jacobians.
StructMatrix jacobian(JacobianSelector sel, int L, int n_f, int p, int d, double t_f);
StructMatrix jacobian(const ScenarioConfig& sc, const ModulationConfig& mod);

struct DifferentialJacobians {
  StructMatrix p_diff;  // d eta_diff / d varpi
  StructMatrix j_diff;  // d varpi / d theta_ppm
};

DifferentialJacobians differential_jacobians(int L, int n_f, double t_f);

// J^T A J for sparse or dense A.
Eigen::MatrixXd congruence(const StructMatrix& j, const SparseMatrix& a);
Eigen::MatrixXd congruence(const StructMatrix& j, const Eigen::MatrixXd& a);

}  // namespace uwbisac
