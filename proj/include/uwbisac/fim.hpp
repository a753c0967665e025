// SPDX-License-Identifier: Apache-2.0
//
// Observation-level Fisher information, computed two independent ways:
// closed-form per-pulse elements and a finite-difference oracle on the mean.

#pragma once

#include "uwbisac/kernels.hpp"
#include "uwbisac/signal_mean.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace uwbisac {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct LabeledMatrix {
  Eigen::MatrixXd data;
  ParamLayout layout;
};

struct SparseLabeledMatrix {
  SparseMatrix data;
  ParamLayout layout;

  LabeledMatrix dense() const { return {Eigen::MatrixXd(data), layout}; }
};

// sigma2 is the per-quadrature variance, so 2/(2 sigma2) multiplies Re{.}.
inline double fim_scale(double sigma2) { return 1.0 / sigma2; }

// Information carried by one pulse of one path.
struct SinglePulseInfo {
  double tau = 0.0;        // s^-2
  double phi = 0.0;        // rad^-2
  double alpha = 0.0;      // per unit amplitude squared
  double tau_alpha = 0.0;  // cross term, zero for a centred Gaussian
};

// Single-pulse information of path `path` received with amplitude `amp`.
// In-PRI energy is taken at the path's first-PRI delay.
SinglePulseInfo single_pulse_info(const ScenarioConfig& sc, int path, double amp);
SinglePulseInfo single_pulse_info(const ScenarioConfig& sc, int path);

struct ClosedFormBlocks {
  int k0 = 0, k1 = 0;  // PRI interval [k0, k1)
  Eigen::VectorXd lambda_tau;        // per path, summed over the interval
  Eigen::VectorXd lambda_phi;        // per path, one PRI
  Eigen::VectorXd lambda_alpha;      // per path, summed over the interval
  Eigen::VectorXd lambda_tau_alpha;  // per path, summed over the interval
  double coeff_a = 0.0;  // sum of 2 pi k T_f
  double coeff_b = 0.0;  // sum of (2 pi k T_f)^2
};

double coeff_a_closed(int k0, int k1, double t_f);
double coeff_b_closed(int k0, int k1, double t_f);
double coeff_a_sum(int k0, int k1, double t_f);
double coeff_b_sum(int k0, int k1, double t_f);

ClosedFormBlocks closed_form_blocks(const ScenarioConfig& sc, int k0, int k1);

SparseLabeledMatrix observation_fim_analytic(const ObservationModel& m);
SparseLabeledMatrix observation_fim_analytic(const ScenarioConfig& sc, const ModulationConfig& mod);

struct FdSteps {
  double delay = 1e-13;   // s
  double phase = 1e-7;    // rad
  double amp_rel = 1e-7;  // relative to the path amplitude
};

Eigen::VectorXd fd_step_vector(const ObservationModel& m, const FdSteps& steps);

inline constexpr Eigen::Index kNumericMaxParams = 64;
inline constexpr Eigen::Index kNumericMaxSamples = 200'000;

class StepError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InstanceTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

LabeledMatrix observation_fim_numeric(const ObservationModel& m, const FdSteps& steps = {},
                                      Exec exec = Exec::Parallel);
LabeledMatrix observation_fim_numeric(const ScenarioConfig& sc, const ModulationConfig& mod,
                                      const FdSteps& steps = {}, Exec exec = Exec::Parallel);

// Largest |a - b| / max(sqrt(|a_ii a_jj|), floor) over all entries.
double max_scaled_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor_rel = 1e-12);

}  // namespace uwbisac
