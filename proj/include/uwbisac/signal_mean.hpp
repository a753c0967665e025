// SPDX-License-Identifier: Apache-2.0
//
// Noise-free complex mean of the received samples and its derivatives with
// respect to the observation parameters.

#pragma once

#include "uwbisac/core_model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace uwbisac {

using PhaseSequence = Eigen::VectorXcd;

struct MeanVector {
  Eigen::VectorXcd values;  // block-major: block b occupies [b*n_s, (b+1)*n_s)
  int n_s = 0;
  int blocks = 0;
};

// One received pulse of one path inside one sample block.
struct PulseSlot {
  int block = 0;
  int path = 0;
  double delay = 0.0;  // nominal PRI-relative delay, s
  double phase = 0.0;  // nominal carrier phase, rad
  double amp = 0.0;    // nominal amplitude
  // Observation parameter indices driving the slot; -1 marks a fixed quantity.
  Eigen::Index delay_param = -1;
  Eigen::Index phase_param = -1;
  Eigen::Index amp_param = -1;
};

// Pulse-slot description of one configuration: every mean vector and
// derivative is a sum over slots.
struct ObservationModel {
  ScenarioConfig scenario;
  ModulationConfig modulation;
  ParamLayout eta;
  std::vector<PulseSlot> slots;
  int blocks = 0;  // n_f, plus one leading SFD block for differential frames
  int n_s = 0;

  Eigen::Index samples() const { return static_cast<Eigen::Index>(blocks) * n_s; }
};

// `bits` has one entry per PRI, or is empty. Empty bits mean every data pulse
// carries bit 1, the convention the bound computations use.
ObservationModel observation_model(const ScenarioConfig& sc, const ModulationConfig& mod,
                                   std::span<const int> bits = {});

PhaseSequence phase_sequence(const PathState& path, const ScenarioConfig& sc,
                             const ModulationConfig& mod, std::span<const int> bits = {});

// Mean with eta perturbed by `delta` (empty = nominal).
Eigen::VectorXcd evaluate_mean(const ObservationModel& m, const Eigen::VectorXd& delta = {});

MeanVector mean_vector(const ScenarioConfig& sc, const ModulationConfig& mod,
                       std::span<const int> bits = {});

// Analytic d mu / d eta, one column per layout entry.
Eigen::MatrixXcd mean_jacobian(const ObservationModel& m);
Eigen::MatrixXcd mean_jacobian(const ScenarioConfig& sc, const ModulationConfig& mod,
                               std::span<const int> bits, const ParamLayout& layout);

}  // namespace uwbisac
