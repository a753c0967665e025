// SPDX-License-Identifier: Apache-2.0
//
// Estimated-parameter FIM assembly, coupling diagnosis, EFIM and CRLBs.

#pragma once

#include "uwbisac/jacobians.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace uwbisac {

inline constexpr double kDefaultRankTol = 1e-10;

// Thrown when a nuisance block cannot be inverted because parameters are
// information-indistinguishable.
class CoupledParametersError : public std::runtime_error {
 public:
  CoupledParametersError(const std::string& what, std::vector<std::string> params)
      : std::runtime_error(what), params_(std::move(params)) {}
  const std::vector<std::string>& params() const { return params_; }

 private:
  std::vector<std::string> params_;
};

struct SingularityReport {
  bool singular = false;
  Eigen::Index rank = 0;
  double min_sv_ratio = 0.0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> coupled_columns;
  std::vector<Eigen::Index> zero_columns;
};

// Rank is decided on the diagonally equilibrated matrix D^-1/2 F D^-1/2, so
// parameters with very different units do not mask each other.
SingularityReport singularity_report(const Eigen::MatrixXd& fim, double tol = kDefaultRankTol);
inline SingularityReport singularity_report(const LabeledMatrix& fim, double tol = kDefaultRankTol) {
  return singularity_report(fim.data, tol);
}

// theta FIM from an observation FIM (any source) through the configuration's maps.
LabeledMatrix theta_fim_from_eta(const SparseMatrix& eta_fim, const ScenarioConfig& sc,
                                 const ModulationConfig& mod);
LabeledMatrix theta_fim_from_eta(const LabeledMatrix& eta_fim, const ScenarioConfig& sc,
                                 const ModulationConfig& mod);

// Block-pattern assembly from per-pulse closed forms.
LabeledMatrix closed_form_theta_fim(const ScenarioConfig& sc, const ModulationConfig& mod);

// J^T I_eta J from the analytic observation FIM; checked against the
// closed-form assembly to 1e-10 relative.
LabeledMatrix assemble_theta_fim(const ScenarioConfig& sc, const ModulationConfig& mod);

inline constexpr double kAssemblyTol = 1e-10;

Eigen::MatrixXd efim(const Eigen::MatrixXd& fim, const std::vector<Eigen::Index>& target,
                     const ParamLayout* layout = nullptr, double tol = kDefaultRankTol);
Eigen::MatrixXd efim(const LabeledMatrix& fim, std::string_view block, double tol = kDefaultRankTol);

// Scalar CRLB of a named entry: inverse of its EFIM.
double crlb(const LabeledMatrix& fim, std::string_view entry, double tol = kDefaultRankTol);
double range_crlb(const LabeledMatrix& fim, double tol = kDefaultRankTol);

struct CrlbReport {
  std::vector<std::string> names;
  std::vector<std::optional<double>> crlb;
  std::optional<double> range_crlb;  // m^2
  bool singular = false;
  Eigen::Index rank = 0;
  double min_sv_ratio = 0.0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> coupled_columns;

  std::optional<double> value(std::string_view entry) const;
};

// CRLBs of every identifiable parameter. When the matrix is singular,
// parameters in a singular connected block are left empty.
CrlbReport crlb_report(const LabeledMatrix& fim, double tol = kDefaultRankTol);

// EFIM of the PPM data shift with all sensing parameters as nuisance.
double comm_efim_ppm(const ScenarioConfig& sc, const ModulationConfig& mod);

// Zero every entry coupling a data difference d_k to a time entry of another
// PRI pair.
SparseMatrix apply_independence_zeroing(const SparseMatrix& varpi_fim, int L, int n_f);

struct DifferentialResult {
  SparseLabeledMatrix eta_fim;
  SparseLabeledMatrix varpi_fim_raw;
  SparseLabeledMatrix varpi_fim;
  LabeledMatrix theta_fim;
  CrlbReport report;
  // I_theta(tau1, dtau_q) and I_theta(dtau_q, dtau_q) in units of the summed
  // single-pulse delay information.
  double delay_data_multiplier = 0.0;
  double data_data_multiplier = 0.0;
};

DifferentialResult differential_pipeline(const ScenarioConfig& sc, const ModulationConfig& mod,
                                         double tol = kDefaultRankTol);

}  // namespace uwbisac
