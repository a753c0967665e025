// SPDX-License-Identifier: Apache-2.0

#include "uwbisac/fim.hpp"

#include <cmath>
#include <sstream>

namespace uwbisac {

SinglePulseInfo single_pulse_info(const ScenarioConfig& sc, int path, double amp) {
  const auto& p = sc.paths.at(path);
  const double B = effective_bandwidth(sc.pulse);
  const double e_in = pulse_energy_in_pri(sc.pulse, p.tau0, sc.t_f);
  // T_f f_s SNR with SNR = amp^2 e_in / (T_f sigma2)
  const double tfs_snr = sc.f_s * amp * amp * e_in / sc.sigma2;
  SinglePulseInfo s;
  s.tau = 4.0 * kPi * kPi * B * B * tfs_snr;
  s.phi = tfs_snr;
  s.alpha = sc.f_s * e_in / sc.sigma2;
  // d mu / d tau = -w', so the cross term carries a minus sign
  s.tau_alpha = -amp * sc.f_s * pulse_dw_w_in_pri(sc.pulse, p.tau0, sc.t_f) / sc.sigma2;
  return s;
}

SinglePulseInfo single_pulse_info(const ScenarioConfig& sc, int path) {
  return single_pulse_info(sc, path, sc.paths.at(path).amp);
}

double coeff_a_closed(int k0, int k1, double t_f) {
  const double D = k1 - k0;
  return kPi * t_f * D * (2.0 * k0 + D - 1.0);
}

double coeff_b_closed(int k0, int k1, double t_f) {
  auto s2 = [](double n) { return (n - 1.0) * n * (2.0 * n - 1.0); };  // 6 * sum_{k<n} k^2
  return 2.0 * kPi * kPi * t_f * t_f / 3.0 * (s2(k1) - s2(k0));
}

double coeff_a_sum(int k0, int k1, double t_f) {
  double a = 0.0;
  for (int k = k0; k < k1; ++k) a += 2.0 * kPi * k * t_f;
  return a;
}

double coeff_b_sum(int k0, int k1, double t_f) {
  double b = 0.0;
  for (int k = k0; k < k1; ++k) b += std::pow(2.0 * kPi * k * t_f, 2);
  return b;
}

ClosedFormBlocks closed_form_blocks(const ScenarioConfig& sc, int k0, int k1) {
  if (k1 <= k0) throw std::invalid_argument("empty PRI interval");
  if (k0 < 0 || k1 > sc.n_f) throw std::invalid_argument("PRI interval outside [0, n_f)");
  const int L = sc.num_paths();
  const double n = k1 - k0;
  ClosedFormBlocks c;
  c.k0 = k0;
  c.k1 = k1;
  c.lambda_tau.resize(L);
  c.lambda_phi.resize(L);
  c.lambda_alpha.resize(L);
  c.lambda_tau_alpha.resize(L);
  for (int l = 0; l < L; ++l) {
    const auto s = single_pulse_info(sc, l);
    c.lambda_tau[l] = n * s.tau;
    c.lambda_phi[l] = s.phi;
    c.lambda_alpha[l] = n * s.alpha;
    c.lambda_tau_alpha[l] = n * s.tau_alpha;
  }
  c.coeff_a = coeff_a_closed(k0, k1, sc.t_f);
  c.coeff_b = coeff_b_closed(k0, k1, sc.t_f);
  return c;
}

SparseLabeledMatrix observation_fim_analytic(const ObservationModel& m) {
  const auto& sc = m.scenario;
  sc.check_separation();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.slots.size() * 5);
  for (const auto& s : m.slots) {
    const auto info = single_pulse_info(sc, s.path, s.amp);
    if (s.delay_param >= 0) trip.emplace_back(s.delay_param, s.delay_param, info.tau);
    if (s.phase_param >= 0) trip.emplace_back(s.phase_param, s.phase_param, info.phi);
    if (s.amp_param >= 0) trip.emplace_back(s.amp_param, s.amp_param, info.alpha);
    if (s.delay_param >= 0 && s.amp_param >= 0 && info.tau_alpha != 0.0) {
      trip.emplace_back(s.delay_param, s.amp_param, info.tau_alpha);
      trip.emplace_back(s.amp_param, s.delay_param, info.tau_alpha);
    }
  }
  SparseMatrix f(m.eta.size(), m.eta.size());
  f.setFromTriplets(trip.begin(), trip.end());
  return {std::move(f), m.eta};
}

SparseLabeledMatrix observation_fim_analytic(const ScenarioConfig& sc, const ModulationConfig& mod) {
  return observation_fim_analytic(observation_model(sc, mod));
}

Eigen::VectorXd fd_step_vector(const ObservationModel& m, const FdSteps& steps) {
  const double alpha = m.scenario.pulse.alpha;
  if (!(steps.delay > 0.0) || steps.delay > 1e-2 * alpha)
    throw StepError("delay step must be in (0, 0.01 alpha]");
  if (!(steps.phase > 0.0) || steps.phase > 1e-2) throw StepError("phase step must be in (0, 0.01] rad");
  if (!(steps.amp_rel > 0.0) || steps.amp_rel > 1e-2) throw StepError("amplitude step must be in (0, 0.01]");
  Eigen::VectorXd h = Eigen::VectorXd::Constant(m.eta.size(), steps.delay);
  for (const auto& s : m.slots) {
    if (s.phase_param >= 0) h[s.phase_param] = steps.phase;
    if (s.amp_param >= 0) {
      const double a = m.scenario.paths[s.path].amp;
      h[s.amp_param] = steps.amp_rel * (a > 0.0 ? a : 1.0);
    }
  }
  return h;
}

LabeledMatrix observation_fim_numeric(const ObservationModel& m, const FdSteps& steps, Exec exec) {
  if (m.eta.size() > kNumericMaxParams || m.samples() > kNumericMaxSamples) {
    std::ostringstream os;
    os << "numeric FIM is a verification oracle: |eta| = " << m.eta.size() << " (max " << kNumericMaxParams
       << "), samples = " << m.samples() << " (max " << kNumericMaxSamples << ")";
    throw InstanceTooLarge(os.str());
  }
  const Eigen::VectorXd h = fd_step_vector(m, steps);
  const Eigen::MatrixXcd cols = fd_columns(m, h, exec);
  Eigen::MatrixXd g = gram_real(cols, fim_scale(m.scenario.sigma2), exec);
  g = 0.5 * (g + g.transpose()).eval();
  return {std::move(g), m.eta};
}

LabeledMatrix observation_fim_numeric(const ScenarioConfig& sc, const ModulationConfig& mod,
                                      const FdSteps& steps, Exec exec) {
  return observation_fim_numeric(observation_model(sc, mod), steps, exec);
}

double max_scaled_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor_rel) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("shape mismatch");
  const Eigen::VectorXd d = a.diagonal().cwiseAbs().cwiseMax(b.diagonal().cwiseAbs());
  const double floor = floor_rel * (d.size() ? d.maxCoeff() : 0.0);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double scale = std::max(std::sqrt(d[i] * d[j]), floor);
      const double diff = std::abs(a(i, j) - b(i, j));
      if (diff == 0.0) continue;
      worst = std::max(worst, scale > 0.0 ? diff / scale : INFINITY);
    }
  return worst;
}

}  // namespace uwbisac
