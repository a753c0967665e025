// SPDX-License-Identifier: Apache-2.0

#include "uwbisac/signal_mean.hpp"

#include <cmath>

namespace uwbisac {

namespace {

using cd = std::complex<double>;

void check_bits(std::span<const int> bits, int n_f) {
  if (bits.empty()) return;
  if (static_cast<int>(bits.size()) != n_f) throw ConfigError("bits length must equal n_f");
  for (int b : bits)
    if (b != 0 && b != 1) throw ConfigError("bits must be 0 or 1");
}

double carrier_phase(const PathState& p, const ScenarioConfig& sc, int k) {
  return 2.0 * kPi * (p.doppler * k * sc.t_f - sc.f_c * p.tau0);
}

bool is_pilot(const ModulationConfig& mod, int k) {
  return mod.decoupling == Decoupling::Pilot && k < mod.pilots;
}

int bit_at(const ModulationConfig& mod, std::span<const int> bits, int k) {
  if (mod.scheme == Scheme::SensingOnly || is_pilot(mod, k)) return 0;
  return bits.empty() ? 1 : bits[k];
}

void check_slot_support(const ScenarioConfig& sc, double delay) {
  const double half = kSupportHalfWidth * sc.pulse.alpha;
  if (delay - half < 0.0 || delay + half >= sc.t_f)
    throw LeakageError("modulated pulse support leaks outside the PRI");
}

}  // namespace

PhaseSequence phase_sequence(const PathState& path, const ScenarioConfig& sc,
                             const ModulationConfig& mod, std::span<const int> bits) {
  check_bits(bits, sc.n_f);
  if (mod.scheme == Scheme::Bpsk && bits.empty()) throw ConfigError("BPSK phase sequence needs bits");
  PhaseSequence d(sc.n_f);
  for (int k = 0; k < sc.n_f; ++k) {
    double phi = carrier_phase(path, sc, k);
    if (mod.scheme == Scheme::Bpsk) phi -= mod.xi_bpsk * bits[k];
    d[k] = std::polar(1.0, phi);
  }
  return d;
}

ObservationModel observation_model(const ScenarioConfig& sc, const ModulationConfig& mod,
                                   std::span<const int> bits) {
  sc.validate(mod.max_delay_shift());
  mod.validate(sc);
  check_bits(bits, sc.n_f);
  if (mod.decoupling == Decoupling::Pilot && !bits.empty())
    for (int k = 0; k < mod.pilots; ++k)
      if (bits[k] != 0) throw ConfigError("pilot PRIs must carry bit 0");

  ObservationModel m;
  m.scenario = sc;
  m.modulation = mod;
  m.eta = eta_layout(sc, mod);
  m.n_s = sc.samples_per_pri();
  const int L = sc.num_paths();
  const int N = sc.n_f;
  const bool diff = mod.decoupling == Decoupling::Differential;
  const bool pilot = mod.decoupling == Decoupling::Pilot;
  m.blocks = N + (diff ? 1 : 0);
  const auto& e = m.eta;

  if (diff) {
    // SFD reference pulse: timing only, amplitude scaled so its information
    // is sfd_weight times that of one data pulse.
    for (int l = 0; l < L; ++l) {
      const auto& p = sc.paths[l];
      PulseSlot s;
      s.block = 0;
      s.path = l;
      s.delay = p.tau0;
      s.phase = carrier_phase(p, sc, 0);
      s.amp = std::sqrt(mod.sfd_weight) * p.amp;
      s.delay_param = e.block("t_ref").begin + l;
      m.slots.push_back(s);
    }
  }

  for (int k = 0; k < N; ++k) {
    const int q = bit_at(mod, bits, k);
    for (int l = 0; l < L; ++l) {
      const auto& p = sc.paths[l];
      PulseSlot s;
      s.block = k + (diff ? 1 : 0);
      s.path = l;
      s.delay = p.tau0;
      s.phase = carrier_phase(p, sc, k);
      s.amp = p.amp;
      if (mod.scheme == Scheme::Ppm && q == 1) s.delay = p.tau0 + mod.xi_ppm;
      if (mod.scheme == Scheme::Bpsk && q == 1) s.phase -= mod.xi_bpsk;
      check_slot_support(sc, s.delay);

      if (diff) {
        s.delay_param = e.block("t").begin + k * L + l;
        s.phase_param = e.block("phi").begin + k * L + l;
        s.amp_param = e.block("alpha").begin + l;
      } else if (pilot) {
        const bool pk = k < mod.pilots;
        s.delay_param = e.block(pk ? "tau_p" : "tau_d").begin + l;
        s.phase_param = pk ? e.block("phi_p").begin + k * L + l
                           : e.block("phi_d").begin + (k - mod.pilots) * L + l;
        s.amp_param = e.block(pk ? "alpha_p" : "alpha_d").begin + l;
      } else {
        s.delay_param = e.blocks()[0].begin + l;
        s.phase_param = e.blocks()[1].begin + k * L + l;
        s.amp_param = e.block("alpha").begin + l;
      }
      m.slots.push_back(s);
    }
  }
  return m;
}

Eigen::VectorXcd evaluate_mean(const ObservationModel& m, const Eigen::VectorXd& delta) {
  const bool perturbed = delta.size() != 0;
  if (perturbed && delta.size() != m.eta.size()) throw std::invalid_argument("delta size must match eta");
  const auto& sc = m.scenario;
  Eigen::VectorXcd mu = Eigen::VectorXcd::Zero(m.samples());
  for (const auto& s : m.slots) {
    double tau = s.delay, phi = s.phase, amp = s.amp;
    if (perturbed) {
      if (s.delay_param >= 0) tau += delta[s.delay_param];
      if (s.phase_param >= 0) phi += delta[s.phase_param];
      if (s.amp_param >= 0) amp += delta[s.amp_param];
    }
    const cd c = amp * std::polar(1.0, phi);
    const Eigen::Index off = static_cast<Eigen::Index>(s.block) * m.n_s;
    for (int k = 0; k < m.n_s; ++k) mu[off + k] += c * pulse_value(sc.pulse, k / sc.f_s - tau);
  }
  return mu;
}

MeanVector mean_vector(const ScenarioConfig& sc, const ModulationConfig& mod, std::span<const int> bits) {
  const auto m = observation_model(sc, mod, bits);
  return {evaluate_mean(m), m.n_s, m.blocks};
}

Eigen::MatrixXcd mean_jacobian(const ObservationModel& m) {
  const auto& sc = m.scenario;
  Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(m.samples(), m.eta.size());
  for (const auto& s : m.slots) {
    const cd rot = std::polar(1.0, s.phase);
    const Eigen::Index off = static_cast<Eigen::Index>(s.block) * m.n_s;
    for (int k = 0; k < m.n_s; ++k) {
      const double t = k / sc.f_s - s.delay;
      const double w = pulse_value(sc.pulse, t);
      if (s.delay_param >= 0) J(off + k, s.delay_param) += s.amp * rot * (-pulse_dt_value(sc.pulse, t));
      if (s.phase_param >= 0) J(off + k, s.phase_param) += cd(0.0, 1.0) * s.amp * rot * w;
      if (s.amp_param >= 0) J(off + k, s.amp_param) += rot * w;
    }
  }
  return J;
}

Eigen::MatrixXcd mean_jacobian(const ScenarioConfig& sc, const ModulationConfig& mod,
                               std::span<const int> bits, const ParamLayout& layout) {
  const auto m = observation_model(sc, mod, bits);
  for (const auto& n : layout.names()) m.eta.index_of(n);  // throws on unknown entries
  if (!(layout == m.eta)) throw std::out_of_range("layout does not match the configuration");
  return mean_jacobian(m);
}

}  // namespace uwbisac
