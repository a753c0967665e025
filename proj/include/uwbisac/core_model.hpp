// SPDX-License-Identifier: Apache-2.0
//
// Domain records and scalar physical-layer quantities for pulse-based
// UWB sensing/communication bounds.

#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uwbisac {

inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kPi = std::numbers::pi;

// Pulse support used for leakage and separation checks, in units of alpha.
inline constexpr double kSupportHalfWidth = 6.0;

// Energy ceiling over any 1 ms window, joules.
inline constexpr double kRegulatoryEnergyPerMs = 37e-9;
inline constexpr double kUwbMinBandwidth = 500e6;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class LeakageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class SeparationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct PulseShape {
  double alpha = 0.2e-9;  // temporal spreading factor, s
  double e_tb = 3.7e-12;  // transmit energy per pulse, J

  void validate() const;
};

struct PathState {
  double tau0 = 0.0;     // delay in the first PRI, s
  double doppler = 0.0;  // Hz
  double amp = 1.0;      // real amplitude, includes sqrt(E_tb)
};

struct ScenarioConfig {
  double f_c = 3993.6e6;
  double t_f = 100e-9;
  int n_f = 1;
  double f_s = 10e9;
  double sigma2 = 1.0;  // per-quadrature noise variance per sample
  std::vector<PathState> paths;
  PulseShape pulse;

  int samples_per_pri() const;
  int num_paths() const { return static_cast<int>(paths.size()); }

  // Checks every invariant. `max_shift` is the largest modulation delay shift.
  void validate(double max_shift = 0.0) const;
  void check_separation() const;
};

enum class Scheme { SensingOnly, Ppm, Bpsk };
enum class Decoupling { None, Pilot, Differential };

std::string to_string(Scheme s);
std::string to_string(Decoupling d);
Scheme parse_scheme(std::string_view s);
Decoupling parse_decoupling(std::string_view s);

struct ModulationConfig {
  Scheme scheme = Scheme::SensingOnly;
  double xi_ppm = 20e-9;    // s
  double xi_bpsk = kPi;     // rad
  int pilots = 0;
  int data = 0;
  Decoupling decoupling = Decoupling::None;
  double sfd_weight = 1.0;  // information multiplier of the SFD reference pulse

  static ModulationConfig sensing_only();
  static ModulationConfig ppm(int n_f, Decoupling dec = Decoupling::None, int pilots = 0);
  static ModulationConfig bpsk(int n_f, Decoupling dec = Decoupling::None, int pilots = 0);

  double max_delay_shift() const { return scheme == Scheme::Ppm ? xi_ppm : 0.0; }
  void validate(const ScenarioConfig& sc) const;
};

struct ParamBlock {
  std::string name;
  Eigen::Index begin = 0;
  Eigen::Index size = 0;
  Eigen::Index end() const { return begin + size; }
};

// Ordered parameter names with named contiguous blocks.
class ParamLayout {
 public:
  void add_block(std::string name, std::vector<std::string> entries);

  Eigen::Index size() const { return static_cast<Eigen::Index>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  bool has_block(std::string_view name) const;
  const ParamBlock& block(std::string_view name) const;
  Eigen::Index index_of(std::string_view entry) const;
  // Name of the block holding entry i.
  const std::string& block_of(Eigen::Index i) const;

  bool operator==(const ParamLayout& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::vector<ParamBlock> blocks_;
};

// theta = [tau1, dtau(L-1), (dtau_q), fd1, dfd(L-1), (phi_bpsk), alpha(L)]
ParamLayout theta_layout(int L, Scheme scheme);
// Observation parameters for the configuration.
ParamLayout eta_layout(const ScenarioConfig& sc, const ModulationConfig& mod);
// Intermediate differential parameters: per PRI pair [d_k(L), t_k(L)], then phi, alpha.
ParamLayout varpi_layout(int L, int n_f);

// Raw Gaussian pulse and its time derivative.
double pulse_value(const PulseShape& p, double t);
double pulse_dt_value(const PulseShape& p, double t);

// Samples w(k/f_s - tau), k = 0..n-1, without any support check.
Eigen::VectorXd sample_pulse_on_grid(const PulseShape& p, double tau, int n, double f_s);

Eigen::VectorXd sample_pulse(const PulseShape& p, double tau, const ScenarioConfig& sc);
// d w(t - tau) / d tau sampled on the PRI grid.
Eigen::VectorXd pulse_time_derivative(const PulseShape& p, double tau, const ScenarioConfig& sc);

double effective_bandwidth(const PulseShape& p);

// Closed-form integrals over one PRI for a pulse centred at tau.
double pulse_energy_in_pri(const PulseShape& p, double tau, double t_f);
double pulse_dw_w_in_pri(const PulseShape& p, double tau, double t_f);

double received_snr(const PathState& path, const ScenarioConfig& sc);
// Amplitude giving the requested linear SNR at delay tau.
double amplitude_for_snr(double snr, double tau, const ScenarioConfig& sc);

struct RegulatoryReport {
  double pulses_per_ms = 0.0;
  double energy_per_ms = 0.0;
  double energy_limit = kRegulatoryEnergyPerMs;
  double per_pulse_ceiling = 0.0;
  double margin = 0.0;  // J per ms below the limit, negative when exceeded
  bool energy_ok = false;
  double bandwidth = 0.0;
  bool bandwidth_ok = false;
  bool passes = false;
};

RegulatoryReport check_regulatory(const PulseShape& p, const ScenarioConfig& sc);

}  // namespace uwbisac
