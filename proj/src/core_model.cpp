// SPDX-License-Identifier: Apache-2.0

#include "uwbisac/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace uwbisac {

namespace {

std::string idx(std::string_view base, int l) {
  std::ostringstream os;
  os << base << '[' << l << ']';
  return os.str();
}

std::string idx2(std::string_view base, int k, int l) {
  std::ostringstream os;
  os << base << '[' << k << "][" << l << ']';
  return os.str();
}

std::vector<std::string> per_path(std::string_view base, int L) {
  std::vector<std::string> v;
  for (int l = 1; l <= L; ++l) v.push_back(idx(base, l));
  return v;
}

std::vector<std::string> per_pri_path(std::string_view base, int k0, int k1, int L) {
  std::vector<std::string> v;
  for (int k = k0; k < k1; ++k)
    for (int l = 1; l <= L; ++l) v.push_back(idx2(base, k, l));
  return v;
}

}  // namespace

void PulseShape::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("pulse alpha must be > 0");
  if (!(e_tb > 0.0) || !std::isfinite(e_tb)) throw ConfigError("pulse e_tb must be > 0");
}

int ScenarioConfig::samples_per_pri() const {
  return static_cast<int>(std::lround(t_f * f_s));
}

void ScenarioConfig::validate(double max_shift) const {
  pulse.validate();
  if (!(f_c > 0.0)) throw ConfigError("f_c must be > 0");
  if (!(t_f > 0.0)) throw ConfigError("t_f must be > 0");
  if (!(f_s > 0.0)) throw ConfigError("f_s must be > 0");
  if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be > 0");
  if (n_f < 1) throw ConfigError("n_f must be >= 1");
  if (paths.empty()) throw ConfigError("at least one path is required");
  if (samples_per_pri() < 1) throw ConfigError("t_f * f_s must round to >= 1 sample");
  const double half = kSupportHalfWidth * pulse.alpha;
  for (std::size_t l = 0; l < paths.size(); ++l) {
    const auto& p = paths[l];
    if (!(p.amp >= 0.0) || !std::isfinite(p.amp)) throw ConfigError("path amplitude must be >= 0");
    if (!std::isfinite(p.doppler)) throw ConfigError("path doppler must be finite");
    if (!(p.tau0 >= 0.0 && p.tau0 < t_f)) throw ConfigError("path delay must lie in [0, t_f)");
    if (p.tau0 - half < 0.0 || p.tau0 + max_shift + half >= t_f) {
      std::ostringstream os;
      os << "path " << l + 1 << " pulse support leaks outside the PRI";
      throw LeakageError(os.str());
    }
  }
}

void ScenarioConfig::check_separation() const {
  const double min_sep = kSupportHalfWidth * pulse.alpha;
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (std::size_t j = i + 1; j < paths.size(); ++j)
      if (std::abs(paths[i].tau0 - paths[j].tau0) < min_sep) {
        std::ostringstream os;
        os << "paths " << i + 1 << " and " << j + 1
           << " overlap; closed-form blocks need |tau_i - tau_j| >= 6 alpha (use the numeric FIM)";
        throw SeparationError(os.str());
      }
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::SensingOnly: return "sensing";
    case Scheme::Ppm: return "ppm";
    case Scheme::Bpsk: return "bpsk";
  }
  return "?";
}

std::string to_string(Decoupling d) {
  switch (d) {
    case Decoupling::None: return "none";
    case Decoupling::Pilot: return "pilot";
    case Decoupling::Differential: return "differential";
  }
  return "?";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "sensing" || s == "sensing_only" || s == "none") return Scheme::SensingOnly;
  if (s == "ppm") return Scheme::Ppm;
  if (s == "bpsk") return Scheme::Bpsk;
  throw ConfigError("unknown scheme '" + std::string(s) + "'");
}

Decoupling parse_decoupling(std::string_view s) {
  if (s == "none") return Decoupling::None;
  if (s == "pilot") return Decoupling::Pilot;
  if (s == "differential" || s == "diff") return Decoupling::Differential;
  throw ConfigError("unknown decoupling '" + std::string(s) + "'");
}

ModulationConfig ModulationConfig::sensing_only() { return {}; }

ModulationConfig ModulationConfig::ppm(int n_f, Decoupling dec, int pilots) {
  ModulationConfig m;
  m.scheme = Scheme::Ppm;
  m.decoupling = dec;
  m.pilots = dec == Decoupling::Pilot ? pilots : 0;
  m.data = n_f - m.pilots;
  return m;
}

ModulationConfig ModulationConfig::bpsk(int n_f, Decoupling dec, int pilots) {
  auto m = ppm(n_f, dec, pilots);
  m.scheme = Scheme::Bpsk;
  return m;
}

void ModulationConfig::validate(const ScenarioConfig& sc) const {
  if (pilots < 0 || data < 0) throw ConfigError("pilot and data counts must be >= 0");
  if (!(sfd_weight > 0.0)) throw ConfigError("sfd_weight must be > 0");
  if (scheme == Scheme::Ppm && !(xi_ppm > 0.0)) throw ConfigError("xi_ppm must be > 0");
  if (scheme == Scheme::Bpsk && !std::isfinite(xi_bpsk)) throw ConfigError("xi_bpsk must be finite");
  if (decoupling == Decoupling::Differential && scheme != Scheme::Ppm)
    throw ConfigError("differential decoupling requires PPM");
  switch (decoupling) {
    case Decoupling::None:
      if (scheme == Scheme::SensingOnly) {
        if (data != 0) throw ConfigError("sensing-only carries no data pulses");
      } else if (pilots != 0 || data != sc.n_f) {
        throw ConfigError("without decoupling every pulse carries data (pilots = 0, data = n_f)");
      }
      break;
    case Decoupling::Pilot:
      if (scheme == Scheme::SensingOnly) throw ConfigError("sensing-only takes no decoupling");
      if (pilots < 1) throw ConfigError("pilot decoupling needs at least one pilot");
      if (pilots + data != sc.n_f) throw ConfigError("pilots + data must equal n_f");
      break;
    case Decoupling::Differential:
      if (pilots != 0 || data != sc.n_f) throw ConfigError("differential frames use data = n_f, pilots = 0");
      break;
  }
}

void ParamLayout::add_block(std::string name, std::vector<std::string> entries) {
  if (has_block(name)) throw std::logic_error("duplicate block " + name);
  blocks_.push_back({std::move(name), size(), static_cast<Eigen::Index>(entries.size())});
  for (auto& e : entries) names_.push_back(std::move(e));
}

bool ParamLayout::has_block(std::string_view name) const {
  return std::any_of(blocks_.begin(), blocks_.end(), [&](const ParamBlock& b) { return b.name == name; });
}

const ParamBlock& ParamLayout::block(std::string_view name) const {
  for (const auto& b : blocks_)
    if (b.name == name) return b;
  throw std::out_of_range("unknown layout block '" + std::string(name) + "'");
}

Eigen::Index ParamLayout::index_of(std::string_view entry) const {
  auto it = std::find(names_.begin(), names_.end(), entry);
  if (it == names_.end()) throw std::out_of_range("unknown layout entry '" + std::string(entry) + "'");
  return it - names_.begin();
}

const std::string& ParamLayout::block_of(Eigen::Index i) const {
  for (const auto& b : blocks_)
    if (i >= b.begin && i < b.end()) return b.name;
  throw std::out_of_range("index outside layout");
}

ParamLayout theta_layout(int L, Scheme scheme) {
  if (L < 1) throw ConfigError("L must be >= 1");
  ParamLayout t;
  auto rel = [&](std::string_view base) {
    std::vector<std::string> v;
    for (int l = 2; l <= L; ++l) v.push_back(std::string(base) + std::to_string(l));
    return v;
  };
  t.add_block("tau1", {"tau1"});
  t.add_block("dtau", rel("dtau"));
  if (scheme == Scheme::Ppm) t.add_block("dtau_q", {"dtau_q"});
  t.add_block("fd1", {"fd1"});
  t.add_block("dfd", rel("dfd"));
  if (scheme == Scheme::Bpsk) t.add_block("phi_bpsk", {"phi_bpsk"});
  std::vector<std::string> a;
  for (int l = 1; l <= L; ++l) a.push_back("alpha" + std::to_string(l));
  t.add_block("alpha", a);
  return t;
}

ParamLayout eta_layout(const ScenarioConfig& sc, const ModulationConfig& mod) {
  const int L = sc.num_paths();
  const int N = sc.n_f;
  ParamLayout e;
  if (mod.decoupling == Decoupling::Differential) {
    e.add_block("t_ref", per_path("t_ref", L));
    e.add_block("t", per_pri_path("t", 0, N, L));
    e.add_block("phi", per_pri_path("phi", 0, N, L));
    e.add_block("alpha", per_path("alpha", L));
    return e;
  }
  if (mod.decoupling == Decoupling::Pilot) {
    const int P = mod.pilots;
    e.add_block("tau_p", per_path("tau_p", L));
    e.add_block("tau_d", per_path("tau_d", L));
    e.add_block("phi_p", per_pri_path("phi", 0, P, L));
    e.add_block("phi_d", per_pri_path("phi", P, N, L));
    e.add_block("alpha_p", per_path("alpha_p", L));
    e.add_block("alpha_d", per_path("alpha_d", L));
    return e;
  }
  switch (mod.scheme) {
    case Scheme::SensingOnly:
      e.add_block("tau", per_path("tau", L));
      e.add_block("phi", per_pri_path("phi", 0, N, L));
      break;
    case Scheme::Ppm:
      e.add_block("tau_ppm", per_path("tau_ppm", L));
      e.add_block("phi", per_pri_path("phi", 0, N, L));
      break;
    case Scheme::Bpsk:
      e.add_block("tau", per_path("tau", L));
      e.add_block("phi_bpsk", per_pri_path("phi_bpsk", 0, N, L));
      break;
  }
  e.add_block("alpha", per_path("alpha", L));
  return e;
}

ParamLayout varpi_layout(int L, int n_f) {
  ParamLayout v;
  std::vector<std::string> time;
  for (int k = 0; k < n_f; ++k) {
    for (int l = 1; l <= L; ++l) time.push_back(idx2("d", k, l));
    for (int l = 1; l <= L; ++l) time.push_back(idx2("t", k, l));
  }
  v.add_block("time", time);
  v.add_block("phi", per_pri_path("phi", 0, n_f, L));
  v.add_block("alpha", per_path("alpha", L));
  return v;
}

double pulse_value(const PulseShape& p, double t) {
  const double a = p.alpha;
  return std::sqrt(1.0 / (a * std::sqrt(kPi))) * std::exp(-t * t / (2.0 * a * a));
}

double pulse_dt_value(const PulseShape& p, double t) {
  return -t / (p.alpha * p.alpha) * pulse_value(p, t);
}

Eigen::VectorXd sample_pulse_on_grid(const PulseShape& p, double tau, int n, double f_s) {
  Eigen::VectorXd w(n);
  for (int k = 0; k < n; ++k) w[k] = pulse_value(p, k / f_s - tau);
  return w;
}

namespace {

void check_support(const PulseShape& p, double tau, const ScenarioConfig& sc) {
  if (!(tau >= 0.0 && tau < sc.t_f)) throw ConfigError("pulse delay must lie in [0, t_f)");
  const double half = kSupportHalfWidth * p.alpha;
  if (tau - half < 0.0 || tau + half >= sc.t_f)
    throw LeakageError("pulse support (+-6 alpha) leaks outside [0, t_f)");
}

}  // namespace

Eigen::VectorXd sample_pulse(const PulseShape& p, double tau, const ScenarioConfig& sc) {
  check_support(p, tau, sc);
  return sample_pulse_on_grid(p, tau, sc.samples_per_pri(), sc.f_s);
}

Eigen::VectorXd pulse_time_derivative(const PulseShape& p, double tau, const ScenarioConfig& sc) {
  check_support(p, tau, sc);
  const int n = sc.samples_per_pri();
  Eigen::VectorXd d(n);
  for (int k = 0; k < n; ++k) d[k] = -pulse_dt_value(p, k / sc.f_s - tau);
  return d;
}

double effective_bandwidth(const PulseShape& p) {
  if (!(p.alpha > 0.0)) throw ConfigError("pulse alpha must be > 0");
  return 1.0 / (2.0 * std::sqrt(2.0) * kPi * p.alpha);
}

double pulse_energy_in_pri(const PulseShape& p, double tau, double t_f) {
  return 0.5 * (std::erf((t_f - tau) / p.alpha) + std::erf(tau / p.alpha));
}

double pulse_dw_w_in_pri(const PulseShape& p, double tau, double t_f) {
  // integral of w'(t - tau) w(t - tau) over [0, t_f] = [w^2 / 2] at the ends
  const double a = pulse_value(p, t_f - tau);
  const double b = pulse_value(p, -tau);
  return 0.5 * (a * a - b * b);
}

double received_snr(const PathState& path, const ScenarioConfig& sc) {
  return path.amp * path.amp * pulse_energy_in_pri(sc.pulse, path.tau0, sc.t_f) / sc.t_f / sc.sigma2;
}

double amplitude_for_snr(double snr, double tau, const ScenarioConfig& sc) {
  if (!(snr >= 0.0)) throw ConfigError("SNR must be >= 0");
  return std::sqrt(snr * sc.t_f * sc.sigma2 / pulse_energy_in_pri(sc.pulse, tau, sc.t_f));
}

RegulatoryReport check_regulatory(const PulseShape& p, const ScenarioConfig& sc) {
  RegulatoryReport r;
  if (!(sc.t_f > 0.0) || !(p.alpha > 0.0)) return r;
  r.pulses_per_ms = 1e-3 / sc.t_f;
  r.energy_per_ms = p.e_tb * r.pulses_per_ms;
  // extended precision so the ceiling is the correctly rounded per-pulse limit
  r.per_pulse_ceiling = static_cast<double>(static_cast<long double>(r.energy_limit) * sc.t_f / 1e-3L);
  r.margin = r.energy_limit - r.energy_per_ms;
  r.energy_ok = p.e_tb <= r.per_pulse_ceiling;
  r.bandwidth = effective_bandwidth(p);
  r.bandwidth_ok = r.bandwidth >= kUwbMinBandwidth;
  r.passes = r.energy_ok && r.bandwidth_ok;
  return r;
}

}  // namespace uwbisac
