// SPDX-License-Identifier: Apache-2.0

#include "uwbisac/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cctype>
#include <charconv>
#include <sstream>

namespace uwbisac {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (std::isspace(static_cast<unsigned char>(s.front())) || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (std::isspace(static_cast<unsigned char>(s.back())) || s.back() == '"')) s.remove_suffix(1);
  return s;
}

struct Suffix {
  std::string_view text;
  double scale;
};

constexpr Suffix kTime[] = {{"ps", 1e-12}, {"ns", 1e-9}, {"us", 1e-6}, {"ms", 1e-3}, {"s", 1.0}};
constexpr Suffix kFreq[] = {{"GHz", 1e9}, {"MHz", 1e6}, {"kHz", 1e3}, {"Hz", 1.0}};
constexpr Suffix kEnergy[] = {{"pJ", 1e-12}, {"nJ", 1e-9}, {"uJ", 1e-6}, {"mJ", 1e-3}, {"J", 1.0}};
constexpr Suffix kDb[] = {{"dB", 1.0}};
constexpr Suffix kAngle[] = {{"deg", kPi / 180.0}, {"rad", 1.0}};

template <std::size_t N>
double scale_for(std::string_view unit, const Suffix (&table)[N], std::string_view text) {
  for (const auto& s : table)
    if (unit == s.text) return s.scale;
  throw ConfigError("bad unit '" + std::string(unit) + "' in '" + std::string(text) + "'");
}

int parse_int(std::string_view text) {
  const double v = parse_quantity(text, Unit::None);
  if (v != std::floor(v)) throw ConfigError("expected an integer, got '" + std::string(text) + "'");
  return static_cast<int>(v);
}

}  // namespace

double parse_quantity(std::string_view text, Unit unit) {
  const std::string_view t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr == t.data()) throw ConfigError("cannot parse number '" + std::string(text) + "'");
  const std::string_view rest = trim(std::string_view(ptr, t.data() + t.size() - ptr));
  if (rest.empty()) return v;
  switch (unit) {
    case Unit::None: throw ConfigError("unexpected unit in '" + std::string(text) + "'");
    case Unit::Time: return v * scale_for(rest, kTime, text);
    case Unit::Frequency: return v * scale_for(rest, kFreq, text);
    case Unit::Energy: return v * scale_for(rest, kEnergy, text);
    case Unit::Decibel: return v * scale_for(rest, kDb, text);
    case Unit::Angle:
      if (rest == "pi") return v * kPi;
      return v * scale_for(rest, kAngle, text);
  }
  return v;
}

std::vector<double> parse_quantity_list(std::string_view text, Unit unit) {
  std::vector<double> out;
  std::string_view s = trim(text);
  while (!s.empty()) {
    const auto c = s.find(',');
    out.push_back(parse_quantity(s.substr(0, c), unit));
    if (c == std::string_view::npos) break;
    s.remove_prefix(c + 1);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  auto& sc = scenario;
  auto& m = modulation;
  if (key == "scenario.f_c") sc.f_c = parse_quantity(v, Unit::Frequency);
  else if (key == "scenario.t_f") sc.t_f = parse_quantity(v, Unit::Time);
  else if (key == "scenario.n_f") sc.n_f = parse_int(v);
  else if (key == "scenario.f_s") sc.f_s = parse_quantity(v, Unit::Frequency);
  else if (key == "scenario.sigma2") sc.sigma2 = parse_quantity(v, Unit::None);
  else if (key == "scenario.alpha") sc.pulse.alpha = parse_quantity(v, Unit::Time);
  else if (key == "scenario.e_tb") sc.pulse.e_tb = parse_quantity(v, Unit::Energy);
  else if (key == "scenario.paths") num_paths = parse_int(v);
  else if (key == "scenario.delays") delays = parse_quantity_list(v, Unit::Time);
  else if (key == "scenario.dopplers") dopplers = parse_quantity_list(v, Unit::Frequency);
  else if (key == "scenario.snr_db") snr_db = parse_quantity(v, Unit::Decibel);
  else if (key == "modulation.scheme") m.scheme = parse_scheme(v);
  else if (key == "modulation.decoupling") m.decoupling = parse_decoupling(v);
  else if (key == "modulation.xi_ppm") m.xi_ppm = parse_quantity(v, Unit::Time);
  else if (key == "modulation.xi_bpsk") m.xi_bpsk = parse_quantity(v, Unit::Angle);
  else if (key == "modulation.pilots") m.pilots = parse_int(v);
  else if (key == "modulation.data") data = parse_int(v);
  else if (key == "modulation.sfd_weight") m.sfd_weight = parse_quantity(v, Unit::None);
  else if (key == "sweep.preset") preset = std::string(v);
  else if (key == "sweep.axis") axis = parse_axis(v);
  else if (key == "sweep.start") start = parse_quantity(v, Unit::Decibel);
  else if (key == "sweep.stop") stop = parse_quantity(v, Unit::Decibel);
  else if (key == "sweep.step") step = parse_quantity(v, Unit::Decibel);
  else if (key == "sweep.fixed_pilots") fixed_pilots = parse_int(v);
  else if (key == "sweep.d_min") d_min = parse_int(v);
  else if (key == "sweep.d_max") d_max = parse_int(v);
  else if (key == "sweep.total") total = parse_int(v);
  else if (key == "sweep.snr_list") snr_list = parse_quantity_list(v, Unit::Decibel);
  else if (key == "sweep.outputs") {
    outputs.clear();
    std::string_view s = v;
    while (!s.empty()) {
      const auto c = s.find(',');
      outputs.push_back(parse_output(trim(s.substr(0, c))));
      if (c == std::string_view::npos) break;
      s.remove_prefix(c + 1);
    }
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

std::pair<ScenarioConfig, ModulationConfig> RunConfig::resolve() const {
  ScenarioConfig sc = scenario;
  if (num_paths < 1) throw ConfigError("scenario.paths must be >= 1");
  if (static_cast<int>(delays.size()) < num_paths) throw ConfigError("fewer delays than paths");
  if (!dopplers.empty() && static_cast<int>(dopplers.size()) < num_paths) throw ConfigError("fewer dopplers than paths");
  sc.paths.clear();
  for (int l = 0; l < num_paths; ++l) sc.paths.push_back({delays[l], dopplers.empty() ? 0.0 : dopplers[l], 0.0});
  sc = with_snr_db(sc, snr_db);

  ModulationConfig m = modulation;
  if (data) {
    m.data = *data;
  } else if (m.scheme == Scheme::SensingOnly) {
    m.data = 0;
  } else {
    m.data = sc.n_f - (m.decoupling == Decoupling::Pilot ? m.pilots : 0);
  }
  if (m.decoupling != Decoupling::Pilot) m.pilots = 0;
  sc.validate(m.max_delay_shift());
  m.validate(sc);
  return {sc, m};
}

std::vector<std::string> RunConfig::describe() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& k, auto v) {
    std::ostringstream os;
    os.precision(12);
    os << k << " = " << v;
    out.push_back(os.str());
  };
  auto join = [](const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(12);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
  };
  add("scenario.f_c", scenario.f_c);
  add("scenario.t_f", scenario.t_f);
  add("scenario.n_f", scenario.n_f);
  add("scenario.f_s", scenario.f_s);
  add("scenario.sigma2", scenario.sigma2);
  add("scenario.alpha", scenario.pulse.alpha);
  add("scenario.e_tb", scenario.pulse.e_tb);
  add("scenario.paths", num_paths);
  add("scenario.delays", join(delays));
  add("scenario.dopplers", dopplers.empty() ? std::string("0") : join(dopplers));
  add("scenario.snr_db", snr_db);
  add("modulation.scheme", to_string(modulation.scheme));
  add("modulation.decoupling", to_string(modulation.decoupling));
  add("modulation.xi_ppm", modulation.xi_ppm);
  add("modulation.xi_bpsk", modulation.xi_bpsk);
  add("modulation.pilots", modulation.pilots);
  add("modulation.data", data ? std::to_string(*data) : std::string("auto"));
  add("modulation.sfd_weight", modulation.sfd_weight);
  if (!preset.empty()) add("sweep.preset", preset);
  add("sweep.axis", to_string(axis));
  if (start) add("sweep.start", *start);
  if (stop) add("sweep.stop", *stop);
  if (step) add("sweep.step", *step);
  return out;
}

RunConfig load_config(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (section != "scenario" && section != "modulation" && section != "sweep")
      throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : body) cfg.set(section + "." + key, value.get_value<std::string>());
  }
  return cfg;
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& key_values) {
  for (const auto& kv : key_values) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value: '" + kv + "'");
    cfg.set(trim(std::string_view(kv).substr(0, eq)), std::string_view(kv).substr(eq + 1));
  }
}

}  // namespace uwbisac
