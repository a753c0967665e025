// SPDX-License-Identifier: Apache-2.0

#include "uwbisac/experiments.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace uwbisac {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

ScenarioConfig table1_defaults() {
  ScenarioConfig sc;
  sc.pulse.alpha = 0.2e-9;
  sc.pulse.e_tb = 3.7e-12;
  sc.f_c = 3993.6e6;
  sc.t_f = 100e-9;
  sc.f_s = 10e9;
  sc.n_f = 8;
  sc.sigma2 = 1.0;
  for (double tau : kDefaultDelays) sc.paths.push_back({tau, 0.0, 0.0});
  return with_snr_db(sc, 0.0);
}

ScenarioConfig with_snr_db(ScenarioConfig sc, double snr_db) {
  const double snr = db_to_linear(snr_db);
  for (auto& p : sc.paths) p.amp = amplitude_for_snr(snr, p.tau0, sc);
  return sc;
}

ScenarioConfig with_paths(ScenarioConfig sc, int L) {
  if (L < 1 || L > sc.num_paths()) throw ConfigError("path count outside the configured paths");
  sc.paths.resize(L);
  return sc;
}

double data_rate(const ModulationConfig& mod, const ScenarioConfig& sc) {
  const int total = mod.pilots + mod.data;
  if (mod.data == 0 || total == 0) return 0.0;
  return mod.data / (total * sc.t_f);
}

PointMetrics evaluate_point(const ScenarioConfig& sc, const ModulationConfig& mod) {
  PointMetrics m;
  const auto fim = assemble_theta_fim(sc, mod);
  const auto rep = crlb_report(fim);
  m.singular = rep.singular;
  if (rep.range_crlb) m.root_range_m = std::sqrt(*rep.range_crlb);
  if (auto f = rep.value("fd1")) m.root_doppler_hz = std::sqrt(*f);
  m.rate_bps = data_rate(mod, sc);
  if (mod.scheme == Scheme::Ppm && mod.decoupling == Decoupling::Pilot && mod.data >= 1)
    m.comm_efim = efim(fim, "dtau_q")(0, 0);
  return m;
}

std::string to_string(Axis a) {
  switch (a) {
    case Axis::SnrDb: return "snr_db";
    case Axis::NFrames: return "n_f";
    case Axis::Data: return "d_data";
    case Axis::PilotRatio: return "pilot_ratio";
  }
  return "?";
}

Axis parse_axis(std::string_view s) {
  if (s == "snr_db") return Axis::SnrDb;
  if (s == "n_f") return Axis::NFrames;
  if (s == "d_data") return Axis::Data;
  if (s == "pilot_ratio") return Axis::PilotRatio;
  throw ConfigError("unknown sweep axis '" + std::string(s) + "'");
}

std::string to_string(Output o) {
  switch (o) {
    case Output::RootRange: return "root_range_m";
    case Output::RootDoppler: return "root_doppler_hz";
    case Output::Rate: return "rate_bps";
    case Output::CommEfim: return "comm_efim";
  }
  return "?";
}

Output parse_output(std::string_view s) {
  if (s == "root_range_m" || s == "range") return Output::RootRange;
  if (s == "root_doppler_hz" || s == "doppler") return Output::RootDoppler;
  if (s == "rate_bps" || s == "rate") return Output::Rate;
  if (s == "comm_efim") return Output::CommEfim;
  throw ConfigError("unknown sweep output '" + std::string(s) + "'");
}

std::vector<double> SweepSpec::values() const {
  if (!(step > 0.0) || stop < start) throw ConfigError("sweep range must satisfy start <= stop, step > 0");
  std::vector<double> v;
  const long n = std::lround(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(start + i * step);
  return v;
}

void apply_axis(Axis axis, double x, ScenarioConfig& sc, ModulationConfig& mod) {
  const bool pilot = mod.decoupling == Decoupling::Pilot;
  const bool sensing = mod.scheme == Scheme::SensingOnly;
  switch (axis) {
    case Axis::SnrDb:
      sc = with_snr_db(sc, x);
      break;
    case Axis::NFrames: {
      const int n = static_cast<int>(std::lround(x));
      if (n < 1) throw ConfigError("n_f must be >= 1");
      if (pilot) {
        const double ratio = static_cast<double>(mod.pilots) / (mod.pilots + mod.data);
        mod.pilots = std::clamp(static_cast<int>(std::lround(ratio * n)), 1, n);
        mod.data = n - mod.pilots;
      } else if (!sensing) {
        mod.data = n;
      }
      sc.n_f = n;
      break;
    }
    case Axis::Data: {
      const int d = static_cast<int>(std::lround(x));
      if (d < 0) throw ConfigError("data count must be >= 0");
      if (sensing) throw ConfigError("sensing-only has no data axis");
      mod.data = d;
      sc.n_f = pilot ? mod.pilots + d : d;
      break;
    }
    case Axis::PilotRatio: {
      if (!pilot) throw ConfigError("pilot_ratio axis needs pilot decoupling");
      const int n = sc.n_f;
      mod.pilots = std::clamp(static_cast<int>(std::lround(x * n)), 1, n);
      mod.data = n - mod.pilots;
      break;
    }
  }
}

ResultTable run_sweep(const SweepSpec& spec, int workers) {
  const auto xs = spec.values();
  if (spec.curves.empty()) throw ConfigError("sweep needs at least one curve");
  ResultTable t;
  t.axis = to_string(spec.axis);
  t.outputs = spec.outputs;
  t.rows.resize(xs.size() * spec.curves.size());
  {
    std::ostringstream os;
    os << std::setprecision(12) << "axis " << t.axis << " from " << spec.start << " to " << spec.stop << " step "
       << spec.step;
    t.provenance.push_back(os.str());
  }
  for (const auto& c : spec.curves) {
    std::ostringstream os;
    os << std::setprecision(12) << "curve " << c.label << ": scheme=" << to_string(c.modulation.scheme)
       << " decoupling=" << to_string(c.modulation.decoupling) << " pilots=" << c.modulation.pilots
       << " data=" << c.modulation.data << " n_f=" << c.scenario.n_f << " t_f=" << c.scenario.t_f
       << " f_s=" << c.scenario.f_s << " f_c=" << c.scenario.f_c << " alpha=" << c.scenario.pulse.alpha
       << " sigma2=" << c.scenario.sigma2 << " paths=";
    for (std::size_t l = 0; l < c.scenario.paths.size(); ++l) {
      const auto& p = c.scenario.paths[l];
      os << (l ? ";" : "") << p.tau0 << "/" << p.doppler << "/" << p.amp;
    }
    t.provenance.push_back(os.str());
  }
  const long total = static_cast<long>(t.rows.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, workers))
  for (long i = 0; i < total; ++i) {
    const auto& c = spec.curves[i / xs.size()];
    auto& row = t.rows[i];
    row.curve = c.label;
    row.x = xs[i % xs.size()];
    try {
      ScenarioConfig sc = c.scenario;
      ModulationConfig mod = c.modulation;
      apply_axis(spec.axis, row.x, sc, mod);
      row.metrics = evaluate_point(sc, mod);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  return t;
}

void write_csv(const ResultTable& t, std::ostream& os) {
  for (const auto& p : t.provenance) os << "# " << p << '\n';
  os << "curve," << t.axis;
  for (auto o : t.outputs) os << ',' << to_string(o);
  os << ",singular,error\n";
  os << std::setprecision(10);
  for (const auto& r : t.rows) {
    os << r.curve << ',' << r.x;
    for (auto o : t.outputs) {
      double v = 0.0;
      switch (o) {
        case Output::RootRange: v = r.metrics.root_range_m; break;
        case Output::RootDoppler: v = r.metrics.root_doppler_hz; break;
        case Output::Rate: v = r.metrics.rate_bps; break;
        case Output::CommEfim: v = r.metrics.comm_efim; break;
      }
      os << ',';
      if (r.error.empty() && std::isfinite(v)) os << v;
    }
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    os << ',' << (r.metrics.singular ? 1 : 0) << ',' << err << '\n';
  }
}

namespace {

SweepCurve curve(std::string label, ScenarioConfig sc, int n_f, ModulationConfig mod) {
  sc.n_f = n_f;
  return {std::move(label), std::move(sc), mod};
}

}  // namespace

std::vector<std::string> preset_names() { return {"ranging", "doppler", "data_assist"}; }

SweepSpec preset_spec(std::string_view name, const ScenarioConfig& base) {
  SweepSpec s;
  s.axis = Axis::SnrDb;
  s.start = -10.0;
  s.stop = 30.0;
  s.step = 2.0;
  if (name == "ranging") {
    s.curves = {curve("sensing_8", base, 8, ModulationConfig::sensing_only()),
                curve("ppm_pilot_4+4", base, 8, ModulationConfig::ppm(8, Decoupling::Pilot, 4)),
                curve("bpsk_pilot_4+4", base, 8, ModulationConfig::bpsk(8, Decoupling::Pilot, 4)),
                curve("ppm_differential_8", base, 8, ModulationConfig::ppm(8, Decoupling::Differential))};
    s.outputs = {Output::RootRange};
  } else if (name == "doppler") {
    s.curves = {curve("sensing_2048", base, 2048, ModulationConfig::sensing_only()),
                curve("ppm_pilot_1024+1024", base, 2048, ModulationConfig::ppm(2048, Decoupling::Pilot, 1024)),
                curve("bpsk_pilot_1024+1024", base, 2048, ModulationConfig::bpsk(2048, Decoupling::Pilot, 1024)),
                curve("ppm_differential_2048", base, 2048, ModulationConfig::ppm(2048, Decoupling::Differential))};
    s.outputs = {Output::RootDoppler};
  } else if (name == "data_assist") {
    s.curves = {curve("pilot_only_1024", base, 1024, ModulationConfig::sensing_only()),
                curve("ppm_assisted_1024+1024", base, 2048, ModulationConfig::ppm(2048, Decoupling::Pilot, 1024)),
                curve("bpsk_assisted_1024+1024", base, 2048, ModulationConfig::bpsk(2048, Decoupling::Pilot, 1024))};
    s.outputs = {Output::RootRange, Output::RootDoppler};
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return s;
}

CrossoverResult find_crossover(const std::function<double(int)>& arm_a, const std::function<double(int)>& arm_b,
                               int d_min, int d_max) {
  if (d_min > d_max) throw ConfigError("empty crossover range");
  CrossoverResult r;
  for (int d = d_min; d <= d_max; ++d) {
    const double a = arm_a(d), b = arm_b(d);
    r.d_values.push_back(d);
    r.arm_a.push_back(a);
    r.arm_b.push_back(b);
    if (!r.crossing && a < b) r.crossing = d;
  }
  return r;
}

CrossoverResult find_crossover(int fixed_pilots, int d_min, int d_max, const ScenarioConfig& sc) {
  if (fixed_pilots < 1) throw ConfigError("crossover needs at least one pilot");
  if (d_min < 1) throw ConfigError("crossover data range starts at 1");
  auto diff = [&](int d) {
    ScenarioConfig s = sc;
    s.n_f = d;
    return std::sqrt(range_crlb(assemble_theta_fim(s, ModulationConfig::ppm(d, Decoupling::Differential))));
  };
  auto pilot = [&](int d) {
    ScenarioConfig s = sc;
    s.n_f = fixed_pilots + d;
    return std::sqrt(range_crlb(assemble_theta_fim(s, ModulationConfig::ppm(s.n_f, Decoupling::Pilot, fixed_pilots))));
  };
  return find_crossover(diff, pilot, d_min, d_max);
}

namespace {
constexpr double kTieTol = 1e-12;
}

std::vector<ParetoPoint> pareto_frontier(const ScenarioConfig& sc, int total, Scheme scheme,
                                         const std::vector<double>& snr_db) {
  if (total < 1) throw ConfigError("total pulse count must be >= 1");
  if (scheme == Scheme::SensingOnly) throw ConfigError("frontier needs a data-carrying scheme");
  std::vector<ParetoPoint> out;
  for (double snr : snr_db) {
    ScenarioConfig s = with_snr_db(sc, snr);
    s.n_f = total;
    const std::size_t first = out.size();
    for (int p = total; p >= 1; --p) {
      auto mod = scheme == Scheme::Ppm ? ModulationConfig::ppm(total, Decoupling::Pilot, p)
                                       : ModulationConfig::bpsk(total, Decoupling::Pilot, p);
      ParetoPoint pt;
      pt.snr_db = snr;
      pt.pilots = p;
      pt.data = total - p;
      pt.pilot_ratio = static_cast<double>(p) / total;
      pt.rate_bps = data_rate(mod, s);
      pt.root_range_m = std::sqrt(range_crlb(assemble_theta_fim(s, mod)));
      out.push_back(pt);
    }
    // Non-dominated: no other point has higher-or-equal rate and lower-or-equal
    // error with one strict.
    for (std::size_t i = first; i < out.size(); ++i) {
      bool dominated = false;
      for (std::size_t j = first; j < out.size() && !dominated; ++j) {
        if (i == j) continue;
        const auto &a = out[i], &b = out[j];
        // equal-within-roundoff errors count as ties
        const bool no_worse = b.root_range_m <= a.root_range_m * (1.0 + kTieTol);
        const bool better = b.root_range_m < a.root_range_m * (1.0 - kTieTol);
        dominated = b.rate_bps >= a.rate_bps && no_worse && (b.rate_bps > a.rate_bps || better);
      }
      out[i].on_frontier = !dominated;
    }
  }
  return out;
}

void write_pareto_csv(const std::vector<ParetoPoint>& pts, std::ostream& os) {
  os << "snr_db,pilots,data,pilot_ratio,rate_bps,root_range_m,on_frontier\n" << std::setprecision(10);
  for (const auto& p : pts)
    os << p.snr_db << ',' << p.pilots << ',' << p.data << ',' << p.pilot_ratio << ',' << p.rate_bps << ','
       << p.root_range_m << ',' << (p.on_frontier ? 1 : 0) << '\n';
}

std::vector<OracleCase> oracle_cases() {
  using S = Scheme;
  return {
      {"sensing L1 N1", 1, 1, S::SensingOnly}, {"sensing L2 N2", 2, 2, S::SensingOnly},
      {"sensing L3 N4", 3, 4, S::SensingOnly}, {"sensing L3 N8", 3, 8, S::SensingOnly},
      {"ppm L1 N2", 1, 2, S::Ppm},             {"ppm L2 N4", 2, 4, S::Ppm},
      {"ppm L3 N8", 3, 8, S::Ppm},             {"ppm L3 N1", 3, 1, S::Ppm},
      {"bpsk L1 N4", 1, 4, S::Bpsk},           {"bpsk L2 N8", 2, 8, S::Bpsk},
      {"bpsk L3 N2", 3, 2, S::Bpsk},           {"bpsk L2 N1", 2, 1, S::Bpsk},
  };
}

ScenarioConfig oracle_scenario(const OracleCase& c, double f_s) {
  ScenarioConfig sc = table1_defaults();
  sc.f_s = f_s;
  sc.n_f = c.n_f;
  sc.paths.resize(c.L);
  // distinct Dopplers exercise the phase sequence
  for (int l = 0; l < c.L; ++l) sc.paths[l].doppler = 1e3 * (l + 1);
  return with_snr_db(sc, 20.0);
}

ModulationConfig oracle_modulation(const OracleCase& c) {
  switch (c.scheme) {
    case Scheme::SensingOnly: return ModulationConfig::sensing_only();
    case Scheme::Ppm: return ModulationConfig::ppm(c.n_f, c.decoupling, c.pilots);
    case Scheme::Bpsk: return ModulationConfig::bpsk(c.n_f, c.decoupling, c.pilots);
  }
  return {};
}

OracleResult run_oracle_case(const OracleCase& c, double f_s, double tol) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sc = oracle_scenario(c, f_s);
  const auto mod = oracle_modulation(c);
  const auto model = observation_model(sc, mod);
  const Eigen::MatrixXd analytic(observation_fim_analytic(model).data);
  const auto numeric = observation_fim_numeric(model);
  OracleResult r;
  r.label = c.label;
  r.f_s = f_s;
  r.tol = tol;
  r.max_scaled_diff = max_scaled_difference(analytic, numeric.data);
  r.pass = r.max_scaled_diff <= tol;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace uwbisac
