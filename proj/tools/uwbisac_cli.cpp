// SPDX-License-Identifier: Apache-2.0
//
// uwbisac: bounds, sweeps, crossover and frontier studies, oracle validation.
//
// Exit codes: 0 success, 1 runtime or oracle failure, 2 configuration error,
// 3 singular FIM without decoupling.

#include <CLI11.hpp>

#include "uwbisac/bounds.hpp"
#include "uwbisac/config.hpp"
#include "uwbisac/experiments.hpp"
#include "uwbisac/kernels.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace uwbisac;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSingular = 3;

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  int workers = 1;
  double tol = kDefaultRankTol;
  std::string preset;
  std::string command_line;
};

RunConfig load(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  apply_overrides(cfg, o.sets);
  if (!o.preset.empty()) cfg.preset = o.preset;
  return cfg;
}

std::vector<std::string> provenance(const Options& o, const RunConfig& cfg) {
  std::vector<std::string> p{"uwbisac " + o.command_line};
  for (auto& l : cfg.describe()) p.push_back(l);
  return p;
}

// Writes to <out>/<name> or stdout when no output directory was given.
template <class F>
void emit(const Options& o, const std::string& name, F&& write) {
  if (o.out.empty()) {
    write(std::cout);
    return;
  }
  std::filesystem::create_directories(o.out);
  const auto path = std::filesystem::path(o.out) / name;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  write(f);
  std::cerr << "wrote " << path.string() << "\n";
}

void print_coupling(const LabeledMatrix& fim, const CrlbReport& rep) {
  const auto names = fim.layout.names();
  for (auto [i, j] : rep.coupled_columns)
    std::cout << "coupled: " << names[i] << " ~ " << names[j] << "\n";
  const auto s = singularity_report(fim);
  for (auto z : s.zero_columns) std::cout << "no information: " << names[z] << "\n";
}

int cmd_bounds(const Options& o) {
  const RunConfig cfg = load(o);
  const auto [sc, mod] = cfg.resolve();
  const auto fim = assemble_theta_fim(sc, mod);
  const auto rep = crlb_report(fim, o.tol);
  const auto reg = check_regulatory(sc.pulse, sc);

  std::cout << std::setprecision(8);
  for (const auto& l : provenance(o, cfg)) std::cout << "# " << l << "\n";
  std::cout << "configuration: " << to_string(mod.scheme) << " / " << to_string(mod.decoupling) << ", L = "
            << sc.num_paths() << ", N_f = " << sc.n_f << ", pilots = " << mod.pilots << ", data = " << mod.data << "\n";
  std::cout << "effective bandwidth: " << reg.bandwidth / 1e6 << " MHz (" << (reg.bandwidth_ok ? "ok" : "below 500 MHz")
            << ")\n";
  std::cout << "regulatory energy: " << reg.energy_per_ms * 1e9 << " nJ/ms of " << reg.energy_limit * 1e9 << " ("
            << (reg.energy_ok ? "pass" : "FAIL") << ")\n";
  std::cout << "rank: " << rep.rank << " of " << fim.data.rows() << ", min singular value ratio " << rep.min_sv_ratio
            << "\n";
  std::cout << "singular: " << (rep.singular ? "yes" : "no") << "\n";
  if (rep.singular) print_coupling(fim, rep);
  for (std::size_t i = 0; i < rep.names.size(); ++i) {
    std::cout << "crlb " << rep.names[i] << ": ";
    if (rep.crlb[i]) {
      std::cout << *rep.crlb[i] << "\n";
    } else {
      std::cout << "unidentifiable\n";
    }
  }
  if (rep.range_crlb) std::cout << "root range crlb: " << std::sqrt(*rep.range_crlb) << " m\n";
  if (auto f = rep.value("fd1")) std::cout << "root doppler crlb: " << std::sqrt(*f) << " Hz\n";
  std::cout << "rate: " << data_rate(mod, sc) << " b/s\n";
  if (mod.scheme == Scheme::Ppm && mod.decoupling == Decoupling::Pilot && mod.data >= 1)
    std::cout << "comm efim (dtau_q): " << comm_efim_ppm(sc, mod) << "\n";
  return rep.singular && mod.decoupling == Decoupling::None ? kExitSingular : 0;
}

int cmd_sweep(const Options& o) {
  const RunConfig cfg = load(o);
  SweepSpec spec;
  std::string name;
  const auto [sc, mod] = cfg.resolve();
  if (!cfg.preset.empty()) {
    spec = preset_spec(cfg.preset, sc);
    name = cfg.preset;
  } else {
    spec.axis = cfg.axis;
    spec.outputs = cfg.outputs;
    spec.curves = {{to_string(mod.scheme) + "_" + to_string(mod.decoupling), sc, mod}};
    name = to_string(cfg.axis);
  }
  if (cfg.start) spec.start = *cfg.start;
  if (cfg.stop) spec.stop = *cfg.stop;
  if (cfg.step) spec.step = *cfg.step;
  auto table = run_sweep(spec, o.workers);
  auto prov = provenance(o, cfg);
  prov.insert(prov.end(), table.provenance.begin(), table.provenance.end());
  table.provenance = prov;
  emit(o, "sweep_" + name + ".csv", [&](std::ostream& os) { write_csv(table, os); });
  int errors = 0;
  for (const auto& r : table.rows) errors += r.error.empty() ? 0 : 1;
  if (errors) std::cerr << errors << " sweep rows reported errors\n";
  return 0;
}

int cmd_crossover(const Options& o) {
  const RunConfig cfg = load(o);
  auto [sc, mod] = cfg.resolve();
  (void)mod;
  std::ostringstream csv;
  for (const auto& l : provenance(o, cfg)) csv << "# " << l << "\n";
  csv << "snr_db,d_data,root_range_differential_m,root_range_pilot_m\n" << std::setprecision(10);
  std::optional<int> first;
  bool invariant = true;
  for (std::size_t k = 0; k < cfg.snr_list.size(); ++k) {
    const double snr = cfg.snr_list[k];
    const auto r = find_crossover(cfg.fixed_pilots, cfg.d_min, cfg.d_max, with_snr_db(sc, snr));
    for (std::size_t i = 0; i < r.d_values.size(); ++i)
      csv << snr << ',' << r.d_values[i] << ',' << r.arm_a[i] << ',' << r.arm_b[i] << '\n';
    std::cout << "snr " << snr << " dB: ";
    if (r.crossing) {
      std::cout << "differential beats " << cfg.fixed_pilots << "-pilot framing from " << *r.crossing
                << " data pulses\n";
    } else {
      std::cout << "no crossing in [" << cfg.d_min << ", " << cfg.d_max << "]\n";
    }
    if (k == 0) {
      first = r.crossing;
    } else if (r.crossing != first) {
      invariant = false;
    }
  }
  std::cout << "crossover SNR-invariant: " << (invariant ? "yes" : "no") << "\n";
  if (!o.out.empty()) emit(o, "crossover.csv", [&](std::ostream& os) { os << csv.str(); });
  return 0;
}

int cmd_pareto(const Options& o) {
  const RunConfig cfg = load(o);
  // the frontier walks every pilot split of `total` pulses itself
  if (cfg.modulation.scheme == Scheme::SensingOnly) throw ConfigError("pareto needs modulation.scheme ppm or bpsk");
  RunConfig frame = cfg;
  frame.scenario.n_f = cfg.total;
  frame.modulation.decoupling = Decoupling::Pilot;
  frame.modulation.pilots = cfg.total;
  frame.data = 0;
  auto [sc, mod] = frame.resolve();
  const auto pts = pareto_frontier(sc, cfg.total, mod.scheme, cfg.snr_list);
  emit(o, "pareto_" + to_string(mod.scheme) + ".csv", [&](std::ostream& os) {
    for (const auto& l : provenance(o, cfg)) os << "# " << l << "\n";
    write_pareto_csv(pts, os);
  });
  return 0;
}

int cmd_validate(const Options& o) {
  const double tol10 = o.tol == kDefaultRankTol ? 0.02 : o.tol;
  bool ok = true;
  std::cout << std::setprecision(4);
  for (const auto& c : oracle_cases()) {
    for (auto [fs, tol] : {std::pair{10e9, tol10}, std::pair{100e9, tol10 / 10.0}}) {
      const auto r = run_oracle_case(c, fs, tol);
      ok = ok && r.pass;
      std::cout << (r.pass ? "PASS " : "FAIL ") << std::left << std::setw(16) << c.label << " f_s " << fs / 1e9
                << " GHz  max scaled diff " << r.max_scaled_diff << " (tol " << tol << ")  " << r.seconds << " s\n";
    }
  }
  std::cout << (ok ? "oracle suite passed\n" : "oracle suite FAILED\n");
  return ok ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UWB sensing/communication Cramer-Rao bound toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  for (int i = 1; i < argc; ++i) o.command_line += (i > 1 ? " " : "") + std::string(argv[i]);

  app.add_option("--config", o.config, "INI file with [scenario], [modulation], [sweep]")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory for CSV files (stdout when omitted)");
  app.add_option("--set", o.sets, "override key=value, e.g. scenario.n_f=16 (repeatable)");
  app.add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--tol", o.tol, "rank tolerance (validate: oracle tolerance at 10 GHz)")
      ->check(CLI::PositiveNumber);

  auto* bounds = app.add_subcommand("bounds", "FIM rank and CRLBs for one configuration");
  auto* sweep = app.add_subcommand("sweep", "sweep an axis and write CSV");
  sweep->add_option("--preset", o.preset, "ranging, doppler or data_assist");
  auto* crossover = app.add_subcommand("crossover", "pilot versus differential crossover in data pulses");
  auto* pareto = app.add_subcommand("pareto", "rate versus ranging CRLB over pilot ratios");
  auto* validate = app.add_subcommand("validate", "analytic versus numeric FIM oracle suite");

  CLI11_PARSE(app, argc, argv);
  set_threads(o.workers);

  try {
    if (*bounds) return cmd_bounds(o);
    if (*sweep) return cmd_sweep(o);
    if (*crossover) return cmd_crossover(o);
    if (*pareto) return cmd_pareto(o);
    if (*validate) return cmd_validate(o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CoupledParametersError& e) {
    std::cerr << "singular: " << e.what() << "\n";
    return kExitSingular;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
