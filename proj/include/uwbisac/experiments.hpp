// SPDX-License-Identifier: Apache-2.0
//
// Reference scenario, sweeps, crossover search, rate/ranging frontier and the
// analytic-vs-numeric oracle suite.

#pragma once

#include "uwbisac/bounds.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace uwbisac {

inline constexpr double kDefaultDelays[] = {20e-9, 40e-9, 60e-9};

double db_to_linear(double db);

// Reference system: alpha 0.2 ns, L = 3, f_s 10 GHz, T_f 100 ns,
// f_c 3993.6 MHz, paths at 20/40/60 ns with 0 dB SNR each, N_f = 8.
ScenarioConfig table1_defaults();

// Every path set to the same per-pulse SNR.
ScenarioConfig with_snr_db(ScenarioConfig sc, double snr_db);
// Keeps the first `L` paths.
ScenarioConfig with_paths(ScenarioConfig sc, int L);

double data_rate(const ModulationConfig& mod, const ScenarioConfig& sc);

struct PointMetrics {
  double root_range_m = std::numeric_limits<double>::quiet_NaN();
  double root_doppler_hz = std::numeric_limits<double>::quiet_NaN();
  double rate_bps = 0.0;
  double comm_efim = std::numeric_limits<double>::quiet_NaN();
  bool singular = false;
};

PointMetrics evaluate_point(const ScenarioConfig& sc, const ModulationConfig& mod);

enum class Axis { SnrDb, NFrames, Data, PilotRatio };
std::string to_string(Axis a);
Axis parse_axis(std::string_view s);

enum class Output { RootRange, RootDoppler, Rate, CommEfim };
std::string to_string(Output o);
Output parse_output(std::string_view s);

struct SweepCurve {
  std::string label;
  ScenarioConfig scenario;
  ModulationConfig modulation;
};

struct SweepSpec {
  Axis axis = Axis::SnrDb;
  double start = -10.0, stop = 30.0, step = 5.0;
  std::vector<SweepCurve> curves;
  std::vector<Output> outputs{Output::RootRange, Output::RootDoppler, Output::Rate};

  std::vector<double> values() const;
};

// Applies one axis value to a curve's configuration.
void apply_axis(Axis axis, double x, ScenarioConfig& sc, ModulationConfig& mod);

struct ResultRow {
  std::string curve;
  double x = 0.0;
  PointMetrics metrics;
  std::string error;  // empty on success
};

struct ResultTable {
  std::string axis;
  std::vector<Output> outputs;
  std::vector<ResultRow> rows;
  std::vector<std::string> provenance;
};

// Points run in parallel on up to `workers` threads; rows keep curve/axis order.
ResultTable run_sweep(const SweepSpec& spec, int workers = 1);
void write_csv(const ResultTable& t, std::ostream& os);

// Named comparisons reproducing the reference curve families.
SweepSpec preset_spec(std::string_view name, const ScenarioConfig& base);
std::vector<std::string> preset_names();

struct CrossoverResult {
  std::optional<int> crossing;  // first data count where arm A drops below arm B
  std::vector<int> d_values;
  std::vector<double> arm_a, arm_b;
};

CrossoverResult find_crossover(const std::function<double(int)>& arm_a, const std::function<double(int)>& arm_b,
                               int d_min, int d_max);

// Differential PPM (N_f = D) against pilot PPM with `fixed_pilots` pilots and D data.
CrossoverResult find_crossover(int fixed_pilots, int d_min, int d_max, const ScenarioConfig& sc);

struct ParetoPoint {
  double snr_db = 0.0;
  int pilots = 0, data = 0;
  double pilot_ratio = 0.0;
  double rate_bps = 0.0;
  double root_range_m = 0.0;
  bool on_frontier = false;
};

// Pilot-decoupled frames with `total` pulses swept over P = total .. 1.
std::vector<ParetoPoint> pareto_frontier(const ScenarioConfig& sc, int total, Scheme scheme,
                                         const std::vector<double>& snr_db);
void write_pareto_csv(const std::vector<ParetoPoint>& pts, std::ostream& os);

struct OracleCase {
  std::string label;
  int L = 1;
  int n_f = 1;
  Scheme scheme = Scheme::SensingOnly;
  Decoupling decoupling = Decoupling::None;
  int pilots = 0;
};

// Twelve configurations spanning L, N_f and the three schemes.
std::vector<OracleCase> oracle_cases();

struct OracleResult {
  std::string label;
  double f_s = 0.0;
  double max_scaled_diff = 0.0;
  double tol = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

ScenarioConfig oracle_scenario(const OracleCase& c, double f_s);
ModulationConfig oracle_modulation(const OracleCase& c);
OracleResult run_oracle_case(const OracleCase& c, double f_s, double tol);

}  // namespace uwbisac
