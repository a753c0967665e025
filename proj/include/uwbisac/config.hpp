// SPDX-License-Identifier: Apache-2.0
//
// INI-style run configuration with unit-suffixed values.
//
//   [scenario]  f_c, t_f, n_f, f_s, sigma2, alpha, e_tb, paths, delays,
//               dopplers, snr_db
//   [modulation] scheme, decoupling, xi_ppm, xi_bpsk, pilots, data, sfd_weight
//   [sweep]     axis, start, stop, step, outputs, preset, fixed_pilots,
//               d_min, d_max, total, snr_list

#pragma once

#include "uwbisac/experiments.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uwbisac {

enum class Unit { None, Time, Frequency, Energy, Decibel, Angle };

// "100ns" -> 1e-7, "3993.6 MHz" -> 3.9936e9. Bare numbers are SI.
double parse_quantity(std::string_view text, Unit unit);
std::vector<double> parse_quantity_list(std::string_view text, Unit unit);

struct RunConfig {
  ScenarioConfig scenario = table1_defaults();  // paths rebuilt by resolve()
  int num_paths = 3;
  std::vector<double> delays{std::begin(kDefaultDelays), std::end(kDefaultDelays)};
  std::vector<double> dopplers;
  double snr_db = 0.0;

  ModulationConfig modulation;
  std::optional<int> data;  // derived from the frame when unset

  std::string preset;
  Axis axis = Axis::SnrDb;
  // unset range keys fall back to the preset's or SweepSpec's range
  std::optional<double> start, stop, step;
  std::vector<Output> outputs{Output::RootRange, Output::RootDoppler, Output::Rate};
  int fixed_pilots = 4;
  int d_min = 1, d_max = 64;
  int total = 64;
  std::vector<double> snr_list{0.0, 10.0, 20.0};

  // key is "section.name"
  void set(std::string_view key, std::string_view value);
  // Scenario and modulation with derived fields filled in and validated.
  std::pair<ScenarioConfig, ModulationConfig> resolve() const;
  // Resolved key = value lines for provenance headers.
  std::vector<std::string> describe() const;
};

RunConfig load_config(const std::string& path);
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& key_values);

}  // namespace uwbisac
