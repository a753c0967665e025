// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "uwbisac/config.hpp"

#include <cstdio>
#include <filesystem>
#include <algorithm>
#include <fstream>

using namespace uwbisac;
using doctest::Approx;

TEST_CASE("unit-suffixed quantities") {
  CHECK(parse_quantity("100ns", Unit::Time) == Approx(1e-7));
  CHECK(parse_quantity("\"100ns\"", Unit::Time) == Approx(1e-7));
  CHECK(parse_quantity(" 0.2 ns ", Unit::Time) == Approx(0.2e-9));
  CHECK(parse_quantity("3993.6MHz", Unit::Frequency) == Approx(3.9936e9));
  CHECK(parse_quantity("10 GHz", Unit::Frequency) == Approx(1e10));
  CHECK(parse_quantity("3.7pJ", Unit::Energy) == Approx(3.7e-12));
  CHECK(parse_quantity("-3dB", Unit::Decibel) == -3.0);
  CHECK(parse_quantity("1pi", Unit::Angle) == Approx(kPi));
  CHECK(parse_quantity("180deg", Unit::Angle) == Approx(kPi));
  CHECK(parse_quantity("1e-7", Unit::Time) == 1e-7);
  CHECK_THROWS_AS(parse_quantity("100 furlongs", Unit::Time), ConfigError);
  CHECK_THROWS_AS(parse_quantity("banana", Unit::Time), ConfigError);
  CHECK_THROWS_AS(parse_quantity("3ns", Unit::Frequency), ConfigError);
  CHECK_THROWS_AS(parse_quantity("3ns", Unit::None), ConfigError);
  const auto v = parse_quantity_list("20ns, 40ns,60 ns", Unit::Time);
  REQUIRE(v.size() == 3);
  CHECK(v[2] == Approx(60e-9));
}

TEST_CASE("defaults resolve to the reference system") {
  RunConfig cfg;
  const auto [sc, mod] = cfg.resolve();
  CHECK(sc.num_paths() == 3);
  CHECK(sc.paths[1].tau0 == Approx(40e-9));
  CHECK(received_snr(sc.paths[0], sc) == Approx(1.0));
  CHECK(mod.scheme == Scheme::SensingOnly);
  CHECK(mod.data == 0);
}

TEST_CASE("overrides") {
  RunConfig cfg;
  apply_overrides(cfg, {"modulation.scheme=ppm", "modulation.decoupling=pilot", "modulation.pilots=3",
                        "scenario.n_f=10", "scenario.snr_db=20dB", "scenario.paths=2"});
  const auto [sc, mod] = cfg.resolve();
  CHECK(mod.data == 7);
  CHECK(sc.num_paths() == 2);
  CHECK(received_snr(sc.paths[1], sc) == Approx(100.0));
  CHECK_THROWS_AS(apply_overrides(cfg, {"scenario.nope=1"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(cfg, {"scenario.n_f"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(cfg, {"scenario.n_f=2.5"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(cfg, {"modulation.scheme=qam"}), ConfigError);

  RunConfig bad;
  apply_overrides(bad, {"modulation.scheme=ppm", "modulation.decoupling=pilot", "modulation.pilots=20"});
  CHECK_THROWS_AS(bad.resolve(), ConfigError);
  RunConfig leak;
  apply_overrides(leak, {"scenario.delays=20ns,40ns,99ns"});
  CHECK_THROWS_AS(leak.resolve(), LeakageError);
}

TEST_CASE("config file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "uwbisac_test_config.ini";
  {
    std::ofstream f(path);
    f << "[scenario]\nt_f = \"100ns\"\nn_f = 16\nsnr_db = 10dB\n\n[modulation]\nscheme = bpsk\n"
         "decoupling = pilot\npilots = 4\n\n[sweep]\naxis = n_f\nstart = 2\nstop = 8\nstep = 2\n"
         "outputs = root_range_m, rate\n";
  }
  const auto cfg = load_config(path.string());
  CHECK(cfg.axis == Axis::NFrames);
  CHECK(cfg.outputs.size() == 2);
  CHECK(cfg.stop == 8.0);
  CHECK_FALSE(RunConfig{}.start.has_value());
  const auto [sc, mod] = cfg.resolve();
  CHECK(sc.n_f == 16);
  CHECK(mod.data == 12);
  CHECK(mod.scheme == Scheme::Bpsk);
  const auto lines = cfg.describe();
  CHECK(std::find(lines.begin(), lines.end(), "modulation.scheme = bpsk") != lines.end());

  {
    std::ofstream f(path);
    f << "[channel]\nfoo = 1\n";
  }
  CHECK_THROWS_AS(load_config(path.string()), ConfigError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path.string()), ConfigError);
}
