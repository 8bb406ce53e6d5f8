#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "relkac/estimator.hpp"
#include "relkac/fields.hpp"
#include "relkac/lattice.hpp"

namespace relkac {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

// Fully resolved run configuration. Every field carries its default, and
// to_json() echoes the lot so artifacts are self-describing.
struct RunConfig {
  std::string command = "estimate";
  std::uint64_t seed = kDefaultSeed;

  // physics
  int dim = 1;
  double mass = 1.0;
  double t = 0.5;
  std::vector<double> x;  // evaluation point, zeros by default

  // vector potential
  std::string field = "zero";
  double field_amp = 1.0;                          // tanh
  std::vector<double> field_a;                     // constant
  std::vector<std::vector<double>> field_matrix;   // linear
  double field_b = 0.5;                            // constant_field
  int field_component = 0, field_source = 0;       // quadratic_axis
  double field_coef = 1.0;

  // scalar potential
  std::string potential = "zero";
  double v_omega = 1.0, v_cap = 10.0;   // harmonic_capped
  double v_depth = 1.0, v_width = 1.0;  // gaussian_well

  // initial datum
  std::string probe = "gaussian";
  std::vector<double> probe_center;
  double probe_width = 1.0;
  double probe_radius = 2.0;
  std::vector<double> probe_k;

  // Monte Carlo
  std::string variant = "h1";
  std::string form = "sliced";
  std::int64_t paths = 200000;
  int slices = 64;
  double cutoff = 0.1;
  int brownian_steps = 512;
  bool control = true;

  // lattice; 0 picks a dimension default (256/32, 64/16, 16/8 for d = 1, 2, 3)
  int grid_n = 0;
  double grid_length = 0.0;

  // kernel table
  double kernel_y_min = 0.05, kernel_y_max = 5.0;
  int kernel_points = 100;
  std::vector<double> kernel_times{0.1, 0.5, 1.0};

  // path dump and charfn table
  std::string sampler = "subordinated";
  std::int64_t sample_paths = 4;
  int sample_slices = 32;
  double sample_cutoff = 0.05;
  bool check_charfn = false;
  std::vector<double> charfn_xi{0.0, 0.5, 1.0, 2.0};
  std::int64_t charfn_paths = 100000;

  // verify
  std::string suite;
  bool all = false;

  // artifacts; empty means stdout
  std::string output_json;
  std::string output_csv;

  MassDim mass_dim() const { return {mass, dim}; }
  Point point() const;
  FieldSpec field_spec() const;
  ProbeFunction probe_function() const;
  McParams mc_params() const;
  Lattice lattice() const;
  nlohmann::json to_json() const;
};

// Reads a configuration document: TOML when the path ends in .toml, JSON
// otherwise. Parse errors raise ConfigError.
nlohmann::json read_config_file(const std::string& path);

// Validates the document against the schema and resolves defaults. All
// diagnostics are collected into a single ConfigError.
RunConfig load_config(const nlohmann::json& doc);

}  // namespace relkac
