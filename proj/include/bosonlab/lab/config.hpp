#pragma once

// Experiment configuration and its flat key = value file format.
//
// Grammar, one entry per line:
//
//   line    := blank | comment | entry
//   comment := '#' anything
//   entry   := key ws* '=' ws* value ws* [comment]
//   key     := [a-z_][a-z0-9_]*
//
// Lists (n_list, profile_table) are comma-separated. Keys may appear at most
// once; unknown keys are rejected.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bosonlab/manybody.hpp"
#include "bosonlab/potential.hpp"

namespace bosonlab::lab {

struct ExperimentConfig {
  int d = 1;
  int points_per_axis = 32;
  std::vector<int> n_list{2, 3};
  std::optional<double> epsilon;  // a = N^{-epsilon}; takes precedence over `range`
  double range = 0.25;
  std::string profile = "bump";
  double v0 = 1.0;
  double radius = 0.25;
  std::vector<double> table_radii;  // tabulated profile only
  std::vector<double> table_values;
  double dt = 1e-3;
  double duration = 0.1;
  std::optional<double> snapshot_spacing;  // default 10 dt
  int k_max = 2;
  double beta = 1.0 / 16;
  double eta = 1.0 / 16;
  int family_size = 8;
  std::uint64_t seed = 0;
  double initial_amplitude = 0.5;
  std::size_t memory_budget = default_memory_budget;
  std::string output_dir = "bosonlab-out";

  PotentialProfile potential() const;
  double spacing() const { return snapshot_spacing.value_or(10.0 * dt); }
  double range_for(int particles) const;
  ManyBodyConfig manybody(int particles) const;

  /// Re-runs every module guard for every N. Throws PreconditionError.
  void validate() const;
  /// Sorted key = value lines with round-trip number formatting.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
  /// Hash over the keys that fix the dynamics (everything but the run length,
  /// snapshot and analysis settings). Checkpoints carry this one so that a
  /// run can be resumed to a later time.
  std::string dynamics_hash() const;
};

using ConfigEntries = std::map<std::string, std::string>;

ConfigEntries parse_config_text(const std::string& text);
ConfigEntries read_config_file(const std::string& path);
/// Applies entries on top of `base`; later sources override earlier ones.
ExperimentConfig apply_entries(ExperimentConfig base, const ConfigEntries& entries);
const std::vector<std::string>& config_keys();

}  // namespace bosonlab::lab
