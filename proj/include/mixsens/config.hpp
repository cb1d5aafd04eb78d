#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mixsens {

struct Caps {
  std::size_t max_vertices = 20'000'000;
  std::size_t max_memory_mb = 4096;
};

struct SeparationConfig {
  std::string schedule = "desk";
  std::vector<int> us = {2, 3, 4};
  double eps = 0.2;
  double clique_mult = 4.0;
  std::string perturbation = "bridges";  // bridges | weights | none
  double delta = 2.0;
  std::string kernel = "reduced";
  std::size_t coupling_trials = 200;
  double quantile = 0.75;
  double confidence = 0.99;
  std::size_t lower_trials = 4000;
  double grid_lo = 0.05;  // multiples of t_up
  double grid_hi = 4.0;
  double grid_factor = 1.25;
  std::size_t traversal_trials = 1000;
  std::size_t exit_trials = 400;
};

struct SweepConfig {
  std::string schedule = "desk";
  int u = 3;
  double eps = 0.2;
  double clique_mult = 4.0;
  std::vector<double> deltas = {0.0, 0.5, 1.0, 2.0, 3.0};
  std::size_t trials = 2000;
};

struct ClockConfig {
  int m = 1;
  std::size_t starts = 20;
  std::size_t hitting_trials = 400;
  std::size_t p_even_trials = 200'000;
  std::vector<double> swap_boosts = {1.0, 2.0};
  std::uint64_t smoke_steps = 200'000;
};

struct VerifyConfig {
  std::vector<int> path_ns = {1, 2, 5, 10, 25};
  std::size_t split_graphs = 100;
  std::size_t tree_functions = 20;
  int tree_depth = 40;
  std::size_t cheeger_graphs = 200;
  std::size_t compare_pairs = 100;
  std::vector<double> exit_times = {1.0, 3.0, 10.0};
  bool corrupt_conductance = false;  // negative-control hook
};

/// Whole run description. Parsed from JSON; unknown keys and type mismatches
/// are reported with their JSON pointer and, for syntax errors, byte offset.
struct ExperimentConfig {
  std::string scenario = "verify";
  std::uint64_t seed = 1;
  std::string out_dir = "results";
  Caps caps;
  SeparationConfig separation;
  SweepConfig sweep;
  ClockConfig clock;
  VerifyConfig verify;

  /// Canonical JSON with every default filled in (sorted keys, no whitespace).
  std::string canonical() const;
  std::string hash() const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

}  // namespace mixsens
