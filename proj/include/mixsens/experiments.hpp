#pragma once

#include <string>
#include <vector>

#include "mixsens/config.hpp"
#include "mixsens/gadget.hpp"
#include "mixsens/result_table.hpp"

namespace mixsens {

Provenance provenance_for(const ExperimentConfig& cfg);

/// Derived seed for one named sub-run.
std::uint64_t sub_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);

/// Throws when the spec exceeds the vertex cap or the estimated footprint
/// exceeds the memory cap.
void check_caps(const GadgetSpec& spec, const Caps& caps);

/// Geometric grid lo, lo*f, lo*f^2, ... up to hi (inclusive when hit).
std::vector<double> geometric_grid(double lo, double hi, double factor);

struct LowerCurve {
  std::vector<double> times;
  std::vector<std::uint64_t> in_event;
  std::vector<double> tv_lower;
  double pi_event = 0.0;
  std::size_t trials = 0;
  /// Largest grid time whose certified TV lower bound exceeds 1/4 (0 if none).
  double t_low = 0.0;
};

/// Event A = {root particle of H_1 lies in the gadget}; pi(A) = |gadget| / n.
LowerCurve root_event_lower_curve(const GadgetGraph& g, std::vector<double> times, std::size_t trials,
                                  double confidence, std::uint64_t seed);

GadgetGraph perturbed(const GadgetGraph& g, const std::string& kind, double delta);

struct SeparationResult {
  ResultTable table{"separation"};
  ResultTable exits{"separation_exit"};
  ResultTable lower{"mix_lower"};
  bool complete = true;
  std::string error;
};

SeparationResult run_separation_experiment(const ExperimentConfig& cfg);

ResultTable run_weighted_sweep(const ExperimentConfig& cfg);

struct ClockResult {
  ResultTable table{"clock"};
  ResultTable returns{"clock_returns"};
  bool pass = true;
  std::vector<std::string> failures;
};

ClockResult run_clock_experiment(const ExperimentConfig& cfg);

}  // namespace mixsens
