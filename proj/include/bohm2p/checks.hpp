#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bohm2p/wavefunction.hpp"

namespace bohm2p {

/// Outcome of one property suite on one model.
struct CheckResult {
  std::string name;   // "<suite>/<model label>"
  bool passed = false;
  double measured = 0.0;   // worst error seen
  double threshold = 0.0;  // pass iff measured < threshold
  std::size_t samples = 0;
  std::string detail;
};

struct LabeledModel {
  std::string label;
  WaveModel model;
};

struct CheckOptions {
  bool fast = false;  // 100 points per model instead of 1000
  std::uint64_t seed = 20240101;
  /// Suites to run; empty runs none. Use all_check_suites() for everything.
  std::vector<std::string> suites;
  /// Flips the sign of the interference term in the closed-form velocity sum
  /// so the harness can confirm the cross-check detects it.
  bool mutate_velocity_sum_sign = false;
};

/// gradient-fd, velocity-fd, reflection-antisymmetry, exchange-covariance,
/// symmetry-plane, velocity-sum, gauge-invariance.
std::vector<std::string> all_check_suites();

/// One instance of every variant and composition, with parameters in the
/// regimes the scenarios use.
std::vector<LabeledModel> default_check_models();

/// Random non-node configuration points for `model`: x within three packet
/// widths of either slit centre, times spanning the model's natural scale.
std::vector<ConfigPoint> random_test_points(const WaveModel& model, std::size_t count,
                                            std::uint64_t seed);

/// Characteristic speed hbar / (m * length) at time t, used to make velocity
/// errors relative where the velocity itself may vanish.
double velocity_scale(const WaveModel& model, double t);

/// Throws InvalidArgument for an unknown suite name.
std::vector<CheckResult> run_property_checks(const CheckOptions& options,
                                             const std::vector<LabeledModel>& models);
std::vector<CheckResult> run_property_checks(const CheckOptions& options);

}  // namespace bohm2p
