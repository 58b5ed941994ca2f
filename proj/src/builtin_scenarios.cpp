#include "bohm2p/scenario.hpp"

namespace bohm2p {

namespace {

constexpr std::string_view kDifferentSlits = R"({
  "schema": "bohm2p/scenario/1",
  "name": "gaussian-different-slits",
  "description": "Symmetrized Gaussian packets from slits at x = +-10; each pair keeps its centre-of-mass line and the ensemble tracks |Psi|^2.",
  "model": {"type": "gaussian_slit", "sigma0": 1.0, "a": 10.0, "kx": 0.0, "ky": 1.0,
            "composition": "symmetrized"},
  "sampler": {"n_samples": 10000, "seed": 1, "burn_in": 5000, "thinning": 50},
  "time_grid": {"t_start": 0.0, "t_end": 10.0, "n_samples_along_t": 11},
  "regions": [
    {"name": "both_above", "r1": {"x": [0.0, null]}, "r2": {"x": [0.0, null]}},
    {"name": "split", "r1": {"x": [0.0, null]}, "r2": {"x": [null, 0.0]}}
  ],
  "histograms": {"coordinates": ["x1", "x2", "x1+x2"], "times": [0.0, 10.0], "bins": 60},
  "checks": [
    {"kind": "constraint_residual", "max": 1e-6, "min_fraction": 0.99},
    {"kind": "aborted_fraction", "max": 0.01},
    {"kind": "same_side_fraction", "name": "start_in_different_slits", "t": 0.0, "max": 1e-3},
    {"kind": "marginal_ks", "name": "ks_x1_t0", "coordinate": "x1", "t": 0.0},
    {"kind": "marginal_ks", "name": "ks_x2_t0", "coordinate": "x2", "t": 0.0},
    {"kind": "marginal_ks", "name": "ks_sum_t0", "coordinate": "x1+x2", "t": 0.0},
    {"kind": "marginal_ks", "name": "ks_x1_tf", "coordinate": "x1", "t": 10.0},
    {"kind": "marginal_ks", "name": "ks_x2_tf", "coordinate": "x2", "t": 10.0},
    {"kind": "marginal_ks", "name": "ks_sum_tf", "coordinate": "x1+x2", "t": 10.0}
  ]
})";

constexpr std::string_view kOverlap = R"({
  "schema": "bohm2p/scenario/1",
  "name": "gaussian-overlap",
  "description": "Symmetrized Gaussian packets observed shortly after leaving the slits (no pair on one side) and after the packets overlap (both-above probability positive).",
  "model": {"type": "gaussian_slit", "sigma0": 1.0, "a": 10.0, "kx": 0.0, "ky": 1.0,
            "composition": "symmetrized"},
  "sampler": {"n_samples": 10000, "seed": 2, "burn_in": 5000, "thinning": 50},
  "time_grid": {"t_start": 0.0, "t_end": 40.0, "n_samples_along_t": 9, "extra_times": [0.2]},
  "regions": [
    {"name": "both_above", "r1": {"x": [0.0, null]}, "r2": {"x": [0.0, null]}},
    {"name": "both_below", "r1": {"x": [null, 0.0]}, "r2": {"x": [null, 0.0]}}
  ],
  "histograms": {"coordinates": ["x1", "x2", "x1+x2"], "times": [0.0, 40.0], "bins": 60},
  "checks": [
    {"kind": "detection_agreement", "name": "both_above_early", "region": "both_above",
     "t": 0.2, "expect": "zero"},
    {"kind": "detection_agreement", "name": "both_below_early", "region": "both_below",
     "t": 0.2, "expect": "zero"},
    {"kind": "detection_agreement", "name": "both_above_overlap", "region": "both_above",
     "t": 40.0, "expect": "positive"},
    {"kind": "detection_agreement", "name": "both_below_overlap", "region": "both_below",
     "t": 40.0, "expect": "positive"},
    {"kind": "constraint_residual", "max": 1e-6, "min_fraction": 0.99},
    {"kind": "aborted_fraction", "max": 0.01},
    {"kind": "marginal_ks", "name": "ks_x1_t0", "coordinate": "x1", "t": 0.0},
    {"kind": "marginal_ks", "name": "ks_x2_t0", "coordinate": "x2", "t": 0.0},
    {"kind": "marginal_ks", "name": "ks_sum_t0", "coordinate": "x1+x2", "t": 0.0},
    {"kind": "marginal_ks", "name": "ks_x1_tf", "coordinate": "x1", "t": 40.0},
    {"kind": "marginal_ks", "name": "ks_x2_tf", "coordinate": "x2", "t": 40.0},
    {"kind": "marginal_ks", "name": "ks_sum_tf", "coordinate": "x1+x2", "t": 40.0}
  ]
})";

constexpr std::string_view kProduct = R"({
  "schema": "bohm2p/scenario/1",
  "name": "gaussian-product",
  "description": "Unsymmetrized product of two-slit packets: pairs may start in the same slit and the centre-of-mass line is not conserved.",
  "model": {"type": "gaussian_slit", "sigma0": 1.0, "a": 10.0, "kx": 0.0, "ky": 1.0,
            "composition": "product"},
  "sampler": {"n_samples": 4000, "seed": 3, "burn_in": 5000, "thinning": 50},
  "time_grid": {"t_start": 0.0, "t_end": 40.0, "n_samples_along_t": 9},
  "regions": [
    {"name": "both_above", "r1": {"x": [0.0, null]}, "r2": {"x": [0.0, null]}}
  ],
  "histograms": {"coordinates": ["x1", "x2", "x1+x2"], "times": [0.0, 40.0], "bins": 60},
  "checks": [
    {"kind": "detection_agreement", "name": "both_above_start", "region": "both_above",
     "t": 0.0, "expect": "positive"},
    {"kind": "detection_agreement", "name": "both_above_overlap", "region": "both_above",
     "t": 40.0, "expect": "positive"},
    {"kind": "aborted_fraction", "max": 0.01},
    {"kind": "marginal_ks", "name": "ks_x1_tf", "coordinate": "x1", "t": 40.0},
    {"kind": "marginal_ks", "name": "ks_sum_tf", "coordinate": "x1+x2", "t": 40.0}
  ]
})";

constexpr std::string_view kPlaneWave = R"({
  "schema": "bohm2p/scenario/1",
  "name": "plane-wave-grid",
  "description": "Symmetrized plane waves on a 10 x 10 grid of starting points away from the nodes; x coordinates stay fixed while both particles drift along y.",
  "model": {"type": "plane_wave_pair", "kx": 1.0, "ky": 1.0},
  "initial": {"mode": "grid", "x1": {"min": -1.0, "max": 1.0, "n": 10},
              "x2": {"min": -0.9, "max": 1.1, "n": 10}, "y1": 0.0, "y2": 0.0},
  "time_grid": {"t_start": 0.0, "t_end": 10.0, "n_samples_along_t": 11},
  "checks": [
    {"kind": "coordinate_constancy", "max": 1e-9},
    {"kind": "aborted_fraction", "max": 0.0}
  ]
})";

constexpr std::string_view kOscillator = R"({
  "schema": "bohm2p/scenario/1",
  "name": "oscillator-pair",
  "description": "Symmetrized coherent oscillator packets over one period; x1 + x2 is conserved and the particles never exchange order.",
  "model": {"type": "oscillator_pair", "omega": 1.0, "a": 7.0710678118654755},
  "sampler": {"n_samples": 1000, "seed": 4, "burn_in": 5000, "thinning": 50},
  "time_grid": {"t_start": 0.0, "t_end": 6.283185307179586, "n_samples_along_t": 201},
  "histograms": {"coordinates": ["x1", "x1+x2"],
                 "times": [0.0, 1.5707963267948966, 6.283185307179586], "bins": 40},
  "checks": [
    {"kind": "no_order_swaps"},
    {"kind": "constraint_residual", "max": 1e-6, "min_fraction": 1.0},
    {"kind": "same_side_fraction", "name": "start_on_opposite_sides", "t": 0.0, "max": 1e-3},
    {"kind": "aborted_fraction", "max": 0.0},
    {"kind": "marginal_ks", "name": "ks_x1_quarter", "coordinate": "x1",
     "t": 1.5707963267948966},
    {"kind": "marginal_ks", "name": "ks_sum_period", "coordinate": "x1+x2",
     "t": 6.283185307179586}
  ]
})";

}  // namespace

const std::vector<BuiltinScenario>& builtin_scenarios() {
  static const std::vector<BuiltinScenario> all = {
      {"gaussian-different-slits", "symmetrized slit packets, constraint and KS checks",
       kDifferentSlits},
      {"gaussian-overlap", "both-above detection before and after the packets overlap",
       kOverlap},
      {"gaussian-product", "unsymmetrized product wave function", kProduct},
      {"plane-wave-grid", "10 x 10 grid of plane-wave pairs, fixed x coordinates", kPlaneWave},
      {"oscillator-pair", "oscillator pairs over one period, no order swaps", kOscillator},
  };
  return all;
}

}  // namespace bohm2p
