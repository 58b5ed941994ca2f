#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bohm2p/dynamics.hpp"
#include "bohm2p/types.hpp"
#include "bohm2p/wavefunction.hpp"

namespace bohm2p {

struct SamplerSettings {
  std::size_t n_samples = 1000;
  std::uint64_t seed = 0;
  std::size_t burn_in = 5000;
  std::size_t thinning = 20;
  /// Random-walk step; defaults to sigma0 (Gaussian slit) or
  /// sqrt(hbar / 2 m omega) (oscillator).
  std::optional<double> proposal_scale;
  /// Samples drawn per independent chain. Chain c is seeded with
  /// mix_seed(seed, c), so results do not depend on the worker count.
  std::size_t chain_length = 256;
  /// Transverse coordinate given to every sample of a 2D model. The density
  /// of the Gaussian slit model is uniform along y, so only x is sampled.
  double y0 = 0.0;

  void validate() const;
};

struct SampleSet {
  std::vector<ConfigPoint> points;  // all at t = 0
  double acceptance_rate = 0.0;     // random-walk moves only
  bool poor_mixing = false;         // acceptance outside [0.1, 0.6]
};

using DensityFunction = std::function<double(const ConfigPoint&)>;

/// Metropolis samples from an unnormalized density over the x coordinates of
/// both particles, starting every chain at `start`. Other coordinates keep
/// their start values. Throws InvalidArgument when density(start) is zero.
SampleSet sample_density(const DensityFunction& density, const ConfigPoint& start,
                         double proposal_scale, const SamplerSettings& settings,
                         unsigned threads = 0);

/// Metropolis samples from |Psi(r1, r2; 0)|^2. Moves mix a Gaussian random
/// walk with the involutions (r1, r2) -> (r2, r1), -> (r1', r2') and
/// -> (r1', r2), each accepted with the usual density ratio; the
/// involutions let chains hop between the well-separated slit modes.
/// Throws NotNormalizable for PlaneWavePair.
SampleSet sample_initial(const WaveModel& model, const SamplerSettings& settings,
                         unsigned threads = 0);

struct Ensemble {
  WaveModel model;
  std::vector<double> times;           // shared grid; times.front() = t_start
  std::vector<Trajectory> trajectories;  // one per initial point, same order
  std::uint64_t seed = 0;
  std::size_t aborted_count = 0;    // status AbortedNearNode
  std::size_t max_steps_count = 0;  // status AbortedMaxSteps

  std::size_t completed_count() const {
    return trajectories.size() - aborted_count - max_steps_count;
  }
  /// Index of `t` in the time grid; throws InvalidArgument if absent.
  std::size_t time_index(double t) const;
};

/// Integrates every initial point over `times`; each point's t must equal
/// times.front(). Trajectories that hit a node or exhaust the step budget are
/// flagged through their status, never dropped.
Ensemble propagate(const WaveModel& model, std::span<const ConfigPoint> initial,
                   std::span<const double> times,
                   const IntegratorSettings& settings = {}, unsigned threads = 0,
                   std::uint64_t seed = 0);

enum class SlitClass { DifferentSlits, SameSlit, Other };

/// Which slit band each particle starts in, with band half-width
/// width_multiplier * sigma0 around x = +a and x = -a.
SlitClass classify_slits(const ConfigPoint& p, const GaussianSlit& model,
                         double width_multiplier = 3.0);

struct SlitPartition {
  std::vector<ConfigPoint> different_slits;
  std::vector<ConfigPoint> same_slit;
  std::vector<ConfigPoint> other;
};

/// Throws UnsupportedModel unless the model is a Gaussian slit.
SlitPartition different_slit_filter(std::span<const ConfigPoint> initial,
                                    const WaveModel& model,
                                    double width_multiplier = 3.0);

}  // namespace bohm2p
