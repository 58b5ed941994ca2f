#include "bohm2p/ensemble.hpp"

#include <cmath>
#include <random>
#include <string>

#include "bohm2p/errors.hpp"
#include "bohm2p/parallel.hpp"

namespace bohm2p {

void SamplerSettings::validate() const {
  if (n_samples == 0) throw InvalidArgument("sampler n_samples must be positive");
  if (thinning == 0) throw InvalidArgument("sampler thinning must be >= 1");
  if (chain_length == 0) throw InvalidArgument("sampler chain_length must be >= 1");
  if (proposal_scale && !(*proposal_scale > 0.0)) {
    throw InvalidArgument("sampler proposal_scale must be positive");
  }
  if (!std::isfinite(y0)) throw InvalidArgument("sampler y0 must be finite");
}

namespace {

double default_proposal_scale(const WaveModel& model) {
  if (const auto* g = model.as<GaussianSlit>()) return g->sigma0;
  return packet_width(model, 0.0);
}

struct ChainResult {
  std::size_t proposed = 0;
  std::size_t accepted = 0;
};

class Chain {
 public:
  Chain(const DensityFunction& density, const ConfigPoint& start, double scale,
        std::uint64_t seed)
      : target_(density), scale_(scale), rng_(seed), current_(start) {
    density_ = target_(current_);
  }

  void step(ChainResult& stats) {
    ConfigPoint proposal = current_;
    const double move = uniform_(rng_);
    const bool random_walk = move < 0.5;
    if (random_walk) {
      proposal.r1[0] += scale_ * normal_(rng_);
      proposal.r2[0] += scale_ * normal_(rng_);
      ++stats.proposed;
    } else if (move < 0.75) {
      proposal = exchange(proposal);
    } else if (move < 0.875) {
      proposal = reflect(proposal);
    } else {
      proposal.r1 = reflect(proposal.r1);
    }
    const double density = target_(proposal);
    if (density >= density_ || uniform_(rng_) * density_ < density) {
      current_ = proposal;
      density_ = density;
      if (random_walk) ++stats.accepted;
    }
  }

  const ConfigPoint& current() const { return current_; }

 private:
  const DensityFunction& target_;
  double scale_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
  ConfigPoint current_;
  double density_ = 0.0;
};

}  // namespace

SampleSet sample_density(const DensityFunction& density, const ConfigPoint& start,
                         double proposal_scale, const SamplerSettings& settings,
                         unsigned threads) {
  settings.validate();
  if (!(proposal_scale > 0.0)) throw InvalidArgument("proposal scale must be positive");
  if (!(density(start) > 0.0)) throw InvalidArgument("chain start has zero density");
  const std::size_t n = settings.n_samples;
  const std::size_t chains = (n + settings.chain_length - 1) / settings.chain_length;

  SampleSet out;
  out.points.resize(n);
  std::vector<ChainResult> stats(chains);
  parallel_for(chains, resolve_thread_count(threads), [&](std::size_t c) {
    Chain chain(density, start, proposal_scale, mix_seed(settings.seed, c));
    for (std::size_t i = 0; i < settings.burn_in; ++i) chain.step(stats[c]);
    const std::size_t begin = c * settings.chain_length;
    const std::size_t end = std::min(n, begin + settings.chain_length);
    for (std::size_t k = begin; k < end; ++k) {
      for (std::size_t i = 0; i < settings.thinning; ++i) chain.step(stats[c]);
      out.points[k] = chain.current();
    }
  });

  std::size_t proposed = 0, accepted = 0;
  for (const ChainResult& s : stats) {
    proposed += s.proposed;
    accepted += s.accepted;
  }
  out.acceptance_rate =
      proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  out.poor_mixing = out.acceptance_rate < 0.1 || out.acceptance_rate > 0.6;
  return out;
}

SampleSet sample_initial(const WaveModel& model, const SamplerSettings& settings,
                         unsigned threads) {
  settings.validate();
  if (!model.normalizable()) {
    throw NotNormalizable(
        "plane-wave pair has uniform marginals; supply initial points explicitly");
  }
  const std::size_t d = model.dimension();
  const double centre = packet_center(model, 0.0);
  ConfigPoint start{Coords::zeros(d), Coords::zeros(d), 0.0};
  start.r1[0] = centre;
  start.r2[0] = -centre;
  if (d == 2) {
    start.r1[1] = settings.y0;
    start.r2[1] = settings.y0;
  }
  const DensityFunction density = [&model](const ConfigPoint& p) {
    return norm_squared_density(model, p);
  };
  return sample_density(density, start,
                        settings.proposal_scale.value_or(default_proposal_scale(model)),
                        settings, threads);
}

std::size_t Ensemble::time_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
  }
  throw InvalidArgument("time " + std::to_string(t) + " is not on the ensemble grid");
}

Ensemble propagate(const WaveModel& model, std::span<const ConfigPoint> initial,
                   std::span<const double> times, const IntegratorSettings& settings,
                   unsigned threads, std::uint64_t seed) {
  settings.validate();
  if (times.empty()) throw InvalidArgument("time grid must not be empty");
  for (const ConfigPoint& p : initial) {
    require_dimension(model, p);
    if (p.t != times.front()) {
      throw InvalidArgument("initial points must sit at the first grid time");
    }
  }

  Ensemble ens{model, {times.begin(), times.end()}, {}, seed, 0, 0};
  ens.trajectories.resize(initial.size());
  parallel_for(initial.size(), resolve_thread_count(threads), [&](std::size_t i) {
    Trajectory& traj = ens.trajectories[i];
    try {
      traj = integrate(model, initial[i], times, settings);
    } catch (const NodeProximity&) {
      traj.points = {initial[i]};
      traj.status = TrajectoryStatus::AbortedNearNode;
    } catch (const MaxStepsExceeded&) {
      traj.points = {initial[i]};
      traj.status = TrajectoryStatus::AbortedMaxSteps;
    }
  });
  for (const Trajectory& traj : ens.trajectories) {
    if (traj.status == TrajectoryStatus::AbortedNearNode) ++ens.aborted_count;
    if (traj.status == TrajectoryStatus::AbortedMaxSteps) ++ens.max_steps_count;
  }
  return ens;
}

SlitClass classify_slits(const ConfigPoint& p, const GaussianSlit& model,
                         double width_multiplier) {
  const double half_width = width_multiplier * model.sigma0;
  auto in_a = [&](double x) { return std::abs(x - model.a) <= half_width; };
  auto in_b = [&](double x) { return std::abs(x + model.a) <= half_width; };
  const double x1 = p.r1[0], x2 = p.r2[0];
  if ((in_a(x1) && in_b(x2)) || (in_b(x1) && in_a(x2))) return SlitClass::DifferentSlits;
  if ((in_a(x1) && in_a(x2)) || (in_b(x1) && in_b(x2))) return SlitClass::SameSlit;
  return SlitClass::Other;
}

SlitPartition different_slit_filter(std::span<const ConfigPoint> initial,
                                    const WaveModel& model, double width_multiplier) {
  const auto* g = model.as<GaussianSlit>();
  if (g == nullptr) throw UnsupportedModel("slit bands are defined for gaussian_slit only");
  if (!(width_multiplier > 0.0)) throw InvalidArgument("width multiplier must be positive");
  SlitPartition out;
  for (const ConfigPoint& p : initial) {
    switch (classify_slits(p, *g, width_multiplier)) {
      case SlitClass::DifferentSlits: out.different_slits.push_back(p); break;
      case SlitClass::SameSlit: out.same_slit.push_back(p); break;
      case SlitClass::Other: out.other.push_back(p); break;
    }
  }
  return out;
}

}  // namespace bohm2p
