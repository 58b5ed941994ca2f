#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "bohm2p/ensemble.hpp"
#include "bohm2p/errors.hpp"
#include "bohm2p/statistics.hpp"
#include "oracles.hpp"

using namespace bohm2p;
using oracle::point1;
using oracle::point2;

namespace {

WaveModel slit(double a = 10.0, Composition c = Composition::Symmetrized) {
  return WaveModel(GaussianSlit{1.0, a, 0.0, 0.0, c});
}

SamplerSettings settings(std::size_t n, std::uint64_t seed) {
  SamplerSettings s;
  s.n_samples = n;
  s.seed = seed;
  return s;
}

bool same_points(const std::vector<ConfigPoint>& a, const std::vector<ConfigPoint>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i].r1 == b[i].r1) || !(a[i].r2 == b[i].r2) || a[i].t != b[i].t) return false;
  }
  return true;
}

}  // namespace

TEST(Sampler, RejectsPlaneWaves) {
  EXPECT_THROW(sample_initial(WaveModel(PlaneWavePair{}), settings(10, 1)), NotNormalizable);
}

TEST(Sampler, ValidatesSettings) {
  EXPECT_THROW(sample_initial(slit(), settings(0, 1)), InvalidArgument);
  SamplerSettings s = settings(10, 1);
  s.thinning = 0;
  EXPECT_THROW(sample_initial(slit(), s), InvalidArgument);
  s = settings(10, 1);
  s.proposal_scale = -1.0;
  EXPECT_THROW(sample_initial(slit(), s), InvalidArgument);
}

TEST(Sampler, DeterministicForSeedAndThreadCount) {
  SamplerSettings s = settings(700, 42);
  s.chain_length = 64;
  const SampleSet a = sample_initial(slit(), s, 1);
  const SampleSet b = sample_initial(slit(), s, 3);
  const SampleSet c = sample_initial(slit(), s, 1);
  EXPECT_TRUE(same_points(a.points, b.points));
  EXPECT_TRUE(same_points(a.points, c.points));
  EXPECT_EQ(a.acceptance_rate, b.acceptance_rate);
  s.seed = 43;
  EXPECT_FALSE(same_points(a.points, sample_initial(slit(), s, 1).points));
}

TEST(Sampler, PointsStartAtTimeZeroWithConfiguredY) {
  SamplerSettings s = settings(50, 3);
  s.y0 = 1.25;
  for (const ConfigPoint& p : sample_initial(slit(), s).points) {
    EXPECT_EQ(p.t, 0.0);
    EXPECT_EQ(p.r1[1], 1.25);
    EXPECT_EQ(p.r2[1], 1.25);
  }
}

TEST(Sampler, CentreOfMassMeanIsZero) {
  const SampleSet set = sample_initial(slit(), settings(4000, 7));
  std::vector<double> sums;
  for (const ConfigPoint& p : set.points) sums.push_back(p.r1[0] + p.r2[0]);
  double mean = 0.0, var = 0.0;
  for (double s : sums) mean += s;
  mean /= static_cast<double>(sums.size());
  for (double s : sums) var += (s - mean) * (s - mean);
  var /= static_cast<double>(sums.size() - 1);
  EXPECT_LT(std::abs(mean), 4.0 * std::sqrt(var / static_cast<double>(sums.size())));
  EXPECT_FALSE(set.poor_mixing);
}

TEST(Sampler, SeparatedSlitsGiveOppositeSides) {
  const SampleSet set = sample_initial(slit(10.0), settings(4000, 8));
  std::size_t same_side = 0;
  for (const ConfigPoint& p : set.points) same_side += p.r1[0] * p.r2[0] > 0.0 ? 1 : 0;
  EXPECT_LT(static_cast<double>(same_side) / 4000.0, 1e-3);
  const SlitPartition part = different_slit_filter(set.points, slit(10.0));
  EXPECT_LT(static_cast<double>(part.same_slit.size()) / 4000.0, 1e-3);
}

TEST(Sampler, PureGaussianTargetMoments) {
  const double a = 2.5, sigma0 = 0.8;
  const WaveModel m(GaussianSlit{sigma0, a, 0.0, 0.0, Composition::Product});
  const DensityFunction target = [&](const ConfigPoint& p) {
    return std::norm(single_particle_a(m, p.r1, 0.0)) * std::norm(single_particle_a(m, p.r2, 0.0));
  };
  const std::size_t n = 5000;
  const SampleSet set =
      sample_density(target, point2(a, 0.0, a, 0.0, 0.0), sigma0, settings(n, 99));
  for (int particle = 0; particle < 2; ++particle) {
    double mean = 0.0, var = 0.0;
    for (const ConfigPoint& p : set.points) mean += (particle == 0 ? p.r1 : p.r2)[0];
    mean /= static_cast<double>(n);
    for (const ConfigPoint& p : set.points) {
      const double d = (particle == 0 ? p.r1 : p.r2)[0] - mean;
      var += d * d;
    }
    var /= static_cast<double>(n - 1);
    const double s2 = sigma0 * sigma0;
    EXPECT_LT(std::abs(mean - a), 4.0 * std::sqrt(s2 / n));
    // Variance of the sample variance of a normal: 2 s^4 / (n - 1).
    EXPECT_LT(std::abs(var - s2), 4.0 * std::sqrt(2.0 * s2 * s2 / (n - 1)));
  }
}

TEST(Sampler, OscillatorMarginalPassesKs) {
  const double a = 1.5;
  const WaveModel m(OscillatorPair{1.0, a});
  const std::size_t n = 3000;
  const SampleSet set = sample_initial(m, settings(n, 5));
  // Reference CDF of x1 from a brute-force grid over (x1, x2).
  const double lo = -12.0, hi = 12.0;
  const std::size_t cells = 2400;
  const double h = (hi - lo) / cells;
  std::vector<double> cdf(cells + 1, 0.0);
  for (std::size_t i = 0; i < cells; ++i) {
    const double x1 = lo + (i + 0.5) * h;
    const double marginal = oracle::grid_sum_1d(
        [&](double x2) { return norm_squared_density(m, point1(x1, x2, 0.0)); }, lo, hi, 2400);
    cdf[i + 1] = cdf[i] + marginal * h;
  }
  for (double& c : cdf) c /= cdf.back();
  auto reference = [&](double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double s = (x - lo) / h;
    const auto k = std::min(cells - 1, static_cast<std::size_t>(s));
    return cdf[k] + (s - k) * (cdf[k + 1] - cdf[k]);
  };
  std::vector<double> x1;
  for (const ConfigPoint& p : set.points) x1.push_back(p.r1[0]);
  EXPECT_LT(ks_distance(x1, reference), 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST(Sampler, FlagsPoorMixing) {
  SamplerSettings s = settings(300, 1);
  s.proposal_scale = 200.0;
  const SampleSet set = sample_initial(slit(), s);
  EXPECT_LT(set.acceptance_rate, 0.1);
  EXPECT_TRUE(set.poor_mixing);
}

TEST(Propagate, EmptyInitialGivesEmptyEnsemble) {
  const std::vector<double> times = {0.0, 1.0};
  const Ensemble e = propagate(slit(), {}, times);
  EXPECT_TRUE(e.trajectories.empty());
  EXPECT_EQ(e.completed_count(), 0u);
}

TEST(Propagate, PreservesOrderAndIsThreadIndependent) {
  const WaveModel m = slit(5.0);
  const SampleSet set = sample_initial(m, settings(40, 2));
  const std::vector<double> times = {0.0, 0.5, 2.0};
  const Ensemble a = propagate(m, set.points, times, {}, 1, 2);
  const Ensemble b = propagate(m, set.points, times, {}, 4, 2);
  ASSERT_EQ(a.trajectories.size(), set.points.size());
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    EXPECT_TRUE(a.trajectories[i].points.front().r1 == set.points[i].r1);
    EXPECT_TRUE(same_points(a.trajectories[i].points, b.trajectories[i].points));
  }
  EXPECT_EQ(a.time_index(2.0), 2u);
  EXPECT_THROW(a.time_index(1.0), InvalidArgument);
}

TEST(Propagate, PlaneWaveExplicitPointsKeepX) {
  const WaveModel m(PlaneWavePair{1.0, 1.0});
  const std::vector<ConfigPoint> initial = {point2(0.1, 0.0, 0.5, 0.0, 0.0),
                                            point2(-1.0, 2.0, 0.2, 1.0, 0.0)};
  const std::vector<double> times = {0.0, 5.0, 10.0};
  const Ensemble e = propagate(m, initial, times);
  for (std::size_t i = 0; i < initial.size(); ++i) {
    for (const ConfigPoint& p : e.trajectories[i].points) {
      EXPECT_NEAR(p.r1[0], initial[i].r1[0], 1e-12);
      EXPECT_NEAR(p.r2[0], initial[i].r2[0], 1e-12);
    }
  }
}

TEST(Propagate, FailuresBecomeStatuses) {
  const WaveModel m = slit(10.0);
  const std::vector<ConfigPoint> initial = {point2(10.0, 0.0, -10.0, 0.0, 0.0),
                                            point2(10.3, 0.0, -9.9, 0.0, 0.0)};
  const std::vector<double> times = {0.0, 20.0};
  IntegratorSettings node;
  node.node_epsilon = 0.5;
  const Ensemble a = propagate(m, initial, times, node);
  EXPECT_EQ(a.aborted_count, 2u);
  EXPECT_EQ(a.completed_count(), 0u);
  IntegratorSettings budget;
  budget.max_steps = 2;
  const Ensemble b = propagate(m, initial, times, budget);
  EXPECT_EQ(b.max_steps_count, 2u);
  EXPECT_EQ(b.aborted_count, 0u);
  for (const Trajectory& t : b.trajectories) {
    EXPECT_EQ(t.status, TrajectoryStatus::AbortedMaxSteps);
    EXPECT_EQ(t.points.size(), 1u);
  }
}

TEST(Propagate, RejectsStartTimeOffGrid) {
  const std::vector<ConfigPoint> initial = {point2(10.0, 0.0, -10.0, 0.0, 0.5)};
  const std::vector<double> times = {0.0, 1.0};
  EXPECT_THROW(propagate(slit(), initial, times), InvalidArgument);
}

TEST(SlitFilter, ClassifiesBands) {
  const WaveModel m = slit(10.0);
  const auto& g = *m.as<GaussianSlit>();
  EXPECT_EQ(classify_slits(point2(10.0, 0, -10.0, 0, 0), g), SlitClass::DifferentSlits);
  EXPECT_EQ(classify_slits(point2(-10.0, 0, 10.0, 0, 0), g), SlitClass::DifferentSlits);
  EXPECT_EQ(classify_slits(point2(10.0, 0, 10.0, 0, 0), g), SlitClass::SameSlit);
  EXPECT_EQ(classify_slits(point2(0.0, 0, -10.0, 0, 0), g), SlitClass::Other);
  EXPECT_EQ(classify_slits(point2(12.5, 0, -10.0, 0, 0), g, 2.0), SlitClass::Other);
  const std::vector<ConfigPoint> pts = {point2(10, 0, -10, 0, 0), point2(10, 0, 10, 0, 0)};
  const SlitPartition part = different_slit_filter(pts, m);
  EXPECT_EQ(part.different_slits.size(), 1u);
  EXPECT_EQ(part.same_slit.size(), 1u);
  EXPECT_THROW(different_slit_filter(pts, WaveModel(PlaneWavePair{})), UnsupportedModel);
}
