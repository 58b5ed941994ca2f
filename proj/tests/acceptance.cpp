// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all
// pass. Reference values come from the test oracles, not the library's own
// self-checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bohm2p/checks.hpp"
#include "bohm2p/dynamics.hpp"
#include "bohm2p/ensemble.hpp"
#include "bohm2p/scenario.hpp"
#include "bohm2p/statistics.hpp"
#include "bohm2p/wavefunction.hpp"
#include "oracles.hpp"

using namespace bohm2p;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// 1. Analytic guidance velocities against fourth-order finite differences.
Outcome guidance_field() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string worst_model;
  for (const LabeledModel& m : default_check_models()) {
    for (const ConfigPoint& p : random_test_points(m.model, 1000, 101)) {
      const double len = m.model.normalizable() ? packet_width(m.model, p.t) : 0.5;
      const std::vector<double> fd = oracle::fd_velocity(m.model, p, 1e-3 * len);
      const std::vector<double> v = oracle::flatten(velocity(m.model, p));
      std::vector<double> diff(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) diff[i] = v[i] - fd[i];
      const double err = max_abs(diff) / std::max(max_abs(v), velocity_scale(m.model, p.t));
      if (err > worst) {
        worst = err;
        worst_model = m.label;
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {worst < 1e-6 && elapsed < 10.0,
          fmt("max_rel_err=%.3e (%s) threshold=1e-6 runtime=%.2fs limit=10s", worst,
              worst_model.c_str(), elapsed)};
}

// 2. Closed-form v1x + v2x against the sum of the individual velocities on
// the product composition.
Outcome velocity_sum_closed_form() {
  double worst = 0.0;
  std::size_t points = 0;
  for (const LabeledModel& m : default_check_models()) {
    const auto* g = m.model.as<GaussianSlit>();
    if (g == nullptr || g->composition != Composition::Product) continue;
    for (const ConfigPoint& p : random_test_points(m.model, 1000, 202)) {
      const VelocityPair v = velocity(m.model, p);
      const double direct = v.v1[0] + v.v2[0];
      const double closed = velocity_sum_x(m.model, p);
      worst = std::max(worst, std::abs(closed - direct) /
                                  std::max(std::abs(direct), velocity_scale(m.model, p.t)));
      ++points;
    }
  }
  return {worst < 1e-8 && points >= 1000,
          fmt("max_rel_err=%.3e threshold=1e-8 points=%zu", worst, points)};
}

// Ensemble shared by criteria 3 and 6: 10^4 symmetrized Gaussian-slit pairs
// with kx = 0 and a = 10 sigma0, sampled from |Psi(0)|^2.
struct SlitEnsemble {
  ScenarioConfig config;
  Ensemble ensemble{WaveModel(GaussianSlit{}), {}, {}, 0, 0, 0};
  double sample_seconds = 0.0;
  double propagate_seconds = 0.0;
};

SlitEnsemble build_slit_ensemble() {
  SlitEnsemble s;
  s.config = parse_scenario_text(find_builtin("gaussian-overlap")->json);
  const auto t0 = Clock::now();
  const SampleSet set = sample_initial(s.config.model, s.config.sampler);
  s.sample_seconds = seconds_since(t0);
  const auto t1 = Clock::now();
  const std::vector<double> times = s.config.time_grid.values();
  s.ensemble = propagate(s.config.model, set.points, times, s.config.integrator, 0,
                         s.config.sampler.seed);
  s.propagate_seconds = seconds_since(t1);
  return s;
}

// 3. Centre-of-mass constraint on completed trajectories, up to tau = 5.
Outcome centre_of_mass_constraint(const SlitEnsemble& s) {
  const auto start = Clock::now();
  const Ensemble& e = s.ensemble;
  const WaveModel& m = e.model;
  const auto& g = *m.as<GaussianSlit>();
  const auto& c = m.constants();
  const double t_f = 5.0 * 2.0 * c.mass * g.sigma0 * g.sigma0 / c.hbar;
  const std::size_t last = e.time_index(t_f);
  std::size_t completed = 0, within = 0;
  double worst = 0.0;
  for (const Trajectory& traj : e.trajectories) {
    if (!traj.completed()) continue;
    ++completed;
    const double sum0 = traj.points[0].r1[0] + traj.points[0].r2[0];
    double residual = 0.0;
    for (std::size_t k = 0; k <= last; ++k) {
      const ConfigPoint& p = traj.points[k];
      const double tau = c.hbar * p.t / (2.0 * c.mass * g.sigma0 * g.sigma0);
      const double predicted = sum0 * std::sqrt(1.0 + tau * tau);
      const double scale = std::max(std::abs(predicted), packet_width(m, p.t));
      residual = std::max(residual, std::abs(p.r1[0] + p.r2[0] - predicted) / scale);
    }
    worst = std::max(worst, residual);
    within += residual < 1e-6 ? 1 : 0;
  }
  const double fraction = completed == 0 ? 0.0 : static_cast<double>(within) / completed;
  const double runtime = s.sample_seconds + s.propagate_seconds + seconds_since(start);
  return {e.trajectories.size() >= 10000 && fraction >= 0.99 && runtime < 120.0,
          fmt("pairs=%zu completed=%zu fraction_below_1e-6=%.5f (min 0.99) max_residual=%.3e "
              "runtime=%.1fs limit=120s",
              e.trajectories.size(), completed, fraction, worst, runtime)};
}

// 4. Plane waves: x1 and x2 stay fixed along every trajectory.
Outcome plane_wave_constancy() {
  const WaveModel m(PlaneWavePair{1.0, 1.0});
  std::vector<ConfigPoint> initial;
  for (int i = 0; i < 10; ++i) {
    for (int k = 0; k < 10; ++k) {
      initial.push_back(oracle::point2(-1.0 + 2.0 * i / 9.0, 0.0, -0.9 + 2.0 * k / 9.0, 0.0, 0.0));
    }
  }
  std::vector<double> times;
  for (int k = 0; k <= 20; ++k) times.push_back(0.5 * k);
  const Ensemble e = propagate(m, initial, times);
  double worst = 0.0;
  std::size_t incomplete = 0;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    const Trajectory& t = e.trajectories[i];
    if (!t.completed()) ++incomplete;
    for (const ConfigPoint& p : t.points) {
      worst = std::max({worst, std::abs(p.r1[0] - initial[i].r1[0]),
                        std::abs(p.r2[0] - initial[i].r2[0])});
    }
  }
  return {incomplete == 0 && worst < 1e-9,
          fmt("points=%zu incomplete=%zu max_dx=%.3e threshold=1e-9", initial.size(),
              incomplete, worst)};
}

// 5. Reflection antisymmetry, exchange covariance and the symmetry-plane
// zero, each relative to the model's velocity scale.
Outcome symmetries() {
  double reflection = 0.0, exchange_err = 0.0, plane = 0.0;
  std::size_t plane_points = 0;
  for (const LabeledModel& m : default_check_models()) {
    for (const ConfigPoint& p : random_test_points(m.model, 1000, 303)) {
      const double scale = velocity_scale(m.model, p.t);
      const VelocityPair v = velocity(m.model, p);

      ConfigPoint r = p;
      r.r1[0] = -p.r1[0];
      r.r2[0] = -p.r2[0];
      const VelocityPair w = velocity(m.model, r);
      reflection = std::max({reflection, std::abs(v.v1[0] + w.v1[0]) / scale,
                             std::abs(v.v2[0] + w.v2[0]) / scale});

      const ConfigPoint x{p.r2, p.r1, p.t};
      const std::vector<double> a = oracle::flatten(v);
      const std::vector<double> b = oracle::flatten(velocity(m.model, x));
      const std::size_t d = a.size() / 2;
      for (std::size_t i = 0; i < d; ++i) {
        exchange_err = std::max({exchange_err, std::abs(a[i] - b[d + i]) / scale,
                                 std::abs(a[d + i] - b[i]) / scale});
      }

      ConfigPoint q = p;
      q.r1[0] = 0.0;
      q.r2[0] = 0.0;
      if (norm_squared_density(m.model, q) > 1e-12 * reference_density(m.model, q.t)) {
        const VelocityPair u = velocity(m.model, q);
        plane = std::max({plane, std::abs(u.v1[0]) / scale, std::abs(u.v2[0]) / scale});
        ++plane_points;
      }
    }
  }
  const double worst = std::max({reflection, exchange_err, plane});
  return {worst < 1e-10 && plane_points > 0,
          fmt("reflection=%.3e exchange=%.3e symmetry_plane=%.3e (%zu points) threshold=1e-10",
              reflection, exchange_err, plane, plane_points)};
}

// 6. Ensemble marginals against quadrature marginals, and Bohmian detection
// fractions against quadrature probabilities in both limiting regimes.
Outcome statistical_agreement(const SlitEnsemble& s) {
  const Ensemble& e = s.ensemble;
  const double t_f = e.times.back();
  bool ok = true;
  std::ostringstream detail;
  for (double t : {0.0, t_f}) {
    for (MarginalCoordinate c :
         {MarginalCoordinate::X1, MarginalCoordinate::X2, MarginalCoordinate::Sum}) {
      const MarginalReport r = marginal_histogram(e, c, t, 60);
      ok &= r.passes();
      detail << "ks[" << to_string(c) << ",t=" << t << "]=" << fmt("%.4f", r.ks_distance) << " ";
    }
  }
  detail << fmt("ks_critical=%.4f ", ks_critical_value(e.completed_count()));

  const Region above = Region::x_above(0.0), below = Region::x_below(0.0);
  const double early = 0.2;
  for (const auto& [label, region] : {std::pair{"above", above}, std::pair{"below", below}}) {
    const DetectionReport d0 = bohmian_detection(e, region, region, early);
    const bool early_ok =
        d0.agrees() && d0.quantum_probability < 1e-6 && d0.bohmian_fraction < 1e-6;
    const DetectionReport d1 = bohmian_detection(e, region, region, t_f);
    const bool late_ok = d1.agrees() && d1.quantum_probability > 0.0 && d1.bohmian_fraction > 0.0;
    ok &= early_ok && late_ok;
    detail << "both_" << label
           << fmt("[t=%g] bohm=%.4g quantum=%.3g; ", early, d0.bohmian_fraction,
                  d0.quantum_probability)
           << "both_" << label
           << fmt("[t=%g] bohm=%.4f quantum=%.4f se=%.4f; ", t_f, d1.bohmian_fraction,
                  d1.quantum_probability, d1.mc_standard_error);
  }
  ok &= e.completed_count() >= 9900;
  detail << "n=" << e.completed_count();
  return {ok, detail.str()};
}

// 7. Oscillator pairs never exchange order and keep x1 + x2 over one period.
Outcome oscillator_non_crossing() {
  const double omega = 1.0;
  const double a = 10.0 * std::sqrt(0.5);  // sqrt(hbar / 2 m omega) = a / 10
  const WaveModel m(OscillatorPair{omega, a});
  SamplerSettings settings;
  settings.n_samples = 1000;
  settings.seed = 4;
  settings.thinning = 50;
  const SampleSet set = sample_initial(m, settings);
  std::vector<double> times;
  for (int k = 0; k <= 400; ++k) times.push_back(2.0 * std::numbers::pi / omega * k / 400.0);
  const Ensemble e = propagate(m, set.points, times);
  const double width = std::sqrt(m.constants().hbar / (2.0 * m.constants().mass * omega));
  std::size_t swaps = 0;
  double worst = 0.0;
  for (const Trajectory& t : e.trajectories) {
    const double sign0 = std::copysign(1.0, t.points[0].r1[0] - t.points[0].r2[0]);
    const double sum0 = t.points[0].r1[0] + t.points[0].r2[0];
    bool swapped = false;
    for (const ConfigPoint& p : t.points) {
      swapped |= (p.r1[0] - p.r2[0]) * sign0 <= 0.0;
      worst = std::max(worst,
                       std::abs(p.r1[0] + p.r2[0] - sum0) / std::max(std::abs(sum0), width));
    }
    swaps += swapped ? 1 : 0;
  }
  const bool complete = e.completed_count() == e.trajectories.size();
  return {complete && swaps == 0 && worst < 1e-6,
          fmt("pairs=%zu completed=%zu order_swaps=%zu max_sum_drift=%.3e threshold=1e-6",
              e.trajectories.size(), e.completed_count(), swaps, worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 8. Byte-identical outputs across repeated runs and thread counts.
Outcome reproducibility() {
  const ScenarioConfig cfg = parse_scenario_text(find_builtin("gaussian-different-slits")->json);
  ScenarioConfig small = cfg;
  small.sampler.n_samples = 2000;
  const auto root = std::filesystem::temp_directory_path() / "bohm2p-acceptance-repro";
  std::filesystem::remove_all(root);
  std::vector<std::filesystem::path> dirs;
  for (unsigned threads : {1u, 1u, 4u}) {
    RunOptions opts;
    opts.out_dir = root / ("run" + std::to_string(dirs.size()));
    opts.threads = threads;
    run_scenario(small, opts);
    dirs.push_back(*opts.out_dir);
  }
  std::size_t mismatches = 0, bytes = 0;
  for (const char* f : {"trajectories.csv", "marginals.csv", "report.json"}) {
    const std::string ref = slurp(dirs[0] / f);
    bytes += ref.size();
    for (std::size_t i = 1; i < dirs.size(); ++i) mismatches += slurp(dirs[i] / f) == ref ? 0 : 1;
  }
  std::filesystem::remove_all(root);
  return {mismatches == 0 && bytes > 0,
          fmt("runs=3 (threads 1,1,4) files=3 mismatches=%zu bytes_compared=%zu", mismatches,
              bytes)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  SlitEnsemble slit;
  bool slit_ready = false;
  auto with_slit = [&](auto f) {
    return [&, f] {
      if (!slit_ready) {
        slit = build_slit_ensemble();
        slit_ready = true;
      }
      return f(slit);
    };
  };
  const std::vector<Criterion> criteria = {
      {"1 guidance-field", guidance_field},
      {"2 velocity-sum-closed-form", velocity_sum_closed_form},
      {"3 centre-of-mass-constraint", with_slit(centre_of_mass_constraint)},
      {"4 plane-wave-constancy", plane_wave_constancy},
      {"5 symmetries", symmetries},
      {"6 statistical-agreement", with_slit(statistical_agreement)},
      {"7 oscillator-non-crossing", oscillator_non_crossing},
      {"8 reproducibility", reproducibility},
  };

  std::size_t passed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto start = Clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    passed += o.passed ? 1 : 0;
    std::printf("%s criterion %s: %s [%.1fs]\n", o.passed ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%zu/%zu acceptance criteria passed\n", passed, criteria.size());
  return passed == criteria.size() ? 0 : 1;
}
