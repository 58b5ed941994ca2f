#include "bohm2p/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "bohm2p/dynamics.hpp"
#include "bohm2p/errors.hpp"

namespace bohm2p {

std::vector<std::string> all_check_suites() {
  return {"gradient-fd",         "velocity-fd",  "reflection-antisymmetry",
          "exchange-covariance", "symmetry-plane", "velocity-sum",
          "gauge-invariance"};
}

std::vector<LabeledModel> default_check_models() {
  const double osc_a = 10.0 * std::sqrt(0.5);  // width sqrt(hbar/2 m omega) = a/10
  return {
      {"plane-wave", WaveModel(PlaneWavePair{1.0, 0.5})},
      {"oscillator", WaveModel(OscillatorPair{1.0, osc_a})},
      {"gaussian-symmetrized",
       WaveModel(GaussianSlit{1.0, 10.0, 0.0, 1.0, Composition::Symmetrized})},
      {"gaussian-symmetrized-kx",
       WaveModel(GaussianSlit{1.0, 4.0, 0.3, 1.0, Composition::Symmetrized})},
      {"gaussian-product",
       WaveModel(GaussianSlit{1.0, 10.0, 0.0, 1.0, Composition::Product})},
      {"gaussian-product-kx",
       WaveModel(GaussianSlit{1.0, 3.0, 0.5, 1.0, Composition::Product})},
  };
}

namespace {

double time_span(const WaveModel& model) {
  const auto& c = model.constants();
  if (const auto* g = model.as<GaussianSlit>()) {
    return 5.0 * 2.0 * c.mass * g->sigma0 * g->sigma0 / c.hbar;
  }
  if (const auto* o = model.as<OscillatorPair>()) return 2.0 * std::numbers::pi / o->omega;
  return 5.0;
}

double length_scale(const WaveModel& model, double t) {
  if (model.normalizable()) return packet_width(model, t);
  const auto* w = model.as<PlaneWavePair>();
  const double k = std::hypot(w->kx, w->ky);
  return k > 0.0 ? 1.0 / k : 1.0;
}

// Central differences of evaluate() with step 1e-5 * max(1, |x|).
GradientPair finite_difference_gradient(const WaveModel& model, const ConfigPoint& p) {
  const std::size_t d = model.dimension();
  GradientPair g{ComplexVector::zeros(d), ComplexVector::zeros(d)};
  for (int particle = 0; particle < 2; ++particle) {
    for (std::size_t i = 0; i < d; ++i) {
      ConfigPoint plus = p, minus = p;
      Coords& rp = particle == 0 ? plus.r1 : plus.r2;
      Coords& rm = particle == 0 ? minus.r1 : minus.r2;
      const double h = 1e-5 * std::max(1.0, std::abs(rp[i]));
      rp[i] += h;
      rm[i] -= h;
      const Complex diff = (evaluate(model, plus) - evaluate(model, minus)) / (2.0 * h);
      (particle == 0 ? g.d1 : g.d2)[i] = diff;
    }
  }
  return g;
}

double gradient_norm(const GradientPair& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.d1.size(); ++i) s += std::norm(g.d1[i]) + std::norm(g.d2[i]);
  return std::sqrt(s);
}

double gradient_distance(const GradientPair& a, const GradientPair& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.d1.size(); ++i) {
    s += std::norm(a.d1[i] - b.d1[i]) + std::norm(a.d2[i] - b.d2[i]);
  }
  return std::sqrt(s);
}

double max_abs(const VelocityPair& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.v1.size(); ++i) {
    m = std::max({m, std::abs(v.v1[i]), std::abs(v.v2[i])});
  }
  return m;
}

double max_diff(const VelocityPair& a, const VelocityPair& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.v1.size(); ++i) {
    m = std::max({m, std::abs(a.v1[i] - b.v1[i]), std::abs(a.v2[i] - b.v2[i])});
  }
  return m;
}

// Worst error of `metric` over the points; metric returns a negative value to
// skip a point.
CheckResult run_metric(const std::string& name, double threshold,
                       const std::vector<ConfigPoint>& points,
                       const std::function<double(const ConfigPoint&)>& metric) {
  CheckResult r{name, true, 0.0, threshold, 0, {}};
  for (const ConfigPoint& p : points) {
    const double e = metric(p);
    if (e < 0.0) continue;
    ++r.samples;
    r.measured = std::isnan(e) ? INFINITY : std::max(r.measured, e);
  }
  r.passed = r.measured < threshold;
  return r;
}

}  // namespace

double velocity_scale(const WaveModel& model, double t) {
  const auto& c = model.constants();
  return c.hbar / (c.mass * length_scale(model, t));
}

std::vector<ConfigPoint> random_test_points(const WaveModel& model, std::size_t count,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t d = model.dimension();
  const double span = time_span(model);
  std::vector<ConfigPoint> out;
  out.reserve(count);
  while (out.size() < count) {
    const double t = span * unit(rng);
    auto draw_x = [&] {
      if (!model.normalizable()) return -5.0 + 10.0 * unit(rng);
      const double centre = packet_center(model, t) * (unit(rng) < 0.5 ? 1.0 : -1.0);
      return centre + packet_width(model, t) * (6.0 * unit(rng) - 3.0);
    };
    ConfigPoint p{Coords::zeros(d), Coords::zeros(d), t};
    p.r1[0] = draw_x();
    p.r2[0] = draw_x();
    if (d == 2) {
      p.r1[1] = -5.0 + 10.0 * unit(rng);
      p.r2[1] = -5.0 + 10.0 * unit(rng);
    }
    if (norm_squared_density(model, p) > 1e-6 * reference_density(model, t)) out.push_back(p);
  }
  return out;
}

std::vector<CheckResult> run_property_checks(const CheckOptions& options,
                                             const std::vector<LabeledModel>& models) {
  const auto known = all_check_suites();
  for (const std::string& s : options.suites) {
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      throw InvalidArgument("unknown check suite '" + s + "'");
    }
  }
  const std::size_t n = options.fast ? 100 : 1000;
  const double term_sign = options.mutate_velocity_sum_sign ? -1.0 : 1.0;

  std::vector<CheckResult> results;
  for (const std::string& suite : options.suites) {
    for (std::size_t m = 0; m < models.size(); ++m) {
      const WaveModel& model = models[m].model;
      const std::string name = suite + "/" + models[m].label;
      const auto points = random_test_points(model, n, options.seed + 7919 * m);
      const auto& consts = model.constants();

      if (suite == "gradient-fd") {
        results.push_back(run_metric(name, 1e-6, points, [&](const ConfigPoint& p) {
          const auto [psi, grad] = evaluate_with_gradient(model, p);
          const GradientPair fd = finite_difference_gradient(model, p);
          const double scale =
              std::max(gradient_norm(grad), std::abs(psi) / length_scale(model, p.t));
          return gradient_distance(grad, fd) / scale;
        }));
      } else if (suite == "velocity-fd") {
        results.push_back(run_metric(name, 1e-6, points, [&](const ConfigPoint& p) {
          const VelocityPair v = velocity(model, p);
          const VelocityPair v_fd =
              guidance_velocity(evaluate(model, p), finite_difference_gradient(model, p), consts);
          return max_diff(v, v_fd) / std::max(max_abs(v), velocity_scale(model, p.t));
        }));
      } else if (suite == "reflection-antisymmetry") {
        results.push_back(run_metric(name, 1e-10, points, [&](const ConfigPoint& p) {
          const VelocityPair v = velocity(model, p);
          const VelocityPair w = velocity(model, reflect(p));
          return std::max(std::abs(v.v1[0] + w.v1[0]), std::abs(v.v2[0] + w.v2[0])) /
                 velocity_scale(model, p.t);
        }));
      } else if (suite == "exchange-covariance") {
        results.push_back(run_metric(name, 1e-10, points, [&](const ConfigPoint& p) {
          const VelocityPair v = velocity(model, p);
          const VelocityPair w = velocity(model, exchange(p));
          return max_diff(v, VelocityPair{w.v2, w.v1}) / velocity_scale(model, p.t);
        }));
      } else if (suite == "symmetry-plane") {
        results.push_back(run_metric(name, 1e-10, points, [&](const ConfigPoint& p) {
          ConfigPoint q = p;
          q.r1[0] = 0.0;
          q.r2[0] = 0.0;
          if (!(norm_squared_density(model, q) > 1e-12 * reference_density(model, q.t))) {
            return -1.0;
          }
          const VelocityPair v = velocity(model, q);
          return std::max(std::abs(v.v1[0]), std::abs(v.v2[0])) / velocity_scale(model, q.t);
        }));
      } else if (suite == "velocity-sum") {
        if (model.as<GaussianSlit>() == nullptr) continue;
        results.push_back(run_metric(name, 1e-8, points, [&](const ConfigPoint& p) {
          const VelocityPair v = velocity(model, p);
          const double direct = v.v1[0] + v.v2[0];
          const double closed = detail::velocity_sum_x_signed(
              model, p, IntegratorSettings{}.node_epsilon, term_sign);
          return std::abs(closed - direct) /
                 std::max(std::abs(direct), velocity_scale(model, p.t));
        }));
      } else if (suite == "gauge-invariance") {
        std::mt19937_64 rng(options.seed ^ 0xC0FFEEull);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        results.push_back(run_metric(name, 1e-12, points, [&](const ConfigPoint& p) {
          const Complex factor = std::polar(std::pow(10.0, 6.0 * unit(rng) - 3.0),
                                            2.0 * std::numbers::pi * unit(rng));
          auto [psi, grad] = evaluate_with_gradient(model, p);
          const VelocityPair v = guidance_velocity(psi, grad, consts);
          for (std::size_t i = 0; i < grad.d1.size(); ++i) {
            grad.d1[i] *= factor;
            grad.d2[i] *= factor;
          }
          const VelocityPair w = guidance_velocity(psi * factor, grad, consts);
          return max_diff(v, w) / std::max(max_abs(v), velocity_scale(model, p.t));
        }));
      }
    }
  }
  return results;
}

std::vector<CheckResult> run_property_checks(const CheckOptions& options) {
  return run_property_checks(options, default_check_models());
}

}  // namespace bohm2p
