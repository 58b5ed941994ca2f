#include "bohm2p/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "bohm2p/errors.hpp"

namespace bohm2p {

std::string_view to_string(TrajectoryStatus status) {
  switch (status) {
    case TrajectoryStatus::Completed: return "completed";
    case TrajectoryStatus::AbortedNearNode: return "aborted_near_node";
    case TrajectoryStatus::AbortedMaxSteps: return "aborted_max_steps";
  }
  return "unknown";
}

void IntegratorSettings::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string("integrator ") + name + " must be positive");
    }
  };
  check(rel_tol, "rel_tol");
  check(abs_tol, "abs_tol");
  check(node_epsilon, "node_epsilon");
  if (max_steps == 0) throw InvalidArgument("integrator max_steps must be positive");
}

VelocityPair guidance_velocity(Complex psi, const GradientPair& grad,
                               const PhysicalConstants& constants) {
  const double scale = constants.hbar / constants.mass;
  VelocityPair v{Coords::zeros(grad.d1.size()), Coords::zeros(grad.d2.size())};
  for (std::size_t i = 0; i < grad.d1.size(); ++i) {
    v.v1[i] = scale * (grad.d1[i] / psi).imag();
    v.v2[i] = scale * (grad.d2[i] / psi).imag();
  }
  return v;
}

namespace {

void require_away_from_node(const WaveModel& model, double density, double t,
                            double node_epsilon) {
  const double floor = node_epsilon * reference_density(model, t);
  if (!(density > floor)) {
    throw NodeProximity("|Psi|^2 = " + std::to_string(density) +
                        " is below the node threshold " + std::to_string(floor));
  }
}

}  // namespace

VelocityPair velocity(const WaveModel& model, const ConfigPoint& p,
                      double node_epsilon) {
  const auto [psi, grad] = evaluate_with_gradient(model, p);
  require_away_from_node(model, std::norm(psi), p.t, node_epsilon);
  return guidance_velocity(psi, grad, model.constants());
}

namespace detail {

double velocity_sum_x_signed(const WaveModel& model, const ConfigPoint& p,
                             double node_epsilon, double term_sign) {
  const auto* g = model.as<GaussianSlit>();
  if (g == nullptr) {
    throw UnsupportedModel("velocity_sum_x requires the gaussian_slit model");
  }
  require_dimension(model, p);
  const Complex psi = evaluate(model, p);
  require_away_from_node(model, std::norm(psi), p.t, node_epsilon);

  const auto& c = model.constants();
  const double rate = c.hbar / (2.0 * c.mass * g->sigma0 * g->sigma0);
  const double tau = rate * p.t;
  const double centre_of_mass_term =
      rate * rate * (p.r1[0] + p.r2[0]) * p.t / (1.0 + tau * tau);
  if (g->composition == Composition::Symmetrized) return centre_of_mass_term;

  const Complex sigma_t = g->sigma0 * Complex(1.0, tau);
  const Complex coefficient =
      (g->a + c.hbar * g->kx * p.t / c.mass) / (g->sigma0 * sigma_t) +
      Complex(0.0, 2.0 * g->kx);
  const Complex same_slit =
      single_particle_a(model, p.r1, p.t) * single_particle_a(model, p.r2, p.t) -
      single_particle_b(model, p.r1, p.t) * single_particle_b(model, p.r2, p.t);
  const double interference =
      (c.hbar / c.mass) * (coefficient * same_slit / psi).imag();
  return centre_of_mass_term + term_sign * interference;
}

}  // namespace detail

double velocity_sum_x(const WaveModel& model, const ConfigPoint& p,
                      double node_epsilon) {
  return detail::velocity_sum_x_signed(model, p, node_epsilon, 1.0);
}

namespace {

// Flat ODE state: r1 components followed by r2 components.
using State = std::array<double, 4>;

struct NodeHit {};

class GuidanceField {
 public:
  GuidanceField(const WaveModel& model, double node_epsilon)
      : model_(model), dim_(model.dimension()), node_epsilon_(node_epsilon) {}

  std::size_t size() const { return 2 * dim_; }

  ConfigPoint point(double t, const State& y) const {
    ConfigPoint p{Coords::zeros(dim_), Coords::zeros(dim_), t};
    for (std::size_t i = 0; i < dim_; ++i) {
      p.r1[i] = y[i];
      p.r2[i] = y[dim_ + i];
    }
    return p;
  }

  // Writes the velocity into dydt and returns |Psi|^2. Throws NodeHit when
  // the density is below node_epsilon * floor_scale.
  double operator()(double t, const State& y, State& dydt,
                    double floor_scale) const {
    const auto [psi, grad] = evaluate_with_gradient(model_, point(t, y));
    const double density = std::norm(psi);
    if (!(density > node_epsilon_ * floor_scale) || !std::isfinite(density)) {
      throw NodeHit{};
    }
    const VelocityPair v = guidance_velocity(psi, grad, model_.constants());
    for (std::size_t i = 0; i < dim_; ++i) {
      dydt[i] = v.v1[i];
      dydt[dim_ + i] = v.v2[i];
    }
    for (std::size_t i = 0; i < dim_; ++i) {
      if (!std::isfinite(dydt[i]) || !std::isfinite(dydt[dim_ + i])) throw NodeHit{};
    }
    return density;
  }

 private:
  const WaveModel& model_;
  std::size_t dim_;
  double node_epsilon_;
};

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr int kMaxNodeRejections = 20;

class Stepper {
 public:
  Stepper(const GuidanceField& field, const IntegratorSettings& settings)
      : field_(field), settings_(settings), n_(field.size()) {}

  double error_norm(const State& y0, const State& y1, const State& err) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double sk = settings_.abs_tol +
                        settings_.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      sum += (err[i] / sk) * (err[i] / sk);
    }
    return std::sqrt(sum / static_cast<double>(n_));
  }

  double weighted_norm(const State& v, const State& y) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double sk = settings_.abs_tol + settings_.rel_tol * std::abs(y[i]);
      sum += (v[i] / sk) * (v[i] / sk);
    }
    return std::sqrt(sum / static_cast<double>(n_));
  }

  // Starting step heuristic from Hairer, Norsett & Wanner (order 5).
  double initial_step(double t, const State& y, const State& f, double span,
                      double floor_scale) const {
    const double d0 = weighted_norm(y, y);
    const double d1 = weighted_norm(f, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    State y1{}, f1{};
    for (std::size_t i = 0; i < n_; ++i) y1[i] = y[i] + h0 * f[i];
    try {
      field_(t + h0, y1, f1, floor_scale);
    } catch (const NodeHit&) {
      return h0;
    }
    State df{};
    for (std::size_t i = 0; i < n_; ++i) df[i] = f1[i] - f[i];
    const double d2 = weighted_norm(df, y) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                    : std::pow(0.01 / dmax, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, span});
  }

  // One trial step. Returns the error norm; fills y_new and f_new (FSAL) and
  // the smallest density evaluated. Throws NodeHit.
  double attempt(double t, double h, const State& y, const State& f,
                 double floor_scale, State& y_new, State& f_new,
                 double& min_density, double& end_density) const {
    State k2{}, k3{}, k4{}, k5{}, k6{}, tmp{};
    const std::size_t n = n_;
    min_density = std::numeric_limits<double>::infinity();
    auto stage = [&](double tc, State& k) {
      min_density = std::min(min_density, field_(tc, tmp, k, floor_scale));
    };
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * f[i];
    stage(t + c2 * h, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * f[i] + a32 * k2[i]);
    stage(t + c3 * h, k3);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a41 * f[i] + a42 * k2[i] + a43 * k3[i]);
    stage(t + c4 * h, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a51 * f[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    stage(t + c5 * h, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a61 * f[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                           a65 * k5[i]);
    stage(t + h, k6);
    for (std::size_t i = 0; i < n; ++i)
      y_new[i] = y[i] + h * (a71 * f[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                             a76 * k6[i]);
    tmp = y_new;
    end_density = field_(t + h, tmp, f_new, floor_scale);
    min_density = std::min(min_density, end_density);

    State err{};
    for (std::size_t i = 0; i < n; ++i) {
      err[i] = h * (e1 * f[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                    e7 * f_new[i]);
    }
    return error_norm(y, y_new, err);
  }

 private:
  const GuidanceField& field_;
  const IntegratorSettings& settings_;
  std::size_t n_;
};

}  // namespace

Trajectory integrate(const WaveModel& model, const ConfigPoint& start,
                     std::span<const double> sample_times,
                     const IntegratorSettings& settings) {
  settings.validate();
  require_dimension(model, start);
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (!std::isfinite(sample_times[i]) || sample_times[i] < start.t ||
        (i > 0 && !(sample_times[i] > sample_times[i - 1]))) {
      throw InvalidArgument("sample times must be finite, increasing and >= t_start");
    }
  }

  const GuidanceField field(model, settings.node_epsilon);
  const Stepper stepper(field, settings);

  Trajectory traj;
  traj.points.push_back(start);

  State y{}, f{};
  for (std::size_t i = 0; i < model.dimension(); ++i) {
    y[i] = start.r1[i];
    y[model.dimension() + i] = start.r2[i];
  }
  double t = start.t;
  double running_max = 0.0;
  try {
    running_max = field(t, y, f, reference_density(model, t));
  } catch (const NodeHit&) {
    throw NodeProximity("start point lies on or next to a node of Psi");
  }
  traj.min_density_seen = running_max;

  std::size_t next = 0;
  while (next < sample_times.size() && sample_times[next] == start.t) ++next;
  if (next == sample_times.size()) return traj;

  const double t_end = sample_times.back();
  double h = stepper.initial_step(t, y, f, t_end - t, running_max);
  double err_old = 1e-4;
  int node_rejections = 0;
  bool last_rejected = false;
  std::size_t attempts = 0;

  while (next < sample_times.size()) {
    if (++attempts > settings.max_steps) {
      throw MaxStepsExceeded("integration exceeded " +
                             std::to_string(settings.max_steps) + " steps at t = " +
                             std::to_string(t));
    }
    const double target = sample_times[next];
    bool landing = false;
    if (t + h >= target - 1e-13 * std::max(1.0, std::abs(target))) {
      h = target - t;
      landing = true;
    }
    if (!(h > std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))) {
      traj.status = TrajectoryStatus::AbortedNearNode;
      return traj;
    }

    State y_new{}, f_new{};
    double stage_min = 0.0;
    double end_density = 0.0;
    double err = 0.0;
    try {
      err = stepper.attempt(t, h, y, f, running_max, y_new, f_new, stage_min,
                            end_density);
    } catch (const NodeHit&) {
      if (++node_rejections >= kMaxNodeRejections) {
        traj.status = TrajectoryStatus::AbortedNearNode;
        return traj;
      }
      h *= 0.5;
      last_rejected = true;
      continue;
    }
    node_rejections = 0;

    // PI step-size control (beta = 0.04).
    constexpr double beta = 0.04, expo = 0.2 - 0.75 * beta, safety = 0.9;
    const double fac11 = std::pow(std::max(err, 1e-300), expo);
    if (err <= 1.0) {
      double fac = fac11 / std::pow(err_old, beta);
      fac = std::clamp(fac / safety, 0.1, 5.0);
      double h_new = h / fac;
      if (last_rejected) h_new = std::min(h_new, h);
      err_old = std::max(err, 1e-4);

      t = landing ? target : t + h;
      y = y_new;
      f = f_new;
      ++traj.step_count;
      running_max = std::max(running_max, end_density);
      traj.min_density_seen = std::min(traj.min_density_seen, stage_min);
      last_rejected = false;
      if (landing) {
        traj.points.push_back(field.point(t, y));
        ++next;
      }
      h = h_new;
    } else {
      h /= std::min(5.0, fac11 / safety);
      last_rejected = true;
    }
  }
  return traj;
}

Trajectory integrate(const WaveModel& model, const ConfigPoint& start,
                     double t_end, const IntegratorSettings& settings) {
  const double times[] = {t_end};
  return integrate(model, start, std::span<const double>(times), settings);
}

double predicted_coordinate_sum(const WaveModel& model, double sum0, double t0,
                                double t) {
  if (model.as<OscillatorPair>() != nullptr) return sum0;
  if (const auto* g = model.as<GaussianSlit>();
      g != nullptr && g->composition == Composition::Symmetrized) {
    const double tau0 = model.spreading_parameter(t0);
    const double tau = model.spreading_parameter(t);
    return sum0 * std::sqrt((1.0 + tau * tau) / (1.0 + tau0 * tau0));
  }
  throw UnsupportedModel("no centre-of-mass constraint is known for " +
                         std::string(model.name()) +
                         (model.as<GaussianSlit>() ? " with product composition" : ""));
}

double constraint_residual(const WaveModel& model, const Trajectory& traj) {
  if (traj.points.empty()) throw InvalidArgument("empty trajectory");
  const ConfigPoint& first = traj.points.front();
  const double sum0 = first.r1[0] + first.r2[0];
  double worst = 0.0;
  for (const ConfigPoint& p : traj.points) {
    const double predicted = predicted_coordinate_sum(model, sum0, first.t, p.t);
    const double scale = std::max(std::abs(predicted), packet_width(model, p.t));
    worst = std::max(worst, std::abs(p.r1[0] + p.r2[0] - predicted) / scale);
  }
  return worst;
}

}  // namespace bohm2p
