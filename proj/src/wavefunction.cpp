#include "bohm2p/wavefunction.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bohm2p/errors.hpp"

namespace bohm2p {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidArgument(std::string(name) + " must be positive and finite");
  }
}

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw InvalidArgument(std::string(name) + " must be finite");
  }
}

// Value and gradient of one single-particle factor at one position.
struct Factor {
  Complex value;
  ComplexVector grad;
};

Factor gaussian_a(const GaussianSlit& g, const PhysicalConstants& c,
                  double x, double y, double t) {
  const double tau = c.hbar * t / (2.0 * c.mass * g.sigma0 * g.sigma0);
  const Complex sigma_t = g.sigma0 * Complex(1.0, tau);
  const double drift = c.hbar * g.kx / c.mass;
  const double u = x - g.a - drift * t;
  const Complex prefactor = std::pow(2.0 * kPi * sigma_t * sigma_t, -0.25);
  const Complex exponent =
      -u * u / (4.0 * g.sigma0 * sigma_t) +
      kI * (g.kx * (x - g.a - 0.5 * drift * t) + g.ky * y -
            c.hbar * g.ky * g.ky * t / (2.0 * c.mass));
  const Complex value = prefactor * std::exp(exponent);
  return {value,
          {value * (-u / (2.0 * g.sigma0 * sigma_t) + kI * g.kx),
           value * (kI * g.ky)}};
}

Factor oscillator_a(const OscillatorPair& o, const PhysicalConstants& c,
                    double x, double t) {
  const double alpha = c.mass * o.omega / c.hbar;
  const double cw = std::cos(o.omega * t);
  const double sw = std::sin(o.omega * t);
  const double s2w = std::sin(2.0 * o.omega * t);
  const double d = x - o.a * cw;
  const Complex exponent =
      -0.5 * alpha * d * d -
      0.5 * kI * (o.omega * t + 0.5 * alpha * (4.0 * x * o.a * sw - o.a * o.a * s2w));
  const Complex value = std::pow(alpha / kPi, 0.25) * std::exp(exponent);
  return {value, {value * Complex(-alpha * d, -alpha * o.a * sw)}};
}

Factor plane_a(const PlaneWavePair& w, const PhysicalConstants& c, double x,
               double y, double t) {
  const double energy_phase =
      c.hbar * (w.kx * w.kx + w.ky * w.ky) * t / (2.0 * c.mass);
  const Complex value = std::exp(kI * (w.kx * x + w.ky * y - energy_phase));
  return {value, {value * (kI * w.kx), value * (kI * w.ky)}};
}

Factor factor_a(const WaveModel& model, const Coords& r, double t) {
  const auto& c = model.constants();
  return std::visit(
      Overloaded{
          [&](const PlaneWavePair& w) { return plane_a(w, c, r[0], r[1], t); },
          [&](const OscillatorPair& o) { return oscillator_a(o, c, r[0], t); },
          [&](const GaussianSlit& g) { return gaussian_a(g, c, r[0], r[1], t); },
      },
      model.variant());
}

// psi_B(r) = psi_A(r'), so d/dx psi_B(r) = -(d/dx psi_A)(r').
Factor factor_b(const WaveModel& model, const Coords& r, double t) {
  Factor f = factor_a(model, reflect(r), t);
  f.grad[0] = -f.grad[0];
  return f;
}

ComplexVector sum_scaled(const ComplexVector& u, Complex su,
                         const ComplexVector& v, Complex sv) {
  ComplexVector out = ComplexVector::zeros(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] * su + v[i] * sv;
  return out;
}

// Plane waves are evaluated from the closed form
//   2 cos{kx (x1 - x2)} exp{i [ky (y1 + y2) - (hbar/m)(kx^2 + ky^2) t]}.
AmplitudeWithGradient plane_wave_total(const PlaneWavePair& w,
                                       const PhysicalConstants& c,
                                       const ConfigPoint& p) {
  const double rel = w.kx * (p.r1[0] - p.r2[0]);
  const Complex phase = std::exp(
      kI * (w.ky * (p.r1[1] + p.r2[1]) -
            c.hbar * (w.kx * w.kx + w.ky * w.ky) * p.t / c.mass));
  const Complex psi = 2.0 * std::cos(rel) * phase;
  const Complex dx = -2.0 * w.kx * std::sin(rel) * phase;
  return {psi, {{dx, kI * w.ky * psi}, {-dx, kI * w.ky * psi}}};
}

}  // namespace

WaveModel::WaveModel(ModelVariant variant, PhysicalConstants constants)
    : variant_(variant), constants_(constants) {
  require_positive(constants_.hbar, "hbar");
  require_positive(constants_.mass, "mass");
  std::visit(Overloaded{
                 [](const PlaneWavePair& w) {
                   require_finite(w.kx, "kx");
                   require_finite(w.ky, "ky");
                 },
                 [](const OscillatorPair& o) {
                   require_positive(o.omega, "omega");
                   require_positive(o.a, "a");
                 },
                 [](const GaussianSlit& g) {
                   require_positive(g.sigma0, "sigma0");
                   require_positive(g.a, "a");
                   require_finite(g.kx, "kx");
                   require_finite(g.ky, "ky");
                 },
             },
             variant_);
}

std::size_t WaveModel::dimension() const {
  return std::holds_alternative<OscillatorPair>(variant_) ? 1 : 2;
}

bool WaveModel::normalizable() const {
  return !std::holds_alternative<PlaneWavePair>(variant_);
}

Composition WaveModel::composition() const {
  if (const auto* g = as<GaussianSlit>()) return g->composition;
  return Composition::Symmetrized;
}

std::string_view WaveModel::name() const {
  return std::visit(Overloaded{
                        [](const PlaneWavePair&) { return "plane_wave_pair"; },
                        [](const OscillatorPair&) { return "oscillator_pair"; },
                        [](const GaussianSlit&) { return "gaussian_slit"; },
                    },
                    variant_);
}

double WaveModel::spreading_parameter(double t) const {
  if (const auto* g = as<GaussianSlit>()) {
    return constants_.hbar * t / (2.0 * constants_.mass * g->sigma0 * g->sigma0);
  }
  return 0.0;
}

void require_dimension(const WaveModel& model, const ConfigPoint& p) {
  const std::size_t d = model.dimension();
  if (p.r1.size() != d || p.r2.size() != d) {
    throw DimensionMismatch("model " + std::string(model.name()) + " expects " +
                            std::to_string(d) + " coordinates per particle, got " +
                            std::to_string(p.r1.size()) + " and " +
                            std::to_string(p.r2.size()));
  }
}

AmplitudeWithGradient evaluate_with_gradient(const WaveModel& model,
                                             const ConfigPoint& p) {
  require_dimension(model, p);
  if (const auto* w = model.as<PlaneWavePair>()) {
    return plane_wave_total(*w, model.constants(), p);
  }
  const Factor a1 = factor_a(model, p.r1, p.t);
  const Factor a2 = factor_a(model, p.r2, p.t);
  const Factor b1 = factor_b(model, p.r1, p.t);
  const Factor b2 = factor_b(model, p.r2, p.t);

  if (model.composition() == Composition::Product) {
    const Complex s1 = a1.value + b1.value;
    const Complex s2 = a2.value + b2.value;
    return {s1 * s2,
            {sum_scaled(a1.grad, s2, b1.grad, s2),
             sum_scaled(a2.grad, s1, b2.grad, s1)}};
  }
  return {a1.value * b2.value + a2.value * b1.value,
          {sum_scaled(a1.grad, b2.value, b1.grad, a2.value),
           sum_scaled(b2.grad, a1.value, a2.grad, b1.value)}};
}

Complex evaluate(const WaveModel& model, const ConfigPoint& p) {
  require_dimension(model, p);
  if (const auto* w = model.as<PlaneWavePair>()) {
    return plane_wave_total(*w, model.constants(), p).psi;
  }
  const Complex a1 = factor_a(model, p.r1, p.t).value;
  const Complex a2 = factor_a(model, p.r2, p.t).value;
  const Complex b1 = factor_b(model, p.r1, p.t).value;
  const Complex b2 = factor_b(model, p.r2, p.t).value;
  if (model.composition() == Composition::Product) return (a1 + b1) * (a2 + b2);
  return a1 * b2 + a2 * b1;
}

GradientPair gradient(const WaveModel& model, const ConfigPoint& p) {
  return evaluate_with_gradient(model, p).grad;
}

double norm_squared_density(const WaveModel& model, const ConfigPoint& p) {
  return std::norm(evaluate(model, p));
}

Complex single_particle_a(const WaveModel& model, const Coords& r, double t) {
  if (r.size() != model.dimension()) {
    throw DimensionMismatch("single-particle coordinate has wrong dimension");
  }
  return factor_a(model, r, t).value;
}

Complex single_particle_b(const WaveModel& model, const Coords& r, double t) {
  if (r.size() != model.dimension()) {
    throw DimensionMismatch("single-particle coordinate has wrong dimension");
  }
  return factor_b(model, r, t).value;
}

double packet_overlap(const WaveModel& model) {
  const auto& c = model.constants();
  if (const auto* g = model.as<GaussianSlit>()) {
    return std::exp(-g->a * g->a / (2.0 * g->sigma0 * g->sigma0) -
                    2.0 * g->kx * g->kx * g->sigma0 * g->sigma0);
  }
  if (const auto* o = model.as<OscillatorPair>()) {
    const double alpha = c.mass * o->omega / c.hbar;
    return std::exp(-alpha * o->a * o->a);
  }
  throw NotNormalizable("plane-wave pair has uniform marginal densities");
}

double normalization_constant(const WaveModel& model, double /*t*/) {
  const double overlap = packet_overlap(model);
  if (model.composition() == Composition::Product) {
    // integral |psi_A + psi_B|^2 = 2 (1 + <A|B>), squared for two particles.
    return 1.0 / (2.0 * (1.0 + overlap));
  }
  return 1.0 / std::sqrt(2.0 * (1.0 + overlap * overlap));
}

double reference_density(const WaveModel& model, double t) {
  const auto& c = model.constants();
  return std::visit(
      Overloaded{
          [](const PlaneWavePair&) { return 4.0; },
          [&](const OscillatorPair& o) { return c.mass * o.omega / (c.hbar * kPi); },
          [&](const GaussianSlit& g) {
            const double tau = model.spreading_parameter(t);
            return 1.0 / (2.0 * kPi * g.sigma0 * g.sigma0 * (1.0 + tau * tau));
          },
      },
      model.variant());
}

double packet_center(const WaveModel& model, double t) {
  const auto& c = model.constants();
  return std::visit(
      Overloaded{
          [](const PlaneWavePair&) { return 0.0; },
          [&](const OscillatorPair& o) { return o.a * std::cos(o.omega * t); },
          [&](const GaussianSlit& g) { return g.a + c.hbar * g.kx * t / c.mass; },
      },
      model.variant());
}

double packet_width(const WaveModel& model, double t) {
  const auto& c = model.constants();
  if (const auto* g = model.as<GaussianSlit>()) {
    const double tau = model.spreading_parameter(t);
    return g->sigma0 * std::sqrt(1.0 + tau * tau);
  }
  if (const auto* o = model.as<OscillatorPair>()) {
    return std::sqrt(c.hbar / (2.0 * c.mass * o->omega));
  }
  throw NotNormalizable("plane waves have no packet width");
}

}  // namespace bohm2p
