#pragma once

// Closed-form two-particle wave functions for a two-slit geometry that is
// mirror-symmetric about the x = 0 plane.
//
// Every model is built from a pair of single-particle functions psi_A, psi_B
// related by reflection, psi_A(x, y; t) = psi_B(-x, y; t), and composed either
// symmetrically (psi_A(r1) psi_B(r2) + psi_A(r2) psi_B(r1)) or as a product
// ((psi_A + psi_B)(r1) * (psi_A + psi_B)(r2)). Amplitudes are returned
// unnormalized; normalization_constant() supplies the factor where needed.

#include <cstddef>
#include <string_view>
#include <variant>

#include "bohm2p/types.hpp"

namespace bohm2p {

struct PhysicalConstants {
  double hbar = 1.0;
  double mass = 1.0;
};

/// Free plane waves exp{i(kx x + ky y)}; 2D per particle, not normalizable.
struct PlaneWavePair {
  double kx = 1.0;
  double ky = 1.0;
};

/// Coherent harmonic-oscillator packets oscillating between x = a and x = -a;
/// 1D per particle, always symmetrized.
struct OscillatorPair {
  double omega = 1.0;
  double a = 1.0;
};

enum class Composition { Symmetrized, Product };

/// Freely spreading Gaussian packets leaving slits at x = +a and x = -a, with
/// a plane-wave factor along y; 2D per particle.
struct GaussianSlit {
  double sigma0 = 1.0;
  double a = 10.0;
  double kx = 0.0;
  double ky = 0.0;
  Composition composition = Composition::Symmetrized;
};

using ModelVariant = std::variant<PlaneWavePair, OscillatorPair, GaussianSlit>;

class WaveModel {
 public:
  /// Throws InvalidArgument when a parameter violates its domain.
  explicit WaveModel(ModelVariant variant, PhysicalConstants constants = {});

  const ModelVariant& variant() const { return variant_; }
  const PhysicalConstants& constants() const { return constants_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&variant_);
  }

  /// Coordinates per particle: 1 for OscillatorPair, 2 otherwise.
  std::size_t dimension() const;
  bool normalizable() const;
  Composition composition() const;
  std::string_view name() const;

  /// hbar*t / (2 m sigma0^2) for GaussianSlit; zero for other variants.
  double spreading_parameter(double t) const;

 private:
  ModelVariant variant_;
  PhysicalConstants constants_;
};

struct GradientPair {
  ComplexVector d1;  // gradient with respect to r1
  ComplexVector d2;  // gradient with respect to r2
};

struct AmplitudeWithGradient {
  Complex psi;
  GradientPair grad;
};

/// Unnormalized two-particle amplitude Psi(r1, r2; t).
Complex evaluate(const WaveModel& model, const ConfigPoint& p);

/// Closed-form (grad_1 Psi, grad_2 Psi).
GradientPair gradient(const WaveModel& model, const ConfigPoint& p);

/// Amplitude and gradients from one pass over the single-particle factors.
AmplitudeWithGradient evaluate_with_gradient(const WaveModel& model,
                                             const ConfigPoint& p);

/// |Psi|^2, unnormalized.
double norm_squared_density(const WaveModel& model, const ConfigPoint& p);

/// N such that N^2 * integral |Psi|^2 = 1. For GaussianSlit the integral runs
/// over x1, x2 only: the density is uniform along y, so it is normalized per
/// unit length in each y. Throws NotNormalizable for PlaneWavePair.
double normalization_constant(const WaveModel& model, double t);

/// <psi_A | psi_B> over x, which is real and time independent for every
/// normalizable model. Throws NotNormalizable for PlaneWavePair.
double packet_overlap(const WaveModel& model);

/// Single-particle factors psi_A(r; t) and psi_B(r; t) = psi_A(r'; t).
Complex single_particle_a(const WaveModel& model, const Coords& r, double t);
Complex single_particle_b(const WaveModel& model, const Coords& r, double t);

/// Characteristic size of |Psi|^2 at time t: the product of the two
/// single-particle peak densities (4 for plane waves). Used as the scale for
/// node detection.
double reference_density(const WaveModel& model, double t);

/// Position of the psi_A packet centre along x at time t (psi_B sits at the
/// mirror image). Zero for plane waves.
double packet_center(const WaveModel& model, double t);

/// Standard deviation of a single-particle |psi|^2 along x at time t:
/// sigma0 * sqrt(1 + tau^2) for GaussianSlit, sqrt(hbar / 2 m omega) for the
/// oscillator. Throws NotNormalizable for plane waves.
double packet_width(const WaveModel& model, double t);

/// Throws DimensionMismatch unless both coordinates match the model.
void require_dimension(const WaveModel& model, const ConfigPoint& p);

}  // namespace bohm2p
