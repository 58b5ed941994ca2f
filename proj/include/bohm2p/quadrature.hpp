#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace bohm2p::quadrature {

/// n-point Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Newton iteration on P_n from the Chebyshev initial guesses; nodes are
/// accurate to a few ulps for n up to several hundred.
Rule gauss_legendre(std::size_t n);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

using Integrand1D = std::function<double(double)>;
using Integrand2D = std::function<double(double, double)>;

/// Composite rule: `panels` equal panels, each with `rule`.
double integrate(const Integrand1D& f, Interval x, std::size_t panels,
                 const Rule& rule);

/// Tensor-product composite rule over x panels by y panels. Rows of x panels
/// are summed in a fixed order whatever `threads` is.
double integrate(const Integrand2D& f, Interval x, Interval y, std::size_t panels,
                 const Rule& rule, unsigned threads = 1);

struct AdaptiveSettings {
  std::size_t order = 20;            // nodes per panel per axis
  std::size_t initial_panels = 4;
  std::size_t max_panels = 256;
  double rel_tol = 1e-8;
  /// Absolute change below which two refinements count as converged even
  /// when the integral itself is tiny.
  double abs_floor = 1e-15;
  unsigned threads = 1;
};

struct AdaptiveResult {
  double value = 0.0;
  std::size_t panels = 0;  // panels per axis in the accepted estimate
  double change = 0.0;     // |last - previous|
  bool converged = false;
};

/// Doubles the panel count per axis until successive estimates differ by
/// less than rel_tol * |value| + abs_floor.
AdaptiveResult integrate_adaptive(const Integrand2D& f, Interval x, Interval y,
                                  const AdaptiveSettings& settings = {});

}  // namespace bohm2p::quadrature
