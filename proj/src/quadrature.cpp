#include "bohm2p/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "bohm2p/errors.hpp"
#include "bohm2p/parallel.hpp"

namespace bohm2p::quadrature {

Rule gauss_legendre(std::size_t n) {
  if (n == 0) throw InvalidArgument("Gauss-Legendre rule needs at least one node");
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
    }
    dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

double integrate(const Integrand1D& f, Interval x, std::size_t panels,
                 const Rule& rule) {
  if (panels == 0) throw InvalidArgument("panel count must be positive");
  const double h = x.width() / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = x.lo + (static_cast<double>(p) + 0.5) * h;
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      sum += rule.weights[k] * f(mid + 0.5 * h * rule.nodes[k]);
    }
    total += 0.5 * h * sum;
  }
  return total;
}

double integrate(const Integrand2D& f, Interval x, Interval y, std::size_t panels,
                 const Rule& rule, unsigned threads) {
  if (panels == 0) throw InvalidArgument("panel count must be positive");
  const double hx = x.width() / static_cast<double>(panels);
  const double hy = y.width() / static_cast<double>(panels);
  const std::size_t m = rule.nodes.size();

  std::vector<double> ys(panels * m), wy(panels * m);
  for (std::size_t q = 0; q < panels; ++q) {
    const double mid = y.lo + (static_cast<double>(q) + 0.5) * hy;
    for (std::size_t k = 0; k < m; ++k) {
      ys[q * m + k] = mid + 0.5 * hy * rule.nodes[k];
      wy[q * m + k] = 0.5 * hy * rule.weights[k];
    }
  }

  std::vector<double> rows(panels, 0.0);
  parallel_for(panels, threads, [&](std::size_t p) {
    const double mid = x.lo + (static_cast<double>(p) + 0.5) * hx;
    double row = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double xv = mid + 0.5 * hx * rule.nodes[i];
      double inner = 0.0;
      for (std::size_t j = 0; j < ys.size(); ++j) inner += wy[j] * f(xv, ys[j]);
      row += 0.5 * hx * rule.weights[i] * inner;
    }
    rows[p] = row;
  });
  double total = 0.0;
  for (double r : rows) total += r;
  return total;
}

AdaptiveResult integrate_adaptive(const Integrand2D& f, Interval x, Interval y,
                                  const AdaptiveSettings& settings) {
  const Rule rule = gauss_legendre(settings.order);
  AdaptiveResult result;
  std::size_t panels = std::max<std::size_t>(1, settings.initial_panels);
  double previous = integrate(f, x, y, panels, rule, settings.threads);
  while (panels * 2 <= settings.max_panels) {
    panels *= 2;
    const double current = integrate(f, x, y, panels, rule, settings.threads);
    result.value = current;
    result.panels = panels;
    result.change = std::abs(current - previous);
    if (result.change <= settings.rel_tol * std::abs(current) + settings.abs_floor) {
      result.converged = true;
      return result;
    }
    previous = current;
  }
  result.value = previous;
  result.panels = panels;
  return result;
}

}  // namespace bohm2p::quadrature
