#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "bohm2p/ensemble.hpp"
#include "bohm2p/quadrature.hpp"
#include "bohm2p/wavefunction.hpp"

namespace bohm2p {

struct Bounds {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double v) const { return v >= lo && v <= hi; }
  bool finite_lo() const { return lo > -std::numeric_limits<double>::infinity(); }
  bool finite_hi() const { return hi < std::numeric_limits<double>::infinity(); }
  bool unbounded() const { return !finite_lo() && !finite_hi(); }
  bool empty() const { return !(lo < hi); }
  Bounds intersect(const Bounds& o) const {
    return {std::max(lo, o.lo), std::min(hi, o.hi)};
  }
};

/// Axis-aligned single-particle detection region. The y bounds are ignored
/// for 1D models.
struct Region {
  Bounds x;
  Bounds y;

  static Region everywhere() { return {}; }
  static Region x_above(double plane) { return {{plane, Bounds{}.hi}, {}}; }
  static Region x_below(double plane) { return {{Bounds{}.lo, plane}, {}}; }

  bool contains(const Coords& r) const {
    return x.contains(r[0]) && (r.size() < 2 || y.contains(r[1]));
  }
  Region intersect(const Region& o) const { return {x.intersect(o.x), y.intersect(o.y)}; }
  /// Throws InvalidArgument when a finite lower bound is not below the upper.
  void validate() const;
};

/// Truncated x-interval outside which a single-particle |psi|^2 at time t is
/// below 1e-16 of its peak (centre +- 9 packet widths, on both slits).
quadrature::Interval density_support(const WaveModel& model, double t);

/// Ordered probability that x1 lies in r1 and x2 in r2, normalized.
double ordered_joint_probability(const WaveModel& model, const Region& r1,
                                 const Region& r2, double t,
                                 const quadrature::AdaptiveSettings& settings = {});

/// Probability that one particle is found in r1 and the other in r2:
///   P(r1 x r2) + P(r2 x r1) - P((r1 n r2) x (r1 n r2)).
/// Throws NotNormalizable for plane waves and for Gaussian-slit regions with
/// finite y bounds (the density is uniform along y). Throws
/// QuadratureNotConverged if panel doubling stalls.
double joint_probability(const WaveModel& model, const Region& r1, const Region& r2,
                         double t, const quadrature::AdaptiveSettings& settings = {});

struct DetectionReport {
  double quantum_probability = 0.0;
  double bohmian_fraction = 0.0;
  /// Binomial standard error sqrt(p (1 - p) / n) with p the quantum
  /// probability, i.e. the spread expected if the ensemble follows |Psi|^2.
  double mc_standard_error = 0.0;
  std::size_t n_effective = 0;
  bool symmetrized_over_exchange = true;

  bool agrees(double n_sigma = 3.0) const;
};

/// Fraction of completed pairs with one particle in r1 and the other in r2 at
/// grid time t, paired with the quadrature probability. Throws EmptyEnsemble
/// when no trajectory completed.
DetectionReport bohmian_detection(const Ensemble& ensemble, const Region& r1,
                                  const Region& r2, double t,
                                  const quadrature::AdaptiveSettings& settings = {});

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;

  std::size_t bins() const { return counts.size(); }
  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double bin_low(std::size_t i) const { return lo + static_cast<double>(i) * bin_width(); }
  double bin_high(std::size_t i) const { return lo + static_cast<double>(i + 1) * bin_width(); }
};

/// Equal-width histogram over [min, max] of `values`; the top edge is
/// inclusive.
Histogram make_histogram(std::span<const double> values, std::size_t bins);

struct CrossingSummary {
  std::size_t pairs = 0;  // completed pairs considered
  std::size_t both_above = 0;
  std::size_t both_below = 0;
  std::size_t split = 0;
  std::vector<double> midpoints;  // (x1(0) + x2(0)) / 2 per completed pair
  Histogram midpoint_histogram;
  /// Pairs with both particles within 1e-3 packet widths of the plane at the
  /// same grid time. Reported only; no bound is placed on it.
  std::size_t simultaneous_plane_visits = 0;
  /// Largest constraint_residual over completed pairs; negative when the
  /// model has no centre-of-mass constraint.
  double max_constraint_residual = -1.0;

  double same_side_fraction() const {
    return pairs == 0 ? 0.0 : static_cast<double>(both_above + both_below) /
                                  static_cast<double>(pairs);
  }
};

/// Side-of-plane counts at grid time t for completed pairs.
CrossingSummary crossing_statistics(const Ensemble& ensemble, double plane_x, double t,
                                    std::size_t midpoint_bins = 40);
/// As above at the final grid time.
CrossingSummary crossing_statistics(const Ensemble& ensemble, double plane_x);

enum class MarginalCoordinate { X1, X2, Sum };

std::string_view to_string(MarginalCoordinate c);
MarginalCoordinate parse_marginal_coordinate(std::string_view name);

/// One-dimensional marginal of the normalized |Psi(t)|^2 along x1, x2 or
/// x1 + x2, tabulated by quadrature. cdf() interpolates the tabulated CDF
/// with cubic Hermite pieces using the density as slope.
class MarginalDistribution {
 public:
  MarginalDistribution(const WaveModel& model, MarginalCoordinate coordinate, double t,
                       std::size_t cells = 512, unsigned threads = 1);

  double density(double u) const;
  double cdf(double u) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  /// Integral of the raw density before renormalization; close to 1.
  double total_mass() const { return mass_; }

 private:
  double raw_density(double u) const;

  const WaveModel& model_;
  MarginalCoordinate coordinate_;
  double t_;
  double lo_ = 0.0, hi_ = 0.0, h_ = 0.0;
  double norm2_ = 1.0;
  quadrature::Interval support_;
  quadrature::Rule inner_rule_;
  std::size_t inner_panels_ = 32;
  std::vector<double> edge_cdf_;
  std::vector<double> edge_density_;
  double mass_ = 1.0;
};

/// Two-sided one-sample Kolmogorov-Smirnov distance between `samples` and a
/// reference CDF.
template <class Cdf>
double ks_distance(std::vector<double> samples, const Cdf& cdf);

/// Asymptotic critical value sqrt(-ln(alpha/2) / 2) / sqrt(n); 1.628/sqrt(n)
/// at alpha = 0.01.
double ks_critical_value(std::size_t n, double alpha = 0.01);

struct MarginalReport {
  MarginalCoordinate coordinate = MarginalCoordinate::X1;
  double t = 0.0;
  Histogram histogram;
  std::vector<double> quantum_density;  // mean normalized density per bin
  double ks_distance = 0.0;
  double ks_critical = 0.0;
  std::size_t n = 0;

  bool passes() const { return ks_distance < ks_critical; }
};

/// Histogram of completed-trajectory positions at grid time t and their KS
/// distance to the quadrature marginal. Throws NotNormalizable for plane
/// waves and EmptyEnsemble when nothing completed.
MarginalReport marginal_histogram(const Ensemble& ensemble, MarginalCoordinate coordinate,
                                  double t, std::size_t bins, unsigned threads = 1);

/// Coordinate values of completed trajectories at grid index `index`.
std::vector<double> coordinate_values(const Ensemble& ensemble, MarginalCoordinate coordinate,
                                      std::size_t index);

// ---------------------------------------------------------------------------

template <class Cdf>
double ks_distance(std::vector<double> samples, const Cdf& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace bohm2p
