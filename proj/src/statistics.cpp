#include "bohm2p/statistics.hpp"

#include <cmath>
#include <string>

#include "bohm2p/dynamics.hpp"
#include "bohm2p/errors.hpp"
#include "bohm2p/parallel.hpp"

namespace bohm2p {

void Region::validate() const {
  for (const Bounds* b : {&x, &y}) {
    if (std::isnan(b->lo) || std::isnan(b->hi)) throw InvalidArgument("region bound is NaN");
    if (b->finite_lo() && b->finite_hi() && !(b->lo < b->hi)) {
      throw InvalidArgument("region lower bound must be below the upper bound");
    }
  }
}

namespace {

constexpr double kSupportWidths = 9.0;

ConfigPoint x_point(const WaveModel& model, double x1, double x2, double t) {
  if (model.dimension() == 1) return {{x1}, {x2}, t};
  return {{x1, 0.0}, {x2, 0.0}, t};
}

void require_quadrature_region(const WaveModel& model, const Region& r) {
  r.validate();
  if (model.dimension() == 2 && !r.y.unbounded()) {
    throw NotNormalizable(
        "the density is uniform along y; quadrature regions must leave y unbounded");
  }
}

}  // namespace

quadrature::Interval density_support(const WaveModel& model, double t) {
  if (!model.normalizable()) throw NotNormalizable("plane waves have no bounded support");
  const double reach =
      std::abs(packet_center(model, t)) + kSupportWidths * packet_width(model, t);
  return {-reach, reach};
}

double ordered_joint_probability(const WaveModel& model, const Region& r1,
                                 const Region& r2, double t,
                                 const quadrature::AdaptiveSettings& settings) {
  require_quadrature_region(model, r1);
  require_quadrature_region(model, r2);
  const quadrature::Interval support = density_support(model, t);
  const Bounds s{support.lo, support.hi};
  const Bounds b1 = r1.x.intersect(s);
  const Bounds b2 = r2.x.intersect(s);
  if (b1.empty() || b2.empty()) return 0.0;

  const double n = normalization_constant(model, t);
  const double norm2 = n * n;
  auto integrand = [&](double x1, double x2) {
    return norm2 * norm_squared_density(model, x_point(model, x1, x2, t));
  };
  const auto result =
      quadrature::integrate_adaptive(integrand, {b1.lo, b1.hi}, {b2.lo, b2.hi}, settings);
  if (!result.converged) {
    throw QuadratureNotConverged("joint probability did not converge with " +
                                 std::to_string(result.panels) +
                                 " panels per axis; last change " +
                                 std::to_string(result.change));
  }
  return result.value;
}

double joint_probability(const WaveModel& model, const Region& r1, const Region& r2,
                         double t, const quadrature::AdaptiveSettings& settings) {
  const Region overlap = r1.intersect(r2);
  const double forward = ordered_joint_probability(model, r1, r2, t, settings);
  const double backward = ordered_joint_probability(model, r2, r1, t, settings);
  const double both =
      overlap.x.empty() ? 0.0 : ordered_joint_probability(model, overlap, overlap, t, settings);
  return std::clamp(forward + backward - both, 0.0, 1.0);
}

bool DetectionReport::agrees(double n_sigma) const {
  return std::abs(bohmian_fraction - quantum_probability) <= n_sigma * mc_standard_error;
}

DetectionReport bohmian_detection(const Ensemble& ensemble, const Region& r1,
                                  const Region& r2, double t,
                                  const quadrature::AdaptiveSettings& settings) {
  r1.validate();
  r2.validate();
  const std::size_t index = ensemble.time_index(t);
  std::size_t n = 0, hits = 0;
  for (const Trajectory& traj : ensemble.trajectories) {
    if (!traj.completed()) continue;
    ++n;
    const ConfigPoint& p = traj.points[index];
    if ((r1.contains(p.r1) && r2.contains(p.r2)) || (r2.contains(p.r1) && r1.contains(p.r2))) {
      ++hits;
    }
  }
  if (n == 0) throw EmptyEnsemble("no completed trajectories to tally");

  DetectionReport report;
  report.n_effective = n;
  report.bohmian_fraction = static_cast<double>(hits) / static_cast<double>(n);
  report.quantum_probability = joint_probability(ensemble.model, r1, r2, t, settings);
  const double p = report.quantum_probability;
  report.mc_standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return report;
}

Histogram make_histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw InvalidArgument("histogram needs at least one bin");
  Histogram h;
  h.counts.assign(bins, 0);
  if (values.empty()) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lo = *mn;
  h.hi = *mx;
  if (!(h.hi > h.lo)) {
    h.lo -= 0.5;
    h.hi += 0.5;
  }
  for (double v : values) {
    auto i = static_cast<std::size_t>((v - h.lo) / h.bin_width());
    h.counts[std::min(i, bins - 1)] += 1;
  }
  return h;
}

CrossingSummary crossing_statistics(const Ensemble& ensemble, double plane_x, double t,
                                    std::size_t midpoint_bins) {
  const std::size_t index = ensemble.time_index(t);
  CrossingSummary out;
  bool has_constraint = true;
  for (const Trajectory& traj : ensemble.trajectories) {
    if (!traj.completed()) continue;
    ++out.pairs;
    const ConfigPoint& p = traj.points[index];
    const bool above1 = p.r1[0] > plane_x, above2 = p.r2[0] > plane_x;
    if (above1 && above2) {
      ++out.both_above;
    } else if (!above1 && !above2) {
      ++out.both_below;
    } else {
      ++out.split;
    }
    out.midpoints.push_back(0.5 * (traj.points.front().r1[0] + traj.points.front().r2[0]));

    for (const ConfigPoint& q : traj.points) {
      const double tol =
          1e-3 * (ensemble.model.normalizable() ? packet_width(ensemble.model, q.t) : 1.0);
      if (std::abs(q.r1[0] - plane_x) < tol && std::abs(q.r2[0] - plane_x) < tol) {
        ++out.simultaneous_plane_visits;
        break;
      }
    }
    if (has_constraint) {
      try {
        out.max_constraint_residual =
            std::max(out.max_constraint_residual, constraint_residual(ensemble.model, traj));
      } catch (const UnsupportedModel&) {
        has_constraint = false;
        out.max_constraint_residual = -1.0;
      }
    }
  }
  if (out.pairs == 0) throw EmptyEnsemble("no completed trajectories for crossing statistics");
  out.midpoint_histogram = make_histogram(out.midpoints, midpoint_bins);
  return out;
}

CrossingSummary crossing_statistics(const Ensemble& ensemble, double plane_x) {
  if (ensemble.times.empty()) throw EmptyEnsemble("ensemble has no time grid");
  return crossing_statistics(ensemble, plane_x, ensemble.times.back());
}

std::string_view to_string(MarginalCoordinate c) {
  switch (c) {
    case MarginalCoordinate::X1: return "x1";
    case MarginalCoordinate::X2: return "x2";
    case MarginalCoordinate::Sum: return "x1+x2";
  }
  return "?";
}

MarginalCoordinate parse_marginal_coordinate(std::string_view name) {
  if (name == "x1") return MarginalCoordinate::X1;
  if (name == "x2") return MarginalCoordinate::X2;
  if (name == "x1+x2" || name == "sum") return MarginalCoordinate::Sum;
  throw InvalidArgument("unknown marginal coordinate '" + std::string(name) +
                        "' (expected x1, x2 or x1+x2)");
}

MarginalDistribution::MarginalDistribution(const WaveModel& model,
                                           MarginalCoordinate coordinate, double t,
                                           std::size_t cells, unsigned threads)
    : model_(model),
      coordinate_(coordinate),
      t_(t),
      support_(density_support(model, t)),
      inner_rule_(quadrature::gauss_legendre(12)) {
  if (cells < 2) throw InvalidArgument("marginal table needs at least two cells");
  const double n = normalization_constant(model, t);
  norm2_ = n * n;
  const double scale = coordinate == MarginalCoordinate::Sum ? 2.0 : 1.0;
  lo_ = scale * support_.lo;
  hi_ = scale * support_.hi;
  h_ = (hi_ - lo_) / static_cast<double>(cells);

  edge_density_.assign(cells + 1, 0.0);
  std::vector<double> cell_mass(cells, 0.0);
  const quadrature::Rule cell_rule = quadrature::gauss_legendre(4);
  parallel_for(cells + 1, threads, [&](std::size_t k) {
    const double u0 = lo_ + static_cast<double>(k) * h_;
    edge_density_[k] = raw_density(u0);
    if (k == cells) return;
    double mass = 0.0;
    for (std::size_t j = 0; j < cell_rule.nodes.size(); ++j) {
      mass += cell_rule.weights[j] * raw_density(u0 + 0.5 * h_ * (1.0 + cell_rule.nodes[j]));
    }
    cell_mass[k] = 0.5 * h_ * mass;
  });
  edge_cdf_.assign(cells + 1, 0.0);
  for (std::size_t k = 0; k < cells; ++k) edge_cdf_[k + 1] = edge_cdf_[k] + cell_mass[k];
  mass_ = edge_cdf_.back();
  for (double& v : edge_cdf_) v /= mass_;
  for (double& v : edge_density_) v /= mass_;
}

double MarginalDistribution::raw_density(double u) const {
  double vlo = support_.lo, vhi = support_.hi;
  if (coordinate_ == MarginalCoordinate::Sum) {
    vlo = std::max(support_.lo, u - support_.hi);
    vhi = std::min(support_.hi, u - support_.lo);
    if (!(vhi > vlo)) return 0.0;
  }
  auto integrand = [&](double v) {
    switch (coordinate_) {
      case MarginalCoordinate::X1:
        return norm_squared_density(model_, x_point(model_, u, v, t_));
      case MarginalCoordinate::X2:
        return norm_squared_density(model_, x_point(model_, v, u, t_));
      case MarginalCoordinate::Sum:
        return norm_squared_density(model_, x_point(model_, v, u - v, t_));
    }
    return 0.0;
  };
  return norm2_ * quadrature::integrate(integrand, {vlo, vhi}, inner_panels_, inner_rule_);
}

double MarginalDistribution::density(double u) const {
  if (u <= lo_ || u >= hi_) return 0.0;
  return raw_density(u) / mass_;
}

double MarginalDistribution::cdf(double u) const {
  if (u <= lo_) return 0.0;
  if (u >= hi_) return 1.0;
  const std::size_t cells = edge_cdf_.size() - 1;
  const std::size_t k = std::min(cells - 1, static_cast<std::size_t>((u - lo_) / h_));
  const double s = (u - (lo_ + static_cast<double>(k) * h_)) / h_;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  const double value = h00 * edge_cdf_[k] + h10 * h_ * edge_density_[k] +
                       h01 * edge_cdf_[k + 1] + h11 * h_ * edge_density_[k + 1];
  return std::clamp(value, 0.0, 1.0);
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0) throw InvalidArgument("KS critical value needs n > 0");
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

std::vector<double> coordinate_values(const Ensemble& ensemble, MarginalCoordinate coordinate,
                                      std::size_t index) {
  std::vector<double> out;
  out.reserve(ensemble.trajectories.size());
  for (const Trajectory& traj : ensemble.trajectories) {
    if (!traj.completed()) continue;
    const ConfigPoint& p = traj.points.at(index);
    switch (coordinate) {
      case MarginalCoordinate::X1: out.push_back(p.r1[0]); break;
      case MarginalCoordinate::X2: out.push_back(p.r2[0]); break;
      case MarginalCoordinate::Sum: out.push_back(p.r1[0] + p.r2[0]); break;
    }
  }
  return out;
}

MarginalReport marginal_histogram(const Ensemble& ensemble, MarginalCoordinate coordinate,
                                  double t, std::size_t bins, unsigned threads) {
  if (!ensemble.model.normalizable()) {
    throw NotNormalizable("plane-wave marginals are uniform; no reference distribution");
  }
  const std::vector<double> values =
      coordinate_values(ensemble, coordinate, ensemble.time_index(t));
  if (values.empty()) throw EmptyEnsemble("no completed trajectories for the marginal");

  const MarginalDistribution reference(ensemble.model, coordinate, t, 512, threads);
  MarginalReport report;
  report.coordinate = coordinate;
  report.t = t;
  report.n = values.size();
  report.histogram = make_histogram(values, bins);
  report.quantum_density.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    const Histogram& h = report.histogram;
    report.quantum_density[i] =
        (reference.cdf(h.bin_high(i)) - reference.cdf(h.bin_low(i))) / h.bin_width();
  }
  report.ks_distance = ks_distance(values, [&](double u) { return reference.cdf(u); });
  report.ks_critical = ks_critical_value(values.size());
  return report;
}

}  // namespace bohm2p
