#include "bohm2p/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "bohm2p/errors.hpp"
#include "bohm2p/output.hpp"
#include "bohm2p/parallel.hpp"

namespace bohm2p {

using nlohmann::json;

std::vector<double> TimeGrid::values() const {
  std::vector<double> out;
  const std::size_t n = n_samples_along_t;
  out.reserve(n + extra_times.size());
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(i + 1 == n ? t_end
                             : t_start + (t_end - t_start) * static_cast<double>(i) /
                                             static_cast<double>(n - 1));
  }
  out.insert(out.end(), extra_times.begin(), extra_times.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Parsing

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  return j;
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ConfigError(join(path, it.key()), "unknown field");
    }
  }
}

const json* find(const json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

enum class Domain { Any, Positive, NonNegative };

double number(const json& obj, const std::string& path, std::string_view key,
              std::optional<double> fallback, Domain domain = Domain::Any) {
  const std::string field = join(path, key);
  const json* j = find(obj, key);
  if (j == nullptr) {
    if (!fallback) throw ConfigError(field, "required field is missing");
    return *fallback;
  }
  const double v = as_number(*j, field);
  if (domain == Domain::Positive && !(v > 0.0)) throw ConfigError(field, "must be positive");
  if (domain == Domain::NonNegative && v < 0.0) throw ConfigError(field, "must be non-negative");
  return v;
}

std::size_t count(const json& obj, const std::string& path, std::string_view key,
                  std::optional<std::size_t> fallback, std::size_t min_value = 0) {
  const std::string field = join(path, key);
  const json* j = find(obj, key);
  if (j == nullptr) {
    if (!fallback) throw ConfigError(field, "required field is missing");
    return *fallback;
  }
  if (!j->is_number_integer() || j->get<long long>() < 0) {
    throw ConfigError(field, "expected a non-negative integer");
  }
  const auto v = j->get<std::size_t>();
  if (v < min_value) {
    throw ConfigError(field, "must be at least " + std::to_string(min_value));
  }
  return v;
}

std::string string(const json& obj, const std::string& path, std::string_view key,
                   std::optional<std::string> fallback) {
  const std::string field = join(path, key);
  const json* j = find(obj, key);
  if (j == nullptr) {
    if (!fallback) throw ConfigError(field, "required field is missing");
    return *fallback;
  }
  if (!j->is_string()) throw ConfigError(field, "expected a string");
  return j->get<std::string>();
}

std::vector<std::string> string_list(const json& obj, const std::string& path,
                                     std::string_view key) {
  const std::string field = join(path, key);
  const json* j = find(obj, key);
  if (j == nullptr) return {};
  if (!j->is_array()) throw ConfigError(field, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j->size(); ++i) {
    if (!(*j)[i].is_string()) throw ConfigError(index_path(field, i), "expected a string");
    out.push_back((*j)[i].get<std::string>());
  }
  return out;
}

std::vector<double> number_list(const json& obj, const std::string& path, std::string_view key) {
  const std::string field = join(path, key);
  const json* j = find(obj, key);
  if (j == nullptr) return {};
  if (!j->is_array()) throw ConfigError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j->size(); ++i) out.push_back(as_number((*j)[i], index_path(field, i)));
  return out;
}

WaveModel parse_model(const json& doc) {
  const json* m = find(doc, "model");
  if (m == nullptr) throw ConfigError("model", "required field is missing");
  require_object(*m, "model");

  PhysicalConstants constants;
  if (const json* c = find(doc, "constants")) {
    require_object(*c, "constants");
    reject_unknown(*c, "constants", {"hbar", "mass"});
    constants.hbar = number(*c, "constants", "hbar", 1.0, Domain::Positive);
    constants.mass = number(*c, "constants", "mass", 1.0, Domain::Positive);
  }

  const std::string type = string(*m, "model", "type", std::nullopt);
  if (type == "plane_wave_pair") {
    reject_unknown(*m, "model", {"type", "kx", "ky"});
    return WaveModel(PlaneWavePair{number(*m, "model", "kx", 1.0), number(*m, "model", "ky", 1.0)},
                     constants);
  }
  if (type == "oscillator_pair") {
    reject_unknown(*m, "model", {"type", "omega", "a"});
    return WaveModel(OscillatorPair{number(*m, "model", "omega", 1.0, Domain::Positive),
                                    number(*m, "model", "a", 1.0)},
                     constants);
  }
  if (type == "gaussian_slit") {
    reject_unknown(*m, "model", {"type", "sigma0", "a", "kx", "ky", "composition"});
    GaussianSlit g;
    g.sigma0 = number(*m, "model", "sigma0", 1.0, Domain::Positive);
    g.a = number(*m, "model", "a", 10.0);
    g.kx = number(*m, "model", "kx", 0.0);
    g.ky = number(*m, "model", "ky", 0.0);
    const std::string comp = string(*m, "model", "composition", "symmetrized");
    if (comp == "symmetrized") {
      g.composition = Composition::Symmetrized;
    } else if (comp == "product") {
      g.composition = Composition::Product;
    } else {
      throw ConfigError("model.composition", "expected 'symmetrized' or 'product'");
    }
    return WaveModel(g, constants);
  }
  throw ConfigError("model.type",
                    "expected 'plane_wave_pair', 'oscillator_pair' or 'gaussian_slit'");
}

SamplerSettings parse_sampler(const json& doc) {
  SamplerSettings s;
  const json* j = find(doc, "sampler");
  if (j == nullptr) return s;
  const std::string path = "sampler";
  require_object(*j, path);
  reject_unknown(*j, path,
                 {"n_samples", "seed", "burn_in", "thinning", "proposal_scale", "chain_length", "y0"});
  s.n_samples = count(*j, path, "n_samples", s.n_samples, 1);
  s.seed = count(*j, path, "seed", 0);
  s.burn_in = count(*j, path, "burn_in", s.burn_in);
  s.thinning = count(*j, path, "thinning", s.thinning, 1);
  s.chain_length = count(*j, path, "chain_length", s.chain_length, 1);
  if (find(*j, "proposal_scale") != nullptr) {
    s.proposal_scale = number(*j, path, "proposal_scale", std::nullopt, Domain::Positive);
  }
  s.y0 = number(*j, path, "y0", 0.0);
  return s;
}

IntegratorSettings parse_integrator(const json& doc) {
  IntegratorSettings s;
  const json* j = find(doc, "integrator");
  if (j == nullptr) return s;
  const std::string path = "integrator";
  require_object(*j, path);
  reject_unknown(*j, path, {"rel_tol", "abs_tol", "node_epsilon", "max_steps"});
  s.rel_tol = number(*j, path, "rel_tol", s.rel_tol, Domain::Positive);
  s.abs_tol = number(*j, path, "abs_tol", s.abs_tol, Domain::Positive);
  s.node_epsilon = number(*j, path, "node_epsilon", s.node_epsilon, Domain::Positive);
  s.max_steps = count(*j, path, "max_steps", s.max_steps, 1);
  return s;
}

TimeGrid parse_time_grid(const json& doc) {
  const json* j = find(doc, "time_grid");
  if (j == nullptr) throw ConfigError("time_grid", "required field is missing");
  const std::string path = "time_grid";
  require_object(*j, path);
  reject_unknown(*j, path, {"t_start", "t_end", "n_samples_along_t", "extra_times"});
  TimeGrid g;
  g.t_start = number(*j, path, "t_start", 0.0);
  g.t_end = number(*j, path, "t_end", std::nullopt);
  if (!(g.t_end > g.t_start)) throw ConfigError("time_grid.t_end", "must exceed t_start");
  g.n_samples_along_t = count(*j, path, "n_samples_along_t", 2, 2);
  g.extra_times = number_list(*j, path, "extra_times");
  for (std::size_t i = 0; i < g.extra_times.size(); ++i) {
    if (g.extra_times[i] < g.t_start || g.extra_times[i] > g.t_end) {
      throw ConfigError(index_path("time_grid.extra_times", i), "outside [t_start, t_end]");
    }
  }
  return g;
}

ConfigPoint point_from_array(const json& j, const std::string& field, std::size_t dim, double t) {
  if (!j.is_array() || j.size() != 2 * dim) {
    throw ConfigError(field, "expected " + std::to_string(2 * dim) + " coordinates");
  }
  ConfigPoint p{Coords::zeros(dim), Coords::zeros(dim), t};
  for (std::size_t i = 0; i < dim; ++i) {
    p.r1[i] = as_number(j[i], index_path(field, i));
    p.r2[i] = as_number(j[dim + i], index_path(field, dim + i));
  }
  return p;
}

struct Axis {
  double min, max;
  std::size_t n;
  double at(std::size_t i) const {
    return n == 1 ? min : min + (max - min) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
};

Axis parse_axis(const json& obj, const std::string& path, std::string_view key) {
  const std::string field = join(path, key);
  const json* j = find(obj, key);
  if (j == nullptr) throw ConfigError(field, "required field is missing");
  require_object(*j, field);
  reject_unknown(*j, field, {"min", "max", "n"});
  Axis a{number(*j, field, "min", std::nullopt), number(*j, field, "max", std::nullopt),
         count(*j, field, "n", std::nullopt, 1)};
  if (a.n > 1 && !(a.max > a.min)) throw ConfigError(join(field, "max"), "must exceed min");
  return a;
}

InitialConditions parse_initial(const json& doc, const WaveModel& model, double t_start) {
  InitialConditions ic;
  const json* j = find(doc, "initial");
  if (j == nullptr) {
    if (!model.normalizable()) {
      throw ConfigError("initial", "plane waves cannot be sampled; give points or a grid");
    }
    return ic;
  }
  const std::string path = "initial";
  require_object(*j, path);
  const std::string mode = string(*j, path, "mode", "sample");
  const std::size_t dim = model.dimension();
  if (mode == "sample") {
    reject_unknown(*j, path, {"mode"});
    if (!model.normalizable()) {
      throw ConfigError("initial.mode", "plane waves cannot be sampled; use points or grid");
    }
  } else if (mode == "points") {
    reject_unknown(*j, path, {"mode", "points"});
    ic.mode = InitialConditions::Mode::Points;
    const json* pts = find(*j, "points");
    if (pts == nullptr || !pts->is_array() || pts->empty()) {
      throw ConfigError("initial.points", "expected a non-empty array of points");
    }
    for (std::size_t i = 0; i < pts->size(); ++i) {
      ic.points.push_back(point_from_array((*pts)[i], index_path("initial.points", i), dim, t_start));
    }
  } else if (mode == "grid") {
    reject_unknown(*j, path, {"mode", "x1", "x2", "y1", "y2"});
    ic.mode = InitialConditions::Mode::Grid;
    const Axis x1 = parse_axis(*j, path, "x1");
    const Axis x2 = parse_axis(*j, path, "x2");
    const double y1 = number(*j, path, "y1", 0.0);
    const double y2 = number(*j, path, "y2", 0.0);
    for (std::size_t i = 0; i < x1.n; ++i) {
      for (std::size_t k = 0; k < x2.n; ++k) {
        ConfigPoint p{Coords::zeros(dim), Coords::zeros(dim), t_start};
        p.r1[0] = x1.at(i);
        p.r2[0] = x2.at(k);
        if (dim == 2) {
          p.r1[1] = y1;
          p.r2[1] = y2;
        }
        ic.points.push_back(p);
      }
    }
  } else {
    throw ConfigError("initial.mode", "expected 'sample', 'points' or 'grid'");
  }
  return ic;
}

Bounds parse_bounds(const json& obj, const std::string& path, std::string_view key) {
  const std::string field = join(path, key);
  const json* j = find(obj, key);
  if (j == nullptr) return {};
  if (!j->is_array() || j->size() != 2) {
    throw ConfigError(field, "expected [lo, hi] with null for an open end");
  }
  Bounds b;
  if (!(*j)[0].is_null()) b.lo = as_number((*j)[0], index_path(field, 0));
  if (!(*j)[1].is_null()) b.hi = as_number((*j)[1], index_path(field, 1));
  if (b.empty()) throw ConfigError(field, "lower bound must be below the upper bound");
  return b;
}

Region parse_region(const json& obj, const std::string& path, std::string_view key) {
  const std::string field = join(path, key);
  const json* j = find(obj, key);
  if (j == nullptr) throw ConfigError(field, "required field is missing");
  require_object(*j, field);
  reject_unknown(*j, field, {"x", "y"});
  return Region{parse_bounds(*j, field, "x"), parse_bounds(*j, field, "y")};
}

std::vector<NamedRegionPair> parse_regions(const json& doc) {
  std::vector<NamedRegionPair> out;
  const json* j = find(doc, "regions");
  if (j == nullptr) return out;
  if (!j->is_array()) throw ConfigError("regions", "expected an array");
  for (std::size_t i = 0; i < j->size(); ++i) {
    const std::string path = index_path("regions", i);
    const json& r = require_object((*j)[i], path);
    reject_unknown(r, path, {"name", "r1", "r2"});
    NamedRegionPair pair{string(r, path, "name", std::nullopt), parse_region(r, path, "r1"),
                         parse_region(r, path, "r2")};
    for (const auto& prev : out) {
      if (prev.name == pair.name) throw ConfigError(join(path, "name"), "duplicate region name");
    }
    out.push_back(std::move(pair));
  }
  return out;
}

void require_on_grid(double t, const std::vector<double>& grid, const std::string& field) {
  for (double g : grid) {
    if (std::abs(g - t) <= 1e-12 * std::max(1.0, std::abs(t))) return;
  }
  throw ConfigError(field, "time is not on the time grid (add it to time_grid.extra_times)");
}

MarginalCoordinate parse_coordinate(const json& j, const std::string& field) {
  if (!j.is_string()) throw ConfigError(field, "expected 'x1', 'x2' or 'x1+x2'");
  try {
    return parse_marginal_coordinate(j.get<std::string>());
  } catch (const Error&) {
    throw ConfigError(field, "expected 'x1', 'x2' or 'x1+x2'");
  }
}

std::optional<HistogramSpec> parse_histograms(const json& doc, const std::vector<double>& grid) {
  const json* j = find(doc, "histograms");
  if (j == nullptr) return std::nullopt;
  const std::string path = "histograms";
  require_object(*j, path);
  reject_unknown(*j, path, {"coordinates", "times", "bins"});
  HistogramSpec h;
  h.bins = count(*j, path, "bins", 50, 1);
  const json* coords = find(*j, "coordinates");
  if (coords == nullptr || !coords->is_array()) {
    throw ConfigError("histograms.coordinates", "expected an array");
  }
  for (std::size_t i = 0; i < coords->size(); ++i) {
    h.coordinates.push_back(parse_coordinate((*coords)[i], index_path("histograms.coordinates", i)));
  }
  h.times = number_list(*j, path, "times");
  for (std::size_t i = 0; i < h.times.size(); ++i) {
    require_on_grid(h.times[i], grid, index_path("histograms.times", i));
  }
  return h;
}

const std::vector<std::string_view>& check_kinds() {
  static const std::vector<std::string_view> kinds = {
      "constraint_residual", "coordinate_constancy", "marginal_ks",       "detection_agreement",
      "no_order_swaps",      "same_side_fraction",   "aborted_fraction"};
  return kinds;
}

std::vector<CheckSpec> parse_checks(const json& doc, const WaveModel& model,
                                    const std::vector<double>& grid,
                                    const std::vector<NamedRegionPair>& regions) {
  std::vector<CheckSpec> out;
  const json* j = find(doc, "checks");
  if (j == nullptr) return out;
  if (!j->is_array()) throw ConfigError("checks", "expected an array");
  for (std::size_t i = 0; i < j->size(); ++i) {
    const std::string path = index_path("checks", i);
    const json& c = require_object((*j)[i], path);
    CheckSpec spec;
    spec.kind = string(c, path, "kind", std::nullopt);
    const auto& kinds = check_kinds();
    if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end()) {
      throw ConfigError(join(path, "kind"), "unknown check kind '" + spec.kind + "'");
    }
    spec.name = string(c, path, "name", spec.kind);
    for (const auto& prev : out) {
      if (prev.name == spec.name) throw ConfigError(join(path, "name"), "duplicate check name");
    }
    json params = json::object();

    auto time_param = [&](bool required) {
      const std::optional<double> fallback =
          required ? std::nullopt : std::optional<double>(grid.back());
      const double t = number(c, path, "t", fallback);
      require_on_grid(t, grid, join(path, "t"));
      params["t"] = t;
    };

    if (spec.kind == "constraint_residual") {
      reject_unknown(c, path, {"kind", "name", "max", "min_fraction"});
      if (model.as<OscillatorPair>() == nullptr &&
          !(model.as<GaussianSlit>() != nullptr &&
            model.composition() == Composition::Symmetrized)) {
        throw ConfigError(join(path, "kind"),
                          "needs an oscillator or symmetrized Gaussian slit model");
      }
      params["max"] = number(c, path, "max", std::nullopt, Domain::Positive);
      const double f = number(c, path, "min_fraction", 1.0, Domain::Positive);
      if (f > 1.0) throw ConfigError(join(path, "min_fraction"), "must not exceed 1");
      params["min_fraction"] = f;
    } else if (spec.kind == "coordinate_constancy") {
      reject_unknown(c, path, {"kind", "name", "max"});
      if (model.as<PlaneWavePair>() == nullptr) {
        throw ConfigError(join(path, "kind"), "needs a plane-wave model");
      }
      params["max"] = number(c, path, "max", std::nullopt, Domain::Positive);
    } else if (spec.kind == "marginal_ks") {
      reject_unknown(c, path, {"kind", "name", "coordinate", "t", "alpha"});
      if (!model.normalizable()) throw ConfigError(join(path, "kind"), "needs a normalizable model");
      const json* coord = find(c, "coordinate");
      if (coord == nullptr) throw ConfigError(join(path, "coordinate"), "required field is missing");
      params["coordinate"] = to_string(parse_coordinate(*coord, join(path, "coordinate")));
      time_param(false);
      const double alpha = number(c, path, "alpha", 0.01, Domain::Positive);
      if (!(alpha < 1.0)) throw ConfigError(join(path, "alpha"), "must be below 1");
      params["alpha"] = alpha;
    } else if (spec.kind == "detection_agreement") {
      reject_unknown(c, path, {"kind", "name", "region", "t", "sigmas", "expect", "zero_tol"});
      if (!model.normalizable()) throw ConfigError(join(path, "kind"), "needs a normalizable model");
      const std::string region = string(c, path, "region", std::nullopt);
      const bool known = std::any_of(regions.begin(), regions.end(),
                                     [&](const NamedRegionPair& r) { return r.name == region; });
      if (!known) throw ConfigError(join(path, "region"), "no region named '" + region + "'");
      params["region"] = region;
      time_param(false);
      params["sigmas"] = number(c, path, "sigmas", 3.0, Domain::Positive);
      const std::string expect = string(c, path, "expect", "any");
      if (expect != "any" && expect != "zero" && expect != "positive") {
        throw ConfigError(join(path, "expect"), "expected 'any', 'zero' or 'positive'");
      }
      params["expect"] = expect;
      params["zero_tol"] = number(c, path, "zero_tol", 1e-6, Domain::Positive);
    } else if (spec.kind == "no_order_swaps") {
      reject_unknown(c, path, {"kind", "name"});
    } else if (spec.kind == "same_side_fraction") {
      reject_unknown(c, path, {"kind", "name", "t", "plane", "max"});
      time_param(false);
      params["plane"] = number(c, path, "plane", 0.0);
      const double m = number(c, path, "max", std::nullopt, Domain::NonNegative);
      params["max"] = m;
    } else if (spec.kind == "aborted_fraction") {
      reject_unknown(c, path, {"kind", "name", "max"});
      params["max"] = number(c, path, "max", std::nullopt, Domain::NonNegative);
    }
    spec.params = std::move(params);
    out.push_back(std::move(spec));
  }
  return out;
}

}  // namespace

ScenarioConfig parse_scenario(const json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "",
                 {"schema", "name", "description", "model", "constants", "sampler", "initial",
                  "integrator", "time_grid", "regions", "histograms", "checks",
                  "property_checks", "output", "threads"});
  const std::string schema = string(doc, "", "schema", std::nullopt);
  if (schema != kScenarioSchema) {
    throw ConfigError("schema", "expected '" + std::string(kScenarioSchema) + "', got '" +
                                    schema + "'");
  }

  ScenarioConfig cfg;
  cfg.source = doc;
  cfg.name = string(doc, "", "name", "unnamed");
  cfg.description = string(doc, "", "description", "");
  cfg.model = parse_model(doc);
  cfg.model_json = doc.at("model");
  cfg.sampler = parse_sampler(doc);
  cfg.integrator = parse_integrator(doc);
  cfg.time_grid = parse_time_grid(doc);
  const std::vector<double> grid = cfg.time_grid.values();
  cfg.initial = parse_initial(doc, cfg.model, cfg.time_grid.t_start);
  if (cfg.initial.mode == InitialConditions::Mode::Sample && cfg.time_grid.t_start != 0.0) {
    throw ConfigError("time_grid.t_start", "sampled ensembles start at t = 0");
  }
  cfg.regions = parse_regions(doc);
  cfg.histograms = parse_histograms(doc, grid);
  if (cfg.histograms && !cfg.model.normalizable()) {
    throw ConfigError("histograms", "plane-wave marginals have no reference distribution");
  }
  cfg.checks = parse_checks(doc, cfg.model, grid, cfg.regions);

  if (find(doc, "property_checks") != nullptr) {
    cfg.property_checks_given = true;
    cfg.property_checks = string_list(doc, "", "property_checks");
    const auto known = all_check_suites();
    for (std::size_t i = 0; i < cfg.property_checks.size(); ++i) {
      if (std::find(known.begin(), known.end(), cfg.property_checks[i]) == known.end()) {
        throw ConfigError(index_path("property_checks", i),
                          "unknown suite '" + cfg.property_checks[i] + "'");
      }
    }
  }

  if (const json* o = find(doc, "output")) {
    require_object(*o, "output");
    reject_unknown(*o, "output", {"dir", "formats"});
    cfg.output_dir = string(*o, "output", "dir", cfg.output_dir.string());
    if (find(*o, "formats") != nullptr) {
      cfg.output_formats = string_list(*o, "output", "formats");
      for (std::size_t i = 0; i < cfg.output_formats.size(); ++i) {
        if (cfg.output_formats[i] != "csv" && cfg.output_formats[i] != "json") {
          throw ConfigError(index_path("output.formats", i), "expected 'csv' or 'json'");
        }
      }
    }
  }
  cfg.threads = static_cast<unsigned>(count(doc, "", "threads", 0));
  return cfg;
}

ScenarioConfig parse_scenario_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  if (const BuiltinScenario* b = find_builtin(path.string());
      b != nullptr && !std::filesystem::exists(path)) {
    return parse_scenario_text(b->json);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario_text(text.str());
}

const BuiltinScenario* find_builtin(std::string_view name) {
  for (const BuiltinScenario& b : builtin_scenarios()) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Running

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Stores non-finite values as strings so the JSON stays valid.
json number_json(double v) {
  if (std::isfinite(v)) return v;
  return output::format_double(v);
}

json region_json(const Region& r) {
  auto bound = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"x", {bound(r.x.lo), bound(r.x.hi)}}, {"y", {bound(r.y.lo), bound(r.y.hi)}}};
}

json detection_json(const DetectionReport& d) {
  return {{"quantum_probability", number_json(d.quantum_probability)},
          {"bohmian_fraction", number_json(d.bohmian_fraction)},
          {"mc_standard_error", number_json(d.mc_standard_error)},
          {"n_effective", d.n_effective}};
}

class ScenarioRun {
 public:
  ScenarioRun(const ScenarioConfig& cfg, const Ensemble& ens, unsigned threads)
      : cfg_(cfg), ens_(ens), threads_(threads) {}

  const MarginalReport& marginal(MarginalCoordinate c, double t) {
    const auto key = std::make_pair(static_cast<int>(c), ens_.time_index(t));
    auto it = marginals_.find(key);
    if (it == marginals_.end()) {
      const std::size_t bins = cfg_.histograms ? cfg_.histograms->bins : 50;
      it = marginals_.emplace(key, marginal_histogram(ens_, c, t, bins, threads_)).first;
      order_.push_back(key);
    }
    return it->second;
  }

  std::vector<MarginalReport> marginals_in_order() const {
    std::vector<MarginalReport> out;
    for (const auto& key : order_) out.push_back(marginals_.at(key));
    return out;
  }

  const DetectionReport& detection(const NamedRegionPair& region, double t) {
    const auto key = std::make_pair(region.name, ens_.time_index(t));
    auto it = detections_.find(key);
    if (it == detections_.end()) {
      it = detections_.emplace(key, bohmian_detection(ens_, region.r1, region.r2, t)).first;
    }
    return it->second;
  }

  json evaluate(const CheckSpec& spec, bool& passed) {
    const json& p = spec.params;
    json r = {{"name", spec.name}, {"kind", spec.kind}};
    if (ens_.completed_count() == 0 && spec.kind != "aborted_fraction") {
      passed = false;
      r["passed"] = false;
      r["detail"] = "no completed trajectories";
      return r;
    }

    if (spec.kind == "constraint_residual") {
      const double max = p.at("max").get<double>();
      std::size_t within = 0, n = 0;
      double worst = 0.0;
      for (const Trajectory& traj : ens_.trajectories) {
        if (!traj.completed()) continue;
        ++n;
        const double res = constraint_residual(ens_.model, traj);
        worst = std::max(worst, res);
        if (res < max) ++within;
      }
      const double fraction = static_cast<double>(within) / static_cast<double>(n);
      passed = fraction >= p.at("min_fraction").get<double>();
      r["measured"] = fraction;
      r["threshold"] = p.at("min_fraction");
      r["max_residual"] = number_json(worst);
      r["residual_bound"] = max;
    } else if (spec.kind == "coordinate_constancy") {
      double worst = 0.0;
      for (const Trajectory& traj : ens_.trajectories) {
        if (!traj.completed()) continue;
        const ConfigPoint& first = traj.points.front();
        for (const ConfigPoint& q : traj.points) {
          worst = std::max({worst, std::abs(q.r1[0] - first.r1[0]),
                            std::abs(q.r2[0] - first.r2[0])});
        }
      }
      passed = worst < p.at("max").get<double>();
      r["measured"] = number_json(worst);
      r["threshold"] = p.at("max");
    } else if (spec.kind == "marginal_ks") {
      const MarginalCoordinate c = parse_marginal_coordinate(p.at("coordinate").get<std::string>());
      const double t = p.at("t").get<double>();
      const MarginalReport& m = marginal(c, t);
      const double critical = ks_critical_value(m.n, p.at("alpha").get<double>());
      passed = m.ks_distance < critical;
      r["coordinate"] = p.at("coordinate");
      r["t"] = t;
      r["measured"] = m.ks_distance;
      r["threshold"] = critical;
      r["n"] = m.n;
    } else if (spec.kind == "detection_agreement") {
      const std::string name = p.at("region").get<std::string>();
      const auto& region = *std::find_if(cfg_.regions.begin(), cfg_.regions.end(),
                                         [&](const NamedRegionPair& x) { return x.name == name; });
      const double t = p.at("t").get<double>();
      const DetectionReport& d = detection(region, t);
      const double sigmas = p.at("sigmas").get<double>();
      const double deviation = std::abs(d.bohmian_fraction - d.quantum_probability);
      passed = d.agrees(sigmas);
      const std::string expect = p.at("expect").get<std::string>();
      const double zero_tol = p.at("zero_tol").get<double>();
      if (expect == "zero") {
        passed = passed && d.quantum_probability < zero_tol && d.bohmian_fraction < zero_tol;
      } else if (expect == "positive") {
        passed = passed && d.quantum_probability > 0.0 && d.bohmian_fraction > 0.0;
      }
      r["region"] = name;
      r["t"] = t;
      r["expect"] = expect;
      r["measured"] = number_json(deviation);
      r["threshold"] = number_json(sigmas * d.mc_standard_error);
      r["detection"] = detection_json(d);
    } else if (spec.kind == "no_order_swaps") {
      std::size_t swaps = 0;
      for (const Trajectory& traj : ens_.trajectories) {
        if (!traj.completed()) continue;
        const bool first = traj.points.front().r1[0] < traj.points.front().r2[0];
        for (const ConfigPoint& q : traj.points) {
          if ((q.r1[0] < q.r2[0]) != first) {
            ++swaps;
            break;
          }
        }
      }
      passed = swaps == 0;
      r["measured"] = swaps;
      r["threshold"] = 0;
    } else if (spec.kind == "same_side_fraction") {
      const double t = p.at("t").get<double>();
      const CrossingSummary s = crossing_statistics(ens_, p.at("plane").get<double>(), t);
      passed = s.same_side_fraction() <= p.at("max").get<double>();
      r["t"] = t;
      r["measured"] = s.same_side_fraction();
      r["threshold"] = p.at("max");
      r["both_above"] = s.both_above;
      r["both_below"] = s.both_below;
      r["split"] = s.split;
    } else if (spec.kind == "aborted_fraction") {
      const double n = static_cast<double>(std::max<std::size_t>(ens_.trajectories.size(), 1));
      const double fraction =
          static_cast<double>(ens_.aborted_count + ens_.max_steps_count) / n;
      passed = fraction <= p.at("max").get<double>();
      r["measured"] = fraction;
      r["threshold"] = p.at("max");
    }
    r["passed"] = passed;
    return r;
  }

 private:
  const ScenarioConfig& cfg_;
  const Ensemble& ens_;
  unsigned threads_;
  std::map<std::pair<int, std::size_t>, MarginalReport> marginals_;
  std::vector<std::pair<int, std::size_t>> order_;
  std::map<std::pair<std::string, std::size_t>, DetectionReport> detections_;
};

bool wants(const ScenarioConfig& cfg, std::string_view format) {
  return std::find(cfg.output_formats.begin(), cfg.output_formats.end(), format) !=
         cfg.output_formats.end();
}

SamplerSettings effective_sampler(const ScenarioConfig& cfg, const RunOptions& options) {
  SamplerSettings s = cfg.sampler;
  if (options.seed) s.seed = *options.seed;
  return s;
}

unsigned effective_threads(const ScenarioConfig& cfg, const RunOptions& options) {
  return resolve_thread_count(options.threads != 0 ? options.threads : cfg.threads);
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
  RunResult result;
  result.output_dir = options.out_dir.value_or(cfg.output_dir);
  const unsigned threads = effective_threads(cfg, options);
  const SamplerSettings sampler = effective_sampler(cfg, options);
  const std::vector<double> times = cfg.time_grid.values();
  const auto t_total = Clock::now();

  json report;
  report["schema"] = std::string(kScenarioSchema);
  report["scenario"] = cfg.source;
  report["seed"] = sampler.seed;
  json timings = json::object();

  // Stage 1: initial configurations.
  auto t0 = Clock::now();
  std::vector<ConfigPoint> initial;
  json diagnostics = json::object();
  if (cfg.initial.mode == InitialConditions::Mode::Sample) {
    SampleSet samples = sample_initial(cfg.model, sampler, threads);
    initial = std::move(samples.points);
    diagnostics["acceptance_rate"] = samples.acceptance_rate;
    diagnostics["poor_mixing"] = samples.poor_mixing;
  } else {
    initial = cfg.initial.points;
  }
  timings["sample"] = seconds_since(t0);

  // Stage 2: trajectories.
  t0 = Clock::now();
  const Ensemble ens = propagate(cfg.model, initial, times, cfg.integrator, threads, sampler.seed);
  timings["propagate"] = seconds_since(t0);
  diagnostics["n_pairs"] = ens.trajectories.size();
  diagnostics["completed_count"] = ens.completed_count();
  diagnostics["aborted_count"] = ens.aborted_count;
  diagnostics["max_steps_count"] = ens.max_steps_count;
  std::size_t steps = 0;
  for (const Trajectory& traj : ens.trajectories) steps += traj.step_count;
  diagnostics["total_steps"] = steps;
  if (cfg.model.as<GaussianSlit>() != nullptr) {
    const SlitPartition part = different_slit_filter(initial, cfg.model);
    diagnostics["initial_slits"] = {{"different_slits", part.different_slits.size()},
                                    {"same_slit", part.same_slit.size()},
                                    {"other", part.other.size()}};
  }
  if (ens.completed_count() > 0 && cfg.model.dimension() >= 1) {
    const CrossingSummary s = crossing_statistics(ens, 0.0);
    diagnostics["crossing_final"] = {
        {"pairs", s.pairs},
        {"both_above", s.both_above},
        {"both_below", s.both_below},
        {"split", s.split},
        {"simultaneous_plane_visits", s.simultaneous_plane_visits},
        {"max_constraint_residual", number_json(s.max_constraint_residual)}};
  }
  report["diagnostics"] = diagnostics;

  // Stage 3: statistics and checks.
  t0 = Clock::now();
  ScenarioRun run(cfg, ens, threads);
  if (cfg.histograms && ens.completed_count() > 0) {
    for (double t : cfg.histograms->times) {
      for (MarginalCoordinate c : cfg.histograms->coordinates) run.marginal(c, t);
    }
  }
  json detections = json::array();
  if (cfg.model.normalizable() && ens.completed_count() > 0) {
    for (const NamedRegionPair& region : cfg.regions) {
      const DetectionReport& d = run.detection(region, times.back());
      json entry = detection_json(d);
      entry["region"] = region.name;
      entry["r1"] = region_json(region.r1);
      entry["r2"] = region_json(region.r2);
      entry["t"] = times.back();
      detections.push_back(std::move(entry));
    }
  }
  json checks = json::array();
  for (const CheckSpec& spec : cfg.checks) {
    bool passed = false;
    checks.push_back(run.evaluate(spec, passed));
    result.all_passed = result.all_passed && passed;
  }
  const std::vector<MarginalReport> marginals = run.marginals_in_order();
  json marginal_summary = json::array();
  for (const MarginalReport& m : marginals) {
    marginal_summary.push_back({{"coordinate", to_string(m.coordinate)},
                                {"t", m.t},
                                {"n", m.n},
                                {"ks_distance", m.ks_distance},
                                {"ks_critical", m.ks_critical}});
  }
  timings["statistics"] = seconds_since(t0);
  report["detections"] = std::move(detections);
  report["marginals"] = std::move(marginal_summary);
  report["checks"] = std::move(checks);
  report["all_passed"] = result.all_passed;

  // Stage 4: files.
  t0 = Clock::now();
  if (options.write_files) {
    const auto& dir = result.output_dir;
    std::filesystem::create_directories(dir);
    if (wants(cfg, "csv")) {
      output::write_file(dir / "trajectories.csv",
                         [&](std::ostream& os) { output::write_trajectories_csv(os, ens); });
      output::write_file(dir / "marginals.csv",
                         [&](std::ostream& os) { output::write_marginals_csv(os, marginals); });
    }
    if (wants(cfg, "json")) {
      output::write_file(dir / "report.json",
                         [&](std::ostream& os) { output::write_json(os, report); });
    }
  }
  timings["write"] = seconds_since(t0);
  timings["total"] = seconds_since(t_total);
  timings["threads"] = threads;
  if (options.write_files && wants(cfg, "json")) {
    output::write_file(result.output_dir / "timings.json",
                       [&](std::ostream& os) { output::write_json(os, timings); });
  }
  result.report = std::move(report);
  result.timings = std::move(timings);
  return result;
}

RunResult run_sampler(const ScenarioConfig& cfg, const RunOptions& options) {
  if (!cfg.model.normalizable()) {
    throw ConfigError("model.type", "plane waves cannot be sampled");
  }
  RunResult result;
  result.output_dir = options.out_dir.value_or(cfg.output_dir);
  const SamplerSettings sampler = effective_sampler(cfg, options);
  const unsigned threads = effective_threads(cfg, options);
  const auto t0 = Clock::now();
  const SampleSet samples = sample_initial(cfg.model, sampler, threads);
  result.timings = {{"sample", seconds_since(t0)}, {"threads", threads}};

  std::vector<double> x1, x2;
  for (const ConfigPoint& p : samples.points) {
    x1.push_back(p.r1[0]);
    x2.push_back(p.r2[0]);
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  result.report = {{"schema", std::string(kScenarioSchema)},
                   {"scenario", cfg.name},
                   {"seed", sampler.seed},
                   {"n_samples", samples.points.size()},
                   {"acceptance_rate", samples.acceptance_rate},
                   {"poor_mixing", samples.poor_mixing},
                   {"mean_x1", mean(x1)},
                   {"mean_x2", mean(x2)}};
  if (options.write_files) {
    output::write_file(result.output_dir / "samples.csv", [&](std::ostream& os) {
      output::write_samples_csv(os, samples.points);
    });
  }
  return result;
}

RunResult run_checks(const CheckOptions& options) {
  RunResult result;
  const auto t0 = Clock::now();
  const std::vector<CheckResult> checks = run_property_checks(options);
  json entries = json::array();
  for (const CheckResult& c : checks) {
    entries.push_back({{"name", c.name},
                       {"passed", c.passed},
                       {"measured", number_json(c.measured)},
                       {"threshold", c.threshold},
                       {"samples", c.samples}});
    result.all_passed = result.all_passed && c.passed;
  }
  result.report = {{"schema", std::string(kScenarioSchema)},
                   {"fast", options.fast},
                   {"seed", options.seed},
                   {"checks", std::move(entries)},
                   {"all_passed", result.all_passed}};
  result.timings = {{"checks", seconds_since(t0)}};
  return result;
}

}  // namespace bohm2p
