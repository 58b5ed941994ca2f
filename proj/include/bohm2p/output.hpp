#pragma once

// Locale-independent CSV/JSON writers. Doubles are printed as the shortest
// string that round-trips to the same value.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"

#include "bohm2p/ensemble.hpp"
#include "bohm2p/statistics.hpp"

namespace bohm2p::output {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string format_double(double v);

/// pair_id,t,x1,y1,x2,y2,status with one row per recorded grid time. The y
/// columns are empty for 1D models; status is the trajectory's final status.
void write_trajectories_csv(std::ostream& os, const Ensemble& ensemble);

/// bin_low,bin_high,count,quantum_density,coordinate,t
void write_marginals_csv(std::ostream& os, std::span<const MarginalReport> reports);

/// pair_id,x1,y1,x2,y2
void write_samples_csv(std::ostream& os, std::span<const ConfigPoint> points);

/// Pretty-printed JSON with a trailing newline.
void write_json(std::ostream& os, const nlohmann::json& doc);

/// Opens `path` for binary writing, creating parent directories; throws
/// std::runtime_error when the file cannot be opened.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fill);

}  // namespace bohm2p::output
