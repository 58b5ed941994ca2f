#include "bohm2p/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace bohm2p::output {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void put_coords(std::string& line, const Coords& r) {
  line += format_double(r[0]);
  line += ',';
  if (r.size() > 1) line += format_double(r[1]);
}

}  // namespace

void write_trajectories_csv(std::ostream& os, const Ensemble& ensemble) {
  os << "pair_id,t,x1,y1,x2,y2,status\n";
  std::string line;
  for (std::size_t id = 0; id < ensemble.trajectories.size(); ++id) {
    const Trajectory& traj = ensemble.trajectories[id];
    const std::string_view status = to_string(traj.status);
    for (const ConfigPoint& p : traj.points) {
      line.clear();
      line += std::to_string(id);
      line += ',';
      line += format_double(p.t);
      line += ',';
      put_coords(line, p.r1);
      line += ',';
      put_coords(line, p.r2);
      line += ',';
      line += status;
      line += '\n';
      os << line;
    }
  }
}

void write_marginals_csv(std::ostream& os, std::span<const MarginalReport> reports) {
  os << "bin_low,bin_high,count,quantum_density,coordinate,t\n";
  for (const MarginalReport& r : reports) {
    for (std::size_t i = 0; i < r.histogram.bins(); ++i) {
      os << format_double(r.histogram.bin_low(i)) << ',' << format_double(r.histogram.bin_high(i))
         << ',' << r.histogram.counts[i] << ',' << format_double(r.quantum_density[i]) << ','
         << to_string(r.coordinate) << ',' << format_double(r.t) << '\n';
    }
  }
}

void write_samples_csv(std::ostream& os, std::span<const ConfigPoint> points) {
  os << "pair_id,x1,y1,x2,y2\n";
  std::string line;
  for (std::size_t id = 0; id < points.size(); ++id) {
    line = std::to_string(id);
    line += ',';
    put_coords(line, points[id].r1);
    line += ',';
    put_coords(line, points[id].r2);
    line += '\n';
    os << line;
  }
}

void write_json(std::ostream& os, const nlohmann::json& doc) { os << doc.dump(2) << '\n'; }

void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& fill) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  fill(os);
  os.flush();
  if (!os) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace bohm2p::output
