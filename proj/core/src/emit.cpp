#include "collar/emit.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "collar/errors.hpp"

namespace collar {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string density_scan_csv(const std::vector<DensityReport>& reports) {
  std::ostringstream out;
  out << "delta,m,k_max,rho0,density_x0,ratio2,predicted_ratio2,ratio1,ratio3\n";
  for (const auto& r : reports) {
    if (!r.error.empty()) continue;
    out << format_double(r.delta) << ',' << r.m << ',' << r.k_max << ','
        << format_double(r.rho0) << ',' << format_double(r.at_x0) << ','
        << format_double(r.ratio2) << ',' << format_double(r.predicted_ratio2) << ','
        << format_double(r.ratio1) << ',' << format_double(r.ratio3) << '\n';
  }
  return out.str();
}

std::string to_json(const CertificateReport& rep) {
  nlohmann::ordered_json j;
  j["sup_phi"] = rep.sup_phi;
  j["lower_gap"] = rep.lower_gap;
  j["curvature_floor"] = rep.curvature_floor;
  j["diverges_at_x0"] = rep.diverges_at_x0;
  j["pass"] = rep.pass;
  j["harmonicity_ratio"] = rep.harmonicity_ratio;
  j["delta_x0"] = rep.delta_x0;
  return j.dump();
}

std::string to_json(const std::vector<DensityReport>& reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["delta"] = r.delta;
    j["m"] = r.m;
    j["k_max"] = r.k_max;
    if (!r.error.empty()) {
      j["error"] = r.error;
      arr.push_back(j);
      continue;
    }
    j["rho0"] = r.rho0;
    j["density_x0"] = r.at_x0;
    j["ratio2"] = r.ratio2;
    j["predicted_ratio2"] = r.predicted_ratio2;
    j["ratio1"] = r.ratio1;
    j["ratio3"] = r.ratio3;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows)
      rows.push_back({{"rho", row.rho},
                      {"density", row.density},
                      {"dominant_mode_share", row.dominant_mode_share}});
    j["rows"] = rows;
    arr.push_back(j);
  }
  return arr.dump();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("write_file_atomic: cannot open " + tmp.string());
    out << content;
    if (!content.empty() && content.back() != '\n') out << '\n';
    if (!out) throw Error("write_file_atomic: write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error("write_file_atomic: rename failed: " + ec.message());
}

}  // namespace collar
