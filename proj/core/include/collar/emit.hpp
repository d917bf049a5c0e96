#pragma once

#include <string>
#include <vector>

#include "collar/bergman.hpp"
#include "collar/weights.hpp"

namespace collar {

/// Shortest decimal form that round-trips the double exactly; deterministic
/// for identical inputs, so emitted files are byte-stable.
std::string format_double(double v);

/// CSV for density/counterexample scans; fixed header
/// delta,m,k_max,rho0,density_x0,ratio2,predicted_ratio2,ratio1,ratio3.
std::string density_scan_csv(const std::vector<DensityReport>& reports);

std::string to_json(const CertificateReport& rep);
std::string to_json(const std::vector<DensityReport>& reports);

/// Writes atomically (write to a sibling temp file, then rename).
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace collar
