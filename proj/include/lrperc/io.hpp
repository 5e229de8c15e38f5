#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lrperc/analytic.hpp"
#include "lrperc/critical.hpp"
#include "lrperc/scaling.hpp"

namespace lrp {

/// %.17g; NaN and infinities as "nan", "inf", "-inf".
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// dx1[,dx2[,dx3]],tau,stderr,pairs over canonical displacements.
void write_two_point_csv(std::ostream& out, const TwoPointTable& table);

/// Long format: beta,n,replicas,chi,xi,nabla,kind,index,value,stderr. Kinds: inner_radius,
/// chi, largest, S (index r), tail (index threshold), tau_shell (index r). xi at saturation
/// is written ">=m".
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
/// Inverse of write_sweep_csv (tables are not stored). Throws std::runtime_error with a line
/// number on malformed input.
std::vector<SweepRecord> read_sweep_csv(std::istream& in, int d);

nlohmann::json critical_to_json(const CriticalEstimate& est);
/// Restores the fields needed for reporting: spec, beta_c_hat, lo, hi, n, m, window, seed.
CriticalEstimate critical_from_json(const nlohmann::json& j);
nlohmann::json probe_to_json(const Probe& p);

nlohmann::json report_to_json(const ExponentReport& report, const CollapseResult* collapse,
                              const std::string& collapse_error);
void write_report_csv(std::ostream& out, const ExponentReport& report);

void write_analytic_csv(std::ostream& out, const std::vector<ConvolutionCheckResult>& rows);

}  // namespace lrp
