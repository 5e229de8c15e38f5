#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include <json.hpp>

namespace lrp {

/// Lattice point or displacement in Z^d, d <= 3. Unused trailing coordinates are zero.
using Site = std::array<std::int64_t, 3>;

inline constexpr int kMaxDim = 3;

/// l-infinity norm over all stored coordinates.
std::int64_t sup_norm(const Site& x) noexcept;

/// max{2, ||x||_inf}
double smoothed_norm(const Site& x) noexcept;

Site operator-(const Site& a, const Site& b) noexcept;
Site operator+(const Site& a, const Site& b) noexcept;

/// Translation-invariant power-law kernel J(x,y) = A ||x-y||_inf^{-d-alpha}, with an
/// optional hard cutoff on edge length.
struct KernelSpec {
  int d = 1;
  double alpha = 0.5;
  double amplitude = 1.0;
  std::optional<std::int64_t> truncation;  // max open-edge length, none = unbounded

  /// Throws std::invalid_argument when d, alpha, amplitude or truncation are out of range.
  void validate() const;

  /// J at l-infinity distance `dist` (dist >= 1). Zero for dist == 0.
  double value_at(std::int64_t dist) const noexcept;

  /// True when an edge of this length can ever be open.
  bool admits(std::int64_t dist) const noexcept {
    return dist >= 1 && (!truncation || dist <= *truncation);
  }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

double kernel_value(const KernelSpec& spec, const Site& x, const Site& y) noexcept;

/// 1 - exp(-beta * J(x,y)), zero beyond the truncation length. Throws on beta < 0.
double edge_probability(const KernelSpec& spec, double beta, const Site& x, const Site& y);

/// Same law indexed by l-infinity distance only.
double edge_probability_at(const KernelSpec& spec, double beta, std::int64_t dist);

void to_json(nlohmann::json& j, const KernelSpec& spec);
void from_json(const nlohmann::json& j, KernelSpec& spec);

}  // namespace lrp
