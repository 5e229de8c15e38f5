#include "lrperc/kernel.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace lrp {

std::int64_t sup_norm(const Site& x) noexcept {
  std::int64_t m = 0;
  for (auto c : x) m = std::max(m, c < 0 ? -c : c);
  return m;
}

double smoothed_norm(const Site& x) noexcept {
  return std::max(2.0, static_cast<double>(sup_norm(x)));
}

Site operator-(const Site& a, const Site& b) noexcept {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

Site operator+(const Site& a, const Site& b) noexcept {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

void KernelSpec::validate() const {
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("d must be in [1,3], got " + std::to_string(d));
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("alpha must be positive");
  if (!(amplitude > 0.0) || !std::isfinite(amplitude))
    throw std::invalid_argument("amplitude A must be positive");
  if (truncation && *truncation < 1)
    throw std::invalid_argument("truncation must be >= 1");
}

double KernelSpec::value_at(std::int64_t dist) const noexcept {
  if (dist == 0) return 0.0;
  return amplitude * std::pow(static_cast<double>(dist), -static_cast<double>(d) - alpha);
}

double kernel_value(const KernelSpec& spec, const Site& x, const Site& y) noexcept {
  return spec.value_at(sup_norm(x - y));
}

double edge_probability_at(const KernelSpec& spec, double beta, std::int64_t dist) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (!spec.admits(dist)) return 0.0;
  const double rate = beta * spec.value_at(dist);
  if (rate < 1e-12) return rate;
  return -std::expm1(-rate);
}

double edge_probability(const KernelSpec& spec, double beta, const Site& x, const Site& y) {
  return edge_probability_at(spec, beta, sup_norm(x - y));
}

void to_json(nlohmann::json& j, const KernelSpec& spec) {
  j = nlohmann::json{{"d", spec.d}, {"alpha", spec.alpha}, {"amplitude", spec.amplitude}};
  if (spec.truncation)
    j["truncation"] = *spec.truncation;
  else
    j["truncation"] = "none";
}

void from_json(const nlohmann::json& j, KernelSpec& spec) {
  spec.d = j.at("d").get<int>();
  spec.alpha = j.at("alpha").get<double>();
  spec.amplitude = j.at("amplitude").get<double>();
  spec.truncation.reset();
  if (j.contains("truncation") && j["truncation"].is_number_integer())
    spec.truncation = j["truncation"].get<std::int64_t>();
  spec.validate();
}

}  // namespace lrp
