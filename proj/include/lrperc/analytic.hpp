#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lrperc/kernel.hpp"

namespace lrp {

/// Direct double sum over ||a|| <= ||x||/4 and ||b - x|| <= ||x||/4 of
/// <a>^{-d-alpha} <a-b>^{-d-alpha} <b-x>^{-d-alpha} min{1, <a>/R} min{1, <x-b>/R}.
/// Requires 0 < alpha < 1, R >= 1, ||x|| >= R.
double threshold_convolution_sum(int d, double alpha, double R, const Site& x);

/// sum * R^{2 alpha} * <x>^{d + alpha}.
double threshold_convolution_ratio(int d, double alpha, double R, const Site& x);

/// Fraction of centres z in L_{k-3} with u in z + L_{k-2} and v outside it, where
/// L_j = [-2^j, 2^j]^d. Requires k >= 3 and u in L_{k-1}.
double box_exit_fraction(int d, int k, const Site& u, const Site& v);

struct ConvolutionCheckResult {
  std::string kind;  // "convolution" or "box_exit"
  int d = 1;
  double alpha = 0.0;
  double R = 0.0;
  int k = 0;
  Site x{};
  Site u{};
  Site v{};
  double value = 0.0;
  double ratio = 0.0;
};

/// Convolution sums on x = (f R, 0, ...) for each R and multiplier f.
std::vector<ConvolutionCheckResult> threshold_convolution_grid(int d, double alpha, std::span<const double> radii,
                                                               std::span<const double> multipliers);

/// Worst case over u in L_{k-2}, v in L_{k+1}, u != v of fraction * 2^k / <u - v>; the smallest
/// C' with fraction <= min{1, C' <u-v> / 2^k}. Further v add nothing since every candidate box
/// lies inside L_{k-1}. The returned record holds the maximizing (u, v).
ConvolutionCheckResult box_exit_constant(int d, int k);

}  // namespace lrp
