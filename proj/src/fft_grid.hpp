#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace lrp::detail {

/// Smallest 2^a 3^b 5^c 7^d >= n.
std::int64_t fft_friendly_size(std::int64_t n);

/// Real d-dimensional grid of extent `size` per axis with forward/backward FFTW plans.
/// Plans are created under a global lock; execution is reentrant per instance.
class FftGrid {
 public:
  FftGrid(int d, std::int64_t size);
  ~FftGrid();
  FftGrid(const FftGrid&) = delete;
  FftGrid& operator=(const FftGrid&) = delete;

  int dim() const noexcept { return d_; }
  std::int64_t size() const noexcept { return size_; }
  std::size_t real_count() const noexcept { return real_count_; }
  std::size_t complex_count() const noexcept { return complex_count_; }

  /// Row-major offset of a point with coordinates taken mod size.
  std::size_t wrap(const std::int64_t* coords) const noexcept;

  void forward(double* real, std::complex<double>* spectrum) const;
  /// Unnormalized inverse (FFTW convention): result is size^d times the true inverse.
  void backward(std::complex<double>* spectrum, double* real) const;

  std::vector<double> make_real() const { return std::vector<double>(real_count_, 0.0); }
  std::vector<std::complex<double>> make_complex() const { return std::vector<std::complex<double>>(complex_count_); }

 private:
  int d_;
  std::int64_t size_;
  std::size_t real_count_;
  std::size_t complex_count_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

}  // namespace lrp::detail
