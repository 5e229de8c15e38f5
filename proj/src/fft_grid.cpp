#include "fft_grid.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace lrp::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

std::int64_t fft_friendly_size(std::int64_t n) {
  for (std::int64_t c = std::max<std::int64_t>(n, 1);; ++c) {
    std::int64_t r = c;
    for (std::int64_t p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return c;
  }
}

struct FftGrid::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

FftGrid::FftGrid(int d, std::int64_t size)
    : d_(d), size_(size), real_count_(1), complex_count_(1), plans_(std::make_unique<Plans>()) {
  int dims[3];
  for (int i = 0; i < d; ++i) {
    dims[i] = static_cast<int>(size);
    real_count_ *= static_cast<std::size_t>(size);
    complex_count_ *= static_cast<std::size_t>(i + 1 == d ? size / 2 + 1 : size);
  }
  auto* r = fftw_alloc_real(real_count_);
  auto* c = fftw_alloc_complex(complex_count_);
  {
    std::lock_guard lock(planner_mutex());
    plans_->forward = fftw_plan_dft_r2c(d, dims, r, c, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->backward = fftw_plan_dft_c2r(d, dims, c, r, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  fftw_free(r);
  fftw_free(c);
  if (!plans_->forward || !plans_->backward) throw std::runtime_error("FFTW planning failed");
}

FftGrid::~FftGrid() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plans_->forward);
  fftw_destroy_plan(plans_->backward);
}

std::size_t FftGrid::wrap(const std::int64_t* coords) const noexcept {
  std::size_t off = 0;
  for (int i = 0; i < d_; ++i) {
    std::int64_t c = coords[i] % size_;
    if (c < 0) c += size_;
    off = off * static_cast<std::size_t>(size_) + static_cast<std::size_t>(c);
  }
  return off;
}

void FftGrid::forward(double* real, std::complex<double>* spectrum) const {
  fftw_execute_dft_r2c(plans_->forward, real, reinterpret_cast<fftw_complex*>(spectrum));
}

void FftGrid::backward(std::complex<double>* spectrum, double* real) const {
  fftw_execute_dft_c2r(plans_->backward, reinterpret_cast<fftw_complex*>(spectrum), real);
}

}  // namespace lrp::detail
