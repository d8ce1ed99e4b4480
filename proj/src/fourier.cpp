#include "phasespace/fourier.hpp"

#include <fftw3.h>

#include <stdexcept>

namespace phasespace {

struct FftPlan::Impl {
  fftw_plan plan = nullptr;
  ~Impl() {
    if (plan != nullptr) fftw_destroy_plan(plan);
  }
};

FftPlan::FftPlan(std::size_t n, FftDirection direction, std::size_t howmany, std::size_t stride, std::size_t dist)
    : impl_(std::make_unique<Impl>()), n_(n) {
  if (dist == 0) dist = n * stride;
  const std::size_t span = (howmany - 1) * dist + (n - 1) * stride + 1;
  auto* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * span));
  int len = static_cast<int>(n);
  impl_->plan = fftw_plan_many_dft(1, &len, static_cast<int>(howmany), scratch, nullptr, static_cast<int>(stride),
                                   static_cast<int>(dist), scratch, nullptr, static_cast<int>(stride),
                                   static_cast<int>(dist), direction == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(scratch);
  if (impl_->plan == nullptr) {
    throw std::runtime_error("FFTW planning failed");
  }
}

FftPlan::~FftPlan() = default;

FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

void FftPlan::execute(std::complex<double>* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(impl_->plan, p, p);
}

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace phasespace
