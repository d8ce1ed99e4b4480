#pragma once

#include <complex>
#include <cstddef>
#include <memory>

namespace phasespace {

enum class FftDirection { Forward, Backward };

/// Owning wrapper around a batched in-place FFTW plan.
///
/// Forward uses the kernel exp(-2 pi i jk/n), Backward exp(+2 pi i jk/n);
/// neither is normalized. The plan is made with FFTW_UNALIGNED, so it may be
/// executed on any buffer with the planned layout.
class FftPlan {
 public:
  /// `howmany` transforms of length n; element j of transform b sits at
  /// b * dist + j * stride.
  FftPlan(std::size_t n, FftDirection direction, std::size_t howmany = 1, std::size_t stride = 1,
          std::size_t dist = 0);
  ~FftPlan();
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return n_; }
  void execute(std::complex<double>* data) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t n_;
};

/// Signed frequency index for DFT bin f of length n: f for f < n/2, else f - n.
inline long signed_frequency(std::size_t f, std::size_t n) {
  return f < (n + 1) / 2 ? static_cast<long>(f) : static_cast<long>(f) - static_cast<long>(n);
}

/// Smallest power of two >= n.
std::size_t next_power_of_two(std::size_t n);

}  // namespace phasespace
