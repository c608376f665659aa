#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace qpr {

using cplx = std::complex<double>;

/// Batched unnormalised complex FFTs over `howmany` contiguous blocks of
/// length n (1D) or nx*ny (2D, y fastest). Plans use FFTW_ESTIMATE so the
/// algorithm choice, and therefore the rounding, is reproducible run to run.
/// Execution is safe concurrently on distinct buffers; planning is serialised
/// internally.
class FftPlan {
 public:
  FftPlan(std::size_t n, std::size_t howmany);
  FftPlan(std::size_t nx, std::size_t ny, std::size_t howmany);
  ~FftPlan();

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& other) noexcept;
  FftPlan& operator=(FftPlan&& other) noexcept;

  std::size_t size() const { return block_ * howmany_; }
  std::size_t block() const { return block_; }

  /// In-place transform, sign -1.
  void forward(std::span<cplx> data) const;
  /// In-place transform, sign +1, without the 1/n factor.
  void backward(std::span<cplx> data) const;

 private:
  void release() noexcept;

  std::size_t block_ = 0;
  std::size_t howmany_ = 0;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

}  // namespace qpr
