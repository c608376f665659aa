#include "qpr/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "qpr/error.hpp"

namespace qpr {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

FftPlan::FftPlan(std::size_t n, std::size_t howmany) : block_(n), howmany_(howmany) {
  require(n > 0 && howmany > 0, ErrorKind::invalid_parameter, "fft: empty plan");
  std::vector<cplx> scratch(n * howmany);
  const int len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  fwd_ = fftw_plan_many_dft(1, &len, static_cast<int>(howmany), as_fftw(scratch.data()),
                            nullptr, 1, len, as_fftw(scratch.data()), nullptr, 1, len,
                            FFTW_FORWARD, flags);
  bwd_ = fftw_plan_many_dft(1, &len, static_cast<int>(howmany), as_fftw(scratch.data()),
                            nullptr, 1, len, as_fftw(scratch.data()), nullptr, 1, len,
                            FFTW_BACKWARD, flags);
  require(fwd_ && bwd_, ErrorKind::invalid_parameter, "fft: planning failed");
}

FftPlan::FftPlan(std::size_t nx, std::size_t ny, std::size_t howmany)
    : block_(nx * ny), howmany_(howmany) {
  require(nx > 0 && ny > 0 && howmany > 0, ErrorKind::invalid_parameter,
          "fft: empty plan");
  std::vector<cplx> scratch(block_ * howmany);
  const int dims[2] = {static_cast<int>(nx), static_cast<int>(ny)};
  const int dist = static_cast<int>(block_);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  fwd_ = fftw_plan_many_dft(2, dims, static_cast<int>(howmany), as_fftw(scratch.data()),
                            nullptr, 1, dist, as_fftw(scratch.data()), nullptr, 1, dist,
                            FFTW_FORWARD, flags);
  bwd_ = fftw_plan_many_dft(2, dims, static_cast<int>(howmany), as_fftw(scratch.data()),
                            nullptr, 1, dist, as_fftw(scratch.data()), nullptr, 1, dist,
                            FFTW_BACKWARD, flags);
  require(fwd_ && bwd_, ErrorKind::invalid_parameter, "fft: planning failed");
}

FftPlan::~FftPlan() { release(); }

FftPlan::FftPlan(FftPlan&& other) noexcept
    : block_(other.block_), howmany_(other.howmany_), fwd_(other.fwd_), bwd_(other.bwd_) {
  other.fwd_ = nullptr;
  other.bwd_ = nullptr;
}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
  if (this != &other) {
    release();
    block_ = other.block_;
    howmany_ = other.howmany_;
    fwd_ = other.fwd_;
    bwd_ = other.bwd_;
    other.fwd_ = nullptr;
    other.bwd_ = nullptr;
  }
  return *this;
}

void FftPlan::release() noexcept {
  if (!fwd_ && !bwd_) return;
  std::lock_guard lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  fwd_ = nullptr;
  bwd_ = nullptr;
}

void FftPlan::forward(std::span<cplx> data) const {
  require(data.size() == size(), ErrorKind::shape, "fft: buffer size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), as_fftw(data.data()), as_fftw(data.data()));
}

void FftPlan::backward(std::span<cplx> data) const {
  require(data.size() == size(), ErrorKind::shape, "fft: buffer size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), as_fftw(data.data()), as_fftw(data.data()));
}

}  // namespace qpr
