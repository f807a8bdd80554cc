#pragma once

// Thin RAII layer over FFTW for in-place complex transforms.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>

namespace cyclescan::fft {

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

/// FFTW-aligned complex buffer.
class Buffer {
 public:
  explicit Buffer(std::size_t n) : size_(n), data_(fftw_alloc_complex(n)) {
    for (std::size_t i = 0; i < n; ++i) data()[i] = {0.0, 0.0};
  }

  std::complex<double>* data() noexcept { return reinterpret_cast<std::complex<double>*>(data_.get()); }
  const std::complex<double>* data() const noexcept {
    return reinterpret_cast<const std::complex<double>*>(data_.get());
  }
  std::size_t size() const noexcept { return size_; }
  std::span<std::complex<double>> span() noexcept { return {data(), size_}; }
  std::span<const std::complex<double>> span() const noexcept { return {data(), size_}; }
  std::complex<double>& operator[](std::size_t i) noexcept { return data()[i]; }
  const std::complex<double>& operator[](std::size_t i) const noexcept { return data()[i]; }

  fftw_complex* raw() noexcept { return data_.get(); }

 private:
  std::size_t size_;
  std::unique_ptr<fftw_complex, FftwFree> data_;
};

namespace detail {

// FFTW's planner is not thread-safe; execution on fresh aligned arrays is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    Buffer scratch(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), scratch.raw(), scratch.raw(), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

}  // namespace detail

/// Unnormalized forward transform, in place.
inline void forward(Buffer& buf) {
  fftw_plan plan = detail::PlanCache::instance().get(buf.size(), FFTW_FORWARD);
  fftw_execute_dft(plan, buf.raw(), buf.raw());
}

/// Unnormalized backward transform, in place (divide by size for the inverse).
inline void backward(Buffer& buf) {
  fftw_plan plan = detail::PlanCache::instance().get(buf.size(), FFTW_BACKWARD);
  fftw_execute_dft(plan, buf.raw(), buf.raw());
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace cyclescan::fft
