#pragma once

#include <cstddef>
#include <span>

#include "core/model.hpp"

namespace tiltprop {

/// Discrete Fourier transform of one field line, backed by FFTW.
///
/// forward() is unnormalized, inverse() divides by n, so inverse(forward(u))
/// is the identity. A transform owns its plans and scratch buffer: keep one
/// per worker, never share an instance between threads.
class LineTransform {
 public:
  explicit LineTransform(std::size_t n);
  ~LineTransform();

  LineTransform(LineTransform&& other) noexcept;
  LineTransform& operator=(LineTransform&& other) noexcept;
  LineTransform(const LineTransform&) = delete;
  LineTransform& operator=(const LineTransform&) = delete;

  std::size_t size() const { return n_; }

  void forward(std::span<Complex> data);
  void inverse(std::span<Complex> data);

 private:
  void release() noexcept;
  void execute(void* plan, std::span<Complex> data);

  std::size_t n_ = 0;
  Complex* buffer_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace tiltprop
