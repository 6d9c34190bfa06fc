#include "core/line_transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace tiltprop {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

LineTransform::LineTransform(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("LineTransform: empty line");
  std::lock_guard lock(planner_mutex());
  buffer_ = reinterpret_cast<Complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!buffer_) throw std::bad_alloc();
  auto* raw = reinterpret_cast<fftw_complex*>(buffer_);
  const int len = static_cast<int>(n);
  forward_plan_ = fftw_plan_dft_1d(len, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_1d(len, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!forward_plan_ || !inverse_plan_) {
    release();
    throw std::runtime_error("LineTransform: FFTW planning failed");
  }
}

LineTransform::~LineTransform() { release(); }

LineTransform::LineTransform(LineTransform&& other) noexcept
    : n_(other.n_),
      buffer_(other.buffer_),
      forward_plan_(other.forward_plan_),
      inverse_plan_(other.inverse_plan_) {
  other.buffer_ = nullptr;
  other.forward_plan_ = other.inverse_plan_ = nullptr;
}

LineTransform& LineTransform::operator=(LineTransform&& other) noexcept {
  if (this != &other) {
    release();
    n_ = other.n_;
    buffer_ = other.buffer_;
    forward_plan_ = other.forward_plan_;
    inverse_plan_ = other.inverse_plan_;
    other.buffer_ = nullptr;
    other.forward_plan_ = other.inverse_plan_ = nullptr;
  }
  return *this;
}

void LineTransform::release() noexcept {
  if (!forward_plan_ && !inverse_plan_ && !buffer_) return;
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  if (buffer_) fftw_free(buffer_);
  forward_plan_ = inverse_plan_ = nullptr;
  buffer_ = nullptr;
}

void LineTransform::execute(void* plan, std::span<Complex> data) {
  if (data.size() != n_)
    throw std::invalid_argument("LineTransform: line length mismatch");
  std::copy(data.begin(), data.end(), buffer_);
  fftw_execute(static_cast<fftw_plan>(plan));
  std::copy(buffer_, buffer_ + n_, data.begin());
}

void LineTransform::forward(std::span<Complex> data) {
  execute(forward_plan_, data);
}

void LineTransform::inverse(std::span<Complex> data) {
  execute(inverse_plan_, data);
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v *= scale;
}

}  // namespace tiltprop
