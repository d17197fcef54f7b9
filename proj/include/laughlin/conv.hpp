#pragma once

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "laughlin/grid.hpp"

namespace laughlin {

namespace detail {
// FFTW plan creation/destruction is not thread-safe; execution on distinct
// plans is. All planners go through this lock.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

// Discrete convolution with the 2D logarithmic kernel:
//   out_k = h^2 * sum_l sigma_l * K(x_k - x_l),  K(d) = log|d|.
// Midpoint values are exact for the equal-area-disk cell model away from the
// diagonal (Newton's theorem: the disk average of log equals the center
// value), so only the self cell needs the analytic regularization
//   K(0) = log(h / sqrt(pi)) - 1/2,
// the mean of log|x| over the disk of area h^2.
class LogConvolution {
 public:
  explicit LogConvolution(const GridSpec& spec) : spec_(spec) {
    if (spec.nx <= 0 || spec.ny <= 0 || !(spec.h > 0.0))
      throw std::invalid_argument("bad grid spec for log convolution");
    px_ = 2 * spec.nx;
    py_ = 2 * spec.ny;
    n_complex_ = py_ * (px_ / 2 + 1);

    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    real_buf_ = fftw_alloc_real(static_cast<size_t>(px_) * py_);
    complex_buf_ = fftw_alloc_complex(n_complex_);
    kernel_hat_ = fftw_alloc_complex(n_complex_);
    forward_ = fftw_plan_dft_r2c_2d(py_, px_, real_buf_, complex_buf_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_2d(py_, px_, complex_buf_, real_buf_, FFTW_ESTIMATE);

    // kernel at wrapped offsets, transformed once
    const double h = spec.h;
    const double self = std::log(h / std::sqrt(M_PI)) - 0.5;
    for (int j = 0; j < py_; ++j) {
      const int dy = j <= py_ / 2 ? j : j - py_;
      for (int i = 0; i < px_; ++i) {
        const int dx = i <= px_ / 2 ? i : i - px_;
        double v;
        if (dx == 0 && dy == 0)
          v = self;
        else
          v = 0.5 * std::log((static_cast<double>(dx) * dx + static_cast<double>(dy) * dy) * h * h);
        real_buf_[static_cast<size_t>(j) * px_ + i] = v;
      }
    }
    fftw_execute(forward_);
    std::memcpy(kernel_hat_, complex_buf_, sizeof(fftw_complex) * n_complex_);
  }

  ~LogConvolution() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(real_buf_);
    fftw_free(complex_buf_);
    fftw_free(kernel_hat_);
  }

  LogConvolution(const LogConvolution&) = delete;
  LogConvolution& operator=(const LogConvolution&) = delete;

  const GridSpec& spec() const { return spec_; }

  // Not safe for concurrent calls on one instance (shared buffers); use one
  // instance per solver thread.
  std::vector<double> apply(std::span<const double> sigma) const {
    if (static_cast<int>(sigma.size()) != spec_.size())
      throw std::invalid_argument("sigma size does not match grid");
    std::memset(real_buf_, 0, sizeof(double) * static_cast<size_t>(px_) * py_);
    for (int j = 0; j < spec_.ny; ++j)
      std::memcpy(real_buf_ + static_cast<size_t>(j) * px_, sigma.data() + static_cast<size_t>(j) * spec_.nx,
                  sizeof(double) * spec_.nx);
    fftw_execute(forward_);
    const double scale = spec_.h * spec_.h / (static_cast<double>(px_) * py_);
    for (int k = 0; k < n_complex_; ++k) {
      const double ar = complex_buf_[k][0], ai = complex_buf_[k][1];
      const double br = kernel_hat_[k][0], bi = kernel_hat_[k][1];
      complex_buf_[k][0] = (ar * br - ai * bi) * scale;
      complex_buf_[k][1] = (ar * bi + ai * br) * scale;
    }
    fftw_execute(backward_);
    std::vector<double> out(spec_.size());
    for (int j = 0; j < spec_.ny; ++j)
      std::memcpy(out.data() + static_cast<size_t>(j) * spec_.nx, real_buf_ + static_cast<size_t>(j) * px_,
                  sizeof(double) * spec_.nx);
    return out;
  }

 private:
  GridSpec spec_;
  int px_ = 0, py_ = 0, n_complex_ = 0;
  double* real_buf_ = nullptr;
  fftw_complex* complex_buf_ = nullptr;
  fftw_complex* kernel_hat_ = nullptr;
  fftw_plan forward_{};
  fftw_plan backward_{};
};

// Potential of a charge density: integral of log|x - x'| sigma(x') dx'.
inline GridField log_convolution(const GridField& sigma) {
  LogConvolution conv(sigma.spec);
  GridField out(sigma.spec, FieldRole::Phi);
  out.values = conv.apply(sigma.values);
  return out;
}

}  // namespace laughlin
