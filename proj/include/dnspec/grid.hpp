#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace dnspec {

/// Frequency lattice of the 2pi-periodic n-torus: modes
/// xi in {-N/2, ..., N/2-1}^n stored in FFT order per axis.
class Grid {
 public:
  Grid(int n, int N) : n_(n), N_(N) {
    if (n < 1 || n > 3) throw std::invalid_argument("Grid: dimension must be 1..3");
    if (N < 4 || N % 2 != 0) throw std::invalid_argument("Grid: N must be even and >= 4");
  }

  int dim() const { return n_; }
  int modes_per_axis() const { return N_; }
  std::size_t size() const {
    std::size_t s = 1;
    for (int i = 0; i < n_; ++i) s *= static_cast<std::size_t>(N_);
    return s;
  }

  /// FFT-order axis index -> signed frequency.
  int freq(int i) const { return i < N_ / 2 ? i : i - N_; }
  /// Signed frequency -> FFT-order axis index.
  int index_of_freq(int f) const { return f >= 0 ? f : f + N_; }
  bool in_range(int f) const { return f >= -N_ / 2 && f < N_ / 2; }

  std::array<int, 3> mode_at(std::size_t flat) const {
    std::array<int, 3> xi{0, 0, 0};
    for (int ax = n_ - 1; ax >= 0; --ax) {
      xi[ax] = freq(static_cast<int>(flat % N_));
      flat /= N_;
    }
    return xi;
  }

  std::size_t flat_of_mode(const std::array<int, 3>& xi) const {
    std::size_t flat = 0;
    for (int ax = 0; ax < n_; ++ax) {
      if (!in_range(xi[ax])) throw std::out_of_range("Grid: mode outside lattice");
      flat = flat * N_ + static_cast<std::size_t>(index_of_freq(xi[ax]));
    }
    return flat;
  }

  double xi_norm2(std::size_t flat) const {
    const auto xi = mode_at(flat);
    double s = 0;
    for (int ax = 0; ax < n_; ++ax) s += double(xi[ax]) * xi[ax];
    return s;
  }

  /// Smoothed modulus <xi> = (1 + |xi|^2)^{1/2}, always >= 1.
  double bracket(std::size_t flat) const { return std::sqrt(1.0 + xi_norm2(flat)); }
  static double bracket_of(const std::array<int, 3>& xi, int n) {
    double s = 0;
    for (int ax = 0; ax < n; ++ax) s += double(xi[ax]) * xi[ax];
    return std::sqrt(1.0 + s);
  }

  /// Physical sample point x_j = 2 pi j / N for flat sample index.
  std::array<double, 3> point_at(std::size_t flat) const {
    std::array<double, 3> x{0, 0, 0};
    for (int ax = n_ - 1; ax >= 0; --ax) {
      x[ax] = 2.0 * M_PI * static_cast<double>(flat % N_) / N_;
      flat /= N_;
    }
    return x;
  }

  bool operator==(const Grid& o) const { return n_ == o.n_ && N_ == o.N_; }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  int n_, N_;
};

}  // namespace dnspec
