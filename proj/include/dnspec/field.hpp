#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dnspec/grid.hpp"

namespace dnspec {

using cdouble = std::complex<double>;

/// A function on the n-torus stored by its Fourier coefficients on the
/// lattice cube. The transform pair is unitary with respect to the
/// normalized measure dx/(2pi)^n: a constant sample 1 has w_hat(0) = 1 and
/// sum |w_hat|^2 equals the mean square of the samples.
class SpectralField {
 public:
  explicit SpectralField(Grid g) : grid_(g), c_(g.size()) {}
  SpectralField(Grid g, std::vector<cdouble> coeffs);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return c_.size(); }

  cdouble& operator[](std::size_t flat) { return c_[flat]; }
  const cdouble& operator[](std::size_t flat) const { return c_[flat]; }
  cdouble& at_mode(const std::array<int, 3>& xi) { return c_[grid_.flat_of_mode(xi)]; }
  const cdouble& at_mode(const std::array<int, 3>& xi) const {
    return c_[grid_.flat_of_mode(xi)];
  }
  std::span<const cdouble> coeffs() const { return c_; }
  std::span<cdouble> coeffs() { return c_; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(cdouble a);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(cdouble a, SpectralField f) { return f *= a; }

  /// sqrt(sum |w_hat|^2); equals the physical-space L2 norm (normalized
  /// measure) by Parseval.
  double parseval_l2() const;

 private:
  Grid grid_;
  std::vector<cdouble> c_;
};

/// Forward transform: physical samples (row-major, FFT point order) ->
/// coefficients. Throws on shape mismatch.
SpectralField transform(const Grid& g, std::span<const cdouble> samples);
/// Inverse transform: coefficients -> physical samples.
std::vector<cdouble> inverse_transform(const SpectralField& f);

/// Exact pointwise product of two band-limited fields, returned on the
/// doubled lattice (2N modes per axis) so no frequency of the true product
/// is aliased.
SpectralField pointwise_product(const SpectralField& a, const SpectralField& b);

/// Column vector of p fields on a common grid.
struct VectorField {
  std::vector<SpectralField> comp;

  VectorField() = default;
  VectorField(const Grid& g, int p) : comp(p, SpectralField(g)) {}
  int p() const { return static_cast<int>(comp.size()); }
  const Grid& grid() const { return comp.at(0).grid(); }
  SpectralField& operator[](int k) { return comp[static_cast<std::size_t>(k)]; }
  const SpectralField& operator[](int k) const { return comp[static_cast<std::size_t>(k)]; }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(cdouble a);
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
};

/// Deterministic bit-level RNG primitives (splitmix64 + Box-Muller): the
/// same seed gives the same stream on every platform and thread count.
std::uint64_t hash_mix(std::uint64_t seed, std::uint64_t salt);
cdouble seeded_gaussian(std::uint64_t key);

/// Deterministic seeded random fields: coefficients are i.i.d. complex
/// Gaussians shaped by the decay envelope <xi>^{-envelope}, so every H^phi
/// norm in the test batteries stays finite under refinement. The default
/// envelope is (n+1)/2.
SpectralField random_field(const Grid& g, std::uint64_t seed, double envelope);
SpectralField random_field(const Grid& g, std::uint64_t seed);
VectorField random_vector_field(const Grid& g, int p, std::uint64_t seed, double envelope);
VectorField random_vector_field(const Grid& g, int p, std::uint64_t seed);

/// Binary field I/O: header of three little-endian uint32 (n, N, p) followed
/// by row-major complex128 coefficients, component-major; a JSON manifest is
/// written alongside at path + ".json".
void write_field(const std::string& path, const VectorField& f);
VectorField read_field(const std::string& path);

}  // namespace dnspec
