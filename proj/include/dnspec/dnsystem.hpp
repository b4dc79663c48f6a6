#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dnspec/field.hpp"
#include "dnspec/report.hpp"

namespace dnspec {

using MultiIndex = std::array<int, 3>;

inline int order_of(const MultiIndex& mu) { return mu[0] + mu[1] + mu[2]; }

/// Finite Fourier series sum_eta c_eta e^{i eta.x}; models the admissible
/// coefficient class (trigonometric polynomials have bounded derivatives of
/// every order). Term order is canonical via the map key.
struct TrigPoly {
  std::map<MultiIndex, cdouble> terms;

  static TrigPoly constant(cdouble c);
  bool is_constant() const;
  bool is_zero() const;
  cdouble constant_value() const;  // requires is_constant()
  cdouble evaluate(const std::array<double, 3>& x, int n) const;
  TrigPoly conjugated() const;     // complex conjugate of the function
  /// D^alpha applied termwise (our D_j is the multiplier xi_j, so the term
  /// at frequency eta picks up eta^alpha).
  TrigPoly derivative(const MultiIndex& alpha) const;
  TrigPoly& add(const MultiIndex& eta, cdouble amp);
};

/// One scalar differential operator sum_{|mu|<=r} a_mu(x) D^mu in standard
/// form. D^mu acts on a spectral field as multiplication by xi^mu followed
/// by exact coefficient convolution (modes leaving the lattice cube are
/// truncated, which keeps the discrete adjoint identity exact).
struct DiffOp {
  std::map<MultiIndex, TrigPoly> terms;

  int order() const;  // max |mu| with a nonzero coefficient; -1 when zero
  bool x_independent() const;
  DiffOp& add(const MultiIndex& mu, TrigPoly coeff);
  DiffOp& add(const MultiIndex& mu, cdouble constant);

  cdouble full_symbol(const std::array<double, 3>& x, const std::array<double, 3>& xi,
                      int n) const;
  /// Only the terms with |mu| == k.
  cdouble symbol_of_order(const std::array<double, 3>& x, const std::array<double, 3>& xi,
                          int n, int k) const;

  SpectralField apply(const SpectralField& u) const;
  /// Formal adjoint sum_mu D^mu(conj(a_mu) .) expanded by Leibniz into
  /// standard form.
  DiffOp adjoint() const;
};

struct DnNumbers {
  std::vector<double> l, m;
  double q() const;
};

/// p x p Douglis-Nirenberg system A = (A_jk(x, D)).
struct DNSystem {
  int p = 0;
  int n = 0;  // space dimension
  std::vector<std::vector<DiffOp>> ops;  // [j][k]
  std::optional<DnNumbers> dn;

  /// Block orders; negative entry = identically-zero block (no constraint).
  std::vector<std::vector<int>> order_matrix() const;
  bool constant_coefficients() const;
  bool check_condition_i() const;  // r_jk <= l_j + m_k entrywise

  VectorField apply(const VectorField& u) const;

  Eigen::MatrixXcd principal_symbol(const std::array<double, 3>& x,
                                    const std::array<double, 3>& xi) const;
  Eigen::MatrixXcd full_symbol(const std::array<double, 3>& x,
                               const std::array<double, 3>& xi) const;
  /// Full symbol for constant-coefficient systems (x irrelevant).
  Eigen::MatrixXcd full_symbol(const std::array<double, 3>& xi) const;

  DNSystem formal_adjoint() const;

  static DNSystem from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

/// Minimizes sum l + sum m subject to l_j + m_k >= r_jk with l_1 = 0, solved
/// exactly in rationals; ties broken by the lexicographically smallest
/// (l, m) (coordinates unbounded on the optimal face are pinned nearest 0,
/// and each connected component of the order matrix gets one l pinned).
/// Orders: negative entries mean identically-zero blocks. Throws when a
/// row/column is entirely absent or no transversal of finite entries exists.
DnNumbers solve_dn_numbers(const std::vector<std::vector<int>>& orders);

/// Unit vectors for margin scans: n=1 two points, n=2 720 angles,
/// n=3 Fibonacci sphere with 2000 points.
std::vector<std::array<double, 3>> unit_sphere_grid(int n);
/// Physical x samples: single origin for constant coefficients, else the
/// points of an N=16 torus grid.
std::vector<std::array<double, 3>> default_x_samples(const DNSystem& sys);

/// min |det principal_symbol(x, xi)| over x samples and unit xi; passes when
/// the margin exceeds the tolerance. Sampling refutes or lower-bounds
/// uniform ellipticity, never certifies it.
Report ellipticity_margin(const DNSystem& sys,
                          std::span<const std::array<double, 3>> x_samples,
                          std::span<const std::array<double, 3>> sphere_grid,
                          double tolerance = 1e-9);
Report ellipticity_margin(const DNSystem& sys, double tolerance = 1e-9);

/// min |det full_symbol(x, xi)| / <xi>^q over samples with |x|+|xi| >= c2.
Report condition_b_margin(const DNSystem& sys, double c2,
                          std::span<const std::array<double, 3>> x_samples,
                          std::span<const std::array<double, 3>> xi_samples,
                          double tolerance = 1e-9);
Report condition_b_margin(const DNSystem& sys, double c2, const Grid& xi_lattice,
                          double tolerance = 1e-9);

}  // namespace dnspec
