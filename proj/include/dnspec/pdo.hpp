#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "dnspec/dnsystem.hpp"
#include "dnspec/field.hpp"
#include "dnspec/report.hpp"
#include "dnspec/roparam.hpp"

namespace dnspec {

/// A p x p Fourier-multiplier or left-quantized operator with a declared
/// formal order. x-independent operators act exactly per mode; differential
/// systems act by exact coefficient convolution; generic x-dependent symbols
/// are quantized on the doubled grid to avoid aliasing.
class FourierOp {
 public:
  using SymbolFn = std::function<Eigen::MatrixXcd(const std::array<double, 3>&)>;
  using XSymbolFn =
      std::function<Eigen::MatrixXcd(const std::array<double, 3>&, const std::array<double, 3>&)>;

  FourierOp() = default;  // empty; assign from a factory before use
  static FourierOp multiplier(int p, int n, SymbolFn g, double order);
  static FourierOp left_quantized(int p, int n, XSymbolFn g, double order);
  static FourierOp from_system(const DNSystem& sys);
  static FourierOp identity(int p, int n);

  int size() const { return p_; }
  int dim() const { return n_; }
  double declared_order() const { return order_; }
  bool x_independent() const { return !xsym_ && !(sys_ && !sys_->constant_coefficients()); }

  Eigen::MatrixXcd symbol(const std::array<double, 3>& xi) const;
  Eigen::MatrixXcd symbol(const std::array<double, 3>& x, const std::array<double, 3>& xi) const;

  VectorField apply(const VectorField& u) const;

  /// Largest ||g(xi)||_2 <xi>^{-order} over the lattice (x sampled for
  /// x-dependent symbols): the growth-bound constant of the declared order.
  double growth_constant(const Grid& grid) const;

 private:
  int p_ = 0, n_ = 0;
  double order_ = 0;
  SymbolFn sym_;
  XSymbolFn xsym_;
  std::optional<DNSystem> sys_;
};

/// B with symbol A(xi)^{-1} off the cutoff ball and 0 inside; T1 = T2 with
/// symbol -1_{<xi> < R} I, so BA = I + T1 and AB = I + T2 hold exactly per
/// mode and T1 is supported on finitely many modes (the discrete order
/// -infinity class).
struct ParametrixBundle {
  FourierOp B, T1, T2;
  double cutoff_radius = 0;
  int smoothing_modes = 0;   // lattice modes inside the cutoff ball
  int flagged_modes = 0;     // condition number above 1e12
  double max_condition = 0;
  Eigen::MatrixXd block_growth;  // max |B_kj(xi)| <xi>^{m_k + l_j} over the lattice
};

/// Scans det A(xi) over the lattice; 1.2 (1 + largest singular <xi>), or 0
/// when the symbol is invertible everywhere.
double default_cutoff_radius(const DNSystem& sys, const Grid& grid);

/// Constant-coefficient parametrix. Throws (naming the mode) when det A(xi)
/// vanishes at some lattice mode with <xi> >= R.
ParametrixBundle build_parametrix(const DNSystem& sys, const Grid& grid,
                                  std::optional<double> radius = std::nullopt);

struct OpNorm {
  double empirical = 0;
  std::optional<double> exact;  // x-independent operators only
};

/// Empirical operator norm H^{phi_src} -> H^{phi_dst} over random
/// unit-norm fields, plus the exact per-mode supremum when the symbol is
/// x-independent.
OpNorm op_norm_estimate(const FourierOp& op, const ROParam& phi_src, const ROParam& phi_dst,
                        int trials, const Grid& grid, std::uint64_t seed);

/// Exact norm between weighted direct sums: sup over lattice modes of
/// || diag(dst_k(<xi>)) g(xi) diag(src_j(<xi>))^{-1} ||_2.
double exact_weighted_norm(const FourierOp& op, std::span<const ROParam> src,
                           std::span<const ROParam> dst, const Grid& grid);

}  // namespace dnspec
