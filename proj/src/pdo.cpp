#include "dnspec/pdo.hpp"

#include <cmath>
#include <sstream>

#include "dnspec/hspace.hpp"
#include "dnspec/parallel.hpp"

namespace dnspec {

FourierOp FourierOp::multiplier(int p, int n, SymbolFn g, double order) {
  FourierOp op;
  op.p_ = p;
  op.n_ = n;
  op.sym_ = std::move(g);
  op.order_ = order;
  return op;
}

FourierOp FourierOp::left_quantized(int p, int n, XSymbolFn g, double order) {
  FourierOp op;
  op.p_ = p;
  op.n_ = n;
  op.xsym_ = std::move(g);
  op.order_ = order;
  return op;
}

FourierOp FourierOp::from_system(const DNSystem& sys) {
  FourierOp op;
  op.p_ = sys.p;
  op.n_ = sys.n;
  op.sys_ = sys;
  double r = 0;
  if (sys.dn) {
    for (int j = 0; j < sys.p; ++j)
      for (int k = 0; k < sys.p; ++k)
        if (sys.ops[j][k].order() >= 0) r = std::max(r, sys.dn->l[j] + sys.dn->m[k]);
  } else {
    for (const auto& row : sys.ops)
      for (const auto& o : row) r = std::max(r, double(o.order()));
  }
  op.order_ = r;
  return op;
}

FourierOp FourierOp::identity(int p, int n) {
  return multiplier(
      p, n, [p](const std::array<double, 3>&) { return Eigen::MatrixXcd::Identity(p, p); },
      0.0);
}

Eigen::MatrixXcd FourierOp::symbol(const std::array<double, 3>& xi) const {
  return symbol({0, 0, 0}, xi);
}

Eigen::MatrixXcd FourierOp::symbol(const std::array<double, 3>& x,
                                   const std::array<double, 3>& xi) const {
  if (sym_) return sym_(xi);
  if (xsym_) return xsym_(x, xi);
  return sys_->full_symbol(x, xi);
}

VectorField FourierOp::apply(const VectorField& u) const {
  if (u.p() != p_) throw std::invalid_argument("FourierOp::apply: component mismatch");
  const Grid& g = u.grid();
  if (g.dim() != n_) throw std::invalid_argument("FourierOp::apply: dimension mismatch");

  if (sys_) return sys_->apply(u);

  if (sym_) {
    VectorField out(g, p_);
    parallel_for(g.size(), [&](std::size_t i) {
      const auto m = g.mode_at(i);
      const Eigen::MatrixXcd s = sym_({double(m[0]), double(m[1]), double(m[2])});
      Eigen::VectorXcd v(p_);
      for (int k = 0; k < p_; ++k) v(k) = u[k][i];
      const Eigen::VectorXcd w = s * v;
      for (int k = 0; k < p_; ++k) out[k][i] = w(k);
    });
    return out;
  }

  // generic left quantization Gu(x) = sum_xi g(x, xi) u_hat(xi) e^{i x.xi},
  // evaluated on the doubled grid and truncated back (alias-free)
  const Grid g2(g.dim(), 2 * g.modes_per_axis());
  std::vector<std::vector<cdouble>> samples(p_, std::vector<cdouble>(g2.size()));
  parallel_for(g2.size(), [&](std::size_t pt) {
    const auto x = g2.point_at(pt);
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(p_);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto m = g.mode_at(i);
      double phase = 0;
      for (int ax = 0; ax < n_; ++ax) phase += m[ax] * x[ax];
      Eigen::VectorXcd v(p_);
      for (int k = 0; k < p_; ++k) v(k) = u[k][i];
      acc += xsym_(x, {double(m[0]), double(m[1]), double(m[2])}) * v *
             cdouble(std::cos(phase), std::sin(phase));
    }
    for (int k = 0; k < p_; ++k) samples[k][pt] = acc(k);
  });
  VectorField out(g, p_);
  for (int k = 0; k < p_; ++k) {
    const SpectralField wide = transform(g2, samples[k]);
    for (std::size_t i = 0; i < g.size(); ++i)
      out[k][i] = wide.at_mode(g.mode_at(i));
  }
  return out;
}

double FourierOp::growth_constant(const Grid& grid) const {
  std::vector<std::array<double, 3>> xs{{0, 0, 0}};
  if (!x_independent()) {
    const Grid sample(grid.dim(), 8);
    xs.resize(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) xs[i] = sample.point_at(i);
  }
  double best = 0;
  for (const auto& x : xs) {
    const double local = chunked_reduce(
        grid.size(), 0.0,
        [&](std::size_t b, std::size_t e) {
          double m = 0;
          for (std::size_t i = b; i < e; ++i) {
            const auto mo = grid.mode_at(i);
            const Eigen::MatrixXcd s = symbol(x, {double(mo[0]), double(mo[1]), double(mo[2])});
            if (s.cwiseAbs().maxCoeff() == 0) continue;
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s);
            m = std::max(m, svd.singularValues()(0) / std::pow(grid.bracket(i), order_));
          }
          return m;
        },
        [](double a, double b) { return std::max(a, b); });
    best = std::max(best, local);
  }
  return best;
}

double default_cutoff_radius(const DNSystem& sys, const Grid& grid) {
  if (!sys.constant_coefficients())
    throw std::invalid_argument("default_cutoff_radius: constant coefficients required");
  double worst = -1.0;  // max over the empty set, so invertible symbols get R = 0
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto m = grid.mode_at(i);
    const cdouble det = sys.full_symbol({double(m[0]), double(m[1]), double(m[2])}).determinant();
    if (std::abs(det) <= 1e-9) worst = std::max(worst, grid.bracket(i));
  }
  return 1.2 * (1.0 + worst);
}

ParametrixBundle build_parametrix(const DNSystem& sys, const Grid& grid,
                                  std::optional<double> radius) {
  if (!sys.constant_coefficients())
    throw std::invalid_argument(
        "build_parametrix: variable coefficients are out of scope; freeze them first");
  if (!sys.dn) throw std::invalid_argument("build_parametrix: DN numbers required");
  const int p = sys.p;
  const double R = radius ? *radius : default_cutoff_radius(sys, grid);

  ParametrixBundle bundle;
  bundle.cutoff_radius = R;
  bundle.block_growth = Eigen::MatrixXd::Zero(p, p);

  // construction-time scan: invertibility with margin on every mode the
  // cutoff keeps, condition numbers reported
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.bracket(i) < R) {
      ++bundle.smoothing_modes;
      continue;
    }
    const auto m = grid.mode_at(i);
    const std::array<double, 3> xi{double(m[0]), double(m[1]), double(m[2])};
    const Eigen::MatrixXcd a = sys.full_symbol(xi);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    const double det = std::abs(lu.determinant());
    if (det <= 1e-12) {
      std::ostringstream os;
      os << "build_parametrix: det A(xi) vanishes at lattice mode (" << m[0];
      if (sys.n > 1) os << "," << m[1];
      if (sys.n > 2) os << "," << m[2];
      os << ") with <xi> = " << grid.bracket(i) << " >= R = " << R;
      throw std::runtime_error(os.str());
    }
    const Eigen::MatrixXcd inv = lu.inverse();
    const double cond = a.cwiseAbs().rowwise().sum().maxCoeff() *
                        inv.cwiseAbs().rowwise().sum().maxCoeff();
    bundle.max_condition = std::max(bundle.max_condition, cond);
    if (cond > 1e12) ++bundle.flagged_modes;
    for (int k = 0; k < p; ++k)
      for (int j = 0; j < p; ++j)
        bundle.block_growth(k, j) =
            std::max(bundle.block_growth(k, j),
                     std::abs(inv(k, j)) * std::pow(grid.bracket(i), sys.dn->m[k] + sys.dn->l[j]));
  }

  const DNSystem frozen = sys;
  bundle.B = FourierOp::multiplier(
      p, sys.n,
      [frozen, R, p](const std::array<double, 3>& xi) -> Eigen::MatrixXcd {
        double n2 = 0;
        for (double v : xi) n2 += v * v;
        if (std::sqrt(1.0 + n2) < R) return Eigen::MatrixXcd::Zero(p, p);
        const Eigen::MatrixXcd a = frozen.full_symbol(xi);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
        if (std::abs(lu.determinant()) <= 1e-12) {
          std::ostringstream os;
          os << "parametrix symbol: det A vanishes at <xi> >= R (xi_1 = " << xi[0] << ")";
          throw std::runtime_error(os.str());
        }
        return lu.inverse();
      },
      // worst block order; per-block growth is tracked in the bundle
      [&] {
        double r = -(sys.dn->m[0] + sys.dn->l[0]);
        for (int k = 0; k < p; ++k)
          for (int j = 0; j < p; ++j) r = std::max(r, -(sys.dn->m[k] + sys.dn->l[j]));
        return r;
      }());

  auto smoothing = [R, p](const std::array<double, 3>& xi) -> Eigen::MatrixXcd {
    double n2 = 0;
    for (double v : xi) n2 += v * v;
    if (std::sqrt(1.0 + n2) < R)
      return -Eigen::MatrixXcd::Identity(p, p);
    return Eigen::MatrixXcd::Zero(p, p);
  };
  // finite stand-in for order -infinity: the symbol vanishes off finitely
  // many modes, so every declared order admits a finite growth constant
  bundle.T1 = FourierOp::multiplier(p, sys.n, smoothing, -100.0);
  bundle.T2 = FourierOp::multiplier(p, sys.n, smoothing, -100.0);
  return bundle;
}

OpNorm op_norm_estimate(const FourierOp& op, const ROParam& phi_src, const ROParam& phi_dst,
                        int trials, const Grid& grid, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("op_norm_estimate: trials must be >= 1");
  OpNorm result;
  const std::vector<ROParam> src(op.size(), phi_src), dst(op.size(), phi_dst);
  for (int t = 0; t < trials; ++t) {
    VectorField u = random_vector_field(grid, op.size(), seed + 1000003ull * t);
    const double nu = hnorm(u, src);
    if (nu == 0) continue;
    u *= cdouble(1.0 / nu, 0.0);
    result.empirical = std::max(result.empirical, hnorm(op.apply(u), dst));
  }
  if (op.x_independent()) result.exact = exact_weighted_norm(op, src, dst, grid);
  return result;
}

double exact_weighted_norm(const FourierOp& op, std::span<const ROParam> src,
                           std::span<const ROParam> dst, const Grid& grid) {
  if (!op.x_independent())
    throw std::invalid_argument("exact_weighted_norm: x-independent symbols only");
  const int p = op.size();
  if (static_cast<int>(src.size()) != p || static_cast<int>(dst.size()) != p)
    throw std::invalid_argument("exact_weighted_norm: weight count mismatch");
  return chunked_reduce(
      grid.size(), 0.0,
      [&](std::size_t b, std::size_t e) {
        double m = 0;
        for (std::size_t i = b; i < e; ++i) {
          const auto mo = grid.mode_at(i);
          const double t = grid.bracket(i);
          Eigen::MatrixXcd s = op.symbol({double(mo[0]), double(mo[1]), double(mo[2])});
          for (int r = 0; r < p; ++r) {
            const double wd = dst[r](t);
            for (int c = 0; c < p; ++c) s(r, c) *= wd / src[c](t);
          }
          Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s);
          m = std::max(m, svd.singularValues()(0));
        }
        return m;
      },
      [](double a, double b) { return std::max(a, b); });
}

}  // namespace dnspec
