#pragma once

#include <span>

#include "dnspec/field.hpp"
#include "dnspec/report.hpp"
#include "dnspec/roparam.hpp"

namespace dnspec {

/// An ordered pair [X0, X1] of weighted sequence spaces on one lattice with
/// X1 densely and continuously embedded in X0; the generating operator is
/// the diagonal multiplier j(xi) = X1_weight(<xi>)/X0_weight(<xi>).
struct AdmissiblePair {
  ROParam x0_weight;
  ROParam x1_weight;
  Grid grid;

  AdmissiblePair(ROParam w0, ROParam w1, Grid g)
      : x0_weight(std::move(w0)), x1_weight(std::move(w1)), grid(g) {}
  static AdmissiblePair sobolev(double s0, double s1, Grid g) {
    return AdmissiblePair(ROParam::power(s0), ROParam::power(s1), g);
  }
};

/// Per-mode eigenvalues of the generating operator, flat lattice order.
/// Throws when some ratio is non-positive (the pair is not admissible).
std::vector<double> generating_spectrum(const AdmissiblePair& pair);

/// |psi(J) w|_{X0} = (sum_xi X0_weight^2(<xi>) psi^2(j(xi)) |w_hat|^2)^{1/2}.
double interp_norm(const AdmissiblePair& pair, const std::function<double(double)>& psi,
                   const SpectralField& w);
double interp_norm(const AdmissiblePair& pair, const InterpParameter& psi,
                   const SpectralField& w);

/// Interpolation between Sobolev exponents with the parameter of the RO
/// function phi reproduces the H^phi norm exactly per mode; reports the
/// largest relative deviation over random fields.
Report verify_prop1(const ROParam& phi, double s0, double s1, int trials, const Grid& grid,
                    std::uint64_t seed);

/// Interpolation commutes with finite direct sums with equality of norms:
/// block-diagonal generating operator vs l2 combination per component.
Report verify_prop3(std::span<const AdmissiblePair> pairs,
                    const std::function<double(double)>& psi, int trials,
                    std::uint64_t seed);

}  // namespace dnspec
