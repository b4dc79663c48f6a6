#pragma once

#include <span>

#include "dnspec/field.hpp"
#include "dnspec/report.hpp"
#include "dnspec/roparam.hpp"

namespace dnspec {

/// H^phi norm: (sum_xi phi(<xi>)^2 |w_hat(xi)|^2)^{1/2}. With phi = power:0
/// this is the L2 norm.
double hnorm(const SpectralField& w, const ROParam& phi);

/// l2 combination of per-component H^{weights[k]} norms.
double hnorm(const VectorField& u, std::span<const ROParam> weights);

/// Sesquilinear form sum_xi u_hat conj(v_hat); realizes the L2(torus) pairing
/// and the H^phi x H^{1/phi} duality: |pair| <= hnorm(u,phi) hnorm(v,1/phi).
cdouble duality_pair(const SpectralField& u, const SpectralField& v);
cdouble duality_pair(const VectorField& u, const VectorField& v);

/// Checks the embedding H^omega into C^lambda_b: convergence verdict for
/// int_1^inf t^{2 lambda + n - 1} omega^{-2}(t) dt (analytic via index
/// comparison, doubling test on log-spaced blocks at the boundary) plus the
/// discrete constant C = (sum_xi max_{|mu|<=lambda} xi^{2mu} omega^{-2}(<xi>))^{1/2}
/// with sup_x |D^mu w| <= C hnorm(w, omega).
Report embedding_constant(const ROParam& omega, int lambda, const Grid& grid);

/// max over physical grid points and multi-indices |mu| <= lambda of
/// |D^mu w|, derivatives taken spectrally.
double sup_derivative_norm(const SpectralField& w, int lambda);

/// hnorm of the exact pointwise product chi*w (computed alias-free on the
/// doubled lattice); the seminorm family w -> |chi w|_phi.
double localized_norm(const SpectralField& w, const SpectralField& chi, const ROParam& phi);

/// Multi-index helper: calls fn(mu) for every multi-index of dimension n with
/// |mu| <= max_order.
void for_each_multi_index(int n, int max_order,
                          const std::function<void(const std::array<int, 3>&)>& fn);

}  // namespace dnspec
