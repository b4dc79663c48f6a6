#include "dnspec/interp.hpp"

#include <cmath>

#include "dnspec/hspace.hpp"

namespace dnspec {

std::vector<double> generating_spectrum(const AdmissiblePair& pair) {
  std::vector<double> j(pair.grid.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const double t = pair.grid.bracket(i);
    j[i] = pair.x1_weight(t) / pair.x0_weight(t);
    if (!(j[i] > 0) || !std::isfinite(j[i]))
      throw std::runtime_error("generating_spectrum: non-positive ratio; pair not admissible");
  }
  return j;
}

double interp_norm(const AdmissiblePair& pair, const std::function<double(double)>& psi,
                   const SpectralField& w) {
  if (w.grid() != pair.grid) throw std::invalid_argument("interp_norm: grid mismatch");
  double acc = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double t = pair.grid.bracket(i);
    const double j = pair.x1_weight(t) / pair.x0_weight(t);
    const double pv = psi(j);
    if (!(pv > 0) || !std::isfinite(pv))
      throw std::runtime_error("interp_norm: psi must be positive on the spectrum");
    const double wgt = pair.x0_weight(t) * pv;
    acc += wgt * wgt * std::norm(w[i]);
  }
  return std::sqrt(acc);
}

double interp_norm(const AdmissiblePair& pair, const InterpParameter& psi,
                   const SpectralField& w) {
  return interp_norm(pair, psi.fn, w);
}

Report verify_prop1(const ROParam& phi, double s0, double s1, int trials, const Grid& grid,
                    std::uint64_t seed) {
  const InterpParameter psi = interp_psi(phi, s0, s1);
  const AdmissiblePair pair = AdmissiblePair::sobolev(s0, s1, grid);
  double max_rel_dev = 0;
  for (int t = 0; t < trials; ++t) {
    const SpectralField w = random_field(grid, seed + 7919ull * t);
    const double lhs = interp_norm(pair, psi, w);
    const double rhs = hnorm(w, phi);
    if (rhs > 0) max_rel_dev = std::max(max_rel_dev, std::abs(lhs - rhs) / rhs);
  }
  Report rep;
  rep.name = "proposition1_norm_equality";
  rep.config["phi"] = phi.describe();
  rep.config["s0"] = s0;
  rep.config["s1"] = s1;
  rep.config["trials"] = trials;
  rep.config["psi_certified"] = psi.certified;
  rep.grid_sizes = {grid.modes_per_axis()};
  rep.seeds = {seed};
  rep.constants["max_rel_dev"] = max_rel_dev;
  rep.tolerances["max_rel_dev"] = 1e-10;
  rep.verdict = max_rel_dev <= 1e-10 ? Verdict::pass : Verdict::fail;
  rep.note(kTorusNote);
  if (!psi.certified) rep.note("estimated preconditions: phi carries no declared indices");
  return rep;
}

Report verify_prop3(std::span<const AdmissiblePair> pairs,
                    const std::function<double(double)>& psi, int trials,
                    std::uint64_t seed) {
  if (pairs.empty()) throw std::invalid_argument("verify_prop3: no pairs");
  const Grid grid = pairs[0].grid;
  for (const auto& p : pairs)
    if (p.grid != grid) throw std::invalid_argument("verify_prop3: pairs must share one grid");
  const int p = static_cast<int>(pairs.size());

  double max_rel_dev = 0;
  for (int t = 0; t < trials; ++t) {
    const VectorField u = random_vector_field(grid, p, seed + 104729ull * t);
    // direct-sum route: block-diagonal generating operator, one flat sum
    double sum_sq = 0;
    for (int k = 0; k < p; ++k) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double br = grid.bracket(i);
        const double j = pairs[k].x1_weight(br) / pairs[k].x0_weight(br);
        const double wgt = pairs[k].x0_weight(br) * psi(j);
        sum_sq += wgt * wgt * std::norm(u[k][i]);
      }
    }
    const double direct_sum_norm = std::sqrt(sum_sq);
    // componentwise route: l2 of per-component interpolation norms
    double comp_sq = 0;
    for (int k = 0; k < p; ++k) {
      const double nk = interp_norm(pairs[k], psi, u[k]);
      comp_sq += nk * nk;
    }
    const double componentwise = std::sqrt(comp_sq);
    if (componentwise > 0)
      max_rel_dev = std::max(max_rel_dev,
                             std::abs(direct_sum_norm - componentwise) / componentwise);
  }

  Report rep;
  rep.name = "proposition3_direct_sum";
  rep.config["pairs"] = p;
  rep.config["trials"] = trials;
  rep.grid_sizes = {grid.modes_per_axis()};
  rep.seeds = {seed};
  rep.constants["max_rel_dev"] = max_rel_dev;
  rep.tolerances["max_rel_dev"] = 1e-10;
  rep.verdict = max_rel_dev <= 1e-10 ? Verdict::pass : Verdict::fail;
  rep.note(kTorusNote);
  return rep;
}

}  // namespace dnspec
