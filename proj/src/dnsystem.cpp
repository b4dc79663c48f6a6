#include "dnspec/dnsystem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dnspec/lp.hpp"
#include "dnspec/parallel.hpp"

namespace dnspec {

namespace {

double ipow(double base, int e) {
  double v = 1;
  for (int i = 0; i < e; ++i) v *= base;
  return v;
}

double xi_pow(const std::array<double, 3>& xi, const MultiIndex& mu, int n) {
  double v = 1;
  for (int ax = 0; ax < n; ++ax) v *= ipow(xi[ax], mu[ax]);
  return v;
}
}  // namespace

TrigPoly TrigPoly::constant(cdouble c) {
  TrigPoly p;
  if (c != cdouble(0.0, 0.0)) p.terms[{0, 0, 0}] = c;
  return p;
}

bool TrigPoly::is_constant() const {
  for (const auto& [eta, amp] : terms)
    if (eta != MultiIndex{0, 0, 0} && amp != cdouble(0.0, 0.0)) return false;
  return true;
}

bool TrigPoly::is_zero() const {
  for (const auto& [eta, amp] : terms)
    if (amp != cdouble(0.0, 0.0)) return false;
  return true;
}

cdouble TrigPoly::constant_value() const {
  const auto it = terms.find({0, 0, 0});
  return it == terms.end() ? cdouble(0.0, 0.0) : it->second;
}

cdouble TrigPoly::evaluate(const std::array<double, 3>& x, int n) const {
  cdouble acc(0.0, 0.0);
  for (const auto& [eta, amp] : terms) {
    double phase = 0;
    for (int ax = 0; ax < n; ++ax) phase += eta[ax] * x[ax];
    acc += amp * cdouble(std::cos(phase), std::sin(phase));
  }
  return acc;
}

TrigPoly TrigPoly::conjugated() const {
  TrigPoly out;
  for (const auto& [eta, amp] : terms)
    out.add({-eta[0], -eta[1], -eta[2]}, std::conj(amp));
  return out;
}

TrigPoly TrigPoly::derivative(const MultiIndex& alpha) const {
  TrigPoly out;
  for (const auto& [eta, amp] : terms) {
    double f = 1;
    for (int ax = 0; ax < 3; ++ax) f *= ipow(eta[ax], alpha[ax]);
    if (f != 0) out.add(eta, amp * f);
  }
  return out;
}

TrigPoly& TrigPoly::add(const MultiIndex& eta, cdouble amp) {
  auto& slot = terms[eta];
  slot += amp;
  if (slot == cdouble(0.0, 0.0)) terms.erase(eta);
  return *this;
}

int DiffOp::order() const {
  int r = -1;
  for (const auto& [mu, coeff] : terms)
    if (!coeff.is_zero()) r = std::max(r, order_of(mu));
  return r;
}

bool DiffOp::x_independent() const {
  for (const auto& [mu, coeff] : terms)
    if (!coeff.is_constant()) return false;
  return true;
}

DiffOp& DiffOp::add(const MultiIndex& mu, TrigPoly coeff) {
  for (const auto& [eta, amp] : coeff.terms) terms[mu].add(eta, amp);
  return *this;
}

DiffOp& DiffOp::add(const MultiIndex& mu, cdouble constant) {
  return add(mu, TrigPoly::constant(constant));
}

cdouble DiffOp::full_symbol(const std::array<double, 3>& x, const std::array<double, 3>& xi,
                            int n) const {
  cdouble acc(0.0, 0.0);
  for (const auto& [mu, coeff] : terms)
    acc += coeff.evaluate(x, n) * xi_pow(xi, mu, n);
  return acc;
}

cdouble DiffOp::symbol_of_order(const std::array<double, 3>& x,
                                const std::array<double, 3>& xi, int n, int k) const {
  cdouble acc(0.0, 0.0);
  for (const auto& [mu, coeff] : terms)
    if (order_of(mu) == k) acc += coeff.evaluate(x, n) * xi_pow(xi, mu, n);
  return acc;
}

SpectralField DiffOp::apply(const SpectralField& u) const {
  const Grid& g = u.grid();
  const int n = g.dim();
  SpectralField out(g);
  for (const auto& [mu, coeff] : terms) {
    // D^mu: per-mode multiplication by xi^mu
    std::vector<cdouble> diff(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto xi = g.mode_at(i);
      double f = 1;
      for (int ax = 0; ax < n; ++ax) f *= ipow(xi[ax], mu[ax]);
      diff[i] = u[i] * f;
    }
    // coefficient convolution: frequency eta shifts the mode; shifts leaving
    // the cube are truncated
    for (const auto& [eta, amp] : coeff.terms) {
      if (amp == cdouble(0.0, 0.0)) continue;
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (diff[i] == cdouble(0.0, 0.0)) continue;
        auto xi = g.mode_at(i);
        MultiIndex shifted{0, 0, 0};
        bool ok = true;
        for (int ax = 0; ax < n; ++ax) {
          shifted[ax] = xi[ax] + eta[ax];
          ok = ok && g.in_range(shifted[ax]);
        }
        if (ok) out.at_mode(shifted) += amp * diff[i];
      }
    }
  }
  return out;
}

DiffOp DiffOp::adjoint() const {
  // (sum_mu a_mu D^mu)^+ = sum_mu D^mu (conj(a_mu) .), expanded by Leibniz:
  // D^mu(g u) = sum_{nu<=mu} C(mu,nu) (D^{mu-nu} g)(D^nu u).
  DiffOp out;
  auto binom = [](int a, int b) {
    double v = 1;
    for (int i = 0; i < b; ++i) v = v * (a - i) / (i + 1);
    return v;
  };
  for (const auto& [mu, coeff] : terms) {
    const TrigPoly g = coeff.conjugated();
    MultiIndex nu{0, 0, 0};
    for (nu[0] = 0; nu[0] <= mu[0]; ++nu[0])
      for (nu[1] = 0; nu[1] <= mu[1]; ++nu[1])
        for (nu[2] = 0; nu[2] <= mu[2]; ++nu[2]) {
          const MultiIndex rest{mu[0] - nu[0], mu[1] - nu[1], mu[2] - nu[2]};
          double c = 1;
          for (int ax = 0; ax < 3; ++ax) c *= binom(mu[ax], nu[ax]);
          TrigPoly dg = g.derivative(rest);
          if (dg.is_zero()) continue;
          for (auto& [eta, amp] : dg.terms) amp *= c;
          out.add(nu, dg);
        }
  }
  return out;
}

double DnNumbers::q() const {
  double acc = 0;
  for (double v : l) acc += v;
  for (double v : m) acc += v;
  return acc;
}

std::vector<std::vector<int>> DNSystem::order_matrix() const {
  std::vector<std::vector<int>> r(p, std::vector<int>(p, -1));
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k) r[j][k] = ops[j][k].order();
  return r;
}

bool DNSystem::constant_coefficients() const {
  for (const auto& row : ops)
    for (const auto& op : row)
      if (!op.x_independent()) return false;
  return true;
}

bool DNSystem::check_condition_i() const {
  if (!dn) return false;
  const auto r = order_matrix();
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k)
      if (r[j][k] >= 0 && r[j][k] > dn->l[j] + dn->m[k] + 1e-12) return false;
  return true;
}

VectorField DNSystem::apply(const VectorField& u) const {
  if (u.p() != p) throw std::invalid_argument("DNSystem::apply: component mismatch");
  VectorField out(u.grid(), p);
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k) {
      if (ops[j][k].order() < 0) continue;
      out[j] += ops[j][k].apply(u[k]);
    }
  return out;
}

Eigen::MatrixXcd DNSystem::principal_symbol(const std::array<double, 3>& x,
                                            const std::array<double, 3>& xi) const {
  if (!dn)
    throw std::invalid_argument("principal_symbol: DN numbers are not set");
  Eigen::MatrixXcd s(p, p);
  const auto r = order_matrix();
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k) {
      const double sum = dn->l[j] + dn->m[k];
      if (r[j][k] < 0) {
        s(j, k) = 0.0;
        continue;
      }
      const double rounded = std::round(sum);
      if (std::abs(sum - rounded) > 1e-9) {
        std::ostringstream os;
        os << "principal_symbol: l_" << (j + 1) << " + m_" << (k + 1) << " = " << sum
           << " is not integral for a nonzero block";
        throw std::invalid_argument(os.str());
      }
      const int deg = static_cast<int>(rounded);
      s(j, k) = r[j][k] < deg ? cdouble(0.0, 0.0)
                              : ops[j][k].symbol_of_order(x, xi, n, deg);
    }
  return s;
}

Eigen::MatrixXcd DNSystem::full_symbol(const std::array<double, 3>& x,
                                       const std::array<double, 3>& xi) const {
  Eigen::MatrixXcd s(p, p);
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k) s(j, k) = ops[j][k].full_symbol(x, xi, n);
  return s;
}

Eigen::MatrixXcd DNSystem::full_symbol(const std::array<double, 3>& xi) const {
  return full_symbol({0, 0, 0}, xi);
}

DNSystem DNSystem::formal_adjoint() const {
  DNSystem out;
  out.p = p;
  out.n = n;
  out.ops.assign(p, std::vector<DiffOp>(p));
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k) out.ops[j][k] = ops[k][j].adjoint();
  if (dn) out.dn = DnNumbers{dn->m, dn->l};  // roles swap: l+ = m, m+ = l
  return out;
}

namespace {

MultiIndex parse_multi_index(const nlohmann::json& j, int n) {
  MultiIndex mu{0, 0, 0};
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw std::invalid_argument("system JSON: multi-index length must equal n");
  for (int ax = 0; ax < n; ++ax) mu[ax] = j[ax].get<int>();
  return mu;
}

}  // namespace

DNSystem DNSystem::from_json(const nlohmann::json& j) {
  DNSystem s;
  s.p = j.at("p").get<int>();
  s.n = j.at("n").get<int>();
  if (s.p < 1) throw std::invalid_argument("system JSON: p must be >= 1");
  if (s.n < 1 || s.n > 3) throw std::invalid_argument("system JSON: n must be 1..3");
  const auto& rows = j.at("ops");
  if (static_cast<int>(rows.size()) != s.p)
    throw std::invalid_argument("system JSON: ops must have p rows");
  s.ops.assign(s.p, std::vector<DiffOp>(s.p));
  for (int r = 0; r < s.p; ++r) {
    if (static_cast<int>(rows[r].size()) != s.p)
      throw std::invalid_argument("system JSON: ops row has wrong length");
    for (int c = 0; c < s.p; ++c) {
      const auto& entry = rows[r][c];
      for (const auto& term : entry.at("terms")) {
        const MultiIndex mu = parse_multi_index(term.at("mu"), s.n);
        for (int ax = 0; ax < 3; ++ax)
          if (mu[ax] < 0)
            throw std::invalid_argument("system JSON: negative derivative order");
        const auto& coeff = term.at("coeff");
        if (coeff.contains("fourier")) {
          TrigPoly poly;
          for (const auto& mode : coeff.at("fourier")) {
            const MultiIndex eta = parse_multi_index(mode.at("eta"), s.n);
            poly.add(eta, cdouble(mode.value("re", 0.0), mode.value("im", 0.0)));
          }
          s.ops[r][c].add(mu, poly);
        } else {
          s.ops[r][c].add(mu, cdouble(coeff.value("re", 0.0), coeff.value("im", 0.0)));
        }
      }
    }
  }
  if (j.contains("dn")) {
    DnNumbers dn;
    dn.l = j["dn"].at("l").get<std::vector<double>>();
    dn.m = j["dn"].at("m").get<std::vector<double>>();
    if (static_cast<int>(dn.l.size()) != s.p || static_cast<int>(dn.m.size()) != s.p)
      throw std::invalid_argument("system JSON: dn vectors must have length p");
    s.dn = std::move(dn);
  } else {
    s.dn = solve_dn_numbers(s.order_matrix());
  }
  if (!s.check_condition_i())
    throw std::invalid_argument("system JSON: orders violate condition i (r_jk <= l_j + m_k)");
  return s;
}

nlohmann::ordered_json DNSystem::to_json() const {
  nlohmann::ordered_json j;
  j["p"] = p;
  j["n"] = n;
  auto rows = nlohmann::ordered_json::array();
  for (int r = 0; r < p; ++r) {
    auto row = nlohmann::ordered_json::array();
    for (int c = 0; c < p; ++c) {
      auto terms = nlohmann::ordered_json::array();
      for (const auto& [mu, coeff] : ops[r][c].terms) {
        nlohmann::ordered_json term;
        term["mu"] = std::vector<int>(mu.begin(), mu.begin() + n);
        if (coeff.is_constant()) {
          term["coeff"] = {{"re", coeff.constant_value().real()},
                           {"im", coeff.constant_value().imag()}};
        } else {
          auto modes = nlohmann::ordered_json::array();
          for (const auto& [eta, amp] : coeff.terms)
            modes.push_back({{"eta", std::vector<int>(eta.begin(), eta.begin() + n)},
                             {"re", amp.real()},
                             {"im", amp.imag()}});
          term["coeff"] = {{"fourier", modes}};
        }
        terms.push_back(term);
      }
      row.push_back({{"terms", terms}});
    }
    rows.push_back(row);
  }
  j["ops"] = rows;
  if (dn) j["dn"] = {{"l", dn->l}, {"m", dn->m}};
  return j;
}

DnNumbers solve_dn_numbers(const std::vector<std::vector<int>>& orders) {
  const int p = static_cast<int>(orders.size());
  if (p < 1) throw std::invalid_argument("solve_dn_numbers: empty order matrix");
  for (const auto& row : orders)
    if (static_cast<int>(row.size()) != p)
      throw std::invalid_argument("solve_dn_numbers: order matrix must be square");

  // every row and column needs at least one finite block, else the program
  // is unbounded below
  for (int j = 0; j < p; ++j) {
    bool row_ok = false, col_ok = false;
    for (int k = 0; k < p; ++k) {
      row_ok = row_ok || orders[j][k] >= 0;
      col_ok = col_ok || orders[k][j] >= 0;
    }
    if (!row_ok || !col_ok)
      throw std::invalid_argument(
          "solve_dn_numbers: row/column " + std::to_string(j + 1) +
          " has no nonzero block; DN numbers are unbounded");
  }

  // connected components of the bipartite row/column graph; one l per
  // component is pinned to 0 (row 1's component realizes l_1 = 0)
  std::vector<int> comp(2 * p, -1);  // rows then columns
  int ncomp = 0;
  for (int start = 0; start < p; ++start) {
    if (comp[start] >= 0) continue;
    std::vector<int> stack{start};
    comp[start] = ncomp;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      if (v < p) {
        for (int k = 0; k < p; ++k)
          if (orders[v][k] >= 0 && comp[p + k] < 0) {
            comp[p + k] = ncomp;
            stack.push_back(p + k);
          }
      } else {
        for (int j = 0; j < p; ++j)
          if (orders[j][v - p] >= 0 && comp[j] < 0) {
            comp[j] = ncomp;
            stack.push_back(j);
          }
      }
    }
    ++ncomp;
  }

  // variables: l_1..l_p, m_1..m_p
  RationalLP base(2 * p);
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k) {
      if (orders[j][k] < 0) continue;
      std::vector<Rational> a(2 * p, Rational(0));
      a[j] = Rational(1);
      a[p + k] = Rational(1);
      base.add_ge(std::move(a), Rational(orders[j][k]));
    }
  std::vector<bool> component_pinned(ncomp, false);
  std::vector<std::pair<int, Rational>> pins;  // (variable, value)
  for (int j = 0; j < p; ++j) {
    if (component_pinned[comp[j]]) continue;
    component_pinned[comp[j]] = true;
    pins.emplace_back(j, Rational(0));
  }

  auto with_pins = [&](const std::vector<std::pair<int, Rational>>& fixed) {
    RationalLP lp = base;
    for (const auto& [var, val] : fixed) {
      std::vector<Rational> a(2 * p, Rational(0));
      a[var] = Rational(1);
      lp.add_eq(std::move(a), val);
    }
    return lp;
  };

  std::vector<Rational> total(2 * p, Rational(1));
  auto first = with_pins(pins).minimize(total);
  if (first.status == RationalLP::Status::unbounded)
    throw std::invalid_argument(
        "solve_dn_numbers: orders admit no transversal of nonzero blocks; the "
        "program is unbounded (det of the symbol vanishes identically)");
  if (first.status != RationalLP::Status::optimal)
    throw std::logic_error("solve_dn_numbers: LP unexpectedly infeasible");
  const Rational optimum = first.objective;

  // lexicographic pass over (l_2..l_p, m_1..m_p) restricted to the optimal
  // face; unbounded coordinates are pinned to the attainable value nearest 0
  std::vector<std::pair<int, Rational>> fixed = pins;
  std::vector<bool> has_pin(2 * p, false);
  for (const auto& [var, val] : pins) has_pin[var] = true;
  for (int var = 0; var < 2 * p; ++var) {
    if (has_pin[var]) continue;
    RationalLP lp = with_pins(fixed);
    lp.add_eq(total, optimum);
    std::vector<Rational> e(2 * p, Rational(0));
    e[var] = Rational(1);
    auto lo = lp.minimize(e);
    Rational value;
    if (lo.status == RationalLP::Status::optimal) {
      value = lo.objective;
    } else {
      auto hi = lp.maximize(e);
      value = (hi.status == RationalLP::Status::optimal && hi.objective < Rational(0))
                  ? hi.objective
                  : Rational(0);
    }
    fixed.emplace_back(var, value);
    has_pin[var] = true;
  }

  DnNumbers out;
  out.l.assign(p, 0.0);
  out.m.assign(p, 0.0);
  for (const auto& [var, val] : fixed) {
    if (var < p)
      out.l[var] = val.to_double();
    else
      out.m[var - p] = val.to_double();
  }
  return out;
}

std::vector<std::array<double, 3>> unit_sphere_grid(int n) {
  std::vector<std::array<double, 3>> pts;
  if (n == 1) {
    pts.push_back({1, 0, 0});
    pts.push_back({-1, 0, 0});
  } else if (n == 2) {
    for (int i = 0; i < 720; ++i) {
      const double th = 2.0 * M_PI * i / 720.0;
      pts.push_back({std::cos(th), std::sin(th), 0});
    }
  } else if (n == 3) {
    const int M = 2000;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < M; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / M;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      pts.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
    }
  } else {
    throw std::invalid_argument("unit_sphere_grid: n must be 1..3");
  }
  return pts;
}

std::vector<std::array<double, 3>> default_x_samples(const DNSystem& sys) {
  if (sys.constant_coefficients()) return {{0, 0, 0}};
  const Grid g(sys.n, 16);
  std::vector<std::array<double, 3>> pts(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) pts[i] = g.point_at(i);
  return pts;
}

Report ellipticity_margin(const DNSystem& sys,
                          std::span<const std::array<double, 3>> x_samples,
                          std::span<const std::array<double, 3>> sphere_grid,
                          double tolerance) {
  if (!sys.dn) throw std::invalid_argument("ellipticity_margin: DN numbers required");
  double c_hat = std::numeric_limits<double>::infinity();
  for (const auto& x : x_samples) {
    const double local = chunked_reduce(
        sphere_grid.size(), std::numeric_limits<double>::infinity(),
        [&](std::size_t b, std::size_t e) {
          double m = std::numeric_limits<double>::infinity();
          for (std::size_t i = b; i < e; ++i)
            m = std::min(m, std::abs(sys.principal_symbol(x, sphere_grid[i]).determinant()));
          return m;
        },
        [](double a, double b) { return std::min(a, b); });
    c_hat = std::min(c_hat, local);
  }
  Report rep;
  rep.name = "ellipticity_margin";
  rep.config["p"] = sys.p;
  rep.config["n"] = sys.n;
  rep.config["x_samples"] = x_samples.size();
  rep.config["sphere_points"] = sphere_grid.size();
  rep.constants["c_hat"] = c_hat;
  rep.tolerances["margin"] = tolerance;
  rep.verdict = c_hat > tolerance ? Verdict::pass : Verdict::fail;
  rep.note("sampled margin: refutes or lower-bounds condition ii, never certifies");
  return rep;
}

Report ellipticity_margin(const DNSystem& sys, double tolerance) {
  const auto xs = default_x_samples(sys);
  const auto sphere = unit_sphere_grid(sys.n);
  return ellipticity_margin(sys, xs, sphere, tolerance);
}

Report condition_b_margin(const DNSystem& sys, double c2,
                          std::span<const std::array<double, 3>> x_samples,
                          std::span<const std::array<double, 3>> xi_samples,
                          double tolerance) {
  if (!sys.dn) throw std::invalid_argument("condition_b_margin: DN numbers required");
  const double q = sys.dn->q();
  double c1_hat = std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  for (const auto& x : x_samples) {
    double xn = 0;
    for (int ax = 0; ax < sys.n; ++ax) xn += x[ax] * x[ax];
    xn = std::sqrt(xn);
    for (const auto& xi : xi_samples) {
      double xin = 0;
      for (int ax = 0; ax < sys.n; ++ax) xin += xi[ax] * xi[ax];
      if (xn + std::sqrt(xin) < c2) continue;
      ++used;
      const double bracket = std::sqrt(1.0 + xin);
      const double det = std::abs(sys.full_symbol(x, xi).determinant());
      c1_hat = std::min(c1_hat, det / std::pow(bracket, q));
    }
  }
  Report rep;
  rep.name = "condition_b_margin";
  rep.config["p"] = sys.p;
  rep.config["n"] = sys.n;
  rep.config["c2"] = c2;
  rep.config["q"] = q;
  rep.config["samples_used"] = used;
  rep.constants["c1_hat"] = used ? c1_hat : 0.0;
  rep.tolerances["margin"] = tolerance;
  rep.verdict = (used && c1_hat > tolerance) ? Verdict::pass : Verdict::fail;
  rep.note("sampled margin over |x|+|xi| >= c2");
  return rep;
}

Report condition_b_margin(const DNSystem& sys, double c2, const Grid& xi_lattice,
                          double tolerance) {
  const auto xs = default_x_samples(sys);
  std::vector<std::array<double, 3>> xis(xi_lattice.size());
  for (std::size_t i = 0; i < xi_lattice.size(); ++i) {
    const auto m = xi_lattice.mode_at(i);
    xis[i] = {double(m[0]), double(m[1]), double(m[2])};
  }
  return condition_b_margin(sys, c2, xs, xis, tolerance);
}

}  // namespace dnspec
