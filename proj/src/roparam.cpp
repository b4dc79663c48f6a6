#include "dnspec/roparam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dnspec {

namespace {

// Adaptive Simpson on [a, b], absolute tolerance.
double simpson(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

ROParam ROParam::power(double s) {
  ROParam p;
  p.kind_ = Kind::power;
  p.s_ = s;
  p.sigma0_ = p.sigma1_ = s;
  return p;
}

ROParam ROParam::power_log(double s, double r) {
  ROParam p;
  p.kind_ = Kind::powerlog;
  p.s_ = s;
  p.r_ = r;
  p.sigma0_ = p.sigma1_ = s;  // log corrections move no index
  return p;
}

ROParam ROParam::power_sin_log(double s, double delta) {
  ROParam p;
  p.kind_ = Kind::powersinlog;
  p.s_ = s;
  p.delta_ = delta;
  // exp(delta sin ln t) is sandwiched between constants, so both indices
  // equal the power exponent.
  p.sigma0_ = p.sigma1_ = s;
  return p;
}

ROParam ROParam::representation(std::function<double(double)> alpha,
                                std::function<double(double)> beta) {
  ROParam p;
  p.kind_ = Kind::representation;
  p.f_ = std::move(alpha);
  p.g_ = std::move(beta);
  return p;
}

ROParam ROParam::custom(std::function<double(double)> eval,
                        std::optional<double> sigma0, std::optional<double> sigma1) {
  ROParam p;
  p.kind_ = Kind::custom;
  p.f_ = std::move(eval);
  p.sigma0_ = sigma0;
  p.sigma1_ = sigma1;
  if (sigma0 && sigma1 && *sigma0 > *sigma1)
    throw std::invalid_argument("ROParam: declared sigma0 > sigma1");
  return p;
}

double ROParam::operator()(double t) const {
  if (!(t >= 1.0))
    throw std::domain_error("ROParam: argument t < 1");
  double v = 0;
  switch (kind_) {
    case Kind::power:
      v = std::pow(t, s_);
      break;
    case Kind::powerlog:
      v = std::pow(t, s_) * std::pow(1.0 + std::log(t), r_);
      break;
    case Kind::powersinlog:
      v = std::pow(t, s_) * std::exp(delta_ * std::sin(std::log(t)));
      break;
    case Kind::representation: {
      // exp(beta(t) + int_1^t alpha(tau)/tau dtau), integral in u = ln tau.
      const double u = std::log(t);
      const double integral =
          integrate([this](double w) { return f_(std::exp(w)); }, 0.0, u, 1e-10);
      v = std::exp(g_(t) + integral);
      if (power_scale_ != 0) v *= std::pow(t, power_scale_);
      if (reciprocal_) v = 1.0 / v;
      break;
    }
    case Kind::custom: {
      v = f_(t);
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::runtime_error("ROParam: custom function returned a non-positive or non-finite value");
      if (power_scale_ != 0) v *= std::pow(t, power_scale_);
      if (reciprocal_) v = 1.0 / v;
      break;
    }
  }
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::runtime_error("ROParam: evaluation produced a non-positive or non-finite value");
  return v;
}

ROParam ROParam::scale_power(double r) const {
  ROParam p = *this;
  switch (kind_) {
    case Kind::power:
    case Kind::powerlog:
    case Kind::powersinlog:
      p.s_ += r;
      break;
    case Kind::representation:
    case Kind::custom:
      // fold the power into the evaluation; a reciprocal wrapper divides, so
      // the stored exponent moves the other way
      p.power_scale_ += reciprocal_ ? -r : r;
      break;
  }
  if (p.sigma0_) *p.sigma0_ += r;
  if (p.sigma1_) *p.sigma1_ += r;
  return p;
}

ROParam ROParam::reciprocal() const {
  ROParam p = *this;
  switch (kind_) {
    case Kind::power:
      p.s_ = -s_;
      break;
    case Kind::powerlog:
      p.s_ = -s_;
      p.r_ = -r_;
      break;
    case Kind::powersinlog:
      p.s_ = -s_;
      p.delta_ = -delta_;
      break;
    case Kind::representation:
    case Kind::custom:
      p.reciprocal_ = !reciprocal_;
      break;
  }
  p.sigma0_ = sigma1_ ? std::optional<double>(-*sigma1_) : std::nullopt;
  p.sigma1_ = sigma0_ ? std::optional<double>(-*sigma0_) : std::nullopt;
  return p;
}

std::string ROParam::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::power:
      os << "power:" << s_;
      break;
    case Kind::powerlog:
      os << "powerlog:" << s_ << "," << r_;
      break;
    case Kind::powersinlog:
      os << "powersinlog:" << s_ << "," << delta_;
      break;
    case Kind::representation:
      os << "representation" << (reciprocal_ ? ":reciprocal" : "");
      if (power_scale_ != 0) os << ":rho^" << power_scale_;
      break;
    case Kind::custom:
      os << "custom" << (reciprocal_ ? ":reciprocal" : "");
      if (power_scale_ != 0) os << ":rho^" << power_scale_;
      break;
  }
  return os.str();
}

std::vector<double> default_t_grid() {
  std::vector<double> t(400);
  const double step = std::log(1e6) / 399.0;
  for (int i = 0; i < 400; ++i) t[i] = std::exp(i * step);
  t.front() = 1.0;
  return t;
}

std::vector<double> default_lambda_grid() { return {2.0, 4.0, 8.0, 16.0, 32.0}; }

Report verify_ro(const ROParam& param, double a, std::span<const double> t_grid,
                 std::span<const double> lambda_grid) {
  if (!(a > 1.0)) throw std::invalid_argument("verify_ro: requires a > 1");
  if (t_grid.empty() || lambda_grid.empty())
    throw std::invalid_argument("verify_ro: empty grid");
  double c_hat = 1.0;
  for (double t : t_grid) {
    const double base = param(t);
    for (double lam : lambda_grid) {
      const double l = std::clamp(lam, 1.0, a);
      const double ratio = param(l * t) / base;
      c_hat = std::max({c_hat, ratio, 1.0 / ratio});
    }
  }
  Report rep;
  rep.name = "verify_ro";
  rep.config["param"] = param.describe();
  rep.config["a"] = a;
  rep.config["t_points"] = t_grid.size();
  rep.config["lambda_points"] = lambda_grid.size();
  rep.constants["c_hat"] = c_hat;
  rep.verdict = std::isfinite(c_hat) ? Verdict::pass : Verdict::fail;
  rep.note("sampled bound: c_hat lower-bounds the true RO constant");
  return rep;
}

Report verify_ro(const ROParam& param, double a) {
  const auto t = default_t_grid();
  std::vector<double> lam(33);
  for (int i = 0; i < 33; ++i) lam[i] = 1.0 + (a - 1.0) * i / 32.0;
  return verify_ro(param, a, t, lam);
}

std::pair<double, double> estimate_indices(const ROParam& param,
                                           std::span<const double> t_grid,
                                           std::span<const double> lambda_grid) {
  if (t_grid.empty() || lambda_grid.empty())
    throw std::invalid_argument("estimate_indices: empty grid");
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  for (double lam : lambda_grid) {
    if (!(lam >= 2.0))
      throw std::invalid_argument("estimate_indices: lambda grid values must be >= 2");
    const double log_lam = std::log(lam);
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
      const double secant = std::log(param(lam * t) / param(t)) / log_lam;
      hi = std::max(hi, secant);
      lo = std::min(lo, secant);
    }
    upper = std::min(upper, hi);
    lower = std::max(lower, lo);
  }
  return {lower, upper};
}

std::pair<double, double> estimate_indices(const ROParam& param) {
  const auto t = default_t_grid();
  const auto lam = default_lambda_grid();
  return estimate_indices(param, t, lam);
}

InterpParameter interp_psi(const ROParam& param, double s0, double s1) {
  if (!(s0 < s1)) throw std::invalid_argument("interp_psi: requires s0 < s1");
  double sigma0, sigma1;
  bool certified;
  if (param.declared_sigma0() && param.declared_sigma1()) {
    sigma0 = *param.declared_sigma0();
    sigma1 = *param.declared_sigma1();
    certified = true;
    if (s0 >= sigma0 || s1 <= sigma1)
      throw std::invalid_argument(
          "interp_psi: requires s0 < sigma0(phi) and s1 > sigma1(phi)");
  } else {
    std::tie(sigma0, sigma1) = estimate_indices(param);
    certified = false;  // estimated preconditions only
    if (s0 >= sigma0 || s1 <= sigma1)
      throw std::invalid_argument(
          "interp_psi: sampled index estimates violate s0 < sigma0 <= sigma1 < s1");
  }
  const double gap = s1 - s0;
  InterpParameter out;
  out.fn = [param, s0, gap](double t) {
    if (t >= 1.0) return std::pow(t, -s0 / gap) * param(std::pow(t, 1.0 / gap));
    return param(1.0);
  };
  out.certified = certified;
  std::ostringstream os;
  os << "psi[" << param.describe() << ";" << s0 << "," << s1 << "]"
     << (certified ? "" : " (estimated preconditions)");
  out.label = os.str();
  return out;
}

ROParam param_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "power") return ROParam::power(j.at("s").get<double>());
  if (kind == "powerlog")
    return ROParam::power_log(j.at("s").get<double>(), j.at("r").get<double>());
  if (kind == "powersinlog")
    return ROParam::power_sin_log(j.at("s").get<double>(), j.at("delta").get<double>());
  throw std::invalid_argument("param_from_json: unknown kind '" + kind + "'");
}

ROParam param_from_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::string rest = spec.substr(colon + 1);
    std::replace(rest.begin(), rest.end(), ',', ' ');
    std::istringstream is(rest);
    double v;
    while (is >> v) args.push_back(v);
  }
  auto need = [&](std::size_t k) {
    if (args.size() != k)
      throw std::invalid_argument("param spec '" + spec + "': expected " +
                                  std::to_string(k) + " numeric arguments");
  };
  if (kind == "power") {
    need(1);
    return ROParam::power(args[0]);
  }
  if (kind == "powerlog") {
    need(2);
    return ROParam::power_log(args[0], args[1]);
  }
  if (kind == "powersinlog") {
    need(2);
    return ROParam::power_sin_log(args[0], args[1]);
  }
  throw std::invalid_argument("param spec '" + spec + "': unknown kind");
}

nlohmann::ordered_json param_to_json(const ROParam& p) {
  nlohmann::ordered_json j;
  switch (p.kind()) {
    case ROParam::Kind::power:
      j["kind"] = "power";
      j["s"] = p.s();
      break;
    case ROParam::Kind::powerlog:
      j["kind"] = "powerlog";
      j["s"] = p.s();
      j["r"] = p.log_exponent();
      break;
    case ROParam::Kind::powersinlog:
      j["kind"] = "powersinlog";
      j["s"] = p.s();
      j["delta"] = p.delta();
      break;
    default:
      j["kind"] = p.describe();
      break;
  }
  return j;
}

}  // namespace dnspec
