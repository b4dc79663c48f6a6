#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dnspec/report.hpp"

namespace dnspec {

/// A positive function parameter on [1, inf) from the RO (O-regularly
/// varying) class: phi(lambda t)/phi(t) is bounded above and below
/// uniformly for lambda in a compact interval.  These weight the
/// frequency-space norms of the H^phi spaces.
///
/// Built-in kinds evaluate in closed form and carry exact Matuszewska
/// indices; Representation kind evaluates exp(beta(t) + int_1^t alpha/tau)
/// by adaptive quadrature in log scale; Custom wraps an arbitrary positive
/// function and carries no declared indices.
class ROParam {
 public:
  enum class Kind { power, powerlog, powersinlog, representation, custom };

  static ROParam power(double s);
  static ROParam power_log(double s, double r);
  static ROParam power_sin_log(double s, double delta);
  static ROParam representation(std::function<double(double)> alpha,
                                std::function<double(double)> beta);
  static ROParam custom(std::function<double(double)> eval,
                        std::optional<double> sigma0 = std::nullopt,
                        std::optional<double> sigma1 = std::nullopt);

  /// phi(t). Throws std::domain_error for t < 1 and std::runtime_error if a
  /// custom function produces a non-positive or non-finite value.
  double operator()(double t) const;

  Kind kind() const { return kind_; }
  std::optional<double> declared_sigma0() const { return sigma0_; }
  std::optional<double> declared_sigma1() const { return sigma1_; }

  /// t -> phi(t) * t^r; declared indices shift by r. Kind-preserving for
  /// all built-in kinds.
  ROParam scale_power(double r) const;
  /// t -> 1/phi(t); declared indices map to (-sigma1, -sigma0).
  ROParam reciprocal() const;

  /// Short spec string, e.g. "power:2" or "powerlog:0,1".
  std::string describe() const;

  // Built-in parameters (meaningful per kind).
  double s() const { return s_; }
  double log_exponent() const { return r_; }
  double delta() const { return delta_; }

 private:
  ROParam() = default;
  Kind kind_ = Kind::power;
  double s_ = 0, r_ = 0, delta_ = 0;
  double power_scale_ = 0;  // extra t^r factor on representation/custom kinds
  bool reciprocal_ = false;
  std::function<double(double)> f_, g_;
  std::optional<double> sigma0_, sigma1_;
};

std::vector<double> default_t_grid();       // log-spaced [1, 1e6], 400 points
std::vector<double> default_lambda_grid();  // {2, 4, 8, 16, 32}

/// Scans the RO defining inequality on a grid: c_hat is the largest observed
/// two-sided ratio max(phi(lambda t)/phi(t), inverse) over t_grid x
/// lambda_grid with lambda clamped to [1, a]. A sample can refute or
/// lower-bound the RO constant, never certify it.
Report verify_ro(const ROParam& param, double a, std::span<const double> t_grid,
                 std::span<const double> lambda_grid);
Report verify_ro(const ROParam& param, double a);

/// Sampled Matuszewska index estimates. For each lambda the secant
/// ln(phi(lambda t)/phi(t))/ln(lambda) is scanned over t; the per-lambda
/// extremes are then tightened across the battery (min over lambda for the
/// upper index, max for the lower): larger windows average out bounded
/// oscillations and log corrections. Exact for pure powers.
std::pair<double, double> estimate_indices(const ROParam& param,
                                           std::span<const double> t_grid,
                                           std::span<const double> lambda_grid);
std::pair<double, double> estimate_indices(const ROParam& param);

/// The interpolation parameter of an RO function between Sobolev exponents
/// s0 < s1:  psi(t) = t^{-s0/(s1-s0)} phi(t^{1/(s1-s0)}) for t >= 1,
/// psi(t) = phi(1) for 0 < t < 1.
struct InterpParameter {
  std::function<double(double)> fn;
  bool certified = false;  // index preconditions verified against declared values
  std::string label;
  double operator()(double t) const { return fn(t); }
};

/// Requires s0 < sigma0(phi) and s1 > sigma1(phi). Violations against
/// declared indices throw std::invalid_argument; parameters without declared
/// indices are checked against sampled estimates and flagged uncertified.
InterpParameter interp_psi(const ROParam& param, double s0, double s1);

/// JSON form {"kind": "power"|"powerlog"|"powersinlog", "s":..,"r":..,"delta":..}.
ROParam param_from_json(const nlohmann::json& j);
/// Spec string form "power:S", "powerlog:S,R", "powersinlog:S,DELTA".
ROParam param_from_spec(const std::string& spec);
nlohmann::ordered_json param_to_json(const ROParam& p);

}  // namespace dnspec
