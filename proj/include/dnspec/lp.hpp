#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dnspec {

/// Exact rational number on int64 with reduction; intermediates widen to
/// 128 bits. Magnitudes in the DN-number programs stay tiny.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n), den(1) {}  // NOLINT: implicit by design
  Rational(std::int64_t n, std::int64_t d);

  static Rational from_int128(__int128 n, __int128 d);

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational operator-() const { return Rational(-num, den); }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const;
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator<=(const Rational& o) const { return !(o < *this); }
  bool operator>=(const Rational& o) const { return !(*this < o); }

  bool is_integer() const { return den == 1; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Dense exact-rational LP, two-phase simplex with Bland's rule.
/// Variables are free (internally split); constraints are rows
/// a.x (>=|=) b. Minimizes c.x.
class RationalLP {
 public:
  explicit RationalLP(int num_vars) : nvars_(num_vars) {}

  void add_ge(std::vector<Rational> coeffs, Rational rhs);  // a.x >= b
  void add_eq(std::vector<Rational> coeffs, Rational rhs);  // a.x == b

  enum class Status { optimal, unbounded, infeasible };
  struct Result {
    Status status;
    Rational objective;
    std::vector<Rational> x;
  };

  /// Minimizes c.x over the current constraint set.
  Result minimize(const std::vector<Rational>& c) const;
  Result maximize(const std::vector<Rational>& c) const;

 private:
  int nvars_;
  struct Row {
    std::vector<Rational> a;
    Rational b;
    bool eq;
  };
  std::vector<Row> rows_;
};

}  // namespace dnspec
