#include "dnspec/lp.hpp"

#include <numeric>

namespace dnspec {

namespace {
std::int64_t checked_cast(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN)
    throw std::overflow_error("Rational: 64-bit overflow");
  return static_cast<std::int64_t>(v);
}
__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}
}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  *this = from_int128(n, d);
}

Rational Rational::from_int128(__int128 n, __int128 d) {
  if (d == 0) throw std::invalid_argument("Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const __int128 g = n == 0 ? d : gcd128(n, d);
  Rational r;
  r.num = checked_cast(n / g);
  r.den = checked_cast(d / g);
  return r;
}

Rational Rational::operator+(const Rational& o) const {
  return from_int128((__int128)num * o.den + (__int128)o.num * den, (__int128)den * o.den);
}
Rational Rational::operator-(const Rational& o) const {
  return from_int128((__int128)num * o.den - (__int128)o.num * den, (__int128)den * o.den);
}
Rational Rational::operator*(const Rational& o) const {
  return from_int128((__int128)num * o.num, (__int128)den * o.den);
}
Rational Rational::operator/(const Rational& o) const {
  if (o.num == 0) throw std::invalid_argument("Rational: division by zero");
  return from_int128((__int128)num * o.den, (__int128)den * o.num);
}
bool Rational::operator<(const Rational& o) const {
  return (__int128)num * o.den < (__int128)o.num * den;
}

void RationalLP::add_ge(std::vector<Rational> coeffs, Rational rhs) {
  if (static_cast<int>(coeffs.size()) != nvars_)
    throw std::invalid_argument("RationalLP: coefficient count mismatch");
  rows_.push_back({std::move(coeffs), rhs, false});
}

void RationalLP::add_eq(std::vector<Rational> coeffs, Rational rhs) {
  if (static_cast<int>(coeffs.size()) != nvars_)
    throw std::invalid_argument("RationalLP: coefficient count mismatch");
  rows_.push_back({std::move(coeffs), rhs, true});
}

namespace {

// Dense tableau simplex with Bland's rule (no cycling).
struct Tableau {
  int m, real_cols;              // rows, non-artificial columns
  std::vector<std::vector<Rational>> a;  // m x (real_cols + m), then rhs column
  std::vector<Rational> rhs;
  std::vector<int> basis;  // column basic in each row

  int cols() const { return real_cols + m; }

  void pivot(int r, int c) {
    const Rational p = a[r][c];
    for (auto& v : a[r]) v = v / p;
    rhs[r] = rhs[r] / p;
    for (int i = 0; i < m; ++i) {
      if (i == r || a[i][c].num == 0) continue;
      const Rational f = a[i][c];
      for (int j = 0; j < cols(); ++j) a[i][j] = a[i][j] - f * a[r][j];
      rhs[i] = rhs[i] - f * rhs[r];
    }
    basis[r] = c;
  }

  // Minimizes cost over columns [0, limit); returns false when unbounded.
  bool run(std::vector<Rational>& cost, Rational& value, int limit) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < limit; ++j) {
        if (cost[j] < Rational(0)) {
          enter = j;
          break;  // Bland: smallest index
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (int i = 0; i < m; ++i) {
        if (!(a[i][enter] > Rational(0))) continue;
        const Rational ratio = rhs[i] / a[i][enter];
        if (leave < 0 || ratio < best ||
            (ratio == best && basis[i] < basis[leave]))
          {
            leave = i;
            best = ratio;
          }
      }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter);
      // eliminate the entering column from the objective expression;
      // the constant term picks up f * (post-pivot rhs)
      const Rational f = cost[enter];
      if (f.num != 0) {
        for (int j = 0; j < cols(); ++j) cost[j] = cost[j] - f * a[leave][j];
        value = value + f * rhs[leave];
      }
    }
  }
};

}  // namespace

RationalLP::Result RationalLP::minimize(const std::vector<Rational>& c) const {
  if (static_cast<int>(c.size()) != nvars_)
    throw std::invalid_argument("RationalLP: objective size mismatch");
  const int m = static_cast<int>(rows_.size());
  int n_ge = 0;
  for (const auto& r : rows_)
    if (!r.eq) ++n_ge;
  // columns: u (nvars), v (nvars), surplus (n_ge); artificials appended
  const int real_cols = 2 * nvars_ + n_ge;

  Tableau t;
  t.m = m;
  t.real_cols = real_cols;
  t.a.assign(m, std::vector<Rational>(real_cols + m, Rational(0)));
  t.rhs.assign(m, Rational(0));
  t.basis.assign(m, -1);

  int ge_seen = 0;
  for (int i = 0; i < m; ++i) {
    const Row& row = rows_[i];
    const bool flip = row.b < Rational(0);
    auto put = [&](int col, Rational v) { t.a[i][col] = flip ? -v : v; };
    for (int j = 0; j < nvars_; ++j) {
      put(j, row.a[j]);
      put(nvars_ + j, -row.a[j]);
    }
    if (!row.eq) {
      put(2 * nvars_ + ge_seen, Rational(-1));  // surplus
      ++ge_seen;
    }
    t.rhs[i] = flip ? -row.b : row.b;
    t.a[i][real_cols + i] = Rational(1);  // artificial
    t.basis[i] = real_cols + i;
  }

  // phase 1: minimize the artificial sum
  std::vector<Rational> cost(real_cols + m, Rational(0));
  Rational value(0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < real_cols; ++j) cost[j] = cost[j] - t.a[i][j];
    value = value + t.rhs[i];
  }
  if (!t.run(cost, value, real_cols))
    throw std::logic_error("RationalLP: phase 1 unbounded");
  if (value != Rational(0)) return {Status::infeasible, Rational(0), {}};

  // pivot out any artificial still basic (at zero); drop redundant rows by
  // leaving them with an all-zero artificial basis
  for (int i = 0; i < m; ++i) {
    if (t.basis[i] < real_cols) continue;
    int c2 = -1;
    for (int j = 0; j < real_cols; ++j)
      if (t.a[i][j].num != 0) {
        c2 = j;
        break;
      }
    if (c2 >= 0) t.pivot(i, c2);
  }

  // phase 2: reduced costs of the real objective
  std::vector<Rational> cost2(real_cols + m, Rational(0));
  Rational value2(0);
  for (int j = 0; j < nvars_; ++j) {
    cost2[j] = c[j];
    cost2[nvars_ + j] = -c[j];
  }
  for (int i = 0; i < m; ++i) {
    const int b = t.basis[i];
    if (b >= real_cols || cost2[b].num == 0) continue;
    const Rational f = cost2[b];
    for (int j = 0; j < t.cols(); ++j) cost2[j] = cost2[j] - f * t.a[i][j];
    value2 = value2 + f * t.rhs[i];
  }
  // forbid artificials from re-entering: restrict to real columns
  if (!t.run(cost2, value2, real_cols)) return {Status::unbounded, Rational(0), {}};

  std::vector<Rational> x(nvars_, Rational(0));
  for (int i = 0; i < m; ++i) {
    const int b = t.basis[i];
    if (b < nvars_)
      x[b] = x[b] + t.rhs[i];
    else if (b < 2 * nvars_)
      x[b - nvars_] = x[b - nvars_] - t.rhs[i];
  }
  return {Status::optimal, value2, std::move(x)};
}

RationalLP::Result RationalLP::maximize(const std::vector<Rational>& c) const {
  std::vector<Rational> neg(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) neg[i] = -c[i];
  Result r = minimize(neg);
  r.objective = -r.objective;
  return r;
}

}  // namespace dnspec
