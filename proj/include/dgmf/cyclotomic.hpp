#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <vector>

#include "dgmf/common.hpp"

namespace dgmf {

namespace detail {

// Dense polynomials over Q, ascending degree, no trailing zeros.
using Poly = std::vector<Rational>;

inline void poly_trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  poly_trim(r);
  return r;
}

/// Quotient and remainder with divisor leading coefficient inverted exactly.
inline std::pair<Poly, Poly> poly_divmod(Poly num, const Poly& den) {
  check(!den.empty(), "polynomial division by zero");
  poly_trim(num);
  Poly q;
  if (num.size() >= den.size()) q.assign(num.size() - den.size() + 1, Rational(0));
  const Rational lead = den.back();
  while (num.size() >= den.size()) {
    Rational c = num.back() / lead;
    std::size_t shift = num.size() - den.size();
    q[shift] = c;
    for (std::size_t i = 0; i < den.size(); ++i) num[shift + i] -= c * den[i];
    poly_trim(num);
  }
  poly_trim(q);
  return {q, num};
}

inline Poly poly_divexact(const Poly& num, const Poly& den) {
  auto [q, r] = poly_divmod(num, den);
  check(r.empty(), "polynomial division is not exact");
  return q;
}

}  // namespace detail

/// Shared immutable data for the cyclotomic field Q(zeta_e): the minimal
/// polynomial Phi_e and reduced powers x^j mod Phi_e for every j needed by
/// multiplication (j < 2*deg-1) and by root-of-unity construction (j < e).
struct CycloContext {
  int conductor = 1;
  int degree = 1;  // phi(conductor)
  detail::Poly min_poly;
  std::vector<std::vector<Rational>> xpow;  // each row has `degree` entries

  explicit CycloContext(int e) : conductor(e) {
    check(e >= 1, "conductor must be positive", Error::Kind::usage);
    // Phi_d for all divisors d of e by dividing x^d - 1 through lower Phi's.
    std::map<int, detail::Poly> phi;
    for (int d = 1; d <= e; ++d) {
      if (e % d != 0) continue;
      detail::Poly num(d + 1, Rational(0));
      num[0] = -1;
      num[d] = 1;
      for (auto& [dd, p] : phi)
        if (d % dd == 0) num = detail::poly_divexact(num, p);
      phi[d] = num;
    }
    min_poly = phi[e];
    degree = static_cast<int>(min_poly.size()) - 1;
    int rows = std::max(e, 2 * degree - 1);
    if (rows < 1) rows = 1;
    xpow.assign(rows, std::vector<Rational>(degree, Rational(0)));
    xpow[0][0] = 1;
    for (int j = 1; j < rows; ++j) {
      // multiply previous row by x, then reduce the x^degree term via Phi_e
      Rational top = xpow[j - 1][degree - 1];
      for (int i = degree - 1; i > 0; --i) xpow[j][i] = xpow[j - 1][i - 1];
      xpow[j][0] = 0;
      if (top != 0)
        for (int i = 0; i < degree; ++i) xpow[j][i] -= top * min_poly[i];
    }
  }
};

inline const CycloContext& cyclo_context(int conductor) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<const CycloContext>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(conductor);
  if (it == cache.end())
    it = cache.emplace(conductor, std::make_unique<const CycloContext>(conductor)).first;
  return *it->second;
}

/// Element of Q(zeta_e) with exact rational coordinates on the power basis
/// 1, zeta, ..., zeta^(phi(e)-1). The coordinate vector is the canonical form:
/// equality is componentwise. Arithmetic requires matching conductors.
class Cyclo {
 public:
  Cyclo() : Cyclo(1) {}
  explicit Cyclo(int conductor)
      : e_(conductor), c_(cyclo_context(conductor).degree, Rational(0)) {}

  static Cyclo from_rational(int conductor, const Rational& r) {
    Cyclo x(conductor);
    x.c_[0] = r;
    return x;
  }
  static Cyclo zero(int conductor) { return Cyclo(conductor); }
  static Cyclo one(int conductor) { return from_rational(conductor, 1); }

  /// zeta_conductor^k (k taken mod conductor, may be negative).
  static Cyclo root_of_unity(int conductor, long k) {
    const CycloContext& ctx = cyclo_context(conductor);
    long r = k % conductor;
    if (r < 0) r += conductor;
    Cyclo x(conductor);
    x.c_ = ctx.xpow[static_cast<std::size_t>(r)];
    return x;
  }

  int conductor() const { return e_; }
  const std::vector<Rational>& coeffs() const { return c_; }

  bool is_zero() const {
    for (const auto& v : c_)
      if (v != 0) return false;
    return true;
  }
  bool is_rational() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (c_[i] != 0) return false;
    return true;
  }
  /// Exact rational value; throws when the element is irrational.
  Rational as_rational() const {
    check(is_rational(), "cyclotomic value is not rational");
    return c_[0];
  }
  /// Exact integer value; throws when not an integer.
  BigInt as_integer() const {
    Rational r = as_rational();
    check(r.get_den() == 1, "cyclotomic value is not an integer");
    return r.get_num();
  }

  friend Cyclo operator+(const Cyclo& a, const Cyclo& b) {
    a.same(b);
    Cyclo r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
    return r;
  }
  friend Cyclo operator-(const Cyclo& a, const Cyclo& b) {
    a.same(b);
    Cyclo r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
    return r;
  }
  Cyclo operator-() const {
    Cyclo r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  friend Cyclo operator*(const Cyclo& a, const Cyclo& b) {
    a.same(b);
    const CycloContext& ctx = cyclo_context(a.e_);
    const int d = ctx.degree;
    std::vector<Rational> prod(2 * d - 1, Rational(0));
    for (int i = 0; i < d; ++i) {
      if (a.c_[i] == 0) continue;
      for (int j = 0; j < d; ++j) {
        if (b.c_[j] == 0) continue;
        prod[i + j] += a.c_[i] * b.c_[j];
      }
    }
    Cyclo r(a.e_);
    for (int i = 0; i < d; ++i) r.c_[i] = prod[i];
    for (int j = d; j < 2 * d - 1; ++j) {
      if (prod[j] == 0) continue;
      const auto& row = ctx.xpow[j];
      for (int i = 0; i < d; ++i) r.c_[i] += prod[j] * row[i];
    }
    return r;
  }
  friend Cyclo operator*(const Cyclo& a, const Rational& s) {
    Cyclo r = a;
    for (auto& v : r.c_) v *= s;
    return r;
  }
  friend Cyclo operator*(const Rational& s, const Cyclo& a) { return a * s; }
  Cyclo& operator+=(const Cyclo& b) { return *this = *this + b; }
  Cyclo& operator-=(const Cyclo& b) { return *this = *this - b; }
  Cyclo& operator*=(const Cyclo& b) { return *this = *this * b; }

  /// Multiplicative inverse via the extended Euclidean algorithm against
  /// Phi_e (irreducible, so any nonzero element is a unit).
  Cyclo inverse() const {
    check(!is_zero(), "inverse of zero cyclotomic value");
    const CycloContext& ctx = cyclo_context(e_);
    detail::Poly r0 = ctx.min_poly, r1(c_.begin(), c_.end());
    detail::poly_trim(r1);
    detail::Poly t0, t1{Rational(1)};
    while (r1.size() > 1) {
      auto [q, r2] = detail::poly_divmod(r0, r1);
      detail::Poly t2 = t0;
      detail::Poly qt = detail::poly_mul(q, t1);
      if (t2.size() < qt.size()) t2.resize(qt.size(), Rational(0));
      for (std::size_t i = 0; i < qt.size(); ++i) t2[i] -= qt[i];
      detail::poly_trim(t2);
      r0 = std::move(r1);
      r1 = std::move(r2);
      t0 = std::move(t1);
      t1 = std::move(t2);
    }
    check(!r1.empty(), "cyclotomic inverse: unexpected common factor");
    const Rational g = r1[0];
    Cyclo out(e_);
    for (std::size_t i = 0; i < t1.size() && i < out.c_.size(); ++i) out.c_[i] = t1[i] / g;
    return out;
  }

  /// Galois action zeta -> zeta^t; requires gcd(t, conductor) = 1.
  Cyclo galois(long t) const {
    long tt = t % e_;
    if (tt < 0) tt += e_;
    check(std::gcd(tt, static_cast<long>(e_)) == 1, "galois exponent not coprime to conductor");
    const CycloContext& ctx = cyclo_context(e_);
    Cyclo r(e_);
    for (int j = 0; j < ctx.degree; ++j) {
      if (c_[j] == 0) continue;
      const auto& row = ctx.xpow[static_cast<std::size_t>(j) * tt % e_];
      for (int i = 0; i < ctx.degree; ++i) r.c_[i] += c_[j] * row[i];
    }
    return r;
  }

  /// Complex conjugation (zeta -> zeta^-1).
  Cyclo conj() const { return e_ == 1 ? *this : galois(e_ - 1); }

  /// Reinterpret in Q(zeta_m) for conductor | m.
  Cyclo promoted(int m) const {
    check(m % e_ == 0, "promotion target must be a multiple of the conductor",
          Error::Kind::usage);
    if (m == e_) return *this;
    const CycloContext& ctx = cyclo_context(m);
    const int step = m / e_;
    Cyclo r(m);
    for (std::size_t j = 0; j < c_.size(); ++j) {
      if (c_[j] == 0) continue;
      const auto& row = ctx.xpow[j * step];
      for (int i = 0; i < ctx.degree; ++i) r.c_[i] += c_[j] * row[i];
    }
    return r;
  }

  /// Numeric embedding at the principal root exp(2*pi*i/conductor). For
  /// reporting only; never used in decisions.
  std::complex<double> to_complex() const {
    std::complex<double> acc(0.0, 0.0);
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t j = 0; j < c_.size(); ++j) {
      if (c_[j] == 0) continue;
      double ang = two_pi * static_cast<double>(j) / e_;
      acc += c_[j].get_d() * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return acc;
  }

  friend bool operator==(const Cyclo& a, const Cyclo& b) {
    if (a.e_ == b.e_) return a.c_ == b.c_;
    int m = static_cast<int>(std::lcm(a.e_, b.e_));
    return a.promoted(m).c_ == b.promoted(m).c_;
  }
  friend bool operator!=(const Cyclo& a, const Cyclo& b) { return !(a == b); }

  /// Total order for canonical sorting: conductor, then coefficients.
  static int compare(const Cyclo& a, const Cyclo& b) {
    if (a.e_ != b.e_) return a.e_ < b.e_ ? -1 : 1;
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      int c = cmp(a.c_[i], b.c_[i]);
      if (c != 0) return c;
    }
    return 0;
  }

 private:
  void same(const Cyclo& b) const {
    check(e_ == b.e_, "cyclotomic conductor mismatch in arithmetic");
  }

  int e_;
  std::vector<Rational> c_;
};

}  // namespace dgmf
