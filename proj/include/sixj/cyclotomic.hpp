#pragma once

#include <boost/container/small_vector.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace sixj {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Params {
  int rp = 1;
  int r = 3;
  int m = 1;

  Params() = default;
  explicit Params(int rp_, int m_ = 1) : rp(rp_), r(2 * rp_ + 1), m(m_) {
    if (rp < 1) throw DomainError("r' must be at least 1");
    if (std::gcd(m, 2 * r) != 1) throw DomainError("m must be coprime to 2r");
  }
  int two_r() const { return 2 * r; }
};

namespace detail {

using IntPoly = std::vector<Integer>;

// exact division of integer polynomials by a monic divisor
inline IntPoly div_monic(IntPoly a, const IntPoly& b) {
  const std::size_t db = b.size() - 1;
  if (a.size() < b.size()) return {};
  IntPoly q(a.size() - db, 0);
  for (std::size_t k = a.size(); k-- > db;) {
    Integer c = a[k];
    q[k - db] = c;
    if (c != 0)
      for (std::size_t j = 0; j <= db; ++j) a[k - db + j] -= c * b[j];
  }
  for (const auto& x : a)
    if (x != 0) throw DomainError("cyclotomic division is not exact");
  return q;
}

inline IntPoly cyclotomic_poly(int n) {
  IntPoly num(n + 1, 0);
  num[0] = -1;
  num[n] = 1;
  for (int d = 1; d < n; ++d)
    if (n % d == 0) num = div_monic(num, cyclotomic_poly(d));
  return num;
}

}  // namespace detail

// Q(xi) for xi a primitive 2r-th root of unity, stored modulo Phi_{2r}.
class Field {
public:
  explicit Field(int rp) : rp_(rp), r_(2 * rp + 1) {
    phi_ = detail::cyclotomic_poly(2 * r_);
    deg_ = static_cast<int>(phi_.size()) - 1;
    // x^k mod Phi for deg <= k < 2*deg
    for (int k = deg_; k < 2 * deg_; ++k) {
      detail::IntPoly v(k + 1, 0);
      v[k] = 1;
      reduce_tab_.push_back(reduce_slow(std::move(v)));
    }
    for (int k = 0; k < 2 * r_; ++k) {
      detail::IntPoly v(k + 1, 0);
      v[k] = 1;
      xi_pow_.push_back(reduce_slow(std::move(v)));
    }
  }

  int rp() const { return rp_; }
  int r() const { return r_; }
  int degree() const { return deg_; }
  const detail::IntPoly& modulus() const { return phi_; }
  const detail::IntPoly& xi_pow(int k) const {
    int m = k % (2 * r_);
    if (m < 0) m += 2 * r_;
    return xi_pow_[m];
  }
  const detail::IntPoly& reduction(int k) const { return reduce_tab_[k - deg_]; }

private:
  detail::IntPoly reduce_slow(detail::IntPoly v) const {
    for (std::size_t k = v.size(); k-- > static_cast<std::size_t>(deg_);) {
      Integer c = v[k];
      if (c == 0) continue;
      for (int j = 0; j <= deg_; ++j) v[k - deg_ + j] -= c * phi_[j];
    }
    v.resize(deg_, 0);
    return v;
  }

  int rp_, r_, deg_ = 0;
  detail::IntPoly phi_;
  std::vector<detail::IntPoly> reduce_tab_;
  std::vector<detail::IntPoly> xi_pow_;
};

inline const Field* field_for(int rp) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Field>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[rp];
  if (!slot) slot = std::make_unique<Field>(rp);
  return slot.get();
}

class CycNum {
public:
  using Coeffs = boost::container::small_vector<Integer, 4>;

  CycNum() = default;
  explicit CycNum(const Field* f) : f_(f), c_(f->degree(), 0), den_(1) {}
  CycNum(const Field* f, const Integer& v) : CycNum(f) { c_[0] = v; }
  CycNum(const Field* f, const Rational& v) : CycNum(f) {
    c_[0] = boost::multiprecision::numerator(v);
    den_ = boost::multiprecision::denominator(v);
  }
  CycNum(const Field* f, long long v) : CycNum(f, Integer(v)) {}

  static CycNum xi_power(const Field* f, int k) {
    CycNum z(f);
    const auto& p = f->xi_pow(k);
    for (int j = 0; j < f->degree(); ++j) z.c_[j] = p[j];
    return z;
  }
  static CycNum from_rationals(const Field* f, const std::vector<Rational>& v);

  const Field* field() const { return f_; }
  int degree() const { return static_cast<int>(c_.size()); }
  const Integer& num(int k) const { return c_[k]; }
  const Integer& den() const { return den_; }
  Rational coeff(int k) const { return Rational(c_[k], den_); }

  bool is_zero() const {
    for (const auto& x : c_)
      if (x != 0) return false;
    return true;
  }
  bool is_one() const {
    if (den_ != 1 || c_[0] != 1) return false;
    for (std::size_t k = 1; k < c_.size(); ++k)
      if (c_[k] != 0) return false;
    return true;
  }
  bool integral() const { return den_ == 1; }
  bool is_rational() const {
    for (std::size_t k = 1; k < c_.size(); ++k)
      if (c_[k] != 0) return false;
    return true;
  }

  CycNum operator-() const {
    CycNum z = *this;
    for (auto& x : z.c_) x = -x;
    return z;
  }
  CycNum& operator+=(const CycNum& b) { return add_scaled(b, 1); }
  CycNum& operator-=(const CycNum& b) { return add_scaled(b, -1); }
  CycNum& operator*=(const CycNum& b) {
    *this = *this * b;
    return *this;
  }

  friend CycNum operator+(CycNum a, const CycNum& b) { return a += b; }
  friend CycNum operator-(CycNum a, const CycNum& b) { return a -= b; }
  friend CycNum operator*(const CycNum& a, const CycNum& b) {
    check_same(a, b);
    const int d = a.degree();
    boost::container::small_vector<Integer, 8> prod(2 * d - 1, 0);
    for (int i = 0; i < d; ++i) {
      if (a.c_[i] == 0) continue;
      for (int j = 0; j < d; ++j)
        if (b.c_[j] != 0) prod[i + j] += a.c_[i] * b.c_[j];
    }
    CycNum z(a.f_);
    for (int k = 0; k < d; ++k) z.c_[k] = std::move(prod[k]);
    for (int k = d; k < 2 * d - 1; ++k) {
      if (prod[k] == 0) continue;
      const auto& red = a.f_->reduction(k);
      for (int j = 0; j < d; ++j)
        if (red[j] != 0) z.c_[j] += prod[k] * red[j];
    }
    if (a.den_ != 1 || b.den_ != 1) {
      z.den_ = a.den_ * b.den_;
      z.normalize();
    }
    return z;
  }
  friend bool operator==(const CycNum& a, const CycNum& b) {
    return a.den_ == b.den_ && a.c_ == b.c_;
  }
  friend bool operator!=(const CycNum& a, const CycNum& b) { return !(a == b); }

  // multiplication by xi^k without a full product
  CycNum times_xi(int k) const {
    int m = k % (2 * f_->r());
    if (m < 0) m += 2 * f_->r();
    if (m == 0) return *this;
    const int d = degree();
    boost::container::small_vector<Integer, 8> prod(d + m, 0);
    for (int i = 0; i < d; ++i) prod[i + m] = c_[i];
    CycNum z(f_);
    z.den_ = den_;
    for (int j = 0; j < d; ++j) z.c_[j] = std::move(prod[j]);
    for (int kk = d; kk < d + m; ++kk) {
      if (prod[kk] == 0) continue;
      const auto& red = kk < 2 * d ? f_->reduction(kk) : f_->xi_pow(kk);
      for (int j = 0; j < d; ++j)
        if (red[j] != 0) z.c_[j] += prod[kk] * red[j];
    }
    return z;
  }

  CycNum scaled(const Rational& s) const {
    CycNum z = *this;
    for (auto& x : z.c_) x *= boost::multiprecision::numerator(s);
    z.den_ *= boost::multiprecision::denominator(s);
    z.normalize();
    return z;
  }

  // complex conjugation xi -> xi^{-1}
  CycNum bar() const {
    CycNum z(f_);
    z.den_ = den_;
    const int tr = 2 * f_->r();
    for (int k = 0; k < degree(); ++k) {
      if (c_[k] == 0) continue;
      const auto& p = f_->xi_pow(tr - k);
      for (int j = 0; j < degree(); ++j)
        if (p[j] != 0) z.c_[j] += c_[k] * p[j];
    }
    return z;
  }

  CycNum inverse() const;
  CycNum pow(long long e) const;

  // returns k with *this == +-xi^k (sign folded in, xi^r = -1), or -1
  int root_of_unity_exponent() const {
    for (int k = 0; k < 2 * f_->r(); ++k)
      if (*this == xi_power(f_, k)) return k;
    return -1;
  }

  std::string to_string() const;
  static CycNum parse(const Field* f, const std::string& text);

private:
  static void check_same(const CycNum& a, const CycNum& b) {
    if (a.f_ != b.f_) throw DomainError("cyclotomic values from different fields");
  }

  CycNum& add_scaled(const CycNum& b, int sign) {
    check_same(*this, b);
    if (den_ == b.den_) {
      for (int k = 0; k < degree(); ++k) {
        if (sign > 0)
          c_[k] += b.c_[k];
        else
          c_[k] -= b.c_[k];
      }
      if (den_ != 1) normalize();
      return *this;
    }
    const Integer g = boost::multiprecision::gcd(den_, b.den_);
    const Integer fa = b.den_ / g, fb = den_ / g;
    for (int k = 0; k < degree(); ++k) {
      c_[k] *= fa;
      if (sign > 0)
        c_[k] += b.c_[k] * fb;
      else
        c_[k] -= b.c_[k] * fb;
    }
    den_ *= fa;
    normalize();
    return *this;
  }

  void normalize() {
    if (den_ == 1) return;
    Integer g = den_;
    for (const auto& x : c_) {
      if (g == 1) break;
      if (x != 0) g = boost::multiprecision::gcd(g, x);
    }
    if (is_zero()) {
      den_ = 1;
      return;
    }
    if (g != 1) {
      for (auto& x : c_) x /= g;
      den_ /= g;
    }
  }

  const Field* f_ = nullptr;
  Coeffs c_;
  Integer den_ = 1;
};

inline CycNum CycNum::from_rationals(const Field* f, const std::vector<Rational>& v) {
  CycNum z(f);
  Integer l = 1;
  for (const auto& q : v) {
    const Integer& d = boost::multiprecision::denominator(q);
    l = l / boost::multiprecision::gcd(l, d) * d;
  }
  // fold powers beyond the degree through the xi-power table
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] == 0) continue;
    const Integer s = boost::multiprecision::numerator(v[k]) * (l / boost::multiprecision::denominator(v[k]));
    const auto& p = f->xi_pow(static_cast<int>(k));
    for (int j = 0; j < f->degree(); ++j)
      if (p[j] != 0) z.c_[j] += s * p[j];
  }
  z.den_ = l;
  z.normalize();
  return z;
}

inline CycNum CycNum::inverse() const {
  if (is_zero()) throw DomainError("division by zero in Q(xi)");
  // extended Euclid on (Phi, a) over Q[x]
  using RPoly = std::vector<Rational>;
  auto trim = [](RPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
  };
  auto sub_mul = [&](RPoly a, const RPoly& b, const RPoly& q) {
    RPoly prod(b.size() + q.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) prod[i + j] += b[i] * q[j];
    if (a.size() < prod.size()) a.resize(prod.size(), 0);
    for (std::size_t i = 0; i < prod.size(); ++i) a[i] -= prod[i];
    trim(a);
    return a;
  };
  RPoly r0(f_->modulus().begin(), f_->modulus().end());
  RPoly r1;
  for (int k = 0; k < degree(); ++k) r1.push_back(coeff(k));
  trim(r1);
  RPoly s0, s1{Rational(1)};
  while (!(r1.size() == 1)) {
    RPoly q(r0.size() - r1.size() + 1, 0), rem = r0;
    while (rem.size() >= r1.size()) {
      const std::size_t sh = rem.size() - r1.size();
      const Rational c = rem.back() / r1.back();
      q[sh] = c;
      for (std::size_t j = 0; j < r1.size(); ++j) rem[sh + j] -= c * r1[j];
      rem.pop_back();
      trim(rem);
    }
    RPoly s2 = sub_mul(s0, s1, q);
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
    if (r1.empty()) throw DomainError("non-invertible element modulo Phi");
  }
  for (auto& c : s1) c /= r1[0];
  return from_rationals(f_, s1);
}

inline CycNum CycNum::pow(long long e) const {
  if (e < 0) return inverse().pow(-e);
  CycNum result(f_, 1LL), base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

inline std::string CycNum::to_string() const {
  std::string out;
  for (int k = 0; k < degree(); ++k) {
    if (c_[k] == 0) continue;
    Rational q = coeff(k);
    std::string term = q.str();
    if (k == 1) term += "*x";
    if (k > 1) term += "*x^" + std::to_string(k);
    if (!out.empty()) out += " + ";
    out += term;
  }
  return out.empty() ? "0" : out;
}

inline CycNum CycNum::parse(const Field* f, const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw DomainError("empty cyclotomic literal");
  std::vector<Rational> acc;
  std::size_t pos = 0;
  auto fail = [&]() -> void { throw DomainError("malformed cyclotomic literal: " + text); };
  while (pos < s.size()) {
    int sign = 1;
    while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      if (s[pos] == '-') sign = -sign;
      ++pos;
    }
    Rational c = 1;
    std::size_t start = pos;
    while (pos < s.size() && (isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '/')) ++pos;
    if (pos > start) {
      try {
        c = Rational(s.substr(start, pos - start));
      } catch (const std::exception&) {
        fail();
      }
    }
    int power = 0;
    if (pos < s.size() && s[pos] == '*') ++pos;
    if (pos < s.size() && s[pos] == 'x') {
      ++pos;
      power = 1;
      if (pos < s.size() && s[pos] == '^') {
        ++pos;
        std::size_t es = pos;
        if (pos < s.size() && s[pos] == '-') ++pos;
        while (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == es) fail();
        power = std::stoi(s.substr(es, pos - es));
      }
    } else if (pos == start) {
      fail();
    }
    if (pos < s.size() && s[pos] != '+' && s[pos] != '-') fail();
    int m = power % (2 * f->r());
    if (m < 0) m += 2 * f->r();
    if (acc.size() <= static_cast<std::size_t>(m)) acc.resize(m + 1, 0);
    acc[m] += sign * c;
  }
  return from_rationals(f, acc);
}

}  // namespace sixj
