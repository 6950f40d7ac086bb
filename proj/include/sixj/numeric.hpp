#pragma once

#include "sixj/cyclotomic.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <complex>

namespace sixj {

using Real = boost::multiprecision::mpfr_float;

inline unsigned bits_to_digits10(unsigned bits) { return static_cast<unsigned>(bits * 0.30103) + 2; }

// Sets the working precision for Real temporaries in the current thread.
class PrecisionScope {
public:
  explicit PrecisionScope(unsigned bits) : saved_(Real::default_precision()) {
    Real::default_precision(bits_to_digits10(bits));
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
  unsigned saved_;
};

// Complex ball: midpoint plus an upper bound on the modulus of the error.
class ComplexBall {
public:
  ComplexBall() : re_(0), im_(0), rad_(0) {}
  ComplexBall(Real re, Real im, Real rad) : re_(std::move(re)), im_(std::move(im)), rad_(std::move(rad)) {}
  explicit ComplexBall(const Rational& q) : re_(0), im_(0), rad_(0) {
    Real n(boost::multiprecision::numerator(q).str()), d(boost::multiprecision::denominator(q).str());
    re_ = n / d;
    rad_ = ulp_bound(re_);
  }

  const Real& re() const { return re_; }
  const Real& im() const { return im_; }
  const Real& radius() const { return rad_; }
  Real magnitude_upper() const { return abs_mid() + rad_; }
  std::complex<double> mid() const { return {re_.convert_to<double>(), im_.convert_to<double>()}; }

  bool contains(const std::complex<double>& z) const {
    Real dr = re_ - Real(z.real()), di = im_ - Real(z.imag());
    return sqrt(dr * dr + di * di) <= rad_ * 1.0000001 + Real(1e-300);
  }
  bool contains(const ComplexBall& z) const {
    Real dr = re_ - z.re_, di = im_ - z.im_;
    return sqrt(dr * dr + di * di) + z.rad_ <= rad_ * (1 + eps() * 8) + tiny();
  }
  bool overlaps(const ComplexBall& z) const {
    Real dr = re_ - z.re_, di = im_ - z.im_;
    return sqrt(dr * dr + di * di) <= (rad_ + z.rad_) * (1 + eps() * 8) + tiny();
  }

  friend ComplexBall operator+(const ComplexBall& a, const ComplexBall& b) {
    ComplexBall z(a.re_ + b.re_, a.im_ + b.im_, a.rad_ + b.rad_);
    z.rad_ += z.ulp_bound(z.abs_mid());
    return z;
  }
  friend ComplexBall operator-(const ComplexBall& a, const ComplexBall& b) {
    ComplexBall z(a.re_ - b.re_, a.im_ - b.im_, a.rad_ + b.rad_);
    z.rad_ += z.ulp_bound(z.abs_mid());
    return z;
  }
  ComplexBall operator-() const { return ComplexBall(-re_, -im_, rad_); }
  friend ComplexBall operator*(const ComplexBall& a, const ComplexBall& b) {
    ComplexBall z(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_, 0);
    Real ma = a.abs_mid(), mb = b.abs_mid();
    z.rad_ = ma * b.rad_ + mb * a.rad_ + a.rad_ * b.rad_;
    z.rad_ = z.rad_ * (1 + 4 * eps()) + z.ulp_bound(ma * mb) * 4;
    return z;
  }
  ComplexBall inverse() const {
    Real m = abs_mid();
    if (m <= rad_) throw DomainError("ball inverse of a ball containing zero");
    Real n2 = re_ * re_ + im_ * im_;
    ComplexBall z(re_ / n2, -im_ / n2, 0);
    z.rad_ = rad_ / (m * (m - rad_));
    z.rad_ = z.rad_ * (1 + 4 * eps()) + z.ulp_bound(z.abs_mid()) * 4;
    return z;
  }

  static ComplexBall polar_unit(const Real& angle) {
    ComplexBall z(cos(angle), sin(angle), 0);
    z.rad_ = eps() * 8;
    return z;
  }

private:
  static Real eps() {
    Real e = 1;
    return ldexp(e, -static_cast<int>(Real::default_precision() * 3.3219) + 2);
  }
  static Real tiny() { return ldexp(Real(1), -100000); }
  Real abs_mid() const { return sqrt(re_ * re_ + im_ * im_); }
  static Real ulp_bound(const Real& x) { return abs(x) * eps() + tiny(); }

  Real re_, im_, rad_;
};

// Image of a under xi -> exp(i*pi*m/r), enclosed at the requested precision.
inline ComplexBall to_complex(const CycNum& a, const Params& p, unsigned precision_bits = 128) {
  if (precision_bits < 53) throw DomainError("precision below 53 bits");
  if (a.field()->rp() != p.rp) throw DomainError("parameter mismatch in to_complex");
  PrecisionScope scope(precision_bits + 16);
  const Real pi = boost::math::constants::pi<Real>();
  const ComplexBall xi = ComplexBall::polar_unit(pi * p.m / p.r);
  ComplexBall acc, pw(Rational(1));
  for (int k = 0; k < a.degree(); ++k) {
    if (k > 0) pw = pw * xi;
    if (a.num(k) != 0) acc = acc + ComplexBall(Rational(a.num(k))) * pw;
  }
  if (a.den() != 1) acc = acc * ComplexBall(Rational(Integer(1), a.den()));
  return acc;
}

}  // namespace sixj
