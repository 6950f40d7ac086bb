#pragma once

#include "sixj/laurent.hpp"

#include <tuple>

namespace sixj {

struct IndexTriple {
  int i1 = 0, i2 = 0, i3 = 0;

  int sum() const { return i1 + i2 + i3; }
  int i4() const { return -sum(); }
  int operator[](int k) const { return k == 0 ? i1 : (k == 1 ? i2 : i3); }
  friend bool operator==(const IndexTriple& a, const IndexTriple& b) { return a.i1 == b.i1 && a.i2 == b.i2 && a.i3 == b.i3; }
  friend bool operator<(const IndexTriple& a, const IndexTriple& b) {
    return std::tie(a.i1, a.i2, a.i3) < std::tie(b.i1, b.i2, b.i3);
  }
  std::string to_string() const {
    return "(" + std::to_string(i1) + "," + std::to_string(i2) + "," + std::to_string(i3) + ")";
  }
};

// every one of i1, i2, i3, i1+i2+i3 lies in [-r', r']
inline bool in_h(const IndexTriple& t, int rp) {
  for (int x : {t.i1, t.i2, t.i3, t.sum()})
    if (x < -rp || x > rp) return false;
  return true;
}

inline std::vector<IndexTriple> hset_enumerate(const Params& p) {
  std::vector<IndexTriple> out;
  for (int a = -p.rp; a <= p.rp; ++a)
    for (int b = -p.rp; b <= p.rp; ++b)
      for (int c = -p.rp; c <= p.rp; ++c)
        if (a + b + c <= p.rp && a + b + c >= -p.rp) out.push_back({a, b, c});
  return out;
}

inline long long hset_cardinality(const Params& p) {
  const long long r = p.r;
  return r * (2 * r * r + 1) / 3;
}

// representative of x mod r in [-r', r']
inline int bar_reduce(int x, const Params& p) {
  int m = ((x % p.r) + p.r) % p.r;
  return m > p.rp ? m - p.r : m;
}

// {X} = X - X^{-1}
inline LPoly qbracket(const Field* f, const UnitMono& x) { return LPoly(f, x) - LPoly(f, x.inverse()); }

inline LPoly qbracket(const LPoly& x) {
  if (x.size() != 1) throw DomainError("quantum bracket of a non-monomial");
  const auto& [m, c] = x.terms()[0];
  const int k = c.root_of_unity_exponent();
  if (k < 0) throw DomainError("quantum bracket of a non-unit coefficient");
  return qbracket(x.field(), UnitMono{k, m});
}

// Fn(N, X) = prod_{i<N} {xi^i X}
inline LPoly fshift(const Field* f, int n, const UnitMono& x) {
  if (n < 0) throw DomainError("negative length in shifted factorial");
  LPoly acc(f, 1LL);
  for (int i = 0; i < n; ++i) acc = acc * qbracket(f, x.shifted(i));
  return acc;
}

// [n] = xi^n - xi^{-n}
inline CycNum qint(const Field* f, int n) { return CycNum::xi_power(f, n) - CycNum::xi_power(f, -n); }

inline CycNum qfact(const Field* f, int n) {
  if (n < 0) throw DomainError("negative quantum factorial");
  CycNum acc(f, 1LL);
  for (int k = 1; k <= n; ++k) acc = acc * qint(f, k);
  return acc;
}

inline CycNum qbinom(const Field* f, int n, int k) {
  if (k < 0 || k > n) throw DomainError("quantum binomial out of range");
  CycNum v = qfact(f, n) * (qfact(f, k) * qfact(f, n - k)).inverse();
  if (!v.integral()) throw DomainError("quantum binomial is not integral");
  return v;
}

// [2r']! / ([r'-i1]! [r'-i2]! [r'-i3]!)
inline CycNum qmultinom(const Field* f, const IndexTriple& t) {
  const int rp = f->rp();
  for (int k = 0; k < 3; ++k)
    if (rp - t[k] < 0 || rp - t[k] > 2 * rp) throw DomainError("qmultinom index out of range " + t.to_string());
  return qfact(f, 2 * rp) * (qfact(f, rp - t.i1) * qfact(f, rp - t.i2) * qfact(f, rp - t.i3)).inverse();
}

// D(q) = Fn(2r', q xi)
inline LPoly dpoly(const Field* f, const UnitMono& q) { return fshift(f, 2 * f->rp(), q.shifted(1)); }
inline LPoly dpoly(const Field* f, Var v = Var::q1) { return dpoly(f, UnitMono::var(v)); }

}  // namespace sixj
