#pragma once

#include "sixj/qcalc.hpp"

#include <deque>
#include <memory>
#include <set>
#include <shared_mutex>

namespace sixj {

struct JPoly {
  Params params;
  IndexTriple triple;
  LPoly poly;
};

namespace detail {

inline UnitMono qv(int k) { return UnitMono::var(static_cast<Var>(k)); }
// q_a * q_b^{-1} * xi^s
inline UnitMono qq(int a, int b, int s) { return (qv(a) / qv(b)).shifted(s); }

inline LPoly assert_integral(LPoly p, const IndexTriple& t) {
  if (!p.integral()) throw DomainError("J polynomial is not integral for " + t.to_string());
  return p;
}

}  // namespace detail

inline bool case1_applies(const IndexTriple& t) { return t.i1 <= t.sum() && t.i3 <= t.sum(); }
inline bool case2_applies(const IndexTriple& t) { return t.i2 >= t.sum() && t.i3 >= t.sum(); }

inline LPoly j_case1(const Field* f, const IndexTriple& t) {
  using detail::qq;
  using detail::qv;
  const int rp = f->rp();
  if (!in_h(t, rp) || !case1_applies(t)) throw DomainError("first closed form does not apply to " + t.to_string());
  const int i1 = t.i1, i2 = t.i2, i3 = t.i3;
  const int n_top = rp - t.sum();
  LPoly sum(f);
  for (int n = 0; n <= n_top; ++n) {
    LPoly term = fshift(f, n_top - n, qq(2, 1, i3 + rp + 1)) * fshift(f, n_top - n, qq(2, 3, i3 + i2 - i1 - rp)) *
                 fshift(f, n, qq(1, 2, -2 * i3 - n_top)) * fshift(f, n, qq(3, 2, i1 + rp + 1)) *
                 fshift(f, rp - i2, qv(2).shifted(-i1 - rp - n));
    sum += term * qbinom(f, n_top, n);
  }
  LPoly pre = fshift(f, i2 + i3, qv(1).shifted(-i3 - rp)) * fshift(f, i1 + i2, qv(3).shifted(-i2 - rp));
  return detail::assert_integral(pre * sum * qmultinom(f, t), t);
}

inline LPoly j_case2(const Field* f, const IndexTriple& t) {
  using detail::qq;
  using detail::qv;
  const int rp = f->rp();
  if (!in_h(t, rp) || !case2_applies(t)) throw DomainError("second closed form does not apply to " + t.to_string());
  const int i1 = t.i1, i2 = t.i2, i3 = t.i3;
  const int n_top = rp + t.sum();
  LPoly sum(f);
  for (int n = 0; n <= n_top; ++n) {
    LPoly term = fshift(f, n, qv(2).shifted(-i1 + rp + 1)) * fshift(f, n_top - n, qv(2).shifted(-i1 - i2 + n + 1)) *
                 fshift(f, rp + i3, qq(1, 2, n_top - n - 2 * i3 + 1)) * fshift(f, rp + i1, qq(2, 3, n - 2 * i1 + 1));
    sum += term * qbinom(f, n_top, n);
  }
  LPoly pre = fshift(f, rp + i2 - n_top, qq(3, 1, n_top - 2 * i2 + 1));
  return detail::assert_integral(pre * sum * qfact(f, n_top).inverse(), t);
}

// One element of the tetrahedral orbit: J_start(q) = J_triple(subst(q)).
struct OrbitElement {
  IndexTriple triple;
  Substitution subst;
};

inline Substitution identity_subst() {
  Substitution s;
  for (int k = 1; k <= 3; ++k) s[k] = detail::qv(k);
  return s;
}

// (i1,i2,i3) -> (i2,i1,i3), q -> (q2^{-1}, q1^{-1}, q3^{-1})
inline OrbitElement sym_swap(const OrbitElement& e) {
  Substitution g;
  g[1] = detail::qv(2).inverse();
  g[2] = detail::qv(1).inverse();
  g[3] = detail::qv(3).inverse();
  return {{e.triple.i2, e.triple.i1, e.triple.i3}, compose(e.subst, g)};
}

// (i1,i2,i3) -> (i2,i3,i4), q -> (q1 q2^{-1} xi^{-2 i3}, q1 q3^{-1} xi^{2 i2}, q1)
inline OrbitElement sym_rotate(const OrbitElement& e) {
  const IndexTriple& t = e.triple;
  Substitution g;
  g[1] = detail::qq(1, 2, -2 * t.i3);
  g[2] = detail::qq(1, 3, 2 * t.i2);
  g[3] = detail::qv(1);
  return {{t.i2, t.i3, t.i4()}, compose(e.subst, g)};
}

namespace detail {

inline std::string subst_key(const OrbitElement& e, int two_r) {
  std::string k = e.triple.to_string();
  for (int v = 1; v <= 3; ++v) {
    const UnitMono& u = *e.subst[v];
    k += "|" + std::to_string(((u.xi % two_r) + two_r) % two_r);
    for (int w = 1; w <= 3; ++w) k += "," + std::to_string(u.m.e[w]);
  }
  return k;
}

}  // namespace detail

// Breadth-first orbit under the two generators, in generation order.
inline std::vector<OrbitElement> tetrahedral_orbit(const Params& p, const IndexTriple& t) {
  std::vector<OrbitElement> out;
  std::set<std::string> seen;
  std::deque<OrbitElement> queue{{t, identity_subst()}};
  seen.insert(detail::subst_key(queue.front(), p.two_r()));
  while (!queue.empty()) {
    OrbitElement e = queue.front();
    queue.pop_front();
    out.push_back(e);
    for (const OrbitElement& nx : {sym_swap(e), sym_rotate(e)}) {
      if (seen.insert(detail::subst_key(nx, p.two_r())).second) queue.push_back(nx);
    }
  }
  return out;
}

class JTable {
public:
  static JTable& instance() {
    static JTable table;
    return table;
  }

  std::shared_ptr<const JPoly> get(const Params& p, const IndexTriple& t) {
    const Key key{p.rp, t.i1, t.i2, t.i3};
    {
      std::shared_lock lock(mu_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    auto value = std::make_shared<const JPoly>(JPoly{p, t, build(p, t)});
    std::unique_lock lock(mu_);
    auto [it, inserted] = memo_.emplace(key, value);
    return it->second;
  }

  // test hook: replaces a table entry
  void override_entry(const Params& p, const IndexTriple& t, LPoly poly) {
    std::unique_lock lock(mu_);
    memo_[Key{p.rp, t.i1, t.i2, t.i3}] = std::make_shared<const JPoly>(JPoly{p, t, std::move(poly)});
  }
  void clear() {
    std::unique_lock lock(mu_);
    memo_.clear();
  }

  static LPoly build(const Params& p, const IndexTriple& t) {
    const Field* f = field_for(p.rp);
    if (!in_h(t, p.rp)) return LPoly(f);
    for (const OrbitElement& e : tetrahedral_orbit(p, t)) {
      if (case1_applies(e.triple)) return substitute(j_case1(f, e.triple), e.subst);
      if (case2_applies(e.triple)) return substitute(j_case2(f, e.triple), e.subst);
    }
    throw DomainError("no computable orbit element for " + t.to_string());
  }

private:
  using Key = std::array<int, 4>;
  std::shared_mutex mu_;
  std::map<Key, std::shared_ptr<const JPoly>> memo_;
};

inline std::shared_ptr<const JPoly> j_symbol(const Params& p, const IndexTriple& t) { return JTable::instance().get(p, t); }

// i+j+k = r'
inline LPoly boundary_low(const Field* f, const IndexTriple& t) {
  using detail::qv;
  const int rp = f->rp();
  if (t.sum() != rp) throw DomainError("low boundary form needs i+j+k = r'");
  const int i = t.i1, j = t.i2, k = t.i3;
  return fshift(f, rp - i, qv(1).shifted(-rp - k)) * fshift(f, rp - j, qv(2).shifted(-rp - i)) *
         fshift(f, rp - k, qv(3).shifted(-rp - j)) * qmultinom(f, t);
}

// i+j+k = -r'
inline LPoly boundary_high(const Field* f, const IndexTriple& t) {
  using detail::qq;
  const int rp = f->rp();
  if (t.sum() != -rp) throw DomainError("high boundary form needs i+j+k = -r'");
  const int i = t.i1, j = t.i2, k = t.i3;
  return fshift(f, rp + i, qq(2, 3, -2 * i + 1)) * fshift(f, rp + j, qq(3, 1, -2 * j + 1)) *
         fshift(f, rp + k, qq(1, 2, -2 * k + 1));
}

}  // namespace sixj
