#pragma once

#include "sixj/qcalc.hpp"

#include <map>

namespace sixj {

// A tensor factor: the typical module V_c (dimension r, color c = xi^alpha as a
// t-monomial) or the two-dimensional module v.
struct Label {
  bool small = false;
  UnitMono color;

  static Label typical(const UnitMono& c) { return {false, c}; }
  static Label fundamental() { return {true, UnitMono{}}; }

  int dim(int rp) const { return small ? 2 : 2 * rp + 1; }
  bool same(const Label& o, int two_r) const {
    if (small || o.small) return small == o.small;
    return color.m == o.color.m && ((color.xi - o.color.xi) % two_r + two_r) % two_r == 0;
  }
  std::string to_string() const {
    if (small) return "v";
    std::string s = "V[";
    for (int v = 0; v < kNumVars; ++v)
      if (color.m.e[v]) s += std::string(var_name(v)) + "^" + std::to_string(color.m.e[v]);
    return s + "*x^" + std::to_string(color.xi) + "]";
  }
};

using Word = std::vector<Label>;

inline Word operator+(Word a, const Word& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline int word_dim(const Word& w, int rp) {
  int d = 1;
  for (const Label& l : w) d *= l.dim(rp);
  return d;
}

// Linear map between tensor words, stored by columns (one per domain basis vector).
class ModMap {
public:
  using Column = std::map<int, LPoly>;

  ModMap(const Field* f, Word dom, Word cod)
      : f_(f), dom_(std::move(dom)), cod_(std::move(cod)), cols_(word_dim(dom_, f->rp())) {}

  static ModMap identity(const Field* f, const Word& w) {
    ModMap m(f, w, w);
    for (int k = 0; k < m.cols(); ++k) m.add(k, k, LPoly(f, 1LL));
    return m;
  }

  const Field* field() const { return f_; }
  const Word& dom() const { return dom_; }
  const Word& cod() const { return cod_; }
  int cols() const { return static_cast<int>(cols_.size()); }
  int rows() const { return word_dim(cod_, f_->rp()); }
  const Column& column(int c) const { return cols_[c]; }

  void add(int row, int col, const LPoly& v) {
    if (v.is_zero()) return;
    auto [it, inserted] = cols_[col].emplace(row, v);
    if (!inserted) {
      it->second += v;
      if (it->second.is_zero()) cols_[col].erase(it);
    }
  }
  LPoly at(int row, int col) const {
    auto it = cols_[col].find(row);
    return it == cols_[col].end() ? LPoly(f_) : it->second;
  }

  Column apply(const Column& x) const {
    Column out;
    for (const auto& [k, a] : x)
      for (const auto& [row, b] : cols_[k]) {
        auto [it, inserted] = out.emplace(row, a * b);
        if (!inserted) it->second += a * b;
      }
    std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
    return out;
  }

  bool is_zero() const {
    for (const auto& c : cols_)
      if (!c.empty()) return false;
    return true;
  }

  // lambda when the map is lambda * Id
  std::optional<LPoly> scalar() const {
    if (!same_word(dom_, cod_)) return std::nullopt;
    LPoly lambda = at(0, 0);
    for (int c = 0; c < cols(); ++c) {
      for (const auto& [row, v] : cols_[c])
        if (row != c) return std::nullopt;
      if (at(c, c) != lambda) return std::nullopt;
    }
    return lambda;
  }

  bool same_word(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
      if (!a[k].same(b[k], 2 * f_->r())) return false;
    return true;
  }

  friend ModMap compose(const ModMap& g, const ModMap& f) {
    if (!g.same_word(g.dom_, f.cod_)) throw DomainError("composition of mismatched tensor words");
    ModMap out(f.f_, f.dom_, g.cod_);
    for (int c = 0; c < f.cols(); ++c) out.cols_[c] = g.apply(f.cols_[c]);
    return out;
  }

  friend ModMap tensor(const ModMap& a, const ModMap& b) {
    ModMap out(a.f_, a.dom_ + b.dom_, a.cod_ + b.cod_);
    const int bc = b.cols(), br = b.rows();
    for (int ca = 0; ca < a.cols(); ++ca)
      for (int cb = 0; cb < bc; ++cb)
        for (const auto& [ra, x] : a.cols_[ca])
          for (const auto& [rb, y] : b.cols_[cb]) out.add(ra * br + rb, ca * bc + cb, x * y);
    return out;
  }

  friend ModMap operator+(const ModMap& a, const ModMap& b) { return a.combine(b, 1); }
  friend ModMap operator-(const ModMap& a, const ModMap& b) { return a.combine(b, -1); }
  friend ModMap operator*(const LPoly& s, const ModMap& a) {
    ModMap out(a.f_, a.dom_, a.cod_);
    for (int c = 0; c < a.cols(); ++c)
      for (const auto& [row, v] : a.cols_[c]) out.add(row, c, s * v);
    return out;
  }
  friend bool operator==(const ModMap& a, const ModMap& b) {
    return a.same_word(a.dom_, b.dom_) && a.same_word(a.cod_, b.cod_) && a.cols_ == b.cols_;
  }

private:
  ModMap combine(const ModMap& b, int sign) const {
    if (!same_word(dom_, b.dom_) || !same_word(cod_, b.cod_)) throw DomainError("sum of maps with different types");
    ModMap out = *this;
    for (int c = 0; c < b.cols(); ++c)
      for (const auto& [row, v] : b.cols_[c]) out.add(row, c, sign > 0 ? v : -v);
    return out;
  }

  const Field* f_;
  Word dom_, cod_;
  std::vector<Column> cols_;
};

inline ModMap operator*(const ModMap& g, const ModMap& f) { return compose(g, f); }

// The module calculus over one field; colors are t-monomials times xi powers.
class RepCat {
public:
  explicit RepCat(const Params& p) : p_(p), f_(field_for(p.rp)), rp_(p.rp), top_(2 * p.rp) {}

  const Field* field() const { return f_; }
  int rp() const { return rp_; }

  static UnitMono t(int k) { return UnitMono::var(static_cast<Var>(static_cast<int>(Var::t1) + k - 1)); }

  Label V(const UnitMono& c) const { return Label::typical(c); }
  Label v() const { return Label::fundamental(); }

  LPoly one() const { return LPoly(f_, 1LL); }
  LPoly num(const CycNum& c) const { return LPoly(f_, c); }
  LPoly mono(const UnitMono& u) const { return LPoly(f_, u); }
  LPoly br(const UnitMono& u) const { return qbracket(f_, u); }
  LPoly brk(int n) const { return num(qint(f_, n)); }
  CycNum inv_br1() const { return qint(f_, 1).inverse(); }

  ModMap id(const Word& w) const { return ModMap::identity(f_, w); }

  // --- module structure ---

  enum class Gen { E, F, K, Kinv };

  ModMap generator(const Label& l, Gen g) const {
    ModMap m(f_, {l}, {l});
    const int d = l.dim(rp_);
    for (int i = 0; i < d; ++i) {
      switch (g) {
        case Gen::K:
        case Gen::Kinv: {
          UnitMono w = l.small ? UnitMono::root(i == 0 ? 1 : -1) : l.color.shifted(2 * (rp_ - i));
          m.add(i, i, mono(g == Gen::K ? w : w.inverse()));
          break;
        }
        case Gen::E:
          if (i == 0) break;
          if (l.small)
            m.add(0, 1, one());
          else
            m.add(i - 1, i, brk(i) * br(l.color.inverse().shifted(i)) * (inv_br1() * inv_br1()));
          break;
        case Gen::F:
          if (i + 1 < d) m.add(i + 1, i, one());
          break;
      }
    }
    return m;
  }

  // coproduct action on a tensor word: E = sum 1..E..K, F = sum K^-1..F..1
  ModMap action(const Word& w, Gen g) const {
    if (w.empty()) return g == Gen::K || g == Gen::Kinv ? id(w) : ModMap(f_, w, w);
    if (g == Gen::K || g == Gen::Kinv) {
      ModMap acc = generator(w[0], g);
      for (std::size_t k = 1; k < w.size(); ++k) acc = tensor(acc, generator(w[k], g));
      return acc;
    }
    ModMap total(f_, w, w);
    for (std::size_t pos = 0; pos < w.size(); ++pos) {
      ModMap term = pos == 0 ? generator(w[0], g) : (g == Gen::E ? id({w[0]}) : generator(w[0], Gen::Kinv));
      for (std::size_t k = 1; k < w.size(); ++k) {
        ModMap factor = k == pos ? generator(w[k], g)
                        : k < pos ? (g == Gen::E ? id({w[k]}) : generator(w[k], Gen::Kinv))
                                  : (g == Gen::E ? generator(w[k], Gen::K) : id({w[k]}));
        term = tensor(term, factor);
      }
      total = total + term;
    }
    return total;
  }

  bool is_intertwiner(const ModMap& m) const {
    for (Gen g : {Gen::E, Gen::F, Gen::K})
      if (compose(action(m.cod(), g), m) != compose(m, action(m.dom(), g))) return false;
    return true;
  }

  // --- dualities ---

  // w_a(v_i) = c_i v*_{2r'-i}
  LPoly w_coeff(const UnitMono& a, int i) const { return -mono(a.pow(-i).shifted(i * i - 1)); }
  // w_v(v0) = -xi v1*, w_v(v1) = v0*
  LPoly wv_coeff(int i) const { return i == 0 ? -mono(UnitMono::root(1)) : one(); }

  // d^a = d_{V_a} (w_{-a} x Id) : V_{-a} x V_a -> C
  ModMap d(const UnitMono& a) const {
    ModMap m(f_, {V(a.inverse()), V(a)}, {});
    const int n = top_ + 1;
    for (int i = 0; i <= top_; ++i) m.add(0, i * n + (top_ - i), w_coeff(a.inverse(), i));
    return m;
  }

  // b^a = (Id x w_{-a}^{-1}) b_{V_a} : C -> V_a x V_{-a}
  ModMap b(const UnitMono& a) const {
    ModMap m(f_, {}, {V(a), V(a.inverse())});
    const int n = top_ + 1;
    for (int j = 0; j <= top_; ++j) {
      auto inv = divide_exact(one(), w_coeff(a.inverse(), top_ - j));
      m.add(j * n + (top_ - j), 0, *inv);
    }
    return m;
  }

  ModMap dv() const {
    ModMap m(f_, {v(), v()}, {});
    for (int i = 0; i < 2; ++i) m.add(0, i * 2 + (1 - i), wv_coeff(i));
    return m;
  }

  ModMap bv() const {
    ModMap m(f_, {}, {v(), v()});
    for (int j = 0; j < 2; ++j) m.add(j * 2 + (1 - j), 0, *divide_exact(one(), wv_coeff(1 - j)));
    return m;
  }

  // --- small multiplicity maps ---

  // Y-_{a+1; v, a} : V_{a+1} -> v x V_a
  ModMap ym_v_first(const UnitMono& a) const {
    ModMap m(f_, {V(a.shifted(1))}, {v(), V(a)});
    const int n = top_ + 1;
    m.add(0, 0, one());
    for (int i = 1; i <= top_; ++i) {
      m.add(i, i, mono(UnitMono::root(-i)));
      m.add(n + i - 1, i, num(qint(f_, i) * inv_br1()));
    }
    return m;
  }

  // Y+_{a; v, a+1} : V_a -> v x V_{a+1}
  ModMap yp_v_first(const UnitMono& a) const {
    ModMap m(f_, {V(a)}, {v(), V(a.shifted(1))});
    const int n = top_ + 1;
    for (int i = 0; i <= top_; ++i) {
      if (i < top_) m.add(i + 1, i, -mono(a.shifted(-i - 1)) * brk(1));
      m.add(n + i, i, mono(UnitMono::root(-1)) * br(a.shifted(-i)));
    }
    return m;
  }

  // Y+_{a; a+1, v} : V_a -> V_{a+1} x v, through the cyclic isomorphism
  ModMap yp_v_second(const UnitMono& a) const {
    const UnitMono a1 = a.shifted(1);
    ModMap step = tensor(b(a1), id({V(a)}));
    step = compose(tensor(tensor(id({V(a1)}), yp_v_first(a1.inverse())), id({V(a)})), step);
    return compose(tensor(id({V(a1), v()}), d(a)), step);
  }

  // Y-_{a; a-1, v} : V_a -> V_{a-1} x v
  ModMap ym_v_second(const UnitMono& a) const {
    const UnitMono am = a.shifted(-1);
    ModMap step = tensor(b(am), id({V(a)}));
    step = compose(tensor(tensor(id({V(am)}), ym_v_first(a.inverse())), id({V(a)})), step);
    return compose(tensor(id({V(am), v()}), d(a)), step);
  }

  // Z-_{a; v, a+1} : v x V_{a+1} -> V_a
  ModMap zm_v_first(const UnitMono& a) const {
    return compose(tensor(dv(), id({V(a)})), tensor(id({v()}), ym_v_first(a)));
  }
  // Z+_{a+1; v, a} : v x V_a -> V_{a+1}
  ModMap zp_v_first(const UnitMono& a) const {
    return compose(tensor(dv(), id({V(a.shifted(1))})), tensor(id({v()}), yp_v_first(a)));
  }
  // Z-_{a; a+1, v} : V_{a+1} x v -> V_a
  ModMap zm_v_second(const UnitMono& a) const {
    return compose(tensor(id({V(a)}), dv()), tensor(ym_v_second(a.shifted(1)), id({v()})));
  }
  // Z+_{a+1; a, v} : V_a x v -> V_{a+1}
  ModMap zp_v_second(const UnitMono& a) const {
    return compose(tensor(id({V(a.shifted(1))}), dv()), tensor(yp_v_second(a), id({v()})));
  }

  // --- X family ---

  // X : V_a x V_b -> V_{a+1} x V_{b+1}, closed form
  ModMap x(const UnitMono& a, const UnitMono& bcol) const {
    ModMap m(f_, {V(a), V(bcol)}, {V(a.shifted(1)), V(bcol.shifted(1))});
    const int n = top_ + 1;
    for (int i = 0; i <= top_; ++i)
      for (int j = 0; j <= top_; ++j) {
        const int col = i * n + j;
        if (j < top_) m.add(i * n + j + 1, col, mono(bcol.shifted(i - j - 1)) * br(a.shifted(-i)));
        if (i < top_) m.add((i + 1) * n + j, col, mono(UnitMono::root(-1)) * br(bcol.shifted(-j)));
      }
    return m;
  }

  // X from its definition (1/{1}) (Id x d^v x Id)(Y+_{a;a+1,v} x Y+_{b;v,b+1})
  ModMap x_composite(const UnitMono& a, const UnitMono& bcol) const {
    ModMap m = compose(tensor(tensor(id({V(a.shifted(1))}), dv()), id({V(bcol.shifted(1))})),
                       tensor(yp_v_second(a), yp_v_first(bcol)));
    return num(inv_br1()) * m;
  }

  ModMap xl(const UnitMono& a, const UnitMono& bcol) const {
    return compose(tensor(tensor(id({V(a.shifted(-1))}), dv()), id({V(bcol.shifted(1))})),
                   tensor(ym_v_second(a), yp_v_first(bcol)));
  }
  ModMap xr(const UnitMono& a, const UnitMono& bcol) const {
    return compose(tensor(tensor(id({V(a.shifted(1))}), dv()), id({V(bcol.shifted(-1))})),
                   tensor(yp_v_second(a), ym_v_first(bcol.shifted(-1))));
  }
  ModMap xlr(const UnitMono& a, const UnitMono& bcol) const {
    return compose(tensor(tensor(id({V(a.shifted(-1))}), dv()), id({V(bcol.shifted(-1))})),
                   tensor(ym_v_second(a), ym_v_first(bcol.shifted(-1))));
  }

  // --- typical multiplicity maps ---

  // Y^{-2r'}_{a; b, c} : v_n -> (Delta F)^n (v0 x v0), with b + c - a = -2r'
  ModMap y_base(const UnitMono& a, const UnitMono& bcol, const UnitMono& c) const {
    check_sum(bcol * c / a, -top_, "lowest multiplicity map");
    ModMap m(f_, {V(a)}, {V(bcol), V(c)});
    const ModMap delta_f = action({V(bcol), V(c)}, Gen::F);
    ModMap::Column vec{{0, one()}};
    for (int n = 0; n <= top_; ++n) {
      for (const auto& [row, val] : vec) m.add(row, n, val);
      vec = delta_f.apply(vec);
    }
    return m;
  }

  // Y^{2k}_{a; b, c} = X^n Y^{-2r'}_{a; b-n, c-n}, n = r' + k
  ModMap y(int k, const UnitMono& a, const UnitMono& bcol, const UnitMono& c) const {
    if (k < -rp_ || k > rp_) throw DomainError("multiplicity height out of range");
    check_sum(bcol * c / a, 2 * k, "multiplicity map");
    const int n = rp_ + k;
    ModMap m = y_base(a, bcol.shifted(-n), c.shifted(-n));
    for (int s = n; s >= 1; --s) m = compose(x(bcol.shifted(-s), c.shifted(-s)), m);
    return m;
  }

  // Z^{2k}_{a; b, c} : V_b x V_c -> V_a with a - b - c = 2k
  ModMap z(int k, const UnitMono& a, const UnitMono& bcol, const UnitMono& c) const {
    return compose(tensor(id({V(a)}), d(c)), tensor(y(k, bcol, a, c.inverse()), id({V(c)})));
  }
  ModMap z_alt(int k, const UnitMono& a, const UnitMono& bcol, const UnitMono& c) const {
    return compose(tensor(d(bcol.inverse()), id({V(a)})), tensor(id({V(bcol)}), y(k, c, bcol.inverse(), a)));
  }

  // R(f) = (d^b x Id x Id)(Id x f x Id)(Id x b^a) for f : V_a -> V_b x V_c
  ModMap rotate(const ModMap& fm) const {
    if (fm.dom().size() != 1 || fm.cod().size() != 2) throw DomainError("rotation needs a map V_a -> V_b x V_c");
    const UnitMono a = fm.dom()[0].color, bcol = fm.cod()[0].color, c = fm.cod()[1].color;
    const Label mb = V(bcol.inverse()), ma = V(a.inverse());
    ModMap step = tensor(id({mb}), b(a));
    step = compose(tensor(tensor(id({mb}), fm), id({ma})), step);
    return compose(tensor(d(bcol), id({V(c), ma})), step);
  }

  // --- closed graphs ---

  // D(c) as a polynomial in the color c
  LPoly dpoly_of(const UnitMono& c) const { return dpoly(f_, c); }

  // lambda * d(V_a) for an endomorphism lambda Id of V_a
  LPoly renormalize(const ModMap& endo) const {
    auto lambda = endo.scalar();
    if (!lambda) throw DomainError("cut endomorphism is not scalar");
    auto q = divide_exact(*lambda, dpoly_of(endo.dom()[0].color));
    if (!q) throw DomainError("modified dimension does not divide the cut scalar");
    return *q;
  }

private:
  void check_sum(const UnitMono& u, int expect, const char* what) const {
    if (!u.m.is_one() || ((u.xi - expect) % (2 * p_.r) + 2 * p_.r) % (2 * p_.r) != 0)
      throw DomainError(std::string("color constraint violated for ") + what);
  }

  Params p_;
  const Field* f_;
  int rp_, top_;
};

// Colors of the tetrahedron for heights (i, j, k) as t-monomials.
struct TetColors {
  UnitMono alpha, beta, gamma, delta, eps, phi;
};

inline TetColors tet_colors(const IndexTriple& t) {
  const UnitMono a = RepCat::t(1), b = RepCat::t(2), c = RepCat::t(3);
  return {a, b, c, (b / c).shifted(-2 * t.i1), (c / a).shifted(-2 * t.i2), (a / b).shifted(-2 * t.i3)};
}

// t_k -> q_k
inline LPoly t_to_q(const LPoly& p) {
  Substitution s;
  for (int k = 1; k <= 3; ++k) s[static_cast<int>(Var::t1) + k - 1] = UnitMono::var(static_cast<Var>(k));
  return substitute(p, s);
}

// Tetrahedron cut along the alpha edge, renormalized; a polynomial in q1, q2, q3.
inline LPoly tetrahedron_oracle(const Params& p, const IndexTriple& t) {
  if (!in_h(t, p.rp)) throw DomainError("triple outside H: " + t.to_string());
  const RepCat rc(p);
  const auto [al, be, ga, de, ep, ph] = tet_colors(t);
  const int l = t.sum();
  ModMap m = rc.y(t.i2, al, ga, ep.inverse());
  m = compose(tensor(rc.y(t.i1, ga, be, de.inverse()), rc.id({rc.V(ep.inverse())})), m);
  m = compose(tensor(rc.id({rc.V(be)}), rc.z(-l, ph, de.inverse(), ep.inverse())), m);
  m = compose(rc.z(t.i3, al, be, ph), m);
  return t_to_q(rc.renormalize(m));
}

// The same graph cut along the beta edge.
inline LPoly tetrahedron_oracle_beta(const Params& p, const IndexTriple& t) {
  if (!in_h(t, p.rp)) throw DomainError("triple outside H: " + t.to_string());
  const RepCat rc(p);
  const auto [al, be, ga, de, ep, ph] = tet_colors(t);
  const int l = t.sum();
  ModMap m = rc.y(t.i3, be, al, ph.inverse());
  m = compose(tensor(rc.y(t.i2, al, ga, ep.inverse()), rc.id({rc.V(ph.inverse())})), m);
  m = compose(tensor(rc.id({rc.V(ga)}), rc.z(-l, de, ep.inverse(), ph.inverse())), m);
  m = compose(rc.z(t.i1, be, ga, de), m);
  return t_to_q(rc.renormalize(m));
}

inline bool theta_admissible(const Params& p, int k) { return k >= -p.rp && k <= p.rp; }

// Theta graph with heights 2k, -2k cut along x = a + b - 2k; expected constant 1.
inline LPoly theta_oracle(const Params& p, int k) {
  if (!theta_admissible(p, k)) throw DomainError("theta height out of range");
  const RepCat rc(p);
  const UnitMono a = RepCat::t(1), b = RepCat::t(2), x = (a * b).shifted(-2 * k);
  return rc.renormalize(compose(rc.z(-k, x, a, b), rc.y(k, x, a, b)));
}

}  // namespace sixj
