#pragma once

#include "sixj/cyclotomic.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <optional>
#include <unordered_map>
#include <utility>

namespace sixj {

enum class Var : int { q0 = 0, q1, q2, q3, t1, t2, t3, X };
inline constexpr int kNumVars = 8;

inline const char* var_name(int v) {
  static const char* names[kNumVars] = {"q0", "q1", "q2", "q3", "t1", "t2", "t3", "X"};
  return names[v];
}

inline int var_index(const std::string& name) {
  for (int v = 0; v < kNumVars; ++v)
    if (name == var_name(v)) return v;
  throw DomainError("unknown variable " + name);
}

struct Monomial {
  std::array<int16_t, kNumVars> e{};

  static Monomial var(Var v, int power = 1) {
    Monomial m;
    m.e[static_cast<int>(v)] = static_cast<int16_t>(power);
    return m;
  }
  int operator[](Var v) const { return e[static_cast<int>(v)]; }
  bool is_one() const {
    for (auto x : e)
      if (x) return false;
    return true;
  }
  Monomial inverse() const {
    Monomial m;
    for (int k = 0; k < kNumVars; ++k) m.e[k] = static_cast<int16_t>(-e[k]);
    return m;
  }
  Monomial pow(int n) const {
    Monomial m;
    for (int k = 0; k < kNumVars; ++k) m.e[k] = static_cast<int16_t>(e[k] * n);
    return m;
  }
  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial m;
    for (int k = 0; k < kNumVars; ++k) m.e[k] = static_cast<int16_t>(a.e[k] + b.e[k]);
    return m;
  }
  friend Monomial operator/(const Monomial& a, const Monomial& b) { return a * b.inverse(); }
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.e == b.e; }
  friend bool operator!=(const Monomial& a, const Monomial& b) { return a.e != b.e; }
  friend bool operator<(const Monomial& a, const Monomial& b) { return a.e < b.e; }
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept {
    uint64_t w[2];
    std::memcpy(w, m.e.data(), sizeof(w));
    uint64_t h = w[0] * 0x9E3779B97F4A7C15ULL ^ (w[1] + 0x632BE59BD9B4E019ULL + (w[0] << 6));
    h ^= h >> 29;
    h *= 0xBF58476D1CE4E5B9ULL;
    return static_cast<std::size_t>(h ^ (h >> 32));
  }
};

// xi^xi * m, the shape of every substitution image and quantum-bracket argument
struct UnitMono {
  int xi = 0;
  Monomial m;

  static UnitMono var(Var v, int power = 1) { return {0, Monomial::var(v, power)}; }
  static UnitMono root(int k) { return {k, Monomial{}}; }
  UnitMono inverse() const { return {-xi, m.inverse()}; }
  UnitMono pow(int n) const { return {xi * n, m.pow(n)}; }
  UnitMono shifted(int k) const { return {xi + k, m}; }
  friend UnitMono operator*(const UnitMono& a, const UnitMono& b) { return {a.xi + b.xi, a.m * b.m}; }
  friend UnitMono operator/(const UnitMono& a, const UnitMono& b) { return a * b.inverse(); }
};

class LPoly {
public:
  using Term = std::pair<Monomial, CycNum>;

  LPoly() = default;
  explicit LPoly(const Field* f) : f_(f) {}
  LPoly(const Field* f, const CycNum& c) : f_(f) {
    if (!c.is_zero()) terms_.emplace_back(Monomial{}, c);
  }
  LPoly(const Field* f, long long c) : LPoly(f, CycNum(f, c)) {}
  LPoly(const Field* f, const Monomial& m, const CycNum& c) : f_(f) {
    if (!c.is_zero()) terms_.emplace_back(m, c);
  }
  LPoly(const Field* f, const UnitMono& u) : f_(f) { terms_.emplace_back(u.m, CycNum::xi_power(f, u.xi)); }
  static LPoly var(const Field* f, Var v, int power = 1) { return LPoly(f, Monomial::var(v, power), CycNum(f, 1LL)); }

  // terms must be sorted with distinct monomials and nonzero coefficients
  static LPoly from_sorted(const Field* f, std::vector<Term> terms) {
    LPoly p(f);
    p.terms_ = std::move(terms);
    return p;
  }
  static LPoly from_terms(const Field* f, std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
    LPoly p(f);
    for (auto& t : terms) {
      if (!p.terms_.empty() && p.terms_.back().first == t.first)
        p.terms_.back().second += t.second;
      else
        p.terms_.push_back(std::move(t));
      if (p.terms_.back().second.is_zero()) p.terms_.pop_back();
    }
    // merging can leave zeros only at the tail; nothing else to do
    return p;
  }

  const Field* field() const { return f_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one()); }
  CycNum constant_term() const {
    for (const auto& t : terms_)
      if (t.first.is_one()) return t.second;
    return CycNum(f_);
  }
  CycNum coeff(const Monomial& m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m, [](const Term& t, const Monomial& k) { return t.first < k; });
    if (it != terms_.end() && it->first == m) return it->second;
    return CycNum(f_);
  }
  bool integral() const {
    for (const auto& t : terms_)
      if (!t.second.integral()) return false;
    return true;
  }
  bool uses(Var v) const {
    for (const auto& t : terms_)
      if (t.first[v] != 0) return true;
    return false;
  }

  LPoly operator-() const {
    LPoly p = *this;
    for (auto& t : p.terms_) t.second = -t.second;
    return p;
  }
  friend LPoly operator+(const LPoly& a, const LPoly& b) { return combine(a, b, false); }
  friend LPoly operator-(const LPoly& a, const LPoly& b) { return combine(a, b, true); }
  LPoly& operator+=(const LPoly& b) { return *this = *this + b; }
  LPoly& operator-=(const LPoly& b) { return *this = *this - b; }
  LPoly& operator*=(const LPoly& b) { return *this = *this * b; }

  friend LPoly operator*(const LPoly& a, const LPoly& b) {
    const Field* f = a.f_ ? a.f_ : b.f_;
    if (a.is_zero() || b.is_zero()) return LPoly(f);
    if (a.size() == 1) return b.times_term(a.terms_[0].first, a.terms_[0].second);
    if (b.size() == 1) return a.times_term(b.terms_[0].first, b.terms_[0].second);
    if (a.size() * b.size() <= 64) {
      std::vector<Term> prod;
      prod.reserve(a.size() * b.size());
      for (const auto& x : a.terms_)
        for (const auto& y : b.terms_) prod.emplace_back(x.first * y.first, x.second * y.second);
      return from_terms(f, std::move(prod));
    }
    std::unordered_map<Monomial, CycNum, MonomialHash> acc;
    acc.reserve(a.size() * b.size());
    for (const auto& x : a.terms_)
      for (const auto& y : b.terms_) {
        Monomial m = x.first * y.first;
        auto it = acc.find(m);
        if (it == acc.end())
          acc.emplace(m, x.second * y.second);
        else
          it->second += x.second * y.second;
      }
    std::vector<Term> out;
    out.reserve(acc.size());
    for (auto& kv : acc)
      if (!kv.second.is_zero()) out.emplace_back(kv.first, std::move(kv.second));
    std::sort(out.begin(), out.end(), [](const Term& p, const Term& q) { return p.first < q.first; });
    return from_sorted(f, std::move(out));
  }
  friend LPoly operator*(const LPoly& a, const CycNum& c) {
    if (c.is_zero()) return LPoly(a.f_);
    LPoly p = a;
    for (auto& t : p.terms_) t.second = t.second * c;
    return p;
  }
  friend LPoly operator*(const CycNum& c, const LPoly& a) { return a * c; }
  friend LPoly operator*(const LPoly& a, const UnitMono& u) {
    LPoly p = a;
    for (auto& t : p.terms_) {
      t.first = t.first * u.m;
      t.second = t.second.times_xi(u.xi);
    }
    if (!u.m.is_one())
      std::sort(p.terms_.begin(), p.terms_.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
    return p;
  }
  LPoly times_term(const Monomial& m, const CycNum& c) const {
    LPoly p = *this;
    for (auto& t : p.terms_) {
      t.first = t.first * m;
      t.second = t.second * c;
    }
    return p;
  }
  LPoly pow(int n) const {
    if (n < 0) throw DomainError("negative power of a Laurent polynomial");
    LPoly result(f_, 1LL), base = *this;
    while (n > 0) {
      if (n & 1) result = result * base;
      n >>= 1;
      if (n) base = base * base;
    }
    return result;
  }

  friend bool operator==(const LPoly& a, const LPoly& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
      if (a.terms_[k].first != b.terms_[k].first || a.terms_[k].second != b.terms_[k].second) return false;
    return true;
  }
  friend bool operator!=(const LPoly& a, const LPoly& b) { return !(a == b); }

  // bar: xi -> xi^{-1} on coefficients and every variable inverted
  LPoly bar() const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.emplace_back(t.first.inverse(), t.second.bar());
    std::reverse(out.begin(), out.end());
    return from_sorted(f_, std::move(out));
  }

  // Lexicographically smallest and largest exponents per variable.
  std::pair<Monomial, Monomial> degree_box() const {
    Monomial lo, hi;
    bool first = true;
    for (const auto& t : terms_) {
      for (int k = 0; k < kNumVars; ++k) {
        if (first || t.first.e[k] < lo.e[k]) lo.e[k] = t.first.e[k];
        if (first || t.first.e[k] > hi.e[k]) hi.e[k] = t.first.e[k];
      }
      first = false;
    }
    return {lo, hi};
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!out.empty()) out += " + ";
      out += "(" + it->second.to_string() + ")";
      for (int v = 0; v < kNumVars; ++v) {
        const int e = it->first.e[v];
        if (e == 0) continue;
        out += std::string("*") + var_name(v);
        if (e != 1) out += "^" + std::to_string(e);
      }
    }
    return out;
  }

private:
  static LPoly combine(const LPoly& a, const LPoly& b, bool subtract) {
    const Field* f = a.f_ ? a.f_ : b.f_;
    std::vector<Term> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a.terms_[i].first < b.terms_[j].first)) {
        out.push_back(a.terms_[i++]);
      } else if (i == a.size() || b.terms_[j].first < a.terms_[i].first) {
        out.emplace_back(b.terms_[j].first, subtract ? -b.terms_[j].second : b.terms_[j].second);
        ++j;
      } else {
        CycNum c = a.terms_[i].second;
        if (subtract)
          c -= b.terms_[j].second;
        else
          c += b.terms_[j].second;
        if (!c.is_zero()) out.emplace_back(a.terms_[i].first, std::move(c));
        ++i;
        ++j;
      }
    }
    return from_sorted(f, std::move(out));
  }

  const Field* f_ = nullptr;
  std::vector<Term> terms_;
};

// Variable -> xi-power times monomial; unset entries are left alone.
using Substitution = std::array<std::optional<UnitMono>, kNumVars>;

inline LPoly substitute(const LPoly& a, const Substitution& s) {
  std::vector<LPoly::Term> out;
  out.reserve(a.size());
  for (const auto& [mono, c] : a.terms()) {
    Monomial m;
    int xi = 0;
    for (int v = 0; v < kNumVars; ++v) {
      const int e = mono.e[v];
      if (e == 0) continue;
      if (s[v]) {
        xi += e * s[v]->xi;
        m = m * s[v]->m.pow(e);
      } else {
        m.e[v] = static_cast<int16_t>(m.e[v] + e);
      }
    }
    out.emplace_back(m, c.times_xi(xi));
  }
  return LPoly::from_terms(a.field(), std::move(out));
}

// composition: (after o before)(v) = after(before(v))
inline Substitution compose(const Substitution& after, const Substitution& before) {
  Substitution out;
  for (int v = 0; v < kNumVars; ++v) {
    UnitMono img = before[v] ? *before[v] : UnitMono::var(static_cast<Var>(v));
    UnitMono res = UnitMono::root(img.xi);
    for (int w = 0; w < kNumVars; ++w) {
      const int e = img.m.e[w];
      if (e == 0) continue;
      UnitMono im = after[w] ? *after[w] : UnitMono::var(static_cast<Var>(w));
      res = res * im.pow(e);
    }
    out[v] = res;
  }
  return out;
}

namespace detail {

// powers base^e for e in [lo, hi], computed lazily
class PowerTable {
public:
  PowerTable(const CycNum& base, int lo, int hi) : lo_(lo) {
    pw_.resize(hi - lo + 1);
    for (int e = lo; e <= hi; ++e) pw_[e - lo] = base.pow(e);
  }
  const CycNum& operator()(int e) const { return pw_[e - lo_]; }

private:
  int lo_;
  std::vector<CycNum> pw_;
};

}  // namespace detail

using Point = std::array<std::optional<CycNum>, kNumVars>;

inline CycNum eval_at(const LPoly& a, const Point& pt) {
  const Field* f = a.field();
  CycNum acc(f);
  if (a.is_zero()) return acc;
  auto [lo, hi] = a.degree_box();
  std::array<std::optional<detail::PowerTable>, kNumVars> tabs;
  for (int v = 0; v < kNumVars; ++v) {
    if (lo.e[v] == 0 && hi.e[v] == 0) continue;
    if (!pt[v]) throw DomainError(std::string("no value for variable ") + var_name(v));
    if (lo.e[v] < 0 && pt[v]->is_zero()) throw DomainError("non-invertible evaluation point");
    tabs[v].emplace(*pt[v], lo.e[v], hi.e[v]);
  }
  for (const auto& [mono, c] : a.terms()) {
    CycNum t = c;
    for (int v = 0; v < kNumVars; ++v)
      if (mono.e[v] != 0) t = t * (*tabs[v])(mono.e[v]);
    acc += t;
  }
  return acc;
}

// Coefficient times monomial; specialization images for partially numeric evaluation.
struct ScaledMono {
  CycNum c;
  Monomial m;
};
using Specialization = std::array<std::optional<ScaledMono>, kNumVars>;

inline LPoly specialize(const LPoly& a, const Specialization& s) {
  const Field* f = a.field();
  if (a.is_zero()) return LPoly(f);
  auto [lo, hi] = a.degree_box();
  std::array<std::optional<detail::PowerTable>, kNumVars> tabs;
  for (int v = 0; v < kNumVars; ++v) {
    if (!s[v] || (lo.e[v] == 0 && hi.e[v] == 0)) continue;
    if (s[v]->c.is_zero()) throw DomainError("non-invertible specialization");
    tabs[v].emplace(s[v]->c, lo.e[v], hi.e[v]);
  }
  std::vector<LPoly::Term> out;
  out.reserve(a.size());
  for (const auto& [mono, c] : a.terms()) {
    CycNum t = c;
    Monomial m;
    for (int v = 0; v < kNumVars; ++v) {
      const int e = mono.e[v];
      if (e == 0) continue;
      if (s[v]) {
        t = t * (*tabs[v])(e);
        m = m * s[v]->m.pow(e);
      } else {
        m.e[v] = static_cast<int16_t>(m.e[v] + e);
      }
    }
    out.emplace_back(m, std::move(t));
  }
  return LPoly::from_terms(f, std::move(out));
}

// q with q*b == a, or nullopt when b does not divide a in the Laurent ring.
inline std::optional<LPoly> divide_exact(const LPoly& a, const LPoly& b) {
  if (b.is_zero()) throw DomainError("division by the zero polynomial");
  const Field* f = a.field() ? a.field() : b.field();
  if (a.is_zero()) return LPoly(f);
  if (b.size() == 1) {
    const auto& [m, c] = b.terms()[0];
    return a.times_term(m.inverse(), c.inverse());
  }
  auto [alo, ahi] = a.degree_box();
  auto [blo, bhi] = b.degree_box();
  Monomial qlo, qhi;
  for (int v = 0; v < kNumVars; ++v) {
    qlo.e[v] = static_cast<int16_t>(alo.e[v] - blo.e[v]);
    qhi.e[v] = static_cast<int16_t>(ahi.e[v] - bhi.e[v]);
    if (qlo.e[v] > qhi.e[v]) return std::nullopt;
  }
  const auto& lead_b = b.terms().back();
  const CycNum inv_lead = lead_b.second.inverse();
  std::vector<LPoly::Term> quot;
  LPoly rem = a;
  while (!rem.is_zero()) {
    const auto& lt = rem.terms().back();
    Monomial qm = lt.first / lead_b.first;
    for (int v = 0; v < kNumVars; ++v)
      if (qm.e[v] < qlo.e[v] || qm.e[v] > qhi.e[v]) return std::nullopt;
    CycNum qc = lt.second * inv_lead;
    rem = rem - b.times_term(qm, qc);
    quot.emplace_back(qm, std::move(qc));
  }
  std::reverse(quot.begin(), quot.end());
  return LPoly::from_sorted(f, std::move(quot));
}

// Formal quotient; equality by cross-multiplication.
class RFunc {
public:
  RFunc() = default;
  explicit RFunc(const LPoly& num) : num_(num), den_(num.field(), 1LL) {}
  RFunc(LPoly num, LPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw DomainError("zero denominator");
  }

  const LPoly& num() const { return num_; }
  const LPoly& den() const { return den_; }

  friend RFunc operator+(const RFunc& a, const RFunc& b) {
    if (a.den_ == b.den_) return RFunc(a.num_ + b.num_, a.den_);
    return RFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RFunc operator-(const RFunc& a, const RFunc& b) { return a + (-b); }
  RFunc operator-() const { return RFunc(-num_, den_); }
  friend RFunc operator*(const RFunc& a, const RFunc& b) { return RFunc(a.num_ * b.num_, a.den_ * b.den_); }
  RFunc inverse() const { return RFunc(den_, num_); }
  friend bool operator==(const RFunc& a, const RFunc& b) {
    if (a.den_ == b.den_) return a.num_ == b.num_;
    return a.num_ * b.den_ == b.num_ * a.den_;
  }
  friend bool operator!=(const RFunc& a, const RFunc& b) { return !(a == b); }

  // the quotient as a Laurent polynomial, if the division is exact
  std::optional<LPoly> as_lpoly() const { return divide_exact(num_, den_); }

  std::string to_string() const { return "(" + num_.to_string() + ") / (" + den_.to_string() + ")"; }

private:
  LPoly num_, den_;
};

}  // namespace sixj
