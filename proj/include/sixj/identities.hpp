#pragma once

#include "sixj/jpoly.hpp"
#include "sixj/repcat.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

namespace sixj {

struct Outcome {
  std::string suite;
  std::string key;
  bool pass = false;
  std::string witness;
};

// Linear color form: a*alpha + b*beta + c*gamma + s, i.e. q1^a q2^b q3^c xi^s.
struct Color {
  int a = 0, b = 0, c = 0, s = 0;

  static Color alpha() { return {1, 0, 0, 0}; }
  static Color beta() { return {0, 1, 0, 0}; }
  static Color gamma() { return {0, 0, 1, 0}; }
  static Color konst(int s) { return {0, 0, 0, s}; }

  friend Color operator+(Color x, const Color& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.s + y.s}; }
  friend Color operator-(Color x, const Color& y) { return {x.a - y.a, x.b - y.b, x.c - y.c, x.s - y.s}; }
  friend Color operator+(Color x, int k) { return {x.a, x.b, x.c, x.s + k}; }
  friend Color operator-(Color x, int k) { return {x.a, x.b, x.c, x.s - k}; }
  Color operator-() const { return {-a, -b, -c, -s}; }
  friend Color operator*(int k, const Color& x) { return {k * x.a, k * x.b, k * x.c, k * x.s}; }

  UnitMono mono() const {
    return UnitMono::var(Var::q1, a) * UnitMono::var(Var::q2, b) * UnitMono::var(Var::q3, c) * UnitMono::root(s);
  }
};

namespace detail {

inline LPoly br(const Field* f, const Color& x) { return qbracket(f, x.mono()); }
inline LPoly fact(const Field* f, const Color& x, int n) { return fshift(f, n, x.mono()); }

// 6j(alpha+da, beta+db, gamma+dc; 2t) as a polynomial in q1, q2, q3
inline LPoly sixj_shifted(const Params& p, const IndexTriple& t, int da, int db, int dc) {
  auto j = j_symbol(p, t);
  if (j->poly.is_zero()) return j->poly;
  Substitution s;
  s[1] = UnitMono::var(Var::q1).shifted(da);
  s[2] = UnitMono::var(Var::q2).shifted(db);
  s[3] = UnitMono::var(Var::q3).shifted(dc);
  return substitute(j->poly, s);
}

inline Outcome verdict(std::string suite, std::string key, bool pass, const std::function<std::string()>& witness) {
  Outcome o{std::move(suite), std::move(key), pass, {}};
  if (!pass) o.witness = witness();
  return o;
}

inline std::string key6(const std::array<int, 6>& v) {
  std::string s = "(";
  for (int k = 0; k < 6; ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s + ")";
}

}  // namespace detail

// D(q) {q} = (-1)^{r'} {q^r}
inline bool dpoly_bracket_identity(const Field* f, const UnitMono& q) {
  LPoly lhs = dpoly(f, q) * qbracket(f, q);
  LPoly rhs = qbracket(f, q.pow(2 * f->rp() + 1));
  if (f->rp() % 2) rhs = -rhs;
  return lhs == rhs;
}

// Biedenharn-Elliott for indices (i1..i6); every 1/D(q0 xi^{2n}) is written as
// (-1)^{r'} {q0 xi^{2n}} / {q0^r}, so the right side carries one denominator.
inline Outcome check_be(const Params& p, const std::array<int, 6>& idx) {
  const Field* f = field_for(p.rp);
  const int rp = p.rp;
  const auto [i1, i2, i3, i4, i5, i6] = idx;
  auto bar = [&](int x) { return bar_reduce(x, p); };
  const UnitMono q0 = UnitMono::var(Var::q0), q1 = UnitMono::var(Var::q1), q2 = UnitMono::var(Var::q2),
                 q3 = UnitMono::var(Var::q3);

  const IndexTriple primed{bar(-i1 + i5 - i6), bar(-i2 + i6 - i4), bar(-i3 + i4 - i5)};
  Substitution sl;
  sl[1] = (q0 / q1).shifted(2 * i4);
  sl[2] = (q0 / q2).shifted(2 * i5);
  sl[3] = (q0 / q3).shifted(2 * i6);
  LPoly lhs = j_symbol(p, {i1, i2, i3})->poly;
  if (!lhs.is_zero()) lhs = lhs * substitute(j_symbol(p, primed)->poly, sl);

  const LPoly den = qbracket(f, q0.pow(p.r));
  RFunc rhs(LPoly(f), den);
  for (int n = -rp; n <= rp; ++n) {
    const UnitMono x = q0.shifted(2 * n);
    if (dpoly(f, x).is_zero()) throw DomainError("vanishing D in the Biedenharn-Elliott sum");
    const int p4 = bar(i4 - n), p5 = bar(i5 - n), p6 = bar(i6 - n);
    auto arg = [&](const UnitMono& b, const UnitMono& c) {
      Substitution s;
      s[1] = x;
      s[2] = b;
      s[3] = c;
      return s;
    };
    LPoly a = j_symbol(p, {i1, p6, -p5})->poly;
    if (a.is_zero()) continue;
    LPoly b = j_symbol(p, {i2, p4, -p6})->poly;
    if (b.is_zero()) continue;
    LPoly c = j_symbol(p, {i3, p5, -p4})->poly;
    if (c.is_zero()) continue;
    LPoly term = substitute(a, arg(q2, q3)) * substitute(b, arg(q3, q1)) * substitute(c, arg(q1, q2)) * qbracket(f, x);
    if (rp % 2) term = -term;
    rhs = rhs + RFunc(term, den);
  }
  const RFunc left(lhs);
  const bool ok = left == rhs;
  return detail::verdict("be", detail::key6(idx), ok,
                         [&] { return "lhs = " + left.to_string() + "; rhs = " + rhs.to_string(); });
}

// Orthonormality for t and i1'; the denominators D(q2 q3^{-1} xi^{-2 i1}) D(q1 xi^{2n})
// become {q2^r q3^{-r}} {q1^r} with numerator factor {q2 q3^{-1} xi^{-2 i1}} {q1 xi^{2n}}.
inline Outcome check_ortho(const Params& p, const IndexTriple& t, int i1p) {
  const Field* f = field_for(p.rp);
  const int rp = p.rp;
  auto bar = [&](int x) { return bar_reduce(x, p); };
  const UnitMono q1 = UnitMono::var(Var::q1), q2 = UnitMono::var(Var::q2), q3 = UnitMono::var(Var::q3);
  const UnitMono y = (q2 / q3).shifted(-2 * t.i1);
  if (dpoly(f, y).is_zero()) throw DomainError("vanishing D in the orthonormality sum");

  const LPoly den = qbracket(f, y.pow(p.r)) * qbracket(f, q1.pow(p.r));
  RFunc sum(LPoly(f), den);
  for (int n = -rp; n <= rp; ++n) {
    const UnitMono x = q1.shifted(2 * n);
    LPoly a = j_symbol(p, {t.i1, bar(t.i2 - n), bar(t.i3 + n)})->poly;
    if (a.is_zero()) continue;
    LPoly b = j_symbol(p, {-i1p, bar(n - t.i2), bar(-t.i3 - n)})->poly;
    if (b.is_zero()) continue;
    Substitution sa, sb;
    sa[1] = x;
    sb[1] = x.inverse();
    sb[2] = q2.inverse();
    sb[3] = q3.inverse();
    sum = sum + RFunc(substitute(a, sa) * substitute(b, sb) * qbracket(f, x) * qbracket(f, y), den);
  }
  const RFunc expect(LPoly(f, CycNum(f, t.i1 == i1p ? 1LL : 0LL)));
  const bool ok = sum == expect;
  return detail::verdict("ortho", t.to_string() + "," + std::to_string(i1p), ok,
                         [&] { return "sum = " + sum.to_string(); });
}

// Three-term recurrence at (i,j,k) with i <= r', j >= -r'.
inline Outcome check_rec(const Params& p, const IndexTriple& t) {
  const Field* f = field_for(p.rp);
  const int rp = p.rp, i = t.i1, j = t.i2, k = t.i3;
  const Color al = Color::alpha(), be = Color::beta(), ga = Color::gamma();
  using detail::br;
  using detail::sixj_shifted;
  LPoly lhs = br(f, Color::konst(i + rp)) * br(f, be - ga + (-i + rp + 2)) * sixj_shifted(p, {i - 1, j + 1, k}, 0, 0, 0);
  LPoly rhs = br(f, ga + (i + rp - 1)) * br(f, al + (j + rp + 1)) * sixj_shifted(p, t, 0, 0, -2) +
              br(f, ga - 1) * br(f, al + (-k - rp)) * sixj_shifted(p, t, 1, 1, -1);
  const bool ok = lhs == rhs;
  return detail::verdict("rec", t.to_string(), ok,
                         [&] { return "lhs = " + lhs.to_string() + "; rhs = " + rhs.to_string(); });
}

// Raising recurrence with step N; N = 1 is the single-step form.
inline Outcome check_recgenup(const Params& p, const IndexTriple& t, int n_step) {
  const Field* f = field_for(p.rp);
  const int rp = p.rp, i = t.i1, j = t.i2, k = t.i3, l = -t.sum(), N = n_step;
  const Color al = Color::alpha(), be = Color::beta(), ga = Color::gamma();
  const Color delta = be - ga - 2 * i, phi = al - be - 2 * k;
  using detail::fact;
  LPoly lhs = detail::sixj_shifted(p, t, 0, 0, 0) * fact(f, Color::konst(k - rp), N) * fact(f, -al + (k - rp), N);
  LPoly rhs(f);
  for (int n = 0; n <= N; ++n) {
    LPoly s = detail::sixj_shifted(p, {i, j, k + N}, 0, -n, 0);
    if (s.is_zero()) continue;
    rhs += fact(f, -phi - k - rp, N - n) * fact(f, delta - l - rp, N - n) * fact(f, phi - N, n) *
           fact(f, -delta - i - rp, n) * s * qbinom(f, N, n);
  }
  const bool ok = lhs == rhs;
  return detail::verdict(N == 1 ? "recsym" : "recgenup", t.to_string() + ",N=" + std::to_string(N), ok,
                         [&] { return "lhs = " + lhs.to_string() + "; rhs = " + rhs.to_string(); });
}

inline Outcome check_recgendown(const Params& p, const IndexTriple& t, int n_step) {
  const Field* f = field_for(p.rp);
  const int rp = p.rp, i = t.i1, j = t.i2, k = t.i3, l = -t.sum(), N = n_step;
  const Color al = Color::alpha(), be = Color::beta(), ga = Color::gamma();
  const Color eps = ga - al - 2 * j, phi = al - be - 2 * k;
  using detail::fact;
  LPoly lhs = detail::sixj_shifted(p, t, 0, 0, 0) * fact(f, Color::konst(l - rp), N) * fact(f, -eps + (l - rp), N);
  LPoly rhs(f);
  for (int n = 0; n <= N; ++n) {
    LPoly s = detail::sixj_shifted(p, {i, j, k - N}, 0, n, 0);
    if (s.is_zero()) continue;
    rhs += fact(f, phi - l - rp, N - n) * fact(f, -be - k - rp, N - n) * fact(f, -phi - N, n) *
           fact(f, be - i - rp, n) * s * qbinom(f, N, n);
  }
  const bool ok = lhs == rhs;
  return detail::verdict("recgendown", t.to_string() + ",N=" + std::to_string(N), ok,
                         [&] { return "lhs = " + lhs.to_string() + "; rhs = " + rhs.to_string(); });
}

// Every orbit element: J_t(q) = J_{t'}(sigma(q)); plus the signed permutation form.
inline std::vector<Outcome> check_symmetry(const Params& p, const IndexTriple& t) {
  std::vector<Outcome> out;
  const LPoly& base = j_symbol(p, t)->poly;
  auto orbit = tetrahedral_orbit(p, t);
  out.push_back(detail::verdict("sym", t.to_string() + ",orbit-size", orbit.size() == 24,
                                [&] { return "orbit has " + std::to_string(orbit.size()) + " elements"; }));
  for (std::size_t e = 0; e < orbit.size(); ++e) {
    LPoly img = substitute(j_symbol(p, orbit[e].triple)->poly, orbit[e].subst);
    out.push_back(detail::verdict("sym", t.to_string() + ",g" + std::to_string(e), img == base,
                                  [&] { return orbit[e].triple.to_string() + ": " + img.to_string(); }));
  }
  std::array<int, 3> perm{0, 1, 2};
  do {
    int inversions = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        if (perm[a] > perm[b]) ++inversions;
    const int eps = inversions % 2 ? -1 : 1;
    Substitution s;
    for (int v = 0; v < 3; ++v) s[v + 1] = UnitMono::var(static_cast<Var>(perm[v] + 1), eps);
    const IndexTriple pt{t[perm[0]], t[perm[1]], t[perm[2]]};
    LPoly img = substitute(j_symbol(p, pt)->poly, s);
    out.push_back(detail::verdict(
        "sym", t.to_string() + ",perm" + std::to_string(perm[0]) + std::to_string(perm[1]) + std::to_string(perm[2]),
        img == base, [&] { return img.to_string(); }));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

inline std::vector<Outcome> check_overlap(const Params& p, const IndexTriple& t) {
  if (!(case1_applies(t) && case2_applies(t))) return {};
  const Field* f = field_for(p.rp);
  LPoly a = j_case1(f, t), b = j_case2(f, t);
  return {detail::verdict("overlap", t.to_string(), a == b, [&] { return a.to_string() + " vs " + b.to_string(); })};
}

inline std::vector<Outcome> check_boundary(const Params& p, const IndexTriple& t) {
  const Field* f = field_for(p.rp);
  const LPoly& j = j_symbol(p, t)->poly;
  if (t.sum() == p.rp) {
    LPoly b = boundary_low(f, t);
    return {detail::verdict("boundary", t.to_string() + ",low", b == j, [&] { return b.to_string(); })};
  }
  if (t.sum() == -p.rp) {
    LPoly b = boundary_high(f, t);
    return {detail::verdict("boundary", t.to_string() + ",high", b == j, [&] { return b.to_string(); })};
  }
  return {};
}

inline Outcome check_card(const Params& p) {
  const long long n = static_cast<long long>(hset_enumerate(p).size());
  const long long expect = hset_cardinality(p);
  return detail::verdict("card", "rp=" + std::to_string(p.rp), n == expect,
                         [&] { return std::to_string(n) + " != " + std::to_string(expect); });
}

inline Outcome check_theta(const Params& p, int k) {
  const Field* f = field_for(p.rp);
  LPoly v = theta_oracle(p, k);
  return detail::verdict("theta", "k=" + std::to_string(k), v == LPoly(f, 1LL), [&] { return v.to_string(); });
}

struct SuiteOptions {
  bool exhaustive = true;
  int samples = 100;
  uint64_t seed = 42;
  int jobs = 1;
  // r' >= 3 needs an explicit opt-in
  bool allow_large = false;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"card", "sym", "overlap", "boundary", "rec", "be", "ortho", "theta"};
  return names;
}

struct Report {
  int rp = 0;
  std::vector<Outcome> outcomes;

  bool all_pass() const {
    return std::all_of(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return o.pass; });
  }
  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return !o.pass; }));
  }

  std::string to_text() const {
    std::ostringstream os;
    for (const Outcome& o : outcomes) {
      os << (o.pass ? "PASS " : "FAIL ") << o.suite << " " << o.key << "\n";
      if (!o.pass) os << "  witness: " << o.witness << "\n";
    }
    os << "rp=" << rp << " instances=" << outcomes.size() << " failures=" << failures() << "\n";
    return os.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["rp"] = rp;
    j["instances"] = outcomes.size();
    j["failures"] = failures();
    auto& arr = j["results"] = nlohmann::json::array();
    for (const Outcome& o : outcomes) {
      nlohmann::json e{{"suite", o.suite}, {"key", o.key}, {"status", o.pass ? "pass" : "fail"}};
      if (!o.pass) e["witness"] = o.witness;
      arr.push_back(std::move(e));
    }
    return j;
  }
};

namespace detail {

using Task = std::function<std::vector<Outcome>()>;

inline std::vector<Outcome> run_tasks(const std::vector<Task>& tasks, int jobs) {
  std::vector<std::vector<Outcome>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < tasks.size();) results[k] = tasks[k]();
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<Outcome> out;
  for (auto& r : results)
    for (auto& o : r) out.push_back(std::move(o));
  return out;
}

template <class T>
std::vector<T> sample(const std::vector<T>& all, const SuiteOptions& opt, uint64_t salt) {
  if (opt.exhaustive) return all;
  std::mt19937_64 rng(opt.seed ^ salt);
  std::vector<T> out;
  for (int s = 0; s < opt.samples; ++s) out.push_back(all[rng() % all.size()]);
  return out;
}

}  // namespace detail

// Deterministic report over the selected suites; outcomes are sorted by (suite, key).
inline Report run_suite(const Params& p, const std::vector<std::string>& suites, const SuiteOptions& opt) {
  if (p.rp >= 3 && !opt.allow_large) throw DomainError("r' >= 3 requires an explicit budget opt-in");
  const int rp = p.rp;
  const auto hset = hset_enumerate(p);
  std::vector<detail::Task> tasks;
  auto want = [&](const std::string& s) { return std::find(suites.begin(), suites.end(), s) != suites.end(); };
  for (const auto& s : suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw DomainError("unknown suite " + s);

  if (want("card")) tasks.push_back([p] { return std::vector<Outcome>{check_card(p)}; });
  for (const IndexTriple& t : hset) {
    if (want("sym")) tasks.push_back([p, t] { return check_symmetry(p, t); });
    if (want("overlap")) tasks.push_back([p, t] { return check_overlap(p, t); });
    if (want("boundary")) tasks.push_back([p, t] { return check_boundary(p, t); });
  }
  if (want("rec")) {
    for (int i = -rp - 1; i <= rp; ++i)
      for (int j = -rp; j <= rp + 1; ++j)
        for (int k = -rp - 1; k <= rp + 1; ++k) tasks.push_back([p, i, j, k] { return std::vector<Outcome>{check_rec(p, {i, j, k})}; });
    for (const IndexTriple& t : hset)
      for (int N = 1; N <= std::max(2, rp); ++N) {
        if (t.sum() <= rp - N && t.i3 <= rp - N) tasks.push_back([p, t, N] { return std::vector<Outcome>{check_recgenup(p, t, N)}; });
        if (t.sum() >= N - rp && t.i3 >= N - rp)
          tasks.push_back([p, t, N] { return std::vector<Outcome>{check_recgendown(p, t, N)}; });
      }
  }
  if (want("be")) {
    std::vector<std::array<int, 6>> all;
    if (opt.exhaustive) {
      std::array<int, 6> v{};
      const int w = 2 * rp + 1;
      long long total = 1;
      for (int k = 0; k < 6; ++k) total *= w;
      for (long long code = 0; code < total; ++code) {
        long long c = code;
        for (int k = 5; k >= 0; --k, c /= w) v[k] = static_cast<int>(c % w) - rp;
        all.push_back(v);
      }
    } else {
      std::mt19937_64 rng(opt.seed);
      for (int s = 0; s < opt.samples; ++s) {
        const IndexTriple& t = hset[rng() % hset.size()];
        std::array<int, 6> v{t.i1, t.i2, t.i3, 0, 0, 0};
        for (int k = 3; k < 6; ++k) v[k] = static_cast<int>(rng() % (2 * rp + 1)) - rp;
        all.push_back(v);
      }
    }
    for (const auto& v : all) tasks.push_back([p, v] { return std::vector<Outcome>{check_be(p, v)}; });
  }
  if (want("ortho")) {
    std::vector<std::pair<IndexTriple, int>> all;
    if (opt.exhaustive) {
      for (const IndexTriple& t : hset)
        for (int a = -rp; a <= rp; ++a) all.emplace_back(t, a);
    } else {
      std::mt19937_64 rng(opt.seed + 1);
      for (int s = 0; s < opt.samples; ++s) {
        const IndexTriple& t = hset[rng() % hset.size()];
        all.emplace_back(t, static_cast<int>(rng() % (2 * rp + 1)) - rp);
      }
    }
    for (const auto& [t, a] : all) tasks.push_back([p, t, a] { return std::vector<Outcome>{check_ortho(p, t, a)}; });
  }
  if (want("theta"))
    for (int k = -rp; k <= rp; ++k) tasks.push_back([p, k] { return std::vector<Outcome>{check_theta(p, k)}; });

  Report rep{rp, detail::run_tasks(tasks, opt.jobs)};
  std::stable_sort(rep.outcomes.begin(), rep.outcomes.end(),
                   [](const Outcome& a, const Outcome& b) { return std::tie(a.suite, a.key) < std::tie(b.suite, b.key); });
  return rep;
}

}  // namespace sixj
