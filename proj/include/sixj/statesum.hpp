#pragma once

#include "sixj/homology.hpp"
#include "sixj/jpoly.hpp"
#include "sixj/numeric.hpp"
#include "sixj/triangulation.hpp"

#include <atomic>
#include <thread>
#include <unordered_map>

namespace sixj {

// Signs tying local tetrahedron data to the weight J_{h1,h2,h3}(phi1,phi2,phi3).
// height: sign of the outward height against the induced boundary loop of a face.
// root:   exponent sign of phi(a_i -> a_4) for a positively ordered tetrahedron.
struct Convention {
  int height = 1;
  int root = -1;
};

// Per-face loop data: outward height of (tet, face) = sign * bar(shift + sum coef * n).
struct FaceLoop {
  std::array<std::pair<int, int>, 3> terms;  // (edge class, coefficient)
  int sign = 1;
};

struct Geometry {
  Skeleton sk;
  std::vector<std::array<FaceLoop, 4>> loop;
};

inline Geometry geometry(const Triangulation& tri, const Convention& conv = {}) {
  Geometry g{analyze(tri), {}};
  g.loop.resize(tri.size());
  for (int t = 0; t < tri.size(); ++t)
    for (int f = 0; f < 4; ++f) {
      const auto v = face_verts(f);
      // p -> q -> s -> p
      const std::array<std::array<int, 3>, 3> steps = {{{v[0], v[1], 1}, {v[1], v[2], 1}, {v[0], v[2], -1}}};
      FaceLoop& fl = g.loop[t][f];
      for (int k = 0; k < 3; ++k) {
        const int e = edge_index(steps[k][0], steps[k][1]);
        fl.terms[k] = {g.sk.edge_class[t][e], steps[k][2] * g.sk.edge_sign[t][e]};
      }
      fl.sign = conv.height * g.sk.orient[t] * ((f % 2) ? -1 : 1);
    }
  return g;
}

// The dual cell complex: C0 = tetrahedra, C1 = face classes, C2 = edge classes.
inline FirstHomology dual_homology(const Triangulation& tri, const Geometry& g) {
  const Skeleton& sk = g.sk;
  IntMatrix d1 = int_zero(tri.size(), sk.n_faces), d2 = int_zero(sk.n_faces, sk.n_edges);
  for (int F = 0; F < sk.n_faces; ++F) {
    const auto [t, f] = sk.face_rep[F];
    d1[tri.tets[t].adj[f].tet][F] += 1;
    d1[t][F] -= 1;
    const FaceLoop& fl = g.loop[t][f];
    for (const auto& [e, c] : fl.terms) d2[F][e] += fl.sign * c;
  }
  return FirstHomology(std::move(d1), std::move(d2), tri.size(), sk.n_faces, sk.n_edges);
}

// --- rings ---

namespace detail {

inline int xi_log_of_unit_root(const CycNum& c, const Params& p) {
  for (int k = 0; k < p.r; ++k)
    if (c == CycNum::xi_power(c.field(), 2 * k)) return k;
  throw DomainError("coloring is not a 2-cycle: a face product is not an r-th root of unity");
}

inline bool admissible_value(const Root& g, const Params& p) {
  if (g.x != 0) return true;
  return !g.c.pow(2 * p.r).is_one();
}

}  // namespace detail

struct ExactRing {
  using Value = CycNum;
  using Result = CycNum;
  Params p;
  const Field* f;
  explicit ExactRing(const Params& pp) : p(pp), f(field_for(pp.rp)) {}
  int guard() const { return 0; }

  Value zero() const { return CycNum(f); }
  Value one() const { return CycNum(f, 1LL); }
  Value value(const Root& g) const {
    if (g.x != 0) throw DomainError("exact mode cannot carry the perturbation variable");
    return g.c;
  }
  Value bracket(const Root& g) const {
    const Value v = value(g);
    return v - v.inverse();
  }
  Value eval_j(const JPoly& j, const std::array<Root, 3>& pts) const {
    Point pt;
    for (int k = 0; k < 3; ++k) pt[k + 1] = value(pts[k]);
    return eval_at(j.poly, pt);
  }
};

struct PerturbedRing {
  using Value = LPoly;
  using Result = RFunc;
  Params p;
  const Field* f;
  explicit PerturbedRing(const Params& pp) : p(pp), f(field_for(pp.rp)) {}
  int guard() const { return 0; }

  Value zero() const { return LPoly(f); }
  Value one() const { return LPoly(f, 1LL); }
  Value value(const Root& g) const { return LPoly(f, Monomial::var(Var::X, g.x), g.c); }
  Value bracket(const Root& g) const { return value(g) - value(g.inverse()); }
  Value eval_j(const JPoly& j, const std::array<Root, 3>& pts) const {
    Specialization s;
    for (int k = 0; k < 3; ++k) s[k + 1] = ScaledMono{pts[k].c, Monomial::var(Var::X, pts[k].x)};
    return specialize(j.poly, s);
  }
};

struct NumericRing {
  using Value = ComplexBall;
  using Result = ComplexBall;
  Params p;
  unsigned bits;
  NumericRing(const Params& pp, unsigned b = 128) : p(pp), bits(b) {}
  PrecisionScope guard() const { return PrecisionScope(bits + 16); }

  Value zero() const { return ComplexBall(); }
  Value one() const { return ComplexBall(Rational(1)); }
  Value value(const Root& g) const {
    if (g.x != 0) throw DomainError("numeric mode cannot carry the perturbation variable");
    return to_complex(g.c, p, bits);
  }
  Value bracket(const Root& g) const {
    PrecisionScope scope(bits + 16);
    const Value v = value(g);
    return v - v.inverse();
  }
  Value eval_j(const JPoly& j, const std::array<Root, 3>& pts) const {
    PrecisionScope scope(bits + 16);
    std::array<Value, 3> z, zi;
    for (int k = 0; k < 3; ++k) {
      z[k] = value(pts[k]);
      zi[k] = z[k].inverse();
    }
    Value acc;
    for (const auto& [mono, c] : j.poly.terms()) {
      Value term = to_complex(c, p, bits);
      for (int k = 0; k < 3; ++k) {
        const int e = mono.e[k + 1];
        for (int s = 0; s < std::abs(e); ++s) term = term * (e > 0 ? z[k] : zi[k]);
      }
      acc = acc + term;
    }
    return acc;
  }
};

// --- coloring operations ---

inline bool coloring_admissible(const std::vector<Root>& g, const Params& p) {
  for (const auto& x : g)
    if (!detail::admissible_value(x, p)) return false;
  return true;
}

// Multiplies the coloring by the coboundary of vertex potentials y: g(u -> w) *= y_w / y_u.
inline std::vector<Root> shift_by_coboundary(const Skeleton& sk, std::vector<Root> g, const std::vector<Root>& y) {
  for (int e = 0; e < sk.n_edges; ++e) g[e] = g[e] * y[sk.edge_ends[e][1]] * y[sk.edge_ends[e][0]].inverse();
  return g;
}

// True when new^r / old^r is the coboundary of vertex potentials.
inline bool differs_by_coboundary(const Skeleton& sk, const std::vector<Root>& a, const std::vector<Root>& b,
                                  const Params& p) {
  const Field* f = field_for(p.rp);
  std::vector<std::optional<Root>> pot(sk.n_vertices);
  auto ratio = [&](int e) {
    Root q = b[e] * a[e].inverse();
    return Root{q.c.pow(p.r), q.x * p.r};
  };
  for (int start = 0; start < sk.n_vertices; ++start) {
    if (pot[start]) continue;
    pot[start] = Root{CycNum(f, 1LL), 0};
    bool grew = true;
    while (grew) {
      grew = false;
      for (int e = 0; e < sk.n_edges; ++e) {
        const int u = sk.edge_ends[e][0], w = sk.edge_ends[e][1];
        if (pot[u] && !pot[w]) {
          pot[w] = *pot[u] * ratio(e);
          grew = true;
        } else if (pot[w] && !pot[u]) {
          pot[u] = *pot[w] * ratio(e).inverse();
          grew = true;
        }
      }
    }
  }
  for (int e = 0; e < sk.n_edges; ++e)
    if (!(*pot[sk.edge_ends[e][1]] == *pot[sk.edge_ends[e][0]] * ratio(e))) return false;
  return true;
}

// Bad-ball elimination: rescales the edges leaving one bad vertex at a time.
inline std::vector<Root> make_admissible(const Skeleton& sk, std::vector<Root> g, const Params& p) {
  const Field* f = field_for(p.rp);
  const std::vector<long long> candidates = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  for (int v = 0; v < sk.n_vertices; ++v) {
    auto incident_bad = [&](const std::vector<Root>& h) {
      for (int e = 0; e < sk.n_edges; ++e)
        if ((sk.edge_ends[e][0] == v || sk.edge_ends[e][1] == v) && !detail::admissible_value(h[e], p)) return true;
      return false;
    };
    if (!incident_bad(g)) continue;
    bool fixed = false;
    for (long long c : candidates) {
      std::vector<Root> y(sk.n_vertices, Root{CycNum(f, 1LL), 0});
      y[v] = Root{CycNum(f, Rational(1, c)), 0};
      std::vector<Root> h = shift_by_coboundary(sk, g, y);
      if (!incident_bad(h)) {
        g = std::move(h);
        fixed = true;
        break;
      }
    }
    if (!fixed) throw DomainError("no admissible rescaling found at vertex " + std::to_string(v));
  }
  return g;
}

// Multiplies by the coboundary of X^{k_v}, k_v = v + 1; every edge then carries X.
inline std::vector<Root> perturb(const Skeleton& sk, const std::vector<Root>& g, const Params& p) {
  const Field* f = field_for(p.rp);
  std::vector<Root> y(sk.n_vertices);
  for (int v = 0; v < sk.n_vertices; ++v) y[v] = Root{CycNum(f, 1LL), v + 1};
  return shift_by_coboundary(sk, g, y);
}

// X -> X^2 on the coloring.
inline std::vector<Root> rho(std::vector<Root> g) {
  for (auto& x : g) x.x *= 2;
  return g;
}

// --- states ---

class StateSpace {
public:
  StateSpace(const Params& p, const Geometry& geo, std::vector<Root> roots, const Convention& conv = {})
      : p_(p), geo_(&geo), roots_(std::move(roots)), conv_(conv) {
    const Skeleton& sk = geo.sk;
    if (static_cast<int>(roots_.size()) != sk.n_edges) throw DomainError("coloring size does not match edges");
    const Field* f = field_for(p.rp);
    shift_.resize(geo.loop.size());
    for (std::size_t t = 0; t < geo.loop.size(); ++t)
      for (int fc = 0; fc < 4; ++fc) {
        Root prod{CycNum(f, 1LL), 0};
        for (const auto& [e, c] : geo.loop[t][fc].terms) prod = prod * (c > 0 ? roots_[e] : roots_[e].inverse());
        if (prod.x != 0) throw DomainError("coloring is not a 2-cycle: perturbation does not cancel on a face");
        shift_[t][fc] = detail::xi_log_of_unit_root(prod.c, p);
      }
  }

  const Params& params() const { return p_; }
  const Geometry& geometry() const { return *geo_; }
  const std::vector<Root>& roots() const { return roots_; }
  const Convention& convention() const { return conv_; }
  int edges() const { return geo_->sk.n_edges; }
  long long count() const {
    long long c = 1;
    for (int e = 0; e < edges(); ++e) c *= p_.r;
    return c;
  }

  // phi on edge class e at exponent n
  Root phi(int e, int n) const {
    return Root{roots_[e].c * CycNum::xi_power(roots_[e].c.field(), 2 * n), roots_[e].x};
  }

  int out_height(const std::vector<int>& n, int t, int f) const {
    const FaceLoop& fl = geo_->loop[t][f];
    int s = shift_[t][f];
    for (const auto& [e, c] : fl.terms) s += c * n[e];
    return fl.sign * bar_reduce(s, p_);
  }

  bool cycle_at(const std::vector<int>& n, int t) const {
    int s = 0;
    for (int f = 0; f < 4; ++f) s += out_height(n, t, f);
    return s == 0;
  }

  // Height 1-chain on face classes, reference orientation.
  std::vector<Integer> height_chain(const std::vector<int>& n) const {
    std::vector<Integer> h(geo_->sk.n_faces);
    for (int F = 0; F < geo_->sk.n_faces; ++F) {
      const auto [t, f] = geo_->sk.face_rep[F];
      h[F] = out_height(n, t, f);
    }
    return h;
  }

  // Triple and arguments of the weight at tetrahedron t for the vertex order `order`.
  std::pair<IndexTriple, std::array<Root, 3>> weight_args(const std::vector<int>& n, int t,
                                                         const Perm4& order = {0, 1, 2, 3}) const {
    const Skeleton& sk = geo_->sk;
    const int s = conv_.root * sk.orient[t] * perm_sign(order);
    IndexTriple tr{out_height(n, t, order[0]), out_height(n, t, order[1]), out_height(n, t, order[2])};
    std::array<Root, 3> args;
    for (int k = 0; k < 3; ++k) {
      const int a = order[k], b = order[3];
      const int le = edge_index(a, b);
      const int e = sk.edge_class[t][le];
      const int eps = s * sk.edge_sign[t][le] * (a < b ? 1 : -1);
      const Root v = phi(e, n[e]);
      args[k] = eps > 0 ? v : v.inverse();
    }
    return {tr, args};
  }

  template <class Ring>
  typename Ring::Value vertex_weight(const Ring& ring, const std::vector<int>& n, int t,
                                     const Perm4& order = {0, 1, 2, 3}) const {
    if (!cycle_at(n, t)) return ring.zero();
    auto [tr, args] = weight_args(n, t, order);
    return ring.eval_j(*j_symbol(p_, tr), args);
  }

private:
  Params p_;
  const Geometry* geo_;
  std::vector<Root> roots_;
  Convention conv_;
  std::vector<std::array<int, 4>> shift_;
};

// --- the state sum ---

template <class Value>
struct GradedSum {
  std::map<std::string, Value> graded;  // h1 class label -> unnormalized sum
  long long visited = 0, contributing = 0;
};

template <class Ring>
class StateSum {
public:
  using Value = typename Ring::Value;

  StateSum(const Ring& ring, const StateSpace& space, const Triangulation& tri)
      : ring_(ring), space_(space), homology_(dual_homology(tri, space.geometry())) {
    const Skeleton& sk = space.geometry().sk;
    const int n_tets = static_cast<int>(space.geometry().loop.size());
    // edge order: tetrahedron by tetrahedron, so cycle checks fire early
    std::vector<bool> placed(sk.n_edges, false);
    for (int t = 0; t < n_tets; ++t)
      for (int e = 0; e < 6; ++e) {
        const int c = sk.edge_class[t][e];
        if (!placed[c]) {
          placed[c] = true;
          order_.push_back(c);
        }
      }
    std::vector<int> depth_of(sk.n_edges);
    for (int d = 0; d < static_cast<int>(order_.size()); ++d) depth_of[order_[d]] = d;
    ready_.assign(order_.size(), {});
    for (int t = 0; t < n_tets; ++t) {
      int last = 0;
      for (int e = 0; e < 6; ++e) last = std::max(last, depth_of[sk.edge_class[t][e]]);
      ready_[last].push_back(t);
    }
    faces_ = sk.face_rep;
    const int rp = space.params().rp;
    brackets_.assign(sk.n_edges, {});
    for (int e = 0; e < sk.n_edges; ++e)
      for (int k = -rp; k <= rp; ++k)
        brackets_[e].push_back(sk.edge_in_link[e] ? ring_.one() : ring_.bracket(space.phi(e, k)));
  }

  const FirstHomology& homology() const { return homology_; }

  // Sum over states of prod_{non-link} {phi} * prod_x J(phi, x), grouped by h1 class.
  GradedSum<Value> fold(int jobs = 1) const {
    const int rp = space_.params().rp;
    const int width = 2 * rp + 1;
    std::vector<GradedSum<Value>> parts(width);
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int k; (k = next.fetch_add(1)) < width;) parts[k] = run_branch(k - rp);
    };
    const int threads = std::max(1, std::min(jobs, width));
    std::vector<std::thread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    GradedSum<Value> out;
    for (auto& part : parts) {
      out.visited += part.visited;
      out.contributing += part.contributing;
      for (auto& [cls, v] : part.graded) {
        auto it = out.graded.find(cls);
        if (it == out.graded.end())
          out.graded.emplace(cls, v);
        else
          it->second = it->second + v;
      }
    }
    return out;
  }

private:
  struct Memo {
    std::vector<std::unordered_map<long long, Value>> j;
    std::map<std::vector<int>, std::string> labels;
  };

  GradedSum<Value> run_branch(int first) const {
    GradedSum<Value> out;
    auto guard = ring_.guard();
    Memo memo;
    memo.j.resize(space_.geometry().loop.size());
    std::vector<int> n(space_.edges(), 0);
    std::vector<Value> partial(order_.size() + 1, ring_.one());
    descend(0, first, n, partial, memo, out);
    return out;
  }

  long long tet_key(const std::vector<int>& n, int t) const {
    const Skeleton& sk = space_.geometry().sk;
    long long key = 0;
    for (int e = 0; e < 6; ++e) key = key * space_.params().r + (n[sk.edge_class[t][e]] + space_.params().rp);
    return key;
  }

  void descend(int depth, int forced, std::vector<int>& n, std::vector<Value>& partial, Memo& memo,
               GradedSum<Value>& out) const {
    const int rp = space_.params().rp;
    if (depth == static_cast<int>(order_.size())) {
      ++out.visited;
      ++out.contributing;
      std::vector<int> h(faces_.size());
      for (std::size_t F = 0; F < faces_.size(); ++F) h[F] = space_.out_height(n, faces_[F].first, faces_[F].second);
      auto it = memo.labels.find(h);
      if (it == memo.labels.end())
        it = memo.labels.emplace(h, homology_.class_label(std::vector<Integer>(h.begin(), h.end()))).first;
      auto slot = out.graded.find(it->second);
      if (slot == out.graded.end())
        out.graded.emplace(it->second, partial[depth]);
      else
        slot->second = slot->second + partial[depth];
      return;
    }
    const int e = order_[depth];
    const int lo = depth == 0 ? forced : -rp, hi = depth == 0 ? forced : rp;
    for (int k = lo; k <= hi; ++k) {
      n[e] = k;
      Value acc = partial[depth] * brackets_[e][k + rp];
      bool alive = true;
      for (int t : ready_[depth]) {
        if (!space_.cycle_at(n, t)) {
          alive = false;
          break;
        }
        const long long key = tet_key(n, t);
        auto it = memo.j[t].find(key);
        if (it == memo.j[t].end()) it = memo.j[t].emplace(key, space_.vertex_weight(ring_, n, t)).first;
        acc = acc * it->second;
      }
      if (!alive) {
        out.visited += remaining(depth + 1);
        continue;
      }
      partial[depth + 1] = std::move(acc);
      descend(depth + 1, forced, n, partial, memo, out);
    }
    n[e] = 0;
  }

  long long remaining(int depth) const {
    long long c = 1;
    for (int d = depth; d < static_cast<int>(order_.size()); ++d) c *= space_.params().r;
    return c;
  }

  const Ring& ring_;
  const StateSpace& space_;
  FirstHomology homology_;
  std::vector<int> order_;
  std::vector<std::vector<int>> ready_;
  std::vector<std::vector<Value>> brackets_;
  std::vector<std::pair<int, int>> faces_;
};

// r^{-2N} * prod_{non-link} (-1)^{r'} / {g_e^r}
inline CycNum exact_normalization(const Params& p, const Skeleton& sk, const std::vector<Root>& g) {
  const Field* f = field_for(p.rp);
  CycNum num(f, Rational(1, 1)), den(f, 1LL);
  for (int k = 0; k < 2 * sk.n_vertices; ++k) num = num * CycNum(f, Rational(1, p.r));
  for (int e = 0; e < sk.n_edges; ++e) {
    if (sk.edge_in_link[e]) continue;
    if (p.rp % 2) num = -num;
    const CycNum gr = g[e].c.pow(p.r);
    den = den * (gr - gr.inverse());
  }
  if (den.is_zero()) throw DomainError("coloring is not admissible");
  return num * den.inverse();
}

inline RFunc perturbed_normalization(const Params& p, const Skeleton& sk, const std::vector<Root>& g) {
  const Field* f = field_for(p.rp);
  CycNum num(f, 1LL);
  for (int k = 0; k < 2 * sk.n_vertices; ++k) num = num * CycNum(f, Rational(1, p.r));
  LPoly den(f, 1LL);
  for (int e = 0; e < sk.n_edges; ++e) {
    if (sk.edge_in_link[e]) continue;
    if (p.rp % 2) num = -num;
    const Root gr{g[e].c.pow(p.r), g[e].x * p.r};
    const LPoly br = LPoly(f, Monomial::var(Var::X, gr.x), gr.c) - LPoly(f, Monomial::var(Var::X, -gr.x), gr.c.inverse());
    if (br.is_zero()) throw DomainError("perturbed coloring is not admissible");
    den = den * br;
  }
  return RFunc(LPoly(f, num), den);
}

enum class Mode { Exact, Numeric, Perturbed };

inline Mode parse_mode(const std::string& s) {
  if (s == "exact") return Mode::Exact;
  if (s == "numeric") return Mode::Numeric;
  if (s == "perturbed") return Mode::Perturbed;
  throw DomainError("unknown mode " + s);
}

// tau per h1 class, rendered in the ring's canonical text.
struct TauReport {
  Mode mode = Mode::Exact;
  std::map<std::string, CycNum> exact;
  std::map<std::string, ComplexBall> numeric;
  std::map<std::string, RFunc> perturbed;
  std::optional<CycNum> exact_total;
  std::optional<ComplexBall> numeric_total;
  std::optional<RFunc> perturbed_total;
  long long visited = 0, contributing = 0;
  std::string homology;
};

struct TauOptions {
  Mode mode = Mode::Exact;
  int jobs = 1;
  unsigned bits = 128;
  Convention conv;
};

inline TauReport compute_tau(const Params& p, const Triangulation& tri, const std::vector<Root>& roots,
                             const TauOptions& opt = {}) {
  const Geometry geo = geometry(tri, opt.conv);
  const StateSpace space(p, geo, roots, opt.conv);
  TauReport rep;
  rep.mode = opt.mode;
  auto collect = [&](auto& ring, auto&& scale, auto& graded, auto& total) {
    StateSum<std::decay_t<decltype(ring)>> sum(ring, space, tri);
    rep.homology = sum.homology().to_string();
    auto folded = sum.fold(opt.jobs);
    rep.visited = folded.visited;
    rep.contributing = folded.contributing;
    for (auto& [cls, v] : folded.graded) {
      auto value = scale(v);
      graded.emplace(cls, value);
      total = total ? *total + value : value;
    }
    if (!total) total = scale(ring.zero());
  };
  switch (opt.mode) {
    case Mode::Exact: {
      if (!coloring_admissible(roots, p)) throw DomainError("coloring is not admissible; perturb it first");
      ExactRing ring(p);
      const CycNum k = exact_normalization(p, geo.sk, roots);
      collect(ring, [&](const CycNum& v) { return v * k; }, rep.exact, rep.exact_total);
      break;
    }
    case Mode::Numeric: {
      if (!coloring_admissible(roots, p)) throw DomainError("coloring is not admissible; perturb it first");
      NumericRing ring(p, opt.bits);
      const ComplexBall k = to_complex(exact_normalization(p, geo.sk, roots), p, opt.bits);
      collect(ring, [&](const ComplexBall& v) { PrecisionScope s(opt.bits + 16); return v * k; }, rep.numeric,
              rep.numeric_total);
      break;
    }
    case Mode::Perturbed: {
      if (!coloring_admissible(roots, p)) throw DomainError("coloring is not admissible in the perturbed ring");
      PerturbedRing ring(p);
      const RFunc k = perturbed_normalization(p, geo.sk, roots);
      collect(ring, [&](const LPoly& v) { return RFunc(v) * k; }, rep.perturbed, rep.perturbed_total);
      break;
    }
  }
  return rep;
}

// An RFunc that reduces to a constant of Q(xi).
inline std::optional<CycNum> constant_value(const RFunc& x) {
  auto q = x.as_lpoly();
  if (!q || !q->is_constant()) return std::nullopt;
  return q->constant_term();
}

}  // namespace sixj
