#pragma once

#include "sixj/cyclotomic.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <deque>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>

namespace sixj {

using Perm4 = std::array<int, 4>;

inline constexpr std::array<std::array<int, 2>, 6> kEdgeVerts = {{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

inline int edge_index(int a, int b) {
  if (a > b) std::swap(a, b);
  for (int e = 0; e < 6; ++e)
    if (kEdgeVerts[e][0] == a && kEdgeVerts[e][1] == b) return e;
  throw DomainError("not an edge of a tetrahedron");
}

inline int perm_sign(const Perm4& p) {
  int s = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

inline Perm4 perm_inverse(const Perm4& p) {
  Perm4 q{};
  for (int i = 0; i < 4; ++i) q[p[i]] = i;
  return q;
}

// (a o b)(i) = a[b[i]]
inline Perm4 perm_compose(const Perm4& a, const Perm4& b) {
  Perm4 c{};
  for (int i = 0; i < 4; ++i) c[i] = a[b[i]];
  return c;
}

// Ascending local vertices of the face opposite f.
inline std::array<int, 3> face_verts(int f) {
  std::array<int, 3> v{};
  int k = 0;
  for (int i = 0; i < 4; ++i)
    if (i != f) v[k++] = i;
  return v;
}

// A root representative c * X^x of a coloring value.
struct Root {
  CycNum c;
  int x = 0;

  Root inverse() const { return {c.inverse(), -x}; }
  friend Root operator*(const Root& a, const Root& b) { return {a.c * b.c, a.x + b.x}; }
  friend bool operator==(const Root& a, const Root& b) { return a.x == b.x && a.c == b.c; }
};

struct Gluing {
  int tet = -1;
  Perm4 perm{};  // local vertices of this tetrahedron -> local vertices of tet
};

struct Tet {
  std::array<Gluing, 4> adj;
  std::uint8_t link = 0;          // bit e set when local edge e lies in the link
  std::array<Root, 6> root;       // coloring on local edges, oriented low -> high
  bool colored = false;
};

// Gluing data of a closed triangulation together with its Hamiltonian link and coloring.
struct Triangulation {
  std::vector<Tet> tets;

  int size() const { return static_cast<int>(tets.size()); }
  bool in_link(int t, int e) const { return (tets[t].link >> e) & 1; }

  // value on the oriented local edge a -> b
  Root directed_root(int t, int a, int b) const {
    const Root& g = tets[t].root[edge_index(a, b)];
    return a < b ? g : g.inverse();
  }

  void glue(int t, int f, int u, const Perm4& perm) {
    tets[t].adj[f] = {u, perm};
    tets[u].adj[perm[f]] = {t, perm_inverse(perm)};
  }
};

// Cell structure derived from the gluings. Classes are numbered by their
// lexicographically smallest representative; that representative fixes the
// reference orientation.
struct Skeleton {
  int n_vertices = 0, n_edges = 0, n_faces = 0;
  std::vector<std::array<int, 4>> vertex_class;
  std::vector<std::array<int, 6>> edge_class, edge_sign;
  std::vector<std::array<int, 4>> face_class, face_sign;
  std::vector<std::pair<int, int>> edge_rep, face_rep;
  std::vector<std::array<int, 2>> edge_ends;  // vertex classes at the tail/head
  std::vector<int> edge_degree;
  std::vector<bool> edge_in_link;
  std::vector<int> orient;
  bool closed = true, orientable = true, link_consistent = true;
};

namespace detail {

struct SignedUnionFind {
  std::vector<int> parent, parity;
  explicit SignedUnionFind(int n) : parent(n), parity(n, 0) { std::iota(parent.begin(), parent.end(), 0); }
  std::pair<int, int> find(int x) {
    int par = 0, root = x;
    while (parent[root] != root) {
      par ^= parity[root];
      root = parent[root];
    }
    // path compression with parity
    int cur = x, cur_par = par;
    while (parent[cur] != cur) {
      int next = parent[cur], next_par = cur_par ^ parity[cur];
      parent[cur] = root;
      parity[cur] = cur_par;
      cur = next;
      cur_par = next_par;
    }
    return {root, par};
  }
  // returns false on parity conflict
  bool unite(int a, int b, int rel) {
    auto [ra, pa] = find(a);
    auto [rb, pb] = find(b);
    if (ra == rb) return (pa ^ pb) == rel;
    if (ra < rb) {
      parent[rb] = ra;
      parity[rb] = pa ^ pb ^ rel;
    } else {
      parent[ra] = rb;
      parity[ra] = pa ^ pb ^ rel;
    }
    return true;
  }
};

}  // namespace detail

inline Skeleton analyze(const Triangulation& tri) {
  const int n = tri.size();
  Skeleton sk;
  detail::SignedUnionFind vuf(4 * n), euf(6 * n);
  for (int t = 0; t < n; ++t)
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = tri.tets[t].adj[f];
      if (g.tet < 0) {
        sk.closed = false;
        continue;
      }
      for (int v : face_verts(f)) vuf.unite(4 * t + v, 4 * g.tet + g.perm[v], 0);
      const auto fv = face_verts(f);
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          const int a = fv[i], b = fv[j], pa = g.perm[a], pb = g.perm[b];
          if (!euf.unite(6 * t + edge_index(a, b), 6 * g.tet + edge_index(pa, pb), pa > pb ? 1 : 0))
            sk.orientable = false;
        }
    }

  {
    std::map<int, int> id;
    sk.vertex_class.assign(n, {});
    for (int k = 0; k < 4 * n; ++k) {
      auto it = id.emplace(vuf.find(k).first, static_cast<int>(id.size())).first;
      sk.vertex_class[k / 4][k % 4] = it->second;
    }
    sk.n_vertices = static_cast<int>(id.size());
  }
  {
    std::map<int, int> id;
    sk.edge_class.assign(n, {});
    sk.edge_sign.assign(n, {});
    for (int k = 0; k < 6 * n; ++k) {
      auto [root, par] = euf.find(k);
      auto [it, fresh] = id.emplace(root, static_cast<int>(id.size()));
      if (fresh) sk.edge_rep.push_back({k / 6, k % 6});
      sk.edge_class[k / 6][k % 6] = it->second;
      sk.edge_sign[k / 6][k % 6] = par ? -1 : 1;
    }
    sk.n_edges = static_cast<int>(id.size());
  }
  // make every sign relative to the representative's orientation
  {
    const auto raw = sk.edge_sign;
    for (int t = 0; t < n; ++t)
      for (int e = 0; e < 6; ++e) {
        const auto [rt, re] = sk.edge_rep[sk.edge_class[t][e]];
        sk.edge_sign[t][e] = raw[t][e] * raw[rt][re];
      }
  }

  sk.edge_ends.assign(sk.n_edges, {-1, -1});
  sk.edge_degree.assign(sk.n_edges, 0);
  sk.edge_in_link.assign(sk.n_edges, false);
  std::vector<int> link_seen(sk.n_edges, -1);
  for (int t = 0; t < n; ++t)
    for (int e = 0; e < 6; ++e) {
      const int c = sk.edge_class[t][e];
      ++sk.edge_degree[c];
      int a = sk.vertex_class[t][kEdgeVerts[e][0]], b = sk.vertex_class[t][kEdgeVerts[e][1]];
      if (sk.edge_sign[t][e] < 0) std::swap(a, b);
      sk.edge_ends[c] = {a, b};
      const int in = tri.in_link(t, e) ? 1 : 0;
      if (link_seen[c] >= 0 && link_seen[c] != in) sk.link_consistent = false;
      link_seen[c] = in;
      if (in) sk.edge_in_link[c] = true;
    }

  sk.face_class.assign(n, {});
  sk.face_sign.assign(n, {});
  for (auto& fc : sk.face_class) fc.fill(-1);
  for (int t = 0; t < n; ++t)
    for (int f = 0; f < 4; ++f) {
      if (sk.face_class[t][f] >= 0) continue;
      const int id = sk.n_faces++;
      sk.face_rep.push_back({t, f});
      sk.face_class[t][f] = id;
      sk.face_sign[t][f] = 1;
      const Gluing& g = tri.tets[t].adj[f];
      if (g.tet >= 0) {
        sk.face_class[g.tet][g.perm[f]] = id;
        sk.face_sign[g.tet][g.perm[f]] = -1;
      }
    }

  sk.orient.assign(n, 0);
  for (int start = 0; start < n; ++start) {
    if (sk.orient[start]) continue;
    sk.orient[start] = 1;
    std::deque<int> queue{start};
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop_front();
      for (int f = 0; f < 4; ++f) {
        const Gluing& g = tri.tets[t].adj[f];
        if (g.tet < 0) continue;
        const int want = -perm_sign(g.perm) * sk.orient[t];
        if (!sk.orient[g.tet]) {
          sk.orient[g.tet] = want;
          queue.push_back(g.tet);
        } else if (sk.orient[g.tet] != want) {
          sk.orientable = false;
        }
      }
    }
  }
  return sk;
}

struct ValidationReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
  std::string to_text() const {
    if (ok()) return "valid\n";
    std::string s;
    for (const auto& p : problems) s += "invalid: " + p + "\n";
    return s;
  }
};

inline ValidationReport validate(const Triangulation& tri) {
  ValidationReport rep;
  if (tri.size() == 0) rep.problems.push_back("no tetrahedra");
  for (int t = 0; t < tri.size(); ++t)
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = tri.tets[t].adj[f];
      if (g.tet < 0) {
        rep.problems.push_back("face " + std::to_string(f) + " of tetrahedron " + std::to_string(t) + " is not glued");
        continue;
      }
      if (g.tet == t && g.perm[f] == f) rep.problems.push_back("face glued to itself in tetrahedron " + std::to_string(t));
      const Gluing& back = tri.tets[g.tet].adj[g.perm[f]];
      if (back.tet != t || back.perm != perm_inverse(g.perm))
        rep.problems.push_back("asymmetric gluing at tetrahedron " + std::to_string(t) + " face " + std::to_string(f));
    }
  if (!rep.ok()) return rep;
  const Skeleton sk = analyze(tri);
  if (!sk.orientable) rep.problems.push_back("triangulation is not orientable");
  if (!sk.link_consistent) rep.problems.push_back("link marks disagree within an edge class");
  for (int e = 0; e < sk.n_edges; ++e)
    if (sk.edge_ends[e][0] == sk.edge_ends[e][1])
      rep.problems.push_back("edge " + std::to_string(e) + " is a loop (not quasi-regular)");
  // faces of the skeleton separate two distinct balls iff edges have distinct ends
  std::vector<int> link_degree(sk.n_vertices, 0);
  for (int e = 0; e < sk.n_edges; ++e)
    if (sk.edge_in_link[e]) {
      ++link_degree[sk.edge_ends[e][0]];
      ++link_degree[sk.edge_ends[e][1]];
    }
  for (int v = 0; v < sk.n_vertices; ++v)
    if (link_degree[v] != 2)
      rep.problems.push_back("vertex " + std::to_string(v) + " lies on " + std::to_string(link_degree[v]) +
                             " link edges (not Hamiltonian)");
  if (sk.n_vertices - sk.n_edges + sk.n_faces - tri.size() != 0) rep.problems.push_back("Euler characteristic is not 0");
  return rep;
}

// Class-level coloring: one root per edge class on its reference orientation.
inline std::vector<Root> class_roots(const Triangulation& tri, const Skeleton& sk) {
  std::vector<Root> g(sk.n_edges);
  for (int c = 0; c < sk.n_edges; ++c) {
    const auto [t, e] = sk.edge_rep[c];
    if (!tri.tets[t].colored) throw DomainError("triangulation carries no coloring");
    g[c] = tri.tets[t].root[e];
  }
  return g;
}

// Writes class-level roots back onto every tetrahedron.
inline void set_class_roots(Triangulation& tri, const Skeleton& sk, const std::vector<Root>& g) {
  for (int t = 0; t < tri.size(); ++t) {
    for (int e = 0; e < 6; ++e) {
      const Root& r = g[sk.edge_class[t][e]];
      tri.tets[t].root[e] = sk.edge_sign[t][e] > 0 ? r : r.inverse();
    }
    tri.tets[t].colored = true;
  }
}

// --- moves ---

namespace detail {

// External face of a new tetrahedron and where it came from.
struct Provenance {
  int new_tet, new_face;
  int old_tet, old_face;
  Perm4 to_old;  // new local -> old local
};

struct InnerGluing {
  int a, fa, b;
  Perm4 perm;
};

// Replaces the tetrahedra in `removed` by `fresh`, rewiring the outer gluings.
inline Triangulation rebuild(const Triangulation& tri, const std::set<int>& removed, std::vector<Tet> fresh,
                             const std::vector<Provenance>& prov, const std::vector<InnerGluing>& inner) {
  std::vector<int> renum(tri.size(), -1);
  Triangulation out;
  for (int t = 0; t < tri.size(); ++t)
    if (!removed.count(t)) {
      renum[t] = out.size();
      out.tets.push_back(tri.tets[t]);
    }
  const int base = out.size();
  for (auto& nt : fresh) out.tets.push_back(std::move(nt));
  for (int t = 0; t < base; ++t)
    for (auto& g : out.tets[t].adj)
      if (g.tet >= 0) g.tet = removed.count(g.tet) ? -2 : renum[g.tet];
  std::map<std::pair<int, int>, const Provenance*> by_old;
  for (const auto& p : prov) by_old[{p.old_tet, p.old_face}] = &p;
  for (const auto& p : prov) {
    const Gluing& og = tri.tets[p.old_tet].adj[p.old_face];
    const Perm4 through = perm_compose(og.perm, p.to_old);  // new local -> partner local
    if (!removed.count(og.tet)) {
      out.glue(base + p.new_tet, p.new_face, renum[og.tet], through);
    } else {
      auto it = by_old.find({og.tet, og.perm[p.old_face]});
      if (it == by_old.end()) throw DomainError("move rewiring lost a face");
      const Provenance& q = *it->second;
      out.glue(base + p.new_tet, p.new_face, base + q.new_tet, perm_compose(perm_inverse(q.to_old), through));
    }
  }
  for (const auto& ig : inner) out.glue(base + ig.a, ig.fa, base + ig.b, ig.perm);
  for (int t = 0; t < out.size(); ++t)
    for (const auto& g : out.tets[t].adj)
      if (g.tet < 0) throw DomainError("move left an unglued face");
  return out;
}

inline std::uint8_t link_bit(const Triangulation& tri, int t, int a, int b) {
  return tri.in_link(t, edge_index(a, b)) ? 1 : 0;
}

}  // namespace detail

// Two tetrahedra sharing the face class `face` become three around a new edge.
inline Triangulation pachner_23(const Triangulation& tri, int face) {
  const Skeleton sk = analyze(tri);
  if (face < 0 || face >= sk.n_faces) throw DomainError("no face class " + std::to_string(face));
  const auto [A, fa] = sk.face_rep[face];
  const Gluing& g = tri.tets[A].adj[fa];
  const int B = g.tet, fb = g.perm[fa];
  if (B == A) throw DomainError("2-3 move needs two distinct tetrahedra");
  if (sk.vertex_class[A][fa] == sk.vertex_class[B][fb]) throw DomainError("2-3 move would create a loop edge");
  const auto x = face_verts(fa);
  const Perm4& pi = g.perm;
  std::vector<Tet> fresh(3);
  std::vector<detail::Provenance> prov;
  // new edge a -> b, through x0
  const Root ab = tri.directed_root(A, fa, x[0]) * tri.directed_root(B, pi[x[0]], fb);
  for (int k = 0; k < 3; ++k) {
    const int xk = x[k], xk1 = x[(k + 1) % 3], xk2 = x[(k + 2) % 3];
    Tet& nt = fresh[k];
    // local order (a, b, x_k, x_{k+1})
    auto root_of = [&](int l1, int l2) -> Root {
      auto side = [&](int l) { return l == 0 ? fa : l == 2 ? xk : xk1; };
      if (l1 == 0 && l2 == 1) return ab;
      if (l1 == 1) return tri.directed_root(B, fb, pi[side(l2)]);
      return tri.directed_root(A, side(l1), side(l2));
    };
    auto link_of = [&](int l1, int l2) -> std::uint8_t {
      auto side = [&](int l) { return l == 0 ? fa : l == 2 ? xk : xk1; };
      if (l1 == 0 && l2 == 1) return 0;
      if (l1 == 1) return detail::link_bit(tri, B, fb, pi[side(l2)]);
      return detail::link_bit(tri, A, side(l1), side(l2));
    };
    for (int e = 0; e < 6; ++e) {
      nt.root[e] = root_of(kEdgeVerts[e][0], kEdgeVerts[e][1]);
      nt.link |= static_cast<std::uint8_t>(link_of(kEdgeVerts[e][0], kEdgeVerts[e][1]) << e);
    }
    nt.colored = tri.tets[A].colored && tri.tets[B].colored;
    prov.push_back({k, 1, A, xk2, Perm4{fa, xk2, xk, xk1}});
    prov.push_back({k, 0, B, pi[xk2], Perm4{pi[xk2], fb, pi[xk], pi[xk1]}});
  }
  std::vector<detail::InnerGluing> inner;
  for (int k = 0; k < 3; ++k) inner.push_back({k, 2, (k + 1) % 3, Perm4{0, 1, 3, 2}});
  return detail::rebuild(tri, {A, B}, std::move(fresh), prov, inner);
}

// Three tetrahedra around an edge class of degree three become two.
inline Triangulation pachner_32(const Triangulation& tri, int edge) {
  const Skeleton sk = analyze(tri);
  if (edge < 0 || edge >= sk.n_edges) throw DomainError("no edge class " + std::to_string(edge));
  if (sk.edge_degree[edge] != 3) throw DomainError("3-2 move needs an edge of degree three");
  if (sk.edge_in_link[edge]) throw DomainError("3-2 move cannot remove a link edge");
  struct Around {
    int tet, a, b, u, w;
  };
  std::vector<Around> ring;
  {
    const auto [t0, e0] = sk.edge_rep[edge];
    int a = kEdgeVerts[e0][0], b = kEdgeVerts[e0][1];
    std::vector<int> rest;
    for (int v = 0; v < 4; ++v)
      if (v != a && v != b) rest.push_back(v);
    Around cur{t0, a, b, rest[0], rest[1]};
    for (int step = 0; step < 3; ++step) {
      ring.push_back(cur);
      // face (a, b, w) is opposite u
      const Gluing& g = tri.tets[cur.tet].adj[cur.u];
      Around nx{g.tet, g.perm[cur.a], g.perm[cur.b], g.perm[cur.w], -1};
      for (int v = 0; v < 4; ++v)
        if (v != nx.a && v != nx.b && v != nx.u) nx.w = v;
      cur = nx;
    }
    if (cur.tet != ring[0].tet || cur.a != ring[0].a || cur.u != ring[0].u)
      throw DomainError("edge neighbourhood is not a ring of three");
  }
  std::set<int> removed;
  for (const auto& r : ring) removed.insert(r.tet);
  if (removed.size() != 3) throw DomainError("3-2 move needs three distinct tetrahedra");
  // new tetrahedra P = (a, y0, y1, y2), Q = (b, y0, y1, y2) with y_j = u_j
  std::vector<Tet> fresh(2);
  std::vector<detail::Provenance> prov;
  for (int side = 0; side < 2; ++side) {
    Tet& nt = fresh[side];
    auto apex = [&](const Around& r) { return side == 0 ? r.a : r.b; };
    for (int e = 0; e < 6; ++e) {
      const int l1 = kEdgeVerts[e][0], l2 = kEdgeVerts[e][1];
      int t, v1, v2;
      if (l1 == 0) {
        const Around& r = ring[l2 - 1];
        t = r.tet;
        v1 = apex(r);
        v2 = r.u;
      } else {
        // y_{l1-1} -> y_{l2-1}; ring j holds u_j -> w_j = y_j -> y_{j+1}
        const int j1 = l1 - 1, j2 = l2 - 1;
        if (j2 == (j1 + 1) % 3) {
          t = ring[j1].tet, v1 = ring[j1].u, v2 = ring[j1].w;
        } else {
          t = ring[j2].tet, v1 = ring[j2].w, v2 = ring[j2].u;
        }
      }
      nt.root[e] = tri.directed_root(t, v1, v2);
      nt.link |= static_cast<std::uint8_t>(detail::link_bit(tri, t, v1, v2) << e);
    }
    nt.colored = true;
    for (const auto& r : ring) nt.colored = nt.colored && tri.tets[r.tet].colored;
    for (int k = 0; k < 3; ++k) {
      const Around& r = ring[k];
      // face of ring k opposite the other apex; P local y_k = k+1, y_{k+1} = k+2, y_{k+2} opposite
      Perm4 to_old{};
      to_old[0] = apex(r);
      to_old[k + 1] = r.u;
      to_old[(k + 1) % 3 + 1] = r.w;
      to_old[(k + 2) % 3 + 1] = side == 0 ? r.b : r.a;
      prov.push_back({side, (k + 2) % 3 + 1, r.tet, side == 0 ? r.b : r.a, to_old});
    }
  }
  return detail::rebuild(tri, removed, std::move(fresh), prov, {{0, 0, 1, Perm4{0, 1, 2, 3}}});
}

// Opens the faces of tetrahedron t opposite f and g into a pillow filled by two tetrahedra.
inline Triangulation lune_insert(const Triangulation& tri, int t, int f, int g) {
  if (t < 0 || t >= tri.size() || f == g || f < 0 || f > 3 || g < 0 || g > 3)
    throw DomainError("lune insertion needs a tetrahedron and two distinct faces");
  Triangulation out = tri;
  const Gluing gf = tri.tets[t].adj[f], gg = tri.tets[t].adj[g];
  if (gf.tet == t || gg.tet == t) throw DomainError("lune insertion on self-glued faces is not supported");
  {
    int p = -1, q = -1;
    for (int v = 0; v < 4; ++v)
      if (v != f && v != g) (p < 0 ? p : q) = v;
    if (tri.in_link(t, edge_index(p, q))) throw DomainError("lune insertion would double a link edge");
  }
  Tet a = tri.tets[t];
  a.link &= static_cast<std::uint8_t>(~(1u << edge_index(f, g)));
  Tet b = a;
  const int A = out.size(), B = A + 1;
  out.tets.push_back(a);
  out.tets.push_back(b);
  out.glue(t, f, A, Perm4{0, 1, 2, 3});
  out.glue(t, g, A, Perm4{0, 1, 2, 3});
  out.glue(B, f, gf.tet, gf.perm);
  out.glue(B, g, gg.tet, gg.perm);
  for (int v = 0; v < 4; ++v)
    if (v != f && v != g) out.glue(A, v, B, Perm4{0, 1, 2, 3});
  return out;
}

// Removes two tetrahedra sharing two faces and glues their remaining faces in pairs.
inline Triangulation lune_remove(const Triangulation& tri, int A, int B) {
  if (A == B || A < 0 || B < 0 || A >= tri.size() || B >= tri.size()) throw DomainError("lune needs two tetrahedra");
  std::vector<int> shared;
  for (int f = 0; f < 4; ++f)
    if (tri.tets[A].adj[f].tet == B) shared.push_back(f);
  if (shared.size() != 2) throw DomainError("the tetrahedra do not share exactly two faces");
  const int u = shared[0], v = shared[1];
  const Perm4 p1 = tri.tets[A].adj[u].perm, p2 = tri.tets[A].adj[v].perm;
  std::vector<int> free;
  for (int k = 0; k < 4; ++k)
    if (k != u && k != v) free.push_back(k);
  for (int k : free)
    if (p1[k] != p2[k]) throw DomainError("the two shared faces do not meet along a common edge");
  const Skeleton sk = analyze(tri);
  const int inner = sk.edge_class[A][edge_index(free[0], free[1])];
  if (sk.edge_degree[inner] != 2) throw DomainError("the lune's inner edge has degree other than two");
  if (sk.edge_in_link[inner]) throw DomainError("the lune's inner edge lies in the link");
  Perm4 tau{};  // A local -> B local
  tau[u] = p2[u];
  tau[v] = p1[v];
  for (int k : free) tau[k] = p1[k];
  Triangulation work = tri;
  std::vector<std::pair<Gluing, Gluing>> pairs;
  for (int w : free) {
    const Gluing ca = tri.tets[A].adj[w], db = tri.tets[B].adj[tau[w]];
    if (ca.tet == A || ca.tet == B || db.tet == A || db.tet == B)
      throw DomainError("lune faces are glued back into the lune");
    pairs.push_back({ca, db});
    // partner C face = ca.perm[w], local c -> A local -> B local -> D local
    const Perm4 c_to_d = perm_compose(db.perm, perm_compose(tau, perm_inverse(ca.perm)));
    work.glue(ca.tet, ca.perm[w], db.tet, c_to_d);
  }
  Triangulation out;
  std::vector<int> renum(tri.size(), -1);
  for (int t = 0; t < tri.size(); ++t)
    if (t != A && t != B) {
      renum[t] = out.size();
      out.tets.push_back(work.tets[t]);
    }
  for (auto& tet : out.tets)
    for (auto& gl : tet.adj) gl.tet = renum[gl.tet];
  // the two copies of the pillow's middle edge merge; carry consistent roots
  const Skeleton nsk = analyze(out);
  bool colored = true;
  for (const auto& tet : out.tets) colored = colored && tet.colored;
  if (colored) set_class_roots(out, nsk, class_roots(out, nsk));
  return out;
}

// Combinatorial isomorphism including link marks.
inline bool isomorphic(const Triangulation& x, const Triangulation& y) {
  if (x.size() != y.size()) return false;
  const int n = x.size();
  if (n == 0) return true;
  Perm4 p{0, 1, 2, 3};
  for (int t0 = 0; t0 < n; ++t0) {
    std::sort(p.begin(), p.end());
    do {
      std::vector<int> image(n, -1);
      std::vector<Perm4> perm(n);
      image[0] = t0;
      perm[0] = p;
      std::deque<int> queue{0};
      bool ok = true;
      while (ok && !queue.empty()) {
        const int t = queue.front();
        queue.pop_front();
        const int s = image[t];
        for (int e = 0; e < 6 && ok; ++e) {
          const int a = perm[t][kEdgeVerts[e][0]], b = perm[t][kEdgeVerts[e][1]];
          if (x.in_link(t, e) != y.in_link(s, edge_index(a, b))) ok = false;
        }
        for (int f = 0; f < 4 && ok; ++f) {
          const Gluing& gx = x.tets[t].adj[f];
          const Gluing& gy = y.tets[s].adj[perm[t][f]];
          // local of gx.tet -> local of gy.tet
          const Perm4 want = perm_compose(gy.perm, perm_compose(perm[t], perm_inverse(gx.perm)));
          if (image[gx.tet] < 0) {
            image[gx.tet] = gy.tet;
            perm[gx.tet] = want;
            queue.push_back(gx.tet);
          } else if (image[gx.tet] != gy.tet || perm[gx.tet] != want) {
            ok = false;
          }
        }
      }
      std::set<int> hit(image.begin(), image.end());
      if (ok && hit.size() == static_cast<std::size_t>(n) && !hit.count(-1)) return true;
    } while (std::next_permutation(p.begin(), p.end()));
  }
  return false;
}

// --- JSON ---

struct LoadedTriangulation {
  Triangulation tri;
  std::string mode = "exact";
  bool has_coloring = false;
};

inline LoadedTriangulation triangulation_from_json(const nlohmann::json& j, const Field* f) {
  LoadedTriangulation out;
  const int n = j.at("tetrahedra").get<int>();
  if (n <= 0) throw DomainError("tetrahedra must be positive");
  out.tri.tets.resize(n);
  for (const auto& g : j.at("gluings")) {
    const int a = g.at("tet"), fa = g.at("face"), b = g.at("to_tet"), fb = g.at("to_face");
    if (a < 0 || a >= n || b < 0 || b >= n || fa < 0 || fa > 3 || fb < 0 || fb > 3)
      throw DomainError("gluing refers to a missing tetrahedron or face");
    const auto vm = g.at("vertex_map").get<std::vector<int>>();
    if (vm.size() != 3) throw DomainError("vertex_map needs three entries");
    Perm4 p{};
    p[fa] = fb;
    const auto fv = face_verts(fa);
    for (int k = 0; k < 3; ++k) p[fv[k]] = vm[k];
    Perm4 sorted = p;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != Perm4{0, 1, 2, 3}) throw DomainError("vertex_map is not a bijection onto the target face");
    const Gluing& old = out.tri.tets[a].adj[fa];
    if (old.tet >= 0 && (old.tet != b || old.perm != p)) throw DomainError("face glued twice inconsistently");
    const Gluing& back = out.tri.tets[b].adj[fb];
    if (back.tet >= 0 && (back.tet != a || back.perm != perm_inverse(p)))
      throw DomainError("face glued twice inconsistently");
    out.tri.glue(a, fa, b, p);
  }
  for (const auto& le : j.value("link_edges", nlohmann::json::array())) {
    const int t = le.at(0), e = le.at(1);
    if (t < 0 || t >= n || e < 0 || e > 5) throw DomainError("link edge out of range");
    out.tri.tets[t].link |= static_cast<std::uint8_t>(1u << e);
  }
  // propagate link marks over edge classes
  bool closed = true;
  for (const auto& tet : out.tri.tets)
    for (const auto& g : tet.adj) closed = closed && g.tet >= 0;
  if (closed) {
    const Skeleton sk = analyze(out.tri);
    std::vector<bool> marked(sk.n_edges, false);
    for (int t = 0; t < n; ++t)
      for (int e = 0; e < 6; ++e)
        if (out.tri.in_link(t, e)) marked[sk.edge_class[t][e]] = true;
    for (int t = 0; t < n; ++t)
      for (int e = 0; e < 6; ++e)
        if (marked[sk.edge_class[t][e]]) out.tri.tets[t].link |= static_cast<std::uint8_t>(1u << e);
    if (j.contains("coloring")) {
      const auto& c = j.at("coloring");
      out.mode = c.value("mode", "exact");
      if (out.mode != "exact" && out.mode != "numeric" && out.mode != "perturbed")
        throw DomainError("unknown coloring mode " + out.mode);
      std::vector<std::optional<Root>> g(sk.n_edges);
      for (const auto& r : c.at("roots")) {
        const int e = r.at("edge");
        if (e < 0 || e >= sk.n_edges) throw DomainError("coloring names a missing edge class");
        g[e] = Root{CycNum::parse(f, r.at("g").get<std::string>()), r.value("x", 0)};
        if (g[e]->c.is_zero()) throw DomainError("coloring root must be invertible");
      }
      std::vector<Root> full;
      for (int e = 0; e < sk.n_edges; ++e) {
        if (!g[e]) throw DomainError("coloring misses edge class " + std::to_string(e));
        full.push_back(*g[e]);
      }
      set_class_roots(out.tri, sk, full);
      out.has_coloring = true;
    }
  }
  return out;
}

inline LoadedTriangulation load_triangulation(const std::string& path, const Field* f) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed triangulation file: ") + e.what());
  }
  try {
    return triangulation_from_json(j, f);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed triangulation file: ") + e.what());
  }
}

}  // namespace sixj
