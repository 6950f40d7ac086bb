#include "sixj/statesum.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

using namespace sixj;

namespace {

const std::string kData = SIXJ_DATA_DIR;

struct Fixture {
  Params p{1};
  const Field* f = field_for(1);
  LoadedTriangulation loaded = load_triangulation(kData + "/s3_unknot.json", field_for(1));
  const Triangulation& tri = loaded.tri;
  Skeleton sk = analyze(loaded.tri);
  std::vector<Root> roots = class_roots(loaded.tri, sk);
};

nlohmann::json raw_fixture() {
  std::ifstream in(kData + "/s3_unknot.json");
  return nlohmann::json::parse(in);
}

CycNum tau_exact(const Params& p, const Triangulation& t, const std::vector<Root>& g, int jobs = 1) {
  TauOptions o;
  o.jobs = jobs;
  return *compute_tau(p, t, g, o).exact_total;
}

CycNum tau_of(const Triangulation& t) { return tau_exact(Params(1), t, class_roots(t, analyze(t))); }

CycNum golden() { return CycNum(field_for(1), Rational(1, 27)); }

std::vector<Perm4> all_orders() {
  std::vector<Perm4> out;
  Perm4 p{0, 1, 2, 3};
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

TEST(Triangulation, BundledSphereIsValid) {
  Fixture fx;
  EXPECT_TRUE(validate(fx.tri).ok()) << validate(fx.tri).to_text();
  EXPECT_TRUE(fx.sk.closed);
  EXPECT_TRUE(fx.sk.orientable);
  EXPECT_EQ(fx.sk.n_vertices - fx.sk.n_edges + fx.sk.n_faces - fx.tri.size(), 0);
  EXPECT_TRUE(fx.loaded.has_coloring);
}

TEST(Triangulation, LoopEdgeIsRejected) {
  Triangulation t;
  t.tets.resize(1);
  t.glue(0, 0, 0, Perm4{1, 0, 2, 3});
  t.glue(0, 2, 0, Perm4{0, 1, 3, 2});
  const ValidationReport rep = validate(t);
  EXPECT_FALSE(rep.ok());
  EXPECT_NE(rep.to_text().find("loop"), std::string::npos) << rep.to_text();
}

TEST(Triangulation, PartialLinkIsRejected) {
  nlohmann::json j = raw_fixture();
  j["link_edges"] = nlohmann::json::array({j["link_edges"][0]});
  const auto loaded = triangulation_from_json(j, field_for(1));
  const ValidationReport rep = validate(loaded.tri);
  EXPECT_FALSE(rep.ok());
  EXPECT_NE(rep.to_text().find("Hamiltonian"), std::string::npos) << rep.to_text();
}

TEST(Triangulation, UngluedFaceIsRejected) {
  Triangulation t;
  t.tets.resize(2);
  t.glue(0, 0, 1, Perm4{0, 1, 2, 3});
  EXPECT_FALSE(validate(t).ok());
}

TEST(Triangulation, MalformedInputThrows) {
  const Field* f = field_for(1);
  EXPECT_THROW(load_triangulation(kData + "/missing.json", f), DomainError);
  nlohmann::json j = raw_fixture();
  j["gluings"][0]["vertex_map"] = {1, 1, 3};
  EXPECT_THROW(triangulation_from_json(j, f), DomainError);
  j = raw_fixture();
  j["gluings"][0]["to_tet"] = 17;
  EXPECT_THROW(triangulation_from_json(j, f), DomainError);
  j = raw_fixture();
  j["coloring"]["mode"] = "fuzzy";
  EXPECT_THROW(triangulation_from_json(j, f), DomainError);
  j = raw_fixture();
  j["coloring"]["roots"].erase(0);
  EXPECT_THROW(triangulation_from_json(j, f), DomainError);
  j = raw_fixture();
  j["coloring"]["roots"][0]["g"] = "0";
  EXPECT_THROW(triangulation_from_json(j, f), DomainError);
  j = raw_fixture();
  j.erase("gluings");
  EXPECT_ANY_THROW(triangulation_from_json(j, f));
}

TEST(Homology, BoundariesComposeToZero) {
  Fixture fx;
  const FirstHomology h = dual_homology(fx.tri, geometry(fx.tri));
  EXPECT_TRUE(h.boundaries_compose_to_zero());
  EXPECT_TRUE(h.trivial());
  EXPECT_EQ(h.to_string(), "H1 = 0");
  const Triangulation t = pachner_23(fx.tri, 0);
  const FirstHomology h23 = dual_homology(t, geometry(t));
  EXPECT_TRUE(h23.boundaries_compose_to_zero());
  EXPECT_TRUE(h23.trivial());
}

TEST(Homology, SyntheticComplexIsRecovered) {
  std::ifstream in(kData + "/snf_fixture.json");
  const FirstHomology h = homology_from_json(nlohmann::json::parse(in));
  EXPECT_TRUE(h.boundaries_compose_to_zero());
  EXPECT_EQ(h.free_rank(), 1);
  ASSERT_EQ(h.torsion().size(), 1u);
  EXPECT_EQ(h.torsion()[0], 3);
  EXPECT_EQ(h.to_string(), "H1 = Z + Z/3");
  // the boundary of the single 2-cell is zero in homology; a third of it is the torsion generator
  EXPECT_EQ(h.class_label({6, 3, 9}), "0");
  EXPECT_NE(h.class_label({2, 1, 3}), "0");
  EXPECT_EQ(h.class_label({4, 2, 6}), h.class_label({-2, -1, -3}));
  EXPECT_THROW(h.class_label({1, 0, 0}), DomainError);
  EXPECT_THROW(h.class_label({1, 0}), DomainError);
}

TEST(Homology, SmithFormFactorsTheMatrix) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 5), cols = 1 + static_cast<int>(rng() % 5);
    IntMatrix a = int_zero(rows, cols);
    for (auto& row : a)
      for (auto& x : row) x = static_cast<long long>(rng() % 13) - 6;
    const SmithForm s = smith(a, rows, cols);
    EXPECT_EQ(int_mul(int_mul(s.U, a, rows), s.V, cols), s.D);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (i != j || i >= s.rank) EXPECT_EQ(s.D[i][j], 0);
    for (int i = 0; i + 1 < s.rank; ++i) EXPECT_EQ(s.diag[i + 1] % s.diag[i], 0);
    for (const auto& d : s.diag) EXPECT_GT(d, 0);
  }
}

TEST(StateSum, StateCount) {
  Fixture fx;
  const Geometry geo = geometry(fx.tri);
  const StateSpace space(fx.p, geo, fx.roots);
  EXPECT_EQ(fx.sk.n_edges, 10);
  EXPECT_EQ(space.count(), 59049);
  TauOptions o;
  const TauReport rep = compute_tau(fx.p, fx.tri, fx.roots, o);
  EXPECT_EQ(rep.visited, space.count());
  EXPECT_GT(rep.contributing, 0);
  EXPECT_LT(rep.contributing, rep.visited);
}

TEST(StateSum, HeightsAreReduced) {
  Fixture fx;
  const Geometry geo = geometry(fx.tri);
  const StateSpace space(fx.p, geo, fx.roots);
  std::mt19937_64 rng(3);
  for (int s = 0; s < 200; ++s) {
    std::vector<int> n(fx.sk.n_edges);
    for (auto& x : n) x = static_cast<int>(rng() % 3) - 1;
    for (int t = 0; t < fx.tri.size(); ++t)
      for (int f = 0; f < 4; ++f) EXPECT_LE(std::abs(space.out_height(n, t, f)), 1);
  }
}

TEST(StateSum, VertexOrderIndependence) {
  Fixture fx;
  const Geometry geo = geometry(fx.tri);
  const StateSpace space(fx.p, geo, fx.roots);
  const ExactRing ring(fx.p);
  std::mt19937_64 rng(42);
  int nonzero = 0;
  for (int s = 0; s < 100; ++s) {
    std::vector<int> n(fx.sk.n_edges);
    for (auto& x : n) x = static_cast<int>(rng() % 3) - 1;
    for (int t = 0; t < fx.tri.size(); ++t) {
      const CycNum ref = space.vertex_weight(ring, n, t);
      if (!ref.is_zero()) ++nonzero;
      for (const auto& order : all_orders()) EXPECT_EQ(space.vertex_weight(ring, n, t, order), ref);
    }
  }
  EXPECT_GT(nonzero, 50);
}

TEST(StateSum, FailedCycleConditionGivesZero) {
  Fixture fx;
  const Geometry geo = geometry(fx.tri);
  const StateSpace space(fx.p, geo, fx.roots);
  const ExactRing ring(fx.p);
  std::mt19937_64 rng(9);
  int seen = 0;
  for (int s = 0; s < 200; ++s) {
    std::vector<int> n(fx.sk.n_edges);
    for (auto& x : n) x = static_cast<int>(rng() % 3) - 1;
    for (int t = 0; t < fx.tri.size(); ++t)
      if (!space.cycle_at(n, t)) {
        ++seen;
        EXPECT_TRUE(space.vertex_weight(ring, n, t).is_zero());
      }
  }
  EXPECT_GT(seen, 0);
}

TEST(StateSum, GoldenValue) {
  Fixture fx;
  const TauReport rep = compute_tau(fx.p, fx.tri, fx.roots);
  EXPECT_EQ(rep.homology, "H1 = 0");
  ASSERT_EQ(rep.exact.size(), 1u);
  EXPECT_EQ(rep.exact.begin()->first, "0");
  EXPECT_EQ(*rep.exact_total, golden());
  EXPECT_EQ(rep.exact_total->to_string(), "1/27");
}

TEST(StateSum, GradedSumEqualsTotal) {
  Fixture fx;
  const TauReport rep = compute_tau(fx.p, fx.tri, fx.roots);
  CycNum acc(fx.f);
  for (const auto& [cls, v] : rep.exact) acc = acc + v;
  EXPECT_EQ(acc, *rep.exact_total);
}

TEST(StateSum, IndependentOfWorkerCount) {
  Fixture fx;
  TauOptions one, three;
  three.jobs = 3;
  const TauReport a = compute_tau(fx.p, fx.tri, fx.roots, one);
  const TauReport b = compute_tau(fx.p, fx.tri, fx.roots, three);
  EXPECT_EQ(a.exact, b.exact);
  EXPECT_EQ(a.visited, b.visited);
  EXPECT_EQ(a.contributing, b.contributing);
}

TEST(StateSum, NumericModeMatchesExact) {
  Fixture fx;
  TauOptions o;
  o.mode = Mode::Numeric;
  const TauReport rep = compute_tau(fx.p, fx.tri, fx.roots, o);
  const std::complex<double> z = rep.numeric_total->mid();
  EXPECT_NEAR(z.real(), 1.0 / 27.0, 1e-10);
  EXPECT_NEAR(z.imag(), 0.0, 1e-10);
  EXPECT_LT(rep.numeric_total->radius().convert_to<double>(), 1e-10);
  EXPECT_TRUE(rep.numeric_total->overlaps(to_complex(golden(), fx.p)));
}

TEST(StateSum, BoundaryShiftLeavesTauUnchanged) {
  Fixture fx;
  std::vector<Root> y(fx.sk.n_vertices);
  for (int v = 0; v < fx.sk.n_vertices; ++v) y[v] = Root{CycNum(fx.f, Rational(v + 3, 2 * v + 5)), 0};
  const auto shifted = shift_by_coboundary(fx.sk, fx.roots, y);
  EXPECT_FALSE(shifted == fx.roots);
  EXPECT_TRUE(differs_by_coboundary(fx.sk, fx.roots, shifted, fx.p));
  EXPECT_EQ(tau_exact(fx.p, fx.tri, shifted), golden());
}

TEST(StateSum, NonCoboundaryIsDetected) {
  Fixture fx;
  auto other = fx.roots;
  other[0] = other[0] * Root{CycNum(fx.f, 2LL), 0};
  EXPECT_FALSE(differs_by_coboundary(fx.sk, fx.roots, other, fx.p));
}

TEST(StateSum, MakeAdmissible) {
  Fixture fx;
  EXPECT_EQ(make_admissible(fx.sk, fx.roots, fx.p), fx.roots);
  // a coboundary shift that sends edge 3 to -1, a 2r-th root of unity
  const auto ends = fx.sk.edge_ends[3];
  std::vector<Root> y(fx.sk.n_vertices, Root{CycNum(fx.f, 1LL), 0});
  y[ends[1]] = Root{CycNum(fx.f, -1LL) * fx.roots[3].c.inverse(), 0};
  const auto bad = shift_by_coboundary(fx.sk, fx.roots, y);
  ASSERT_FALSE(coloring_admissible(bad, fx.p));
  EXPECT_THROW(compute_tau(fx.p, fx.tri, bad), DomainError);
  const auto fixed = make_admissible(fx.sk, bad, fx.p);
  EXPECT_TRUE(coloring_admissible(fixed, fx.p));
  EXPECT_TRUE(differs_by_coboundary(fx.sk, bad, fixed, fx.p));
  EXPECT_EQ(tau_exact(fx.p, fx.tri, fixed), golden());
}

TEST(Moves, PachnerRoundTrip) {
  Fixture fx;
  const Triangulation t23 = pachner_23(fx.tri, 0);
  EXPECT_EQ(t23.size(), fx.tri.size() + 1);
  EXPECT_TRUE(validate(t23).ok()) << validate(t23).to_text();
  const Skeleton sk = analyze(t23);
  int edge = -1;
  for (int e = 0; e < sk.n_edges; ++e)
    if (sk.edge_degree[e] == 3 && !sk.edge_in_link[e]) edge = e;
  ASSERT_GE(edge, 0);
  const Triangulation back = pachner_32(t23, edge);
  EXPECT_TRUE(validate(back).ok());
  EXPECT_TRUE(isomorphic(back, fx.tri));
  EXPECT_FALSE(isomorphic(t23, fx.tri));
}

TEST(Moves, PachnerOnEveryFacePreservesTau) {
  Fixture fx;
  for (int F = 0; F < fx.sk.n_faces; ++F) {
    const Triangulation t = pachner_23(fx.tri, F);
    ASSERT_TRUE(validate(t).ok()) << F;
    const TauReport rep = compute_tau(fx.p, t, class_roots(t, analyze(t)));
    EXPECT_EQ(rep.exact.size(), 1u);
    EXPECT_EQ(*rep.exact_total, golden()) << "face " << F;
  }
}

TEST(Moves, ThreeTwoPreservesTau) {
  Fixture fx;
  const Triangulation t23 = pachner_23(fx.tri, 4);
  const Skeleton sk = analyze(t23);
  for (int e = 0; e < sk.n_edges; ++e) {
    if (sk.edge_degree[e] != 3 || sk.edge_in_link[e]) continue;
    const Triangulation t = pachner_32(t23, e);
    EXPECT_EQ(tau_of(t), golden()) << e;
  }
}

TEST(Moves, LuneInsertAndRemove) {
  Fixture fx;
  const Triangulation tl = lune_insert(fx.tri, 0, 1, 3);
  EXPECT_EQ(tl.size(), fx.tri.size() + 2);
  EXPECT_TRUE(validate(tl).ok()) << validate(tl).to_text();
  EXPECT_EQ(tau_of(tl), golden());
  const Triangulation tr = lune_remove(tl, tl.size() - 2, tl.size() - 1);
  EXPECT_TRUE(isomorphic(tr, fx.tri));
  EXPECT_EQ(tau_of(tr), golden());
}

TEST(Moves, InvalidMovesThrow) {
  Fixture fx;
  EXPECT_THROW(pachner_23(fx.tri, fx.sk.n_faces), DomainError);
  EXPECT_THROW(pachner_32(fx.tri, fx.sk.n_edges), DomainError);
}

TEST(Perturbed, TauIsFreeOfTheVariable) {
  Fixture fx;
  const auto pert = perturb(fx.sk, fx.roots, fx.p);
  for (const auto& g : pert) EXPECT_NE(g.x, 0);
  TauOptions o;
  o.mode = Mode::Perturbed;
  const TauReport rep = compute_tau(fx.p, fx.tri, pert, o);
  const auto c = constant_value(*rep.perturbed_total);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(*c, golden());
  const TauReport doubled = compute_tau(fx.p, fx.tri, rho(pert), o);
  EXPECT_EQ(*doubled.perturbed_total, *rep.perturbed_total);
}

TEST(Perturbed, RescuesTheTrivialColoring) {
  Fixture fx;
  const std::vector<Root> one(fx.sk.n_edges, Root{CycNum(fx.f, 1LL), 0});
  EXPECT_FALSE(coloring_admissible(one, fx.p));
  EXPECT_THROW(compute_tau(fx.p, fx.tri, one), DomainError);
  TauOptions o;
  o.mode = Mode::Perturbed;
  const TauReport rep = compute_tau(fx.p, fx.tri, perturb(fx.sk, one, fx.p), o);
  const auto c = constant_value(*rep.perturbed_total);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(*c, golden());
}

TEST(Perturbed, ExactModeRejectsTheVariable) {
  Fixture fx;
  EXPECT_THROW(compute_tau(fx.p, fx.tri, perturb(fx.sk, fx.roots, fx.p)), DomainError);
  EXPECT_THROW(parse_mode("fuzzy"), DomainError);
  EXPECT_EQ(parse_mode("perturbed"), Mode::Perturbed);
}
