#include "sixj/jpoly.hpp"
#include "sixj/repcat.hpp"

#include <gtest/gtest.h>

#include <random>
#include <thread>

using namespace sixj;

namespace {

LPoly qbr(const Field* f, int var, int xi) { return qbracket(f, UnitMono::var(static_cast<Var>(var)).shifted(xi)); }

}  // namespace

TEST(Sixj, FirstClosedFormAnchor) {
  const Field* f = field_for(1);
  const LPoly expect = qbr(f, 2, -2) * qbr(f, 3, -1) * qmultinom(f, {1, 0, 0});
  EXPECT_EQ(j_case1(f, {1, 0, 0}), expect);
  EXPECT_EQ(j_symbol(Params(1), {1, 0, 0})->poly, expect);
}

TEST(Sixj, ExtremeTripleIsModifiedDimension) {
  for (int rp = 1; rp <= 2; ++rp) {
    const Params p(rp);
    EXPECT_EQ(j_symbol(p, {-rp, rp, rp})->poly, dpoly(field_for(rp))) << rp;
    EXPECT_EQ(boundary_low(field_for(rp), {-rp, rp, rp}), dpoly(field_for(rp)));
  }
}

TEST(Sixj, ExtremeHighTriple) {
  for (int rp = 1; rp <= 2; ++rp) {
    const Field* f = field_for(rp);
    // {delta + 1; 2r'}! with delta = beta - gamma - 2r'
    const UnitMono x = (UnitMono::var(Var::q2) / UnitMono::var(Var::q3)).shifted(-2 * rp + 1);
    EXPECT_EQ(boundary_high(f, {rp, -rp, -rp}), fshift(f, 2 * rp, x));
    EXPECT_EQ(j_symbol(Params(rp), {rp, -rp, -rp})->poly, fshift(f, 2 * rp, x));
    EXPECT_NE(j_symbol(Params(rp), {rp, -rp, -rp})->poly, fshift(f, 2 * rp, x.shifted(-1)));
  }
  const Field* f = field_for(1);
  EXPECT_EQ(j_case2(f, {1, -1, -1}), boundary_high(f, {1, -1, -1}));
}

TEST(Sixj, ClosedFormPreconditions) {
  const Field* f = field_for(1);
  EXPECT_THROW(j_case1(f, {1, -1, 0}), DomainError);
  EXPECT_THROW(j_case2(f, {0, -1, 1}), DomainError);
  EXPECT_THROW(j_case1(f, {2, 0, 0}), DomainError);
  EXPECT_TRUE(case1_applies({0, 0, 0}));
  EXPECT_THROW(boundary_low(f, {0, 0, 0}), DomainError);
  EXPECT_THROW(boundary_high(f, {0, 0, 0}), DomainError);
}

TEST(Sixj, ZeroOutsideH) {
  const Params p(1);
  EXPECT_TRUE(j_symbol(p, {2, 0, 0})->poly.is_zero());
  EXPECT_TRUE(j_symbol(p, {1, 1, 0})->poly.is_zero());
  EXPECT_TRUE(j_symbol(p, {0, 0, -5})->poly.is_zero());
}

TEST(Sixj, ClosedFormsAgreeOnOverlap) {
  for (int rp = 1; rp <= 2; ++rp) {
    const Field* f = field_for(rp);
    int overlaps = 0;
    for (const auto& t : hset_enumerate(Params(rp))) {
      if (!(case1_applies(t) && case2_applies(t))) continue;
      ++overlaps;
      EXPECT_EQ(j_case1(f, t), j_case2(f, t)) << t.to_string();
    }
    EXPECT_GT(overlaps, 0);
  }
}

TEST(Sixj, EveryEntryIsIntegralAndNonzero) {
  for (int rp = 1; rp <= 2; ++rp) {
    const Params p(rp);
    for (const auto& t : hset_enumerate(p)) {
      const LPoly& j = j_symbol(p, t)->poly;
      EXPECT_TRUE(j.integral()) << t.to_string();
      EXPECT_FALSE(j.is_zero()) << t.to_string();
      EXPECT_FALSE(j.uses(Var::q0));
    }
  }
}

TEST(Sixj, BoundaryStrata) {
  for (int rp = 1; rp <= 2; ++rp) {
    const Params p(rp);
    const Field* f = field_for(rp);
    for (const auto& t : hset_enumerate(p)) {
      if (t.sum() == rp) EXPECT_EQ(j_symbol(p, t)->poly, boundary_low(f, t)) << t.to_string();
      if (t.sum() == -rp) EXPECT_EQ(j_symbol(p, t)->poly, boundary_high(f, t)) << t.to_string();
    }
  }
}

TEST(Sixj, LowBoundaryIsSymmetricUnderCyclicRelabelling) {
  // alpha -> beta -> gamma -> alpha moves (i,j,k) to (k,i,j)
  const Field* f = field_for(2);
  for (const auto& t : hset_enumerate(Params(2))) {
    if (t.sum() != 2) continue;
    Substitution s;
    s[1] = UnitMono::var(Var::q2);
    s[2] = UnitMono::var(Var::q3);
    s[3] = UnitMono::var(Var::q1);
    EXPECT_EQ(substitute(boundary_low(f, t), s), boundary_low(f, {t.i3, t.i1, t.i2})) << t.to_string();
  }
}

TEST(Sixj, OrbitHasTwentyFourElements) {
  for (int rp = 1; rp <= 2; ++rp)
    for (const auto& t : hset_enumerate(Params(rp))) EXPECT_EQ(tetrahedral_orbit(Params(rp), t).size(), 24u);
}

TEST(Sixj, OracleAgreesOnEveryTripleAtSmallestLevel) {
  const Params p(1);
  for (const auto& t : hset_enumerate(p))
    EXPECT_EQ(tetrahedron_oracle(p, t), j_symbol(p, t)->poly) << t.to_string();
}

TEST(Sixj, OracleAgreesOnSampledTriplesAtSecondLevel) {
  const Params p(2);
  const auto h = hset_enumerate(p);
  std::mt19937_64 rng(42);
  for (int s = 0; s < 10; ++s) {
    const IndexTriple t = h[rng() % h.size()];
    EXPECT_EQ(tetrahedron_oracle(p, t), j_symbol(p, t)->poly) << t.to_string();
  }
}

TEST(Sixj, MemoTableIsSafeUnderConcurrentReaders) {
  const Params p(2);
  const auto h = hset_enumerate(p);
  std::vector<LPoly> serial;
  for (const auto& t : h) serial.push_back(JTable::build(p, t));
  JTable::instance().clear();
  std::vector<std::vector<LPoly>> seen(4);
  std::vector<std::thread> pool;
  for (int w = 0; w < 4; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t k = 0; k < h.size(); ++k) seen[w].push_back(j_symbol(p, h[(k + 17 * w) % h.size()])->poly);
    });
  for (auto& th : pool) th.join();
  for (int w = 0; w < 4; ++w)
    for (std::size_t k = 0; k < h.size(); ++k) EXPECT_EQ(seen[w][k], serial[(k + 17 * w) % h.size()]);
}

TEST(Sixj, CanonicalTextOfExtremeTriple) {
  EXPECT_EQ(j_symbol(Params(1), {-1, 1, 1})->poly.to_string(), "(-1)*q1^2 + (-1) + (-1)*q1^-2");
}
