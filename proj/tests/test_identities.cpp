#include "sixj/identities.hpp"

#include <gtest/gtest.h>

using namespace sixj;

namespace {

// Restores the memo table when a test perturbs it.
struct TableGuard {
  ~TableGuard() { JTable::instance().clear(); }
};

std::vector<std::array<int, 6>> cube(int rp) {
  std::vector<std::array<int, 6>> out;
  const int w = 2 * rp + 1;
  long long total = 1;
  for (int k = 0; k < 6; ++k) total *= w;
  for (long long code = 0; code < total; ++code) {
    std::array<int, 6> v{};
    long long c = code;
    for (int k = 5; k >= 0; --k, c /= w) v[k] = static_cast<int>(c % w) - rp;
    out.push_back(v);
  }
  return out;
}

}  // namespace

TEST(Identities, BiedenharnElliottAtOrigin) { EXPECT_TRUE(check_be(Params(1), {0, 0, 0, 0, 0, 0}).pass); }

TEST(Identities, BiedenharnElliottExhaustiveSmallest) {
  const Params p(1);
  int nonvacuous = 0;
  for (const auto& v : cube(1)) {
    const Outcome o = check_be(p, v);
    EXPECT_TRUE(o.pass) << o.key << " " << o.witness;
    const IndexTriple primed{bar_reduce(-v[0] + v[4] - v[5], p), bar_reduce(-v[1] + v[5] - v[3], p),
                             bar_reduce(-v[2] + v[3] - v[4], p)};
    if (in_h({v[0], v[1], v[2]}, 1) && in_h(primed, 1)) ++nonvacuous;
  }
  // a fair share of the instances has a nonzero left side
  EXPECT_GT(nonvacuous, 200);
}

TEST(Identities, BiedenharnElliottSampledSecondLevel) {
  SuiteOptions opt;
  opt.exhaustive = false;
  opt.samples = 100;
  opt.seed = 42;
  const Report rep = run_suite(Params(2), {"be"}, opt);
  EXPECT_EQ(rep.outcomes.size(), 100u);
  EXPECT_TRUE(rep.all_pass()) << rep.to_text();
}

TEST(Identities, Orthonormality) {
  const Params p(1);
  EXPECT_TRUE(check_ortho(p, {0, 0, 0}, 0).pass);
  EXPECT_TRUE(check_ortho(p, {0, 0, 0}, 1).pass);
  for (const auto& t : hset_enumerate(p))
    for (int a = -1; a <= 1; ++a) EXPECT_TRUE(check_ortho(p, t, a).pass) << t.to_string() << a;
}

TEST(Identities, OrthonormalitySampledSecondLevel) {
  SuiteOptions opt;
  opt.exhaustive = false;
  opt.samples = 50;
  opt.seed = 42;
  const Report rep = run_suite(Params(2), {"ortho"}, opt);
  EXPECT_EQ(rep.outcomes.size(), 50u);
  EXPECT_TRUE(rep.all_pass()) << rep.to_text();
}

TEST(Identities, Theta) {
  EXPECT_TRUE(check_theta(Params(1), -1).pass);
  EXPECT_TRUE(check_theta(Params(1), 0).pass);
  EXPECT_TRUE(check_theta(Params(2), 2).pass);
}

TEST(Identities, Recurrences) {
  const Report rep = run_suite(Params(1), {"rec"}, SuiteOptions{});
  EXPECT_TRUE(rep.all_pass()) << rep.to_text();
  int single = 0, up = 0, down = 0;
  for (const auto& o : rep.outcomes) {
    single += o.suite == "recsym";
    up += o.suite == "recgenup";
    down += o.suite == "recgendown";
  }
  EXPECT_GT(single, 0);
  EXPECT_GT(up, 0);
  EXPECT_GT(down, 0);
}

TEST(Identities, SymmetrySuite) {
  for (int rp = 1; rp <= 2; ++rp)
    for (const auto& t : hset_enumerate(Params(rp)))
      for (const auto& o : check_symmetry(Params(rp), t)) EXPECT_TRUE(o.pass) << o.key << " " << o.witness;
}

TEST(Identities, CorruptedTableIsDetected) {
  TableGuard guard;
  const Params p(1);
  const IndexTriple t{0, 0, 0};
  LPoly bad = j_symbol(p, t)->poly + LPoly::var(field_for(1), Var::q1);
  JTable::instance().override_entry(p, t, bad);
  EXPECT_FALSE(check_be(p, {0, 0, 0, 0, 0, 0}).pass);
  EXPECT_FALSE(check_ortho(p, t, 0).pass);
  bool sym_failed = false;
  for (const auto& o : check_symmetry(p, {0, 0, 0})) sym_failed = sym_failed || !o.pass;
  EXPECT_TRUE(sym_failed);
  const Outcome o = check_be(p, {0, 0, 0, 0, 0, 0});
  EXPECT_FALSE(o.witness.empty());
}

TEST(Identities, CorruptionIsUndoneByClear) {
  {
    TableGuard guard;
    JTable::instance().override_entry(Params(1), {0, 0, 0}, LPoly(field_for(1), 5LL));
  }
  EXPECT_TRUE(check_be(Params(1), {0, 0, 0, 0, 0, 0}).pass);
}

TEST(Identities, FullSuiteSmallestLevel) {
  const Report rep = run_suite(Params(1), suite_names(), SuiteOptions{});
  EXPECT_TRUE(rep.all_pass()) << rep.to_text();
  std::set<std::string> suites;
  for (const auto& o : rep.outcomes) suites.insert(o.suite);
  for (const auto& s : suite_names())
    if (s != "rec") EXPECT_TRUE(suites.count(s)) << s;
}

TEST(Identities, ReportIsDeterministicAcrossJobCounts) {
  SuiteOptions one, four;
  one.exhaustive = four.exhaustive = false;
  one.seed = four.seed = 7;
  one.samples = four.samples = 30;
  four.jobs = 4;
  const Report a = run_suite(Params(2), {"be", "ortho", "theta"}, one);
  const Report b = run_suite(Params(2), {"be", "ortho", "theta"}, four);
  EXPECT_EQ(a.to_text(), b.to_text());
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  const auto j = a.to_json();
  EXPECT_EQ(j["rp"], 2);
  EXPECT_EQ(j["failures"], 0);
  EXPECT_EQ(j["results"][0]["status"], "pass");
}

TEST(Identities, SuiteSelectionErrors) {
  EXPECT_THROW(run_suite(Params(1), {"nope"}, SuiteOptions{}), DomainError);
  EXPECT_THROW(run_suite(Params(3), {"card"}, SuiteOptions{}), DomainError);
  SuiteOptions big;
  big.allow_large = true;
  EXPECT_TRUE(run_suite(Params(3), {"card"}, big).all_pass());
}

TEST(Identities, CardinalityCheck) {
  for (int rp = 1; rp <= 5; ++rp) EXPECT_TRUE(check_card(Params(rp)).pass);
}

TEST(Identities, DBracketIdentity) {
  for (int rp = 1; rp <= 3; ++rp) EXPECT_TRUE(dpoly_bracket_identity(field_for(rp), UnitMono::var(Var::q1)));
}
