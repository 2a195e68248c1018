#include <gtest/gtest.h>

#include <random>

#include "convlim/convsys.hpp"
#include "convlim/cpps.hpp"
#include "support.hpp"

using namespace convlim;
using namespace testing_support;

TEST(Semigroup, RejectsNonAssociativeTables) {
  // a - b mod 3 is not associative.
  std::vector<std::vector<std::size_t>> t(3, std::vector<std::size_t>(3));
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) t[a][b] = (a + 3 - b) % 3;
  EXPECT_TRUE(FiniteSemigroup::associativity_violation(t).has_value());
  EXPECT_THROW(FiniteSemigroup(labels_0_to(3), t), std::invalid_argument);
  EXPECT_THROW(FiniteSemigroup(labels_0_to(2), {{0, 2}, {1, 0}}), std::invalid_argument);
}

TEST(Semigroup, CatalogIsAssociative) {
  for (const auto& s : semigroup_catalog()) {
    EXPECT_FALSE(FiniteSemigroup::associativity_violation(s.sg.table()).has_value()) << s.name;
  }
}

TEST(Convolution, MatchesPairEnumeration) {
  std::mt19937_64 rng(3);
  const auto catalog = semigroup_catalog();
  for (int draw = 0; draw < 200; ++draw) {
    const auto& s = catalog[draw % catalog.size()];
    auto sg = relabel(s.sg, rng);
    auto a = random_measure(sg.size(), rng);
    auto b = random_measure(sg.size(), rng);
    auto got = convolve(sg, a, b);
    auto want = convolve_oracle(sg, a, b);
    for (std::size_t x = 0; x < sg.size(); ++x) EXPECT_EQ(got[x], want[sg.element(x)]) << s.name;
  }
}

TEST(Convolution, PowersOfFixtureBGenerator) {
  auto sg = cyclic(3);
  std::vector<Rational> nu{q(1, 2), q(1, 2), q(0)};
  EXPECT_EQ(convolution_power(sg, nu, 1), nu);
  EXPECT_EQ(convolution_power(sg, nu, 2), (std::vector<Rational>{q(1, 4), q(1, 2), q(1, 4)}));
  EXPECT_EQ(convolution_power(sg, nu, 3), (std::vector<Rational>{q(1, 4), q(3, 8), q(3, 8)}));
  EXPECT_THROW(convolution_power(sg, nu, 0), std::invalid_argument);
}

TEST(Convolution, IdempotentRequired) {
  try {
    from_idempotent(cyclic(2), {q(1, 3), q(2, 3)}, make_time_set(labels_0_to(3)));
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("not idempotent"), std::string::npos);
  }
}

TEST(System, FixturesSatisfyAxioms) {
  for (const auto& sys : {fixture_a(), fixture_b()}) {
    auto r = check_system(*sys);
    EXPECT_TRUE(r.passed()) << r.summary();
  }
  EXPECT_GT(find_check(check_system(*fixture_a()), "associativity")->cases, 0u);
}

TEST(System, FixtureBLaws) {
  auto sys = fixture_b();
  EXPECT_EQ(sys->space(0, 2)->weights(), (std::vector<Rational>{q(1, 4), q(1, 2), q(1, 4)}));
  EXPECT_EQ(sys->space(0, 1)->weights(), (std::vector<Rational>{q(1, 2), q(1, 2), q(0)}));
  EXPECT_FALSE(sys->is_cpps());
}

TEST(System, CorruptedMultiplicationIsDetected) {
  auto sys = fixture_a();
  auto table = std::vector<ProbMorphism::Index>(sys->mult(0, 1, 2).table().begin(), sys->mult(0, 1, 2).table().end());
  table[0] ^= 1;
  auto bad = sys->with_mult(0, 1, 2, table);
  auto r = check_system(bad);
  EXPECT_FALSE(r.passed());
  ASSERT_NE(r.first_failure(), nullptr);
  EXPECT_FALSE(r.first_failure()->witness.empty());
}

TEST(System, NullOutcomeCorruptionIsInvisible) {
  // Ω_{0,1} of Fixture B gives weight 0 to the element 2.
  auto sys = fixture_b();
  const auto& m = sys->mult(0, 1, 2);
  auto table = std::vector<ProbMorphism::Index>(m.table().begin(), m.table().end());
  table[2 * 3 + 0] = (table[2 * 3 + 0] + 1) % 3;
  EXPECT_TRUE(check_system(sys->with_mult(0, 1, 2, table)).passed());
}

TEST(System, BuilderReportsMissingPieces) {
  auto times = make_time_set(labels_0_to(3));
  auto two = semigroup_space(cyclic(2), {q(1, 2), q(1, 2)});
  SystemBuilder b(times);
  b.space(0, 1, two).space(1, 2, two).space(0, 2, two);
  EXPECT_THROW(b.build(), std::invalid_argument);
  b.mult(0, 1, 2, {0, 1, 1, 0});
  EXPECT_NO_THROW(b.build());
}

TEST(SystemMorphism, IdentityAndDoubling) {
  auto times = make_time_set(labels_0_to(3));
  auto sg = cyclic(5);
  std::vector<Rational> uniform(5, q(1, 5));
  auto sys = from_idempotent(sg, uniform, times);
  EXPECT_TRUE(check_system_morphism(SystemMorphism::identity(sys)).passed());

  std::vector<ProbMorphism> comps;
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t t = s + 1; t < 3; ++t) {
      std::vector<ProbMorphism::Index> tab(5);
      for (std::size_t x = 0; x < 5; ++x) tab[x] = static_cast<ProbMorphism::Index>(2 * x % 5);
      comps.emplace_back(sys->space(s, t), sys->space(s, t), tab);
    }
  ASSERT_EQ(comps.size(), interval_count(3));
  SystemMorphism dbl(sys, sys, comps);
  EXPECT_TRUE(check_system_morphism(dbl).passed());
  auto sq = compose(dbl, dbl);
  EXPECT_TRUE(check_system_morphism(sq).passed());
  EXPECT_EQ(sq.component(0, 2)(1), 4u);

  auto broken = dbl.with_component(0, 1, ProbMorphism::identity(sys->space(0, 1)));
  EXPECT_TRUE(failed_with_witness(check_system_morphism(broken), "multiplicative-square"));
}

TEST(SystemMorphism, ModTwoReductionIsAMorphismButNotIso) {
  auto times = make_time_set(labels_0_to(3));
  auto z4 = from_idempotent(cyclic(4), std::vector<Rational>(4, q(1, 4)), times);
  auto z2 = from_idempotent(cyclic(2), std::vector<Rational>(2, q(1, 2)), times);
  std::vector<ProbMorphism> comps;
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t t = s + 1; t < 3; ++t) comps.emplace_back(z4->space(s, t), z2->space(s, t), std::vector<ProbMorphism::Index>{0, 1, 0, 1});
  SystemMorphism red(z4, z2, comps);
  EXPECT_TRUE(check_system_morphism(red).passed());
  EXPECT_FALSE(is_isomorphism(red.component(0, 1)));
}

TEST(Flow, FixtureBFlowSatisfiesAxioms) {
  auto flow = build_flow(fixture_b());
  auto r = check_flow(flow);
  EXPECT_TRUE(r.passed()) << r.summary();
  EXPECT_EQ(pushforward(flow.X(0, 2)), (std::vector<Rational>{q(1, 4), q(1, 2), q(1, 4)}));
}

TEST(Flow, CorruptedIncrementIsDetected) {
  auto flow = build_flow(fixture_b());
  const auto slot = interval_slot(3, 0, 2);
  flow.increments[slot] = corrupted(flow.increments[slot]);
  auto r = check_flow(flow);
  EXPECT_FALSE(r.passed());
  EXPECT_TRUE(failed_with_witness(r, "composition"));
}

TEST(Flow, DependentIncrementsAreDetected) {
  // Two copies of the same coin: X_{0,1} = X_{1,2}.
  auto times = make_time_set(labels_0_to(3));
  auto sys = from_idempotent(cyclic(2), {q(1, 2), q(1, 2)}, times);
  auto base = sys->space(0, 1);
  FlowSystem flow{base, {}, sys};
  flow.increments.push_back(ProbMorphism::identity(base));                       // (0,1)
  flow.increments.push_back(ProbMorphism(base, sys->space(0, 2), {0, 0}));      // (0,2)
  flow.increments.push_back(ProbMorphism::identity(base).rebind(base, sys->space(1, 2)));  // (1,2)
  auto r = check_flow(flow);
  EXPECT_TRUE(failed_with_witness(r, "independent-increments"));
}
