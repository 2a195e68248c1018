#include <gtest/gtest.h>

#include <random>

#include "convlim/finprob.hpp"
#include "convlim/rational.hpp"
#include "support.hpp"

using namespace convlim;
using testing_support::q;

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(parse_rational("1/2"), q(1, 2));
  EXPECT_EQ(parse_rational("-3"), q(-3));
  EXPECT_EQ(parse_rational("0"), q(0));
  EXPECT_EQ(to_string(q(6, 4)), "3/2");
  EXPECT_EQ(to_string(q(4, 2)), "2");
  for (const char* bad : {"", "1/", "/2", "2/4", "1/0", "1.5", "1/-2", "a"}) {
    EXPECT_THROW(parse_rational(bad), std::invalid_argument) << bad;
  }
}

TEST(FinProbSpace, Validation) {
  EXPECT_NO_THROW(make_space({"a", "b"}, {q(1, 3), q(2, 3)}));
  EXPECT_THROW(make_space({"a", "b"}, {q(1, 3), q(1, 3)}), std::invalid_argument);
  EXPECT_THROW(make_space({"a", "a"}, {q(1, 2), q(1, 2)}), std::invalid_argument);
  EXPECT_THROW(make_space({"a", "b"}, {q(-1, 2), q(3, 2)}), std::invalid_argument);
  EXPECT_THROW(make_space({}, {}), std::invalid_argument);
  auto s = make_space({"a", "b", "c"}, {q(1, 2), q(0), q(1, 2)});
  EXPECT_EQ(s->support_size(), 2u);
  EXPECT_FALSE(s->positive(1));
  EXPECT_EQ(s->index_of("c"), 2u);
  EXPECT_EQ(point_space()->size(), 1u);
}

TEST(FinProbSpace, ProductMatchesEnumeration) {
  auto a = make_space({"x", "y"}, {q(1, 3), q(2, 3)});
  auto b = make_space({"0", "1", "2"}, {q(1, 6), q(1, 2), q(1, 3)});
  auto c = make_space({"u", "v"}, {q(1, 4), q(3, 4)});
  auto abc = product({a, b, c});
  ASSERT_EQ(abc->size(), 12u);
  std::size_t k = 0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t l = 0; l < 2; ++l, ++k) {
        EXPECT_EQ(abc->weight(k), a->weight(i) * b->weight(j) * c->weight(l));
        EXPECT_EQ(abc->outcome(k), "(" + a->outcome(i) + "," + b->outcome(j) + "," + c->outcome(l) + ")");
      }
  auto regrouped = product({product({a, b}), c});
  EXPECT_TRUE(same_space(*regrouped, *abc));
}

TEST(MixedRadix, EncodeDecode) {
  MixedRadix r({2, 3, 4});
  EXPECT_EQ(r.total(), 24u);
  std::vector<std::size_t> d(3);
  for (std::size_t i = 0; i < r.total(); ++i) {
    r.decode(i, d);
    EXPECT_EQ(r.encode(d), i);
    EXPECT_EQ(d[0] * 12 + d[1] * 4 + d[2], i);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(r.digit(i, k), d[k]);
  }
}

TEST(ProbMorphism, ComposeAndProduct) {
  auto a = make_space({"0", "1", "2", "3"}, {q(1, 4), q(1, 4), q(1, 4), q(1, 4)});
  auto b = make_space({"0", "1"}, {q(1, 2), q(1, 2)});
  ProbMorphism parity(a, b, {0, 1, 0, 1});
  ProbMorphism flip(b, b, {1, 0});
  auto c = compose(flip, parity);
  EXPECT_EQ(std::vector<ProbMorphism::Index>(c.table().begin(), c.table().end()),
            (std::vector<ProbMorphism::Index>{1, 0, 1, 0}));
  EXPECT_TRUE(is_measure_preserving(c));
  EXPECT_THROW(compose(parity, flip), std::invalid_argument);
  EXPECT_THROW(ProbMorphism(a, b, {0, 1, 2, 0}), std::invalid_argument);
  EXPECT_THROW(ProbMorphism(a, b, {0, 1}), std::invalid_argument);

  std::vector<ProbMorphism> fs{parity, flip};
  auto p = product(fs);
  EXPECT_EQ(p.domain().size(), 8u);
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 2; ++y) EXPECT_EQ(p(x * 2 + y), parity(x) * 2 + flip(y));
}

TEST(ProbMorphism, MeasurePreservationAndIsomorphism) {
  auto a = make_space({"a", "b", "z"}, {q(1, 2), q(1, 2), q(0)});
  auto b = make_space({"0", "1"}, {q(1, 2), q(1, 2)});
  ProbMorphism iso(a, b, {1, 0, 0});
  EXPECT_TRUE(is_measure_preserving(iso));
  EXPECT_TRUE(is_isomorphism(iso));
  auto inv = inverse_on_support(iso);
  EXPECT_TRUE(equal_ae(compose(inv, iso), ProbMorphism::identity(a)));
  EXPECT_TRUE(equal_ae(compose(iso, inv), ProbMorphism::identity(b)));

  ProbMorphism squash(a, b, {0, 0, 1});
  EXPECT_FALSE(is_measure_preserving(squash));
  EXPECT_FALSE(is_isomorphism(squash));
  EXPECT_THROW(inverse_on_support(squash), std::invalid_argument);
  EXPECT_EQ(pushforward(squash), (std::vector<Rational>{q(1), q(0)}));
}

TEST(ProbMorphism, AeEqualityIgnoresNullOutcomes) {
  auto a = make_space({"a", "b", "z"}, {q(1, 2), q(1, 2), q(0)});
  auto b = make_space({"0", "1"}, {q(1, 2), q(1, 2)});
  ProbMorphism f(a, b, {0, 1, 0});
  EXPECT_TRUE(equal_ae(f, f.with_entry(2, 1)));
  EXPECT_EQ(first_ae_difference(f, f.with_entry(1, 0)), 1u);
}

TEST(ProbMorphism, SurjectivityOnSupport) {
  auto a = make_space({"a", "b"}, {q(1, 2), q(1, 2)});
  auto b = make_space({"0", "1", "2"}, {q(1, 2), q(1, 2), q(0)});
  EXPECT_TRUE(is_surjective_on_support(ProbMorphism(a, b, {0, 1})));
  EXPECT_FALSE(is_surjective_on_support(ProbMorphism(a, b, {0, 2})));
}

TEST(Independence, CoordinatesOfProduct) {
  auto a = make_space({"0", "1"}, {q(1, 3), q(2, 3)});
  auto b = make_space({"0", "1", "2"}, {q(1, 6), q(1, 2), q(1, 3)});
  auto ab = product({a, b});
  MixedRadix layout({2, 3});
  auto pa = coordinate_projection(ab, layout, 0, 1, a);
  auto pb = coordinate_projection(ab, layout, 1, 2, b);
  std::vector<ProbMorphism> maps{pa, pb};
  EXPECT_TRUE(independent(maps));
  EXPECT_TRUE(separates_support(*ab, atoms(*ab, maps)));
  std::vector<ProbMorphism> same{pa, pa};
  EXPECT_FALSE(independent(same));
  ASSERT_TRUE(independence_violation(same).has_value());
  std::vector<ProbMorphism> one{pa};
  EXPECT_FALSE(separates_support(*ab, atoms(*ab, one)));
}

TEST(Independence, PropertyAgainstBruteForce) {
  std::mt19937_64 rng(11);
  for (int draw = 0; draw < 100; ++draw) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    auto w = testing_support::random_measure(n, rng);
    auto space = make_space(testing_support::labels_0_to(n), w);
    auto two = make_space({"0", "1"}, {q(1, 2), q(1, 2)});
    std::vector<ProbMorphism> maps;
    for (int k = 0; k < 2; ++k) {
      std::vector<ProbMorphism::Index> table(n);
      for (auto& v : table) v = std::uniform_int_distribution<int>(0, 1)(rng);
      maps.emplace_back(space, two, table);
    }
    bool brute = true;
    for (ProbMorphism::Index x = 0; x < 2; ++x)
      for (ProbMorphism::Index y = 0; y < 2; ++y) {
        Rational joint = 0, px = 0, py = 0;
        for (std::size_t o = 0; o < n; ++o) {
          if (maps[0](o) == x) px += w[o];
          if (maps[1](o) == y) py += w[o];
          if (maps[0](o) == x && maps[1](o) == y) joint += w[o];
        }
        brute = brute && joint == px * py;
      }
    EXPECT_EQ(independent(maps), brute);
  }
}
