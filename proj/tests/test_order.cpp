#include <gtest/gtest.h>

#include <set>

#include "convlim/order.hpp"
#include "support.hpp"

using namespace convlim;
using testing_support::labels_0_to;

namespace {

TimeSetPtr abc() { return make_time_set({"c", "a", "b", "z"}); }

}  // namespace

TEST(TimeSet, KeepsDeclarationOrder) {
  auto t = abc();
  EXPECT_EQ(t->index_of("c"), 0u);
  EXPECT_EQ(t->index_of("z"), 3u);
  EXPECT_TRUE(t->contains("a"));
  EXPECT_FALSE(t->contains("q"));
  EXPECT_THROW(t->index_of("q"), std::out_of_range);
}

TEST(TimeSet, RejectsDuplicatesAndSingletons) {
  EXPECT_THROW(make_time_set({"a"}), std::invalid_argument);
  EXPECT_THROW(make_time_set({"a", "b", "a"}), std::invalid_argument);
}

TEST(Partition, ValidatesPoints) {
  auto t = abc();
  EXPECT_THROW(Partition(t, {1}), std::invalid_argument);
  EXPECT_THROW(Partition(t, {2, 1}), std::invalid_argument);
  EXPECT_THROW(Partition(t, {0, 4}), std::invalid_argument);
  auto p = Partition::from_labels(t, {"c", "b", "z"});
  EXPECT_EQ(p.to_string(), "{c,b,z}");
  EXPECT_EQ(p.cells(), 2u);
  EXPECT_EQ(p.cell_starting_at(2), 1u);
  EXPECT_THROW(p.cell_starting_at(1), std::invalid_argument);
}

TEST(Partition, RefinementAndSubset) {
  auto t = make_time_set(labels_0_to(5));
  Partition i(t, {0, 4});
  Partition j(t, {0, 2, 4});
  Partition k(t, {1, 2, 3});
  EXPECT_TRUE(refines(i, j));
  EXPECT_FALSE(refines(j, i));
  EXPECT_FALSE(refines(k, j));
  EXPECT_TRUE(is_subset(Partition(t, {1, 3}), Partition(t, {0, 1, 2, 3})));
  EXPECT_FALSE(refines(Partition(t, {1, 3}), Partition(t, {0, 1, 2, 3})));
  auto other = make_time_set(labels_0_to(6));
  EXPECT_THROW(is_subset(i, Partition(other, {0, 4})), std::invalid_argument);
}

TEST(Partition, BlocksRoundTrip) {
  auto t = make_time_set(labels_0_to(6));
  Partition i(t, {0, 2, 5});
  Partition j(t, {0, 1, 2, 4, 5});
  auto blocks = decompose_blocks(i, j);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0], Partition(t, {0, 1, 2}));
  EXPECT_EQ(blocks[1], Partition(t, {2, 4, 5}));
  EXPECT_EQ(merge_blocks(blocks), j);
  EXPECT_THROW(decompose_blocks(j, i), std::invalid_argument);
}

TEST(Partition, LeftCenterRight) {
  auto t = make_time_set(labels_0_to(7));
  Partition i(t, {2, 4});
  Partition j(t, {0, 2, 3, 4, 6});
  auto d = decompose_lcr(i, j);
  EXPECT_EQ(d.left, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(d.middle, Partition(t, {2, 3, 4}));
  EXPECT_EQ(d.right, (std::vector<std::size_t>{4, 6}));
}

class EnumerationSize : public ::testing::TestWithParam<std::size_t> {};

TEST_P(EnumerationSize, CountsAndMaximum) {
  const std::size_t n = GetParam();
  auto t = make_time_set(labels_0_to(n));
  auto all = enumerate_all(t);
  EXPECT_EQ(all.elements.size(), (std::size_t{1} << n) - n - 1);
  EXPECT_EQ(all.elements[all.maximum], Partition::full_grid(t, 0, n - 1));
  std::set<Partition> unique(all.elements.begin(), all.elements.end());
  EXPECT_EQ(unique.size(), all.elements.size());
  for (const auto& p : all.elements) EXPECT_TRUE(is_subset(p, all.elements[all.maximum]));

  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t e = s + 1; e < n; ++e) {
      auto w = enumerate_window(t, s, e);
      EXPECT_EQ(w.elements.size(), std::size_t{1} << (e - s - 1));
      EXPECT_EQ(w.elements[w.maximum], Partition::full_grid(t, s, e));
      for (const auto& p : w.elements) {
        EXPECT_EQ(p.first(), s);
        EXPECT_EQ(p.last(), e);
        EXPECT_TRUE(refines(Partition::trivial(t, s, e), p));
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, EnumerationSize, ::testing::Values(2, 3, 4, 5, 6));

TEST(Enumeration, RejectsEmptyWindow) {
  auto t = make_time_set(labels_0_to(3));
  EXPECT_THROW(enumerate_window(t, 1, 1), std::invalid_argument);
  EXPECT_THROW(enumerate_window(t, 2, 1), std::invalid_argument);
}

TEST(PairWindow, Nesting) {
  EXPECT_TRUE((PairWindow{1, 2}.within(PairWindow{0, 3})));
  EXPECT_TRUE((PairWindow{1, 1}.within(PairWindow{1, 3})));
  EXPECT_FALSE((PairWindow{0, 2}.within(PairWindow{1, 3})));
  EXPECT_TRUE((PairWindow{2, 2}.degenerate()));
}
