#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "test_support.hpp"
#include "tspbench/perm.hpp"

namespace tspbench {
namespace {

using testing::all_permutations;

TEST(Factorial, SmallValues) {
  EXPECT_EQ(to_string(factorial(0)), "1");
  EXPECT_EQ(to_string(factorial(1)), "1");
  EXPECT_EQ(to_string(factorial(5)), "120");
}

TEST(Factorial, SixteenMatchesIterativeProduct) {
  std::uint64_t product = 1;
  for (std::uint64_t k = 2; k <= 16; ++k) product *= k;
  EXPECT_EQ(product, 20922789888000ULL);
  EXPECT_TRUE(factorial(16) == product);
}

TEST(Factorial, LargestRepresentable) {
  // Values from an arbitrary-precision computation.
  EXPECT_EQ(to_string(factorial(33)), "8683317618811886495518194401280000000");
  EXPECT_EQ(to_string(factorial(34)), "295232799039604140847618609643520000000");
}

TEST(Factorial, CapacityError) {
  EXPECT_THROW(factorial(35), CapacityError);
  EXPECT_THROW(factorial(-1), ValidationError);
}

TEST(Factorial, ConsecutiveRatio) {
  for (int n = 1; n <= kMaxFactorialArg; ++n) {
    EXPECT_TRUE(factorial(n) / factorial(n - 1) == static_cast<PermIndex>(n)) << n;
    EXPECT_TRUE(factorial(n) % factorial(n - 1) == 0) << n;
  }
}

TEST(PermIndexText, RoundTripAndRejects) {
  const PermIndex big = factorial(34) + 12345;
  EXPECT_TRUE(parse_perm_index(to_string(big)) == big);
  EXPECT_EQ(to_string(parse_perm_index("18446744073709551621")), "18446744073709551621");
  EXPECT_EQ(to_string(~PermIndex{0}), "340282366920938463463374607431768211455");
  EXPECT_THROW(parse_perm_index("340282366920938463463374607431768211456"), ValidationError);
  EXPECT_THROW(parse_perm_index(""), ValidationError);
  EXPECT_THROW(parse_perm_index("-1"), ValidationError);
  EXPECT_THROW(parse_perm_index("12a"), ValidationError);
}

TEST(NextPermutation, Examples) {
  std::vector<int> a{1, 2, 3};
  EXPECT_TRUE(next_permutation(a));
  EXPECT_EQ(a, (std::vector<int>{1, 3, 2}));

  std::vector<int> b{3, 2, 1};
  EXPECT_FALSE(next_permutation(b));
  EXPECT_EQ(b, (std::vector<int>{1, 2, 3}));

  std::vector<int> c{2, 3, 1};
  EXPECT_TRUE(next_permutation(c));
  EXPECT_EQ(c, (std::vector<int>{3, 1, 2}));
}

TEST(NextPermutation, FollowsEnumerationOrder) {
  const auto perms = all_permutations(std::vector<int>{1, 2, 3});
  ASSERT_EQ(perms.size(), 6u);
  // The successor of [2,3,1] in the enumeration is [3,1,2].
  EXPECT_EQ(perms[3], (std::vector<int>{2, 3, 1}));
  EXPECT_EQ(perms[4], (std::vector<int>{3, 1, 2}));
}

TEST(Unrank, Examples) {
  const std::vector<int> items{1, 2, 3};
  EXPECT_EQ(unrank(0, items), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(unrank(5, items), (std::vector<int>{3, 2, 1}));
  EXPECT_EQ(unrank(3, items), (std::vector<int>{2, 3, 1}));
  EXPECT_EQ(unrank(3, items), all_permutations(items)[3]);
}

TEST(Unrank, Errors) {
  const std::vector<int> items{1, 2, 3};
  EXPECT_THROW(unrank(6, items), RangeError);
  EXPECT_THROW(unrank(0, std::vector<int>{2, 1}), ValidationError);
  EXPECT_THROW(unrank(0, std::vector<int>{1, 1}), ValidationError);
}

TEST(Unrank, EmptyAndLargeSets) {
  EXPECT_TRUE(unrank(0, std::vector<int>{}).empty());
  std::vector<int> items(33);
  for (int i = 0; i < 33; ++i) items[static_cast<std::size_t>(i)] = i + 1;
  const PermIndex last = factorial(33) - 1;
  auto reversed = items;
  std::reverse(reversed.begin(), reversed.end());
  EXPECT_EQ(unrank(last, items), reversed);
  EXPECT_TRUE(rank(reversed) == last);
}

TEST(Rank, Examples) {
  EXPECT_EQ(to_string(rank(std::vector<int>{1, 2, 3})), "0");
  EXPECT_EQ(to_string(rank(std::vector<int>{3, 2, 1})), "5");
  EXPECT_EQ(to_string(rank(std::vector<int>{2, 3, 1})), "3");
  EXPECT_THROW(rank(std::vector<int>{1, 2, 2}), ValidationError);
}

TEST(Rank, RoundTripExhaustiveUpToSeven) {
  for (int k = 0; k <= 7; ++k) {
    std::vector<int> items(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) items[static_cast<std::size_t>(i)] = 2 * i + 1;
    const auto perms = all_permutations(items);
    for (std::size_t i = 0; i < perms.size(); ++i) {
      const PermIndex r = rank(perms[i]);
      ASSERT_TRUE(r == i) << "k=" << k << " i=" << i;
      ASSERT_EQ(unrank(r, items), perms[i]);
    }
  }
}

TEST(Unrank, OrderingAndSuccessorExhaustiveUpToSix) {
  for (int k = 1; k <= 6; ++k) {
    std::vector<int> items(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) items[static_cast<std::size_t>(i)] = i;
    const PermIndex total = factorial(k);
    auto prev = unrank(0, items);
    for (PermIndex i = 1; i < total; ++i) {
      auto cur = unrank(i, items);
      ASSERT_TRUE(prev < cur);
      auto step = prev;
      ASSERT_TRUE(next_permutation(step));
      ASSERT_EQ(step, cur);
      prev = std::move(cur);
    }
    ASSERT_FALSE(next_permutation(prev));
    ASSERT_EQ(prev, items);
  }
}

TEST(Partition, Examples) {
  EXPECT_EQ(partition(6, 4), (std::vector<WorkRange>{{0, 2}, {2, 4}, {4, 5}, {5, 6}}));
  EXPECT_EQ(partition(6, 1), (std::vector<WorkRange>{{0, 6}}));
  EXPECT_EQ(partition(24, 5), (std::vector<WorkRange>{{0, 5}, {5, 10}, {10, 15}, {15, 20}, {20, 24}}));
}

TEST(Partition, MoreWorkersThanWork) {
  EXPECT_EQ(partition(2, 4), (std::vector<WorkRange>{{0, 1}, {1, 2}, {2, 2}, {2, 2}}));
  EXPECT_EQ(partition(0, 2), (std::vector<WorkRange>{{0, 0}, {0, 0}}));
}

TEST(Partition, ZeroWorkersRejected) { EXPECT_THROW(partition(10, 0), ValidationError); }

TEST(Partition, OffsetRange) {
  EXPECT_EQ(partition(WorkRange{10, 17}, 3), (std::vector<WorkRange>{{10, 13}, {13, 15}, {15, 17}}));
}

void expect_sound(PermIndex total, std::size_t workers) {
  const auto ranges = partition(total, workers);
  ASSERT_EQ(ranges.size(), workers);
  PermIndex cursor = 0;
  const PermIndex longest = ranges.front().size();
  bool seen_short = false;
  for (const auto& r : ranges) {
    ASSERT_TRUE(r.start == cursor);
    ASSERT_TRUE(r.start <= r.end);
    ASSERT_TRUE(longest - r.size() <= 1);
    if (r.size() < longest) {
      seen_short = true;
    } else {
      ASSERT_FALSE(seen_short) << "long range after a short one";
    }
    cursor = r.end;
  }
  ASSERT_TRUE(cursor == total);
}

TEST(Partition, SoundOnSampledGrid) {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<std::uint64_t> totals(0, 3628800);
  for (int i = 0; i < 2000; ++i) {
    const auto total = totals(gen);
    const auto workers = 1 + gen() % 64;
    expect_sound(total, workers);
  }
  for (std::size_t w = 1; w <= 10; ++w) {
    for (PermIndex t = 0; t <= 100; ++t) expect_sound(t, w);
  }
}

}  // namespace
}  // namespace tspbench
