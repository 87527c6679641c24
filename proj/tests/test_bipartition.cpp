#include <set>

#include "doctest.h"
#include "symtensor/bipartition.hpp"
#include "symtensor/combinatorics.hpp"

using namespace symtensor;

namespace {

// independent generator: all multisets of non-zero blocks with the right sums
std::set<std::vector<std::pair<int, int>>> brute_force(int k, int l, int n) {
  std::set<std::vector<std::pair<int, int>>> out;
  std::vector<std::pair<int, int>> acc;
  auto rec = [&](auto&& self, int k_rem, int l_rem, int blocks_left,
                 std::pair<int, int> min_pair) -> void {
    if (k_rem == 0 && l_rem == 0) {
      auto sorted = acc;
      std::sort(sorted.begin(), sorted.end());
      out.insert(sorted);
      return;
    }
    if (blocks_left == 0) return;
    for (int x = 0; x <= k_rem; ++x) {
      for (int y = 0; y <= l_rem; ++y) {
        if (x + y == 0) continue;
        if (std::pair{x, y} < min_pair) continue;
        acc.emplace_back(x, y);
        self(self, k_rem - x, l_rem - y, blocks_left - 1, {x, y});
        acc.pop_back();
      }
    }
  };
  rec(rec, k, l, n, {0, 0});
  return out;
}

std::vector<std::pair<int, int>> key_of(const Bipartition& b) {
  std::vector<std::pair<int, int>> key;
  for (const Block& blk : b.blocks()) key.emplace_back(blk.x, blk.y);
  std::sort(key.begin(), key.end());
  return key;
}

}  // namespace

TEST_CASE("integer_partitions fixed examples") {
  const auto p53 = integer_partitions(5, 3);
  const std::vector<IntegerPartition> expect = {
      {{5, 0, 0}}, {{4, 1, 0}}, {{3, 2, 0}}, {{3, 1, 1}}, {{2, 2, 1}}};
  CHECK(p53 == expect);
  CHECK(integer_partitions(0, 2) == std::vector<IntegerPartition>{{{0, 0}}});
  CHECK(integer_partitions(3, 1) == std::vector<IntegerPartition>{{{3}}});
}

TEST_CASE("weak_compositions fixed examples") {
  const auto w23 = weak_compositions(2, 3);
  const std::vector<WeakComposition> expect = {{{2, 0, 0}}, {{0, 2, 0}}, {{0, 0, 2}},
                                               {{1, 1, 0}}, {{1, 0, 1}}, {{0, 1, 1}}};
  CHECK(w23 == expect);
  CHECK(weak_compositions(0, 4) == std::vector<WeakComposition>{{{0, 0, 0, 0}}});
  CHECK(weak_compositions(1, 2) == std::vector<WeakComposition>{{{1, 0}}, {{0, 1}}});
  // count C(m+n-1, n-1)
  for (int m = 0; m <= 5; ++m) {
    for (int n = 1; n <= 4; ++n) {
      CHECK(static_cast<std::int64_t>(weak_compositions(m, n).size()) ==
            binomial(m + n - 1, n - 1));
    }
  }
}

TEST_CASE("fits_inside") {
  CHECK(fits_inside(WeakComposition{{2, 3, 0, 2, 0, 0}}, IntegerPartition{{6, 4, 4, 2, 0, 0}}));
  CHECK_FALSE(
      fits_inside(WeakComposition{{3, 5, 3, 2, 0, 1}}, IntegerPartition{{6, 4, 4, 2, 0, 0}}));
  CHECK(fits_inside(WeakComposition{{3, 2, 1}}, IntegerPartition{{3, 2, 1}}));
  CHECK_THROWS(fits_inside(WeakComposition{{1, 0}}, IntegerPartition{{1, 0, 0}}));
}

TEST_CASE("duplication_test") {
  CHECK_FALSE(duplication_test(IntegerPartition{{3, 1, 1}}, WeakComposition{{1, 0, 1}}));
  CHECK_FALSE(duplication_test(IntegerPartition{{2, 2, 1}}, WeakComposition{{0, 1, 1}}));
  CHECK(duplication_test(IntegerPartition{{3, 2, 1}}, WeakComposition{{0, 1, 1}}));
  CHECK(duplication_test(IntegerPartition{{3, 1, 1}}, WeakComposition{{1, 1, 0}}));
  CHECK(duplication_test(IntegerPartition{{2, 2, 1}}, WeakComposition{{1, 0, 1}}));
}

TEST_CASE("generate_bipartitions fixed cases") {
  // the double-valid (lambda, mu) slip in the reference text would give 13;
  // brute force and the orbit count both give 12
  CHECK(generate_bipartitions(3, 2, 3).size() == 12);

  const auto found = generate_bipartitions(2, 1, 3);
  CHECK(found.size() == 4);
  std::set<std::vector<std::pair<int, int>>> keys;
  for (const auto& b : found) keys.insert(key_of(b));
  const std::set<std::vector<std::pair<int, int>>> expect = {
      {{2, 1}},
      {{0, 1}, {2, 0}},
      {{1, 0}, {1, 1}},
      {{0, 1}, {1, 0}, {1, 0}}};
  CHECK(keys == expect);

  const auto single = generate_bipartitions(1, 1, 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0].blocks() == std::vector<Block>{{1, 1}});

  CHECK(generate_bipartitions(0, 0, 1).size() == 1);
  CHECK(generate_bipartitions(0, 0, 1)[0].block_count() == 0);
}

TEST_CASE("counts match the reference table") {
  const int table[6][6] = {{1, 1, 2, 3, 5, 7},      {1, 2, 4, 7, 12, 19},
                           {2, 4, 9, 16, 29, 47},   {3, 7, 16, 31, 57, 97},
                           {5, 12, 29, 57, 109, 189}, {7, 19, 47, 97, 189, 339}};
  for (int k = 0; k <= 5; ++k) {
    for (int l = 0; l <= 5; ++l) {
      CHECK(count_p(k, l) == table[k][l]);
      CHECK(count_p(k, l) == count_p(l, k));
    }
  }
  CHECK(count_p(5, 5) == 339);
  CHECK(count_p(3, 0) == 3);
}

TEST_CASE("count_p(k,0) equals the number of integer partitions of k") {
  for (int k = 0; k <= 6; ++k) {
    const auto partitions = integer_partitions(k, std::max(k, 1));
    CHECK(count_p(k, 0) == static_cast<std::int64_t>(partitions.size()));
  }
}

TEST_CASE("monotone in n and stabilizes at k+l") {
  for (int k = 0; k <= 4; ++k) {
    for (int l = 0; l + k <= 5; ++l) {
      if (k + l == 0) continue;
      std::int64_t prev = 0;
      for (int n = 1; n <= k + l + 2; ++n) {
        const auto now = count_pn(k, l, n);
        CHECK(now >= prev);
        prev = now;
      }
      CHECK(count_pn(k, l, k + l) == count_pn(k, l, k + l + 2));
    }
  }
}

TEST_CASE("no duplicates and invariants hold") {
  for (int k = 0; k <= 4; ++k) {
    for (int l = 0; l + k <= 5; ++l) {
      for (int n = 1; n <= k + l + 1; ++n) {
        const auto list = generate_bipartitions(k, l, n);
        std::set<Bipartition> unique(list.begin(), list.end());
        CHECK(unique.size() == list.size());
        for (const auto& b : list) {
          CHECK(b.k() == k);
          CHECK(b.l() == l);
          CHECK(b.block_count() <= n);
          for (const auto& blk : b.blocks()) CHECK(blk.x + blk.y >= 1);
        }
      }
    }
  }
}

TEST_CASE("brute-force oracle agreement for k+l <= 5") {
  for (int k = 0; k <= 5; ++k) {
    for (int l = 0; l + k <= 5; ++l) {
      for (int n = 1; n <= k + l + 1; ++n) {
        const auto expect = brute_force(k, l, n);
        const auto list = generate_bipartitions(k, l, n);
        std::set<std::vector<std::pair<int, int>>> got;
        for (const auto& b : list) got.insert(key_of(b));
        CHECK(got == expect);
      }
    }
  }
}

TEST_CASE("canonical list order: block count ascending, prefix stability") {
  for (int k = 0; k <= 4; ++k) {
    for (int l = 0; l + k <= 4; ++l) {
      if (k + l == 0) continue;
      const auto full = canonical_bipartition_list(k, l, k + l);
      for (std::size_t i = 1; i < full.size(); ++i) {
        CHECK(full[i - 1].block_count() <= full[i].block_count());
      }
      for (int n = 1; n <= k + l; ++n) {
        const auto capped = canonical_bipartition_list(k, l, n);
        REQUIRE(capped.size() <= full.size());
        for (std::size_t i = 0; i < capped.size(); ++i) CHECK(capped[i] == full[i]);
      }
    }
  }
}

TEST_CASE("bipartition validation") {
  CHECK_THROWS(Bipartition::from_blocks({{0, 0}}));
  CHECK_THROWS(Bipartition::from_blocks({{1, 1}, {0, 0}}));
  const auto b = Bipartition::from_blocks({{1, 0}, {0, 1}, {2, 1}});
  CHECK(b.blocks() == std::vector<Block>{{2, 1}, {0, 1}, {1, 0}});
}
