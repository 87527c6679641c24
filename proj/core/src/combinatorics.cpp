#include "symtensor/combinatorics.hpp"

namespace symtensor {

std::int64_t binomial(int a, int b) {
  if (b < 0 || b > a) return 0;
  if (b > a - b) b = a - b;
  std::int64_t result = 1;
  for (int i = 1; i <= b; ++i) {
    result = result * (a - b + i) / i;
  }
  return result;
}

std::int64_t factorial(int m) {
  std::int64_t result = 1;
  for (int i = 2; i <= m; ++i) result *= i;
  return result;
}

std::int64_t multiset_permutation_count(const std::vector<int>& sorted_tuple) {
  std::int64_t result = factorial(static_cast<int>(sorted_tuple.size()));
  std::size_t i = 0;
  while (i < sorted_tuple.size()) {
    std::size_t j = i;
    while (j < sorted_tuple.size() && sorted_tuple[j] == sorted_tuple[i]) ++j;
    result /= factorial(static_cast<int>(j - i));
    i = j;
  }
  return result;
}

std::vector<std::vector<std::vector<int>>> set_partitions(int m) {
  std::vector<std::vector<std::vector<int>>> out;
  if (m == 0) {
    out.push_back({});
    return out;
  }
  // Restricted growth strings: a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> a(m, 0);
  while (true) {
    int num_blocks = 0;
    for (int v : a) num_blocks = std::max(num_blocks, v + 1);
    std::vector<std::vector<int>> blocks(num_blocks);
    for (int i = 0; i < m; ++i) blocks[a[i]].push_back(i);
    out.push_back(std::move(blocks));

    int i = m - 1;
    for (; i > 0; --i) {
      int max_prefix = 0;
      for (int j = 0; j < i; ++j) max_prefix = std::max(max_prefix, a[j]);
      if (a[i] <= max_prefix) break;
    }
    if (i == 0) break;
    ++a[i];
    for (int j = i + 1; j < m; ++j) a[j] = 0;
  }
  return out;
}

}  // namespace symtensor
