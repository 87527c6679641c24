#ifndef SYMTENSOR_COMBINATORICS_HPP
#define SYMTENSOR_COMBINATORICS_HPP

#include <cstdint>
#include <vector>

namespace symtensor {

// C(a, b) with the usual conventions: 0 for b < 0 or b > a.
std::int64_t binomial(int a, int b);

std::int64_t factorial(int m);

// Number of distinct orderings of a sorted tuple: len! / prod(run lengths!).
std::int64_t multiset_permutation_count(const std::vector<int>& sorted_tuple);

// All set partitions of {0,..,m-1} as block lists; blocks and elements in
// increasing order (restricted growth string enumeration). m = 0 gives the
// single empty partition.
std::vector<std::vector<std::vector<int>>> set_partitions(int m);

}  // namespace symtensor

#endif
