#ifndef SYMTENSOR_BIPARTITION_HPP
#define SYMTENSOR_BIPARTITION_HPP

#include <compare>
#include <cstdint>
#include <utility>
#include <vector>

namespace symtensor {

// A block [x, y]: x input wires (bottom), y output wires (top), x + y >= 1.
// Drawn as a "spider" with a central node.
struct Block {
  int x = 0;
  int y = 0;
  friend bool operator==(const Block&, const Block&) = default;
};

// Canonical block order: more output wires first, ties broken by more input
// wires. This matches the drawing order used throughout (and the map-label
// compiler's Step 1), so one canonical form serves everything.
bool block_less(const Block& a, const Block& b);

// A (k,l)-bipartition: a multiset of blocks with sum(x) = k, sum(y) = l,
// stored in canonical order so multiset equality is representation equality.
class Bipartition {
 public:
  Bipartition() = default;
  // Canonicalizes; throws std::invalid_argument on an all-zero block.
  static Bipartition from_blocks(std::vector<Block> blocks);

  const std::vector<Block>& blocks() const { return blocks_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  int k() const;
  int l() const;

  friend bool operator==(const Bipartition&, const Bipartition&) = default;
  std::strong_ordering operator<=>(const Bipartition& other) const;

 private:
  std::vector<Block> blocks_;
};

// Weakly decreasing non-negative parts, padded to a fixed length.
struct IntegerPartition {
  std::vector<int> parts;
  friend bool operator==(const IntegerPartition&, const IntegerPartition&) = default;
};

// Non-negative parts in any order.
struct WeakComposition {
  std::vector<int> parts;
  friend bool operator==(const WeakComposition&, const WeakComposition&) = default;
};

// All partitions of m into at most max_parts parts, each padded to max_parts
// entries, in decreasing lexicographic order.
std::vector<IntegerPartition> integer_partitions(int m, int max_parts);

// All n-tuples of non-negative integers summing to m. Grouped by underlying
// partition (partitions in decreasing lexicographic order, the distinct
// rearrangements of each in decreasing lexicographic order).
std::vector<WeakComposition> weak_compositions(int m, int n);

// lambda_i >= mu_i componentwise; throws std::invalid_argument on length mismatch.
bool fits_inside(const WeakComposition& mu, const IntegerPartition& lambda);

// For every maximal run of equal non-zero parts of lambda, the corresponding
// subtuple of mu must be weakly decreasing; filters rearranged duplicates.
bool duplication_test(const IntegerPartition& lambda, const WeakComposition& mu);

// Exactly the (k,l)-bipartitions with at most n blocks, no duplicates.
// k = l = 0 yields the single empty bipartition.
std::vector<Bipartition> generate_bipartitions(int k, int l, int n);

std::int64_t count_pn(int k, int l, int n);
std::int64_t count_p(int k, int l);

// The order that fixes the meaning of weight indices everywhere: block count
// ascending, then lexicographic on canonical block lists. The admissible list
// for a smaller n is always a prefix of the list for n = k + l.
std::vector<Bipartition> canonical_bipartition_list(int k, int l, int n);

}  // namespace symtensor

#endif
