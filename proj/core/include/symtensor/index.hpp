#ifndef SYMTENSOR_INDEX_HPP
#define SYMTENSOR_INDEX_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace symtensor {

// The index set of the k-th symmetric power of R^n: all weakly increasing
// k-tuples over {0,..,n-1} (0-based internally; 1-based at I/O boundaries).
// Ranks are order-isomorphic to lexicographic order and computed with the
// combinatorial number system, O(k) per rank with precomputed suffix tables.
class IndexSpace {
 public:
  IndexSpace(int n, int k);

  int n() const { return n_; }
  int k() const { return k_; }
  std::int64_t size() const { return size_; }

  std::int64_t rank(std::span<const int> idx) const {
    std::int64_t r = 0;
    int prev = 0;
    for (int j = 0; j < k_; ++j) {
      r += suffix_[j][prev] - suffix_[j][idx[j]];
      prev = idx[j];
    }
    return r;
  }
  std::vector<int> unrank(std::int64_t r) const;

  // All indices in rank (= lexicographic) order.
  std::vector<std::vector<int>> all() const;

  // Number of distinct orderings of the index (multinomial multiplicity);
  // weights compressed entries in unrolled sums and inner products.
  std::int64_t multiplicity(std::int64_t r) const { return mult_[r]; }
  const std::vector<std::int64_t>& multiplicities() const { return mult_; }

  bool valid(std::span<const int> idx) const;

 private:
  int n_, k_;
  std::int64_t size_;
  // suffix_[j][v] = number of weakly increasing (k-1-j)-suffixes with all
  // entries >= v, summed over first entry v..n-1.
  std::vector<std::vector<std::int64_t>> suffix_;
  std::vector<std::int64_t> mult_;
};

struct Permutation {
  std::vector<int> images;  // images[i] = sigma(i), 0-based

  static Permutation identity(int n);
  // Cycle notation over 1-based points, e.g. {{1,3,2}} is (1 3 2).
  static Permutation from_cycles(int n, const std::vector<std::vector<int>>& cycles);

  int n() const { return static_cast<int>(images.size()); }
  int operator()(int i) const { return images[i]; }
  Permutation inverse() const;
  // (a * b)(i) = a(b(i))
  friend Permutation operator*(const Permutation& a, const Permutation& b);
  bool is_valid() const;
};

// sigma applied entrywise, then re-sorted: the S_n action on the index set.
std::vector<int> act_index(const Permutation& sigma, std::span<const int> idx);

}  // namespace symtensor

#endif
