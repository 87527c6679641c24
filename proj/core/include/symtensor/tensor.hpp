#ifndef SYMTENSOR_TENSOR_HPP
#define SYMTENSOR_TENSOR_HPP

#include <span>
#include <vector>

#include "symtensor/index.hpp"

namespace symtensor {

// Compressed storage of a symmetric order-k tensor over R^n: one value per
// weakly increasing index, in rank order. Reads through arbitrary (unsorted)
// tuples realize full index-permutation symmetry.
class SymmetricTensor {
 public:
  SymmetricTensor(int n, int k);
  SymmetricTensor(int n, int k, std::vector<double> values);

  int n() const { return space_.n(); }
  int k() const { return space_.k(); }
  const IndexSpace& space() const { return space_; }

  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }
  double value_at_rank(std::int64_t r) const { return values_[r]; }
  double& value_at_rank(std::int64_t r) { return values_[r]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  // Value at sorted(idx); idx entries may come in any order.
  double get_unrolled(std::span<const int> idx) const;
  // Write access through a sorted index.
  double& at_sorted(std::span<const int> sorted_idx);
  double at_sorted(std::span<const int> sorted_idx) const;

 private:
  IndexSpace space_;
  std::vector<double> values_;
};

// Output value at act_index(sigma, I) equals input value at I.
SymmetricTensor act_tensor(const Permutation& sigma, const SymmetricTensor& t);

// Row-major offset of an arbitrary k-tuple in the n^k tensor power.
std::int64_t unrolled_offset(std::span<const int> idx, int n);

// Unrolled n^k coordinate vector of t: entry at every ordering of each index.
std::vector<double> unroll_tensor(const SymmetricTensor& t);

// Compress an n^k vector back; requires symmetry (values read at sorted form).
SymmetricTensor compress_tensor(std::span<const double> unrolled, int n, int k);

}  // namespace symtensor

#endif
