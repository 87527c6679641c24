#include "symtensor/tensor.hpp"

#include <algorithm>
#include <stdexcept>

namespace symtensor {

SymmetricTensor::SymmetricTensor(int n, int k)
    : space_(n, k), values_(space_.size(), 0.0) {}

SymmetricTensor::SymmetricTensor(int n, int k, std::vector<double> values)
    : space_(n, k), values_(std::move(values)) {
  if (static_cast<std::int64_t>(values_.size()) != space_.size())
    throw std::invalid_argument("SymmetricTensor: value count does not match index space");
}

double SymmetricTensor::get_unrolled(std::span<const int> idx) const {
  std::vector<int> sorted(idx.begin(), idx.end());
  std::sort(sorted.begin(), sorted.end());
  if (!space_.valid(sorted)) throw std::out_of_range("SymmetricTensor: index entry out of range");
  return values_[space_.rank(sorted)];
}

double& SymmetricTensor::at_sorted(std::span<const int> sorted_idx) {
  return values_[space_.rank(sorted_idx)];
}

double SymmetricTensor::at_sorted(std::span<const int> sorted_idx) const {
  return values_[space_.rank(sorted_idx)];
}

SymmetricTensor act_tensor(const Permutation& sigma, const SymmetricTensor& t) {
  SymmetricTensor out(t.n(), t.k());
  const auto indices = t.space().all();
  for (std::int64_t r = 0; r < t.size(); ++r) {
    const auto moved = act_index(sigma, indices[r]);
    out.at_sorted(moved) = t.value_at_rank(r);
  }
  return out;
}

std::int64_t unrolled_offset(std::span<const int> idx, int n) {
  std::int64_t offset = 0;
  for (int v : idx) offset = offset * n + v;
  return offset;
}

std::vector<double> unroll_tensor(const SymmetricTensor& t) {
  const int n = t.n();
  const int k = t.k();
  std::int64_t total = 1;
  for (int i = 0; i < k; ++i) total *= n;
  std::vector<double> out(total);
  std::vector<int> idx(k, 0);
  for (std::int64_t off = 0; off < total; ++off) {
    out[off] = t.get_unrolled(idx);
    for (int j = k - 1; j >= 0; --j) {
      if (++idx[j] < n) break;
      idx[j] = 0;
    }
  }
  return out;
}

SymmetricTensor compress_tensor(std::span<const double> unrolled, int n, int k) {
  SymmetricTensor out(n, k);
  const auto indices = out.space().all();
  for (std::int64_t r = 0; r < out.size(); ++r) {
    out.value_at_rank(r) = unrolled[unrolled_offset(indices[r], n)];
  }
  return out;
}

}  // namespace symtensor
