#include "symtensor/index.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "symtensor/combinatorics.hpp"

namespace symtensor {

IndexSpace::IndexSpace(int n, int k) : n_(n), k_(k) {
  if (n < 1) throw std::invalid_argument("IndexSpace: n must be >= 1");
  if (k < 0) throw std::invalid_argument("IndexSpace: k must be >= 0");
  size_ = binomial(k + n - 1, k);

  // suffix_[j][v] = sum_{u = v}^{n-1} C((k-1-j) + (n-u) - 1, k-1-j):
  // the number of weakly increasing tails of length k-j starting at >= v,
  // summed over the choices of the entry at position j.
  suffix_.assign(k, std::vector<std::int64_t>(n + 1, 0));
  for (int j = 0; j < k; ++j) {
    int m = k - 1 - j;
    for (int v = n - 1; v >= 0; --v) {
      suffix_[j][v] = suffix_[j][v + 1] + binomial(m + n - v - 1, m);
    }
  }

  mult_.resize(size_);
  std::vector<int> idx(k, 0);
  for (std::int64_t r = 0; r < size_; ++r) {
    if (r > 0) {
      int i = k - 1;
      while (idx[i] == n - 1) --i;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[i];
    }
    mult_[r] = multiset_permutation_count(idx);
  }
}

bool IndexSpace::valid(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != k_) return false;
  int prev = 0;
  for (int v : idx) {
    if (v < prev || v >= n_) return false;
    prev = v;
  }
  return true;
}

std::vector<int> IndexSpace::unrank(std::int64_t r) const {
  if (r < 0 || r >= size_) throw std::out_of_range("IndexSpace::unrank: rank out of range");
  std::vector<int> idx(k_);
  int prev = 0;
  for (int j = 0; j < k_; ++j) {
    int v = prev;
    while (suffix_[j][prev] - suffix_[j][v + 1] <= r) ++v;
    r -= suffix_[j][prev] - suffix_[j][v];
    idx[j] = v;
    prev = v;
  }
  return idx;
}

std::vector<std::vector<int>> IndexSpace::all() const {
  std::vector<std::vector<int>> out;
  out.reserve(size_);
  std::vector<int> idx(k_, 0);
  for (std::int64_t r = 0; r < size_; ++r) {
    if (r > 0) {
      int i = k_ - 1;
      while (idx[i] == n_ - 1) --i;
      ++idx[i];
      for (int j = i + 1; j < k_; ++j) idx[j] = idx[i];
    }
    out.push_back(idx);
  }
  return out;
}

Permutation Permutation::identity(int n) {
  Permutation p;
  p.images.resize(n);
  std::iota(p.images.begin(), p.images.end(), 0);
  return p;
}

Permutation Permutation::from_cycles(int n, const std::vector<std::vector<int>>& cycles) {
  Permutation p = identity(n);
  for (const auto& cycle : cycles) {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      int from = cycle[i] - 1;
      int to = cycle[(i + 1) % cycle.size()] - 1;
      if (from < 0 || from >= n || to < 0 || to >= n)
        throw std::invalid_argument("Permutation::from_cycles: point out of range");
      p.images[from] = to;
    }
  }
  if (!p.is_valid()) throw std::invalid_argument("Permutation::from_cycles: not a bijection");
  return p;
}

bool Permutation::is_valid() const {
  std::vector<bool> seen(images.size(), false);
  for (int v : images) {
    if (v < 0 || v >= n() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Permutation Permutation::inverse() const {
  Permutation p;
  p.images.resize(images.size());
  for (int i = 0; i < n(); ++i) p.images[images[i]] = i;
  return p;
}

Permutation operator*(const Permutation& a, const Permutation& b) {
  Permutation p;
  p.images.resize(a.images.size());
  for (int i = 0; i < a.n(); ++i) p.images[i] = a(b(i));
  return p;
}

std::vector<int> act_index(const Permutation& sigma, std::span<const int> idx) {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = sigma(idx[i]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace symtensor
