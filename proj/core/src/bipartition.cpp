#include "symtensor/bipartition.hpp"

#include <algorithm>
#include <stdexcept>

namespace symtensor {

bool block_less(const Block& a, const Block& b) {
  if (a.y != b.y) return a.y > b.y;
  return a.x > b.x;
}

Bipartition Bipartition::from_blocks(std::vector<Block> blocks) {
  for (const Block& blk : blocks) {
    if (blk.x < 0 || blk.y < 0 || blk.x + blk.y == 0)
      throw std::invalid_argument("Bipartition: every block needs x + y >= 1, x,y >= 0");
  }
  std::sort(blocks.begin(), blocks.end(), block_less);
  Bipartition out;
  out.blocks_ = std::move(blocks);
  return out;
}

int Bipartition::k() const {
  int sum = 0;
  for (const Block& blk : blocks_) sum += blk.x;
  return sum;
}

int Bipartition::l() const {
  int sum = 0;
  for (const Block& blk : blocks_) sum += blk.y;
  return sum;
}

std::strong_ordering Bipartition::operator<=>(const Bipartition& other) const {
  const std::size_t m = std::min(blocks_.size(), other.blocks_.size());
  for (std::size_t i = 0; i < m; ++i) {
    if (blocks_[i] == other.blocks_[i]) continue;
    return block_less(blocks_[i], other.blocks_[i]) ? std::strong_ordering::less
                                                    : std::strong_ordering::greater;
  }
  return blocks_.size() <=> other.blocks_.size();
}

namespace {

void partitions_rec(int remaining, int max_parts, int max_val, std::vector<int>& acc,
                    int pad_to, std::vector<IntegerPartition>& out) {
  if (remaining == 0) {
    IntegerPartition p{acc};
    p.parts.resize(pad_to, 0);
    out.push_back(std::move(p));
    return;
  }
  if (max_parts == 0) return;
  for (int part = std::min(remaining, max_val); part >= 1; --part) {
    acc.push_back(part);
    partitions_rec(remaining - part, max_parts - 1, part, acc, pad_to, out);
    acc.pop_back();
  }
}

}  // namespace

std::vector<IntegerPartition> integer_partitions(int m, int max_parts) {
  if (m < 0 || max_parts < 1) throw std::invalid_argument("integer_partitions: bad arguments");
  std::vector<IntegerPartition> out;
  std::vector<int> acc;
  partitions_rec(m, max_parts, m, acc, max_parts, out);
  return out;
}

std::vector<WeakComposition> weak_compositions(int m, int n) {
  if (m < 0 || n < 1) throw std::invalid_argument("weak_compositions: bad arguments");
  std::vector<WeakComposition> out;
  for (const IntegerPartition& p : integer_partitions(m, n)) {
    std::vector<int> tuple = p.parts;  // decreasing: the largest rearrangement
    do {
      out.push_back(WeakComposition{tuple});
    } while (std::prev_permutation(tuple.begin(), tuple.end()));
  }
  return out;
}

bool fits_inside(const WeakComposition& mu, const IntegerPartition& lambda) {
  if (mu.parts.size() != lambda.parts.size())
    throw std::invalid_argument("fits_inside: length mismatch");
  for (std::size_t i = 0; i < mu.parts.size(); ++i) {
    if (lambda.parts[i] < mu.parts[i]) return false;
  }
  return true;
}

bool duplication_test(const IntegerPartition& lambda, const WeakComposition& mu) {
  std::size_t i = 0;
  while (i < lambda.parts.size() && lambda.parts[i] > 0) {
    std::size_t j = i;
    while (j < lambda.parts.size() && lambda.parts[j] == lambda.parts[i]) ++j;
    for (std::size_t p = i + 1; p < j; ++p) {
      if (mu.parts[p] > mu.parts[p - 1]) return false;
    }
    i = j;
  }
  return true;
}

std::vector<Bipartition> generate_bipartitions(int k, int l, int n) {
  if (k < 0 || l < 0 || n < 1) throw std::invalid_argument("generate_bipartitions: bad arguments");
  if (k == 0 && l == 0) return {Bipartition{}};

  // m = min(k, l), ties to l: fewer compositions to scan.
  const bool turn_up_l = l <= k;
  const int m = turn_up_l ? l : k;

  std::vector<Bipartition> out;
  const auto lambdas = integer_partitions(k + l, n);
  const auto mus = weak_compositions(m, n);
  for (const IntegerPartition& lambda : lambdas) {
    int t = 0;
    while (t < n && lambda.parts[t] > 0) ++t;
    for (const WeakComposition& mu : mus) {
      bool support_ok = true;
      for (int i = t; i < n; ++i) {
        if (mu.parts[i] != 0) { support_ok = false; break; }
      }
      if (!support_ok) continue;
      if (!duplication_test(lambda, mu)) continue;
      if (!fits_inside(mu, lambda)) continue;

      std::vector<Block> blocks;
      blocks.reserve(t);
      for (int i = 0; i < t; ++i) {
        const int up = turn_up_l ? mu.parts[i] : lambda.parts[i] - mu.parts[i];
        blocks.push_back(Block{lambda.parts[i] - up, up});
      }
      out.push_back(Bipartition::from_blocks(std::move(blocks)));
    }
  }
  return out;
}

std::int64_t count_pn(int k, int l, int n) {
  return static_cast<std::int64_t>(generate_bipartitions(k, l, n).size());
}

std::int64_t count_p(int k, int l) {
  if (k == 0 && l == 0) return 1;
  return count_pn(k, l, k + l);
}

std::vector<Bipartition> canonical_bipartition_list(int k, int l, int n) {
  auto list = generate_bipartitions(k, l, n);
  std::sort(list.begin(), list.end(), [](const Bipartition& a, const Bipartition& b) {
    if (a.block_count() != b.block_count()) return a.block_count() < b.block_count();
    return a < b;
  });
  return list;
}

}  // namespace symtensor
