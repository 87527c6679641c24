#include "symtensor/basis.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "symtensor/combinatorics.hpp"
#include "symtensor/index.hpp"

namespace symtensor {

DenseMatrix BasisMatrix::to_dense() const {
  DenseMatrix m(rows, cols);
  for (const auto& [r, c] : entries) m.at(r, c) = 1.0;
  return m;
}

bool leq(const Bipartition& pi, const Bipartition& theta) {
  if (pi.k() != theta.k() || pi.l() != theta.l())
    throw std::invalid_argument("leq: bipartitions have different (k,l)");
  const auto coarser = coarsenings(pi);
  return std::binary_search(coarser.begin(), coarser.end(), theta);
}

std::vector<Bipartition> coarsenings(const Bipartition& pi) {
  std::set<Bipartition> out;
  const int t = pi.block_count();
  for (const auto& partition : set_partitions(t)) {
    std::vector<Block> fused;
    fused.reserve(partition.size());
    for (const auto& group : partition) {
      Block sum;
      for (int i : group) {
        sum.x += pi.blocks()[i].x;
        sum.y += pi.blocks()[i].y;
      }
      fused.push_back(sum);
    }
    out.insert(Bipartition::from_blocks(std::move(fused)));
  }
  return {out.begin(), out.end()};
}

namespace {

// Reads the (I, J) index pair obtained by propagating each block's label to
// its wire ends, rows sorted.
std::pair<std::vector<int>, std::vector<int>> propagate(const std::vector<Block>& blocks,
                                                        const std::vector<int>& labels) {
  std::vector<int> top, bottom;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    top.insert(top.end(), blocks[i].y, labels[i]);
    bottom.insert(bottom.end(), blocks[i].x, labels[i]);
  }
  std::sort(top.begin(), top.end());
  std::sort(bottom.begin(), bottom.end());
  return {std::move(top), std::move(bottom)};
}

BasisMatrix build_matrix(const Bipartition& pi, int n, bool allow_repeats) {
  const int t = pi.block_count();
  if (t > n) throw std::invalid_argument("basis matrix: bipartition has more than n blocks");

  const int k = pi.k();
  const int l = pi.l();
  IndexSpace rows_space(n, l);
  IndexSpace cols_space(n, k);

  std::set<std::pair<std::int64_t, std::int64_t>> units;
  std::vector<int> tuple(t, 0);
  std::vector<bool> used(n, false);

  // Depth-first over t-length label tuples (injective or arbitrary).
  auto emit = [&]() {
    if (allow_repeats) {
      // Fuse blocks sharing a label, then propagate.
      std::vector<Block> fused;
      std::vector<int> labels;
      for (int i = 0; i < t; ++i) {
        const int lbl = tuple[i];
        auto it = std::find(labels.begin(), labels.end(), lbl);
        if (it == labels.end()) {
          labels.push_back(lbl);
          fused.push_back(pi.blocks()[i]);
        } else {
          Block& blk = fused[it - labels.begin()];
          blk.x += pi.blocks()[i].x;
          blk.y += pi.blocks()[i].y;
        }
      }
      auto [top, bottom] = propagate(fused, labels);
      units.emplace(rows_space.rank(top), cols_space.rank(bottom));
    } else {
      auto [top, bottom] = propagate(pi.blocks(), tuple);
      units.emplace(rows_space.rank(top), cols_space.rank(bottom));
    }
  };

  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == t) {
      emit();
      return;
    }
    for (int v = 0; v < n; ++v) {
      if (!allow_repeats) {
        if (used[v]) continue;
        used[v] = true;
      }
      tuple[depth] = v;
      self(self, depth + 1);
      if (!allow_repeats) used[v] = false;
    }
  };
  rec(rec, 0);

  BasisMatrix out;
  out.k = k;
  out.l = l;
  out.n = n;
  out.kind = allow_repeats ? BasisMatrix::Kind::diagram : BasisMatrix::Kind::orbit;
  out.source = pi;
  out.rows = rows_space.size();
  out.cols = cols_space.size();
  out.entries.assign(units.begin(), units.end());
  return out;
}

}  // namespace

BasisMatrix build_orbit_matrix(const Bipartition& pi, int n) {
  return build_matrix(pi, n, /*allow_repeats=*/false);
}

BasisMatrix build_diagram_matrix(const Bipartition& pi, int n) {
  return build_matrix(pi, n, /*allow_repeats=*/true);
}

DenseMatrix assemble_weight_matrix(const WeightMatrix& w) {
  const auto list = canonical_bipartition_list(w.k, w.l, w.n);
  if (list.size() != w.lambdas.size())
    throw std::invalid_argument("assemble_weight_matrix: lambda length mismatch");
  IndexSpace rows_space(w.n, w.l);
  IndexSpace cols_space(w.n, w.k);
  DenseMatrix out(rows_space.size(), cols_space.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const BasisMatrix d = build_diagram_matrix(list[i], w.n);
    for (const auto& [r, c] : d.entries) out.at(r, c) += w.lambdas[i];
  }
  return out;
}

DenseMatrix unroll_matrix(const DenseMatrix& m, int k, int l, int n) {
  IndexSpace rows_space(n, l);
  IndexSpace cols_space(n, k);
  if (m.rows != rows_space.size() || m.cols != cols_space.size())
    throw std::invalid_argument("unroll_matrix: matrix does not have symmetric-power shape");

  std::int64_t out_rows = 1, out_cols = 1;
  for (int i = 0; i < l; ++i) out_rows *= n;
  for (int i = 0; i < k; ++i) out_cols *= n;

  // Row-major tuple streams over [n]^l and [n]^k; each (I, J) entry reads m
  // at the sorted pair.
  std::vector<std::int64_t> col_rank(out_cols);
  {
    std::vector<int> idx(k, 0), sorted(k);
    for (std::int64_t c = 0; c < out_cols; ++c) {
      sorted = idx;
      std::sort(sorted.begin(), sorted.end());
      col_rank[c] = cols_space.rank(sorted);
      for (int j = k - 1; j >= 0; --j) {
        if (++idx[j] < n) break;
        idx[j] = 0;
      }
    }
  }
  DenseMatrix out(out_rows, out_cols);
  std::vector<int> idx(l, 0), sorted(l);
  for (std::int64_t r = 0; r < out_rows; ++r) {
    sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    const std::int64_t rr = rows_space.rank(sorted);
    for (std::int64_t c = 0; c < out_cols; ++c) {
      out.at(r, c) = m.at(rr, col_rank[c]);
    }
    for (int j = l - 1; j >= 0; --j) {
      if (++idx[j] < n) break;
      idx[j] = 0;
    }
  }
  return out;
}

DenseMatrix unroll_matrix(const BasisMatrix& m) {
  return unroll_matrix(m.to_dense(), m.k, m.l, m.n);
}

std::vector<std::vector<int>> transition_matrix(int k, int l, int n) {
  const auto list = canonical_bipartition_list(k, l, n);
  const std::size_t p = list.size();
  std::vector<std::vector<int>> out(p, std::vector<int>(p, 0));
  for (std::size_t i = 0; i < p; ++i) {
    const auto coarser = coarsenings(list[i]);
    for (std::size_t j = 0; j < p; ++j) {
      if (std::binary_search(coarser.begin(), coarser.end(), list[j])) out[i][j] = 1;
    }
  }
  return out;
}

}  // namespace symtensor
