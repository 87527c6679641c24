#ifndef SYMTENSOR_BASIS_HPP
#define SYMTENSOR_BASIS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "symtensor/bipartition.hpp"
#include "symtensor/dense.hpp"

namespace symtensor {

// Sparse 0/1 basis matrix of Hom(S^k(R^n), S^l(R^n)): rows indexed by ranks
// of the order-l index set, columns by ranks of the order-k index set.
struct BasisMatrix {
  enum class Kind { orbit, diagram };

  int k = 0;
  int l = 0;
  int n = 0;
  Kind kind = Kind::orbit;
  Bipartition source;
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> entries;  // sorted, unique

  DenseMatrix to_dense() const;
};

// pi <= theta iff theta's blocks are disjoint groupwise sums of pi's blocks.
// Throws std::invalid_argument on a (k,l) mismatch.
bool leq(const Bipartition& pi, const Bipartition& theta);

// All theta with pi <= theta, each distinct theta once, canonically ordered.
std::vector<Bipartition> coarsenings(const Bipartition& pi);

// Labels blocks with injective tuples over [n] and collects the resulting
// matrix units; the support is one S_n orbit on pairs of index sets.
// Throws std::invalid_argument if pi has more than n blocks.
BasisMatrix build_orbit_matrix(const Bipartition& pi, int n);

// Labels blocks with arbitrary tuples over [n], fusing equally labelled
// blocks; equals the sum of orbit matrices over coarsenings with <= n blocks.
BasisMatrix build_diagram_matrix(const Bipartition& pi, int n);

struct WeightMatrix {
  int k = 0;
  int l = 0;
  int n = 0;
  std::vector<double> lambdas;  // over canonical_bipartition_list(k, l, n)
};

// sum_pi lambda_pi D_pi; throws std::invalid_argument on a length mismatch.
DenseMatrix assemble_weight_matrix(const WeightMatrix& w);

// Re-express a symmetric-power matrix over full tensor-power indices:
// entry (I, J) of the n^l x n^k result is m at (sorted I, sorted J).
DenseMatrix unroll_matrix(const DenseMatrix& m, int k, int l, int n);
DenseMatrix unroll_matrix(const BasisMatrix& m);

// M[i][j] = 1 iff pi_i <= pi_j over the canonical list; expresses each
// diagram matrix in orbit matrices. Unitriangular in this order.
std::vector<std::vector<int>> transition_matrix(int k, int l, int n);

}  // namespace symtensor

#endif
