#ifndef SYMTENSOR_MAP_LABEL_HPP
#define SYMTENSOR_MAP_LABEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "symtensor/basis.hpp"
#include "symtensor/bipartition.hpp"
#include "symtensor/tensor.hpp"

namespace symtensor {

// One spider of a (partially or fully) labelled bipartition diagram.
// label == kNoLabel marks an unlabelled spider. Label ids are dense integers:
// 0..t-1 are the fixed labels pinned by the grouped output, t.. are free.
struct Spider {
  int x = 0;      // input wires
  int y = 0;      // output wires
  int label = -1;

  friend auto operator<=>(const Spider&, const Spider&) = default;
};
inline constexpr int kNoLabel = -1;

// Partially labelled: exactly the spiders with output wires carry labels,
// pairwise distinct (merge-stable). Fully labelled: every spider does.
struct LabelledDiagram {
  std::vector<Spider> spiders;

  int num_labels() const;
  bool fully_labelled() const;
  // Labelled spiders sorted by label, unlabelled after by (y desc, x desc).
  void canonicalize();
  // Output tuple read off label-sorted spiders (label repeated y times).
  std::vector<int> output_pattern() const;
  // Merges spiders sharing a label (wire counts add); returns true if any
  // merge happened.
  bool merge_equal_labels();

  friend auto operator<=>(const LabelledDiagram&, const LabelledDiagram&) = default;
};

using GroupedOutput = std::vector<int>;  // l-tuple of label ids, first-occurrence form

// One summation term of a map label's right hand side. Labels < num_fixed
// refer to the left hand side; labels in [num_fixed, num_fixed + num_free)
// are summed over [n]. With distinct = true every label (lhs and free) takes
// a value different from all others; with false the free sums are
// unconstrained (the simplified form).
struct Term {
  std::int64_t coef = 1;
  std::vector<int> tuple;  // k label ids
  int num_free = 0;
  bool distinct = true;

  friend auto operator<=>(const Term&, const Term&) = default;
};

// Fully labelled diagram flattened to lhs/rhs tuples, all labels pairwise
// distinct, free labels summed.
struct GroupedMapLabel {
  std::vector<int> lhs;    // l label ids
  std::vector<int> rhs;    // k label ids
  int num_fixed = 0;
  int num_free = 0;
};

// rhs expanded to the distinct permutations of its tuple (modulo relabelling
// of free labels).
struct LeftGroupedMapLabel {
  std::vector<int> lhs;
  std::vector<Term> terms;
  int num_fixed = 0;
};

// A map label: one lhs index pattern plus the formal sum it receives.
// min_spiders is the number of distinct lhs labels; a term additionally
// needs num_fixed + num_free distinct values to contribute.
struct MapLabel {
  std::vector<int> lhs;
  std::vector<Term> terms;
  int min_spiders = 0;
};

// The compiled, n-parametric, matrix-free form of one diagram basis element.
// Evaluation at any n reproduces the unrolled diagram basis matrix action.
struct Kernel {
  Bipartition diagram;
  int k = 0;
  int l = 0;
  std::vector<MapLabel> labels;
  bool simplified = false;
};

// --- Subprocedures -------------------------------------------------------

// All grouped outputs of d with their partially labelled diagram sets.
std::map<GroupedOutput, std::vector<LabelledDiagram>> subprocedure_I(const Bipartition& d);

struct FullLabellings {
  std::vector<LabelledDiagram> diagrams;  // deduplicated, canonical order
  int raw_count = 0;                      // labellings enumerated before dedup
};

// All fully labelled diagrams for a partially labelled diagram.
FullLabellings subprocedure_II(const LabelledDiagram& partial);

GroupedMapLabel subprocedure_III(const LabelledDiagram& full);

LeftGroupedMapLabel subprocedure_IV(const GroupedMapLabel& g);

// Unrolls the left hand side: one map label per distinct permutation of the
// pattern, identifying permutations related by exchanging equal-multiplicity
// labels. The rhs is shared unchanged.
std::vector<MapLabel> subprocedure_V(const LeftGroupedMapLabel& lg);

// --- Compilation and evaluation ------------------------------------------

// Orchestrates I -> II -> (optional spider-count filter) -> III -> IV ->
// per-grouped-output summation -> V. Without n_filter the kernel is
// n-uniform: evaluation at any n >= 1 is correct because infeasible
// contributions vanish through their distinctness constraints.
Kernel compile_kernel(const Bipartition& d, std::optional<int> n_filter = std::nullopt);

// Semantically identical kernel whose terms carry no distinctness
// constraints: inclusion-exclusion over label merges, slot order normalised
// (valid on symmetric tensors), like terms collected into integer
// coefficients.
Kernel simplify_kernel(const Kernel& ker);

// Action on the unrolled tensor power: returns the n^l coordinate vector.
std::vector<double> evaluate_kernel_unrolled(const Kernel& ker, const SymmetricTensor& t);

// Same action, written directly into compressed storage.
SymmetricTensor evaluate_kernel(const Kernel& ker, const SymmetricTensor& t);

// Reusable evaluation state for one kernel at a fixed dimension: resolves the
// pooled-sum plans of unconstrained terms once, so repeated applications pay
// only one pass over the compressed entries per term. Holds a reference to
// the kernel; the kernel must outlive the evaluator.
class KernelEvaluator {
 public:
  KernelEvaluator(const Kernel& ker, int n);
  SymmetricTensor apply(const SymmetricTensor& t) const;
  int n() const { return n_; }

 private:
  struct TermPlan {
    const Term* term = nullptr;
    bool pooled = false;
    std::vector<int> used_ids;
    const void* plan = nullptr;  // cached pooled-plan entries
    std::int64_t table_size = 1;
  };
  struct LabelPlan {
    const MapLabel* label = nullptr;
    std::vector<int> chain;
    std::vector<TermPlan> terms;
    int max_free = 0;
    std::size_t max_tuple = 0;
  };

  const Kernel* kernel_;
  int n_;
  std::vector<LabelPlan> labels_;
};

}  // namespace symtensor

#endif
