#ifndef SYMTENSOR_LAYER_HPP
#define SYMTENSOR_LAYER_HPP

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "symtensor/map_label.hpp"
#include "symtensor/tensor.hpp"

namespace symtensor {

// The equivariant linear layer W = sum_pi lambda_pi D_pi, executed through
// kernels; no weight matrix is materialized. Compiled n-uniformly: it holds
// one kernel per (k,l)-bipartition (count_p(k,l) of them, canonical order)
// and masks kernels whose diagram has more than n blocks at evaluation time,
// so one trained layer evaluates at any dimension.
class EquivariantLayer {
 public:
  EquivariantLayer(int k, int l, bool use_simplified_kernels = true);
  EquivariantLayer(int k, int l, std::vector<double> lambdas,
                   bool use_simplified_kernels = true);

  int k() const { return k_; }
  int l() const { return l_; }
  int num_params() const { return static_cast<int>(lambdas_.size()); }
  const std::vector<double>& lambdas() const { return lambdas_; }
  std::vector<double>& lambdas() { return lambdas_; }
  const std::vector<Kernel>& kernels() const { return kernels_; }
  const std::vector<Bipartition>& diagrams() const { return diagrams_; }

  // sum_pi lambda_pi D_pi(T); throws std::invalid_argument on an order mismatch.
  SymmetricTensor forward(const SymmetricTensor& t) const;

  // Per-basis-element outputs D_pi(T); forward is their lambda-combination.
  // Masked kernels yield zero tensors.
  std::vector<SymmetricTensor> basis_features(const SymmetricTensor& t) const;

  // Gradient of <upstream, forward(t)> w.r.t. lambda, where <.,.> is the
  // unrolled inner product (compressed entries weighted by multiplicity).
  std::vector<double> grad_lambdas(const SymmetricTensor& t,
                                   const SymmetricTensor& upstream) const;

 private:
  std::shared_ptr<const std::vector<KernelEvaluator>> evaluators_for(int n) const;

  // per-dimension evaluation plans, built lazily; shared across copies since
  // they depend only on (k, l, n), never on the weights
  struct EvaluatorCache {
    std::mutex mutex;
    std::map<int, std::shared_ptr<const std::vector<KernelEvaluator>>> by_n;
  };

  int k_, l_;
  std::vector<Bipartition> diagrams_;
  std::vector<Kernel> kernels_;
  std::vector<double> lambdas_;
  std::shared_ptr<EvaluatorCache> cache_;
};

// Unrolled inner product of two order-l tensors on the same space.
double unrolled_dot(const SymmetricTensor& a, const SymmetricTensor& b);

}  // namespace symtensor

#endif
