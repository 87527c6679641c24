#include "symtensor/layer.hpp"

#include <stdexcept>

namespace symtensor {

EquivariantLayer::EquivariantLayer(int k, int l, bool use_simplified_kernels)
    : k_(k), l_(l), cache_(std::make_shared<EvaluatorCache>()) {
  diagrams_ = canonical_bipartition_list(k, l, k + l > 0 ? k + l : 1);
  kernels_.reserve(diagrams_.size());
  for (const Bipartition& d : diagrams_) {
    Kernel ker = compile_kernel(d);
    kernels_.push_back(use_simplified_kernels ? simplify_kernel(ker) : std::move(ker));
  }
  lambdas_.assign(diagrams_.size(), 0.0);
}

EquivariantLayer::EquivariantLayer(int k, int l, std::vector<double> lambdas,
                                   bool use_simplified_kernels)
    : EquivariantLayer(k, l, use_simplified_kernels) {
  if (lambdas.size() != lambdas_.size())
    throw std::invalid_argument("EquivariantLayer: lambda length mismatch");
  lambdas_ = std::move(lambdas);
}

std::shared_ptr<const std::vector<KernelEvaluator>> EquivariantLayer::evaluators_for(int n) const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto it = cache_->by_n.find(n);
  if (it == cache_->by_n.end()) {
    auto evals = std::make_shared<std::vector<KernelEvaluator>>();
    evals->reserve(kernels_.size());
    for (const Kernel& ker : kernels_) evals->emplace_back(ker, n);
    it = cache_->by_n.emplace(n, std::move(evals)).first;
  }
  return it->second;
}

SymmetricTensor EquivariantLayer::forward(const SymmetricTensor& t) const {
  if (t.k() != k_) throw std::invalid_argument("EquivariantLayer::forward: order mismatch");
  const int n = t.n();
  const auto evals = evaluators_for(n);
  SymmetricTensor out(n, l_);
  for (std::size_t i = 0; i < kernels_.size(); ++i) {
    if (diagrams_[i].block_count() > n) continue;
    if (lambdas_[i] == 0.0) continue;
    const SymmetricTensor feature = (*evals)[i].apply(t);
    for (std::int64_t r = 0; r < out.size(); ++r) {
      out.value_at_rank(r) += lambdas_[i] * feature.value_at_rank(r);
    }
  }
  return out;
}

std::vector<SymmetricTensor> EquivariantLayer::basis_features(const SymmetricTensor& t) const {
  if (t.k() != k_) throw std::invalid_argument("EquivariantLayer::basis_features: order mismatch");
  const int n = t.n();
  const auto evals = evaluators_for(n);
  std::vector<SymmetricTensor> out;
  out.reserve(kernels_.size());
  for (std::size_t i = 0; i < kernels_.size(); ++i) {
    if (diagrams_[i].block_count() > n) {
      out.emplace_back(n, l_);
    } else {
      out.push_back((*evals)[i].apply(t));
    }
  }
  return out;
}

std::vector<double> EquivariantLayer::grad_lambdas(const SymmetricTensor& t,
                                                   const SymmetricTensor& upstream) const {
  if (upstream.k() != l_ || upstream.n() != t.n())
    throw std::invalid_argument("EquivariantLayer::grad_lambdas: shape mismatch");
  const auto features = basis_features(t);
  std::vector<double> grad(features.size(), 0.0);
  for (std::size_t i = 0; i < features.size(); ++i) {
    grad[i] = unrolled_dot(upstream, features[i]);
  }
  return grad;
}

double unrolled_dot(const SymmetricTensor& a, const SymmetricTensor& b) {
  if (a.n() != b.n() || a.k() != b.k())
    throw std::invalid_argument("unrolled_dot: shape mismatch");
  const auto& mult = a.space().multiplicities();
  double acc = 0.0;
  for (std::int64_t r = 0; r < a.size(); ++r) {
    acc += static_cast<double>(mult[r]) * a.value_at_rank(r) * b.value_at_rank(r);
  }
  return acc;
}

}  // namespace symtensor
