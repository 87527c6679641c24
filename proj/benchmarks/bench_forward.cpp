#include <benchmark/benchmark.h>

#include <random>

#include "symtensor/basis.hpp"
#include "symtensor/layer.hpp"
#include "symtensor/tensor.hpp"

namespace {

symtensor::SymmetricTensor random_tensor(int n, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  symtensor::IndexSpace space(n, k);
  std::vector<double> values(space.size());
  for (double& v : values) v = dist(rng);
  return symtensor::SymmetricTensor(n, k, values);
}

std::vector<double> random_lambdas(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(count);
  for (double& v : out) v = dist(rng);
  return out;
}

void BM_KernelForward(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int l = static_cast<int>(state.range(1));
  const int n = static_cast<int>(state.range(2));
  symtensor::EquivariantLayer layer(k, l);
  layer.lambdas() = random_lambdas(layer.lambdas().size(), 7);
  const auto input = random_tensor(n, k, 11);
  for (auto _ : state) {
    auto out = layer.forward(input);
    benchmark::DoNotOptimize(out);
  }
}

void BM_DenseForward(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int l = static_cast<int>(state.range(1));
  const int n = static_cast<int>(state.range(2));
  const auto diagrams = symtensor::canonical_bipartition_list(k, l, n);
  const auto lambdas = random_lambdas(diagrams.size(), 7);
  std::vector<symtensor::DenseMatrix> basis;
  for (const auto& d : diagrams) {
    basis.push_back(symtensor::unroll_matrix(symtensor::build_diagram_matrix(d, n)));
  }
  const auto input = random_tensor(n, k, 11);
  symtensor::DenseMatrix w(basis[0].rows, basis[0].cols);
  for (auto _ : state) {
    std::fill(w.data.begin(), w.data.end(), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (std::size_t j = 0; j < basis[i].data.size(); ++j) {
        w.data[j] += lambdas[i] * basis[i].data[j];
      }
    }
    const auto x = symtensor::unroll_tensor(input);
    auto y = symtensor::matvec(w, x);
    auto out = symtensor::compress_tensor(y, n, l);
    benchmark::DoNotOptimize(out);
  }
}

}  // namespace

BENCHMARK(BM_KernelForward)->Args({3, 0, 12})->Args({3, 1, 8})->Args({2, 1, 8})->Args({3, 1, 16});
BENCHMARK(BM_DenseForward)->Args({3, 0, 12})->Args({3, 1, 8})->Args({2, 1, 8})->Args({3, 1, 16});

BENCHMARK_MAIN();
