#ifndef SYMTENSOR_TRAIN_HPP
#define SYMTENSOR_TRAIN_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "symtensor/layer.hpp"
#include "symtensor/tensor.hpp"

namespace symtensor {

struct Dataset {
  int n = 0;
  int k = 0;
  int l = 0;  // 0 for scalar targets
  std::string task;
  std::uint64_t seed = 0;
  std::vector<SymmetricTensor> inputs;
  // order-l outputs in compressed rank order (identical to unrolled for l <= 1)
  std::vector<std::vector<double>> targets;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  int epochs = 50;
  int batch_size = 50;
  std::uint64_t seed = 0;
  double split = 0.9;         // train fraction
  double train_fraction = 1.0;  // fraction of the train split actually used
};

// Scalar target sum_{i,j} T_{i,j,i} on order-3 symmetric inputs with i.i.d.
// standard normal compressed entries.
Dataset gen_invariant_task(int n = 12, int count = 5000, std::uint64_t seed = 0);

// Vector target y_i = T_{i,i,i} on order-3 symmetric inputs.
Dataset gen_equivariant_task(int n = 8, int count = 10000, std::uint64_t seed = 0);

// Dense unconstrained linear map on the unrolled input, no bias.
class MlpModel {
 public:
  MlpModel(int n, int k, int l, std::uint64_t seed);

  int num_params() const { return static_cast<int>(weights_.size()); }
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  std::int64_t in_dim() const { return in_dim_; }
  std::int64_t out_dim() const { return out_dim_; }
  int n() const { return n_; }
  int k() const { return k_; }
  int l() const { return l_; }

  std::vector<double> forward(const std::vector<double>& unrolled_input) const;

 private:
  int n_, k_, l_;
  std::int64_t in_dim_, out_dim_;
  std::vector<double> weights_;  // row-major out_dim x in_dim
};

struct EpochStats {
  int epoch = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> curve;
  double final_train_mse = 0.0;
  double final_test_mse = 0.0;
};

// Plain SGD; deterministic given cfg.seed (per-epoch Fisher-Yates shuffles
// drawn from one generator). MSE is computed on unrolled outputs. Throws
// std::runtime_error if the loss becomes non-finite.
TrainResult sgd_train(EquivariantLayer& model, const Dataset& data, const TrainConfig& cfg);
TrainResult sgd_train(MlpModel& model, const Dataset& data, const TrainConfig& cfg);

// Mean squared error of a trained model over the given sample index range.
double eval_mse(const EquivariantLayer& model, const Dataset& data,
                std::size_t begin, std::size_t end);
double eval_mse(const MlpModel& model, const Dataset& data,
                std::size_t begin, std::size_t end);

struct BenchResult {
  int k = 0, l = 0, n = 0, reps = 0;
  double kernel_median_s = 0.0;
  double dense_median_s = 0.0;
  bool dense_feasible = true;
  std::vector<double> kernel_times_s;
  std::vector<double> dense_times_s;
};

// Medians of forward timings: kernel evaluation on compressed storage vs. an
// explicitly materialized unrolled weight matrix (re-assembled from lambda
// each call, as a training step must). The dense route is skipped and
// reported infeasible when the matrix would exceed the memory cap.
BenchResult benchmark_apply(int k, int l, int n, int reps, std::uint64_t seed = 0,
                            std::int64_t dense_memory_cap_bytes = 2LL << 30);

struct GeneralisationRow {
  int n = 0;
  double test_mse = 0.0;
};

// Evaluates a trained n-uniform layer on fresh data at other dimensions
// without retraining.
std::vector<GeneralisationRow> generalisation_eval(const EquivariantLayer& layer,
                                                   const std::string& task,
                                                   const std::vector<int>& n_values,
                                                   int count, std::uint64_t seed);

}  // namespace symtensor

#endif
