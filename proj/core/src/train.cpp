#include "symtensor/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "symtensor/basis.hpp"

namespace symtensor {

namespace {

std::vector<double> random_normal(std::mt19937_64& rng, std::size_t count,
                                  double stddev = 1.0) {
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> out(count);
  for (double& v : out) v = dist(rng);
  return out;
}

// Deterministic Fisher-Yates; std::shuffle is implementation-defined.
void fisher_yates(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

std::int64_t ipow(int base, int exp) {
  std::int64_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

Dataset gen_invariant_task(int n, int count, std::uint64_t seed) {
  Dataset data;
  data.n = n;
  data.k = 3;
  data.l = 0;
  data.task = "invariant";
  data.seed = seed;
  std::mt19937_64 rng(seed);
  const IndexSpace space(n, 3);
  for (int s = 0; s < count; ++s) {
    SymmetricTensor t(n, 3, random_normal(rng, space.size()));
    double target = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        target += t.get_unrolled(std::vector<int>{i, j, i});
      }
    }
    data.inputs.push_back(std::move(t));
    data.targets.push_back({target});
  }
  return data;
}

Dataset gen_equivariant_task(int n, int count, std::uint64_t seed) {
  Dataset data;
  data.n = n;
  data.k = 3;
  data.l = 1;
  data.task = "equivariant";
  data.seed = seed;
  std::mt19937_64 rng(seed);
  const IndexSpace space(n, 3);
  for (int s = 0; s < count; ++s) {
    SymmetricTensor t(n, 3, random_normal(rng, space.size()));
    std::vector<double> target(n);
    for (int i = 0; i < n; ++i) target[i] = t.get_unrolled(std::vector<int>{i, i, i});
    data.inputs.push_back(std::move(t));
    data.targets.push_back(std::move(target));
  }
  return data;
}

MlpModel::MlpModel(int n, int k, int l, std::uint64_t seed) : n_(n), k_(k), l_(l) {
  in_dim_ = ipow(n, k);
  out_dim_ = ipow(n, l);
  std::mt19937_64 rng(seed);
  weights_ = random_normal(rng, static_cast<std::size_t>(in_dim_ * out_dim_),
                           1.0 / std::sqrt(static_cast<double>(in_dim_)));
}

std::vector<double> MlpModel::forward(const std::vector<double>& unrolled_input) const {
  std::vector<double> out(out_dim_, 0.0);
  for (std::int64_t o = 0; o < out_dim_; ++o) {
    const double* row = weights_.data() + o * in_dim_;
    double acc = 0.0;
    for (std::int64_t i = 0; i < in_dim_; ++i) acc += row[i] * unrolled_input[i];
    out[o] = acc;
  }
  return out;
}

namespace {

// Both models reduce to a linear map on per-sample feature vectors:
//   layer: features[s][p][r] = D_p(T_s) compressed, params = lambdas
//   mlp:   features = unrolled input, one weight row per output entry
// mult weights realize the unrolled MSE on compressed outputs.

struct LayerCache {
  std::vector<std::vector<std::vector<double>>> features;  // sample -> param -> out rank
  std::vector<std::int64_t> mult;
  std::int64_t out_entries = 1;  // n^l
};

LayerCache build_layer_cache(const EquivariantLayer& model, const Dataset& data) {
  LayerCache cache;
  cache.out_entries = ipow(data.n, model.l());
  IndexSpace out_space(data.n, model.l());
  cache.mult = out_space.multiplicities();
  cache.features.reserve(data.inputs.size());
  for (const SymmetricTensor& t : data.inputs) {
    const auto feats = model.basis_features(t);
    std::vector<std::vector<double>> rows;
    rows.reserve(feats.size());
    for (const SymmetricTensor& f : feats) rows.push_back(f.values());
    cache.features.push_back(std::move(rows));
  }
  return cache;
}

double layer_sample_mse(const LayerCache& cache, const std::vector<double>& lambdas,
                        const Dataset& data, std::size_t s) {
  const auto& feats = cache.features[s];
  const auto& target = data.targets[s];
  double acc = 0.0;
  for (std::size_t r = 0; r < target.size(); ++r) {
    double pred = 0.0;
    for (std::size_t p = 0; p < lambdas.size(); ++p) pred += lambdas[p] * feats[p][r];
    const double diff = pred - target[r];
    acc += static_cast<double>(cache.mult[r]) * diff * diff;
  }
  return acc / static_cast<double>(cache.out_entries);
}

void layer_accumulate_grad(const LayerCache& cache, const std::vector<double>& lambdas,
                           const Dataset& data, std::size_t s, double scale,
                           std::vector<double>& grad) {
  const auto& feats = cache.features[s];
  const auto& target = data.targets[s];
  for (std::size_t r = 0; r < target.size(); ++r) {
    double pred = 0.0;
    for (std::size_t p = 0; p < lambdas.size(); ++p) pred += lambdas[p] * feats[p][r];
    const double w = scale * 2.0 * static_cast<double>(cache.mult[r]) * (pred - target[r]) /
                     static_cast<double>(cache.out_entries);
    for (std::size_t p = 0; p < lambdas.size(); ++p) grad[p] += w * feats[p][r];
  }
}

struct MlpCache {
  std::vector<std::vector<double>> inputs;  // unrolled
  std::vector<std::vector<double>> targets; // unrolled
};

MlpCache build_mlp_cache(const MlpModel& model, const Dataset& data) {
  MlpCache cache;
  cache.inputs.reserve(data.inputs.size());
  for (const SymmetricTensor& t : data.inputs) cache.inputs.push_back(unroll_tensor(t));
  // expand compressed targets to unrolled entries
  cache.targets.reserve(data.targets.size());
  for (const auto& target : data.targets) {
    SymmetricTensor t(data.n, model.l(), target);
    cache.targets.push_back(unroll_tensor(t));
  }
  return cache;
}

double mlp_sample_mse(const MlpCache& cache, const MlpModel& model, std::size_t s) {
  const auto pred = model.forward(cache.inputs[s]);
  const auto& target = cache.targets[s];
  double acc = 0.0;
  for (std::size_t r = 0; r < target.size(); ++r) {
    const double diff = pred[r] - target[r];
    acc += diff * diff;
  }
  return acc / static_cast<double>(target.size());
}

void mlp_accumulate_grad(const MlpCache& cache, const MlpModel& model, std::size_t s,
                         double scale, std::vector<double>& grad) {
  const auto pred = model.forward(cache.inputs[s]);
  const auto& target = cache.targets[s];
  const auto& x = cache.inputs[s];
  const std::int64_t in_dim = model.in_dim();
  for (std::size_t r = 0; r < target.size(); ++r) {
    const double w = scale * 2.0 * (pred[r] - target[r]) / static_cast<double>(target.size());
    double* row = grad.data() + static_cast<std::int64_t>(r) * in_dim;
    for (std::int64_t i = 0; i < in_dim; ++i) row[i] += w * x[i];
  }
}

struct SplitInfo {
  std::size_t train_count = 0;
  std::size_t test_begin = 0;
  std::size_t total = 0;
};

SplitInfo make_split(const Dataset& data, const TrainConfig& cfg) {
  if (cfg.split <= 0.0 || cfg.split >= 1.0)
    throw std::invalid_argument("sgd_train: split must be in (0,1)");
  if (cfg.learning_rate <= 0.0 || cfg.epochs <= 0 || cfg.batch_size <= 0)
    throw std::invalid_argument("sgd_train: hyperparameters must be positive");
  SplitInfo s;
  s.total = data.inputs.size();
  const std::size_t full_train = static_cast<std::size_t>(cfg.split * s.total);
  s.test_begin = full_train;
  s.train_count = std::max<std::size_t>(
      1, static_cast<std::size_t>(cfg.train_fraction * full_train));
  return s;
}

template <typename SampleMse, typename AccumulateGrad, typename Step>
TrainResult run_sgd(const Dataset& data, const TrainConfig& cfg, std::size_t param_count,
                    SampleMse sample_mse, AccumulateGrad accumulate_grad, Step step) {
  const SplitInfo split = make_split(data, cfg);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(split.train_count);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  auto range_mse = [&](std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t s = begin; s < end; ++s) acc += sample_mse(s);
    return end > begin ? acc / static_cast<double>(end - begin) : 0.0;
  };

  TrainResult result;
  std::vector<double> grad(param_count, 0.0);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    fisher_yates(order, rng);
    std::size_t pos = 0;
    while (pos < order.size()) {
      const std::size_t batch_end = std::min(order.size(), pos + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      const double scale = 1.0 / static_cast<double>(batch_end - pos);
      for (std::size_t b = pos; b < batch_end; ++b) accumulate_grad(order[b], scale, grad);
      step(grad);
      pos = batch_end;
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_mse = range_mse(0, split.train_count);
    stats.test_mse = range_mse(split.test_begin, split.total);
    if (!std::isfinite(stats.train_mse) || !std::isfinite(stats.test_mse))
      throw std::runtime_error("sgd_train: loss diverged (non-finite) at epoch " +
                               std::to_string(epoch));
    result.curve.push_back(stats);
  }
  if (!result.curve.empty()) {
    result.final_train_mse = result.curve.back().train_mse;
    result.final_test_mse = result.curve.back().test_mse;
  }
  return result;
}

}  // namespace

TrainResult sgd_train(EquivariantLayer& model, const Dataset& data, const TrainConfig& cfg) {
  if (model.k() != data.k || model.l() != data.l)
    throw std::invalid_argument("sgd_train: model/dataset shape mismatch");
  const LayerCache cache = build_layer_cache(model, data);
  auto& lambdas = model.lambdas();
  return run_sgd(
      data, cfg, lambdas.size(),
      [&](std::size_t s) { return layer_sample_mse(cache, lambdas, data, s); },
      [&](std::size_t s, double scale, std::vector<double>& grad) {
        layer_accumulate_grad(cache, lambdas, data, s, scale, grad);
      },
      [&](const std::vector<double>& grad) {
        for (std::size_t p = 0; p < lambdas.size(); ++p)
          lambdas[p] -= cfg.learning_rate * grad[p];
      });
}

TrainResult sgd_train(MlpModel& model, const Dataset& data, const TrainConfig& cfg) {
  if (model.k() != data.k || model.l() != data.l || model.n() != data.n)
    throw std::invalid_argument("sgd_train: model/dataset shape mismatch");
  const MlpCache cache = build_mlp_cache(model, data);
  auto& weights = model.weights();
  return run_sgd(
      data, cfg, weights.size(),
      [&](std::size_t s) { return mlp_sample_mse(cache, model, s); },
      [&](std::size_t s, double scale, std::vector<double>& grad) {
        mlp_accumulate_grad(cache, model, s, scale, grad);
      },
      [&](const std::vector<double>& grad) {
        for (std::size_t p = 0; p < weights.size(); ++p)
          weights[p] -= cfg.learning_rate * grad[p];
      });
}

double eval_mse(const EquivariantLayer& model, const Dataset& data,
                std::size_t begin, std::size_t end) {
  IndexSpace out_space(data.n, model.l());
  const auto& mult = out_space.multiplicities();
  const double out_entries = static_cast<double>(ipow(data.n, model.l()));
  double acc = 0.0;
  for (std::size_t s = begin; s < end; ++s) {
    const SymmetricTensor pred = model.forward(data.inputs[s]);
    const auto& target = data.targets[s];
    double sample = 0.0;
    for (std::size_t r = 0; r < target.size(); ++r) {
      const double diff = pred.value_at_rank(static_cast<std::int64_t>(r)) - target[r];
      sample += static_cast<double>(mult[r]) * diff * diff;
    }
    acc += sample / out_entries;
  }
  return end > begin ? acc / static_cast<double>(end - begin) : 0.0;
}

double eval_mse(const MlpModel& model, const Dataset& data,
                std::size_t begin, std::size_t end) {
  const MlpCache cache = build_mlp_cache(model, data);
  double acc = 0.0;
  for (std::size_t s = begin; s < end; ++s) acc += mlp_sample_mse(cache, model, s);
  return end > begin ? acc / static_cast<double>(end - begin) : 0.0;
}

BenchResult benchmark_apply(int k, int l, int n, int reps, std::uint64_t seed,
                            std::int64_t dense_memory_cap_bytes) {
  BenchResult result;
  result.k = k;
  result.l = l;
  result.n = n;
  result.reps = reps;

  std::mt19937_64 rng(seed);
  EquivariantLayer layer(k, l);
  layer.lambdas() = random_normal(rng, layer.lambdas().size());
  const IndexSpace in_space(n, k);
  SymmetricTensor input(n, k, random_normal(rng, in_space.size()));

  using clock = std::chrono::steady_clock;
  double sink = 0.0;

  auto time_once = [&](auto&& fn) {
    const auto t0 = clock::now();
    fn();
    const auto t1 = clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
  };
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.empty() ? 0.0 : v[v.size() / 2];
  };

  // kernel route
  {
    auto run = [&]() {
      const SymmetricTensor out = layer.forward(input);
      sink += out.size() > 0 ? out.value_at_rank(0) : 0.0;
    };
    run();  // warm-up
    for (int r = 0; r < reps; ++r) result.kernel_times_s.push_back(time_once(run));
    result.kernel_median_s = median(result.kernel_times_s);
  }

  // dense route: unrolled basis matrices are prepared once; each call pays
  // for re-assembling W from lambda (it changes every optimizer step),
  // unrolling the input, the matvec, and re-compressing the output.
  const std::int64_t nk = ipow(n, k);
  const std::int64_t nl = ipow(n, l);
  const auto diagrams = canonical_bipartition_list(k, l, n);
  const std::int64_t bytes =
      8 * (static_cast<std::int64_t>(diagrams.size() + 1) * nl * nk + nk + nl);
  if (bytes > dense_memory_cap_bytes) {
    result.dense_feasible = false;
    return result;
  }
  std::vector<DenseMatrix> unrolled_basis;
  unrolled_basis.reserve(diagrams.size());
  for (const Bipartition& d : diagrams) {
    unrolled_basis.push_back(unroll_matrix(build_diagram_matrix(d, n)));
  }
  {
    DenseMatrix w(nl, nk);
    auto run = [&]() {
      std::fill(w.data.begin(), w.data.end(), 0.0);
      for (std::size_t i = 0; i < unrolled_basis.size(); ++i) {
        const double lam = layer.lambdas()[i];
        const auto& src = unrolled_basis[i].data;
        for (std::size_t j = 0; j < src.size(); ++j) w.data[j] += lam * src[j];
      }
      const std::vector<double> x = unroll_tensor(input);
      const std::vector<double> y = matvec(w, x);
      const SymmetricTensor out = compress_tensor(y, n, l);
      sink += out.size() > 0 ? out.value_at_rank(0) : 0.0;
    };
    run();  // warm-up
    for (int r = 0; r < reps; ++r) result.dense_times_s.push_back(time_once(run));
    result.dense_median_s = median(result.dense_times_s);
  }
  if (sink == 12345.6789) throw std::runtime_error("unreachable");
  return result;
}

std::vector<GeneralisationRow> generalisation_eval(const EquivariantLayer& layer,
                                                   const std::string& task,
                                                   const std::vector<int>& n_values,
                                                   int count, std::uint64_t seed) {
  std::vector<GeneralisationRow> rows;
  for (int n : n_values) {
    Dataset data;
    const std::uint64_t derived = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(n);
    if (task == "invariant") {
      data = gen_invariant_task(n, count, derived);
    } else if (task == "equivariant") {
      data = gen_equivariant_task(n, count, derived);
    } else {
      throw std::invalid_argument("generalisation_eval: unknown task " + task);
    }
    rows.push_back(GeneralisationRow{n, eval_mse(layer, data, 0, data.inputs.size())});
  }
  return rows;
}

}  // namespace symtensor
