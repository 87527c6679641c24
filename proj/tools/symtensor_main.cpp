#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "symtensor/basis.hpp"
#include "symtensor/bipartition.hpp"
#include "symtensor/io.hpp"
#include "symtensor/layer.hpp"
#include "symtensor/map_label.hpp"
#include "symtensor/selfcheck.hpp"
#include "symtensor/train.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

void print_run_header(int argc, char** argv, std::uint64_t seed) {
  std::ostringstream line;
  line << "# symtensor " << kVersion << " |";
  for (int i = 1; i < argc; ++i) line << " " << argv[i];
  line << " | seed=" << seed;
  std::cerr << line.str() << "\n";
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("SYMTENSOR_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return 1;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  } else {
    symtensor::write_file(out_path, text);
  }
}

std::vector<double> random_lambdas(std::size_t count, std::uint64_t seed, double stddev) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> out(count);
  for (double& v : out) v = dist(rng);
  return out;
}

std::string loss_curve_csv(const symtensor::TrainResult& result) {
  std::ostringstream csv;
  csv.precision(17);
  csv << "epoch,train_mse,test_mse\n";
  for (const auto& row : result.curve) {
    csv << row.epoch << "," << row.train_mse << "," << row.test_mse << "\n";
  }
  return csv.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"S_n-equivariant linear maps between symmetric tensor powers"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_path;
  std::string format = "json";
  int threads = 0;
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  app.add_option("--out", out_path, "output file or directory");
  app.add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", threads, "cap on worker threads (also SYMTENSOR_THREADS)");

  int k = 0, l = 0, n = 0;

  auto* cmd_enumerate = app.add_subcommand("enumerate", "list (k,l)-bipartitions as JSON lines");
  cmd_enumerate->add_option("--k", k)->required();
  cmd_enumerate->add_option("--l", l)->required();
  cmd_enumerate->add_option("--n", n, "block-count cap (default k+l)");

  auto* cmd_count = app.add_subcommand("count", "print p(k,l) or p_n(k,l)");
  cmd_count->add_option("--k", k)->required();
  cmd_count->add_option("--l", l)->required();
  cmd_count->add_option("--n", n, "block-count cap (default k+l)");

  std::string basis_kind = "diagram";
  bool unroll_flag = false;
  std::string weights_path;
  auto* cmd_matrix = app.add_subcommand("matrix", "emit basis or weight matrices as CSV");
  cmd_matrix->add_option("--k", k)->required();
  cmd_matrix->add_option("--l", l)->required();
  cmd_matrix->add_option("--n", n)->required();
  cmd_matrix->add_option("--basis", basis_kind, "orbit|diagram")
      ->check(CLI::IsMember({"orbit", "diagram"}));
  cmd_matrix->add_flag("--unroll", unroll_flag, "emit over full tensor-power indices");
  cmd_matrix->add_option("--weights", weights_path,
                         "JSON file with {\"lambdas\":[...]}; emits the assembled matrix");

  bool simplify_flag = false;
  int kernel_index = -1;
  auto* cmd_compile = app.add_subcommand("compile", "compile map-label kernels to JSON");
  cmd_compile->add_option("--k", k)->required();
  cmd_compile->add_option("--l", l)->required();
  cmd_compile->add_option("--n", n, "drop contributions needing more than n blocks");
  cmd_compile->add_flag("--simplify", simplify_flag, "emit unconstrained-sum form");
  cmd_compile->add_option("--index", kernel_index,
                          "emit only the kernel at this canonical position");

  std::string kernel_path, tensor_path;
  auto* cmd_apply = app.add_subcommand("apply", "apply a kernel file to a tensor file");
  cmd_apply->add_option("--kernel", kernel_path)->required();
  cmd_apply->add_option("--tensor", tensor_path)->required();
  cmd_apply->add_option("--n", n, "evaluation dimension (default: tensor's)");
  cmd_apply->add_option("--index", kernel_index, "kernel position when the file is an array");

  std::string task = "invariant";
  std::string model_kind = "equivariant";
  int sample_count = 0;
  double learning_rate = 1e-4;
  int epochs = 50;
  int batch_size = 50;
  double split = 0.9;
  double train_fraction = 1.0;
  auto* cmd_train = app.add_subcommand("train", "train a model with SGD; writes CSV + JSON");
  cmd_train->add_option("--task", task)->check(CLI::IsMember({"invariant", "equivariant"}));
  cmd_train->add_option("--model", model_kind)
      ->check(CLI::IsMember({"equivariant", "mlp"}));
  cmd_train->add_option("--n", n, "dimension (default: 12 invariant, 8 equivariant)");
  cmd_train->add_option("--count", sample_count, "samples (default: 5000 / 10000)");
  cmd_train->add_option("--lr", learning_rate)->capture_default_str();
  cmd_train->add_option("--epochs", epochs)->capture_default_str();
  cmd_train->add_option("--batch", batch_size)->capture_default_str();
  cmd_train->add_option("--split", split)->capture_default_str();
  cmd_train->add_option("--train-fraction", train_fraction,
                        "use only this fraction of the training split");

  int reps = 11;
  auto* cmd_bench = app.add_subcommand("bench", "time kernel vs dense forward; writes CSV");
  cmd_bench->add_option("--k", k)->required();
  cmd_bench->add_option("--l", l)->required();
  cmd_bench->add_option("--n", n)->required();
  cmd_bench->add_option("--reps", reps)->capture_default_str();

  std::string ckpt_path;
  std::string n_list = "16,32";
  int eval_count = 1000;
  auto* cmd_generalise =
      app.add_subcommand("generalise", "evaluate a checkpoint at other dimensions");
  cmd_generalise->add_option("--ckpt", ckpt_path)->required();
  cmd_generalise->add_option("--n-list", n_list, "comma-separated dimensions");
  cmd_generalise->add_option("--count", eval_count)->capture_default_str();
  cmd_generalise->add_option("--task", task)
      ->check(CLI::IsMember({"invariant", "equivariant"}));

  auto* cmd_selfcheck = app.add_subcommand("selfcheck", "run the golden-value suite");

  for (CLI::App* sub :
       {cmd_enumerate, cmd_count, cmd_matrix, cmd_compile, cmd_apply, cmd_train, cmd_bench,
        cmd_generalise, cmd_selfcheck}) {
    sub->fallthrough();  // accept the common flags after the subcommand name
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  print_run_header(argc, argv, seed);
  (void)resolve_threads(threads);  // evaluation is single-threaded; cap recorded

  try {
    if (cmd_enumerate->parsed() || cmd_count->parsed()) {
      const int cap = (n > 0) ? n : (k + l > 0 ? k + l : 1);
      if (cmd_count->parsed()) {
        emit(std::to_string(symtensor::count_pn(k, l, cap)), out_path);
        return 0;
      }
      std::ostringstream lines;
      for (const auto& b : symtensor::canonical_bipartition_list(k, l, cap)) {
        lines << symtensor::bipartition_to_json(b) << "\n";
      }
      emit(lines.str(), out_path);
      return 0;
    }

    if (cmd_matrix->parsed()) {
      std::ostringstream csv;
      if (!weights_path.empty()) {
        const auto j = nlohmann::json::parse(symtensor::read_file(weights_path));
        symtensor::WeightMatrix w{k, l, n, j.at("lambdas").get<std::vector<double>>()};
        symtensor::DenseMatrix m = symtensor::assemble_weight_matrix(w);
        if (unroll_flag) m = symtensor::unroll_matrix(m, k, l, n);
        csv << symtensor::matrix_to_csv(m);
      } else {
        for (const auto& pi : symtensor::canonical_bipartition_list(k, l, n)) {
          const auto bm = basis_kind == "orbit" ? symtensor::build_orbit_matrix(pi, n)
                                                : symtensor::build_diagram_matrix(pi, n);
          csv << "# " << basis_kind << " " << symtensor::bipartition_to_json(pi) << "\n";
          csv << symtensor::matrix_to_csv(unroll_flag ? symtensor::unroll_matrix(bm)
                                                      : bm.to_dense());
          csv << "\n";
        }
      }
      emit(csv.str(), out_path);
      return 0;
    }

    if (cmd_compile->parsed()) {
      const int cap = k + l > 0 ? k + l : 1;
      std::optional<int> filter;
      if (n > 0) filter = n;
      const auto diagrams = symtensor::canonical_bipartition_list(k, l, n > 0 ? n : cap);
      std::vector<symtensor::Kernel> kernels;
      for (const auto& pi : diagrams) {
        symtensor::Kernel ker = symtensor::compile_kernel(pi, filter);
        kernels.push_back(simplify_flag ? symtensor::simplify_kernel(ker) : std::move(ker));
      }
      if (kernel_index >= 0) {
        if (kernel_index >= static_cast<int>(kernels.size()))
          throw std::out_of_range("compile: --index out of range");
        emit(symtensor::kernel_to_json(kernels[kernel_index]), out_path);
      } else {
        emit(symtensor::kernels_to_json(kernels), out_path);
      }
      return 0;
    }

    if (cmd_apply->parsed()) {
      const auto kernels = symtensor::kernels_from_json(symtensor::read_file(kernel_path));
      const int which = kernel_index >= 0 ? kernel_index : 0;
      if (which >= static_cast<int>(kernels.size()))
        throw std::out_of_range("apply: --index out of range");
      const symtensor::SymmetricTensor input =
          symtensor::tensor_from_json(symtensor::read_file(tensor_path));
      if (n > 0 && n != input.n())
        throw std::invalid_argument("apply: --n disagrees with the tensor dimension");
      const symtensor::SymmetricTensor output =
          symtensor::evaluate_kernel(kernels[which], input);
      emit(format == "csv" ? symtensor::tensor_to_csv(output)
                           : symtensor::tensor_to_json(output),
           out_path);
      return 0;
    }

    if (cmd_train->parsed()) {
      const int dim = n > 0 ? n : (task == "invariant" ? 12 : 8);
      const int count = sample_count > 0 ? sample_count : (task == "invariant" ? 5000 : 10000);
      const symtensor::Dataset data = task == "invariant"
                                          ? symtensor::gen_invariant_task(dim, count, seed)
                                          : symtensor::gen_equivariant_task(dim, count, seed);
      symtensor::TrainConfig cfg;
      cfg.learning_rate = learning_rate;
      cfg.epochs = epochs;
      cfg.batch_size = batch_size;
      cfg.seed = seed;
      cfg.split = split;
      cfg.train_fraction = train_fraction;

      const std::string dir = out_path.empty() ? "." : out_path;
      std::filesystem::create_directories(dir);

      symtensor::TrainResult result;
      nlohmann::json summary;
      if (model_kind == "equivariant") {
        symtensor::EquivariantLayer layer(data.k, data.l);
        layer.lambdas() = random_lambdas(layer.lambdas().size(), seed ^ 0x5eedULL, 0.1);
        result = symtensor::sgd_train(layer, data, cfg);
        symtensor::write_file(dir + "/checkpoint.json", symtensor::checkpoint_to_json(layer));
        summary["params"] = layer.num_params();
      } else {
        symtensor::MlpModel mlp(dim, data.k, data.l, seed ^ 0x5eedULL);
        result = symtensor::sgd_train(mlp, data, cfg);
        nlohmann::json ckpt;
        ckpt["model"] = "mlp";
        ckpt["n"] = dim;
        ckpt["k"] = data.k;
        ckpt["l"] = data.l;
        ckpt["weights"] = mlp.weights();
        symtensor::write_file(dir + "/checkpoint.json", ckpt.dump());
        summary["params"] = mlp.num_params();
      }
      symtensor::write_file(dir + "/loss.csv", loss_curve_csv(result));
      summary["task"] = task;
      summary["model"] = model_kind;
      summary["n"] = dim;
      summary["count"] = count;
      summary["lr"] = learning_rate;
      summary["epochs"] = epochs;
      summary["batch"] = batch_size;
      summary["seed"] = seed;
      summary["split"] = split;
      summary["train_fraction"] = train_fraction;
      summary["final_train_mse"] = result.final_train_mse;
      summary["final_test_mse"] = result.final_test_mse;
      symtensor::write_file(dir + "/summary.json", summary.dump());
      std::cout << "final_test_mse " << result.final_test_mse << "\n";
      return 0;
    }

    if (cmd_bench->parsed()) {
      const auto b = symtensor::benchmark_apply(k, l, n, reps, seed);
      std::ostringstream csv;
      csv.precision(9);
      csv << "method,rep,seconds\n";
      for (std::size_t i = 0; i < b.kernel_times_s.size(); ++i) {
        csv << "kernel," << i << "," << b.kernel_times_s[i] << "\n";
      }
      for (std::size_t i = 0; i < b.dense_times_s.size(); ++i) {
        csv << "dense," << i << "," << b.dense_times_s[i] << "\n";
      }
      csv << "kernel,median," << b.kernel_median_s << "\n";
      if (b.dense_feasible) {
        csv << "dense,median," << b.dense_median_s << "\n";
      } else {
        csv << "dense,median,infeasible\n";
      }
      emit(csv.str(), out_path);
      if (b.dense_feasible) {
        std::cerr << "# kernel median " << b.kernel_median_s << " s, dense median "
                  << b.dense_median_s << " s, speedup "
                  << b.dense_median_s / b.kernel_median_s << "x\n";
      } else {
        std::cerr << "# kernel median " << b.kernel_median_s
                  << " s, dense path infeasible at this size\n";
      }
      return 0;
    }

    if (cmd_generalise->parsed()) {
      const symtensor::EquivariantLayer layer =
          symtensor::checkpoint_from_json(symtensor::read_file(ckpt_path));
      std::vector<int> dims;
      std::stringstream ss(n_list);
      for (std::string item; std::getline(ss, item, ',');) dims.push_back(std::stoi(item));
      const auto rows =
          symtensor::generalisation_eval(layer, task == "invariant" ? "invariant" : "equivariant",
                                         dims, eval_count, seed);
      std::ostringstream csv;
      csv.precision(17);
      csv << "n,test_mse\n";
      for (const auto& row : rows) csv << row.n << "," << row.test_mse << "\n";
      emit(csv.str(), out_path);
      return 0;
    }

    if (cmd_selfcheck->parsed()) {
      bool all_ok = true;
      for (const auto& r : symtensor::run_selfcheck()) {
        std::cout << (r.ok ? "[pass] " : "[FAIL] ") << r.name;
        if (!r.ok && !r.detail.empty()) std::cout << " (" << r.detail << ")";
        std::cout << "\n";
        all_ok = all_ok && r.ok;
      }
      return all_ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
