#include "symtensor/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace symtensor {

using nlohmann::json;

std::string tensor_to_json(const SymmetricTensor& t) {
  json j;
  j["n"] = t.n();
  j["k"] = t.k();
  j["values"] = t.values();
  return j.dump();
}

SymmetricTensor tensor_from_json(const std::string& text) {
  const json j = json::parse(text);
  return SymmetricTensor(j.at("n").get<int>(), j.at("k").get<int>(),
                         j.at("values").get<std::vector<double>>());
}

std::string tensor_to_csv(const SymmetricTensor& t) {
  std::ostringstream out;
  out << "rank,value\n";
  out.precision(17);
  for (std::int64_t r = 0; r < t.size(); ++r) {
    out << r << "," << t.value_at_rank(r) << "\n";
  }
  return out.str();
}

SymmetricTensor tensor_from_csv(const std::string& text, int n, int k) {
  SymmetricTensor t(n, k);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("rank", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("tensor csv: bad row");
    const std::int64_t r = std::stoll(line.substr(0, comma));
    if (r < 0 || r >= t.size()) throw std::out_of_range("tensor csv: rank out of range");
    t.value_at_rank(r) = std::stod(line.substr(comma + 1));
  }
  return t;
}

namespace {

json bipartition_json(const Bipartition& b) {
  json blocks = json::array();
  for (const Block& blk : b.blocks()) blocks.push_back({blk.x, blk.y});
  json j;
  j["blocks"] = blocks;
  return j;
}

Bipartition bipartition_from(const json& j) {
  std::vector<Block> blocks;
  for (const auto& pair : j.at("blocks")) {
    blocks.push_back(Block{pair.at(0).get<int>(), pair.at(1).get<int>()});
  }
  return Bipartition::from_blocks(std::move(blocks));
}

json kernel_json(const Kernel& ker) {
  json j;
  j["diagram"] = bipartition_json(ker.diagram);
  j["k"] = ker.k;
  j["l"] = ker.l;
  j["simplified"] = ker.simplified;
  json labels = json::array();
  for (const MapLabel& label : ker.labels) {
    json jl;
    jl["lhs"] = label.lhs;
    jl["min_spiders"] = label.min_spiders;
    json terms = json::array();
    for (const Term& term : label.terms) {
      json jt;
      jt["coef"] = term.coef;
      jt["tuple"] = term.tuple;
      std::vector<int> frees(term.num_free);
      for (int i = 0; i < term.num_free; ++i) frees[i] = label.min_spiders + i;
      jt["free"] = frees;
      jt["distinct"] = term.distinct;
      terms.push_back(std::move(jt));
    }
    jl["terms"] = std::move(terms);
    labels.push_back(std::move(jl));
  }
  j["labels"] = std::move(labels);
  return j;
}

Kernel kernel_from(const json& j) {
  Kernel ker;
  ker.diagram = bipartition_from(j.at("diagram"));
  ker.k = j.at("k").get<int>();
  ker.l = j.at("l").get<int>();
  ker.simplified = j.at("simplified").get<bool>();
  for (const auto& jl : j.at("labels")) {
    MapLabel label;
    label.lhs = jl.at("lhs").get<std::vector<int>>();
    label.min_spiders = jl.at("min_spiders").get<int>();
    for (const auto& jt : jl.at("terms")) {
      Term term;
      term.coef = jt.at("coef").get<std::int64_t>();
      term.tuple = jt.at("tuple").get<std::vector<int>>();
      term.num_free = static_cast<int>(jt.at("free").size());
      term.distinct = jt.at("distinct").get<bool>();
      label.terms.push_back(std::move(term));
    }
    ker.labels.push_back(std::move(label));
  }
  return ker;
}

}  // namespace

std::string bipartition_to_json(const Bipartition& b) { return bipartition_json(b).dump(); }

Bipartition bipartition_from_json(const std::string& text) {
  return bipartition_from(json::parse(text));
}

std::string kernel_to_json(const Kernel& ker) { return kernel_json(ker).dump(); }

Kernel kernel_from_json(const std::string& text) { return kernel_from(json::parse(text)); }

std::string kernels_to_json(const std::vector<Kernel>& kernels) {
  json arr = json::array();
  for (const Kernel& ker : kernels) arr.push_back(kernel_json(ker));
  return arr.dump();
}

std::vector<Kernel> kernels_from_json(const std::string& text) {
  const json arr = json::parse(text);
  std::vector<Kernel> out;
  if (arr.is_object()) {
    out.push_back(kernel_from(arr));
    return out;
  }
  for (const auto& j : arr) out.push_back(kernel_from(j));
  return out;
}

std::string checkpoint_to_json(const EquivariantLayer& layer) {
  json j;
  j["k"] = layer.k();
  j["l"] = layer.l();
  j["lambdas"] = layer.lambdas();
  j["order"] = "bipartitions by block count ascending, then lexicographic on "
               "canonical block lists (outputs desc, inputs desc)";
  return j.dump();
}

EquivariantLayer checkpoint_from_json(const std::string& text) {
  const json j = json::parse(text);
  return EquivariantLayer(j.at("k").get<int>(), j.at("l").get<int>(),
                          j.at("lambdas").get<std::vector<double>>());
}

std::string matrix_to_csv(const DenseMatrix& m) {
  std::ostringstream out;
  out.precision(17);
  for (std::int64_t r = 0; r < m.rows; ++r) {
    for (std::int64_t c = 0; c < m.cols; ++c) {
      if (c > 0) out << ",";
      const double v = m.at(r, c);
      if (v == static_cast<std::int64_t>(v)) {
        out << static_cast<std::int64_t>(v);
      } else {
        out << v;
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace symtensor
