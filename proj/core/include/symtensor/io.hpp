#ifndef SYMTENSOR_IO_HPP
#define SYMTENSOR_IO_HPP

#include <iosfwd>
#include <string>

#include "symtensor/bipartition.hpp"
#include "symtensor/dense.hpp"
#include "symtensor/layer.hpp"
#include "symtensor/map_label.hpp"
#include "symtensor/tensor.hpp"

namespace symtensor {

// JSON formats (keys in brackets):
//   tensor      {"k", "n", "values"}            values in rank order
//   bipartition {"blocks": [[x, y], ...]}        canonical block order
//   kernel      {"diagram", "k", "l", "labels", "simplified"}
//   checkpoint  {"k", "l", "lambdas", "order"}   canonical bipartition order
// All emitters are byte-stable for fixed inputs.

std::string tensor_to_json(const SymmetricTensor& t);
SymmetricTensor tensor_from_json(const std::string& text);

std::string tensor_to_csv(const SymmetricTensor& t);  // header rank,value
SymmetricTensor tensor_from_csv(const std::string& text, int n, int k);

std::string bipartition_to_json(const Bipartition& b);
Bipartition bipartition_from_json(const std::string& text);

std::string kernel_to_json(const Kernel& ker);
Kernel kernel_from_json(const std::string& text);
std::string kernels_to_json(const std::vector<Kernel>& kernels);
std::vector<Kernel> kernels_from_json(const std::string& text);

std::string checkpoint_to_json(const EquivariantLayer& layer);
EquivariantLayer checkpoint_from_json(const std::string& text);

std::string matrix_to_csv(const DenseMatrix& m);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace symtensor

#endif
