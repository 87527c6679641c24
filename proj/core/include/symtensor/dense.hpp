#ifndef SYMTENSOR_DENSE_HPP
#define SYMTENSOR_DENSE_HPP

#include <cstdint>
#include <vector>

namespace symtensor {

struct DenseMatrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> data;  // row-major

  DenseMatrix() = default;
  DenseMatrix(std::int64_t r, std::int64_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::int64_t r, std::int64_t c) { return data[r * cols + c]; }
  double at(std::int64_t r, std::int64_t c) const { return data[r * cols + c]; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;
};

std::vector<double> matvec(const DenseMatrix& m, const std::vector<double>& v);

}  // namespace symtensor

#endif
