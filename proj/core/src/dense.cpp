#include "symtensor/dense.hpp"

#include <stdexcept>

namespace symtensor {

std::vector<double> matvec(const DenseMatrix& m, const std::vector<double>& v) {
  if (static_cast<std::int64_t>(v.size()) != m.cols)
    throw std::invalid_argument("matvec: dimension mismatch");
  std::vector<double> out(m.rows, 0.0);
  for (std::int64_t r = 0; r < m.rows; ++r) {
    double acc = 0.0;
    const double* row = m.data.data() + r * m.cols;
    for (std::int64_t c = 0; c < m.cols; ++c) acc += row[c] * v[c];
    out[r] = acc;
  }
  return out;
}

}  // namespace symtensor
