#include "symtensor/selfcheck.hpp"

#include <array>
#include <sstream>

#include "symtensor/basis.hpp"
#include "symtensor/bipartition.hpp"

namespace symtensor {

namespace {

// p(k,l) for 0 <= k,l <= 5.
constexpr std::array<std::array<int, 6>, 6> kCountTable = {{
    {1, 1, 2, 3, 5, 7},
    {1, 2, 4, 7, 12, 19},
    {2, 4, 9, 16, 29, 47},
    {3, 7, 16, 31, 57, 97},
    {5, 12, 29, 57, 109, 189},
    {7, 19, 47, 97, 189, 339},
}};

using Rows = std::vector<std::vector<int>>;

bool matrix_equals(const DenseMatrix& m, const Rows& expect, std::string& detail) {
  if (m.rows != static_cast<std::int64_t>(expect.size()) ||
      (m.rows > 0 && m.cols != static_cast<std::int64_t>(expect[0].size()))) {
    detail = "shape mismatch";
    return false;
  }
  for (std::int64_t r = 0; r < m.rows; ++r) {
    for (std::int64_t c = 0; c < m.cols; ++c) {
      if (m.at(r, c) != static_cast<double>(expect[r][c])) {
        std::ostringstream msg;
        msg << "entry (" << r << "," << c << ") = " << m.at(r, c)
            << ", expected " << expect[r][c];
        detail = msg.str();
        return false;
      }
    }
  }
  return true;
}

Bipartition bip(std::vector<Block> blocks) { return Bipartition::from_blocks(std::move(blocks)); }

}  // namespace

std::vector<CheckResult> run_selfcheck() {
  std::vector<CheckResult> results;
  auto record = [&](const std::string& name, bool ok, const std::string& detail = "") {
    results.push_back(CheckResult{name, ok, detail});
  };

  // counting table
  {
    bool ok = true;
    std::string detail;
    for (int k = 0; k <= 5 && ok; ++k) {
      for (int l = 0; l <= 5 && ok; ++l) {
        const auto got = count_p(k, l);
        if (got != kCountTable[k][l]) {
          std::ostringstream msg;
          msg << "p(" << k << "," << l << ") = " << got << ", expected " << kCountTable[k][l];
          detail = msg.str();
          ok = false;
        }
      }
    }
    record("bipartition count table 0..5", ok, detail);
    // 12 = number of S_3 orbits on S[3]^2 x S[3]^3 (Burnside), matching
    // brute-force enumeration of block multisets.
    record("p_3(3,2) = 12", count_pn(3, 2, 3) == 12);
    record("p_3(2,1) = 4", count_pn(2, 1, 3) == 4);
  }

  // fixed 3x6 basis matrices at (k=2, l=1, n=3); columns 11,12,13,22,23,33
  {
    const auto pi1 = bip({{2, 1}});
    const auto pi2 = bip({{1, 1}, {1, 0}});
    const auto pi3 = bip({{0, 1}, {2, 0}});
    const auto pi4 = bip({{0, 1}, {1, 0}, {1, 0}});
    std::string detail;

    const Rows x1 = {{1, 0, 0, 0, 0, 0}, {0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 0, 1}};
    const Rows x2 = {{0, 1, 1, 0, 0, 0}, {0, 1, 0, 0, 1, 0}, {0, 0, 1, 0, 1, 0}};
    const Rows x3 = {{0, 0, 0, 1, 0, 1}, {1, 0, 0, 0, 0, 1}, {1, 0, 0, 1, 0, 0}};
    const Rows x4 = {{0, 0, 0, 0, 1, 0}, {0, 0, 1, 0, 0, 0}, {0, 1, 0, 0, 0, 0}};
    record("orbit matrix {[2,1]} (2,1,3)",
           matrix_equals(build_orbit_matrix(pi1, 3).to_dense(), x1, detail), detail);
    record("orbit matrix {[1,1],[1,0]} (2,1,3)",
           matrix_equals(build_orbit_matrix(pi2, 3).to_dense(), x2, detail), detail);
    record("orbit matrix {[0,1],[2,0]} (2,1,3)",
           matrix_equals(build_orbit_matrix(pi3, 3).to_dense(), x3, detail), detail);
    record("orbit matrix {[0,1],[1,0],[1,0]} (2,1,3)",
           matrix_equals(build_orbit_matrix(pi4, 3).to_dense(), x4, detail), detail);

    const Rows d1 = x1;
    const Rows d2 = {{1, 1, 1, 0, 0, 0}, {0, 1, 0, 1, 1, 0}, {0, 0, 1, 0, 1, 1}};
    const Rows d3 = {{1, 0, 0, 1, 0, 1}, {1, 0, 0, 1, 0, 1}, {1, 0, 0, 1, 0, 1}};
    const Rows d4 = {{1, 1, 1, 1, 1, 1}, {1, 1, 1, 1, 1, 1}, {1, 1, 1, 1, 1, 1}};
    record("diagram matrix {[2,1]} (2,1,3)",
           matrix_equals(build_diagram_matrix(pi1, 3).to_dense(), d1, detail), detail);
    record("diagram matrix {[1,1],[1,0]} (2,1,3)",
           matrix_equals(build_diagram_matrix(pi2, 3).to_dense(), d2, detail), detail);
    record("diagram matrix {[0,1],[2,0]} (2,1,3)",
           matrix_equals(build_diagram_matrix(pi3, 3).to_dense(), d3, detail), detail);
    record("diagram matrix {[0,1],[1,0],[1,0]} (2,1,3)",
           matrix_equals(build_diagram_matrix(pi4, 3).to_dense(), d4, detail), detail);

    // weight matrix pattern: entries are sums of lambdas; with powers of ten
    // the digit pattern identifies the contributing set exactly.
    // canonical order: pi1, pi2, pi3, pi4 -> 1, 10, 100, 1000
    {
      WeightMatrix w{2, 1, 3, {1.0, 10.0, 100.0, 1000.0}};
      const DenseMatrix m = assemble_weight_matrix(w);
      // display order of the reference pattern: {[2,1]}, {[0,1],[2,0]},
      // {[1,1],[1,0]}, 3-block; ours swaps the middle two
      const double l1 = 1.0, l2 = 100.0, l3 = 10.0, l4 = 1000.0;
      const double l1234 = l1 + l2 + l3 + l4, l34 = l3 + l4, l24 = l2 + l4;
      const std::vector<std::vector<double>> expect = {
          {l1234, l34, l34, l24, l4, l24},
          {l24, l34, l4, l1234, l34, l24},
          {l24, l4, l34, l24, l34, l1234}};
      bool ok = m.rows == 3 && m.cols == 6;
      std::ostringstream msg;
      for (int r = 0; r < 3 && ok; ++r) {
        for (int c = 0; c < 6 && ok; ++c) {
          if (m.at(r, c) != expect[r][c]) {
            msg << "entry (" << r << "," << c << ") = " << m.at(r, c) << ", expected "
                << expect[r][c];
            ok = false;
          }
        }
      }
      record("assembled weight matrix pattern (2,1,3)", ok, msg.str());

      // unrolled form of the orbit-basis weight matrix, 3 x 9, with weights
      // 1,10,100,1000 attached in the reference display order
      DenseMatrix orbit_sum(3, 6);
      const double display[4] = {1.0, 10.0, 100.0, 1000.0};
      const Bipartition display_order[4] = {pi1, pi3, pi2, pi4};
      for (int i = 0; i < 4; ++i) {
        const BasisMatrix x = build_orbit_matrix(display_order[i], 3);
        for (const auto& [r, c] : x.entries) orbit_sum.at(r, c) += display[i];
      }
      const DenseMatrix unrolled = unroll_matrix(orbit_sum, 2, 1, 3);
      const double e1 = 1, e2 = 10, e3 = 100, e4 = 1000;
      const std::vector<std::vector<double>> expect_unrolled = {
          {e1, e3, e3, e3, e2, e4, e3, e4, e2},
          {e2, e3, e4, e3, e1, e3, e4, e3, e2},
          {e2, e4, e3, e4, e2, e3, e3, e3, e1}};
      bool uok = unrolled.rows == 3 && unrolled.cols == 9;
      std::ostringstream umsg;
      for (int r = 0; r < 3 && uok; ++r) {
        for (int c = 0; c < 9 && uok; ++c) {
          if (unrolled.at(r, c) != expect_unrolled[r][c]) {
            umsg << "entry (" << r << "," << c << ") = " << unrolled.at(r, c)
                 << ", expected " << expect_unrolled[r][c];
            uok = false;
          }
        }
      }
      record("unrolled orbit weight matrix 3x9", uok, umsg.str());
    }
  }

  // k = l = 1: identity and all-ones
  {
    std::string detail;
    const int n = 4;
    Rows identity(n, std::vector<int>(n, 0));
    Rows ones(n, std::vector<int>(n, 1));
    for (int i = 0; i < n; ++i) identity[i][i] = 1;
    record("diagram matrix {[1,1]} is identity (n=4)",
           matrix_equals(build_diagram_matrix(bip({{1, 1}}), n).to_dense(), identity, detail),
           detail);
    record("diagram matrix {[1,0],[0,1]} is all-ones (n=4)",
           matrix_equals(build_diagram_matrix(bip({{1, 0}, {0, 1}}), n).to_dense(), ones,
                         detail),
           detail);
  }

  return results;
}

}  // namespace symtensor
