#include <random>
#include <set>

#include "doctest.h"
#include "symtensor/basis.hpp"
#include "symtensor/index.hpp"
#include "symtensor/tensor.hpp"
#include "test_util.hpp"

using namespace symtensor;

namespace {

Bipartition bip(std::vector<Block> blocks) { return Bipartition::from_blocks(std::move(blocks)); }

DenseMatrix sum_orbits_upward(const Bipartition& pi, int n) {
  IndexSpace rows(n, pi.l()), cols(n, pi.k());
  DenseMatrix out(rows.size(), cols.size());
  for (const auto& theta : coarsenings(pi)) {
    if (theta.block_count() > n) continue;
    for (const auto& [r, c] : build_orbit_matrix(theta, n).entries) out.at(r, c) += 1.0;
  }
  return out;
}

}  // namespace

TEST_CASE("leq and coarsenings") {
  const auto two = bip({{1, 1}, {1, 0}});
  const auto one = bip({{2, 1}});
  CHECK(leq(two, one));
  CHECK(leq(two, two));
  CHECK_FALSE(leq(one, two));
  CHECK_THROWS(leq(one, bip({{1, 1}})));

  const auto c = coarsenings(two);
  CHECK(c.size() == 2);
  CHECK(std::count(c.begin(), c.end(), two) == 1);
  CHECK(std::count(c.begin(), c.end(), one) == 1);

  CHECK(coarsenings(one) == std::vector<Bipartition>{one});

  const auto triple = coarsenings(bip({{1, 0}, {1, 0}, {1, 0}}));
  CHECK(triple.size() == 3);  // itself, {[2,0],[1,0]}, {[3,0]}
  CHECK(std::count(triple.begin(), triple.end(), bip({{3, 0}})) == 1);
  CHECK(std::count(triple.begin(), triple.end(), bip({{2, 0}, {1, 0}})) == 1);
}

TEST_CASE("orbit matrices at (2,1,3) match the fixed values") {
  // columns 11,12,13,22,23,33
  const auto x1 = build_orbit_matrix(bip({{2, 1}}), 3).to_dense();
  const auto x2 = build_orbit_matrix(bip({{1, 1}, {1, 0}}), 3).to_dense();
  const auto x3 = build_orbit_matrix(bip({{0, 1}, {2, 0}}), 3).to_dense();
  const auto x4 = build_orbit_matrix(bip({{0, 1}, {1, 0}, {1, 0}}), 3).to_dense();
  auto row = [](const DenseMatrix& m, int r) {
    return std::vector<double>(m.data.begin() + r * m.cols, m.data.begin() + (r + 1) * m.cols);
  };
  CHECK(row(x1, 0) == std::vector<double>{1, 0, 0, 0, 0, 0});
  CHECK(row(x1, 1) == std::vector<double>{0, 0, 0, 1, 0, 0});
  CHECK(row(x1, 2) == std::vector<double>{0, 0, 0, 0, 0, 1});
  CHECK(row(x2, 0) == std::vector<double>{0, 1, 1, 0, 0, 0});
  CHECK(row(x2, 1) == std::vector<double>{0, 1, 0, 0, 1, 0});
  CHECK(row(x2, 2) == std::vector<double>{0, 0, 1, 0, 1, 0});
  CHECK(row(x3, 0) == std::vector<double>{0, 0, 0, 1, 0, 1});
  CHECK(row(x3, 1) == std::vector<double>{1, 0, 0, 0, 0, 1});
  CHECK(row(x3, 2) == std::vector<double>{1, 0, 0, 1, 0, 0});
  CHECK(row(x4, 0) == std::vector<double>{0, 0, 0, 0, 1, 0});
  CHECK(row(x4, 1) == std::vector<double>{0, 0, 1, 0, 0, 0});
  CHECK(row(x4, 2) == std::vector<double>{0, 1, 0, 0, 0, 0});

  CHECK(build_orbit_matrix(bip({{1, 1}}), 1).to_dense().data == std::vector<double>{1});
  CHECK_THROWS(build_orbit_matrix(bip({{1, 0}, {0, 1}}), 1));
}

TEST_CASE("the (9,7) orbit contains the propagated element") {
  // blocks {[3,1],[2,2],[2,1],[1,3],[1,0]} labelled 6,2,3,1,4 -> element
  // (1112236 ; 122334666), all 1-based
  const auto pi = bip({{3, 1}, {2, 2}, {2, 1}, {1, 3}, {1, 0}});
  const auto x = build_orbit_matrix(pi, 6);
  IndexSpace rows(6, 7), cols(6, 9);
  const std::vector<int> top = {0, 0, 0, 1, 1, 2, 5};
  const std::vector<int> bottom = {0, 1, 1, 2, 2, 3, 5, 5, 5};
  const auto entry = std::make_pair(rows.rank(top), cols.rank(bottom));
  CHECK(std::binary_search(x.entries.begin(), x.entries.end(), entry));
}

TEST_CASE("diagram matrices at (2,1,3) match the fixed values") {
  const auto d2 = build_diagram_matrix(bip({{1, 1}, {1, 0}}), 3).to_dense();
  auto row = [](const DenseMatrix& m, int r) {
    return std::vector<double>(m.data.begin() + r * m.cols, m.data.begin() + (r + 1) * m.cols);
  };
  CHECK(row(d2, 0) == std::vector<double>{1, 1, 1, 0, 0, 0});
  CHECK(row(d2, 1) == std::vector<double>{0, 1, 0, 1, 1, 0});
  CHECK(row(d2, 2) == std::vector<double>{0, 0, 1, 0, 1, 1});

  const auto d3 = build_diagram_matrix(bip({{0, 1}, {1, 0}}), 3).to_dense();
  for (double v : d3.data) CHECK(v == 1.0);

  // k = l = 1: identity and all-ones
  for (int n : {2, 4}) {
    const auto ident = build_diagram_matrix(bip({{1, 1}}), n).to_dense();
    const auto ones = build_diagram_matrix(bip({{1, 0}, {0, 1}}), n).to_dense();
    for (std::int64_t r = 0; r < n; ++r) {
      for (std::int64_t c = 0; c < n; ++c) {
        CHECK(ident.at(r, c) == (r == c ? 1.0 : 0.0));
        CHECK(ones.at(r, c) == 1.0);
      }
    }
  }
}

TEST_CASE("basis-change identity and orbit disjointness, k+l <= 5, n <= 4") {
  for (int k = 0; k <= 5; ++k) {
    for (int l = 0; l + k <= 5; ++l) {
      for (int n = 1; n <= 4; ++n) {
        const auto list = canonical_bipartition_list(k, l, n);
        IndexSpace rows(n, l), cols(n, k);
        DenseMatrix orbit_sum(rows.size(), cols.size());
        for (const auto& pi : list) {
          // diagram construction equals the upward orbit sum
          CHECK(build_diagram_matrix(pi, n).to_dense() == sum_orbits_upward(pi, n));
          const auto x = build_orbit_matrix(pi, n);
          for (const auto& [r, c] : x.entries) orbit_sum.at(r, c) += 1.0;
        }
        // orbits partition the full index set
        for (double v : orbit_sum.data) CHECK(v == 1.0);
      }
    }
  }
}

TEST_CASE("transition matrix is unitriangular") {
  const auto t11 = transition_matrix(1, 1, 2);
  CHECK(t11 == std::vector<std::vector<int>>{{1, 0}, {1, 1}});

  CHECK(transition_matrix(0, 1, 1) == std::vector<std::vector<int>>{{1}});

  const auto t213 = transition_matrix(2, 1, 3);
  REQUIRE(t213.size() == 4);
  for (std::size_t i = 0; i < t213.size(); ++i) {
    CHECK(t213[i][i] == 1);
    for (std::size_t j = i + 1; j < t213.size(); ++j) CHECK(t213[i][j] == 0);
  }

  for (int k = 0; k <= 3; ++k) {
    for (int l = 0; l + k <= 4; ++l) {
      for (int n = 1; n <= 4; ++n) {
        const auto m = transition_matrix(k, l, n);
        for (std::size_t i = 0; i < m.size(); ++i) {
          CHECK(m[i][i] == 1);
          for (std::size_t j = i + 1; j < m.size(); ++j) CHECK(m[i][j] == 0);
        }
      }
    }
  }
}

TEST_CASE("assembled weight matrix: zero, one-hot, pattern") {
  const auto list = canonical_bipartition_list(2, 1, 3);
  WeightMatrix zero{2, 1, 3, std::vector<double>(list.size(), 0.0)};
  for (double v : assemble_weight_matrix(zero).data) CHECK(v == 0.0);

  for (std::size_t i = 0; i < list.size(); ++i) {
    std::vector<double> lam(list.size(), 0.0);
    lam[i] = 1.0;
    CHECK(assemble_weight_matrix(WeightMatrix{2, 1, 3, lam}) ==
          build_diagram_matrix(list[i], 3).to_dense());
  }
  CHECK_THROWS(assemble_weight_matrix(WeightMatrix{2, 1, 3, {1.0}}));
}

TEST_CASE("unroll: fixed 3x9 pattern and identities") {
  // orbit-basis weight matrix with weights 1,10,100,1000 in display order
  DenseMatrix compressed(3, 6);
  const Bipartition order[4] = {bip({{2, 1}}), bip({{0, 1}, {2, 0}}),
                                bip({{1, 1}, {1, 0}}), bip({{0, 1}, {1, 0}, {1, 0}})};
  const double weights[4] = {1, 10, 100, 1000};
  for (int i = 0; i < 4; ++i) {
    for (const auto& [r, c] : build_orbit_matrix(order[i], 3).entries) {
      compressed.at(r, c) += weights[i];
    }
  }
  const auto unrolled = unroll_matrix(compressed, 2, 1, 3);
  REQUIRE(unrolled.rows == 3);
  REQUIRE(unrolled.cols == 9);
  const double e[4] = {1, 10, 100, 1000};
  const std::vector<std::vector<double>> expect = {
      {e[0], e[2], e[2], e[2], e[1], e[3], e[2], e[3], e[1]},
      {e[1], e[2], e[3], e[2], e[0], e[2], e[3], e[2], e[1]},
      {e[1], e[3], e[2], e[3], e[1], e[2], e[2], e[2], e[0]}};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 9; ++c) CHECK(unrolled.at(r, c) == expect[r][c]);
  }

  // k = l = 1 unrolling is the identity operation
  const auto ident = build_diagram_matrix(bip({{1, 1}}), 3);
  CHECK(unroll_matrix(ident) == ident.to_dense());
}

TEST_CASE("unrolled and compressed application agree") {
  std::mt19937_64 rng(29);
  for (int k = 0; k <= 3; ++k) {
    for (int l = 0; l <= 3; ++l) {
      for (int n = 2; n <= 3; ++n) {
        const auto list = canonical_bipartition_list(k, l, n);
        std::vector<double> lam(list.size());
        std::normal_distribution<double> dist(0.0, 1.0);
        for (double& v : lam) v = dist(rng);
        const auto w = assemble_weight_matrix(WeightMatrix{k, l, n, lam});
        const auto t = testutil::random_tensor(n, k, rng);

        // matrix route on symmetric-power coordinates (entries weighted by
        // multiplicity when embedding into the tensor power)
        IndexSpace cols(n, k);
        std::vector<double> coords(t.values());
        for (std::int64_t r = 0; r < cols.size(); ++r) {
          coords[r] *= static_cast<double>(cols.multiplicity(r));
        }
        const auto via_compressed = matvec(w, coords);

        // unrolled route
        const auto wu = unroll_matrix(w, k, l, n);
        const auto out_unrolled = matvec(wu, unroll_tensor(t));
        const auto back = compress_tensor(out_unrolled, n, l);
        for (std::int64_t r = 0; r < back.size(); ++r) {
          CHECK(back.value_at_rank(r) == doctest::Approx(via_compressed[r]).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("equivariance of basis matrices, k+l <= 4, n <= 4") {
  std::mt19937_64 rng(31);
  for (int k = 0; k <= 4; ++k) {
    for (int l = 0; l + k <= 4; ++l) {
      for (int n = 2; n <= 4; ++n) {
        for (const auto& pi : canonical_bipartition_list(k, l, n)) {
          const auto d = unroll_matrix(build_diagram_matrix(pi, n));
          const auto x = unroll_matrix(build_orbit_matrix(pi, n));
          for (int trial = 0; trial < 8; ++trial) {
            const auto sigma = testutil::random_permutation(n, rng);
            const auto rho_k = testutil::tensor_power_action(sigma, n, k);
            const auto rho_l = testutil::tensor_power_action(sigma, n, l);
            CHECK(testutil::matmul(d, rho_k) == testutil::matmul(rho_l, d));
            CHECK(testutil::matmul(x, rho_k) == testutil::matmul(rho_l, x));
          }
        }
      }
    }
  }
}

TEST_CASE("span rank equals the bipartition count, k+l <= 4, n <= 4") {
  for (int k = 0; k <= 4; ++k) {
    for (int l = 0; l + k <= 4; ++l) {
      for (int n = 1; n <= 4; ++n) {
        const auto list = canonical_bipartition_list(k, l, n);
        std::vector<std::vector<std::int64_t>> stacked;
        for (const auto& pi : list) {
          const auto d = build_diagram_matrix(pi, n).to_dense();
          std::vector<std::int64_t> row(d.data.size());
          for (std::size_t i = 0; i < d.data.size(); ++i) {
            row[i] = static_cast<std::int64_t>(d.data[i]);
          }
          stacked.push_back(std::move(row));
        }
        CHECK(testutil::integer_rank(stacked) == static_cast<int>(list.size()));
      }
    }
  }
}

TEST_CASE("averaged random matrices lie in the diagram span") {
  std::mt19937_64 rng(37);
  for (const auto [k, l, n] : {std::tuple{2, 1, 3}, {2, 2, 3}, {1, 1, 4}, {3, 1, 3}}) {
    IndexSpace rows(n, l), cols(n, k);
    // average a random matrix on symmetric-power coordinates over the group
    DenseMatrix random(rows.size(), cols.size());
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& v : random.data) v = dist(rng);
    const auto row_indices = rows.all();
    const auto col_indices = cols.all();
    const auto perms = testutil::all_permutations(n);
    DenseMatrix averaged(rows.size(), cols.size());
    for (const auto& sigma : perms) {
      // moved[I, J] = random[sigma(I), sigma(J)]
      for (std::int64_t r = 0; r < rows.size(); ++r) {
        const auto ri = rows.rank(act_index(sigma, row_indices[r]));
        for (std::int64_t c = 0; c < cols.size(); ++c) {
          const auto ci = cols.rank(act_index(sigma, col_indices[c]));
          averaged.at(r, c) += random.at(ri, ci);
        }
      }
    }
    for (double& v : averaged.data) v /= static_cast<double>(perms.size());

    // least squares onto the diagram basis via normal equations
    const auto list = canonical_bipartition_list(k, l, n);
    std::vector<DenseMatrix> basis;
    for (const auto& pi : list) basis.push_back(build_diagram_matrix(pi, n).to_dense());
    const std::size_t p = basis.size();
    std::vector<std::vector<double>> gram(p, std::vector<double>(p + 1, 0.0));
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        double dot = 0.0;
        for (std::size_t e = 0; e < basis[i].data.size(); ++e) {
          dot += basis[i].data[e] * basis[j].data[e];
        }
        gram[i][j] = dot;
      }
      double rhs = 0.0;
      for (std::size_t e = 0; e < basis[i].data.size(); ++e) {
        rhs += basis[i].data[e] * averaged.data[e];
      }
      gram[i][p] = rhs;
    }
    // gaussian elimination
    for (std::size_t col = 0; col < p; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < p; ++r) {
        if (std::abs(gram[r][col]) > std::abs(gram[piv][col])) piv = r;
      }
      std::swap(gram[col], gram[piv]);
      for (std::size_t r = 0; r < p; ++r) {
        if (r == col || gram[r][col] == 0.0) continue;
        const double f = gram[r][col] / gram[col][col];
        for (std::size_t c = col; c <= p; ++c) gram[r][c] -= f * gram[col][c];
      }
    }
    std::vector<double> coeffs(p);
    for (std::size_t i = 0; i < p; ++i) coeffs[i] = gram[i][p] / gram[i][i];

    double residual = 0.0;
    for (std::size_t e = 0; e < averaged.data.size(); ++e) {
      double fitted = 0.0;
      for (std::size_t i = 0; i < p; ++i) fitted += coeffs[i] * basis[i].data[e];
      residual += (averaged.data[e] - fitted) * (averaged.data[e] - fitted);
    }
    CHECK(residual < 1e-9);
  }
}
