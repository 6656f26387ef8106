#include <doctest.h>

#include <cmath>

#include "invnet/error.hpp"
#include "invnet/triangular.hpp"
#include "oracles.hpp"

using namespace invnet;

namespace {

void check_matrix(const Matrix& m, const oracle::Rows& expected, double tol = 0.0) {
  REQUIRE(m.rows() == expected.size());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (tol == 0.0)
        CHECK(m(i, j) == expected[i][j]);
      else
        CHECK(m(i, j) == doctest::Approx(expected[i][j]).epsilon(tol));
    }
}

}  // namespace

TEST_CASE("packed index layout is row-major over each strict triangle") {
  CHECK(TriangularParams::triangle_size(1) == 0);
  CHECK(TriangularParams::triangle_size(4) == 6);
  CHECK(TriangularParams::lower_index(1, 0) == 0);
  CHECK(TriangularParams::lower_index(2, 0) == 1);
  CHECK(TriangularParams::lower_index(2, 1) == 2);
  CHECK(TriangularParams::lower_index(3, 0) == 3);
  CHECK(TriangularParams::upper_index(4, 0, 1) == 0);
  CHECK(TriangularParams::upper_index(4, 0, 3) == 2);
  CHECK(TriangularParams::upper_index(4, 1, 2) == 3);
  CHECK(TriangularParams::upper_index(4, 2, 3) == 5);
}

TEST_CASE("materialize_lower") {
  check_matrix(materialize_lower(TriangularParams(2, {0.5}, {0.0}, {1, 1})), {{1, 0}, {0.5, 1}});
  check_matrix(materialize_lower(TriangularParams(1, {}, {}, {1})), {{1}});
  check_matrix(materialize_lower(TriangularParams(3, {2, 3, 4}, {0, 0, 0}, {1, 1, 1})),
               {{1, 0, 0}, {2, 1, 0}, {3, 4, 1}});
}

TEST_CASE("materialize_upper") {
  check_matrix(materialize_upper(TriangularParams(2, {0.0}, {0.3}, {1, 1})), {{1, 0.3}, {0, 1}});
  check_matrix(materialize_upper(TriangularParams(2, {0.0}, {0.0}, {2, -1})), {{2, 0}, {0, -1}});
  check_matrix(materialize_upper(TriangularParams(3, {0, 0, 0}, {2, 3, 4}, {1, 1, 1})),
               {{1, 2, 3}, {0, 1, 4}, {0, 0, 1}});
}

TEST_CASE("compose_weight") {
  check_matrix(compose_weight(TriangularParams(2, {0.5}, {0.3}, {1, 1})), {{1, 0.3}, {0.5, 1.15}}, 1e-15);
  check_matrix(compose_weight(TriangularParams(1, {}, {}, {3})), {{3}});

  SUBCASE("random n=5 against a naive triple loop") {
    Rng rng(11);
    const TriangularParams p = oracle::random_params(rng, 5);
    const auto expected = oracle::naive_matmul(oracle::rows_of(materialize_lower(p)), oracle::rows_of(materialize_upper(p)));
    check_matrix(compose_weight(p), expected, 1e-14);
  }

  SUBCASE("L(0, n-1) and U(n-1, 0) stay zero") {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
      const TriangularParams p = oracle::random_params(rng, 6, 5.0);
      CHECK(materialize_lower(p)(0, 5) == 0.0);
      CHECK(materialize_upper(p)(5, 0) == 0.0);
    }
  }
}

TEST_CASE("apply_weight") {
  const Vector x{0.25, -3.0, 7.5};
  CHECK(apply_weight(TriangularParams(3), x) == x);

  const TriangularParams p(2, {0.5}, {0.3}, {1, 1});
  const Vector y = apply_weight(p, Vector{1, 0});
  CHECK(y[0] == 1.0);
  CHECK(y[1] == 0.5);

  SUBCASE("random n=8 against a dense matvec") {
    Rng rng(13);
    const TriangularParams q = oracle::random_params(rng, 8);
    const Vector v = oracle::random_vector(rng, 8, -1, 1);
    const auto dense = oracle::naive_matvec(oracle::rows_of(compose_weight(q)), v.values());
    const Vector got = apply_weight(q, v);
    for (std::size_t i = 0; i < 8; ++i) CHECK(got[i] == doctest::Approx(dense[i]).epsilon(1e-12));
  }

  CHECK_THROWS_AS(apply_weight(p, Vector{1, 2, 3}), DimensionError);
}

TEST_CASE("transposed products match the dense transpose") {
  Rng rng(14);
  const TriangularParams p = oracle::random_params(rng, 7);
  const Vector g = oracle::random_vector(rng, 7, -1, 1);
  const auto expected = oracle::naive_matvec(oracle::rows_of(transpose(compose_weight(p))), g.values());
  const Vector got = apply_weight_transpose(p, g);
  for (std::size_t i = 0; i < 7; ++i) CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("solve_weight") {
  const Vector b{4.0, -2.0, 0.5};
  CHECK(solve_weight(TriangularParams(3), b) == b);

  const TriangularParams p(2, {0.5}, {0.3}, {1, 1});
  const Vector x = solve_weight(p, Vector{1, 0.5});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(x[1]) < 1e-15);

  SUBCASE("random n=16 round trip") {
    Rng rng(15);
    const TriangularParams q = oracle::random_params(rng, 16);
    const Vector v = oracle::random_vector(rng, 16, -1, 1);
    CHECK(max_abs_diff(solve_weight(q, apply_weight(q, v)), v) <= 1e-10);
  }

  CHECK_THROWS_AS(solve_weight(p, Vector{1.0}), DimensionError);
}

TEST_CASE("degenerate diagonal is rejected with the offending index") {
  try {
    TriangularParams(3, {0, 0, 0}, {0, 0, 0}, {1.0, 1e-13, 1.0});
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(e.index() == 1);
    CHECK(std::string(e.what()).find("k[1]") != std::string::npos);
  }
  CHECK_THROWS_AS(TriangularParams(2, 0.0), SingularityError);
  CHECK_NOTHROW(TriangularParams(2, -1e-12));
}

TEST_CASE("determinant") {
  CHECK(determinant(TriangularParams(3)) == 1.0);
  CHECK(determinant(TriangularParams(2, {0.0}, {0.0}, {2, -1})) == -2.0);

  SUBCASE("random n=6 against cofactor expansion") {
    Rng rng(16);
    const TriangularParams p = oracle::random_params(rng, 6);
    const double dense = oracle::cofactor_det(oracle::rows_of(compose_weight(p)));
    CHECK(determinant(p) == doctest::Approx(dense).epsilon(1e-9));
  }

  SUBCASE("independent of l and u") {
    Rng rng(17);
    TriangularParams p = oracle::random_params(rng, 5);
    const double before = determinant(p);
    for (int trial = 0; trial < 10; ++trial) {
      for (double& v : p.lower_mut()) v = rng.uniform(-3, 3);
      for (double& v : p.upper_mut()) v = rng.uniform(-3, 3);
      CHECK(determinant(p) == before);
      CHECK(dense_determinant(compose_weight(p)) == doctest::Approx(before).epsilon(1e-9));
    }
  }
}

TEST_CASE("property: round trip over random params and inputs in [-10, 10]") {
  Rng rng(18);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(24);
    const TriangularParams p = oracle::random_params(rng, n);
    const Vector x = oracle::random_vector(rng, n, -10, 10);
    const double tol = 1e-9 * std::max(1.0, norm_inf(x));
    REQUIRE(max_abs_diff(solve_weight(p, apply_weight(p, x)), x) <= tol);
  }
}

TEST_CASE("condition estimate matches the dense inverse") {
  Rng rng(19);
  const TriangularParams p = oracle::random_params(rng, 6);
  const Matrix w = compose_weight(p);
  CHECK(condition_1norm(p) == doctest::Approx(norm1(w) * norm1(dense_inverse(w))).epsilon(1e-10));
  CHECK(condition_1norm(TriangularParams(4)) == 1.0);
}
