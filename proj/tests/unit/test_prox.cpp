#include <doctest.h>

#include <cmath>

#include "fsl/matrix.hpp"
#include "fsl/numerics.hpp"
#include "fsl/rng.hpp"

using fsl::DenseMatrix;
using fsl::Vector;

TEST_CASE("prox_l1 soft-thresholds coordinatewise") {
  const Vector r = fsl::prox_l1({2.0, -0.5}, 1.0);
  CHECK(r[0] == 1.0);
  CHECK(r[1] == 0.0);
  CHECK(fsl::prox_l1({-3.0, 0.25, 0.0}, 0.25) == Vector{-2.75, 0.0, 0.0});
  const Vector v{1.5, -2.5, 0.0};
  CHECK(fsl::prox_l1(v, 0.0) == v);
  CHECK_THROWS_AS(fsl::prox_l1(v, -1.0), fsl::Error);

  // Optimality: r minimizes t*|x|_1 + 0.5*|x - v|^2, checked on a grid.
  const double t = 0.7;
  const Vector p = fsl::prox_l1({0.9, -1.4}, t);
  auto obj = [&](double x0, double x1) {
    return t * (std::abs(x0) + std::abs(x1)) +
           0.5 * ((x0 - 0.9) * (x0 - 0.9) + (x1 + 1.4) * (x1 + 1.4));
  };
  const double at_prox = obj(p[0], p[1]);
  for (double x0 = -2.0; x0 <= 2.0; x0 += 0.05)
    for (double x1 = -2.0; x1 <= 2.0; x1 += 0.05) CHECK(obj(x0, x1) >= at_prox - 1e-9);
}

TEST_CASE("project_l2_ball clamps to the sphere") {
  const Vector inside{0.1, 0.2};
  CHECK(fsl::project_l2_ball(inside, {0.0, 0.0}, 1.0) == inside);

  const Vector out = fsl::project_l2_ball({3.0, 4.0}, {0.0, 0.0}, 1.0);
  CHECK(out[0] == doctest::Approx(0.6));
  CHECK(out[1] == doctest::Approx(0.8));

  const Vector shifted = fsl::project_l2_ball({5.0, 1.0}, {1.0, 1.0}, 2.0);
  CHECK(shifted[0] == doctest::Approx(3.0));
  CHECK(shifted[1] == doctest::Approx(1.0));

  const Vector collapsed = fsl::project_l2_ball({5.0, 1.0}, {1.0, 1.0}, 0.0);
  CHECK(collapsed[0] == doctest::Approx(1.0));
  CHECK(collapsed[1] == doctest::Approx(1.0));

  CHECK_THROWS_AS(fsl::project_l2_ball({1.0}, {0.0}, -0.5), fsl::Error);
}

TEST_CASE("project_affine lands on the constraint set at minimal distance") {
  const Vector p = fsl::project_affine(DenseMatrix(1, 2, Vector{1, 1}), {2.0}, {0.0, 0.0});
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(1.0));

  fsl::Rng rng(88);
  for (int rep = 0; rep < 20; ++rep) {
    DenseMatrix a(2, 5);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 5; ++j) a.at(i, j) = rng.normal();
    Vector y{rng.normal(), rng.normal()};
    Vector v(5);
    for (auto& e : v) e = rng.normal();
    const Vector proj = fsl::project_affine(a, y, v);
    const Vector residual = fsl::sub(fsl::matvec(a, proj), y);
    CHECK(fsl::norm2(residual) < 1e-9);
    // Minimal distance: the correction is orthogonal to ker(A), so no kernel
    // direction can shorten it.
    const DenseMatrix kb = fsl::kernel_basis(a);
    const Vector corr = fsl::sub(proj, v);
    for (std::size_t j = 0; j < kb.cols(); ++j) {
      Vector col(kb.rows());
      for (std::size_t i = 0; i < kb.rows(); ++i) col[i] = kb.at(i, j);
      CHECK(std::abs(fsl::dot(corr, col)) < 1e-9);
    }
  }

  // Row-deficient constraint matrices are rejected rather than silently
  // projected onto an inconsistent system.
  const DenseMatrix rank_deficient(2, 2, Vector{1, 1, 1, 1});
  CHECK_THROWS_AS(fsl::project_affine(rank_deficient, Vector{1.0, 2.0}, Vector{0.0, 0.0}),
                  fsl::Error);
}
