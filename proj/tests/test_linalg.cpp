#include "eebeam/linalg.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace eebeam;

namespace {

CMatrix random_hermitian(std::mt19937& rng, int m) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = cxd(n(rng), n(rng));
  return 0.5 * (a + a.adjoint());
}

CMatrix random_spd(std::mt19937& rng, int m) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix b(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) b(i, j) = cxd(n(rng), n(rng));
  return b * b.adjoint() + 0.1 * CMatrix::Identity(m, m);
}

CVector random_cvector(std::mt19937& rng, int m) {
  std::normal_distribution<double> n(0.0, 1.0);
  CVector v(m);
  for (int i = 0; i < m; ++i) v[i] = cxd(n(rng), n(rng));
  return v;
}

}  // namespace

TEST_CASE("eig_hermitian on identity") {
  const auto d = eig_hermitian(CMatrix::Identity(2, 2));
  CHECK(d.eigenvalues[0] == Catch::Approx(1.0));
  CHECK(d.eigenvalues[1] == Catch::Approx(1.0));
  CHECK((d.eigenvectors.adjoint() * d.eigenvectors - CMatrix::Identity(2, 2)).norm() < 1e-10);
}

TEST_CASE("eig_hermitian on a diagonal matrix sorts descending") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 3.0;
  const auto d = eig_hermitian(a);
  CHECK(d.eigenvalues[0] == Catch::Approx(3.0));
  CHECK(d.eigenvalues[1] == Catch::Approx(1.0));
  CHECK(std::abs(d.eigenvectors.col(0)[1]) == Catch::Approx(1.0));
  CHECK(std::abs(d.eigenvectors.col(1)[0]) == Catch::Approx(1.0));
}

TEST_CASE("eig_hermitian on a rank-1 outer product") {
  std::mt19937 rng(11);
  CVector h = random_cvector(rng, 4);
  h *= std::sqrt(5.0) / h.norm();  // ||h||^2 = 5
  const CMatrix a = h * h.adjoint();
  const auto d = eig_hermitian(a);
  CHECK(d.eigenvalues[0] == Catch::Approx(5.0).epsilon(1e-12));
  for (int i = 1; i < 4; ++i) CHECK(std::abs(d.eigenvalues[i]) < 1e-10);
  const CMatrix rec =
      d.eigenvectors * d.eigenvalues.asDiagonal() * d.eigenvectors.adjoint();
  CHECK((rec - a).norm() <= 1e-9 * a.norm());
}

TEST_CASE("eig_hermitian rejects non-Hermitian input") {
  CMatrix a(2, 2);
  a << cxd(1, 0), cxd(2, 1), cxd(5, 5), cxd(1, 0);
  CHECK_THROWS_AS(eig_hermitian(a), validation_error);
}

TEST_CASE("eigendecomposition invariants on random Hermitian matrices") {
  std::mt19937 rng(17);
  for (int m : {2, 4, 8, 16}) {
    for (int rep = 0; rep < 25; ++rep) {
      const CMatrix a = random_hermitian(rng, m);
      const auto d = eig_hermitian(a);
      const CMatrix id = CMatrix::Identity(m, m);
      CHECK((d.eigenvectors.adjoint() * d.eigenvectors - id).cwiseAbs().maxCoeff() < 1e-10);
      const CMatrix rec =
          d.eigenvectors * d.eigenvalues.asDiagonal() * d.eigenvectors.adjoint();
      CHECK((rec - a).norm() <= 1e-9 * std::max(a.norm(), 1.0));
      for (int i = 1; i < m; ++i) CHECK(d.eigenvalues[i] <= d.eigenvalues[i - 1]);
    }
  }
}

TEST_CASE("inv_sqrt of identity and diagonal") {
  CHECK((inv_sqrt(CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)).norm() < 1e-12);
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 4.0;
  a(1, 1) = 1.0;
  const CMatrix r = inv_sqrt(a);
  CHECK(r(0, 0).real() == Catch::Approx(0.5));
  CHECK(r(1, 1).real() == Catch::Approx(1.0));
  CHECK(std::abs(r(0, 1)) < 1e-12);
}

TEST_CASE("inv_sqrt reconstruction on random SPD matrices") {
  std::mt19937 rng(23);
  for (int m : {2, 4, 8, 16}) {
    for (int rep = 0; rep < 25; ++rep) {
      const CMatrix a = random_spd(rng, m);
      const CMatrix r = inv_sqrt(a);
      CHECK((r * a * r - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("inv_sqrt rejects singular input") {
  std::mt19937 rng(5);
  const CVector h = random_cvector(rng, 3);
  CHECK_THROWS_AS(inv_sqrt(CMatrix(h * h.adjoint())), rank_error);
  CHECK_THROWS_AS(inv_sqrt(CMatrix::Zero(2, 2)), rank_error);
}

TEST_CASE("projection boundary ranks") {
  std::mt19937 rng(31);
  const int m = 4;
  const auto d = eig_hermitian(random_spd(rng, m));
  const CVector v = random_cvector(rng, m);
  CHECK((project_onto_range(d, m, v) - v).norm() < 1e-10);
  CHECK(project_onto_range(d, 0, v).norm() == 0.0);
  CHECK((project_onto_null(d, 0, v) - v).norm() < 1e-10);
  CHECK(project_onto_null(d, m, v).norm() < 1e-10);
}

TEST_CASE("rank-1 projector matches the explicit formula") {
  std::mt19937 rng(37);
  const int m = 4;
  const CVector h = random_cvector(rng, m);
  const auto d = eig_hermitian(CMatrix(h * h.adjoint()));
  REQUIRE(positive_rank(d) == 1);
  const CVector v = random_cvector(rng, m);
  const CVector expected = (h.dot(v) / h.squaredNorm()) * h;
  CHECK((project_onto_range(d, 1, v) - expected).norm() < 1e-10 * v.norm());
  CHECK((project_onto_null(d, 1, v) - (v - expected)).norm() < 1e-10 * v.norm());
}

TEST_CASE("projection identities on random input") {
  std::mt19937 rng(41);
  const int m = 6;
  for (int rep = 0; rep < 50; ++rep) {
    const auto d = eig_hermitian(random_hermitian(rng, m));
    const auto rank = static_cast<Eigen::Index>(rep % (m + 1));
    const CVector v = random_cvector(rng, m);
    const CVector pr = project_onto_range(d, rank, v);
    const CVector pn = project_onto_null(d, rank, v);
    CHECK((pr + pn - v).norm() < 1e-10 * std::max(1.0, v.norm()));
    CHECK(std::abs(pr.dot(pn)) < 1e-10 * v.squaredNorm());
    const CVector twice = project_onto_range(d, rank, pr);
    CHECK((twice - pr).norm() < 1e-10 * std::max(1.0, v.norm()));
  }
}
