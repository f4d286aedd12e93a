#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

#include "coop2/error.hpp"
#include "coop2/models.hpp"
#include "coop2/signvar.hpp"
#include "coop2/spectral.hpp"

using namespace coop2;
using namespace coop2::spectral;

namespace {

Matrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return a;
}

bool same_multiset(std::vector<Complex> a, std::vector<Complex> b, double tol) {
  if (a.size() != b.size()) return false;
  for (const auto& z : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](auto& p, auto& q) { return std::abs(p - z) < std::abs(q - z); });
    if (std::abs(*it - z) > tol) return false;
    b.erase(it);
  }
  return true;
}

}  // namespace

TEST_CASE("Goodwin preset spectrum and characteristic polynomial") {
  const Model m = models::goodwin({0.5, 0.5, 0.5, 0.5}, 10);
  const auto eq = models::goodwin_equilibrium(m);
  const Matrix j = m.jac(eq.e);
  const auto spec = eigenvalues(j);
  REQUIRE(spec.size() == 4);
  const Complex expected[] = {{0.1158, 0.6158}, {0.1158, -0.6158}, {-1.1158, 0.6158}, {-1.1158, -0.6158}};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(spec[i].real() - expected[i].real()) < 1e-3);
    CHECK(std::abs(spec[i].imag() - expected[i].imag()) < 1e-3);
  }
  CHECK(unstable_count(spec).unstable == 2);
  const auto cp = characteristic_polynomial(j);
  const double coeffs[] = {1.0, 2.0, 1.5, 0.5, 0.6376};
  for (int i = 0; i < 5; ++i) CHECK(std::abs(cp[i] - coeffs[i]) < 1e-3);
  const auto closed = models::goodwin_characteristic_polynomial(std::get<GoodwinParams>(m.builtin), eq.e);
  for (int i = 0; i < 5; ++i) CHECK(cp[i] == doctest::Approx(closed[i]).epsilon(1e-12));
}

TEST_CASE("eigenvalues agree with Eigen's solver on random matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 12;
    const Matrix a = random_matrix(n, rng);
    const auto ours = eigenvalues(a).values;
    CHECK(same_multiset(ours, oracle::eigenvalues(a), 1e-8 * std::max(1.0, norm_inf(a))));
  }
}

TEST_CASE("characteristic polynomial matches the product over Eigen's roots") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    const Matrix a = random_matrix(n, rng);
    const auto cp = characteristic_polynomial(a);
    const auto ref = oracle::poly_from_roots(oracle::eigenvalues(a));
    REQUIRE(cp.size() == ref.size());
    for (std::size_t i = 0; i < cp.size(); ++i) CHECK(std::abs(cp[i] - ref[i]) < 1e-8 * (1.0 + std::abs(ref[i])));
  }
}

TEST_CASE("spectrum ordering: decreasing real part, conjugates adjacent with +Im first") {
  const auto s = order_spectrum({{-1, 0}, {0.5, -2}, {2, 0}, {0.5, 2}, {-3, 1}, {-3, -1}});
  REQUIRE(s.size() == 6);
  CHECK(s[0] == Complex(2, 0));
  CHECK(s[1] == Complex(0.5, 2));
  CHECK(s[2] == Complex(0.5, -2));
  CHECK(s[3] == Complex(-1, 0));
  CHECK(s[4] == Complex(-3, 1));
  CHECK(s[5] == Complex(-3, -1));
  CHECK(s.ordering[0] == 2);
  CHECK(s.ordering[1] == 3);
}

TEST_CASE("eigen-solver handles structured and defective inputs") {
  CHECK(eigenvalues(Matrix::Zero(3, 3))[0] == Complex(0, 0));
  Matrix jordan = 2.0 * Matrix::Identity(4, 4);
  for (int i = 0; i < 3; ++i) jordan(i, i + 1) = 1.0;
  for (const auto& z : eigenvalues(jordan).values) CHECK(std::abs(z - 2.0) < 1e-3);
  Matrix rot(2, 2);
  rot << 0, -1, 1, 0;
  const auto s = eigenvalues(rot);
  CHECK(std::abs(s[0] - Complex(0, 1)) < 1e-14);
  CHECK_THROWS_AS(eigenvalues(Matrix::Zero(2, 3)), Error);
}

TEST_CASE("matrix exponential matches the Taylor-series oracle") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 8;
    const Matrix a = random_matrix(n, rng);
    for (double s : {0.01, 0.5, 3.0}) {
      const Matrix ours = matrix_exp(a, s);
      const Matrix ref = oracle::taylor_exp(a, s);
      CHECK((ours - ref).norm() <= 1e-10 * std::max(1.0, ref.norm()));
    }
  }
  CHECK((matrix_exp(Matrix::Zero(3, 3)) - Matrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("random strongly 2-positive matrices: cone mapping, invariant split, gap") {
  std::mt19937_64 rng(14);
  int cone_failures = 0, checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 5;
    const Matrix a = fixtures::random_strongly_2_positive(n, rng);
    for (double s : {0.1, 1.0, 5.0}) {
      const Matrix e = matrix_exp(a, s);
      for (int k = 0; k < 1000; ++k) {
        const Vector y = e * fixtures::p2_direction(n, rng);
        ++checked;
        if (signvar::s_plus(as_span(y)) > 1) ++cone_failures;
      }
    }
    const SpectralSplit sp = spectral_split(a);
    CHECK(sp.gap > 0.0);
    CHECK(sp.diagnostics.invariance_residual_w1 <= 1e-8);
    CHECK(sp.diagnostics.invariance_residual_w2 <= 1e-8);
    CHECK(sp.diagnostics.w1_violations == 0);
    CHECK(sp.diagnostics.w2_violations == 0);
    // Independent check of invariance: A W1 = W1 Lambda, and S A S^-1 block diagonal.
    CHECK((a * sp.w1 - sp.w1 * sp.dominant_block).norm() <= 1e-8 * norm_inf(a));
    const Matrix t = sp.similarity * a * sp.similarity.inverse();
    CHECK(t.topRightCorner(2, n - 2).norm() <= 1e-8 * norm_inf(a));
    CHECK(t.bottomLeftCorner(n - 2, 2).norm() <= 1e-8 * norm_inf(a));
    const auto ref = oracle::eigenvalues(a);
    std::vector<double> re;
    for (const auto& z : ref) re.push_back(z.real());
    std::sort(re.rbegin(), re.rend());
    CHECK(sp.gap == doctest::Approx(re[1] - re[2]).epsilon(1e-8));
  }
  CHECK(checked == 30000);
  CHECK(cone_failures == 0);
}

TEST_CASE("split of the Goodwin Jacobian is a complex pair with delta 1") {
  const Model m = models::goodwin({0.5, 0.5, 0.5, 0.5}, 10);
  const auto eq = models::goodwin_equilibrium(m);
  const auto sp = spectral_split(m.jac(eq.e));
  CHECK(sp.block_case == BlockCase::ComplexPair);
  CHECK(sp.unstable_pair);
  CHECK(sp.delta == 1.0);
  CHECK(min_symmetric_eigenvalue(scaled_block(sp.dominant_block, sp.delta)) == doctest::Approx(0.1158).epsilon(1e-3));
}

TEST_CASE("split preconditions") {
  Matrix tie = Matrix::Zero(3, 3);
  tie.diagonal() << 1.0, 0.5, 0.5;
  CHECK_THROWS_AS(spectral_split(tie), Error);
  try {
    spectral_split(tie);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GapTooSmall);
  }
  CHECK_THROWS_AS(spectral_split(Matrix::Identity(2, 2)), Error);
}

TEST_CASE("delta scaling across the three real block cases") {
  Eigen::Matrix2d diag;
  diag << 2.0, 0.0, 0.0, 1.0;
  CHECK(delta_scaling(diag, BlockCase::RealDiagonal) == 1.0);
  Eigen::Matrix2d pair;
  pair << 0.3, 2.0, -2.0, 0.3;
  CHECK(delta_scaling(pair, BlockCase::ComplexPair) == 1.0);
  CHECK(min_symmetric_eigenvalue(pair) == doctest::Approx(0.3));
  Eigen::Matrix2d jordan;
  jordan << 0.1, 5.0, 0.0, 0.1;
  const double d = delta_scaling(jordan, BlockCase::JordanBlock);
  CHECK(d > 5.0 / 0.1);
  CHECK(std::exp2(std::round(std::log2(d))) == d);
  CHECK(min_symmetric_eigenvalue(scaled_block(jordan, d)) > 0.0);
  CHECK(min_symmetric_eigenvalue(jordan) < 0.0);
  Eigen::Matrix2d stable;
  stable << -0.1, 1.0, 0.0, -0.1;
  CHECK_THROWS_AS(delta_scaling(stable, BlockCase::JordanBlock), Error);
}

TEST_CASE("a repeated dominant eigenvalue with a Jordan chain is detected") {
  // Jordan pair at 0.5 embedded above a stable 3x3 block.
  Matrix a = Matrix::Zero(5, 5);
  a(0, 0) = 0.5;
  a(0, 1) = 1.0;
  a(1, 1) = 0.5;
  a.bottomRightCorner(3, 3) << -1, 0.2, 0, 0.1, -2, 0.3, 0, 0.4, -3;
  std::mt19937_64 rng(3);
  Matrix q = random_matrix(5, rng);
  const Matrix b = q * a * q.inverse();
  const auto sp = spectral_split(b);
  CHECK(sp.block_case == BlockCase::JordanBlock);
  CHECK(sp.unstable_pair);
  CHECK(sp.delta > 1.0);
  CHECK(min_symmetric_eigenvalue(scaled_block(sp.dominant_block, sp.delta)) > 0.0);
}

TEST_CASE("dominant real eigenvector") {
  Matrix a(3, 3);
  a << 2, 1, 0, 1, 3, 1, 0, 1, 4;
  const Vector v = dominant_real_eigenvector(a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const Vector ref = es.eigenvectors().col(2);
  CHECK(std::abs(std::abs(v.dot(ref)) - 1.0) < 1e-10);
}
