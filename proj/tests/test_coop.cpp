#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "coop2/coop.hpp"
#include "coop2/error.hpp"
#include "coop2/models.hpp"

using namespace coop2;
using namespace coop2::coop;

namespace {
Model example2() { return models::goodwin({0.5, 0.5, 0.5, 0.5}, 10); }
Model example3() { return models::rna_oscillator(RnaParams::example3()); }
}  // namespace

TEST_CASE("sign patterns") {
  const auto p = pattern_two_cooperative(4);
  CHECK(p.at(0, 3) == Cell::Neg);
  CHECK(p.at(3, 0) == Cell::Neg);
  CHECK(p.at(0, 1) == Cell::Pos);
  CHECK(p.at(2, 1) == Cell::Pos);
  CHECK(p.at(0, 2) == Cell::Zero);
  CHECK(p.at(2, 2) == Cell::Any);
  CHECK_THROWS_AS(pattern_two_cooperative(2), Error);
  const auto c = pattern_cooperative(3);
  CHECK(c.at(0, 2) == Cell::Pos);
  CHECK(c.at(1, 1) == Cell::Any);
  CHECK_THROWS_AS(pattern_for(3, 4), Error);
}

TEST_CASE("pattern matching reports the first violating cell") {
  Matrix a(3, 3);
  a << -1, 1, -1, 2, -3, 1, -0.5, 1, 0;
  CHECK(matches_pattern(a, pattern_two_cooperative(3)).ok);
  a(0, 2) = 0.1;
  const auto r = matches_pattern(a, pattern_two_cooperative(3));
  REQUIRE_FALSE(r.ok);
  CHECK(r.first_violation->row == 0);
  CHECK(r.first_violation->col == 2);
  CHECK(r.first_violation->cell == Cell::Neg);
  CHECK(matches_pattern(a, pattern_two_cooperative(3), 0.2).ok);
  CHECK_THROWS_AS(matches_pattern(Matrix::Zero(2, 2), pattern_two_cooperative(3)), Error);
  Matrix b = Matrix::Zero(4, 4);
  b(0, 2) = 1e-3;
  CHECK_FALSE(matches_pattern(b, pattern_two_cooperative(4)).ok);
}

TEST_CASE("irreducibility is strong connectivity") {
  Matrix cyc = Matrix::Zero(4, 4);
  cyc(0, 1) = cyc(1, 2) = cyc(2, 3) = cyc(3, 0) = 1.0;
  CHECK(is_irreducible(cyc, 0.0));
  Matrix chain = cyc;
  chain(3, 0) = 0.0;
  CHECK_FALSE(is_irreducible(chain, 0.0));
  CHECK_FALSE(is_irreducible(Matrix::Identity(3, 3), 0.0));
  CHECK(is_irreducible(Matrix::Identity(1, 1), 0.0));
  Matrix weak = cyc;
  weak(3, 0) = 1e-20;
  CHECK(is_irreducible(weak, 0.0));
  CHECK_FALSE(is_irreducible(weak, 1e-12));
}

TEST_CASE("both presets certify as strongly 2-cooperative with zero violations") {
  for (const Model& m : {example2(), example3()}) {
    const auto cert = certify(m, 2, true);
    CHECK(cert.passed);
    CHECK(cert.violation_count == 0);
    CHECK(cert.samples_checked >= 4096);
    CHECK(cert.irreducibility_fraction == 1.0);
    CHECK(cert.structural);
  }
}

TEST_CASE("Goodwin fails the cooperative (k = 1) pattern at the corner entry") {
  const auto cert = certify(example2(), 1, false);
  CHECK_FALSE(cert.passed);
  REQUIRE_FALSE(cert.violations.empty());
  CHECK(cert.violations.front().kind == "pattern");
  CHECK(cert.violations.front().row == 0);
  CHECK(cert.violations.front().col == 3);
}

TEST_CASE("a decoupled field fails strong certification on irreducibility") {
  const Model m = linear_model(-Matrix::Identity(3, 3), Vector::Zero(3), Box{-Vector::Ones(3), Vector::Ones(3)});
  const auto weak = certify(m, 2, false);
  CHECK(weak.passed);
  CHECK(weak.irreducibility_fraction == 0.0);
  const auto strong = certify(m, 2, true);
  CHECK_FALSE(strong.passed);
  REQUIRE_FALSE(strong.violations.empty());
  CHECK(strong.violations.front().kind == "irreducible");
}

TEST_CASE("sample sets are deterministic under a seed") {
  Sampling s;
  s.count = 64;
  s.seed = 9;
  const Box box{Vector::Zero(3), Vector::Ones(3)};
  const auto a = sample_box(box, s), b = sample_box(box, s);
  REQUIRE(a.size() == 64 + 8 + 1);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  s.kind = SamplingKind::Random;
  const auto c = sample_box(box, s), d = sample_box(box, s);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == d[i]);
  s.seed = 10;
  CHECK(sample_box(box, s).back() != d.back());
}

TEST_CASE("default segment Jacobian matches a fine trapezoid rule on the reference segment") {
  const Model m = example2();
  const Vector a = Vector::Constant(4, 0.1);
  const Vector e = models::goodwin_equilibrium(m).e;
  const Matrix ours = segment_jacobian(m, a, e);
  const Matrix ref =
      oracle::trapezoid_segment_jacobian([&](const Vector& x) { return m.jac(x); }, a, e, 100000);
  CHECK((ours - ref).cwiseAbs().maxCoeff() <= 1e-8);
}

// Box-spanning segments cross the steep Hill nonlinearity, so the comparison
// uses a convergent quadrature order rather than the default.
TEST_CASE("segment Jacobian agrees with the trapezoid oracle and the mean-value identity") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const Model& m : {example2(), example3()}) {
    for (int k = 0; k < 20; ++k) {
      const Vector a = m.box.from_unit({u(rng), u(rng), u(rng), u(rng)});
      const Vector b = m.box.from_unit({u(rng), u(rng), u(rng), u(rng)});
      const Matrix ours = segment_jacobian(m, a, b, 128);
      const Matrix ref =
          oracle::trapezoid_segment_jacobian([&](const Vector& x) { return m.jac(x); }, a, b, 20000);
      CHECK((ours - ref).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
      // f(a) - f(b) = M (a - b), up to cancellation roundoff
      const Vector lhs = m.f(a) - m.f(b);
      const double scale = std::max({1.0, lhs.norm(), ours.norm() * (a - b).norm()});
      CHECK((lhs - ours * (a - b)).norm() <= 1e-9 * scale);
    }
  }
}

TEST_CASE("variational matrix along trajectories keeps the 2-cooperative pattern") {
  const Model m = example2();
  const Vector a = Vector::Constant(4, 0.1);
  const Vector b = m.box.center();
  for (double t : {0.0, 1.0, 10.0}) {
    const Matrix v = variational_matrix(m, a, b, t);
    CHECK(matches_pattern(v, pattern_two_cooperative(4)).ok);
    CHECK(is_irreducible(v, default_irreducibility_tol(v)));
  }
  const Matrix v0 = variational_matrix(m, a, b, 0.0);
  CHECK((v0 - segment_jacobian(m, a, b)).norm() == 0.0);
  try {
    variational_matrix(m, Vector::Constant(4, 50.0), b, 1.0);
    FAIL("expected OutOfDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
}
