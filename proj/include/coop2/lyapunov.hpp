#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "coop2/linalg.hpp"
#include "coop2/model.hpp"
#include "coop2/spectral.hpp"

namespace coop2::lyapunov {

/// |xi_{3..n}| / |xi|. Throws ZeroVector for xi = 0.
double p_ratio(const Vector& xi);

/// Random direction with s^-(d) <= 1: one sign flip at a random position,
/// log-spread magnitudes and occasional zero entries.
Vector sample_p2_minus(int n, std::mt19937_64& rng);

struct Sampling {
  int separation_samples = 100'000;
  int remainder_samples = 100'000;
  int level_set_samples = 10'000;
  std::uint64_t seed = 0;
};

struct LevelSetCheck {
  double eta = 0.0;
  int samples = 0;      // drawn
  int in_domain = 0;    // inside the box, hence tested
  int violations = 0;   // V' <= 0
  double min_vdot = 0.0;
  double min_vdot_over_v = 0.0;  // min of V'/V
};

struct LyapunovCertificate {
  double delta = 1.0;
  Matrix s_delta;
  Eigen::Matrix2d lambda_delta = Eigen::Matrix2d::Zero();
  spectral::BlockCase block_case = spectral::BlockCase::RealDiagonal;
  double eps_tilde = 0.0;
  double max_p = 0.0;   // largest sampled p over the P^2_- directions
  double theta_tilde = 0.0;
  double m_bound = 0.0;
  double alpha = 0.0;
  std::optional<double> eta0;  // empty: unbounded (M = 0)
  std::vector<LevelSetCheck> checks;
  bool verified = false;
  Sampling sampling;
  std::string label = "sampled, not proved";
};

/// Coordinates q = S_delta (x - e).
struct Coordinates {
  Matrix s;
  Matrix s_inv;
  Vector e;

  Vector to_q(const Vector& x) const { return s * (x - e); }
  Vector to_x(const Vector& q) const { return s_inv * q + e; }
};

/// V(q) = (q1^2 + q2^2) / 2.
double level(const Vector& q);

/// V'(q) = q1 g1(q) + q2 g2(q) with g(q) = S f(S^-1 q + e).
double level_derivative(const Model& model, const Coordinates& c, const Vector& q);

/// Sample points for the remainder bound: half uniform in the box, half on
/// random rays from e with log-uniform radius.
std::vector<Vector> remainder_sample(const Model& model, const Vector& e, int count, std::uint64_t seed);

/// max_i |h_i(q)| / |q|^2 at x, with h = S (f(x) - J(e)(x - e)).
double remainder_ratio(const Model& model, const Coordinates& c, const Matrix& jac_e, const Vector& x);

/// Steps 1-3 of the oscillation proof, estimated by sampling.
/// Throws SeparationFailure or NotPositiveDefinite.
LyapunovCertificate build_certificate(const Model& model, const Vector& e,
                                      const spectral::SpectralSplit& split, const Sampling& sampling = {});

Coordinates coordinates(const LyapunovCertificate& cert, const Vector& e);

}  // namespace coop2::lyapunov
