#include "coop2/lyapunov.hpp"

#include <cmath>
#include <limits>

#include "coop2/error.hpp"

namespace coop2::lyapunov {

double p_ratio(const Vector& xi) {
  const double total = xi.norm();
  if (total == 0.0) throw Error(ErrorCode::ZeroVector, "p_ratio of the zero vector");
  if (xi.size() <= 2) return 0.0;
  return xi.tail(xi.size() - 2).norm() / total;
}

Vector sample_p2_minus(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> cut(0, n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> spread(-3.0, 3.0);
  Vector d(n);
  do {
    const int j = cut(rng);
    const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) {
      const double mag = unit(rng) < 0.1 ? 0.0 : std::exp(spread(rng));
      d(i) = (i < j ? sign : -sign) * mag;
    }
  } while (d.isZero(0.0));
  return d;
}

double level(const Vector& q) { return 0.5 * (q(0) * q(0) + q(1) * q(1)); }

double level_derivative(const Model& model, const Coordinates& c, const Vector& q) {
  const Vector g = c.s * model.f(c.to_x(q));
  return q(0) * g(0) + q(1) * g(1);
}

Coordinates coordinates(const LyapunovCertificate& cert, const Vector& e) {
  return {cert.s_delta, cert.s_delta.inverse(), e};
}

std::vector<Vector> remainder_sample(const Model& model, const Vector& e, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  const Box& box = model.box;
  const double r_max = 0.5 * box.diameter();
  std::vector<Vector> pts;
  pts.reserve(static_cast<std::size_t>(count));
  std::vector<double> u(static_cast<std::size_t>(model.n));
  while (static_cast<int>(pts.size()) < count) {
    if (pts.size() % 2 == 0) {
      for (auto& v : u) v = unit(rng);
      pts.push_back(box.from_unit(u));
      continue;
    }
    Vector dir(model.n);
    for (int i = 0; i < model.n; ++i) dir(i) = normal(rng);
    if (dir.norm() == 0.0) continue;
    const double r = r_max * std::pow(10.0, -4.0 * unit(rng));
    const Vector x = e + (r / dir.norm()) * dir;
    if (box.contains(x)) pts.push_back(x);
  }
  return pts;
}

double remainder_ratio(const Model& model, const Coordinates& c, const Matrix& jac_e, const Vector& x) {
  const Vector dx = x - c.e;
  const Vector q = c.s * dx;
  const double q2 = q.squaredNorm();
  if (q2 == 0.0) return 0.0;
  const Vector h = c.s * (model.f(x) - jac_e * dx);
  return h.lpNorm<Eigen::Infinity>() / q2;
}

LyapunovCertificate build_certificate(const Model& model, const Vector& e,
                                      const spectral::SpectralSplit& split, const Sampling& sampling) {
  const int n = model.n;
  if (!(split.gap > 0.0)) throw Error(ErrorCode::GapTooSmall, "spectral gap must be positive");
  if (!split.unstable_pair) throw Error(ErrorCode::NotUnstable, "dominant pair is not unstable");

  LyapunovCertificate cert;
  cert.sampling = sampling;
  cert.delta = split.delta;
  cert.block_case = split.block_case;
  Matrix d = Matrix::Identity(n, n);
  d(1, 1) = split.delta;
  cert.s_delta = d * split.similarity;
  cert.lambda_delta = spectral::scaled_block(split.dominant_block, split.delta);
  cert.alpha = spectral::min_symmetric_eigenvalue(cert.lambda_delta);
  if (!(cert.alpha > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite, "symmetric part of the scaled block is not positive definite");
  }
  const Coordinates c = coordinates(cert, e);

  // Conic separation: p stays below 1 - eps on the image of P^2_-.
  std::mt19937_64 rng(sampling.seed);
  double max_p = 0.0;
  for (int i = 0; i < sampling.separation_samples; ++i) {
    max_p = std::max(max_p, p_ratio(c.s * sample_p2_minus(n, rng)));
  }
  cert.max_p = max_p;
  for (int k = 1; k <= 20; ++k) {
    const double eps = std::ldexp(1.0, -k);
    if (max_p <= 1.0 - eps) {
      cert.eps_tilde = eps;
      break;
    }
  }
  if (cert.eps_tilde == 0.0) {
    throw Error(ErrorCode::SeparationFailure, "sampled P^2_- directions approach the complementary subspace");
  }
  const double qt = (1.0 - cert.eps_tilde) * (1.0 - cert.eps_tilde);
  cert.theta_tilde = 1.0 / (1.0 - qt);

  // Quadratic remainder bound.
  const Matrix jac_e = model.jac(e);
  for (const Vector& x : remainder_sample(model, e, sampling.remainder_samples, sampling.seed + 1)) {
    cert.m_bound = std::max(cert.m_bound, remainder_ratio(model, c, jac_e, x));
  }

  std::vector<double> etas;
  if (cert.m_bound > 0.0) {
    const double r = cert.alpha / (std::pow(2.0, 1.5) * cert.m_bound * cert.theta_tilde);
    cert.eta0 = r * r;
    etas = {*cert.eta0 / 2.0, *cert.eta0 / 4.0};
  } else {
    // No remainder: test the largest level reached in the box and a quarter of it.
    double v_box = 0.0;
    for (const Vector& x : model.box.corners()) v_box = std::max(v_box, level(c.to_q(x)));
    etas = {v_box / 2.0, v_box / 4.0};
  }

  // Level sets {V = eta} restricted to the image of P^2_- within the box.
  cert.verified = true;
  for (const double eta : etas) {
    LevelSetCheck chk;
    chk.eta = eta;
    chk.min_vdot = std::numeric_limits<double>::infinity();
    chk.min_vdot_over_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sampling.level_set_samples; ++i) {
      const Vector xi = c.s * sample_p2_minus(n, rng);
      const double v = level(xi);
      if (v == 0.0) continue;
      ++chk.samples;
      const Vector q = std::sqrt(eta / v) * xi;
      if (!model.box.contains(c.to_x(q))) continue;
      ++chk.in_domain;
      const double vdot = level_derivative(model, c, q);
      chk.min_vdot = std::min(chk.min_vdot, vdot);
      chk.min_vdot_over_v = std::min(chk.min_vdot_over_v, vdot / eta);
      if (!(vdot > 0.0)) ++chk.violations;
    }
    if (chk.in_domain == 0) {
      chk.min_vdot = 0.0;
      chk.min_vdot_over_v = 0.0;
    }
    cert.verified = cert.verified && chk.violations == 0 && chk.in_domain > 0;
    cert.checks.push_back(chk);
  }
  return cert;
}

}  // namespace coop2::lyapunov
