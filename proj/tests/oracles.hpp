#pragma once
// Reference computations that share no code with the library: brute-force
// sign variations, Taylor-series exponentials, Eigen's own eigensolver, a
// trapezoid-rule variational matrix and a fixed-step RK4 period estimate.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline int variations_of_nonzero(const std::vector<double>& v) {
  int c = 0;
  for (std::size_t i = 1; i < v.size(); ++i) c += (v[i - 1] > 0) != (v[i] > 0);
  return c;
}

inline int s_minus(const std::vector<double>& x) {
  std::vector<double> nz;
  for (double v : x) {
    if (v != 0.0) nz.push_back(v);
  }
  return variations_of_nonzero(nz);
}

// Max over all 2^z completions of the zero entries; z is capped at 20.
inline int s_plus(const std::vector<double>& x) {
  std::vector<std::size_t> zeros;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) zeros.push_back(i);
  }
  if (zeros.size() > 20) throw std::invalid_argument("too many zeros for enumeration");
  int best = 0;
  std::vector<double> y = x;
  for (unsigned long mask = 0; mask < (1UL << zeros.size()); ++mask) {
    for (std::size_t k = 0; k < zeros.size(); ++k) y[zeros[k]] = (mask >> k) & 1UL ? 1.0 : -1.0;
    best = std::max(best, variations_of_nonzero(y));
  }
  return best;
}

// Truncated Taylor series with scaling and squaring.
inline Mat taylor_exp(const Mat& a, double s = 1.0) {
  Mat m = a * s;
  int squarings = 0;
  while (m.cwiseAbs().rowwise().sum().maxCoeff() > 0.125) {
    m /= 2.0;
    ++squarings;
  }
  Mat term = Mat::Identity(a.rows(), a.cols());
  Mat sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * m / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

inline std::vector<std::complex<double>> eigenvalues(const Mat& a) {
  Eigen::EigenSolver<Mat> es(a, false);
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < a.rows(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

// Monic coefficients (highest degree first) of prod (s - lambda_i).
inline std::vector<double> poly_from_roots(const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> c{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= r * c[i];
    }
    c = next;
  }
  std::vector<double> out;
  for (const auto& z : c) out.push_back(z.real());
  return out;
}

// Composite trapezoid rule for the Jacobian averaged along a segment.
inline Mat trapezoid_segment_jacobian(const std::function<Mat(const Vec&)>& jac, const Vec& a, const Vec& b,
                                      int panels = 4000) {
  Mat sum = 0.5 * (jac(a) + jac(b));
  for (int i = 1; i < panels; ++i) {
    const double r = static_cast<double>(i) / panels;
    sum += jac(r * a + (1.0 - r) * b);
  }
  return sum / panels;
}

inline Vec rk4_step(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
  const Vec k1 = f(x);
  const Vec k2 = f(x + 0.5 * h * k1);
  const Vec k3 = f(x + 0.5 * h * k2);
  const Vec k4 = f(x + h * k3);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Mean period of upward crossings of x_idx = level over the second half of a
// long fixed-step run; crossing times by cubic Hermite interpolation.
inline double rk4_period(const std::function<Vec(const Vec&)>& f, Vec x, int idx, double level, double horizon,
                         double h) {
  std::vector<double> crossings;
  const long steps = std::lround(horizon / h);
  Vec fx = f(x);
  for (long k = 0; k < steps; ++k) {
    const Vec y = rk4_step(f, x, h);
    const Vec fy = f(y);
    const double g0 = x(idx) - level, g1 = y(idx) - level;
    const double t0 = k * h;
    if (t0 >= 0.5 * horizon && g0 < 0.0 && g1 >= 0.0) {
      // Newton on the Hermite cubic of the component on [0, 1].
      const double d0 = h * fx(idx), d1 = h * fy(idx);
      double s = g0 / (g0 - g1);
      for (int it = 0; it < 30; ++it) {
        const double s2 = s * s, s3 = s2 * s;
        const double p = (2 * s3 - 3 * s2 + 1) * g0 + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * g1 + (s3 - s2) * d1;
        const double dp = (6 * s2 - 6 * s) * g0 + (3 * s2 - 4 * s + 1) * d0 + (-6 * s2 + 6 * s) * g1 + (3 * s2 - 2 * s) * d1;
        s -= p / dp;
      }
      crossings.push_back(t0 + s * h);
    }
    x = y;
    fx = fy;
  }
  if (crossings.size() < 2) return 0.0;
  return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

// Vector fields written out from the published equations.
inline Vec goodwin_field(const Vec& x, const std::vector<double>& alpha, int m) {
  const auto n = x.size();
  Vec d(n);
  d(0) = -alpha[0] * x(0) + 1.0 / (1.0 + std::pow(x(n - 1), m));
  for (Eigen::Index i = 1; i < n; ++i) d(i) = -alpha[static_cast<std::size_t>(i)] * x(i) + x(i - 1);
  return d;
}

inline Vec rna_field(const Vec& x) {
  const double k1 = 15, k2 = 1, b1 = 0.2, b2 = 0.5, d1 = 0.01, d2 = 0.1, g1 = 0.1, g2 = 20, x2t = 15, x4t = 20;
  Vec d(4);
  d(0) = k1 * x(1) - d1 * x(0) - g2 * x(3) * x(0);
  d(1) = -b1 * x(1) + g1 * (x2t - x(1)) * x(2);
  d(2) = k2 * x(3) - d2 * x(2) - g1 * (x2t - x(1)) * x(2);
  d(3) = b2 * (x4t - x(3)) - g2 * x(3) * x(0);
  return d;
}

}  // namespace oracle
