#include "coop2/linalg.hpp"

#include <cmath>
#include <numbers>

#include "coop2/error.hpp"

namespace coop2 {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroEntry: return "ZeroEntry";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::GapTooSmall: return "GapTooSmall";
    case ErrorCode::NotUnstable: return "NotUnstable";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::UnboundIdentifier: return "UnboundIdentifier";
    case ErrorCode::DivisionNearZero: return "DivisionNearZero";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::NotInterior: return "NotInterior";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::LeftDomain: return "LeftDomain";
    case ErrorCode::SeparationFailure: return "SeparationFailure";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

double norm_inf(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

Quadrature gauss_legendre_unit(int points) {
  if (points < 1) throw Error(ErrorCode::BadParams, "quadrature needs at least one point");
  Quadrature q;
  q.nodes.resize(points);
  q.weights.resize(points);
  const int n = points;
  // Newton iteration on P_n from the Chebyshev-like initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[i] = 0.5 * (1.0 - x);
    q.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    q.weights[i] = 0.5 * w;
    q.weights[n - 1 - i] = 0.5 * w;
  }
  return q;
}

namespace {

constexpr int kPrimes[] = {2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,
                           43,  47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101,
                           103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167,
                           173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239,
                           241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

double radical_inverse(std::size_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

}  // namespace

std::vector<double> halton_point(std::size_t index, int dim, const std::vector<double>& shift) {
  if (dim < 1 || dim > static_cast<int>(std::size(kPrimes))) {
    throw Error(ErrorCode::BadDimension, "Halton dimension out of range");
  }
  std::vector<double> p(dim);
  for (int d = 0; d < dim; ++d) {
    double v = radical_inverse(index, kPrimes[d]);
    if (!shift.empty()) v = std::fmod(v + shift[d], 1.0);
    // keep strictly inside (0,1)
    if (v <= 0.0) v = 0.5 / (index + 2.0);
    p[d] = v;
  }
  return p;
}

}  // namespace coop2
