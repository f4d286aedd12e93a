#include "coop2/coop.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "coop2/error.hpp"

namespace coop2::coop {

SignPattern pattern_cooperative(int n) {
  SignPattern p{n, std::vector<Cell>(static_cast<std::size_t>(n * n), Cell::Pos)};
  for (int i = 0; i < n; ++i) p.at(i, i) = Cell::Any;
  return p;
}

SignPattern pattern_two_cooperative(int n) {
  if (n < 3) throw Error(ErrorCode::BadDimension, "2-cooperative pattern needs n >= 3");
  SignPattern p{n, std::vector<Cell>(static_cast<std::size_t>(n * n), Cell::Zero)};
  for (int i = 0; i < n; ++i) {
    p.at(i, i) = Cell::Any;
    if (i + 1 < n) {
      p.at(i, i + 1) = Cell::Pos;
      p.at(i + 1, i) = Cell::Pos;
    }
  }
  p.at(0, n - 1) = Cell::Neg;
  p.at(n - 1, 0) = Cell::Neg;
  return p;
}

SignPattern pattern_for(int k, int n) {
  if (k == 1) return pattern_cooperative(n);
  if (k == 2) return pattern_two_cooperative(n);
  throw Error(ErrorCode::BadK, "sign patterns exist for k = 1, 2 only");
}

const char* to_string(Cell c) {
  switch (c) {
    case Cell::Neg: return "NEG";
    case Cell::Zero: return "ZERO";
    case Cell::Pos: return "POS";
    case Cell::Any: return "ANY";
  }
  return "?";
}

PatternMatch matches_pattern(const Matrix& a, const SignPattern& pattern, double tau) {
  if (a.rows() != pattern.n || a.cols() != pattern.n) {
    throw Error(ErrorCode::DimensionMismatch, "matrix and pattern sizes differ");
  }
  for (int i = 0; i < pattern.n; ++i) {
    for (int j = 0; j < pattern.n; ++j) {
      const double v = a(i, j);
      bool ok = true;
      switch (pattern.at(i, j)) {
        case Cell::Neg: ok = v <= tau; break;
        case Cell::Zero: ok = std::abs(v) <= tau; break;
        case Cell::Pos: ok = v >= -tau; break;
        case Cell::Any: break;
      }
      if (!ok) return {false, PatternViolation{i, j, v, pattern.at(i, j)}};
    }
  }
  return {};
}

bool is_irreducible(const Matrix& a, double tau) {
  const Eigen::Index n = a.rows();
  if (n <= 1) return true;
  auto reaches_all = [&](bool transpose) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const Eigen::Index i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i || seen[static_cast<std::size_t>(j)]) continue;
        const double w = transpose ? a(j, i) : a(i, j);
        if (std::abs(w) > tau) {
          seen[static_cast<std::size_t>(j)] = true;
          ++count;
          stack.push_back(j);
        }
      }
    }
    return count == static_cast<std::size_t>(n);
  };
  return reaches_all(false) && reaches_all(true);
}

// Closed-form Jacobians produce exact zeros off their structural support, while
// genuine entries can be tiny (Goodwin's m x^(m-1)/(1+x^m)^2 is ~1e-13 near the
// top of the box for m = 10), so the threshold sits at roundoff-squared level.
double default_irreducibility_tol(const Matrix& a) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  return eps * eps * norm_inf(a);
}

namespace {

Matrix panel_jacobian(const Model& model, const Vector& xa, const Vector& xb, const Quadrature& q,
                      double lo, double hi) {
  Matrix m = Matrix::Zero(model.n, model.n);
  const double w = hi - lo;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double r = lo + w * q.nodes[i];
    m += (w * q.weights[i]) * model.jac(r * xa + (1.0 - r) * xb);
  }
  return m;
}

// Bisect a panel until its rule agrees with the sum over its halves.
Matrix adaptive_jacobian(const Model& model, const Vector& xa, const Vector& xb, const Quadrature& q,
                         double lo, double hi, const Matrix& whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const Matrix left = panel_jacobian(model, xa, xb, q, lo, mid);
  const Matrix right = panel_jacobian(model, xa, xb, q, mid, hi);
  const Matrix both = left + right;
  if (depth == 0 || (both - whole).cwiseAbs().maxCoeff() <= tol) return both;
  return adaptive_jacobian(model, xa, xb, q, lo, mid, left, 0.5 * tol, depth - 1) +
         adaptive_jacobian(model, xa, xb, q, mid, hi, right, 0.5 * tol, depth - 1);
}

}  // namespace

Matrix segment_jacobian(const Model& model, const Vector& xa, const Vector& xb,
                        int quadrature_points) {
  const Quadrature q = gauss_legendre_unit(quadrature_points);
  const Matrix whole = panel_jacobian(model, xa, xb, q, 0.0, 1.0);
  const double tol = 1e-13 * std::max(1.0, whole.cwiseAbs().maxCoeff());
  return adaptive_jacobian(model, xa, xb, q, 0.0, 1.0, whole, tol, 12);
}

Matrix variational_matrix(const Model& model, const Vector& a, const Vector& b, double t,
                          int quadrature_points, const ode::Options& options) {
  if (!model.box.contains(a) || !model.box.contains(b)) {
    throw Error(ErrorCode::OutOfDomain, "initial states must lie in the box");
  }
  Vector xa = a;
  Vector xb = b;
  if (t > 0.0) {
    try {
      xa = ode::integrate(model, a, t, options).final_state();
      xb = ode::integrate(model, b, t, options).final_state();
    } catch (const Error& ex) {
      if (ex.code() == ErrorCode::LeftDomain) throw Error(ErrorCode::OutOfDomain, ex.what());
      throw;
    }
  }
  if (!model.box.contains(xa) || !model.box.contains(xb)) {
    throw Error(ErrorCode::OutOfDomain, "trajectory sample left the box");
  }
  return segment_jacobian(model, xa, xb, quadrature_points);
}

std::vector<Vector> sample_box(const Box& box, const Sampling& sampling) {
  std::vector<Vector> points;
  const int n = box.dim();
  if (sampling.include_center) points.push_back(box.center());
  if (sampling.include_corners) {
    for (auto& c : box.corners()) points.push_back(std::move(c));
  }
  std::mt19937_64 rng(sampling.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (sampling.kind == SamplingKind::Halton) {
    std::vector<double> shift(static_cast<std::size_t>(n), 0.0);
    if (sampling.seed != 0) {
      for (auto& s : shift) s = unit(rng);
    }
    for (int i = 1; i <= sampling.count; ++i) {
      points.push_back(box.from_unit(halton_point(static_cast<std::size_t>(i), n, shift)));
    }
  } else {
    std::vector<double> u(static_cast<std::size_t>(n));
    for (int i = 0; i < sampling.count; ++i) {
      for (auto& v : u) {
        do {
          v = unit(rng);
        } while (v == 0.0);
      }
      points.push_back(box.from_unit(u));
    }
  }
  return points;
}

CoopCertificate certify(const Model& model, int k, bool strong, const CertifyOptions& options) {
  const SignPattern pattern = pattern_for(k, model.n);
  CoopCertificate cert;
  cert.model = model.name;
  cert.k = k;
  cert.strong = strong;
  cert.domain = model.box;
  cert.structural = k == 2 && model.structural_two_cooperative;
  cert.tau = options.tau;

  auto report = [&](CertificateViolation v) {
    ++cert.violation_count;
    if (cert.violations.size() < options.max_reported_violations) cert.violations.push_back(std::move(v));
  };

  int irreducible = 0;
  for (const Vector& x : sample_box(model.box, options.sampling)) {
    const Matrix j = model.jac(x);
    ++cert.samples_checked;
    const PatternMatch match = matches_pattern(j, pattern, options.tau);
    if (!match.ok) {
      const auto& v = *match.first_violation;
      report({x, "pattern", v.row, v.col, v.value});
    }
    if (!model.box.contains_interior(x)) continue;
    ++cert.interior_samples;
    const double tau_irr = options.irreducible_tau ? *options.irreducible_tau : default_irreducibility_tol(j);
    if (is_irreducible(j, tau_irr)) {
      ++irreducible;
    } else if (strong) {
      report({x, "irreducible", -1, -1, 0.0});
    }
  }
  cert.irreducibility_fraction =
      cert.interior_samples > 0 ? static_cast<double>(irreducible) / cert.interior_samples : 1.0;
  cert.passed = cert.violation_count == 0;
  return cert;
}

}  // namespace coop2::coop
