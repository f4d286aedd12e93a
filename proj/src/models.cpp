#include "coop2/models.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "coop2/error.hpp"

namespace coop2::models {

Model goodwin(const std::vector<double>& alpha, int m) {
  const int n = static_cast<int>(alpha.size());
  if (n < 3) throw Error(ErrorCode::BadParams, "Goodwin model needs n >= 3");
  if (m < 1) throw Error(ErrorCode::BadParams, "Hill exponent m must be >= 1");
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorCode::BadParams, "alpha_i must be > 0");
  }
  Model model;
  model.name = "goodwin";
  model.n = n;
  model.box.lower = Vector::Zero(n);
  model.box.upper = Vector(n);
  double prod = 1.0;
  for (int i = 0; i < n; ++i) {
    prod *= alpha[i];
    model.box.upper(i) = 1.0 / prod;
    model.params["alpha" + std::to_string(i + 1)] = alpha[i];
  }
  model.params["m"] = m;
  const Vector a = Eigen::Map<const Vector>(alpha.data(), n);
  model.field = [a, m, n](const Vector& x) -> Vector {
    Vector dx(n);
    dx(0) = -a(0) * x(0) + 1.0 / (1.0 + std::pow(x(n - 1), m));
    for (int i = 1; i < n; ++i) dx(i) = -a(i) * x(i) + x(i - 1);
    return dx;
  };
  model.jacobian = [a, m, n](const Vector& x) -> Matrix {
    Matrix j = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) j(i, i) = -a(i);
    for (int i = 1; i < n; ++i) j(i, i - 1) = 1.0;
    const double xm = std::pow(x(n - 1), m);
    const double xm1 = m == 1 ? 1.0 : std::pow(x(n - 1), m - 1);
    j(0, n - 1) = -m * xm1 / ((1.0 + xm) * (1.0 + xm));
    return j;
  };
  model.structural_two_cooperative = true;
  model.builtin = GoodwinParams{alpha, m};
  return model;
}

Model rna_oscillator(const RnaParams& p) {
  for (const auto& [key, value] : p.as_map()) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::BadParams, "RNA parameter " + key + " must be > 0");
    }
  }
  Model model;
  model.name = "rna";
  model.n = 4;
  model.params = p.as_map();
  model.box.lower = Vector::Zero(4);
  model.box.upper = Vector(4);
  model.box.upper << p.kappa1 * p.x2tot / p.delta1, p.x2tot, p.kappa2 * p.x4tot / p.delta2, p.x4tot;
  model.field = [p](const Vector& x) -> Vector {
    Vector dx(4);
    const double free2 = p.x2tot - x(1);
    dx(0) = p.kappa1 * x(1) - p.delta1 * x(0) - p.gamma2 * x(3) * x(0);
    dx(1) = -p.beta1 * x(1) + p.gamma1 * free2 * x(2);
    dx(2) = p.kappa2 * x(3) - p.delta2 * x(2) - p.gamma1 * free2 * x(2);
    dx(3) = p.beta2 * (p.x4tot - x(3)) - p.gamma2 * x(3) * x(0);
    return dx;
  };
  model.jacobian = [p](const Vector& x) -> Matrix {
    Matrix j = Matrix::Zero(4, 4);
    const double free2 = p.x2tot - x(1);
    j(0, 0) = -p.delta1 - p.gamma2 * x(3);
    j(0, 1) = p.kappa1;
    j(0, 3) = -p.gamma2 * x(0);
    j(1, 1) = -p.beta1 - p.gamma1 * x(2);
    j(1, 2) = p.gamma1 * free2;
    j(2, 1) = p.gamma1 * x(2);
    j(2, 2) = -p.delta2 - p.gamma1 * free2;
    j(2, 3) = p.kappa2;
    j(3, 0) = -p.gamma2 * x(3);
    j(3, 3) = -p.beta2 - p.gamma2 * x(0);
    return j;
  };
  model.structural_two_cooperative = true;
  model.builtin = p;
  return model;
}

double goodwin_q(const GoodwinParams& p, double s) {
  double alpha = 1.0;
  for (double a : p.alpha) alpha *= a;
  return alpha * std::pow(s, p.m + 1) + alpha * s - 1.0;
}

Equilibrium describe_equilibrium(const Model& model, const Vector& e, std::string method) {
  Equilibrium eq;
  eq.e = e;
  eq.residual = model.f(e).cwiseAbs().maxCoeff();
  eq.in_interior = model.box.contains_interior(e);
  eq.spectrum = spectral::eigenvalues(model.jac(e));
  eq.unstable_count = spectral::unstable_count(eq.spectrum).unstable;
  eq.method = std::move(method);
  return eq;
}

Equilibrium goodwin_equilibrium(const Model& model) {
  const auto* gp = std::get_if<GoodwinParams>(&model.builtin);
  if (gp == nullptr) throw Error(ErrorCode::BadParams, "goodwin_equilibrium needs a Goodwin model");
  double alpha = 1.0;
  for (double a : gp->alpha) alpha *= a;
  // Q(0) = -1 < 0 and Q(1/alpha + 1) > 0; Q is increasing on [0, inf)
  double lo = 0.0;
  double hi = 1.0 / alpha + 1.0;
  for (int iter = 0; iter < 400 && hi - lo > 1e-14 * std::max(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (goodwin_q(*gp, mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const int n = model.n;
  Vector e(n);
  e(n - 1) = 0.5 * (lo + hi);
  for (int j = n - 2; j >= 0; --j) e(j) = gp->alpha[j + 1] * e(j + 1);
  Equilibrium eq = describe_equilibrium(model, e, "goodwin-bisection");
  if (eq.residual > 1e-10) {
    throw Error(ErrorCode::NoConvergence,
                "Goodwin equilibrium residual " + std::to_string(eq.residual) + " above 1e-10");
  }
  return eq;
}

std::vector<double> goodwin_characteristic_polynomial(const GoodwinParams& p, const Vector& e) {
  const int n = static_cast<int>(p.alpha.size());
  const double xn = e(n - 1);
  const double xm = std::pow(xn, p.m);
  const double beta = p.m * std::pow(xn, p.m - 1) / ((1.0 + xm) * (1.0 + xm));
  // prod_j (s + alpha_j), coefficients lowest degree first while building
  std::vector<double> poly{1.0};
  for (double a : p.alpha) {
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k] += a * poly[k];
      next[k + 1] += poly[k];
    }
    poly = std::move(next);
  }
  poly[0] += beta;
  return {poly.rbegin(), poly.rend()};
}

namespace {

std::optional<Vector> newton(const Model& model, Vector x, const NewtonOptions& options) {
  Vector fx = model.f(x);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (!fx.allFinite()) return std::nullopt;
    if (fx.cwiseAbs().maxCoeff() <= options.tol) return x;
    const Matrix j = model.jac(x);
    Eigen::PartialPivLU<Matrix> lu(j);
    const Vector step = lu.solve(-fx);
    if (!step.allFinite()) return std::nullopt;
    // backtracking on ||f||_2, staying inside the closed box
    const double f0 = fx.norm();
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Vector trial = model.box.clamp(x + lambda * step);
      const Vector ft = model.f(trial);
      if (ft.allFinite() && ft.norm() < (1.0 - 1e-4 * lambda) * f0) {
        x = trial;
        fx = ft;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      // accept a full step once the residual is at round-off level
      const Vector trial = x + step;
      const Vector ft = model.f(trial);
      if (!ft.allFinite() || ft.norm() > 10.0 * f0) return std::nullopt;
      x = trial;
      fx = ft;
    }
  }
  if (fx.allFinite() && fx.cwiseAbs().maxCoeff() <= options.tol) return x;
  return std::nullopt;
}

std::vector<Vector> start_points(const Model& model, const Vector& x0, int extra) {
  std::vector<Vector> starts{x0, model.box.center()};
  for (int i = 1; i <= extra; ++i) {
    starts.push_back(model.box.from_unit(halton_point(static_cast<std::size_t>(i), model.n)));
  }
  return starts;
}

}  // namespace

Equilibrium find_equilibrium(const Model& model, const Vector& x0, const NewtonOptions& options) {
  if (x0.size() != model.n) throw Error(ErrorCode::DimensionMismatch, "initial guess size");
  bool hit_boundary = false;
  for (const Vector& start : start_points(model, x0, options.extra_starts)) {
    auto sol = newton(model, start, options);
    if (!sol) continue;
    if (!model.box.contains_interior(*sol)) {
      hit_boundary = true;
      continue;
    }
    return describe_equilibrium(model, *sol, "newton");
  }
  if (hit_boundary) throw Error(ErrorCode::NotInterior, "Newton converged only on the box boundary");
  throw Error(ErrorCode::NoConvergence, "damped Newton failed from every start");
}

std::vector<Vector> equilibrium_candidates(const Model& model, int starts,
                                           const NewtonOptions& options) {
  std::vector<Vector> points{model.box.center()};
  for (int i = 1; i < starts; ++i) {
    points.push_back(model.box.from_unit(halton_point(static_cast<std::size_t>(i), model.n)));
  }
  std::vector<Vector> out;
  for (const Vector& start : points) {
    if (auto sol = newton(model, start, options)) out.push_back(*sol);
  }
  return out;
}

Equilibrium equilibrium(const Model& model) {
  if (model.is_goodwin()) return goodwin_equilibrium(model);
  return find_equilibrium(model, model.box.center());
}

}  // namespace coop2::models
