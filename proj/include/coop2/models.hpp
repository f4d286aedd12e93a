#pragma once

#include <string>
#include <vector>

#include "coop2/model.hpp"
#include "coop2/spectral.hpp"

namespace coop2::models {

/// n-dimensional Goodwin loop:
///   x1' = -a1 x1 + 1/(1 + xn^m),  xi' = -ai xi + x_{i-1}  (i >= 2)
/// with box prod_i [0, 1/(a1...ai)]. n = alpha.size() >= 3.
Model goodwin(const std::vector<double>& alpha, int m);

/// RNA-mediated oscillator (4 states). Box upper corner is
/// (kappa1 x2tot/delta1, x2tot, kappa2 x4tot/delta2, x4tot).
Model rna_oscillator(const RnaParams& p);

struct Equilibrium {
  Vector e;
  double residual = 0.0;  // ||f(e)||_inf
  bool in_interior = false;
  spectral::OrderedSpectrum spectrum;
  int unstable_count = 0;
  std::string method;
};

/// Q(s) = alpha s^{m+1} + alpha s - 1 with alpha the product of the gains.
double goodwin_q(const GoodwinParams& p, double s);

/// Bisection for the positive root of Q, then back-substitution
/// e_j = (prod_{k > j} alpha_k) e_n. Requires a Goodwin model.
Equilibrium goodwin_equilibrium(const Model& model);

/// beta + prod_j (s + alpha_j), highest degree first, where beta is the
/// product of the loop gains of J(e).
std::vector<double> goodwin_characteristic_polynomial(const GoodwinParams& p, const Vector& e);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iterations = 100;
  int extra_starts = 32;
};

/// Damped Newton from x0, then the box center and `extra_starts` Halton
/// interior points. Throws NoConvergence or NotInterior.
Equilibrium find_equilibrium(const Model& model, const Vector& x0, const NewtonOptions& options = {});

/// Converged Newton solutions from the center plus `starts` - 1 Halton starts.
std::vector<Vector> equilibrium_candidates(const Model& model, int starts = 33,
                                           const NewtonOptions& options = {});

/// Closed-form solver for Goodwin models, Newton from the box center otherwise.
Equilibrium equilibrium(const Model& model);

/// Fill residual, interior flag and spectrum for a computed equilibrium.
Equilibrium describe_equilibrium(const Model& model, const Vector& e, std::string method);

}  // namespace coop2::models
