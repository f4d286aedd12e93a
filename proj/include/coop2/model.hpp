#pragma once

#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "coop2/linalg.hpp"

namespace coop2 {

/// Axis-aligned box [lower, upper].
struct Box {
  Vector lower;
  Vector upper;

  int dim() const { return static_cast<int>(lower.size()); }
  Vector center() const { return 0.5 * (lower + upper); }
  /// Euclidean length of the main diagonal.
  double diameter() const { return (upper - lower).norm(); }
  bool contains(const Vector& x, double slack = 0.0) const;
  /// True when every coordinate is strictly inside (lower, upper).
  bool contains_interior(const Vector& x) const;
  /// Largest per-coordinate excursion outside the box (0 when inside).
  double excursion(const Vector& x) const;
  Vector clamp(const Vector& x) const;
  /// All 2^n vertices; n is capped at 20.
  std::vector<Vector> corners() const;
  /// Map a point of the unit cube onto the box.
  Vector from_unit(const std::vector<double>& u) const;
};

struct GoodwinParams {
  std::vector<double> alpha;
  int m = 1;
};

struct RnaParams {
  double kappa1 = 15.0;
  double kappa2 = 1.0;
  double beta1 = 0.2;
  double beta2 = 0.5;
  double delta1 = 0.01;
  double delta2 = 0.1;
  double gamma1 = 0.1;
  double gamma2 = 20.0;
  double x2tot = 15.0;
  double x4tot = 20.0;

  /// Parameter set of the published RNA oscillator run.
  static RnaParams example3() { return {}; }
  std::map<std::string, double> as_map() const;
  /// Overrides named fields; throws BadParams on unknown keys.
  void set(const std::string& key, double value);
};

/// Autonomous vector field x' = f(x) on an invariant box.
struct Model {
  using Field = std::function<Vector(const Vector&)>;
  using JacobianFn = std::function<Matrix(const Vector&)>;

  std::string name;
  int n = 0;
  Box box;
  std::map<std::string, double> params;
  Field field;
  JacobianFn jacobian;
  /// The closed-form Jacobian has the 2-cooperative sign pattern by inspection.
  bool structural_two_cooperative = false;
  std::variant<std::monostate, GoodwinParams, RnaParams> builtin;

  Vector f(const Vector& x) const { return field(x); }
  Matrix jac(const Vector& x) const { return jacobian(x); }
  bool is_goodwin() const { return std::holds_alternative<GoodwinParams>(builtin); }
  bool is_rna() const { return std::holds_alternative<RnaParams>(builtin); }
};

/// f(x) = A (x - c) on the given box.
Model linear_model(const Matrix& a, const Vector& c, const Box& box, std::string name = "linear");

}  // namespace coop2
