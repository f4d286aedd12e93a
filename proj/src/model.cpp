#include "coop2/model.hpp"

#include <algorithm>
#include <cmath>

#include "coop2/error.hpp"

namespace coop2 {

bool Box::contains(const Vector& x, double slack) const {
  for (int i = 0; i < dim(); ++i) {
    if (x(i) < lower(i) - slack || x(i) > upper(i) + slack) return false;
  }
  return true;
}

bool Box::contains_interior(const Vector& x) const {
  for (int i = 0; i < dim(); ++i) {
    if (!(x(i) > lower(i) && x(i) < upper(i))) return false;
  }
  return true;
}

double Box::excursion(const Vector& x) const {
  double worst = 0.0;
  for (int i = 0; i < dim(); ++i) {
    worst = std::max({worst, lower(i) - x(i), x(i) - upper(i)});
  }
  return worst;
}

Vector Box::clamp(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }

std::vector<Vector> Box::corners() const {
  const int n = dim();
  if (n > 20) throw Error(ErrorCode::BadDimension, "too many box corners to enumerate");
  std::vector<Vector> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Vector c(n);
    for (int i = 0; i < n; ++i) c(i) = (mask >> i) & 1U ? upper(i) : lower(i);
    out.push_back(std::move(c));
  }
  return out;
}

Vector Box::from_unit(const std::vector<double>& u) const {
  Vector x(dim());
  for (int i = 0; i < dim(); ++i) x(i) = lower(i) + u[i] * (upper(i) - lower(i));
  return x;
}

std::map<std::string, double> RnaParams::as_map() const {
  return {{"kappa1", kappa1}, {"kappa2", kappa2}, {"beta1", beta1},   {"beta2", beta2},
          {"delta1", delta1}, {"delta2", delta2}, {"gamma1", gamma1}, {"gamma2", gamma2},
          {"x2tot", x2tot},   {"x4tot", x4tot}};
}

void RnaParams::set(const std::string& key, double value) {
  if (key == "kappa1") kappa1 = value;
  else if (key == "kappa2") kappa2 = value;
  else if (key == "beta1") beta1 = value;
  else if (key == "beta2") beta2 = value;
  else if (key == "delta1") delta1 = value;
  else if (key == "delta2") delta2 = value;
  else if (key == "gamma1") gamma1 = value;
  else if (key == "gamma2") gamma2 = value;
  else if (key == "x2tot") x2tot = value;
  else if (key == "x4tot") x4tot = value;
  else throw Error(ErrorCode::BadParams, "unknown RNA parameter '" + key + "'");
}

Model linear_model(const Matrix& a, const Vector& c, const Box& box, std::string name) {
  if (a.rows() != a.cols() || a.rows() != c.size() || box.dim() != c.size()) {
    throw Error(ErrorCode::DimensionMismatch, "linear_model: inconsistent sizes");
  }
  Model m;
  m.name = std::move(name);
  m.n = static_cast<int>(c.size());
  m.box = box;
  m.field = [a, c](const Vector& x) -> Vector { return a * (x - c); };
  m.jacobian = [a](const Vector&) -> Matrix { return a; };
  return m;
}

}  // namespace coop2
