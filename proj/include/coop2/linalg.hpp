#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace coop2 {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

/// Contiguous view of a vector's coefficients.
inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Infinity norm of a matrix (max absolute row sum).
double norm_inf(const Matrix& a);

/// Gauss-Legendre nodes and weights mapped to [0, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre_unit(int points);

/// Halton low-discrepancy point in (0,1)^dim; index starts at 1.
/// `shift` applies a Cranley-Patterson rotation (each coordinate mod 1).
std::vector<double> halton_point(std::size_t index, int dim, const std::vector<double>& shift = {});

}  // namespace coop2
