#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coop2/linalg.hpp"
#include "coop2/model.hpp"
#include "coop2/ode.hpp"

namespace coop2::coop {

enum class Cell { Neg, Zero, Pos, Any };

/// n x n grid of sign constraints, row-major.
struct SignPattern {
  int n = 0;
  std::vector<Cell> cells;

  Cell at(int i, int j) const { return cells[static_cast<std::size_t>(i * n + j)]; }
  Cell& at(int i, int j) { return cells[static_cast<std::size_t>(i * n + j)]; }
};

/// Metzler pattern: off-diagonal >= 0, diagonal free.
SignPattern pattern_cooperative(int n);

/// Cyclic tridiagonal pattern: band >= 0, corners (1,n), (n,1) <= 0,
/// diagonal free, zero elsewhere. Requires n >= 3.
SignPattern pattern_two_cooperative(int n);

/// Pattern for k = 1 or 2; throws BadK otherwise.
SignPattern pattern_for(int k, int n);

struct PatternViolation {
  int row = 0;
  int col = 0;
  double value = 0.0;
  Cell cell = Cell::Any;
};

struct PatternMatch {
  bool ok = true;
  std::optional<PatternViolation> first_violation;
};

/// Cellwise check with slack tau: Neg a <= tau, Zero |a| <= tau, Pos a >= -tau.
PatternMatch matches_pattern(const Matrix& a, const SignPattern& pattern, double tau = 0.0);

/// Strong connectivity of the digraph with an edge i -> j when |a_ij| > tau, i != j.
bool is_irreducible(const Matrix& a, double tau);

/// Default irreducibility threshold eps^2 * ||A||_inf.
double default_irreducibility_tol(const Matrix& a);

/// Average of J_f along the segment between two states: composite
/// Gauss-Legendre with the given order per panel, panels bisected adaptively.
Matrix segment_jacobian(const Model& model, const Vector& xa, const Vector& xb,
                        int quadrature_points = 16);

/// M_{a,b}(t): integrates both trajectories to time t, then averages the
/// Jacobian along the connecting segment. Throws OutOfDomain if either
/// endpoint is outside the box.
Matrix variational_matrix(const Model& model, const Vector& a, const Vector& b, double t,
                          int quadrature_points = 16, const ode::Options& options = {});

enum class SamplingKind { Halton, Random };

struct Sampling {
  SamplingKind kind = SamplingKind::Halton;
  int count = 4096;
  std::uint64_t seed = 0;
  bool include_corners = true;
  bool include_center = true;
};

struct CertificateViolation {
  Vector point;
  std::string kind;  // "pattern" or "irreducible"
  int row = -1;
  int col = -1;
  double value = 0.0;
};

struct CoopCertificate {
  std::string model;
  int k = 2;
  bool strong = true;
  bool passed = false;
  bool structural = false;  // closed-form Jacobian has the pattern by inspection
  int samples_checked = 0;
  int interior_samples = 0;
  Box domain;
  std::size_t violation_count = 0;
  std::vector<CertificateViolation> violations;  // first few, for reporting
  double irreducibility_fraction = 1.0;
  double tau = 0.0;
};

struct CertifyOptions {
  Sampling sampling;
  double tau = 0.0;                     // pattern slack
  std::optional<double> irreducible_tau;  // default: eps^2 * ||J||_inf per sample
  std::size_t max_reported_violations = 32;
};

/// Sampled check that J_f has the k-pattern on the box; when strong, also
/// irreducibility at every sample strictly inside the box.
CoopCertificate certify(const Model& model, int k, bool strong, const CertifyOptions& options = {});

/// Sample points used by certify, in evaluation order.
std::vector<Vector> sample_box(const Box& box, const Sampling& sampling);

const char* to_string(Cell c);

}  // namespace coop2::coop
