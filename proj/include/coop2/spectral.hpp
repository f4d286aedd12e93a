#pragma once

#include <cstdint>
#include <vector>

#include "coop2/linalg.hpp"

namespace coop2::spectral {

/// Eigenvalues ordered by decreasing real part, conjugate pairs adjacent
/// (positive imaginary part first).
struct OrderedSpectrum {
  std::vector<Complex> values;
  /// ordering[i] = index of values[i] in the raw solver output
  std::vector<int> ordering;

  std::size_t size() const { return values.size(); }
  const Complex& operator[](std::size_t i) const { return values[i]; }
};

/// Largest dimension accepted by the dense eigen-solver.
inline constexpr int kMaxDimension = 64;

/// Full spectrum via balancing, Householder Hessenberg reduction and the
/// Francis double-shift QR iteration. Throws NoConvergence when a single
/// eigenvalue needs more than `max_iterations` sweeps.
OrderedSpectrum eigenvalues(const Matrix& a, int max_iterations = 60);

/// Sort raw eigenvalues into the canonical order described above.
OrderedSpectrum order_spectrum(const std::vector<Complex>& raw);

/// Monic characteristic polynomial det(sI - A), highest degree first:
/// [1, c_{n-1}, ..., c_0]. Faddeev-LeVerrier recursion.
std::vector<double> characteristic_polynomial(const Matrix& a);

/// exp(A s) by scaling and squaring with a diagonal [6/6] Pade approximant.
Matrix matrix_exp(const Matrix& a, double s = 1.0);

struct StabilityCount {
  int unstable = 0;
  /// min_i |Re(lambda_i)|; small values flag a fragile count
  double margin = 0.0;
};

StabilityCount unstable_count(const OrderedSpectrum& spectrum, double tau_stab = 0.0);

enum class BlockCase { RealDiagonal, ComplexPair, JordanBlock };

const char* to_string(BlockCase c);

struct SplitDiagnostics {
  double invariance_residual_w1 = 0.0;  // max ||A w - P(A w)|| / (||A|| ||w||)
  double invariance_residual_w2 = 0.0;
  double eigen_residual = 0.0;          // dominant eigenpair(s), relative
  double basis_condition = 0.0;         // cond_2 of [W1 | W2]
  int w1_samples = 0;
  int w1_violations = 0;                // sampled w in span(W1) with s^+(w) > 1
  int w2_samples = 0;
  int w2_violations = 0;                // sampled w in span(W2) with s^-(w) < 2
};

struct SpectralSplit {
  OrderedSpectrum spectrum;
  Matrix w1;  // n x 2, real Jordan basis of the dominant pair
  Matrix w2;  // n x (n-2), orthonormal basis of the complementary invariant subspace
  double gap = 0.0;
  Eigen::Matrix2d dominant_block = Eigen::Matrix2d::Zero();
  BlockCase block_case = BlockCase::RealDiagonal;
  /// true when both dominant eigenvalues have positive real part and delta was certified
  bool unstable_pair = false;
  double delta = 1.0;
  Matrix psi;         // (n-2) x (n-2)
  Matrix similarity;  // S with S A S^-1 = diag(Lambda, Psi)
  SplitDiagnostics diagnostics;
};

struct SplitOptions {
  double tau_gap = 1e-8;
  int w1_circle_samples = 3600;
  int w2_samples = 10000;
  std::uint64_t seed = 0x5eedULL;
};

/// Split R^n into the real invariant subspace W1 of {lambda_1, lambda_2} and a
/// complementary invariant subspace W2. Requires n >= 3 and
/// Re(lambda_2) - Re(lambda_3) >= tau_gap (else GapTooSmall).
SpectralSplit spectral_split(const Matrix& a, const SplitOptions& options = {});

/// diag(1, delta) * block * diag(1, 1/delta)
Eigen::Matrix2d scaled_block(const Eigen::Matrix2d& block, double delta);

/// Smallest eigenvalue of the symmetric part of a 2x2 matrix.
double min_symmetric_eigenvalue(const Eigen::Matrix2d& m);

/// Scaling delta > 0 making sym(scaled_block(block, delta)) positive definite.
/// RealDiagonal and ComplexPair return 1; JordanBlock returns the smallest power of two
/// exceeding |offdiag| / u that certifies. Throws NotUnstable if an eigenvalue
/// of the block has nonpositive real part.
double delta_scaling(const Eigen::Matrix2d& block, BlockCase block_case);

/// Unit eigenvector of the eigenvalue with largest real part, assumed real.
Vector dominant_real_eigenvector(const Matrix& a);

}  // namespace coop2::spectral
