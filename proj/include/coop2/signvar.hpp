#pragma once

#include <span>

namespace coop2::signvar {

// Sign-variation counts of real vectors.
//
// Entries with |x_i| <= zero_tol count as zero. The default tolerance is an
// exact-zero test; trajectory code passes a relative tolerance explicitly.

struct SignVarResult {
  int weak = 0;    // s^-
  int strong = 0;  // s^+
  int n = 0;
};

/// Number of adjacent sign changes of a vector with no zero entries.
/// Throws Error(ZeroEntry) if any entry is (numerically) zero.
int sigma(std::span<const double> x, double zero_tol = 0.0);

/// Weak sign variations: zeros deleted, then sigma. s^-(0) = 0.
int s_minus(std::span<const double> x, double zero_tol = 0.0);

/// Strong sign variations: max of sigma over all +-1 completions of the zeros.
/// s^+(0) = n - 1. Computed by greedy alternating completion.
int s_plus(std::span<const double> x, double zero_tol = 0.0);

SignVarResult sign_variations(std::span<const double> x, double zero_tol = 0.0);

/// s^-(x) <= k - 1. Throws Error(BadK) unless 1 <= k <= n.
bool in_pk_minus(std::span<const double> x, int k, double zero_tol = 0.0);

/// s^+(x) <= k - 1. Throws Error(BadK) unless 1 <= k <= n.
bool in_pk_plus(std::span<const double> x, int k, double zero_tol = 0.0);

/// Relative zero threshold used when monitoring trajectories: scale * ||x||_inf.
double relative_zero_tol(std::span<const double> x, double scale);

}  // namespace coop2::signvar
