#include "coop2/signvar.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "coop2/error.hpp"

namespace coop2::signvar {

namespace {

// -1, 0, +1 under the zero tolerance
int sign_of(double v, double zero_tol) {
  if (std::abs(v) <= zero_tol) return 0;
  return v > 0.0 ? 1 : -1;
}

void check_k(int k, std::size_t n) {
  if (k < 1 || k > static_cast<int>(n)) {
    throw Error(ErrorCode::BadK,
                "k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
}

}  // namespace

int sigma(std::span<const double> x, double zero_tol) {
  int count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sign_of(x[i], zero_tol) == 0) {
      throw Error(ErrorCode::ZeroEntry, "entry " + std::to_string(i) + " is zero");
    }
    if (i > 0 && sign_of(x[i - 1], zero_tol) != sign_of(x[i], zero_tol)) ++count;
  }
  return count;
}

int s_minus(std::span<const double> x, double zero_tol) {
  int count = 0;
  int last = 0;
  for (double v : x) {
    const int s = sign_of(v, zero_tol);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

int s_plus(std::span<const double> x, double zero_tol) {
  const std::size_t n = x.size();
  if (n == 0) return 0;
  std::vector<int> signs(n);
  std::size_t first = n;
  for (std::size_t i = 0; i < n; ++i) {
    signs[i] = sign_of(x[i], zero_tol);
    if (signs[i] != 0 && first == n) first = i;
  }
  if (first == n) return static_cast<int>(n) - 1;

  // Leading zeros alternate backwards from the first nonzero entry; every
  // later zero takes the sign opposite to its left neighbour.
  for (std::size_t i = first; i-- > 0;) signs[i] = -signs[i + 1];
  for (std::size_t i = first + 1; i < n; ++i) {
    if (signs[i] == 0) signs[i] = -signs[i - 1];
  }
  int count = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (signs[i] != signs[i - 1]) ++count;
  }
  return count;
}

SignVarResult sign_variations(std::span<const double> x, double zero_tol) {
  return {s_minus(x, zero_tol), s_plus(x, zero_tol), static_cast<int>(x.size())};
}

bool in_pk_minus(std::span<const double> x, int k, double zero_tol) {
  check_k(k, x.size());
  return s_minus(x, zero_tol) <= k - 1;
}

bool in_pk_plus(std::span<const double> x, int k, double zero_tol) {
  check_k(k, x.size());
  return s_plus(x, zero_tol) <= k - 1;
}

double relative_zero_tol(std::span<const double> x, double scale) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return scale * m;
}

}  // namespace coop2::signvar
