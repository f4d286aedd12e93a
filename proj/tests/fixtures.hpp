#pragma once
// Random generators and preset runs shared by the unit tests and the
// acceptance driver.

#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "coop2/models.hpp"
#include "coop2/orbit.hpp"
#include "coop2/signvar.hpp"

namespace fixtures {

using coop2::Matrix;
using coop2::Model;
using coop2::Vector;

inline Model example2() { return coop2::models::goodwin({0.5, 0.5, 0.5, 0.5}, 10); }
inline Model example3() { return coop2::models::rna_oscillator(coop2::RnaParams::example3()); }

/// Initial conditions and default horizons of the two presets.
inline Vector preset_start(const Model& m) { return m.is_rna() ? Vector::Zero(4) : Vector::Constant(4, 0.1); }
inline coop2::orbit::Settings preset_settings(const Model& m) {
  coop2::orbit::Settings s;
  if (m.is_rna()) s.horizon = 600.0;
  return s;
}

/// Cyclic tridiagonal: positive band, negative corners, Gaussian diagonal.
inline Matrix random_strongly_2_positive(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.5);
  std::normal_distribution<double> g;
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = g(rng);
    if (i + 1 < n) {
      a(i, i + 1) = u(rng);
      a(i + 1, i) = u(rng);
    }
  }
  a(0, n - 1) = -u(rng);
  a(n - 1, 0) = -u(rng);
  return a;
}

/// Nonzero vector with at most one sign change and some exact zeros.
inline Vector p2_direction(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> cut(0, n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector d(n);
  do {
    const int j = cut(rng);
    const double s = u(rng) < 0.5 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) d(i) = (u(rng) < 0.15 ? 0.0 : u(rng)) * (i < j ? s : -s);
  } while (d.isZero(0.0));
  return d;
}

/// Start region of a model (the whole box for Goodwin), cached per model.
inline const coop2::Box& start_box(const Model& m) {
  static thread_local std::string key;
  static thread_local coop2::Box region;
  const std::string k = m.name + "/" + std::to_string(m.box.upper.sum());
  if (k != key) {
    region = coop2::orbit::start_region(m, preset_settings(m));
    key = k;
  }
  return region;
}

inline Vector uniform_start(const Model& m, std::mt19937_64& rng, double margin = 0.0) {
  std::uniform_real_distribution<double> u(margin, 1.0 - margin);
  std::vector<double> p(static_cast<std::size_t>(m.n));
  for (auto& v : p) v = u(rng);
  return start_box(m).from_unit(p);
}

/// Uniform start-region samples with s^-(a - e) <= 1, away from e.
inline std::vector<Vector> basin_samples(const Model& m, const Vector& e, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vector> out;
  while (static_cast<int>(out.size()) < count) {
    const Vector a = uniform_start(m, rng);
    if (coop2::orbit::basin_tag(a, e) <= 1 && (a - e).norm() > 1e-3) out.push_back(a);
  }
  return out;
}

/// Pair (a, b) in the start region with s^-(a - b) <= 1 and a != b.
inline std::pair<Vector, Vector> cone_pair(const Model& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (;;) {
    const Vector a = uniform_start(m, rng, 0.02);
    const Vector d = p2_direction(m.n, rng);
    double tmax = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m.n; ++i) {
      if (d(i) > 0) tmax = std::min(tmax, (start_box(m).upper(i) - a(i)) / d(i));
      if (d(i) < 0) tmax = std::min(tmax, (start_box(m).lower(i) - a(i)) / d(i));
    }
    const Vector b = a + u(rng) * tmax * d;
    const Vector diff = a - b;
    if (!diff.isZero(0.0) && coop2::signvar::s_minus(coop2::as_span(diff)) <= 1) return {a, b};
  }
}

}  // namespace fixtures
