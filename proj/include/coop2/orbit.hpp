#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coop2/coop.hpp"
#include "coop2/model.hpp"
#include "coop2/models.hpp"
#include "coop2/ode.hpp"

namespace coop2::orbit {

enum class Verdict { Equilibrium, PeriodicOrbit, Undetermined };

const char* to_string(Verdict v);

struct Settings {
  double horizon = 400.0;
  double warmup = 0.5;  // fraction of [0, horizon] discarded
  double rtol = 1e-9;
  double atol = 1e-12;
  int section_index = -1;  // -1: last coordinate
  double tau_eq_rel = 1e-6;   // times diam(box)
  double mu_sep_rel = 1e-3;   // times min(diam(box), diam(tail hull))
  double tau_ret = 1e-4;
  int period_gaps = 5;
  double bisection_tol = 1e-10;
  ode::BoxPolicy box_policy = ode::BoxPolicy::Enforce;
};

struct OrbitReport {
  Verdict verdict = Verdict::Undetermined;
  std::optional<double> period;
  Vector amplitude;  // peak-to-peak on the final cycle; empty unless periodic
  double min_dist_to_e = 0.0;
  double final_dist_to_e = 0.0;
  std::vector<double> crossings;
  std::optional<double> return_map_contraction;
  int basin_tag = 0;  // s^-(a - e)
  double tau_eq = 0.0;
  double mu_sep = 0.0;
  std::string reason;
  ode::Stats stats;
  Settings settings;
};

/// Upward crossings of x_i = level on [t_from, t_end], refined by bisection
/// on the dense output.
std::vector<double> section_crossings(const ode::Trajectory& traj, int index, double level,
                                      double t_from, double tol = 1e-10);

/// Integrate from a over [0, horizon] and classify the tail.
OrbitReport classify(const Model& model, const Vector& e, const Vector& a,
                     const Settings& settings = {});

/// Same as classify, on an already computed trajectory.
OrbitReport classify_trajectory(const Model& model, const Vector& e, const Vector& a,
                                const ode::Trajectory& traj, const Settings& settings);

/// s^-(a - e) with a relative zero threshold.
int basin_tag(const Vector& a, const Vector& e);

struct BasinPartition {
  std::vector<int> tags;
  std::vector<std::size_t> le1;  // indices with s^-(a - e) <= 1
  std::vector<std::size_t> ge2;
};

BasinPartition basin_filter(const Vector& e, const std::vector<Vector>& candidates);

/// Region for random initial conditions: the box cut down to ten times the
/// extent of the late part of the trajectory from the lower corner. Keeps
/// starts out of far corners where an explicit integrator turns stiff. Falls
/// back to the full box when that run fails or does not leave a face.
Box start_region(const Model& model, const Settings& settings = {});

struct Hypothesis {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Theorem2Report {
  std::vector<Hypothesis> hypotheses;
  bool all_passed = false;
  std::optional<std::string> prediction;
  std::optional<models::Equilibrium> equilibrium;
  int distinct_equilibria = 0;
  std::optional<coop::CoopCertificate> certificate;
};

struct CheckSettings {
  coop::CertifyOptions certify;
  int uniqueness_starts = 33;
};

/// Hypothesis-by-hypothesis check: strong 2-cooperativity on the box, a unique
/// interior equilibrium, and at least two eigenvalues of J(e) in Re > 0.
Theorem2Report theorem2_check(const Model& model, const CheckSettings& settings = {});

}  // namespace coop2::orbit
