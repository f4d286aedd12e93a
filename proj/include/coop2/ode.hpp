#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "coop2/model.hpp"

namespace coop2::ode {

enum class BoxPolicy {
  Enforce,     // every accepted step must stay in the box (up to slack)
  UntilEntry,  // unchecked until the state first enters the box, then enforced
  Off,
};

struct Options {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h0 = 0.0;  // 0: automatic initial step
  std::size_t max_steps = 5'000'000;
  BoxPolicy box_policy = BoxPolicy::Enforce;
  /// Exits by at most slack_factor * atol are clamped back onto the box.
  double slack_factor = 1e3;
  /// When set, each accepted step is annotated with s^-(x - e).
  std::optional<Vector> equilibrium;
  /// Relative zero threshold for the s^- annotation.
  double zero_tol_rel = 1e-10;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
  std::size_t clamped = 0;
  std::optional<double> entry_time;
};

/// Accepted steps of an integration, with cubic Hermite dense output.
struct Trajectory {
  int dim = 0;
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> derivatives;
  std::vector<int> s_minus_to_e;  // empty unless an equilibrium was attached
  std::vector<bool> box_ok;
  Stats stats;

  std::size_t size() const { return times.size(); }
  double t_end() const { return times.back(); }
  const Vector& final_state() const { return states.back(); }

  /// Dense output at t in [times.front(), times.back()].
  Vector at(double t) const;
  /// Single coordinate of the dense output.
  double component_at(double t, int i) const;
  /// Index k with times[k] <= t <= times[k+1].
  std::size_t segment(double t) const;
};

/// Dormand-Prince 5(4) with PI step-size control.
/// Throws Error(StepUnderflow) on step collapse or an exhausted budget and
/// Error(LeftDomain) when a step leaves the box by more than the slack.
Trajectory integrate(const Model& model, const Vector& a, double t_end, const Options& options = {});

/// s^-(x(t,a) - x(t,b)) on the given increasing grid of times >= 0. For t > 0
/// entries below 10 * (rtol * ||x||_inf + atol) count as zero.
std::vector<int> monitor_difference(const Model& model, const Vector& a, const Vector& b,
                                    const std::vector<double>& t_grid, const Options& options = {});

/// CSV with header t,x1,...,xn,s_minus; "%.12e" floats; s_minus is -1 when
/// the trajectory carries no equilibrium annotation.
void write_csv(std::ostream& out, const Trajectory& traj);

}  // namespace coop2::ode
