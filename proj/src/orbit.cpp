#include "coop2/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "coop2/error.hpp"
#include "coop2/signvar.hpp"

namespace coop2::orbit {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Equilibrium: return "Equilibrium";
    case Verdict::PeriodicOrbit: return "PeriodicOrbit";
    case Verdict::Undetermined: return "Undetermined";
  }
  return "?";
}

std::vector<double> section_crossings(const ode::Trajectory& traj, int index, double level,
                                      double t_from, double tol) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    if (traj.times[k + 1] < t_from) continue;
    double lo = std::max(traj.times[k], t_from);
    double hi = traj.times[k + 1];
    double glo = traj.component_at(lo, index) - level;
    const double ghi = traj.component_at(hi, index) - level;
    if (!(glo < 0.0 && ghi >= 0.0)) continue;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double g = traj.component_at(mid, index) - level;
      if (g < 0.0) {
        lo = mid;
        glo = g;
      } else {
        hi = mid;
      }
      if (mid == lo && mid == hi) break;
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

int basin_tag(const Vector& a, const Vector& e) {
  const Vector d = a - e;
  const auto s = as_span(d);
  return signvar::s_minus(s, signvar::relative_zero_tol(s, 1e-10));
}

Box start_region(const Model& model, const Settings& settings) {
  const Box& box = model.box;
  ode::Options opt;
  opt.rtol = 1e-6;
  opt.atol = 1e-9;
  ode::Trajectory traj;
  try {
    traj = ode::integrate(model, box.lower, settings.horizon, opt);
  } catch (const Error&) {
    return box;
  }
  Vector hi = box.lower;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.times[k] >= 0.5 * settings.horizon) hi = hi.cwiseMax(traj.states[k]);
  }
  const Vector reach = box.lower + 10.0 * (hi - box.lower);
  if ((hi - box.lower).minCoeff() <= 0.0) return box;
  return Box{box.lower, box.upper.cwiseMin(reach)};
}

BasinPartition basin_filter(const Vector& e, const std::vector<Vector>& candidates) {
  BasinPartition p;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const int tag = basin_tag(candidates[i], e);
    p.tags.push_back(tag);
    (tag <= 1 ? p.le1 : p.ge2).push_back(i);
  }
  return p;
}

namespace {

constexpr int kDenseSamplesPerStep = 4;

// Stationary points in (0, 1) of the Hermite cubic of component i on step k.
std::vector<double> hermite_extrema(const ode::Trajectory& traj, std::size_t k, int i) {
  const double h = traj.times[k + 1] - traj.times[k];
  const double y0 = traj.states[k](i), y1 = traj.states[k + 1](i);
  const double d0 = h * traj.derivatives[k](i), d1 = h * traj.derivatives[k + 1](i);
  // p'(s) = a s^2 + b s + c
  const double a = 6 * y0 + 3 * d0 - 6 * y1 + 3 * d1;
  const double b = -6 * y0 - 4 * d0 + 6 * y1 - 2 * d1;
  const double c = d0;
  std::vector<double> roots;
  if (std::abs(a) <= 1e-14 * (std::abs(b) + std::abs(c))) {
    if (b != 0.0) roots.push_back(-c / b);
  } else {
    const double disc = b * b - 4 * a * c;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      roots.push_back(q / a);
      if (q != 0.0) roots.push_back(c / q);
    }
  }
  std::vector<double> out;
  for (double s : roots) {
    if (s > 0.0 && s < 1.0) out.push_back(traj.times[k] + s * h);
  }
  return out;
}

// Peak-to-peak per coordinate over [c0, c1]. Extremum times come from the
// dense output; values are re-integrated from the preceding accepted step.
Vector cycle_amplitude(const Model& model, const ode::Trajectory& traj, double c0, double c1,
                       const Settings& st) {
  const int n = traj.dim;
  const Vector x0 = traj.at(c0), x1 = traj.at(c1);
  Vector amin = x0.cwiseMin(x1), amax = x0.cwiseMax(x1);
  std::vector<double> tmin(static_cast<std::size_t>(n), -1.0), tmax(static_cast<std::size_t>(n), -1.0);
  for (std::size_t k = traj.segment(c0); k + 1 < traj.size() && traj.times[k] <= c1; ++k) {
    for (int i = 0; i < n; ++i) {
      std::vector<double> cand = hermite_extrema(traj, k, i);
      cand.push_back(traj.times[k + 1]);
      for (double t : cand) {
        if (t < c0 || t > c1) continue;
        const double v = traj.component_at(t, i);
        if (v < amin(i)) {
          amin(i) = v;
          tmin[static_cast<std::size_t>(i)] = t;
        }
        if (v > amax(i)) {
          amax(i) = v;
          tmax[static_cast<std::size_t>(i)] = t;
        }
      }
    }
  }
  ode::Options opt;
  opt.rtol = st.rtol;
  opt.atol = st.atol;
  opt.box_policy = ode::BoxPolicy::Off;
  auto exact = [&](double t, int i) {
    const std::size_t k = traj.segment(t);
    const double dt = t - traj.times[k];
    if (!(dt > 0.0)) return traj.states[k](i);
    return ode::integrate(model, traj.states[k], dt, opt).final_state()(i);
  };
  for (int i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (tmin[u] >= 0.0) amin(i) = std::min(amin(i), exact(tmin[u], i));
    if (tmax[u] >= 0.0) amax(i) = std::max(amax(i), exact(tmax[u], i));
  }
  return amax - amin;
}

}  // namespace

OrbitReport classify_trajectory(const Model& model, const Vector& e, const Vector& a,
                                const ode::Trajectory& traj, const Settings& st) {
  OrbitReport r;
  r.settings = st;
  r.stats = traj.stats;
  r.basin_tag = basin_tag(a, e);
  const double diam = model.box.diameter();
  r.tau_eq = st.tau_eq_rel * diam;

  const double t_end = traj.t_end();
  const double t_tail = st.warmup * t_end;
  const double t_last = t_end - 0.1 * (t_end - t_tail);

  // Tail statistics on accepted steps plus a few dense points per step.
  double min_dist = std::numeric_limits<double>::infinity();
  bool sustained = true;
  Vector lo = e, hi = e;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    if (traj.times[k + 1] < t_tail) continue;
    for (int j = 0; j < kDenseSamplesPerStep; ++j) {
      const double t = traj.times[k] + (traj.times[k + 1] - traj.times[k]) * j / kDenseSamplesPerStep;
      if (t < t_tail) continue;
      const Vector x = traj.at(t);
      const double d = (x - e).lpNorm<Eigen::Infinity>();
      min_dist = std::min(min_dist, d);
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
      if (t >= t_last && d >= r.tau_eq) sustained = false;
    }
  }
  const double d_end = (traj.final_state() - e).lpNorm<Eigen::Infinity>();
  min_dist = std::min(min_dist, d_end);
  if (d_end >= r.tau_eq) sustained = false;
  r.min_dist_to_e = min_dist;
  r.final_dist_to_e = d_end;
  r.mu_sep = st.mu_sep_rel * std::min(diam, (hi - lo).norm());

  const double roundoff = 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, e.lpNorm<Eigen::Infinity>());
  if ((a - e).lpNorm<Eigen::Infinity>() <= roundoff) {
    r.verdict = Verdict::Equilibrium;
    r.reason = "initial state is the equilibrium up to roundoff";
    return r;
  }

  if (sustained) {
    r.verdict = Verdict::Equilibrium;
    r.reason = "terminal distance to e below tau_eq over the final 10% of the window";
    return r;
  }

  const int idx = st.section_index < 0 ? model.n - 1 : st.section_index;
  if (idx >= model.n) throw Error(ErrorCode::BadDimension, "section index out of range");
  r.crossings = section_crossings(traj, idx, e(idx), t_tail, st.bisection_tol);
  const std::size_t nc = r.crossings.size();
  if (nc <= 3) {
    r.reason = "too few section crossings in the analysis window";
    return r;
  }

  std::vector<double> gaps;
  const std::size_t ngaps = std::min<std::size_t>(static_cast<std::size_t>(st.period_gaps), nc - 1);
  for (std::size_t i = nc - ngaps; i < nc; ++i) gaps.push_back(r.crossings[i] - r.crossings[i - 1]);
  r.period = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());

  double contraction = 0.0;
  for (std::size_t i = nc - 2; i < nc; ++i) {
    const Vector p0 = traj.at(r.crossings[i - 1]);
    const Vector p1 = traj.at(r.crossings[i]);
    const double scale = std::max(p1.lpNorm<Eigen::Infinity>(), std::numeric_limits<double>::min());
    contraction = std::max(contraction, (p1 - p0).lpNorm<Eigen::Infinity>() / scale);
  }
  r.return_map_contraction = contraction;

  r.amplitude = cycle_amplitude(model, traj, r.crossings[nc - 2], r.crossings[nc - 1], st);

  if (!(*r.period > 0.0)) {
    r.reason = "non-positive period estimate";
  } else if (contraction >= st.tau_ret) {
    r.reason = "return points have not settled";
  } else if (min_dist <= r.mu_sep) {
    r.reason = "tail approaches the equilibrium";
  } else {
    r.verdict = Verdict::PeriodicOrbit;
    r.reason = "return map settled and tail bounded away from e";
  }
  return r;
}

OrbitReport classify(const Model& model, const Vector& e, const Vector& a, const Settings& st) {
  if (!(st.horizon > 0.0)) throw Error(ErrorCode::BadConfig, "horizon must be positive");
  if (!(st.warmup >= 0.0 && st.warmup < 1.0)) throw Error(ErrorCode::BadConfig, "warmup must lie in [0, 1)");
  if (a.size() != model.n) throw Error(ErrorCode::DimensionMismatch, "initial state has wrong dimension");
  if (st.box_policy == ode::BoxPolicy::Enforce && !model.box.contains(a)) {
    throw Error(ErrorCode::OutOfDomain, "initial state outside the box");
  }
  ode::Options opt;
  opt.rtol = st.rtol;
  opt.atol = st.atol;
  opt.box_policy = st.box_policy;
  const ode::Trajectory traj = ode::integrate(model, a, st.horizon, opt);
  return classify_trajectory(model, e, a, traj, st);
}

Theorem2Report theorem2_check(const Model& model, const CheckSettings& settings) {
  Theorem2Report rep;

  Hypothesis coop{"strongly_2_cooperative", false, ""};
  if (model.n < 3) {
    coop.detail = "needs n >= 3";
  } else {
    rep.certificate = coop::certify(model, 2, true, settings.certify);
    coop.passed = rep.certificate->passed;
    std::ostringstream os;
    os << rep.certificate->violation_count << " violations over " << rep.certificate->samples_checked
       << " samples";
    coop.detail = os.str();
  }

  Hypothesis unique{"unique_equilibrium", false, ""};
  Hypothesis unstable{"two_unstable_eigenvalues", false, ""};
  try {
    rep.equilibrium = models::equilibrium(model);
    const auto cands = models::equilibrium_candidates(model, settings.uniqueness_starts);
    const double tol = 1e-6 * std::max(1.0, model.box.diameter());
    int distinct = 1;
    std::vector<Vector> seen{rep.equilibrium->e};
    for (const auto& c : cands) {
      bool known = false;
      for (const auto& s : seen) known = known || (c - s).lpNorm<Eigen::Infinity>() <= tol;
      if (!known) {
        seen.push_back(c);
        ++distinct;
      }
    }
    rep.distinct_equilibria = distinct;
    unique.passed = distinct == 1 && rep.equilibrium->in_interior;
    std::ostringstream os;
    os << distinct << " distinct equilibria from " << settings.uniqueness_starts << " Newton starts"
       << (rep.equilibrium->in_interior ? "" : "; equilibrium not interior");
    unique.detail = os.str();

    unstable.passed = rep.equilibrium->unstable_count >= 2;
    unstable.detail = "unstable_count = " + std::to_string(rep.equilibrium->unstable_count);
  } catch (const Error& ex) {
    unique.detail = ex.what();
    unstable.detail = "no equilibrium";
  }

  rep.hypotheses = {coop, unique, unstable};
  rep.all_passed = coop.passed && unique.passed && unstable.passed;
  if (rep.all_passed) {
    rep.prediction = "every a with s^-(a - e) <= 1, a != e, converges to a non-trivial periodic orbit";
  }
  return rep;
}

}  // namespace coop2::orbit
