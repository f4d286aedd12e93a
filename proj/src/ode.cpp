#include "coop2/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "coop2/error.hpp"
#include "coop2/signvar.hpp"

namespace coop2::ode {

namespace {

// Dormand-Prince 5(4) tableau; the field is autonomous so the nodes c_i are unused
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// PI controller constants
constexpr double kSafe = 0.9;
constexpr double kFacMinInv = 5.0;   // step may shrink by at most 5x
constexpr double kFacMaxInv = 0.1;   // and grow by at most 10x
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;

double scaled_rms(const Vector& v, const Vector& y0, const Vector& y1, double rtol, double atol) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double sk = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    const double r = v(i) / sk;
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(v.size()));
}

double initial_step(const Model& model, const Vector& y0, const Vector& f0, double span,
                    const Options& opt, Stats& stats) {
  const double d0 = scaled_rms(y0, y0, y0, opt.rtol, opt.atol);
  const double d1 = scaled_rms(f0, y0, y0, opt.rtol, opt.atol);
  double h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
  h = std::min(h, span);
  const Vector y1 = y0 + h * f0;
  const Vector f1 = model.f(y1);
  ++stats.evaluations;
  const double d2 = scaled_rms(f1 - f0, y0, y0, opt.rtol, opt.atol) / h;
  const double der = std::max(d1, d2);
  const double h1 = der <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der, 0.2);
  return std::min({100.0 * h, h1, span});
}

}  // namespace

std::size_t Trajectory::segment(double t) const {
  if (times.size() < 2) return 0;
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t k = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
  return std::min(k, times.size() - 2);
}

Vector Trajectory::at(double t) const {
  if (times.size() == 1) return states.front();
  const std::size_t k = segment(t);
  const double h = times[k + 1] - times[k];
  const double th = (t - times[k]) / h;
  const double th2 = th * th;
  const double th3 = th2 * th;
  const double h00 = 2 * th3 - 3 * th2 + 1;
  const double h10 = th3 - 2 * th2 + th;
  const double h01 = -2 * th3 + 3 * th2;
  const double h11 = th3 - th2;
  return h00 * states[k] + (h10 * h) * derivatives[k] + h01 * states[k + 1] +
         (h11 * h) * derivatives[k + 1];
}

double Trajectory::component_at(double t, int i) const {
  if (times.size() == 1) return states.front()(i);
  const std::size_t k = segment(t);
  const double h = times[k + 1] - times[k];
  const double th = (t - times[k]) / h;
  const double th2 = th * th;
  const double th3 = th2 * th;
  return (2 * th3 - 3 * th2 + 1) * states[k](i) + (th3 - 2 * th2 + th) * h * derivatives[k](i) +
         (-2 * th3 + 3 * th2) * states[k + 1](i) + (th3 - th2) * h * derivatives[k + 1](i);
}

Trajectory integrate(const Model& model, const Vector& a, double t_end, const Options& opt) {
  if (a.size() != model.n) throw Error(ErrorCode::DimensionMismatch, "initial state size");
  if (!(t_end > 0.0)) throw Error(ErrorCode::BadParams, "t_end must be positive");
  if (opt.rtol < 1e-12 || opt.atol < 1e-14) {
    throw Error(ErrorCode::BadParams, "tolerances below rtol=1e-12 / atol=1e-14");
  }
  if (opt.equilibrium && opt.equilibrium->size() != model.n) {
    throw Error(ErrorCode::DimensionMismatch, "equilibrium size");
  }

  Trajectory traj;
  traj.dim = model.n;
  Stats& stats = traj.stats;
  const double slack = opt.slack_factor * opt.atol;
  bool checking = opt.box_policy == BoxPolicy::Enforce;
  Vector y = a;

  if (opt.box_policy != BoxPolicy::Off && model.box.contains(y, slack)) {
    stats.entry_time = 0.0;
    checking = true;
  }
  if (checking) {
    const double exc = model.box.excursion(y);
    if (exc > slack) {
      throw Error(ErrorCode::LeftDomain, "initial state outside the box by " + std::to_string(exc));
    }
    if (exc > 0.0) {
      y = model.box.clamp(y);
      ++stats.clamped;
    }
  }

  auto record = [&](double t, const Vector& x, const Vector& dx) {
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.derivatives.push_back(dx);
    traj.box_ok.push_back(model.box.contains(x, slack));
    if (opt.equilibrium) {
      const Vector d = x - *opt.equilibrium;
      traj.s_minus_to_e.push_back(
          signvar::s_minus(as_span(d), signvar::relative_zero_tol(as_span(d), opt.zero_tol_rel)));
    }
  };

  Vector k1 = model.f(y);
  ++stats.evaluations;
  record(0.0, y, k1);

  double t = 0.0;
  double h = opt.h0 > 0.0 ? std::min(opt.h0, t_end) : initial_step(model, y, k1, t_end, opt, stats);
  double facold = 1e-4;
  bool last_rejected = false;
  const double eps = std::numeric_limits<double>::epsilon();

  while (t < t_end) {
    if (stats.accepted + stats.rejected >= opt.max_steps) {
      throw Error(ErrorCode::StepUnderflow,
                  "step budget of " + std::to_string(opt.max_steps) + " exhausted at t=" +
                      std::to_string(t));
    }
    if (h < 16.0 * eps * std::max(1.0, std::abs(t))) {
      throw Error(ErrorCode::StepUnderflow, "step size collapsed at t=" + std::to_string(t));
    }
    bool final_step = false;
    if (t + h >= t_end || t + 1.01 * h >= t_end) {
      h = t_end - t;
      final_step = true;
    }

    const Vector k2 = model.f(y + h * (a21 * k1));
    const Vector k3 = model.f(y + h * (a31 * k1 + a32 * k2));
    const Vector k4 = model.f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector k5 = model.f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector k6 = model.f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vector y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    Vector k7 = model.f(y_new);
    stats.evaluations += 6;

    const Vector err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err = scaled_rms(err_vec, y, y_new, opt.rtol, opt.atol);

    if (!std::isfinite(err) || !y_new.allFinite()) {
      ++stats.rejected;
      last_rejected = true;
      h *= 0.2;
      continue;
    }

    const double fac11 = std::pow(err, kExpo);
    if (err <= 1.0) {
      if (!checking && opt.box_policy == BoxPolicy::UntilEntry && model.box.contains(y_new, slack)) {
        checking = true;
        stats.entry_time = t + h;
      }
      if (checking) {
        const double exc = model.box.excursion(y_new);
        if (exc > slack) {
          throw Error(ErrorCode::LeftDomain, "state left the box by " + std::to_string(exc) +
                                                 " at t=" + std::to_string(t + h));
        }
        if (exc > 0.0) {
          y_new = model.box.clamp(y_new);
          k7 = model.f(y_new);
          ++stats.evaluations;
          ++stats.clamped;
        }
      }
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::max(kFacMaxInv, std::min(kFacMinInv, fac / kSafe));
      double h_new = h / fac;
      if (last_rejected) h_new = std::min(h_new, h);
      facold = std::max(err, 1e-4);
      t = final_step ? t_end : t + h;
      y = std::move(y_new);
      k1 = std::move(k7);
      ++stats.accepted;
      record(t, y, k1);
      last_rejected = false;
      h = h_new;
    } else {
      h /= std::min(kFacMinInv, fac11 / kSafe);
      ++stats.rejected;
      last_rejected = true;
    }
  }
  return traj;
}

std::vector<int> monitor_difference(const Model& model, const Vector& a, const Vector& b,
                                    const std::vector<double>& t_grid, const Options& options) {
  std::vector<int> out;
  if (t_grid.empty()) return out;
  const double horizon = t_grid.back();
  Options opt = options;
  opt.equilibrium.reset();
  // Components below the global accuracy of the two runs count as zero.
  auto diff_sign = [&](const Vector& xa, const Vector& xb, bool exact) {
    const Vector z = xa - xb;
    double tol = signvar::relative_zero_tol(as_span(z), opt.zero_tol_rel);
    if (!exact) {
      const double scale = std::max(xa.cwiseAbs().maxCoeff(), xb.cwiseAbs().maxCoeff());
      tol = std::max(tol, 10.0 * (opt.rtol * scale + opt.atol));
    }
    return signvar::s_minus(as_span(z), tol);
  };
  if (!(horizon > 0.0)) {
    out.assign(t_grid.size(), diff_sign(a, b, true));
    return out;
  }
  const Trajectory ta = integrate(model, a, horizon, opt);
  const Trajectory tb = integrate(model, b, horizon, opt);
  out.reserve(t_grid.size());
  for (double t : t_grid) out.push_back(diff_sign(ta.at(t), tb.at(t), t == 0.0));
  return out;
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  out << "t";
  for (int i = 1; i <= traj.dim; ++i) out << ",x" << i;
  out << ",s_minus\n";
  char buf[64];
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.12e", traj.times[k]);
    out << buf;
    for (int i = 0; i < traj.dim; ++i) {
      std::snprintf(buf, sizeof buf, ",%.12e", traj.states[k](i));
      out << buf;
    }
    out << ',' << (traj.s_minus_to_e.empty() ? -1 : traj.s_minus_to_e[k]) << '\n';
  }
}

}  // namespace coop2::ode
