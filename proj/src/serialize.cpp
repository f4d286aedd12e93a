#include "coop2/serialize.hpp"

#include <cmath>

namespace coop2::serialize {

namespace {

// Non-finite values have no JSON spelling; they become null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json settings(const orbit::Settings& s) {
  const char* policy = s.box_policy == ode::BoxPolicy::Enforce      ? "enforce"
                       : s.box_policy == ode::BoxPolicy::UntilEntry ? "until_entry"
                                                                    : "off";
  return Json{{"horizon", s.horizon},
              {"warmup", s.warmup},
              {"rtol", s.rtol},
              {"atol", s.atol},
              {"section_index", s.section_index},
              {"tau_eq_rel", s.tau_eq_rel},
              {"mu_sep_rel", s.mu_sep_rel},
              {"tau_ret", s.tau_ret},
              {"period_gaps", s.period_gaps},
              {"box_policy", policy}};
}

}  // namespace

Json vector(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

Json matrix(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector(m.row(i).transpose()));
  return rows;
}

Json box(const Box& b) { return Json{{"lower", vector(b.lower)}, {"upper", vector(b.upper)}}; }

Json model(const Model& m) {
  Json params = Json::object();
  for (const auto& [k, v] : m.params) params[k] = v;
  return Json{{"name", m.name}, {"n", m.n}, {"params", params}, {"box", box(m.box)}};
}

Json spectrum(const spectral::OrderedSpectrum& s) {
  Json a = Json::array();
  for (const auto& z : s.values) a.push_back(Json::array({number(z.real()), number(z.imag())}));
  return a;
}

Json equilibrium(const models::Equilibrium& e) {
  return Json{{"e", vector(e.e)},
              {"residual", number(e.residual)},
              {"in_interior", e.in_interior},
              {"method", e.method},
              {"eigenvalues", spectrum(e.spectrum)},
              {"unstable_count", e.unstable_count}};
}

Json split(const spectral::SpectralSplit& s) {
  const auto& d = s.diagnostics;
  return Json{{"eigenvalues", spectrum(s.spectrum)},
              {"gap", number(s.gap)},
              {"block_case", spectral::to_string(s.block_case)},
              {"dominant_block", matrix(s.dominant_block)},
              {"unstable_pair", s.unstable_pair},
              {"delta", number(s.delta)},
              {"w1", matrix(s.w1)},
              {"w2", matrix(s.w2)},
              {"similarity", matrix(s.similarity)},
              {"diagnostics",
               {{"invariance_residual_w1", number(d.invariance_residual_w1)},
                {"invariance_residual_w2", number(d.invariance_residual_w2)},
                {"eigen_residual", number(d.eigen_residual)},
                {"basis_condition", number(d.basis_condition)},
                {"w1_samples", d.w1_samples},
                {"w1_violations", d.w1_violations},
                {"w2_samples", d.w2_samples},
                {"w2_violations", d.w2_violations}}}};
}

Json certificate(const coop::CoopCertificate& c) {
  Json v = Json::array();
  for (const auto& x : c.violations) {
    v.push_back(Json{{"point", vector(x.point)},
                     {"kind", x.kind},
                     {"row", x.row},
                     {"col", x.col},
                     {"value", number(x.value)}});
  }
  return Json{{"model", c.model},
              {"k", c.k},
              {"strong", c.strong},
              {"passed", c.passed},
              {"structural", c.structural},
              {"samples_checked", c.samples_checked},
              {"interior_samples", c.interior_samples},
              {"domain", box(c.domain)},
              {"violation_count", c.violation_count},
              {"violations", v},
              {"irreducibility_fraction", c.irreducibility_fraction},
              {"tau", c.tau}};
}

Json orbit_report(const orbit::OrbitReport& r) {
  Json crossings = Json::array();
  for (double t : r.crossings) crossings.push_back(t);
  return Json{{"verdict", orbit::to_string(r.verdict)},
              {"period", r.period ? number(*r.period) : Json(nullptr)},
              {"amplitude", vector(r.amplitude)},
              {"min_dist_to_e", number(r.min_dist_to_e)},
              {"final_dist_to_e", number(r.final_dist_to_e)},
              {"crossings", crossings},
              {"return_map_contraction",
               r.return_map_contraction ? number(*r.return_map_contraction) : Json(nullptr)},
              {"basin_tag", r.basin_tag},
              {"tau_eq", number(r.tau_eq)},
              {"mu_sep", number(r.mu_sep)},
              {"reason", r.reason},
              {"steps", {{"accepted", r.stats.accepted}, {"rejected", r.stats.rejected}}},
              {"settings", settings(r.settings)}};
}

Json theorem2(const orbit::Theorem2Report& r) {
  Json h = Json::array();
  for (const auto& x : r.hypotheses) h.push_back(Json{{"name", x.name}, {"passed", x.passed}, {"detail", x.detail}});
  return Json{{"hypotheses", h},
              {"all_passed", r.all_passed},
              {"distinct_equilibria", r.distinct_equilibria},
              {"prediction", r.prediction ? Json(*r.prediction) : Json(nullptr)}};
}

Json lyapunov(const lyapunov::LyapunovCertificate& c) {
  Json checks = Json::array();
  for (const auto& k : c.checks) {
    checks.push_back(Json{{"eta", number(k.eta)},
                          {"samples", k.samples},
                          {"in_domain", k.in_domain},
                          {"violations", k.violations},
                          {"min_vdot", number(k.min_vdot)},
                          {"min_vdot_over_v", number(k.min_vdot_over_v)}});
  }
  return Json{{"label", c.label},
              {"delta", number(c.delta)},
              {"block_case", spectral::to_string(c.block_case)},
              {"S_delta", matrix(c.s_delta)},
              {"lambda_delta", matrix(c.lambda_delta)},
              {"eps_tilde", number(c.eps_tilde)},
              {"max_p", number(c.max_p)},
              {"theta_tilde", number(c.theta_tilde)},
              {"M", number(c.m_bound)},
              {"alpha", number(c.alpha)},
              {"eta0", c.eta0 ? number(*c.eta0) : Json(nullptr)},
              {"eta0_unbounded", !c.eta0.has_value()},
              {"verification", checks},
              {"verified", c.verified},
              {"sample_sizes",
               {{"separation", c.sampling.separation_samples},
                {"remainder", c.sampling.remainder_samples},
                {"level_set", c.sampling.level_set_samples}}},
              {"seed", c.sampling.seed}};
}

}  // namespace coop2::serialize
