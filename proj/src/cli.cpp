#include "coop2/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "coop2/coop.hpp"
#include "coop2/dsl.hpp"
#include "coop2/error.hpp"
#include "coop2/lyapunov.hpp"
#include "coop2/models.hpp"
#include "coop2/ode.hpp"
#include "coop2/orbit.hpp"
#include "coop2/serialize.hpp"
#include "coop2/signvar.hpp"
#include "coop2/spectral.hpp"

namespace coop2::cli {

namespace {

using serialize::Json;

struct ModelSpec {
  std::string model = "goodwin";
  int n = 4;
  std::string alpha = "0.5";
  int m = 10;
  std::string params;
  std::string preset;
  std::string config;
};

struct Config {
  ModelSpec spec;
  int k = 2;
  bool strong = false;
  int samples = 4096;
  std::string a;
  double horizon = 0.0;  // 0: default for the model
  double rtol = 1e-9;
  double atol = 1e-12;
  int section = -1;
  std::string csv;
  std::string out;
  std::vector<std::string> grid;
  int jobs = 1;
  std::uint64_t seed = 0;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      v.push_back(std::stod(item, &pos));
      if (item.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadConfig, "not a number: '" + item + "'");
    }
  }
  return v;
}

std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::BadConfig, "expected key=value, got '" + item + "'");
    out[item.substr(0, eq)] = parse_list(item.substr(eq + 1)).at(0);
  }
  return out;
}

// Resolved model plus per-model defaults.
struct Resolved {
  Model model;
  std::optional<Vector> preset_a;
  double default_horizon = 400.0;
};

Model goodwin_from(int n, std::vector<double> alpha, int m, const std::map<std::string, double>& over) {
  if (alpha.size() == 1) alpha.assign(static_cast<std::size_t>(n), alpha[0]);
  if (static_cast<int>(alpha.size()) != n) throw Error(ErrorCode::BadConfig, "--alpha needs 1 or n values");
  for (const auto& [key, value] : over) {
    if (key == "m") {
      m = static_cast<int>(std::lround(value));
    } else if (key == "alpha") {
      std::fill(alpha.begin(), alpha.end(), value);
    } else if (key.rfind("alpha", 0) == 0) {
      const int i = std::atoi(key.c_str() + 5);
      if (i < 1 || i > n) throw Error(ErrorCode::BadParams, "unknown Goodwin parameter " + key);
      alpha[static_cast<std::size_t>(i - 1)] = value;
    } else {
      throw Error(ErrorCode::BadParams, "unknown Goodwin parameter " + key);
    }
  }
  return models::goodwin(alpha, m);
}

Resolved resolve(const ModelSpec& spec, const std::map<std::string, double>& extra = {}) {
  std::map<std::string, double> over = parse_params(spec.params);
  for (const auto& [k, v] : extra) over[k] = v;
  Resolved r;
  std::string kind = spec.model;
  if (!spec.config.empty()) kind = "config";
  if (spec.preset == "example2") {
    if (kind != "goodwin") throw Error(ErrorCode::BadConfig, "preset example2 is a Goodwin preset");
    r.model = goodwin_from(4, {0.5}, 10, over);
    r.preset_a = Vector::Constant(4, 0.1);
    return r;
  }
  if (spec.preset == "example3") {
    if (spec.model == "goodwin" && kind != "config") kind = "rna";
    if (kind != "rna") throw Error(ErrorCode::BadConfig, "preset example3 is an RNA preset");
    RnaParams p = RnaParams::example3();
    for (const auto& [k, v] : over) p.set(k, v);
    r.model = models::rna_oscillator(p);
    r.preset_a = Vector::Zero(4);
    r.default_horizon = 600.0;
    return r;
  }
  if (!spec.preset.empty()) throw Error(ErrorCode::BadConfig, "unknown preset " + spec.preset);
  if (kind == "goodwin") {
    r.model = goodwin_from(spec.n, parse_list(spec.alpha), spec.m, over);
  } else if (kind == "rna") {
    RnaParams p = RnaParams::example3();
    for (const auto& [k, v] : over) p.set(k, v);
    r.model = models::rna_oscillator(p);
    r.default_horizon = 600.0;
  } else if (kind == "config") {
    if (spec.config.empty()) throw Error(ErrorCode::BadConfig, "--model config needs --config");
    std::ifstream in(spec.config);
    if (!in) throw Error(ErrorCode::BadConfig, "cannot read " + spec.config);
    std::stringstream text;
    text << in.rdbuf();
    if (over.empty()) {
      r.model = dsl::model_from_config_text(text.str());
    } else {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(text.str());
      } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::BadConfig, ex.what());
      }
      for (const auto& [k, v] : over) {
        if (!j.contains("params") || !j["params"].contains(k)) throw Error(ErrorCode::BadParams, "unknown parameter " + k);
        j["params"][k] = v;
      }
      r.model = dsl::model_from_config_text(j.dump());
    }
  } else {
    throw Error(ErrorCode::BadConfig, "unknown model " + kind);
  }
  return r;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::BadK:
    case ErrorCode::BadDimension:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownIdentifier:
    case ErrorCode::UnboundIdentifier:
    case ErrorCode::BadParams:
    case ErrorCode::BadConfig:
      return Usage;
    case ErrorCode::NoConvergence:
    case ErrorCode::NotInterior:
    case ErrorCode::DivisionNearZero:
      return Solver;
    case ErrorCode::StepUnderflow:
    case ErrorCode::LeftDomain:
    case ErrorCode::OutOfDomain:
      return Integration;
    case ErrorCode::ZeroEntry:
    case ErrorCode::GapTooSmall:
    case ErrorCode::NotUnstable:
    case ErrorCode::SeparationFailure:
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::ZeroVector:
      return AnalysisFail;
  }
  return AnalysisFail;
}

void emit(const Json& j, const Config& cfg, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw Error(ErrorCode::BadConfig, "cannot write " + cfg.out);
  f << text;
}

orbit::Settings orbit_settings(const Config& cfg, const Resolved& r) {
  orbit::Settings s;
  s.horizon = cfg.horizon > 0.0 ? cfg.horizon : r.default_horizon;
  s.rtol = cfg.rtol;
  s.atol = cfg.atol;
  s.section_index = cfg.section;
  return s;
}

coop::CertifyOptions certify_options(const Config& cfg) {
  coop::CertifyOptions o;
  o.sampling.count = cfg.samples;
  o.sampling.seed = cfg.seed;
  return o;
}

int cmd_certify(const Config& cfg, std::ostream& out) {
  const Resolved r = resolve(cfg.spec);
  const auto cert = coop::certify(r.model, cfg.k, cfg.strong, certify_options(cfg));
  emit(serialize::certificate(cert), cfg, out);
  return cert.passed ? Ok : AnalysisFail;
}

int cmd_analyze(const Config& cfg, std::ostream& out) {
  const Resolved r = resolve(cfg.spec);
  orbit::CheckSettings cs;
  cs.certify = certify_options(cfg);
  const auto eq = models::equilibrium(r.model);  // solver failures surface here with exit 3
  const auto check = orbit::theorem2_check(r.model, cs);
  const Matrix j = r.model.jac(eq.e);
  Json coeffs = Json::array();
  for (double c : spectral::characteristic_polynomial(j)) coeffs.push_back(c);
  Json doc{{"model", serialize::model(r.model)},
           {"equilibrium", serialize::equilibrium(eq)},
           {"jacobian", serialize::matrix(j)},
           {"characteristic_polynomial", coeffs},
           {"eigenvalues", serialize::spectrum(eq.spectrum)},
           {"unstable_count", eq.unstable_count},
           {"theorem2", serialize::theorem2(check)}};
  if (check.certificate) doc["certificate"] = serialize::certificate(*check.certificate);
  emit(doc, cfg, out);
  return check.all_passed ? Ok : AnalysisFail;
}

int cmd_simulate(const Config& cfg, std::ostream& out) {
  const Resolved r = resolve(cfg.spec);
  Vector a;
  if (!cfg.a.empty()) {
    const auto v = parse_list(cfg.a);
    a = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  } else if (r.preset_a) {
    a = *r.preset_a;
  } else {
    throw Error(ErrorCode::BadConfig, "simulate needs --a or --preset");
  }
  if (a.size() != r.model.n) throw Error(ErrorCode::DimensionMismatch, "--a has the wrong dimension");
  const auto eq = models::equilibrium(r.model);
  const orbit::Settings st = orbit_settings(cfg, r);
  ode::Options opt;
  opt.rtol = st.rtol;
  opt.atol = st.atol;
  opt.equilibrium = eq.e;
  if (!r.model.box.contains(a)) throw Error(ErrorCode::OutOfDomain, "initial state outside the box");
  const ode::Trajectory traj = ode::integrate(r.model, a, st.horizon, opt);
  if (!cfg.csv.empty()) {
    std::ofstream f(cfg.csv, std::ios::binary);
    if (!f) throw Error(ErrorCode::BadConfig, "cannot write " + cfg.csv);
    ode::write_csv(f, traj);
  }
  const auto rep = orbit::classify_trajectory(r.model, eq.e, a, traj, st);
  Json doc = serialize::orbit_report(rep);
  doc["model"] = r.model.name;
  doc["initial_state"] = serialize::vector(a);
  doc["equilibrium"] = serialize::vector(eq.e);
  emit(doc, cfg, out);
  return Ok;
}

int cmd_spectral(const Config& cfg, std::ostream& out) {
  const Resolved r = resolve(cfg.spec);
  const auto eq = models::equilibrium(r.model);
  spectral::SplitOptions so;
  so.seed = cfg.seed;
  const auto split = spectral::spectral_split(r.model.jac(eq.e), so);
  Json doc = serialize::split(split);
  doc["equilibrium"] = serialize::vector(eq.e);
  emit(doc, cfg, out);
  return Ok;
}

int cmd_lyapunov(const Config& cfg, std::ostream& out) {
  const Resolved r = resolve(cfg.spec);
  const auto eq = models::equilibrium(r.model);
  spectral::SplitOptions so;
  so.seed = cfg.seed;
  const auto split = spectral::spectral_split(r.model.jac(eq.e), so);
  lyapunov::Sampling ls;
  ls.seed = cfg.seed;
  const auto cert = lyapunov::build_certificate(r.model, eq.e, split, ls);
  Json doc = serialize::lyapunov(cert);
  doc["equilibrium"] = serialize::vector(eq.e);
  emit(doc, cfg, out);
  return cert.verified ? Ok : AnalysisFail;
}

// name=lo:hi:step or name=v1,v2,...
std::pair<std::string, std::vector<double>> parse_grid(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::BadConfig, "grid must be name=values");
  const std::string name = text.substr(0, eq);
  const std::string rhs = text.substr(eq + 1);
  std::vector<double> values;
  if (rhs.find(':') != std::string::npos) {
    std::string spec = rhs;
    std::replace(spec.begin(), spec.end(), ':', ',');
    const auto p = parse_list(spec);
    if (p.size() != 3 || !(p[2] > 0.0) || p[1] < p[0]) throw Error(ErrorCode::BadConfig, "range must be lo:hi:step");
    const auto count = static_cast<long>(std::floor((p[1] - p[0]) / p[2] + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) values.push_back(p[0] + static_cast<double>(i) * p[2]);
  } else {
    values = parse_list(rhs);
  }
  if (values.empty()) throw Error(ErrorCode::BadConfig, "empty grid for " + name);
  return {name, values};
}

// Uniform samples of the start region until one lies in {s^-(a - e) <= 1}
// and away from e.
Vector basin_sample(const Model& model, const Box& region, const Vector& e, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> u(static_cast<std::size_t>(model.n));
  for (int attempt = 0; attempt < 100000; ++attempt) {
    for (auto& v : u) v = unit(rng);
    const Vector a = region.from_unit(u);
    if (orbit::basin_tag(a, e) <= 1 && (a - e).norm() > 1e-6 * model.box.diameter()) return a;
  }
  throw Error(ErrorCode::NoConvergence, "no basin sample found");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

std::string csv_field(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

int cmd_sweep(const Config& cfg, std::ostream& out) {
  if (cfg.grid.empty() || cfg.grid.size() > 2) throw Error(ErrorCode::BadConfig, "sweep needs one or two --grid");
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  for (const auto& g : cfg.grid) axes.push_back(parse_grid(g));
  if (axes.size() == 2 && axes[0].first == axes[1].first) throw Error(ErrorCode::BadConfig, "grid names must differ");
  resolve(cfg.spec);  // fail fast on a bad base model

  std::vector<std::map<std::string, double>> points;
  for (double v0 : axes[0].second) {
    if (axes.size() == 1) {
      points.push_back({{axes[0].first, v0}});
    } else {
      for (double v1 : axes[1].second) points.push_back({{axes[0].first, v0}, {axes[1].first, v1}});
    }
  }

  std::vector<std::string> rows(points.size());
  auto work = [&](std::size_t i) {
    std::string unstable = "", verdict = "", period = "", error = "";
    try {
      const Resolved r = resolve(cfg.spec, points[i]);
      const auto eq = models::equilibrium(r.model);
      unstable = std::to_string(eq.unstable_count);
      const auto st = orbit_settings(cfg, r);
      const Vector a = basin_sample(r.model, orbit::start_region(r.model, st), eq.e, cfg.seed + i);
      const auto rep = orbit::classify(r.model, eq.e, a, st);
      verdict = orbit::to_string(rep.verdict);
      if (rep.verdict == orbit::Verdict::PeriodicOrbit) period = fmt(*rep.period);
    } catch (const std::exception& ex) {
      error = ex.what();
    }
    std::string row;
    for (const auto& ax : axes) row += fmt(points[i].at(ax.first)) + ",";
    row += unstable + "," + verdict + "," + period + "," + csv_field(error) + "\n";
    rows[i] = row;
  };

  const int jobs = std::clamp(cfg.jobs, 1, 64);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < points.size(); i = next++) work(i);
    });
  }
  for (auto& th : pool) th.join();

  std::ostringstream csv;
  for (const auto& ax : axes) csv << ax.first << ",";
  csv << "unstable_count,verdict,period,error\n";
  for (const auto& row : rows) csv << row;
  if (cfg.csv.empty()) {
    out << csv.str();
  } else {
    std::ofstream f(cfg.csv, std::ios::binary);
    if (!f) throw Error(ErrorCode::BadConfig, "cannot write " + cfg.csv);
    f << csv.str();
  }
  return Ok;
}

void add_model_flags(CLI::App* sub, ModelSpec& spec) {
  sub->add_option("--model", spec.model, "goodwin | rna | config")->check(CLI::IsMember({"goodwin", "rna", "config"}));
  sub->add_option("--n", spec.n, "Goodwin dimension")->check(CLI::Range(3, 64));
  sub->add_option("--alpha", spec.alpha, "Goodwin gains: one value or n comma-separated");
  sub->add_option("--m", spec.m, "Goodwin Hill exponent")->check(CLI::PositiveNumber);
  sub->add_option("--params", spec.params, "overrides, key=value,...");
  sub->add_option("--preset", spec.preset, "example2 | example3")->check(CLI::IsMember({"example2", "example3"}));
  sub->add_option("--config", spec.config, "JSON model file");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"coop2: strong 2-cooperativity certification and oscillation analysis", "coop2"};
  app.require_subcommand(1);
  Config cfg;

  auto* certify = app.add_subcommand("certify", "sampled sign-pattern certificate on the box");
  auto* analyze = app.add_subcommand("analyze", "equilibrium, spectrum and hypothesis table");
  auto* simulate = app.add_subcommand("simulate", "integrate and classify one trajectory");
  auto* sweep = app.add_subcommand("sweep", "parameter grid of stability and verdicts");
  auto* spec = app.add_subcommand("spectral", "dominant invariant splitting at the equilibrium");
  auto* lyap = app.add_subcommand("lyapunov", "sampled Lyapunov level-set certificate");

  for (auto* sub : {certify, analyze, simulate, sweep, spec, lyap}) {
    add_model_flags(sub, cfg.spec);
    sub->add_option("--seed", cfg.seed, "sampling seed (COOP2_SEED overrides)");
    sub->add_option("--out", cfg.out, "write JSON here instead of stdout");
  }
  for (auto* sub : {certify, analyze}) {
    sub->add_option("--samples", cfg.samples, "interior sample count")->check(CLI::NonNegativeNumber);
  }
  certify->add_option("--k", cfg.k, "sign-pattern order (1 or 2)");
  certify->add_flag("--strong", cfg.strong, "also require irreducibility");
  for (auto* sub : {simulate, sweep}) {
    sub->add_option("--horizon", cfg.horizon, "integration horizon")->check(CLI::PositiveNumber);
    sub->add_option("--rtol", cfg.rtol, "relative tolerance")->check(CLI::Range(1e-12, 1e-2));
    sub->add_option("--atol", cfg.atol, "absolute tolerance")->check(CLI::Range(1e-14, 1e-2));
    sub->add_option("--section", cfg.section, "0-based section coordinate (default last)");
    sub->add_option("--csv", cfg.csv, "CSV output path");
  }
  simulate->add_option("--a", cfg.a, "initial state, comma-separated");
  sweep->add_option("--grid", cfg.grid, "name=lo:hi:step or name=v1,v2 (at most two)");
  sweep->add_option("--jobs", cfg.jobs, "concurrent grid points")->check(CLI::Range(1, 64));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << "coop2: " << e.what() << "\n";
    return Usage;
  }

  if (const char* env = std::getenv("COOP2_SEED"); env && *env) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      err << "coop2: COOP2_SEED is not an unsigned integer\n";
      return Usage;
    }
  }

  try {
    if (certify->parsed()) {
      if (cfg.k != 1 && cfg.k != 2) throw Error(ErrorCode::BadK, "--k must be 1 or 2");
      return cmd_certify(cfg, out);
    }
    if (analyze->parsed()) return cmd_analyze(cfg, out);
    if (simulate->parsed()) return cmd_simulate(cfg, out);
    if (sweep->parsed()) return cmd_sweep(cfg, out);
    if (spec->parsed()) return cmd_spectral(cfg, out);
    if (lyap->parsed()) return cmd_lyapunov(cfg, out);
  } catch (const Error& e) {
    err << "coop2: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "coop2: " << e.what() << "\n";
    return Usage;
  }
  return Usage;
}

}  // namespace coop2::cli
