#include "rvode/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "rvode/criteria.hpp"
#include "rvode/io.hpp"
#include "rvode/numerics.hpp"
#include "rvode/sde.hpp"

namespace rvode {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// spec -> object builders
// ---------------------------------------------------------------------------

NonlinearityModel ModelSpec::build() const {
  if (family == Family::PurePower) {
    return NonlinearityModel::pure_power(a, beta, crossover.value_or(1.0));
  }
  return NonlinearityModel::power_log_loglog(a, beta, beta1, beta2, crossover.value_or(0.05));
}

Perturbation ForcingSpec::build(const NonlinearityModel& model,
                                std::shared_ptr<DecayScale> scale,
                                double default_horizon) const {
  if (kind == "zero") return Perturbation::zero();
  if (kind == "power-decay") return Perturbation::power_decay(c, p);
  if (kind == "scaled-derivative-rate")
    return Perturbation::scaled_derivative_rate(c, std::move(scale));
  if (kind == "zero-limit-synthetic") return Perturbation::zero_limit_synthetic(xi, model);
  if (kind == "oscillating") {
    const int n_osc =
        n.value_or(static_cast<int>(std::ceil((2.0 * model.beta() - 1.0) / (model.beta() - 1.0))));
    return Perturbation::oscillating(GammaSpec::from_name(growth), n_osc);
  }
  if (kind == "spiked")
    return Perturbation::spiked(base_c, base_p, GammaSpec::from_name(growth),
                                horizon.value_or(default_horizon));
  if (kind == "sampled") {
    auto [ts, vs] = read_two_column_csv(path);
    return Perturbation::sampled(std::move(ts), std::move(vs));
  }
  throw ConfigError("unknown forcing kind '" + kind + "'");
}

NoiseIntensity NoiseSpec::build(double default_horizon) const {
  if (kind == "power-decay") return NoiseIntensity::power_decay(c, gamma);
  if (kind == "spiked-square")
    return NoiseIntensity::spiked_square(base_c, base_p, GammaSpec::from_name(growth),
                                         horizon.value_or(default_horizon));
  if (kind == "sampled") {
    auto [ts, vs] = read_two_column_csv(path);
    return NoiseIntensity::sampled(std::move(ts), std::move(vs));
  }
  throw ConfigError("unknown noise kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// config parsing
// ---------------------------------------------------------------------------

namespace {

double get_num(const toml::Table& t, const char* key, double def) {
  auto it = t.find(key);
  return it == t.end() ? def : it->second.as_number();
}

std::string get_str(const toml::Table& t, const char* key, const std::string& def) {
  auto it = t.find(key);
  return it == t.end() ? def : it->second.as_string();
}

ModelSpec parse_model(const toml::Table& t) {
  ModelSpec m;
  const std::string fam = get_str(t, "family", "pure-power");
  if (fam == "pure-power")
    m.family = Family::PurePower;
  else if (fam == "power-log-loglog")
    m.family = Family::PowerLogLoglog;
  else
    throw ConfigError("model.family must be pure-power or power-log-loglog, got '" + fam + "'");
  m.a = get_num(t, "a", 1.0);
  m.beta = get_num(t, "beta", 3.0);
  m.beta1 = get_num(t, "beta1", 0.0);
  m.beta2 = get_num(t, "beta2", 0.0);
  if (auto it = t.find("crossover"); it != t.end()) m.crossover = it->second.as_number();
  return m;
}

ForcingSpec parse_forcing(const toml::Table& t) {
  ForcingSpec f;
  f.kind = get_str(t, "kind", "zero");
  f.c = get_num(t, "c", 0.0);
  f.p = get_num(t, "p", 0.0);
  f.xi = get_num(t, "xi", 1.0);
  f.growth = get_str(t, "growth", "1+t");
  if (auto it = t.find("n"); it != t.end()) f.n = static_cast<int>(it->second.as_integer());
  f.base_c = get_num(t, "base_c", 1.0);
  f.base_p = get_num(t, "base_p", 2.0);
  f.path = get_str(t, "path", "");
  if (auto it = t.find("horizon"); it != t.end()) f.horizon = it->second.as_number();
  return f;
}

NoiseSpec parse_noise(const toml::Table& t) {
  NoiseSpec n;
  n.kind = get_str(t, "kind", "power-decay");
  n.c = get_num(t, "c", 1.0);
  n.gamma = get_num(t, "gamma", 2.5);
  n.base_c = get_num(t, "base_c", 1.0);
  n.base_p = get_num(t, "base_p", 2.0);
  n.growth = get_str(t, "growth", "t");
  n.path = get_str(t, "path", "");
  if (auto it = t.find("horizon"); it != t.end()) n.horizon = it->second.as_number();
  return n;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  toml::Document doc;
  try {
    doc = toml::Document::parse(text);
  } catch (const toml::ParseError& e) {
    throw ConfigError(e.what());
  }

  ExperimentConfig cfg;
  cfg.raw = text;
  try {
    const auto* kind = doc.find("experiment", "kind");
    if (!kind) throw ConfigError("missing [experiment] kind");
    cfg.kind = kind->as_string();
    if (cfg.kind != "ode" && cfg.kind != "ode-internal" && cfg.kind != "sde" &&
        cfg.kind != "criteria" && cfg.kind != "construct" && cfg.kind != "sweep")
      throw ConfigError("experiment.kind '" + cfg.kind + "' not one of ode|ode-internal|sde|criteria|construct|sweep");
    if (const auto* out = doc.find("experiment", "out")) cfg.out_dir = out->as_string();

    if (doc.has("model")) cfg.model = parse_model(doc.sections.at("model"));
    if (doc.has("forcing")) cfg.forcing = parse_forcing(doc.sections.at("forcing"));
    if (doc.has("noise")) cfg.noise = parse_noise(doc.sections.at("noise"));

    if (doc.has("run")) {
      const auto& t = doc.sections.at("run");
      if (auto it = t.find("xi"); it != t.end()) cfg.xi = it->second.as_number_array();
      cfg.T = get_num(t, "T", cfg.T);
      cfg.dt = get_num(t, "dt", cfg.dt);
      cfg.paths = static_cast<int>(get_num(t, "paths", cfg.paths));
      if (auto it = t.find("seed"); it != t.end())
        cfg.seed = static_cast<std::uint64_t>(it->second.as_integer());
      if (auto it = t.find("h"); it != t.end()) cfg.h = it->second.as_number_array();
      if (auto it = t.find("epsilons"); it != t.end())
        cfg.epsilons = it->second.as_number_array();
      cfg.threads = static_cast<int>(get_num(t, "threads", cfg.threads));
      cfg.checkpoints_per_decade =
          static_cast<int>(get_num(t, "checkpoints_per_decade", cfg.checkpoints_per_decade));
      cfg.dump_paths = static_cast<int>(get_num(t, "dump_paths", cfg.dump_paths));
      cfg.tol.tol_mean = get_num(t, "tol_mean", cfg.tol.tol_mean);
      cfg.tol.tol_std = get_num(t, "tol_std", cfg.tol.tol_std);
      cfg.tol.tol_drift = get_num(t, "tol_drift", cfg.tol.tol_drift);
      cfg.criteria_t_max = get_num(t, "criteria_t_max", cfg.criteria_t_max);
    }

    if (doc.has("sweep")) {
      const auto& t = doc.sections.at("sweep");
      if (auto it = t.find("betas"); it != t.end()) cfg.sweep.betas = it->second.as_number_array();
      if (auto it = t.find("gammas"); it != t.end())
        cfg.sweep.gammas = it->second.as_number_array();
      cfg.sweep.threshold_band = get_num(t, "threshold_band", cfg.sweep.threshold_band);
      cfg.sweep.h = get_num(t, "h", cfg.sweep.h);
    }
  } catch (const toml::ParseError& e) {
    throw ConfigError(e.what());
  }

  // validation
  if (!(cfg.T > 0.0)) throw ConfigError("run.T must be positive");
  if (!(cfg.dt > 0.0)) throw ConfigError("run.dt must be positive");
  if (cfg.paths < 1) throw ConfigError("run.paths must be >= 1");
  if (cfg.threads < 1) throw ConfigError("run.threads must be >= 1");
  if (cfg.kind == "sde" && !cfg.noise) throw ConfigError("sde experiment needs a [noise] table");
  if ((cfg.kind == "ode" || cfg.kind == "ode-internal") && !cfg.forcing)
    throw ConfigError(cfg.kind + " experiment needs a [forcing] table");
  if (cfg.kind == "criteria" && !cfg.forcing && !cfg.noise)
    throw ConfigError("criteria experiment needs a [forcing] or [noise] table");
  if (cfg.kind == "construct" && !cfg.forcing && !cfg.noise)
    throw ConfigError("construct experiment needs a [forcing] or [noise] table");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

// ---------------------------------------------------------------------------
// experiment execution
// ---------------------------------------------------------------------------

namespace {

struct Manifest {
  std::vector<std::string> lines;
  std::vector<std::string> outputs;

  void kv(const std::string& k, const std::string& v) { lines.push_back(k + "=" + v); }
  void output(const std::string& name) { outputs.push_back(name); }

  void write(const fs::path& dir) const {
    std::ostringstream ss;
    for (const auto& l : lines) ss << l << '\n';
    ss << "outputs=";
    for (std::size_t i = 0; i < outputs.size(); ++i) ss << (i ? "," : "") << outputs[i];
    ss << '\n';
    write_file((dir / "manifest.txt").string(), ss.str());
  }
};

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Manifest make_manifest(const ExperimentConfig& cfg) {
  Manifest m;
  m.kv("tool", "rvode 0.1.0");
  m.kv("kind", cfg.kind);
  m.kv("config_hash", hex64(fnv1a64(cfg.raw)));
  m.kv("master_seed", std::to_string(cfg.seed));
  return m;
}

void run_ode_kind(const ExperimentConfig& cfg, const fs::path& dir, Manifest& man,
                  std::ostream& log) {
  const NonlinearityModel model = cfg.model.build();
  auto scale = std::make_shared<DecayScale>(model);
  scale->ensure_coverage(cfg.T * 1.01);
  const Perturbation g = cfg.forcing->build(model, scale, cfg.T);

  StepPolicy policy;
  policy.checkpoints_per_decade = cfg.checkpoints_per_decade;

  std::ostringstream rep;
  for (std::size_t i = 0; i < cfg.xi.size(); ++i) {
    const double xi = cfg.xi[i];
    Trajectory traj = cfg.kind == "ode" ? integrate_ode(model, g, xi, cfg.T, policy)
                                        : integrate_internal(model, g, xi, cfg.T, policy);
    const RateDiagnostics diag = diagnostics(traj, *scale, g);
    const LimitClassification cls = classify(diag.t, diag.r, cfg.tol);

    const std::string name = "trajectory_" + std::to_string(i) + ".csv";
    CsvWriter csv((dir / name).string());
    csv.row({"t", "x", "r", "d", "flag"});
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
      const double t = traj.t[k];
      std::string r, d;
      if (t >= 1.0) {
        r = fmt(traj.x[k] / scale->F_inv(t));
        d = fmt((-model.eval(traj.x[k]) + g.eval(std::min(t, g.horizon()))) / scale->f_F_inv(t));
      }
      const char* flag = (traj.internal_handoff && t > traj.t_switch) ? "internal" : "ok";
      csv.row({fmt(t), fmt(traj.x[k]), r, d, flag});
    }
    man.output(name);

    const std::string p = "xi_" + std::to_string(i);
    rep << p << "=" << fmt(xi) << '\n';
    rep << p << "_class=" << to_string(cls.cls) << '\n';
    rep << p << "_lambda_hat=" << fmt(cls.lambda_hat) << '\n';
    rep << p << "_window_mean=" << fmt(cls.window_mean) << '\n';
    rep << p << "_window_std=" << fmt(cls.window_std) << '\n';
    rep << p << "_drift=" << fmt(cls.drift) << '\n';
    rep << p << "_steps=" << traj.steps << '\n';
    if (traj.internal_handoff) rep << p << "_internal_handoff_t=" << fmt(traj.t_switch) << '\n';
    log << "xi=" << xi << " -> " << to_string(cls.cls) << "\n";
  }

  if (cfg.kind == "ode") {
    const CriterionReport cr = evaluate_deterministic(*scale, g, std::min(cfg.criteria_t_max, cfg.T));
    rep << "det_tail_exists=" << (cr.det->tail_integral_exists ? "true" : "false") << '\n';
    rep << "det_tail_verdict=" << to_string(cr.det->tail_condition.verdict) << '\n';
    rep << "det_pointwise_verdict=" << to_string(cr.det->pointwise_condition.verdict) << '\n';
  }
  write_file((dir / "report.txt").string(), rep.str());
  man.output("report.txt");
}

void dump_sde_path(const ExperimentConfig& cfg, const NonlinearityModel& model,
                   const NoiseIntensity& sigma, DecayScale& scale, int index,
                   const fs::path& file) {
  SdePath path = simulate_path(model, sigma, cfg.xi.front(), cfg.T, cfg.dt, cfg.seed,
                               static_cast<std::uint64_t>(index));
  const double h = cfg.h.front();
  const std::size_t stride = static_cast<std::size_t>(std::llround(h / cfg.dt));
  const TailMartingaleSeries mt = tail_martingale(path, sigma);

  // thinned to the checkpoint grid
  std::vector<std::size_t> ks{0};
  for (double t : log_spaced(std::max(cfg.dt, 1e-2), cfg.T, cfg.checkpoints_per_decade)) {
    const std::size_t k = static_cast<std::size_t>(std::llround(t / cfg.dt));
    if (k > ks.back() && k < path.x.size()) ks.push_back(k);
  }

  CsvWriter csv(file.string());
  csv.row({"t", "X", "r", "q", "M_tail", "Sigma", "flag"});
  for (std::size_t k : ks) {
    const double t = path.t_at(k);
    std::string r, q, s_lil;
    if (t >= 1.0) r = fmt(path.x[k] / scale.F_inv(t));
    if (k + stride < path.x.size())
      q = fmt((path.x[k + stride] - path.x[k]) / h / scale.f_F_inv(t));
    if (k < mt.sigma_lil.size()) s_lil = fmt_opt(mt.sigma_lil[k]);
    csv.row({fmt(t), fmt(path.x[k]), r, q, k < mt.m_tail.size() ? fmt(mt.m_tail[k]) : "", s_lil,
             path.error ? "blowup" : "ok"});
  }
}

void run_sde_kind(const ExperimentConfig& cfg, const fs::path& dir, Manifest& man,
                  std::ostream& log) {
  EnsembleConfig ec{cfg.model.build(), cfg.noise->build(cfg.T)};
  ec.xi = cfg.xi.front();
  ec.T = cfg.T;
  ec.dt = cfg.dt;
  ec.paths = cfg.paths;
  ec.master_seed = cfg.seed;
  ec.h = cfg.h.front();
  ec.checkpoints_per_decade = cfg.checkpoints_per_decade;
  ec.tol = cfg.tol;
  ec.threads = cfg.threads;

  const EnsembleSummary sum = run_ensemble(ec);

  CsvWriter csv((dir / "ensemble.csv").string());
  csv.row({"path", "class", "lambda_hat", "r_mean", "r_std", "q_mean", "q_std", "F_XT_over_T",
           "X_T", "error", "error_time"});
  int n_err = 0;
  for (const auto& p : sum.paths) {
    csv.row({std::to_string(p.index), to_string(p.cls.cls), fmt(p.cls.lambda_hat),
             fmt_opt(p.r_final_mean), fmt_opt(p.r_final_std), fmt_opt(p.q_final_mean),
             fmt_opt(p.q_final_std), fmt_opt(p.F_XT_over_T), fmt_opt(p.X_T),
             p.error ? "1" : "0", fmt_opt(p.error_time)});
    if (p.error) {
      man.kv("error_path_" + std::to_string(p.index), "t=" + fmt(p.error_time));
      ++n_err;
    }
  }
  man.output("ensemble.csv");
  man.kv("path_errors", std::to_string(n_err));

  std::ostringstream rep;
  rep << "paths=" << cfg.paths << '\n';
  rep << "frac_minus=" << fmt(sum.frac_minus) << '\n';
  rep << "frac_zero=" << fmt(sum.frac_zero) << '\n';
  rep << "frac_plus=" << fmt(sum.frac_plus) << '\n';
  rep << "frac_unclassified=" << fmt(sum.frac_unclassified) << '\n';
  write_file((dir / "summary.txt").string(), rep.str());
  man.output("summary.txt");
  log << "classified -1/0/+1: " << sum.n_minus << "/" << sum.n_zero << "/" << sum.n_plus
      << ", unclassified " << sum.n_unclassified << "\n";

  if (cfg.dump_paths > 0) {
    const NonlinearityModel model = cfg.model.build();
    const NoiseIntensity sigma = cfg.noise->build(cfg.T);
    DecayScale scale(model);
    scale.ensure_coverage(cfg.T * 1.01);
    for (int i = 0; i < std::min(cfg.dump_paths, cfg.paths); ++i) {
      const std::string name = "path_" + std::to_string(i) + ".csv";
      dump_sde_path(cfg, model, sigma, scale, i, dir / name);
      man.output(name);
    }
  }
}

void write_criteria_series(const CriterionReport& rep, const fs::path& dir, Manifest& man) {
  if (rep.det) {
    {
      CsvWriter csv((dir / "det_tail_ratio.csv").string());
      csv.row({"t", "tail_over_Finv"});
      const auto& c = rep.det->tail_condition;
      for (std::size_t i = 0; i < c.t.size(); ++i) csv.row({fmt(c.t[i]), fmt(c.value[i])});
      man.output("det_tail_ratio.csv");
    }
    {
      CsvWriter csv((dir / "det_pointwise_ratio.csv").string());
      csv.row({"t", "g_over_fFinv"});
      const auto& c = rep.det->pointwise_condition;
      for (std::size_t i = 0; i < c.t.size(); ++i) csv.row({fmt(c.t[i]), fmt(c.value[i])});
      man.output("det_pointwise_ratio.csv");
    }
  }
  if (rep.mu && !rep.mu->t.empty()) {
    CsvWriter csv((dir / "mu_series.csv").string());
    csv.row({"t", "ratio"});
    for (std::size_t i = 0; i < rep.mu->t.size(); ++i)
      csv.row({fmt(rep.mu->t[i]), fmt(rep.mu->ratio[i])});
    man.output("mu_series.csv");
  }
  if (!rep.sf.empty()) {
    CsvWriter csv((dir / "sf_partials.csv").string());
    csv.row({"eps", "h", "N100", "N1000", "N10000", "theta_exponent", "verdict"});
    for (const auto& s : rep.sf)
      csv.row({fmt(s.eps), fmt(s.h), fmt(s.partial_sums[0]), fmt(s.partial_sums[1]),
               fmt(s.partial_sums[2]), s.exponent_known ? fmt(s.theta_exponent) : "",
               to_string(s.verdict)});
    man.output("sf_partials.csv");
  }
  if (rep.delta && !rep.delta->per_eps.empty()) {
    CsvWriter csv((dir / "delta_eps.csv").string());
    csv.row({"eps", "partial_integral", "finite"});
    for (const auto& pe : rep.delta->per_eps)
      csv.row({fmt(pe.eps), fmt(pe.partial_integral), to_string(pe.finite)});
    man.output("delta_eps.csv");
  }
}

void run_criteria_kind(const ExperimentConfig& cfg, const fs::path& dir, Manifest& man,
                       std::ostream& log) {
  const NonlinearityModel model = cfg.model.build();
  auto scale = std::make_shared<DecayScale>(model);
  std::ostringstream rep;

  CriterionReport combined;
  if (cfg.forcing) {
    const Perturbation g = cfg.forcing->build(model, scale, cfg.criteria_t_max);
    combined = evaluate_deterministic(*scale, g, cfg.criteria_t_max);
    rep << "det_tail_exists=" << (combined.det->tail_integral_exists ? "true" : "false") << '\n';
    rep << "det_tail_verdict=" << to_string(combined.det->tail_condition.verdict) << '\n';
    rep << "det_pointwise_verdict=" << to_string(combined.det->pointwise_condition.verdict)
        << '\n';
  }
  if (cfg.noise) {
    const NoiseIntensity sigma = cfg.noise->build(cfg.criteria_t_max);
    CriterionReport st = evaluate_stochastic(*scale, sigma, cfg.epsilons, cfg.h,
                                             cfg.criteria_t_max);
    combined.has_noise = true;
    combined.sigma_l2 = st.sigma_l2;
    combined.mu = st.mu;
    combined.sf = std::move(st.sf);
    combined.delta = st.delta;

    rep << "sigma_l2=" << (st.sigma_l2 ? "true" : "false") << '\n';
    if (combined.mu) {
      rep << "mu_class=" << to_string(combined.mu->cls) << '\n';
      rep << "mu_method=" << (combined.mu->analytic ? "analytic" : "numeric-limit") << '\n';
      rep << "mu_value=" << fmt(combined.mu->value) << '\n';
    }
    for (std::size_t i = 0; i < combined.sf.size(); ++i) {
      const auto& s = combined.sf[i];
      rep << "sf_" << i << "_eps=" << fmt(s.eps) << '\n';
      rep << "sf_" << i << "_h=" << fmt(s.h) << '\n';
      rep << "sf_" << i << "_verdict=" << to_string(s.verdict) << '\n';
      rep << "sf_" << i << "_partial_sums=" << fmt(s.partial_sums[0]) << ";"
          << fmt(s.partial_sums[1]) << ";" << fmt(s.partial_sums[2]) << '\n';
    }
    if (combined.delta) {
      rep << "delta_verdict=" << to_string(combined.delta->verdict) << '\n';
      rep << "delta_exponent=" << fmt(combined.delta->exponent) << '\n';
      rep << "delta_window_start=" << fmt(combined.delta->t_start) << '\n';
      if (combined.delta->window_shrunk) rep << "delta_window_shrunk=true" << '\n';
    }
  }
  write_file((dir / "report.txt").string(), rep.str());
  man.output("report.txt");
  write_criteria_series(combined, dir, man);
  log << "criteria report written\n";
}

void run_construct_kind(const ExperimentConfig& cfg, const fs::path& dir, Manifest& man,
                        std::ostream& log) {
  const NonlinearityModel model = cfg.model.build();
  auto scale = std::make_shared<DecayScale>(model);

  const SpikedData* sd = nullptr;
  const OscillatingData* osc = nullptr;
  Perturbation g = Perturbation::zero();
  NoiseIntensity sigma = NoiseIntensity::power_decay(0.0, 1.0);
  if (cfg.forcing) {
    g = cfg.forcing->build(model, scale, std::min(cfg.T, 1e4));
    sd = g.spiked_data();
    osc = g.oscillating_data();
  } else if (cfg.noise) {
    sigma = cfg.noise->build(std::min(cfg.T, 1e4));
    sd = sigma.spiked_data();
  }

  CsvWriter csv((dir / "construct.csv").string());
  if (sd) {
    // sampled k with a seam-check column: one row per seam carrying the
    // relative one-sided value/derivative gaps
    csv.row({"t", "k", "k_s", "gamma_plus", "seam", "value_gap_rel", "deriv_gap_rel"});
    const double t_hi = std::min(g.kind() == Perturbation::Kind::Spiked ? g.horizon() : 1e4, 100.0);
    for (int n = 0; n < static_cast<int>(t_hi); ++n) {
      const double wn = sd->w[static_cast<std::size_t>(n)];
      // one-sided limits in exact local spike coordinates x = 0 and x = w_n
      for (double x : {0.0, wn}) {
        const double t = n + x;
        const auto one_sided = sd->deriv_at_seam(t);
        const double base_val = sd->base(t);
        const double spike_val =
            sd->base(t) + spike_bump_shape(x, 0.5 * wn) * (sd->gamma_plus(t) - sd->base(t));
        const double vgap = std::fabs(spike_val - base_val) / std::max(std::fabs(base_val), 1e-300);
        const double dgap = std::fabs(one_sided.left - one_sided.right) /
                            std::max({std::fabs(one_sided.left), std::fabs(one_sided.right), 1e-300});
        csv.row({fmt(t), fmt(sd->eval(t)), fmt(base_val), fmt(sd->gamma_plus(t)), "1", fmt(vgap),
                 fmt(dgap)});
      }
      for (int i = 1; i <= 8; ++i) {  // inside the spike and the quiet piece
        const double ts = n + wn * i / 9.0;
        csv.row({fmt(ts), fmt(sd->eval(ts)), fmt(sd->base(ts)), fmt(sd->gamma_plus(ts)), "0", "",
                 ""});
        const double tq = n + wn + (1.0 - wn) * i / 9.0;
        csv.row({fmt(tq), fmt(sd->eval(tq)), fmt(sd->base(tq)), fmt(sd->gamma_plus(tq)), "0", "",
                 ""});
      }
    }
    man.output("construct.csv");
    log << "spiked construction sampled to t=" << std::min(100.0, cfg.T) << "\n";
  } else if (osc) {
    csv.row({"t", "g", "envelope", "phase"});
    for (double t : log_spaced(0.01, std::min(cfg.T, 100.0), 128))
      csv.row({fmt(t), fmt(osc->eval(t)), fmt(osc->gamma.value(t)), fmt(osc->phase(t))});
    man.output("construct.csv");
    log << "oscillating construction sampled\n";
  } else {
    throw ConfigError("construct experiment needs a spiked/oscillating forcing or spiked-square noise");
  }
}

void run_sweep_kind(const ExperimentConfig& cfg, const fs::path& dir, Manifest& man,
                    std::ostream& log) {
  CsvWriter csv((dir / "sweep.csv").string());
  csv.row({"beta", "gamma", "in_band", "sigma_l2", "mu", "sf", "delta", "coherent"});
  int cells = 0, incoherent = 0;
  for (double beta : cfg.sweep.betas) {
    const double thr_l2 = 0.5;
    const double thr_mu = (beta + 1.0) / (2.0 * (beta - 1.0));
    const double thr_sf = beta / (beta - 1.0);
    NonlinearityModel model = NonlinearityModel::pure_power(1.0, beta);
    DecayScale scale(model);
    for (double gamma : cfg.sweep.gammas) {
      const double band = cfg.sweep.threshold_band;
      const bool in_band = std::fabs(gamma - thr_l2) <= band ||
                           std::fabs(gamma - thr_mu) <= band || std::fabs(gamma - thr_sf) <= band;
      if (in_band) {
        csv.row({fmt(beta), fmt(gamma), "1", "", "", "", "", ""});
        continue;
      }
      const NoiseIntensity sigma = NoiseIntensity::power_decay(1.0, gamma);
      const bool l2 = sigma.is_square_integrable();
      std::string mu_s, sf_s, delta_s;
      bool coherent = l2 == (gamma > thr_l2);
      if (l2) {
        const MuEstimate mu = compute_mu(scale, sigma);
        const SfRecord sf = sum_Sf(scale, sigma, 1.0, cfg.sweep.h);
        const DeltaTest delta = delta_integral_test(scale, sigma, cfg.epsilons);
        mu_s = to_string(mu.cls);
        sf_s = to_string(sf.verdict);
        delta_s = to_string(delta.verdict);
        const bool mu_ok = (mu.cls == MuClass::Zero) == (gamma > thr_mu);
        const bool sf_ok = (sf.verdict == SfClass::Finite) == (gamma > thr_sf);
        const bool implication = sf.verdict != SfClass::Finite || mu.cls == MuClass::Zero;
        const bool delta_ok =
            (delta.verdict == DeltaVerdict::PreservedAllEps) == (mu.cls == MuClass::Zero);
        coherent = coherent && mu_ok && sf_ok && implication && delta_ok;
      } else {
        const DeltaTest delta = delta_integral_test(scale, sigma, cfg.epsilons);
        delta_s = to_string(delta.verdict);
        coherent = coherent && delta.verdict == DeltaVerdict::NotSquareIntegrable;
      }
      csv.row({fmt(beta), fmt(gamma), "0", l2 ? "true" : "false", mu_s, sf_s, delta_s,
               coherent ? "1" : "0"});
      ++cells;
      if (!coherent) ++incoherent;
    }
  }
  man.output("sweep.csv");
  man.kv("sweep_cells", std::to_string(cells));
  man.kv("sweep_incoherent", std::to_string(incoherent));
  log << "sweep: " << cells << " cells, " << incoherent << " incoherent\n";
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  Manifest man = make_manifest(cfg);
  try {
    if (cfg.kind == "ode" || cfg.kind == "ode-internal")
      run_ode_kind(cfg, dir, man, log);
    else if (cfg.kind == "sde")
      run_sde_kind(cfg, dir, man, log);
    else if (cfg.kind == "criteria")
      run_criteria_kind(cfg, dir, man, log);
    else if (cfg.kind == "construct")
      run_construct_kind(cfg, dir, man, log);
    else if (cfg.kind == "sweep")
      run_sweep_kind(cfg, dir, man, log);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    log << "runtime failure: " << e.what() << "\n";
    man.kv("runtime_failure", e.what());
    man.write(dir);
    return 3;
  }
  man.write(dir);
  return 0;
}

}  // namespace rvode
