#include "rvode/sde.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "rvode/numerics.hpp"

namespace rvode {

namespace {

// Drift half-step with the stability guard: subdivide when dt f(X)/X is too
// large for plain explicit Euler. Pure drift shrinks |X|, so the subdivision
// count from the entry state is safe for the whole step.
inline double drift_step(const NonlinearityModel& model, double x, double dt) {
  int m = 1;
  if (x != 0.0) {
    const double ratio = dt * std::fabs(model.eval(x) / x);
    if (ratio > 0.5) m = std::min(static_cast<int>(std::ceil(ratio / 0.5)), 1 << 20);
  }
  if (m == 1) return x - model.eval(x) * dt;
  const double sub = dt / m;
  for (int i = 0; i < m; ++i) x -= model.eval(x) * sub;
  return x;
}

std::size_t steps_for(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("sde: need T > 0 and dt > 0");
  return static_cast<std::size_t>(std::llround(T / dt));
}

}  // namespace

SdePath simulate_path(const NonlinearityModel& model, const NoiseIntensity& sigma, double xi,
                      double T, double dt, std::uint64_t master_seed,
                      std::uint64_t path_index, double blowup_guard, double noise_scale) {
  const std::size_t K = steps_for(T, dt);
  SdePath path;
  path.dt = dt;
  path.T = T;
  path.xi = xi;
  path.master_seed = master_seed;
  path.path_index = path_index;
  path.x.reserve(K + 1);
  path.x.push_back(xi);

  const NormalStream stream(master_seed, path_index);
  const double sqrt_dt = std::sqrt(dt);
  double x = xi;
  for (std::size_t k = 0; k < K; ++k) {
    const double t_k = static_cast<double>(k) * dt;
    x = drift_step(model, x, dt);
    const double s = sigma.sigma(t_k);
    if (s != 0.0) x += s * sqrt_dt * (noise_scale * stream.normal(k));
    if (std::fabs(x) > blowup_guard) {
      path.error = true;
      path.error_time = t_k + dt;
      break;
    }
    path.x.push_back(x);
  }
  return path;
}

std::vector<double> euler_deterministic(const NonlinearityModel& model, double xi, double T,
                                        double dt) {
  const std::size_t K = steps_for(T, dt);
  std::vector<double> x;
  x.reserve(K + 1);
  x.push_back(xi);
  double v = xi;
  for (std::size_t k = 0; k < K; ++k) {
    v = drift_step(model, v, dt);
    x.push_back(v);
  }
  return x;
}

IncrementSeries scaled_increment(const SdePath& path, double h, DecayScale& scale) {
  if (!(h > 0.0)) throw std::invalid_argument("scaled_increment: h must be positive");
  const double ratio = h / path.dt;
  const std::size_t stride = static_cast<std::size_t>(std::llround(ratio));
  if (stride == 0 || std::fabs(ratio - static_cast<double>(stride)) > 1e-9)
    throw std::invalid_argument("scaled_increment: h must be a multiple of dt");
  IncrementSeries out;
  if (path.x.size() <= stride) return out;
  out.t.reserve(path.x.size() - stride);
  out.q.reserve(path.x.size() - stride);
  for (std::size_t k = 0; k + stride < path.x.size(); ++k) {
    const double t = path.t_at(k);
    out.t.push_back(t);
    out.q.push_back((path.x[k + stride] - path.x[k]) / h / scale.f_F_inv(t));
  }
  return out;
}

TailMartingaleSeries tail_martingale(const SdePath& path, const NoiseIntensity& sigma) {
  // Regenerate the increments from the seed and accumulate the stochastic
  // integral M; the tail is M(T) - M(t) with variance bound varsigma(T).
  const std::size_t K = path.x.size() - 1;
  const NormalStream stream(path.master_seed, path.path_index);
  const double sqrt_dt = std::sqrt(path.dt);
  std::vector<double> m(K + 1, 0.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    acc += sigma.sigma(path.t_at(k)) * sqrt_dt * stream.normal(k);
    m[k + 1] = acc;
  }
  TailMartingaleSeries out;
  out.varsigma_T = sigma.is_square_integrable() ? sigma.varsigma(path.T) : kNaN;
  out.t.reserve(K + 1);
  out.m_tail.reserve(K + 1);
  out.sigma_lil.reserve(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    const double t = path.t_at(k);
    out.t.push_back(t);
    out.m_tail.push_back(acc - m[k]);
    double lil = kNaN;
    if (sigma.is_square_integrable()) {
      const double vs = sigma.varsigma(t);
      if (vs > 0.0 && vs < std::exp(-1.0)) lil = std::sqrt(2.0 * vs * std::log(std::log(1.0 / vs)));
    }
    out.sigma_lil.push_back(lil);
  }
  return out;
}

namespace {

struct Checkpoints {
  std::vector<std::size_t> steps;  // strictly increasing step indices
  std::vector<double> times;
};

Checkpoints make_checkpoints(double T, double dt, int per_decade) {
  Checkpoints cp;
  const std::size_t K = steps_for(T, dt);
  std::size_t prev = 0;
  cp.steps.push_back(0);
  cp.times.push_back(0.0);
  for (double t : log_spaced(std::max(dt, 1e-2), T, per_decade)) {
    std::size_t k = std::min(static_cast<std::size_t>(std::llround(t / dt)), K);
    if (k > prev) {
      cp.steps.push_back(k);
      cp.times.push_back(static_cast<double>(k) * dt);
      prev = k;
    }
  }
  if (cp.steps.back() != K) {
    cp.steps.push_back(K);
    cp.times.push_back(static_cast<double>(K) * dt);
  }
  return cp;
}

PathSummary run_one_path(const EnsembleConfig& cfg, DecayScale& scale, const Checkpoints& cp,
                         int index) {
  PathSummary out;
  out.index = index;

  const std::size_t K = steps_for(cfg.T, cfg.dt);
  const std::size_t stride = static_cast<std::size_t>(std::llround(cfg.h / cfg.dt));
  if (stride == 0 || std::fabs(cfg.h / cfg.dt - static_cast<double>(stride)) > 1e-9)
    throw std::invalid_argument("run_ensemble: h must be a positive multiple of dt");

  const NormalStream stream(cfg.master_seed, static_cast<std::uint64_t>(index));
  const double sqrt_dt = std::sqrt(cfg.dt);

  // streaming captures: X at checkpoints and at checkpoint+stride, the
  // stochastic integral at checkpoints, and M on the LIL window
  std::vector<double> x_at(cp.steps.size(), kNaN), x_ahead(cp.steps.size(), kNaN);
  const double t_lil_lo = cfg.T / 10.0, t_lil_hi = cfg.T / 2.0;
  std::vector<std::pair<std::size_t, double>> m_window;
  if (cfg.collect_tail_martingale) m_window.reserve(K / 2);

  double x = cfg.xi;
  double m_acc = 0.0;
  std::size_t ci = 0;  // next checkpoint slot for x_at
  std::size_t k = 0;
  bool blew_up = false;
  for (; k <= K; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    while (ci < cp.steps.size() && cp.steps[ci] == k) x_at[ci++] = x;
    // ahead captures (first match wins; strides are distinct because
    // checkpoint steps are strictly increasing)
    if (k >= stride) {
      auto it = std::lower_bound(cp.steps.begin(), cp.steps.end(), k - stride);
      if (it != cp.steps.end() && *it == k - stride)
        x_ahead[static_cast<std::size_t>(it - cp.steps.begin())] = x;
    }
    if (cfg.collect_tail_martingale && t >= t_lil_lo && t <= t_lil_hi)
      m_window.emplace_back(k, m_acc);
    if (k == K) break;

    x = drift_step(cfg.model, x, cfg.dt);
    const double s = cfg.sigma.sigma(t);
    if (s != 0.0) {
      const double dm = s * sqrt_dt * stream.normal(k);
      x += dm;
      m_acc += dm;
    }
    if (std::fabs(x) > cfg.blowup_guard) {
      out.error = true;
      out.error_time = t + cfg.dt;
      blew_up = true;
      break;
    }
  }
  if (blew_up) {
    out.cls = LimitClassification{};  // inconclusive
    return out;
  }

  // classification over r(t) = X/F_inv at checkpoints with t >= 1
  std::vector<double> ts, rs;
  for (std::size_t i = 0; i < cp.steps.size(); ++i) {
    if (cp.times[i] < 1.0 || std::isnan(x_at[i])) continue;
    ts.push_back(cp.times[i]);
    rs.push_back(x_at[i] / scale.F_inv(cp.times[i]));
  }
  out.cls = classify(ts, rs, cfg.tol);

  RunningStat r_stat, q_stat;
  for (std::size_t i = 0; i < cp.steps.size(); ++i) {
    const double t = cp.times[i];
    if (t > cfg.T / 10.0) {
      if (!std::isnan(x_at[i])) r_stat.add(x_at[i] / scale.F_inv(t));
      if (!std::isnan(x_ahead[i]) && t + cfg.h <= cfg.T)
        q_stat.add((x_ahead[i] - x_at[i]) / cfg.h / scale.f_F_inv(t));
    }
  }
  out.r_final_mean = r_stat.n ? r_stat.mean : kNaN;
  out.r_final_std = r_stat.n ? r_stat.stddev() : kNaN;
  out.q_final_mean = q_stat.n ? q_stat.mean : kNaN;
  out.q_final_std = q_stat.n ? q_stat.stddev() : kNaN;

  out.X_T = x;
  if (x != 0.0) out.F_XT_over_T = scale.F(std::fabs(x)) / cfg.T;

  if (cfg.collect_tail_martingale && cfg.sigma.is_square_integrable()) {
    double best = -kInf;
    for (const auto& [step, m_k] : m_window) {
      const double t = static_cast<double>(step) * cfg.dt;
      const double vs = cfg.sigma.varsigma(t);
      if (!(vs > 0.0) || vs >= std::exp(-1.0)) continue;
      const double lil = std::sqrt(2.0 * vs * std::log(std::log(1.0 / vs)));
      best = std::max(best, (m_acc - m_k) / lil);
    }
    if (best > -kInf) out.mtail_over_sigma_max = best;
  }
  return out;
}

}  // namespace

EnsembleSummary run_ensemble(const EnsembleConfig& cfg) {
  if (cfg.paths < 1) throw std::invalid_argument("run_ensemble: paths must be >= 1");
  EnsembleSummary summary;
  summary.master_seed = cfg.master_seed;
  summary.paths.resize(static_cast<std::size_t>(cfg.paths));

  const Checkpoints cp = make_checkpoints(cfg.T, cfg.dt, cfg.checkpoints_per_decade);

  // one decay-scale cache per worker; numeric grids stay read-only once
  // they cover the horizon
  const int n_threads = std::max(1, std::min(cfg.threads, cfg.paths));
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
  auto work = [&](int wi) {
    try {
      DecayScale scale(cfg.model);
      scale.ensure_coverage(cfg.T * 1.01);
      for (int i = next.fetch_add(1); i < cfg.paths; i = next.fetch_add(1))
        summary.paths[static_cast<std::size_t>(i)] = run_one_path(cfg, scale, cp, i);
    } catch (...) {
      errors[static_cast<std::size_t>(wi)] = std::current_exception();
    }
  };
  if (n_threads == 1) {
    work(0);
  } else {
    workers.reserve(static_cast<std::size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w) workers.emplace_back(work, w);
    for (auto& th : workers) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (const auto& p : summary.paths) {
    switch (p.cls.cls) {
      case LimitClass::MinusOne: ++summary.n_minus; break;
      case LimitClass::Zero: ++summary.n_zero; break;
      case LimitClass::PlusOne: ++summary.n_plus; break;
      default: ++summary.n_unclassified; break;
    }
  }
  const double n = static_cast<double>(cfg.paths);
  summary.frac_minus = summary.n_minus / n;
  summary.frac_zero = summary.n_zero / n;
  summary.frac_plus = summary.n_plus / n;
  summary.frac_unclassified = summary.n_unclassified / n;
  return summary;
}

}  // namespace rvode
