#pragma once

#include <cstdint>
#include <vector>

#include "rvode/classify.hpp"
#include "rvode/decay_scale.hpp"
#include "rvode/nonlinearity.hpp"
#include "rvode/perturbation.hpp"
#include "rvode/rng.hpp"

namespace rvode {

/**
 * Explicit Euler-Maruyama path of dX = -f(X) dt + sigma(t) dB on a uniform
 * grid:  X_{k+1} = X_k - f(X_k) dt + sigma(t_k) sqrt(dt) xi_k,
 * with xi_k drawn from the counter-based stream (master_seed, path_index, k).
 *
 * Explicit Euler on superlinear f is only conditionally stable, so when
 * dt |f(X)/X| > 0.5 the drift part of that step is subdivided; the noise
 * increment is applied once per step either way, which keeps the recursion
 * exact whenever the guard is idle.
 */
struct SdePath {
  double dt = 0.0;
  double T = 0.0;
  double xi = 0.0;
  std::uint64_t master_seed = 0;
  std::uint64_t path_index = 0;
  std::vector<double> x;  // x[k] at t = k dt
  bool error = false;     // |X| crossed the blow-up guard
  double error_time = 0.0;

  double t_at(std::size_t k) const { return static_cast<double>(k) * dt; }
};

SdePath simulate_path(const NonlinearityModel& model, const NoiseIntensity& sigma, double xi,
                      double T, double dt, std::uint64_t master_seed,
                      std::uint64_t path_index = 0, double blowup_guard = 1e6,
                      double noise_scale = 1.0);

// Deterministic explicit Euler with the same drift substepping; equals the
// sigma == 0 path bit for bit.
std::vector<double> euler_deterministic(const NonlinearityModel& model, double xi, double T,
                                        double dt);

struct IncrementSeries {
  std::vector<double> t;
  std::vector<double> q;  // ((X(t+h)-X(t))/h) / f(F_inv(t))
};

// h must be a multiple of dt (within rounding).
IncrementSeries scaled_increment(const SdePath& path, double h, DecayScale& scale);

struct TailMartingaleSeries {
  std::vector<double> t;
  std::vector<double> m_tail;    // M(T) - M(t), truncated tail of int_t^inf sigma dB
  std::vector<double> sigma_lil; // LIL envelope sqrt(2 vs loglog(1/vs)); NaN where vs >= 1/e
  double varsigma_T = 0.0;       // variance of the neglected tail beyond T
};

TailMartingaleSeries tail_martingale(const SdePath& path, const NoiseIntensity& sigma);

struct EnsembleConfig {
  NonlinearityModel model;
  NoiseIntensity sigma;
  double xi = 1.0;
  double T = 1e4;
  double dt = 1e-2;
  int paths = 100;
  std::uint64_t master_seed = 1;
  double h = 1.0;  // increment step for the scaled difference
  int checkpoints_per_decade = 64;
  ClassifierTolerances tol;
  bool collect_tail_martingale = false;  // max of M_tail/Sigma over [T/10, T/2]
  int threads = 1;
  double blowup_guard = 1e6;
};

struct PathSummary {
  int index = 0;
  LimitClassification cls;
  double r_final_mean = kNaN;  // last-decade stats of X/F_inv
  double r_final_std = kNaN;
  double q_final_mean = kNaN;  // last-decade stats of the scaled increment
  double q_final_std = kNaN;
  double F_XT_over_T = kNaN;   // F(|X(T)|)/T
  double X_T = kNaN;
  double mtail_over_sigma_max = kNaN;
  bool error = false;
  double error_time = kNaN;
};

struct EnsembleSummary {
  std::vector<PathSummary> paths;
  int n_minus = 0, n_zero = 0, n_plus = 0, n_unclassified = 0;
  double frac_minus = 0, frac_zero = 0, frac_plus = 0, frac_unclassified = 0;
  std::uint64_t master_seed = 0;
};

// Runs paths 0..paths-1, each fully determined by (master_seed, index);
// results are ordered by index, so the outcome is thread-count invariant.
// Per-path failures are recorded in the summary, not thrown.
EnsembleSummary run_ensemble(const EnsembleConfig& config);

}  // namespace rvode
