#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rvode/decay_scale.hpp"
#include "rvode/perturbation.hpp"

namespace rvode {

enum class Verdict { Holds, Fails, Inconclusive };
std::string to_string(Verdict v);

// Shared finite-horizon limit detection: a ratio series "tends to zero" when
// the sup over the last decade is below sup_threshold and the decade sups
// decrease across the last `decades` decades.
struct LimitDetection {
  double sup_threshold = 0.05;
  int decades = 3;
  int points_per_decade = 32;
};

struct ConditionSeries {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> t;
  std::vector<double> value;
  std::array<double, 3> decade_sups{};  // oldest to newest
};

/**
 * Deterministic sharp conditions for (f, g):
 *   tail:      int_0^inf g exists and (int_t^inf g)/F_inv(t) -> 0
 *              (preserves the solution decay rate)
 *   pointwise: g(t)/f(F_inv(t)) -> 0
 *              (additionally preserves the derivative decay rate)
 * Pointwise sups fold in the analytic spike peaks / oscillation envelopes,
 * so grid sampling cannot miss them.
 */
struct DetConditionReport {
  bool tail_integral_exists = false;
  ConditionSeries tail_condition;
  ConditionSeries pointwise_condition;
};

DetConditionReport check_det_conditions(DecayScale& scale, const Perturbation& g,
                                        double t_max = 1e6, const LimitDetection& det = {});

enum class MuClass { Zero, Infinite, Finite, Inconclusive };
std::string to_string(MuClass c);

// mu = lim 2 varsigma(t) loglog(1/varsigma(t)) / F_inv(t)^2  (squared limit of
// the LIL envelope over the decay benchmark); zero preserves the rate a.s.
struct MuEstimate {
  MuClass cls = MuClass::Inconclusive;
  double value = 0.0;     // 0, +inf, or the finite estimate
  bool analytic = false;  // exponent comparison vs numeric limit detection
  double exponent = 0.0;  // analytic: growth exponent of the ratio
  std::vector<double> t, ratio;
};

MuEstimate compute_mu(DecayScale& scale, const NoiseIntensity& sigma, double t_lo = 1e2,
                      double t_hi = 1e8, int points_per_decade = 16);

enum class SfClass { Finite, Infinite, Inconclusive };
std::string to_string(SfClass c);

// S_f(eps,h) = sum Psi(eps/theta(n)), theta^2(n) = int_{nh}^{(n+1)h} sigma^2
// over (f o F_inv)^2(nh). Finiteness for all eps preserves the scaled
// increments of the SDE. Summability is not decidable from finitely many
// terms, so the verdict comes from the analytic tail exponent when the
// family is recognized; otherwise partial sums plus Inconclusive.
struct SfRecord {
  double eps = 0.0;
  double h = 0.0;
  std::array<long, 3> cutoffs{100, 1000, 10000};
  std::array<double, 3> partial_sums{};
  bool exponent_known = false;
  double theta_exponent = 0.0;  // theta(n) ~ K n^theta_exponent
  SfClass verdict = SfClass::Inconclusive;
};

SfRecord sum_Sf(DecayScale& scale, const NoiseIntensity& sigma, double eps, double h);

enum class DeltaVerdict {
  PreservedAllEps,       // integral finite for every eps: rate preserved a.s.
  NotPreserved,          // delta^2/t bounded or integral divergent
  HypothesisViolated,    // delta^2/t -> inf but not monotonically on the window
  DegenerateDeterministic,  // varsigma hits zero: SDE collapses to the ODE
  NotSquareIntegrable,
  Inconclusive,
};
std::string to_string(DeltaVerdict v);

/**
 * Kolmogorov-Erdos style integral test on delta(t) = t F_inv(varsigma_inv(1/t)):
 * with psi = delta^2/t increasing, rate preservation holds iff
 *   int_1^inf (1/t) exp(-eps^2 psi(t)) dt < inf   for all eps > 0.
 */
struct DeltaTest {
  DeltaVerdict verdict = DeltaVerdict::Inconclusive;
  bool psi_increasing = false;
  bool exponent_known = false;
  double exponent = 0.0;  // psi ~ C t^exponent
  double t_start = 0.0;   // window start (1/varsigma(0) can push it past 1)
  bool window_shrunk = false;
  struct PerEps {
    double eps;
    double partial_integral;  // over [t_start, t_max]
    Verdict finite;
  };
  std::vector<PerEps> per_eps;
  std::string note;
};

DeltaTest delta_integral_test(DecayScale& scale, const NoiseIntensity& sigma,
                              std::span<const double> eps_grid, double t_max = 1e6);

// Assembled report for one (f, g) or (f, sigma) pair.
struct CriterionReport {
  std::optional<DetConditionReport> det;
  bool has_noise = false;
  bool sigma_l2 = false;
  std::optional<MuEstimate> mu;
  std::vector<SfRecord> sf;  // one record per (eps, h) pair requested
  std::optional<DeltaTest> delta;
};

CriterionReport evaluate_deterministic(DecayScale& scale, const Perturbation& g,
                                       double t_max = 1e6);
CriterionReport evaluate_stochastic(DecayScale& scale, const NoiseIntensity& sigma,
                                    std::span<const double> eps_grid,
                                    std::span<const double> h_grid, double t_max = 1e6);

}  // namespace rvode
