#include "rvode/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rvode/numerics.hpp"
#include "rvode/rng.hpp"

namespace rvode {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(MuClass c) {
  switch (c) {
    case MuClass::Zero: return "zero";
    case MuClass::Infinite: return "infinite";
    case MuClass::Finite: return "finite";
    case MuClass::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(SfClass c) {
  switch (c) {
    case SfClass::Finite: return "finite";
    case SfClass::Infinite: return "infinite";
    case SfClass::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(DeltaVerdict v) {
  switch (v) {
    case DeltaVerdict::PreservedAllEps: return "preserved";
    case DeltaVerdict::NotPreserved: return "not-preserved";
    case DeltaVerdict::HypothesisViolated: return "hypothesis-violated";
    case DeltaVerdict::DegenerateDeterministic: return "deterministic-beyond-T";
    case DeltaVerdict::NotSquareIntegrable: return "sigma-not-L2";
    case DeltaVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

// verdict from decade sups: holds when the last sup is small and the sups
// shrink decade over decade (a sup of exactly zero counts as shrunk; fast
// forcings underflow to zero well inside the window)
Verdict envelope_verdict(const std::array<double, 3>& sups, const LimitDetection& det,
                         bool enough_decades) {
  if (!enough_decades) return Verdict::Inconclusive;
  const double s_old = sups[0], s_mid = sups[1], s_new = sups[2];
  if (s_new == 0.0) return Verdict::Holds;
  if (s_new < det.sup_threshold && s_new < s_mid && s_mid < s_old) return Verdict::Holds;
  if (s_new >= det.sup_threshold) return Verdict::Fails;
  return Verdict::Inconclusive;
}

}  // namespace

DetConditionReport check_det_conditions(DecayScale& scale, const Perturbation& g, double t_max,
                                        const LimitDetection& det) {
  DetConditionReport rep;
  t_max = std::min(t_max, g.horizon());
  const bool enough = t_max >= std::pow(10.0, det.decades);
  scale.ensure_coverage(t_max * 1.01);

  rep.tail_integral_exists = g.has_tail_integral();

  const auto grid = log_spaced(1.0, t_max, det.points_per_decade);

  // condition (a): tail/F_inv. Oscillating tails are bounded by the analytic
  // envelope so the sampled sup cannot understate the decade sup.
  if (rep.tail_integral_exists) {
    auto& c = rep.tail_condition;
    const auto* osc = g.oscillating_data();
    std::array<double, 3> sups{0.0, 0.0, 0.0};
    for (double t : grid) {
      const double tail = g.tail_integral(t);
      const double ratio = tail / scale.F_inv(t);
      c.t.push_back(t);
      c.value.push_back(ratio);
      const int dec = static_cast<int>(std::floor(std::log10(t_max / t) + 1e-12));
      if (dec >= 0 && dec < det.decades) {
        double mag = std::fabs(ratio);
        if (osc) mag = std::max(mag, osc->tail_envelope(t) / scale.F_inv(t));
        auto& s = sups[static_cast<std::size_t>(det.decades - 1 - dec)];
        s = std::max(s, mag);
      }
    }
    c.decade_sups = sups;
    c.verdict = envelope_verdict(sups, det, enough);
  } else {
    rep.tail_condition.verdict = Verdict::Fails;  // first part of (a) already fails
  }

  // condition (c): g/f(F_inv), decade sups via interval envelopes so spikes
  // between grid points still count
  {
    auto& c = rep.pointwise_condition;
    std::array<double, 3> sups{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double t = grid[i];
      c.t.push_back(t);
      c.value.push_back(g.eval(std::min(t, g.horizon())) / scale.f_F_inv(t));
      if (i + 1 < grid.size()) {
        const double sup_g = g.sup_abs_on(t, grid[i + 1]);
        const double ratio = sup_g / scale.f_F_inv(grid[i + 1]);
        const int dec = static_cast<int>(std::floor(std::log10(t_max / t) + 1e-12));
        if (dec >= 0 && dec < det.decades) {
          auto& s = sups[static_cast<std::size_t>(det.decades - 1 - dec)];
          s = std::max(s, ratio);
        }
      }
    }
    c.decade_sups = sups;
    c.verdict = envelope_verdict(sups, det, enough);
  }
  return rep;
}

MuEstimate compute_mu(DecayScale& scale, const NoiseIntensity& sigma, double t_lo, double t_hi,
                      int points_per_decade) {
  if (!sigma.is_square_integrable())
    throw std::domain_error("compute_mu: sigma not square integrable");
  MuEstimate out;

  const bool recognized = sigma.kind() == NoiseIntensity::Kind::PowerDecay &&
                          scale.model().family() == Family::PurePower;
  if (recognized) {
    const double beta = scale.model().beta(), gamma = sigma.power_gamma();
    // ratio ~ t^e with e = 2/(beta-1) - (2 gamma - 1); at e = 0 the loglog
    // factor still drives the ratio to infinity
    out.exponent = 2.0 / (beta - 1.0) - (2.0 * gamma - 1.0);
    out.analytic = true;
    out.cls = out.exponent < 0.0 ? MuClass::Zero : MuClass::Infinite;
    out.value = out.exponent < 0.0 ? 0.0 : kInf;
  }

  scale.ensure_coverage(t_hi * 1.01);
  std::vector<RunningStat> decades;
  const auto grid = log_spaced(t_lo, t_hi, points_per_decade);
  const int n_dec = static_cast<int>(std::round(std::log10(t_hi / t_lo)));
  decades.resize(static_cast<std::size_t>(std::max(1, n_dec)));
  for (double t : grid) {
    const double vs = sigma.varsigma(t);
    if (!(vs > 0.0) || vs >= std::exp(-1.0)) continue;  // loglog guard
    const double finv = scale.F_inv(t);
    const double ratio = 2.0 * vs * std::log(std::log(1.0 / vs)) / (finv * finv);
    out.t.push_back(t);
    out.ratio.push_back(ratio);
    const int dec = static_cast<int>(std::floor(std::log10(t_hi / t) + 1e-12));
    if (dec >= 0 && dec < n_dec) decades[static_cast<std::size_t>(dec)].add(ratio);
  }

  if (!recognized) {
    // numeric limit detection on decade means (newest = index 0)
    if (decades.size() < 3 || decades[0].n == 0 || decades[1].n == 0 || decades[2].n == 0) {
      out.cls = MuClass::Inconclusive;
      return out;
    }
    const double m0 = decades[0].mean, m1 = decades[1].mean, m2 = decades[2].mean;
    if (m0 < 0.05 && m0 < m1 && m1 < m2) {
      out.cls = MuClass::Zero;
      out.value = 0.0;
    } else if (m0 > m1 && m1 > m2 && m0 > 1.0 && m0 > 2.0 * m2) {
      out.cls = MuClass::Infinite;
      out.value = kInf;
    } else if (std::fabs(m0 - m1) < 0.05 * std::max(1.0, std::fabs(m0)) &&
               std::fabs(m1 - m2) < 0.05 * std::max(1.0, std::fabs(m1))) {
      out.cls = MuClass::Finite;
      out.value = m0;
    } else {
      out.cls = MuClass::Inconclusive;
    }
  }
  return out;
}

SfRecord sum_Sf(DecayScale& scale, const NoiseIntensity& sigma, double eps, double h) {
  if (!(eps > 0.0) || !(h > 0.0)) throw std::invalid_argument("sum_Sf: eps and h must be positive");
  if (!sigma.is_square_integrable())
    throw std::domain_error("sum_Sf: sigma not square integrable");
  SfRecord rec;
  rec.eps = eps;
  rec.h = h;

  const long n_max = rec.cutoffs.back();
  scale.ensure_coverage(static_cast<double>(n_max + 1) * h * 1.01);
  double sum = 0.0;
  std::size_t cut = 0;
  for (long n = 0; n < n_max; ++n) {
    while (cut < rec.cutoffs.size() && n == rec.cutoffs[cut]) rec.partial_sums[cut++] = sum;
    const double t = static_cast<double>(n) * h;
    const double dvs = sigma.varsigma(t) - sigma.varsigma(t + h);
    if (dvs > 0.0) {
      const double theta = std::sqrt(dvs) / scale.f_F_inv(t);
      if (theta > 1e-300) sum += normal_ccdf(eps / theta);
    }
  }
  while (cut < rec.cutoffs.size()) rec.partial_sums[cut++] = sum;

  if (sigma.kind() == NoiseIntensity::Kind::PowerDecay &&
      scale.model().family() == Family::PurePower) {
    const double beta = scale.model().beta(), gamma = sigma.power_gamma();
    rec.exponent_known = true;
    rec.theta_exponent = beta / (beta - 1.0) - gamma;  // theta(n) ~ K n^this
    // theta -> 0 polynomially gives Gaussian-tail summability; theta bounded
    // below keeps the terms away from zero
    rec.verdict = rec.theta_exponent < 0.0 ? SfClass::Finite : SfClass::Infinite;
  }
  return rec;
}

DeltaTest delta_integral_test(DecayScale& scale, const NoiseIntensity& sigma,
                              std::span<const double> eps_grid, double t_max) {
  DeltaTest out;
  if (!sigma.is_square_integrable()) {
    out.verdict = DeltaVerdict::NotSquareIntegrable;
    out.note = "sigma not in L2; rate preserved with probability zero";
    return out;
  }
  const double vs0 = sigma.varsigma(0.0);
  if (!(vs0 > 0.0)) {
    out.verdict = DeltaVerdict::DegenerateDeterministic;
    out.note = "varsigma vanishes: dynamics collapse to the unperturbed ODE";
    return out;
  }
  // degenerate sampled noise: varsigma hits exactly zero inside the window
  if (sigma.kind() == NoiseIntensity::Kind::Sampled && sigma.varsigma(t_max) == 0.0) {
    out.verdict = DeltaVerdict::DegenerateDeterministic;
    out.note = "varsigma(t) = 0 beyond the table: deterministic beyond T'";
    return out;
  }

  out.t_start = std::max(1.0, 1.0 / vs0 * (1.0 + 1e-12));
  out.window_shrunk = out.t_start > 1.0;
  if (!(out.t_start < t_max / 100.0)) {
    out.verdict = DeltaVerdict::Inconclusive;
    out.note = "window too short after shrinking past 1/varsigma(0)";
    return out;
  }

  scale.ensure_coverage(sigma.varsigma_inv(1.0 / t_max) * 1.01);
  auto psi = [&](double t) {
    const double finv = scale.F_inv(sigma.varsigma_inv(1.0 / t));
    return t * finv * finv;  // delta(t)^2 / t with delta = t F_inv(vs_inv(1/t))
  };

  // The monotonicity hypothesis concerns large t; an initial dip right after
  // 1/varsigma(0) is absorbed by shrinking the window, and only a decrease
  // persisting into the last two decades counts as a violation.
  auto grid = log_spaced(out.t_start, t_max, 16);
  std::size_t last_decrease = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (psi(grid[i]) < psi(grid[i - 1]) * (1.0 - 1e-9)) last_decrease = i;
  if (last_decrease > 0 && grid[last_decrease] <= t_max / 100.0) {
    out.t_start = grid[last_decrease];
    out.window_shrunk = true;
    grid = log_spaced(out.t_start, t_max, 16);
    last_decrease = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (psi(grid[i]) < psi(grid[i - 1]) * (1.0 - 1e-9)) last_decrease = i;
  }
  const bool increasing = last_decrease == 0;
  out.psi_increasing = increasing;

  if (sigma.kind() == NoiseIntensity::Kind::PowerDecay &&
      scale.model().family() == Family::PurePower) {
    const double beta = scale.model().beta(), gamma = sigma.power_gamma();
    out.exponent_known = true;
    out.exponent = 1.0 - 2.0 / ((2.0 * gamma - 1.0) * (beta - 1.0));
  } else {
    // slope of log psi over the last two decades
    const double p1 = psi(t_max), p0 = psi(t_max / 100.0);
    out.exponent = std::log(p1 / p0) / std::log(100.0);
  }

  for (double eps : eps_grid) {
    DeltaTest::PerEps pe;
    pe.eps = eps;
    pe.partial_integral = adaptive_simpson(
        [&](double u) { return std::exp(-eps * eps * psi(std::exp(u))); }, std::log(out.t_start),
        std::log(t_max), 1e-9);
    if (out.exponent > 0.005)
      pe.finite = Verdict::Holds;
    else if (out.exponent <= 0.0 || !increasing)
      pe.finite = Verdict::Fails;
    else
      pe.finite = Verdict::Inconclusive;
    out.per_eps.push_back(pe);
  }

  const double psi_end = psi(t_max), psi_start = psi(out.t_start);
  if (psi_end <= psi_start * 1.0001) {
    // delta^2/t does not tend to infinity: preservation has probability 0
    out.verdict = DeltaVerdict::NotPreserved;
    out.note = "delta^2/t bounded";
    return out;
  }
  if (!increasing) {
    out.verdict = DeltaVerdict::HypothesisViolated;
    out.note = "delta^2/t grows but is not monotone on the window";
    return out;
  }
  bool all_finite = true, any_fail = false, any_inconclusive = false;
  for (const auto& pe : out.per_eps) {
    if (pe.finite != Verdict::Holds) all_finite = false;
    if (pe.finite == Verdict::Fails) any_fail = true;
    if (pe.finite == Verdict::Inconclusive) any_inconclusive = true;
  }
  if (all_finite && !out.per_eps.empty())
    out.verdict = DeltaVerdict::PreservedAllEps;
  else if (any_fail)
    out.verdict = DeltaVerdict::NotPreserved;
  else if (any_inconclusive)
    out.verdict = DeltaVerdict::Inconclusive;
  return out;
}

CriterionReport evaluate_deterministic(DecayScale& scale, const Perturbation& g, double t_max) {
  CriterionReport rep;
  rep.det = check_det_conditions(scale, g, t_max);
  return rep;
}

CriterionReport evaluate_stochastic(DecayScale& scale, const NoiseIntensity& sigma,
                                    std::span<const double> eps_grid,
                                    std::span<const double> h_grid, double t_max) {
  CriterionReport rep;
  rep.has_noise = true;
  rep.sigma_l2 = sigma.is_square_integrable();
  if (!rep.sigma_l2) {
    // everything downstream needs varsigma; report the L2 verdict alone
    DeltaTest d;
    d.verdict = DeltaVerdict::NotSquareIntegrable;
    rep.delta = d;
    return rep;
  }
  rep.mu = compute_mu(scale, sigma);
  for (double h : h_grid)
    for (double eps : eps_grid) rep.sf.push_back(sum_Sf(scale, sigma, eps, h));
  rep.delta = delta_integral_test(scale, sigma, eps_grid, t_max);
  return rep;
}

}  // namespace rvode
