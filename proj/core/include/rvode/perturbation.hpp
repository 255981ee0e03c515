#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rvode/decay_scale.hpp"
#include "rvode/nonlinearity.hpp"
#include "rvode/numerics.hpp"

namespace rvode {

/**
 * Growth function Gamma(t): continuous, nondecreasing, unbounded. Menu of
 * closed forms plus a sampled table (piecewise linear, not C1).
 */
class GammaSpec {
 public:
  enum class Kind { T, OnePlusT, TSquared, ExpT, Table };

  static GammaSpec t() { return GammaSpec(Kind::T); }
  static GammaSpec one_plus_t() { return GammaSpec(Kind::OnePlusT); }
  static GammaSpec t_squared() { return GammaSpec(Kind::TSquared); }
  static GammaSpec exp_t() { return GammaSpec(Kind::ExpT); }
  static GammaSpec table(std::vector<double> ts, std::vector<double> vs);
  static GammaSpec from_name(const std::string& name);  // "t", "1+t", "t^2", "e^t"

  double value(double t) const;
  double deriv(double t) const;
  double integral(double t) const;          // I(t) = int_0^t Gamma
  double integral_inverse(double I) const;  // t with integral(t) = I
  bool is_c1() const { return kind_ != Kind::Table; }
  Kind kind() const { return kind_; }
  std::string name() const;

 private:
  explicit GammaSpec(Kind k) : kind_(k) {}
  Kind kind_;
  std::vector<double> ts_, vs_, cum_;  // table form
};

// Spiked construction k = k_s + bumps (base must be integrable, positive,
// decreasing); precomputed per-interval spike widths and integrals.
struct SpikedData {
  double base_c, base_p;       // k_s(t) = base_c (1+t)^-base_p, base_p > 1
  GammaSpec gamma;
  double sup_base;             // sup k_s = k_s(0) for the decreasing base
  std::vector<double> w;       // spike width on [n, n+w[n])
  std::vector<double> spike_integral;  // int of the bump part over spike n
  std::vector<double> spike_suffix;    // sum of spike_integral from n on

  double base(double t) const;
  double base_deriv(double t) const;
  double base_tail(double t) const;
  double gamma_plus(double t) const { return gamma.value(t) + sup_base + 1.0; }
  double gamma_plus_deriv(double t) const { return gamma.deriv(t); }
  double eval(double t) const;
  double deriv(double t) const;  // from the branch containing t (t not a seam)
  // one-sided derivatives at a seam location
  struct OneSided { double left, right; };
  OneSided deriv_at_seam(double t) const;
  double tail(double t) const;
  double peak_time(int n) const { return n + 0.5 * w[static_cast<std::size_t>(n)]; }
  int max_spike() const { return static_cast<int>(w.size()) - 1; }
};

struct OscillatingData {
  GammaSpec gamma;
  int n;  // sin(I(t)^n); n >= (2 beta - 1)/(beta - 1) preserves the decay rate

  double phase(double t) const;       // I(t)^n
  double frequency(double t) const;   // d/dt I(t)^n
  double eval(double t) const;
  double tail(double t) const;          // int_t^inf, period sums + tail expansion
  double tail_envelope(double t) const; // k(I(t)^n) with k(u) = u^(-(1-1/n))/n
  double abs_integral(double T) const;  // int_0^T |g|
};

/**
 * Deterministic forcing g(t) for x' = -f(x) + g(t). Value semantics; cheap
 * to copy. Tail integrals int_t^inf g are exact where the kind admits them.
 */
class Perturbation {
 public:
  enum class Kind { Zero, PowerDecay, ScaledDerivativeRate, ZeroLimitSynthetic,
                    Oscillating, Spiked, Sampled };

  static Perturbation zero();
  // c (1+t)^-p  (any real c; tail defined for p > 1)
  static Perturbation power_decay(double c, double p);
  // c f(F_inv(t)); the borderline rate that breaks the pointwise condition
  static Perturbation scaled_derivative_rate(double c, std::shared_ptr<DecayScale> scale);
  // xi d'(t) + f(xi d(t)) with d(t) = exp(-t^2); makes x = xi d exact
  static Perturbation zero_limit_synthetic(double xi, NonlinearityModel model);
  // Gamma(t) sin(I(t)^n); divergent |g| but convergent tail
  static Perturbation oscillating(GammaSpec gamma, int n);
  // spike lemma applied to base k_s(t) = base_c (1+t)^-base_p
  static Perturbation spiked(double base_c, double base_p, GammaSpec gamma,
                             double horizon);
  // two-column table, strictly increasing t; linear interpolation
  static Perturbation sampled(std::vector<double> ts, std::vector<double> vs);

  double operator()(double t) const;
  double eval(double t) const;

  bool has_tail_integral() const;
  double tail_integral(double t) const;  // int_t^inf g(s) ds
  double total_integral() const { return tail_integral(0.0); }

  // sup of |g| over [a,b]; spike peaks and oscillation envelopes are folded
  // in analytically so coarse sampling cannot miss them
  double sup_abs_on(double a, double b) const;

  double horizon() const { return horizon_; }
  Kind kind() const { return kind_; }
  std::string kind_name() const;

  const SpikedData* spiked_data() const { return spiked_.get(); }
  const OscillatingData* oscillating_data() const { return osc_.get(); }

 private:
  Perturbation() = default;

  Kind kind_ = Kind::Zero;
  double horizon_ = kInf;
  double c_ = 0.0, p_ = 0.0;  // PowerDecay
  double xi_ = 0.0;           // ZeroLimitSynthetic
  std::optional<NonlinearityModel> model_;
  std::shared_ptr<DecayScale> scale_;
  std::shared_ptr<const SpikedData> spiked_;
  std::shared_ptr<const OscillatingData> osc_;
  std::shared_ptr<const std::vector<std::pair<double, double>>> table_;
};

/**
 * Noise intensity sigma(t) for dX = -f(X) dt + sigma(t) dB, with its tail
 * energy varsigma(t) = int_t^inf sigma^2.
 */
class NoiseIntensity {
 public:
  enum class Kind { PowerDecay, SpikedSquare, Sampled };

  // sigma(t) = c (1+t)^-gamma
  static NoiseIntensity power_decay(double c, double gamma);
  // sigma^2(t) = spiked k over base k_s = base_c (1+t)^-base_p
  static NoiseIntensity spiked_square(double base_c, double base_p, GammaSpec gamma,
                                      double horizon);
  static NoiseIntensity sampled(std::vector<double> ts, std::vector<double> vs);

  double sigma(double t) const;
  double sigma_sq(double t) const;

  bool is_square_integrable() const;
  double varsigma(double t) const;      // throws if not square integrable
  double varsigma_inv(double tau) const;

  Kind kind() const { return kind_; }
  std::string kind_name() const;
  double power_c() const { return c_; }
  double power_gamma() const { return gamma_; }
  const SpikedData* spiked_data() const { return spiked_.get(); }

 private:
  NoiseIntensity() = default;
  Kind kind_ = Kind::PowerDecay;
  double c_ = 0.0, gamma_ = 0.0;
  std::shared_ptr<const SpikedData> spiked_;
  std::shared_ptr<const std::vector<std::pair<double, double>>> table_;
  std::vector<double> table_cum_;  // cumulative int of sigma^2 over the table
};

// Shared bump shape of the spike lemma: cubic rise over [0,a] mirrored on
// [a,2a]; value b at the peak, zero value and slope at both ends.
double spike_bump(double x, double a, double b);
double spike_bump_shape(double x, double a);        // b = 1 factor
double spike_bump_shape_deriv(double x, double a);

// Builds the spiked function data (used by both Perturbation::spiked and
// NoiseIntensity::spiked_square).
SpikedData build_spiked(double base_c, double base_p, GammaSpec gamma, double horizon);

}  // namespace rvode
