#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rvode/numerics.hpp"
#include "rvode/perturbation.hpp"

using namespace rvode;

namespace {
const auto cubic = NonlinearityModel::pure_power(1.0, 3.0);
}

TEST_CASE("power decay forcing and tail") {
  const auto g = Perturbation::power_decay(2.0, 3.0);
  CHECK(g(10.0) == doctest::Approx(2.0 / (11.0 * 11.0 * 11.0)).epsilon(1e-15));
  CHECK(g.tail_integral(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.tail_integral(3.0) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));

  const auto slow = Perturbation::power_decay(1.0, 0.8);
  CHECK_FALSE(slow.has_tail_integral());
  CHECK_THROWS_AS(slow.tail_integral(1.0), std::domain_error);
}

TEST_CASE("scaled derivative rate: g = c f(F_inv), tail = c F_inv") {
  auto scale = std::make_shared<DecayScale>(cubic);
  const auto g = Perturbation::scaled_derivative_rate(1.0, scale);
  CHECK(g(4.0) == doctest::Approx(1.0 / 27.0).epsilon(1e-14));
  CHECK(g.tail_integral(4.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("zero-limit synthetic forcing") {
  const auto g = Perturbation::zero_limit_synthetic(1.0, cubic);
  CHECK(g(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  const double t = 0.7;
  const double d = std::exp(-t * t);
  CHECK(g(t) == doctest::Approx(-2.0 * t * d + std::exp(-3.0 * t * t)).epsilon(1e-14));
  // int_0^inf g = -1 + (1/2) sqrt(pi/3)
  CHECK(g.tail_integral(0.0) == doctest::Approx(-0.48833664602675576).epsilon(1e-10));
}

TEST_CASE("oscillating forcing: values and frozen tail oracle") {
  const auto g = Perturbation::oscillating(GammaSpec::one_plus_t(), 3);
  CHECK(g(0.0) == 0.0);
  const auto* osc = g.oscillating_data();
  // I(10) = 60, phase = 216000
  CHECK(osc->phase(10.0) == doctest::Approx(216000.0).epsilon(1e-14));

  // oracle values computed by high-resolution period sums of the
  // substituted integral int_v^inf u^(-2/3) sin(u) du / 3
  auto t_for = [](double v) { return -1.0 + std::sqrt(1.0 + 2.0 * std::cbrt(v)); };
  CHECK(g.tail_integral(t_for(10.0)) == doctest::Approx(-0.062145140791439395).epsilon(1e-8));
  CHECK(g.tail_integral(t_for(100.0)) == doctest::Approx(0.013288077893875849).epsilon(1e-8));
  CHECK(g.tail_integral(t_for(1000.0)) == doctest::Approx(0.0018764323398511196).epsilon(1e-8));
  CHECK(g.tail_integral(10.0) == doctest::Approx(-9.0693162343245557e-05).epsilon(1e-7));

  // envelope bound |int_t^inf g| <= k(I(t)^n) (1 + o(1))
  for (double t : {2.0, 5.0, 10.0, 20.0})
    CHECK(std::fabs(g.tail_integral(t)) <= osc->tail_envelope(t) * 1.01);
}

TEST_CASE("oscillating tail is consistent with direct quadrature over a short window") {
  const auto g = Perturbation::oscillating(GammaSpec::one_plus_t(), 3);
  const double t1 = 1.0, t2 = 1.3;
  const double direct = adaptive_simpson([&](double s) { return g(s); }, t1, t2, 1e-12);
  CHECK(g.tail_integral(t1) - g.tail_integral(t2) == doctest::Approx(direct).epsilon(1e-7));
}

TEST_CASE("oscillating cancellation: tails shrink while |g| accumulates") {
  const auto g = Perturbation::oscillating(GammaSpec::one_plus_t(), 3);
  const auto* osc = g.oscillating_data();
  // partial integrals int_0^T g form a Cauchy sequence...
  const double total = g.tail_integral(0.0);
  for (double T : {10.0, 30.0, 100.0, 300.0}) {
    const double partial = total - g.tail_integral(T);
    CHECK(std::fabs(total - partial) <= osc->tail_envelope(T) * 1.01);
  }
  // ...while int_0^T |g| diverges
  const double a100 = osc->abs_integral(100.0);
  const double a1000 = osc->abs_integral(1000.0);
  CHECK(a1000 > 10.0 * a100);
  // |sin| has mean 2/pi over the fast phase, so int |g| ~ (2/pi) I(T)
  CHECK(a1000 == doctest::Approx((2.0 / kPi) * (1000.0 + 5e5)).epsilon(0.01));
}

TEST_CASE("spike bump shape") {
  CHECK(spike_bump(0.37, 0.37, 5.0) == doctest::Approx(5.0).epsilon(1e-15));  // peak value b
  CHECK(spike_bump(0.0, 0.37, 5.0) == 0.0);
  CHECK(spike_bump(0.74, 0.37, 5.0) == 0.0);
  CHECK(spike_bump_shape_deriv(0.0, 0.37) == 0.0);
  CHECK(spike_bump_shape_deriv(0.37, 0.37) == 0.0);
  // symmetric around the peak
  CHECK(spike_bump_shape(0.1, 0.37) == doctest::Approx(spike_bump_shape(0.64, 0.37)).epsilon(1e-14));
}

TEST_CASE("spiked construction: widths, peaks, seams") {
  const auto g = Perturbation::spiked(1.0, 2.0, GammaSpec::t(), 200.0);
  const auto* sd = g.spiked_data();
  REQUIRE(sd != nullptr);
  CHECK(sd->sup_base == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sd->gamma_plus(1.0) == doctest::Approx(3.0).epsilon(1e-12));
  // w_j = min(1/2, int_{j+1}^{j+2} k_s / ((j+1) Gamma_+(j+1)))
  CHECK(sd->w[0] == doctest::Approx(1.0 / 18.0).epsilon(1e-12));
  CHECK(sd->w[1] == doctest::Approx(1.0 / 96.0).epsilon(1e-12));
  CHECK(sd->w[5] == doctest::Approx(1.0 / 2688.0).epsilon(1e-12));

  // sup over [n, n+1] is attained at the spike center with value Gamma_+
  for (int n : {0, 1, 7, 20, 99}) {
    const double tp = sd->peak_time(n);
    CHECK(sd->eval(tp) == doctest::Approx(sd->gamma_plus(tp)).epsilon(1e-12));
  }

  // C1 seams: one-sided limits taken in exact local spike coordinates
  // (x = 0 and x = w_n) match within 1e-6 relative
  for (int n = 0; n < 100; ++n) {
    const double wn = sd->w[static_cast<std::size_t>(n)];
    for (double x : {0.0, wn}) {
      const double s = n + x;
      const double left = sd->base(s);
      const double right =
          sd->base(s) + spike_bump_shape(x, 0.5 * wn) * (sd->gamma_plus(s) - sd->base(s));
      CHECK(std::fabs(right - left) <= 1e-6 * std::fabs(left));
      const auto d = sd->deriv_at_seam(s);
      CHECK(std::fabs(d.left - d.right) <= 1e-6 * std::max(std::fabs(d.left), std::fabs(d.right)));
    }
  }

  // derivative formula cross-check by central differences inside smooth
  // branches (mid-spike and mid-quiet)
  for (int n : {0, 1, 3}) {
    const double wn = sd->w[static_cast<std::size_t>(n)];
    for (double t : {n + 0.31 * wn, n + wn + 0.4}) {
      const double eps = 1e-7 * std::max(1.0, std::fabs(t));
      const double fd = (sd->eval(t + eps) - sd->eval(t - eps)) / (2.0 * eps);
      CHECK(sd->deriv(t) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("spiked tail ratio stays within [1, 1.05] on [10, 100]") {
  const auto g = Perturbation::spiked(1.0, 2.0, GammaSpec::t(), 200.0);
  const auto* sd = g.spiked_data();
  for (double t : log_spaced(10.0, 100.0, 64)) {
    const double ratio = g.tail_integral(t) / sd->base_tail(t);
    CHECK(ratio >= 1.0 - 1e-12);
    CHECK(ratio <= 1.05);
  }
  // peak ratio k/Gamma_+ at spike centers stays in [0.99, 1]
  for (int n = 20; n <= 100; ++n) {
    const double ratio = sd->eval(sd->peak_time(n)) / sd->gamma_plus(sd->peak_time(n));
    CHECK(ratio >= 0.99);
    CHECK(ratio <= 1.0 + 1e-12);
  }
}

TEST_CASE("spiked tail against direct quadrature") {
  const auto g = Perturbation::spiked(1.0, 2.0, GammaSpec::t(), 50.0);
  // int_2.5^6.0 k by brute panels (resolving each spike) must equal the
  // difference of tails
  double direct = 0.0;
  for (int n = 2; n < 6; ++n) {
    const double wn = g.spiked_data()->w[static_cast<std::size_t>(n)];
    const double lo = std::max(2.5, static_cast<double>(n));
    if (lo < n + wn)
      direct += adaptive_simpson([&](double s) { return g(s); }, lo, n + wn, 1e-13);
    direct += adaptive_simpson([&](double s) { return g(s); }, std::max(lo, n + wn),
                               std::min(6.0, n + 1.0), 1e-13);
  }
  CHECK(g.tail_integral(2.5) - g.tail_integral(6.0) == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("sampled forcing interpolates and refuses tails") {
  const auto g = Perturbation::sampled({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0});
  CHECK(g(0.5) == doctest::Approx(1.0));
  CHECK(g(1.5) == doctest::Approx(1.0));
  CHECK(g.horizon() == 2.0);
  CHECK_FALSE(g.has_tail_integral());
  CHECK_THROWS_AS(g.tail_integral(0.0), std::domain_error);
  CHECK_THROWS_AS(Perturbation::sampled({0.0, 0.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("sup_abs_on folds in spike peaks and oscillation envelopes") {
  const auto sp = Perturbation::spiked(1.0, 2.0, GammaSpec::t(), 200.0);
  // grid sampling between integers would miss the spikes entirely
  CHECK(sp.sup_abs_on(40.1, 41.9) >= sp.spiked_data()->gamma_plus(41.0));
  const auto osc = Perturbation::oscillating(GammaSpec::one_plus_t(), 3);
  CHECK(osc.sup_abs_on(10.0, 20.0) == doctest::Approx(21.0));
}

TEST_CASE("noise intensity: varsigma closed form and guards") {
  const auto s = NoiseIntensity::power_decay(1.0, 2.5);
  CHECK(s.sigma(1.0) == doctest::Approx(std::pow(2.0, -2.5)).epsilon(1e-15));
  CHECK(s.varsigma(0.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(s.varsigma(1.0) / s.varsigma(0.0) == doctest::Approx(std::pow(2.0, -4.0)).epsilon(1e-14));
  CHECK(s.varsigma_inv(s.varsigma(7.0)) == doctest::Approx(7.0).epsilon(1e-12));

  const auto bad = NoiseIntensity::power_decay(1.0, 0.5);
  CHECK_FALSE(bad.is_square_integrable());
  CHECK_THROWS_AS(bad.varsigma(0.0), std::domain_error);
}

TEST_CASE("spiked-square noise: varsigma decreasing with invertible tail") {
  const auto s = NoiseIntensity::spiked_square(1.0, 2.0, GammaSpec::t(), 100.0);
  double prev = kInf;
  for (double t : {0.0, 1.0, 5.0, 20.0, 80.0}) {
    const double v = s.varsigma(t);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
  CHECK(s.varsigma_inv(s.varsigma(13.0)) == doctest::Approx(13.0).epsilon(1e-9));
  CHECK(s.sigma(0.5) == doctest::Approx(std::sqrt(s.sigma_sq(0.5))));
}
