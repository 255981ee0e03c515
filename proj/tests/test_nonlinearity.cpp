#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rvode/nonlinearity.hpp"
#include "rvode/numerics.hpp"
#include "rvode/rng.hpp"

using namespace rvode;

TEST_CASE("pure power evaluation") {
  const auto f = NonlinearityModel::pure_power(1.0, 3.0);
  CHECK(f.eval(0.5) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(f.eval(0.0) == 0.0);
  CHECK(f.eval(-0.5) == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK_THROWS_AS(f.eval(std::nan("")), std::domain_error);
}

TEST_CASE("power-log-loglog evaluation, natural log convention") {
  // f(x) = x^3 log(1/x), crossover above the probe point
  const auto f = NonlinearityModel::power_log_loglog(1.0, 3.0, 1.0, 0.0, 0.2);
  CHECK(f.eval(0.1) == doctest::Approx(1e-3 * std::log(10.0)).epsilon(1e-14));
}

TEST_CASE("slowly varying factor") {
  const auto f1 = NonlinearityModel::pure_power(1.0, 3.0);
  CHECK(f1.slowly_varying_ell(0.3) == doctest::Approx(1.0).epsilon(1e-15));

  const auto f2 = NonlinearityModel::pure_power(2.0, 3.0);
  CHECK(f2.slowly_varying_ell(0.3) == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-14));

  // beta1=2, beta2=0: ell(x) = log(1/x)^{-1}
  const auto f3 = NonlinearityModel::power_log_loglog(1.0, 3.0, 2.0, 0.0, 0.05);
  CHECK(f3.slowly_varying_ell(0.01) == doctest::Approx(1.0 / std::log(100.0)).epsilon(1e-14));

  CHECK_THROWS_AS(f1.slowly_varying_ell(0.0), std::domain_error);
  CHECK_THROWS_AS(f1.slowly_varying_ell(1.5), std::domain_error);
}

TEST_CASE("oddness is exact") {
  const auto f = NonlinearityModel::power_log_loglog(1.3, 2.5, 1.0, 0.5, 0.05);
  NormalStream u(99, 0);
  for (int i = 0; i < 1000; ++i) {
    const double x = (2.0 * u.uniform(static_cast<std::uint64_t>(i)) - 1.0) * f.crossover();
    CHECK(f.eval(x) + f.eval(-x) == 0.0);
  }
}

TEST_CASE("regular variation at zero with index beta") {
  // pure power: the ratio is exactly lambda^beta, well within the 1% gate
  const auto p = NonlinearityModel::pure_power(1.3, 3.0);
  for (double lam : {0.5, 2.0, 10.0})
    CHECK(p.eval(lam * 1e-6) / p.eval(1e-6) == doctest::Approx(lam * lam * lam).epsilon(0.01));

  // log family: the slowly varying factor converges like 1/log(1/x), so
  // check the exact factorization and that the gap shrinks monotonically
  // along a geometric grid x -> 0
  const auto f = NonlinearityModel::power_log_loglog(1.0, 3.0, 1.0, 1.0, 0.05);
  for (double lam : {0.5, 2.0, 10.0}) {
    double prev_gap = kInf;
    for (double x : {1e-4, 1e-6, 1e-8, 1e-10}) {
      const double ratio = f.eval(lam * x) / f.eval(x);
      const double L = std::log(1.0 / x), Ll = std::log(1.0 / (lam * x));
      const double sv = (Ll / L) * (std::log(Ll) / std::log(L));
      CHECK(ratio == doctest::Approx(std::pow(lam, 3.0) * sv).epsilon(1e-9));
      const double gap = std::fabs(ratio / std::pow(lam, 3.0) - 1.0);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
  }
}

TEST_CASE("strictly increasing near zero and superlinear decay of f/x") {
  const auto f = NonlinearityModel::power_log_loglog(1.0, 2.0, -1.0, 0.0, 0.05);
  double prev = 0.0;
  double prev_ratio = 0.0;
  for (int k = -60; k <= 0; ++k) {
    const double x = f.crossover() * std::pow(10.0, k / 10.0);
    const double v = f.eval(x);
    CHECK(v > prev);
    prev = v;
    const double ratio = v / x;  // f(x)/x -> 0 as x -> 0
    CHECK(ratio > prev_ratio);
    prev_ratio = ratio;
  }
}

TEST_CASE("linear continuation keeps f away from zero at infinity") {
  const auto f = NonlinearityModel::pure_power(1.0, 3.0);
  CHECK(f.eval(1.0) == doctest::Approx(1.0));
  // slope 3 at the crossover x = 1
  CHECK(f.eval(10.0) == doctest::Approx(1.0 + 3.0 * 9.0).epsilon(1e-14));
  CHECK(f.eval(1e6) > 1.0);
  CHECK(f.deriv(5.0) == doctest::Approx(3.0));
}

TEST_CASE("local Lipschitz: difference quotients bounded on compacts") {
  const auto f = NonlinearityModel::power_log_loglog(1.0, 3.0, 1.0, 0.0, 0.05);
  const double K = f.deriv(2.0) + 1.0;  // slope beyond crossover bounds everything on [-2,2]
  NormalStream u(7, 1);
  for (int i = 0; i < 500; ++i) {
    const double x = 4.0 * u.uniform(2 * static_cast<std::uint64_t>(i)) - 2.0;
    const double y = 4.0 * u.uniform(2 * static_cast<std::uint64_t>(i) + 1) - 2.0;
    if (x == y) continue;
    CHECK(std::fabs(f.eval(x) - f.eval(y)) <= K * std::fabs(x - y) * (1.0 + 1e-12));
  }
}

TEST_CASE("constructor rejections") {
  CHECK_THROWS_AS(NonlinearityModel::pure_power(-1.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(NonlinearityModel::pure_power(1.0, 1.0), std::invalid_argument);
  // log family must keep its crossover below 1/e
  CHECK_THROWS_AS(NonlinearityModel::power_log_loglog(1.0, 3.0, 1.0, 0.0, 0.5),
                  std::invalid_argument);
  // beta1 large and positive makes f non-monotone near the crossover
  CHECK_THROWS_AS(NonlinearityModel::power_log_loglog(1.0, 1.2, 5.0, 0.0, 0.3),
                  std::invalid_argument);
}
