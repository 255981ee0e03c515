#include "rvode/decay_scale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rvode/numerics.hpp"

namespace rvode {

DecayScale::DecayScale(NonlinearityModel model, ScaleMode mode, double quad_tol, double x_min)
    : model_(std::move(model)), mode_(mode), quad_tol_(quad_tol) {
  if (mode_ == ScaleMode::Auto)
    mode_ = model_.has_closed_form_decay_scale() ? ScaleMode::ClosedForm : ScaleMode::Numeric;
  if (mode_ == ScaleMode::ClosedForm && !model_.has_closed_form_decay_scale())
    throw std::invalid_argument("DecayScale: closed form needs PurePower with crossover >= 1");
  if (mode_ == ScaleMode::ClosedForm) return;

  if (!(x_min > 0.0) || !(x_min < 1.0))
    throw std::invalid_argument("DecayScale: x_min must lie in (0,1)");

  // Panel edges descend geometrically from 1 to x_min, with an extra edge at
  // the crossover where 1/f has a derivative kink.
  const double c = model_.crossover();
  xs_.push_back(1.0);
  Fs_.push_back(0.0);
  const int decades = static_cast<int>(std::ceil(-std::log10(x_min)));
  for (int k = 1; k <= decades * panels_per_decade_; ++k) {
    double x = std::pow(10.0, -static_cast<double>(k) / panels_per_decade_);
    const double prev = xs_.back();
    if (c < prev && c > x) {
      xs_.push_back(c);
      Fs_.push_back(Fs_[Fs_.size() - 1] + panel_integral(c, prev));
    }
    if (x >= prev) continue;
    xs_.push_back(x);
    Fs_.push_back(Fs_.back() + panel_integral(x, xs_[xs_.size() - 2]));
  }
}

double DecayScale::panel_integral(double lo, double hi) const {
  return gauss16([this](double u) { return 1.0 / model_.eval(u); }, lo, hi);
}

double DecayScale::F(double x) const {
  if (!(x > 0.0)) throw std::domain_error("DecayScale::F: x must be positive");
  if (x == 1.0) return 0.0;

  if (mode_ == ScaleMode::ClosedForm) {
    const double a = model_.scale(), b = model_.beta(), c = model_.crossover();
    if (x <= c) return (std::pow(x, 1.0 - b) - 1.0) / (a * (b - 1.0));
    // linear continuation region: f(u) = f(c) + s (u - c)
    const double fc = model_.eval(c), s = model_.deriv(c);
    const double Fc = (std::pow(c, 1.0 - b) - 1.0) / (a * (b - 1.0));
    return Fc - std::log1p(s * (x - c) / fc) / s;
  }

  if (x > 1.0) {
    const double c = model_.crossover();
    double acc = 0.0;
    double lo = 1.0;
    if (c > 1.0 && c < x) {  // keep the kink on a panel edge
      acc += adaptive_simpson([this](double u) { return 1.0 / model_.eval(u); }, lo, c, quad_tol_);
      lo = c;
    }
    acc += adaptive_simpson([this](double u) { return 1.0 / model_.eval(u); }, lo, x, quad_tol_);
    return -acc;
  }
  return F_numeric(x);
}

double DecayScale::F_numeric(double x) const {
  if (x < xs_.back())
    throw std::domain_error("DecayScale::F: x below cached grid; call ensure_coverage first");
  // first panel edge <= x (xs_ is descending)
  auto it = std::lower_bound(xs_.begin(), xs_.end(), x, std::greater<double>());
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
  if (i == 0) return 0.0;
  return Fs_[i - 1] + panel_integral(x, xs_[i - 1]);
}

double DecayScale::coverage() const {
  if (mode_ == ScaleMode::ClosedForm) return kInf;
  return Fs_.back();
}

void DecayScale::extend_one_decade() {
  const double lo = std::log10(xs_.back());
  for (int k = 1; k <= panels_per_decade_; ++k) {
    const double x = std::pow(10.0, lo - static_cast<double>(k) / panels_per_decade_);
    xs_.push_back(x);
    Fs_.push_back(Fs_.back() + panel_integral(x, xs_[xs_.size() - 2]));
  }
}

void DecayScale::ensure_coverage(double t_max) {
  if (mode_ == ScaleMode::ClosedForm) return;
  while (Fs_.back() < t_max) {
    if (xs_.back() < 1e-280)
      throw std::runtime_error("DecayScale: grid extension exhausted double range");
    extend_one_decade();
  }
}

double DecayScale::F_inv(double t) {
  if (!(t >= 0.0)) throw std::domain_error("DecayScale::F_inv: t must be nonnegative");
  if (t == 0.0) return 1.0;

  if (mode_ == ScaleMode::ClosedForm) {
    const double a = model_.scale(), b = model_.beta();
    return std::pow(1.0 + a * (b - 1.0) * t, -1.0 / (b - 1.0));
  }

  ensure_coverage(t);
  // bracketing panel: Fs_ ascending
  auto it = std::lower_bound(Fs_.begin(), Fs_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - Fs_.begin());
  if (i == 0) return 1.0;
  double hi = xs_[i - 1], lo = xs_[i];  // F(hi) <= t <= F(lo)
  double x = 0.5 * (lo + hi);
  const double ttol = 1e-12 * std::max(1.0, t);
  for (int iter = 0; iter < 100; ++iter) {
    const double Fx = F_numeric(x);
    const double resid = Fx - t;
    if (std::fabs(resid) <= ttol) return x;
    if (resid > 0.0)
      lo = x;  // F too large -> x too small
    else
      hi = x;
    // Newton step using F'(x) = -1/f(x), clamped to the bracket
    double step = resid * model_.eval(x);
    double xn = x + step;
    if (!(xn > lo) || !(xn < hi)) xn = 0.5 * (lo + hi);
    x = xn;
  }
  return x;
}

double DecayScale::f_F_inv(double t) {
  if (mode_ == ScaleMode::ClosedForm) {
    const double a = model_.scale(), b = model_.beta();
    return a * std::pow(1.0 + a * (b - 1.0) * t, -b / (b - 1.0));
  }
  return model_.eval(F_inv(t));
}

DecayScale::AsymptoticValue DecayScale::F_inv_asymptotic(double t) const {
  if (!(t > 0.0)) throw std::domain_error("F_inv_asymptotic: t must be positive");
  const double b = model_.beta();
  const double y = std::pow(t, -1.0 / (b - 1.0));
  // slowly varying factor at y, by formula (y may sit above the crossover
  // for moderate t; this is an asymptotic estimate either way)
  double log_l = std::log(model_.scale());
  if (model_.family() == Family::PowerLogLoglog) {
    const double L = std::log(1.0 / y);
    if (L <= 0.0) return {kNaN, true};
    if (model_.beta1() != 0.0) log_l += model_.beta1() * std::log(L);
    if (model_.beta2() != 0.0) {
      if (L <= 1.0) return {kNaN, true};
      log_l += model_.beta2() * std::log(std::log(L));
    }
  }
  const double ell = std::exp(-log_l / (b - 1.0));
  const double value = std::pow(1.0 / (b - 1.0), 1.0 / (b - 1.0)) * y * ell;
  return {value, t < 10.0};
}

}  // namespace rvode
