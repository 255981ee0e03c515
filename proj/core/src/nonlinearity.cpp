#include "rvode/nonlinearity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rvode {

namespace {
constexpr double kInvE = 0.36787944117144233;  // 1/e
}

NonlinearityModel::NonlinearityModel(Family fam, double a, double beta, double beta1,
                                     double beta2, double crossover)
    : family_(fam), a_(a), beta_(beta), beta1_(beta1), beta2_(beta2), crossover_(crossover) {
  if (!(a > 0.0)) throw std::invalid_argument("NonlinearityModel: a must be positive");
  if (!(beta > 1.0)) throw std::invalid_argument("NonlinearityModel: beta must exceed 1");
  if (!(crossover > 0.0)) throw std::invalid_argument("NonlinearityModel: crossover must be positive");
  if (fam == Family::PowerLogLoglog && !(crossover < kInvE))
    throw std::invalid_argument("NonlinearityModel: log family needs crossover < 1/e");

  f_cross_ = core(crossover_);
  slope_cross_ = core_deriv(crossover_);
  if (!(f_cross_ > 0.0) || !(slope_cross_ > 0.0))
    throw std::invalid_argument("NonlinearityModel: f not increasing at crossover");

  // strict monotonicity up to the crossover, checked on a geometric grid
  double prev = 0.0;
  for (int k = -240; k <= 0; ++k) {
    const double r = crossover_ * std::pow(10.0, k / 20.0);
    const double v = core(r);
    if (!(v > prev) || core_deriv(r) <= 0.0)
      throw std::invalid_argument("NonlinearityModel: f not strictly increasing on (0, crossover)");
    prev = v;
  }
}

NonlinearityModel NonlinearityModel::pure_power(double a, double beta, double crossover) {
  return NonlinearityModel(Family::PurePower, a, beta, 0.0, 0.0, crossover);
}

NonlinearityModel NonlinearityModel::power_log_loglog(double a, double beta, double beta1,
                                                      double beta2, double crossover) {
  return NonlinearityModel(Family::PowerLogLoglog, a, beta, beta1, beta2, crossover);
}

double NonlinearityModel::core(double r) const {
  if (family_ == Family::PurePower) return a_ * std::pow(r, beta_);
  const double L = std::log(1.0 / r);
  double v = a_ * std::pow(r, beta_);
  if (beta1_ != 0.0) v *= std::pow(L, beta1_);
  if (beta2_ != 0.0) v *= std::pow(std::log(L), beta2_);
  return v;
}

double NonlinearityModel::core_deriv(double r) const {
  if (family_ == Family::PurePower) return a_ * beta_ * std::pow(r, beta_ - 1.0);
  // f = a r^beta L^b1 (log L)^b2 with L = log(1/r):
  // f' = (f/r) [beta - b1/L - b2/(L log L)]
  const double L = std::log(1.0 / r);
  double bracket = beta_ - beta1_ / L;
  if (beta2_ != 0.0) bracket -= beta2_ / (L * std::log(L));
  return core(r) / r * bracket;
}

double NonlinearityModel::eval(double x) const {
  if (!std::isfinite(x)) throw std::domain_error("NonlinearityModel::eval: x not finite");
  if (x == 0.0) return 0.0;
  const double r = std::fabs(x);
  const double v = (r <= crossover_) ? core(r) : f_cross_ + slope_cross_ * (r - crossover_);
  return x > 0.0 ? v : -v;
}

double NonlinearityModel::deriv(double x) const {
  if (!std::isfinite(x)) throw std::domain_error("NonlinearityModel::deriv: x not finite");
  const double r = std::fabs(x);
  if (r == 0.0) return 0.0;  // f'(0) = 0 for beta > 1
  return (r <= crossover_) ? core_deriv(r) : slope_cross_;
}

double NonlinearityModel::slowly_varying_ell(double x) const {
  if (!(x > 0.0) || !(x < crossover_))
    throw std::domain_error("slowly_varying_ell: x outside (0, crossover)");
  // (f(x)/x^beta)^(-1/(beta-1)); evaluated from the factors, not f itself,
  // to avoid underflow of x^beta at tiny x.
  double log_l = std::log(a_);
  if (family_ == Family::PowerLogLoglog) {
    const double L = std::log(1.0 / x);
    if (beta1_ != 0.0) log_l += beta1_ * std::log(L);
    if (beta2_ != 0.0) log_l += beta2_ * std::log(std::log(L));
  }
  return std::exp(-log_l / (beta_ - 1.0));
}

}  // namespace rvode
