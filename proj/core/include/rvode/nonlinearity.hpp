#pragma once

namespace rvode {

enum class Family { PurePower, PowerLogLoglog };

/**
 * Mean-reversion nonlinearity f, regularly varying at 0 with index beta > 1.
 *
 * Two families, both exactly odd:
 *   PurePower       f(x) = a |x|^beta sgn(x)
 *   PowerLogLoglog  f(x) = a |x|^beta log^b1(1/|x|) (loglog(1/|x|))^b2 sgn(x)
 * The family formula applies on |x| <= crossover; beyond it f continues
 * linearly, matching value and one-sided slope at the crossover. The linear
 * continuation keeps f locally Lipschitz and bounded away from zero at
 * infinity, so solutions started far from the equilibrium still converge.
 *
 * Logs are natural logs. For PowerLogLoglog the crossover must stay below
 * 1/e so both log factors are positive; the constructor also verifies that
 * f is strictly increasing up to the crossover.
 *
 * Immutable after construction; safe to share across threads.
 */
class NonlinearityModel {
 public:
  static NonlinearityModel pure_power(double a, double beta, double crossover = 1.0);
  static NonlinearityModel power_log_loglog(double a, double beta, double beta1, double beta2,
                                            double crossover = 0.05);

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;

  // One-sided derivative, analytic on each branch (x != 0).
  double deriv(double x) const;

  // Slowly varying factor ell(x) = (f(x)/x^beta)^(-1/(beta-1)), 0 < x < crossover.
  double slowly_varying_ell(double x) const;

  Family family() const { return family_; }
  double scale() const { return a_; }
  double beta() const { return beta_; }
  double beta1() const { return beta1_; }
  double beta2() const { return beta2_; }
  double crossover() const { return crossover_; }

  bool has_closed_form_decay_scale() const {
    return family_ == Family::PurePower && crossover_ >= 1.0;
  }

 private:
  NonlinearityModel(Family fam, double a, double beta, double beta1, double beta2,
                    double crossover);
  double core(double r) const;        // family formula at r in (0, crossover]
  double core_deriv(double r) const;  // its derivative

  Family family_;
  double a_, beta_, beta1_, beta2_, crossover_;
  double f_cross_;      // f(crossover)
  double slope_cross_;  // f'(crossover-), slope of the linear continuation
};

}  // namespace rvode
