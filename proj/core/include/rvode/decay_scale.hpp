#pragma once

#include <vector>

#include "rvode/nonlinearity.hpp"

namespace rvode {

enum class ScaleMode { Auto, ClosedForm, Numeric };

/**
 * Decay benchmark of the unperturbed equation y' = -f(y):
 *
 *   F(x)    = int_x^1 du / f(u)          (strictly decreasing, F(1) = 0)
 *   F_inv   = its inverse on [0, inf)    (the benchmark decay rate)
 *   f_F_inv = f(F_inv(t)) = -d/dt F_inv  (the benchmark derivative rate)
 *
 * PurePower models with crossover >= 1 evaluate in closed form. Everything
 * else integrates 1/f panel-by-panel on a geometric grid down to x_min
 * (Gauss-Legendre per panel, so the u^-beta growth never meets a quadrature
 * interval wider than one grid ratio) and inverts by bracketed Newton.
 *
 * The grid is built at construction and is read-only afterwards, except for
 * ensure_coverage(), which extends it toward smaller x and must be called
 * from a single thread before sharing.
 */
class DecayScale {
 public:
  explicit DecayScale(NonlinearityModel model, ScaleMode mode = ScaleMode::Auto,
                      double quad_tol = 1e-10, double x_min = 1e-12);

  // int_x^1 du/f(u); x > 1 gives the (negative) reversed integral.
  double F(double x) const;

  // Unique x in (0,1] with F(x) = t, t >= 0. Extends the cached grid if the
  // request falls past it (not thread safe; see ensure_coverage).
  double F_inv(double t);

  // f(F_inv(t)).
  double f_F_inv(double t);

  struct AsymptoticValue {
    double value;
    bool below_validity_floor;  // t < 10: formula evaluated but flagged
  };
  // Slowly-varying asymptote of F_inv(t) for large t.
  AsymptoticValue F_inv_asymptotic(double t) const;

  // Grow the cache so that F_inv is available for all t <= t_max.
  void ensure_coverage(double t_max);

  double coverage() const;  // largest t currently invertible
  const NonlinearityModel& model() const { return model_; }
  ScaleMode mode() const { return mode_; }

 private:
  double F_numeric(double x) const;
  double panel_integral(double lo, double hi) const;
  void extend_one_decade();

  NonlinearityModel model_;
  ScaleMode mode_;
  double quad_tol_;

  // geometric panel edges, descending from 1; Fs_[i] = F(xs_[i])
  std::vector<double> xs_;
  std::vector<double> Fs_;
  int panels_per_decade_ = 128;
};

}  // namespace rvode
