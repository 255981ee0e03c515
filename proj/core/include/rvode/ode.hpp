#pragma once

#include <stdexcept>
#include <vector>

#include "rvode/decay_scale.hpp"
#include "rvode/nonlinearity.hpp"
#include "rvode/perturbation.hpp"

namespace rvode {

struct StepPolicy {
  double rtol = 1e-10;
  double atol = 1e-14;
  double h_max = 0.1;   // forcing, not the flow, sets the resolution
  double h_init = 1e-4;
  int checkpoints_per_decade = 64;
  double checkpoint_start = 0.01;
  // oscillating forcings: direct-phase resolution and hand-off budget
  int osc_steps_per_period = 16;
  double osc_period_budget = 5e4;  // sin periods resolved before the internal hand-off
};

struct IntegrationError : std::runtime_error {
  IntegrationError(const std::string& what, double t) : std::runtime_error(what), last_time(t) {}
  double last_time;
};

struct Trajectory {
  std::vector<double> t;  // checkpoint grid, t[0] = 0
  std::vector<double> x;  // x[0] = xi
  double xi = 0.0;
  double horizon = 0.0;
  StepPolicy policy;
  long steps = 0;
  long rejected = 0;
  // oscillating forcings switch to the internally-perturbed form once the
  // local sin period falls below what the step budget can resolve
  bool internal_handoff = false;
  double t_switch = 0.0;
};

// x' = -f(x) + g(t), x(0) = xi, integrated on [0, T].
Trajectory integrate_ode(const NonlinearityModel& model, const Perturbation& g, double xi,
                         double T, const StepPolicy& policy = {});

// z' = -f(z + gamma(t)), z(0) = xi (the internally perturbed form).
Trajectory integrate_internal(const NonlinearityModel& model, const Perturbation& gamma,
                              double xi, double T, const StepPolicy& policy = {});

struct RateDiagnostics {
  std::vector<double> t;  // trajectory grid restricted to t >= 1
  std::vector<double> r;  // x(t) / F_inv(t)
  std::vector<double> d;  // x'(t) / f(F_inv(t)), x' evaluated as -f(x) + g
  struct DecadeSummary {
    double t_lo, t_hi;
    double r_mean, r_std;
    double d_mean, d_std;
  };
  std::vector<DecadeSummary> decades;
};

RateDiagnostics diagnostics(const Trajectory& traj, DecayScale& scale, const Perturbation& g);

}  // namespace rvode
