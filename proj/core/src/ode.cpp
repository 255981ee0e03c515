#include "rvode/ode.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "rvode/numerics.hpp"

namespace rvode {

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

using Rhs = std::function<double(double, double)>;
using MaxStep = std::function<double(double)>;

std::vector<double> checkpoint_times(double T, const StepPolicy& p) {
  std::vector<double> ts;
  ts.push_back(0.0);
  if (T <= 0.0) return ts;
  double t0 = std::min(p.checkpoint_start, T);
  const double ratio = std::pow(10.0, 1.0 / p.checkpoints_per_decade);
  for (double t = t0; t < T * (1.0 - 1e-12); t *= ratio) ts.push_back(t);
  ts.push_back(T);
  return ts;
}

/**
 * One adaptive integration pass writing values at the checkpoint times.
 * Error control is per unit step; steps land exactly on checkpoints.
 */
void integrate_adaptive(const Rhs& rhs, const MaxStep& max_step, double xi,
                        const std::vector<double>& checkpoints, const StepPolicy& p,
                        Trajectory& out) {
  double t = checkpoints.front();
  double x = xi;
  out.t.push_back(t);
  out.x.push_back(x);

  double h = std::min(p.h_init, p.h_max);
  double k1 = rhs(t, x);

  for (std::size_t ci = 1; ci < checkpoints.size(); ++ci) {
    const double tc = checkpoints[ci];
    while (t < tc) {
      h = std::min({h, p.h_max, max_step(t)});
      bool clipped = false;
      if (t + h >= tc) {
        h = tc - t;
        clipped = true;
      }
      const double h_floor = 1e-14 * std::max(1.0, std::fabs(t));
      if (h < h_floor)
        throw IntegrationError("step size underflow (stiffness?)", t);

      const double k2 = rhs(t + C2 * h, x + h * (A21 * k1));
      const double k3 = rhs(t + C3 * h, x + h * (A31 * k1 + A32 * k2));
      const double k4 = rhs(t + C4 * h, x + h * (A41 * k1 + A42 * k2 + A43 * k3));
      const double k5 = rhs(t + C5 * h, x + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
      const double k6 =
          rhs(t + h, x + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
      const double x5 = x + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
      const double k7 = rhs(t + h, x5);
      const double err =
          std::fabs(h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7));

      const double scale = p.atol + p.rtol * std::max(std::fabs(x), std::fabs(x5));
      // the error estimate cannot resolve below the forcing's argument
      // quantization (|dk/dt| ulp(t)); without this floor, steep narrow
      // forcings drive the step size into the ground chasing noise
      const double err_floor = 0.5 * std::fabs(k7 - k1) *
                               (std::numeric_limits<double>::epsilon() * std::fabs(t));
      const double tol = h * scale + err_floor;  // per unit step
      if (err <= tol || h <= h_floor * 2.0) {
        t += h;
        x = x5;
        k1 = k7;  // FSAL
        ++out.steps;
        double grow = (err > 0.0) ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
        grow = std::clamp(grow, 0.2, 5.0);
        h = (clipped ? p.h_max : h) * grow;
      } else {
        ++out.rejected;
        h *= std::max(0.2, 0.9 * std::pow(tol / err, 0.2));
      }
    }
    out.t.push_back(tc);
    out.x.push_back(x);
    t = tc;
  }
}

// Step cap that lands on spike starts and resolves (or decides to skip)
// each spike; impulse handling for spikes far narrower than a step.
struct SpikeWalker {
  const SpikedData* d;

  static double resolve_floor(double t) { return std::max(1e-7, 1e-11 * std::max(t, 1.0)); }

  bool inside_spike(double t, int& j) const {
    const int n = static_cast<int>(std::floor(t));
    if (n < 0 || n > d->max_spike()) return false;
    j = n;
    return (t - n) < d->w[static_cast<std::size_t>(n)];
  }

  double max_step(double t) const {
    int j;
    if (inside_spike(t, j)) {
      const double wj = d->w[static_cast<std::size_t>(j)];
      if (wj < resolve_floor(t)) return kInf;  // handled as an impulse
      return std::max(wj / 8.0, 1e-14);
    }
    // approaching the next spike: allow stepping just across its seam (the
    // construction is C1 there) but never over the whole bump
    const int next = static_cast<int>(std::floor(t)) + 1;
    if (next > d->max_spike()) return kInf;
    const double wn = d->w[static_cast<std::size_t>(next)];
    if (wn < resolve_floor(next)) return kInf;  // impulse spike
    return (next - t) + wn / 8.0;
  }
};

}  // namespace

Trajectory integrate_ode(const NonlinearityModel& model, const Perturbation& g, double xi,
                         double T, const StepPolicy& policy) {
  if (!(T > 0.0)) throw std::invalid_argument("integrate_ode: T must be positive");
  if (T > g.horizon() * (1.0 + 1e-12))
    throw std::invalid_argument("integrate_ode: horizon shorter than T");

  Trajectory out;
  out.xi = xi;
  out.horizon = T;
  out.policy = policy;
  const auto checkpoints = checkpoint_times(T, policy);

  if (g.kind() == Perturbation::Kind::Oscillating) {
    // Direct integration resolves each sin period with ~osc_steps_per_period
    // steps; past the period budget that becomes infeasible, so the run
    // switches to the internally perturbed variable z = x + int_t^inf g,
    // whose forcing has a vanishing envelope, and reports x = z - tail.
    const auto* osc = g.oscillating_data();
    const double budget_phase = 2.0 * kPi * policy.osc_period_budget;
    double t_sw = T;
    if (osc->phase(T) > budget_phase) {
      t_sw = osc->gamma.integral_inverse(std::pow(budget_phase, 1.0 / osc->n));
      t_sw = std::max(t_sw, 1.0);
    }

    std::vector<double> head, tail_ckpts;
    for (double tc : checkpoints) (tc <= t_sw ? head : tail_ckpts).push_back(tc);
    if (head.back() < t_sw) head.push_back(t_sw);

    auto rhs = [&](double t, double x) { return -model.eval(x) + g.eval(t); };
    auto cap = [&](double t) {
      const double f = osc->frequency(t);
      return f > 0.0 ? 2.0 * kPi / (f * policy.osc_steps_per_period) : kInf;
    };
    integrate_adaptive(rhs, cap, xi, head, policy, out);

    if (!tail_ckpts.empty()) {
      out.internal_handoff = true;
      out.t_switch = t_sw;
      double z = out.x.back() + g.tail_integral(t_sw);
      Trajectory cont;
      cont.policy = policy;
      std::vector<double> zs{t_sw};
      zs.insert(zs.end(), tail_ckpts.begin(), tail_ckpts.end());
      auto rhs_z = [&](double, double v) { return -model.eval(v); };
      integrate_adaptive(rhs_z, [](double) { return kInf; }, z, zs, policy, cont);
      out.steps += cont.steps;
      out.rejected += cont.rejected;
      for (std::size_t i = 1; i < cont.t.size(); ++i) {
        out.t.push_back(cont.t[i]);
        out.x.push_back(cont.x[i] - g.tail_integral(cont.t[i]));
      }
    }
    return out;
  }

  if (g.kind() == Perturbation::Kind::Spiked) {
    const auto* sd = g.spiked_data();
    SpikeWalker walker{sd};
    // Spikes narrower than the resolvable width act as impulses: their
    // integral is applied at the spike start and the forcing evaluates as
    // the base inside. Each skipped bump carries O(w_n Gamma+) mass, summable
    // and far below the diagnostics tolerances.
    auto rhs = [&](double t, double x) {
      int j;
      if (walker.inside_spike(t, j) &&
          sd->w[static_cast<std::size_t>(j)] < SpikeWalker::resolve_floor(t))
        return -model.eval(x) + sd->base(t);
      return -model.eval(x) + g.eval(t);
    };

    // integrate piecewise, injecting impulses at unresolvable spike starts
    double t = 0.0;
    double x = xi;
    out.t.push_back(0.0);
    out.x.push_back(xi);
    std::size_t ci = 1;
    int j_scan = 0;  // first spike index not yet processed (w_j can round
                     // below ulp(t), so the walk is indexed, not time-based)
    while (ci < checkpoints.size()) {
      // next impulse start after t
      j_scan = std::max(j_scan, static_cast<int>(std::floor(t)));
      double t_imp = kInf;
      int j_imp = -1;
      for (int j = j_scan; j <= sd->max_spike(); ++j) {
        const double wj = sd->w[static_cast<std::size_t>(j)];
        if (static_cast<double>(j) >= t && wj < SpikeWalker::resolve_floor(j)) {
          t_imp = j;
          j_imp = j;
          break;
        }
      }
      // integrate up to the sooner of (remaining checkpoints, impulse)
      std::vector<double> seg{t};
      while (ci < checkpoints.size() && checkpoints[ci] <= t_imp) seg.push_back(checkpoints[ci++]);
      const bool do_impulse = j_imp >= 0 && t_imp <= checkpoints.back();
      // land on the impulse; that extra grid point is not a checkpoint
      const bool imp_is_extra = do_impulse && (seg.size() == 1 || seg.back() < t_imp);
      if (imp_is_extra) seg.push_back(t_imp);
      if (seg.size() > 1) {
        Trajectory part;
        part.policy = policy;
        integrate_adaptive(rhs, [&](double s) { return walker.max_step(s); }, x, seg, policy,
                           part);
        out.steps += part.steps;
        out.rejected += part.rejected;
        for (std::size_t i = 1; i < part.t.size(); ++i) {
          if (imp_is_extra && i + 1 == part.t.size()) break;
          out.t.push_back(part.t[i]);
          out.x.push_back(part.x[i]);
        }
        x = part.x.back();
        t = part.t.back();
      }
      if (do_impulse) {
        const double wj = sd->w[static_cast<std::size_t>(j_imp)];
        x += sd->spike_integral[static_cast<std::size_t>(j_imp)];
        x += (-model.eval(x) + sd->base(t_imp)) * wj;
        t = t_imp + wj;  // may equal t_imp when wj rounds below ulp
        j_scan = j_imp + 1;
        if (ci < checkpoints.size() && checkpoints[ci] <= t) {
          out.t.push_back(checkpoints[ci]);
          out.x.push_back(x);
          ++ci;
        }
      } else if (ci >= checkpoints.size()) {
        break;
      }
    }
    return out;
  }

  auto rhs = [&](double t, double x) { return -model.eval(x) + g.eval(t); };
  integrate_adaptive(rhs, [](double) { return kInf; }, xi, checkpoints, policy, out);
  return out;
}

Trajectory integrate_internal(const NonlinearityModel& model, const Perturbation& gamma,
                              double xi, double T, const StepPolicy& policy) {
  if (!(T > 0.0)) throw std::invalid_argument("integrate_internal: T must be positive");
  if (T > gamma.horizon() * (1.0 + 1e-12))
    throw std::invalid_argument("integrate_internal: horizon shorter than T");
  Trajectory out;
  out.xi = xi;
  out.horizon = T;
  out.policy = policy;
  auto rhs = [&](double t, double z) { return -model.eval(z + gamma.eval(t)); };
  integrate_adaptive(rhs, [](double) { return kInf; }, xi, checkpoint_times(T, policy), policy,
                     out);
  return out;
}

RateDiagnostics diagnostics(const Trajectory& traj, DecayScale& scale, const Perturbation& g) {
  RateDiagnostics out;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const double t = traj.t[i];
    if (t < 1.0) continue;
    const double finv = scale.F_inv(t);
    const double ffinv = scale.f_F_inv(t);
    out.t.push_back(t);
    out.r.push_back(traj.x[i] / finv);
    out.d.push_back((-scale.model().eval(traj.x[i]) + g.eval(t)) / ffinv);
  }
  if (out.t.empty()) return out;

  const double t_max = out.t.back();
  const int n_dec = static_cast<int>(std::floor(std::log10(t_max))) + 1;
  std::vector<RunningStat> rs(static_cast<std::size_t>(n_dec)), ds(rs.size());
  for (std::size_t i = 0; i < out.t.size(); ++i) {
    const int j = static_cast<int>(std::floor(std::log10(t_max / out.t[i]) + 1e-12));
    if (j < 0 || j >= n_dec) continue;
    rs[static_cast<std::size_t>(j)].add(out.r[i]);
    ds[static_cast<std::size_t>(j)].add(out.d[i]);
  }
  for (int j = n_dec - 1; j >= 0; --j) {
    const auto& a = rs[static_cast<std::size_t>(j)];
    const auto& b = ds[static_cast<std::size_t>(j)];
    if (a.n == 0) continue;
    out.decades.push_back({t_max * std::pow(10.0, -j - 1), t_max * std::pow(10.0, -j),
                           a.mean, a.stddev(), b.mean, b.stddev()});
  }
  return out;
}

}  // namespace rvode
