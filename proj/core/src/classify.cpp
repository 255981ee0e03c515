#include "rvode/classify.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rvode/numerics.hpp"

namespace rvode {

std::string to_string(LimitClass c) {
  switch (c) {
    case LimitClass::MinusOne: return "-1";
    case LimitClass::Zero: return "0";
    case LimitClass::PlusOne: return "+1";
    case LimitClass::OtherFinite: return "other-finite";
    case LimitClass::NoLimit: return "no-limit";
    case LimitClass::Inconclusive: return "inconclusive";
  }
  return "?";
}

LimitClassification classify(std::span<const double> t, std::span<const double> v,
                             const ClassifierTolerances& tol) {
  if (t.size() != v.size()) throw std::invalid_argument("classify: length mismatch");
  LimitClassification out;
  if (t.empty()) return out;

  const double t_max = t.back();
  // decade windows D_j = (t_max 10^-(j+1), t_max 10^-j]
  std::vector<RunningStat> decades(static_cast<std::size_t>(tol.min_decades));
  // online covariance for the final-window regression against log10 t
  double sxx = 0.0, sxy = 0.0, mx = 0.0, my = 0.0;
  long n0 = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0)) continue;
    const double ratio = t_max / t[i];
    if (ratio < 1.0) continue;
    const int j = static_cast<int>(std::floor(std::log10(ratio) + 1e-12));
    if (j >= 0 && j < tol.min_decades) decades[static_cast<std::size_t>(j)].add(v[i]);
    if (j == 0) {
      ++n0;
      const double x = std::log10(t[i]);
      const double dx = x - mx;
      mx += dx / n0;
      sxx += dx * (x - mx);
      my += (v[i] - my) / n0;
      sxy += dx * (v[i] - my);
    }
  }

  // need the whole window to sit past t = 1 with enough samples
  if (t_max < std::pow(10.0, tol.min_decades)) return out;
  for (const auto& d : decades)
    if (d.n < tol.min_points_per_decade) return out;

  out.window_mean = decades[0].mean;
  out.window_std = decades[0].stddev();
  // drift: least-squares trend of the final window in decades of t. Healed
  // transients in the older decades qualify the window without disqualifying
  // a series that has since settled; a series still in transit shows the
  // slope right here.
  out.drift = sxx > 0.0 ? std::fabs(sxy / sxx) : 0.0;

  const bool stable = out.window_std < tol.tol_std && out.drift < tol.tol_drift;
  if (!stable) {
    out.cls = LimitClass::NoLimit;
    return out;
  }

  double best = kInf;
  double best_c = 0.0;
  for (double c : {-1.0, 0.0, 1.0}) {
    const double d = std::fabs(out.window_mean - c);
    if (d < best) {
      best = d;
      best_c = c;
    }
  }
  if (best <= tol.tol_mean) {
    out.lambda_hat = best_c;
    out.cls = best_c < -0.5   ? LimitClass::MinusOne
              : best_c > 0.5 ? LimitClass::PlusOne
                             : LimitClass::Zero;
  } else {
    out.lambda_hat = out.window_mean;
    out.cls = LimitClass::OtherFinite;
  }
  return out;
}

}  // namespace rvode
