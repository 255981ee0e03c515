#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace rvode {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// 16-point Gauss-Legendre rule on [a,b].
double gauss16(const std::function<double(double)>& f, double a, double b);

// Adaptive Simpson with absolute/relative tolerance. Integrand must be
// finite on [a,b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 40);

// Geometric grid from a to b inclusive, points_per_decade samples per decade.
std::vector<double> log_spaced(double a, double b, int points_per_decade);

// Bisection for a continuous monotone f on [lo,hi] with f(lo), f(hi) of
// opposite sign; returns the root to within xtol.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol = 1e-14, int max_iter = 200);

struct RunningStat {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / n : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
};

}  // namespace rvode
