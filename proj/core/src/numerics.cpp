#include "rvode/numerics.hpp"

#include <stdexcept>

namespace rvode {

namespace {

// Abramowitz & Stegun 25.4.30, n = 16 (positive nodes and weights).
constexpr double kGL16Nodes[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double kGL16Weights[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double gauss16(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = h * kGL16Nodes[i];
    sum += kGL16Weights[i] * (f(c - dx) + f(c + dx));
  }
  return h * sum;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

std::vector<double> log_spaced(double a, double b, int points_per_decade) {
  if (!(a > 0.0) || !(b >= a) || points_per_decade < 1)
    throw std::invalid_argument("log_spaced: need 0 < a <= b and points_per_decade >= 1");
  std::vector<double> out;
  const double la = std::log10(a), lb = std::log10(b);
  const int n = static_cast<int>(std::ceil((lb - la) * points_per_decade));
  out.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    double t = std::pow(10.0, la + (lb - la) * i / std::max(1, n));
    out.push_back(t);
  }
  out.back() = b;
  return out;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol,
              int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect: endpoints do not bracket a root");
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0 || (hi - lo) < xtol * std::max(1.0, std::fabs(mid))) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace rvode
