#include "rvode/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rvode {

namespace {
constexpr double kTwoPi = 2.0 * kPi;
}

// ---------------------------------------------------------------------------
// GammaSpec
// ---------------------------------------------------------------------------

GammaSpec GammaSpec::table(std::vector<double> ts, std::vector<double> vs) {
  if (ts.size() != vs.size() || ts.size() < 2)
    throw std::invalid_argument("GammaSpec::table: need two columns of equal length >= 2");
  GammaSpec g(Kind::Table);
  g.ts_ = std::move(ts);
  g.vs_ = std::move(vs);
  g.cum_.assign(g.ts_.size(), 0.0);
  for (std::size_t i = 1; i < g.ts_.size(); ++i) {
    if (!(g.ts_[i] > g.ts_[i - 1]))
      throw std::invalid_argument("GammaSpec::table: t column must be strictly increasing");
    if (g.vs_[i] < g.vs_[i - 1])
      throw std::invalid_argument("GammaSpec::table: values must be nondecreasing");
    g.cum_[i] = g.cum_[i - 1] + 0.5 * (g.vs_[i] + g.vs_[i - 1]) * (g.ts_[i] - g.ts_[i - 1]);
  }
  return g;
}

GammaSpec GammaSpec::from_name(const std::string& name) {
  if (name == "t") return t();
  if (name == "1+t") return one_plus_t();
  if (name == "t^2") return t_squared();
  if (name == "e^t") return exp_t();
  throw std::invalid_argument("GammaSpec: unknown growth function '" + name + "'");
}

std::string GammaSpec::name() const {
  switch (kind_) {
    case Kind::T: return "t";
    case Kind::OnePlusT: return "1+t";
    case Kind::TSquared: return "t^2";
    case Kind::ExpT: return "e^t";
    case Kind::Table: return "table";
  }
  return "?";
}

double GammaSpec::value(double t) const {
  switch (kind_) {
    case Kind::T: return t;
    case Kind::OnePlusT: return 1.0 + t;
    case Kind::TSquared: return t * t;
    case Kind::ExpT: return std::exp(t);
    case Kind::Table: break;
  }
  if (t <= ts_.front()) return vs_.front();
  if (t >= ts_.back()) return vs_.back();
  auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - ts_.begin());
  const double w = (t - ts_[i - 1]) / (ts_[i] - ts_[i - 1]);
  return vs_[i - 1] + w * (vs_[i] - vs_[i - 1]);
}

double GammaSpec::deriv(double t) const {
  switch (kind_) {
    case Kind::T: return 1.0;
    case Kind::OnePlusT: return 1.0;
    case Kind::TSquared: return 2.0 * t;
    case Kind::ExpT: return std::exp(t);
    case Kind::Table: break;
  }
  if (t <= ts_.front() || t >= ts_.back()) return 0.0;
  auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - ts_.begin());
  return (vs_[i] - vs_[i - 1]) / (ts_[i] - ts_[i - 1]);
}

double GammaSpec::integral(double t) const {
  switch (kind_) {
    case Kind::T: return 0.5 * t * t;
    case Kind::OnePlusT: return t + 0.5 * t * t;
    case Kind::TSquared: return t * t * t / 3.0;
    case Kind::ExpT: return std::expm1(t);
    case Kind::Table: break;
  }
  if (t <= ts_.front()) return vs_.front() * (t - ts_.front()) + 0.0;
  if (t >= ts_.back()) return cum_.back() + vs_.back() * (t - ts_.back());
  auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - ts_.begin());
  const double v = value(t);
  return cum_[i - 1] + 0.5 * (v + vs_[i - 1]) * (t - ts_[i - 1]);
}

double GammaSpec::integral_inverse(double I) const {
  switch (kind_) {
    case Kind::T: return std::sqrt(2.0 * I);
    case Kind::OnePlusT: return -1.0 + std::sqrt(1.0 + 2.0 * I);
    case Kind::TSquared: return std::cbrt(3.0 * I);
    case Kind::ExpT: return std::log1p(I);
    case Kind::Table: break;
  }
  double hi = ts_.back();
  while (integral(hi) < I) hi *= 2.0;
  return bisect([this, I](double t) { return integral(t) - I; }, 0.0, hi);
}

// ---------------------------------------------------------------------------
// Spike construction
// ---------------------------------------------------------------------------

double spike_bump_shape(double x, double a) {
  if (x <= 0.0 || x >= 2.0 * a) return 0.0;
  if (x > a) x = 2.0 * a - x;
  const double u = (x - a) / a;  // in [-1, 0]
  return 1.0 - 3.0 * u * u - 2.0 * u * u * u;
}

double spike_bump_shape_deriv(double x, double a) {
  if (x <= 0.0 || x >= 2.0 * a) return 0.0;
  double sign = 1.0;
  if (x > a) {
    x = 2.0 * a - x;
    sign = -1.0;
  }
  const double u = (x - a) / a;
  return sign * (-6.0 * u - 6.0 * u * u) / a;
}

double spike_bump(double x, double a, double b) { return b * spike_bump_shape(x, a); }

SpikedData build_spiked(double base_c, double base_p, GammaSpec gamma, double horizon) {
  if (!(base_c > 0.0) || !(base_p > 1.0))
    throw std::invalid_argument("build_spiked: base must be positive with integrable tail");
  if (!(horizon > 0.0) || horizon > 2e5)
    throw std::invalid_argument("build_spiked: horizon must lie in (0, 2e5]");

  SpikedData d{base_c, base_p, std::move(gamma), 0.0, {}, {}, {}};

  // sup of the base by golden-section plus endpoints; the built-in bases are
  // decreasing, so this lands on k_s(0)
  {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0, hi = horizon;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    for (int i = 0; i < 200 && (hi - lo) > 1e-10 * std::max(1.0, hi); ++i) {
      if (d.base(x1) < d.base(x2)) {
        lo = x1; x1 = x2; x2 = lo + gr * (hi - lo);
      } else {
        hi = x2; x2 = x1; x1 = hi - gr * (hi - lo);
      }
    }
    d.sup_base = std::max({d.base(0.0), d.base(0.5 * (lo + hi)), d.base(horizon)});
  }

  const int n_spikes = static_cast<int>(std::ceil(horizon)) + 2;
  d.w.resize(n_spikes);
  d.spike_integral.resize(n_spikes);
  d.spike_suffix.resize(n_spikes + 1, 0.0);

  for (int j = 0; j < n_spikes; ++j) {
    const double piece = d.base_tail(j + 1.0) - d.base_tail(j + 2.0);
    // the (j+1) factor makes w_j Gamma+(j+1) = piece/(j+1) -> 0, which is
    // what drives the tail-ratio limit to 1
    d.w[j] = std::min(0.5, piece / ((j + 1.0) * d.gamma_plus(j + 1.0)));

    const double a = 0.5 * d.w[j];
    const double t0 = j, tp = j + a, t1 = j + d.w[j];
    auto bump = [&](double t) {
      return spike_bump_shape(t - t0, a) * (d.gamma_plus(t) - d.base(t));
    };
    d.spike_integral[j] = gauss16(bump, t0, tp) + gauss16(bump, tp, t1);
  }
  for (int j = n_spikes - 1; j >= 0; --j)
    d.spike_suffix[j] = d.spike_suffix[j + 1] + d.spike_integral[j];
  return d;
}

double SpikedData::base(double t) const { return base_c * std::pow(1.0 + t, -base_p); }

double SpikedData::base_deriv(double t) const {
  return -base_c * base_p * std::pow(1.0 + t, -base_p - 1.0);
}

double SpikedData::base_tail(double t) const {
  return base_c * std::pow(1.0 + t, 1.0 - base_p) / (base_p - 1.0);
}

double SpikedData::eval(double t) const {
  if (t < 0.0) throw std::domain_error("SpikedData::eval: t must be nonnegative");
  const double n = std::floor(t);
  const std::size_t j = static_cast<std::size_t>(n);
  if (j >= w.size()) return base(t);
  const double x = t - n;
  if (x < w[j]) return base(t) + spike_bump_shape(x, 0.5 * w[j]) * (gamma_plus(t) - base(t));
  return base(t);
}

double SpikedData::deriv(double t) const {
  const double n = std::floor(t);
  const std::size_t j = static_cast<std::size_t>(n);
  if (j >= w.size()) return base_deriv(t);
  const double x = t - n;
  if (x < w[j]) {
    const double a = 0.5 * w[j];
    return base_deriv(t) + (gamma_plus(t) - base(t)) * spike_bump_shape_deriv(x, a) +
           spike_bump_shape(x, a) * (gamma_plus_deriv(t) - base_deriv(t));
  }
  return base_deriv(t);
}

SpikedData::OneSided SpikedData::deriv_at_seam(double t) const {
  const double n = std::floor(t + 0.25);  // seams land at n or n + w_n
  const std::size_t j = static_cast<std::size_t>(n);
  const double a = 0.5 * w[j];
  auto spike_branch = [&](double x) {
    return base_deriv(t) + (gamma_plus(t) - base(t)) * spike_bump_shape_deriv(x, a) +
           spike_bump_shape(x, a) * (gamma_plus_deriv(t) - base_deriv(t));
  };
  if (std::fabs(t - n) < std::fabs(t - (n + w[j])))
    return {base_deriv(t), spike_branch(0.0)};  // seam at spike start
  return {spike_branch(w[j]), base_deriv(t)};   // seam at spike end
}

double SpikedData::tail(double t) const {
  if (t < 0.0) throw std::domain_error("SpikedData::tail: t must be nonnegative");
  double acc = base_tail(t);
  const double n = std::floor(t);
  const std::size_t j = static_cast<std::size_t>(n);
  if (j >= w.size()) return acc;  // construction truncated; base only
  const double x = t - n;
  if (x < w[j]) {
    const double a = 0.5 * w[j];
    const double t1 = n + w[j];
    auto bump = [&](double s) {
      return spike_bump_shape(s - n, a) * (gamma_plus(s) - base(s));
    };
    const double tp = n + a;
    if (t < tp)
      acc += gauss16(bump, t, tp) + gauss16(bump, tp, t1);
    else
      acc += gauss16(bump, t, t1);
  }
  acc += spike_suffix[j + 1];
  return acc;
}

// ---------------------------------------------------------------------------
// Oscillating construction: g = Gamma(t) sin(I(t)^n)
// ---------------------------------------------------------------------------

namespace {

struct OscKernel {
  // k(u) = u^(-(1-1/n))/n, the substituted integrand envelope
  int n;
  double k(double u) const { return std::pow(u, -(1.0 - 1.0 / n)) / n; }
  double kp(double u) const {
    return -(1.0 - 1.0 / n) * std::pow(u, -(2.0 - 1.0 / n)) / n;
  }
  double kpp(double u) const {
    return (1.0 - 1.0 / n) * (2.0 - 1.0 / n) * std::pow(u, -(3.0 - 1.0 / n)) / n;
  }
  // integration by parts twice: int_V^inf k sin = k cos - k' sin - k'' cos + O(k'')
  double expansion(double V) const {
    return k(V) * std::cos(V) - kp(V) * std::sin(V) - kpp(V) * std::cos(V);
  }
};

}  // namespace

double OscillatingData::phase(double t) const {
  return std::pow(gamma.integral(t), static_cast<double>(n));
}

double OscillatingData::frequency(double t) const {
  const double I = gamma.integral(t);
  return n * std::pow(I, n - 1.0) * gamma.value(t);
}

double OscillatingData::eval(double t) const { return gamma.value(t) * std::sin(phase(t)); }

double OscillatingData::tail_envelope(double t) const {
  const double v = phase(t);
  if (v <= 0.0) return kInf;
  return OscKernel{n}.k(v);
}

double OscillatingData::tail(double t) const {
  const OscKernel ker{n};
  const double v = phase(t);
  if (v > 1e10) return ker.expansion(v);  // phase beyond numeric head range

  double acc = 0.0;
  double u0 = v;
  if (v < kTwoPi) {
    // head in w = u^(1/n) coordinates, where the integrand is sin(w^n):
    // smooth through u = 0
    const double w1 = std::pow(v, 1.0 / n), w2 = std::pow(kTwoPi, 1.0 / n);
    auto f = [this](double w) { return std::sin(std::pow(w, static_cast<double>(n))); };
    const int panels = 4;
    for (int i = 0; i < panels; ++i)
      acc += gauss16(f, w1 + (w2 - w1) * i / panels, w1 + (w2 - w1) * (i + 1) / panels);
    u0 = kTwoPi;
  } else {
    const double Vc = kTwoPi * std::ceil(v / kTwoPi);
    if (Vc > v) {
      auto f = [&](double u) { return ker.k(u) * std::sin(u); };
      // split partial period at multiples of pi
      double a = v;
      double b = kPi * std::floor(v / kPi + 1.0);
      while (b < Vc) {
        acc += gauss16(f, a, b);
        a = b;
        b += kPi;
      }
      acc += gauss16(f, a, Vc);
    }
    u0 = Vc;
  }

  auto f = [&](double u) { return ker.k(u) * std::sin(u); };
  double V = u0;
  for (int j = 0; j < 1200 && ker.kpp(V) > 1e-13; ++j) {
    acc += gauss16(f, V, V + kPi) + gauss16(f, V + kPi, V + kTwoPi);
    V += kTwoPi;
  }
  return acc + ker.expansion(V);
}

double OscillatingData::abs_integral(double T) const {
  const OscKernel ker{n};
  const double V = phase(T);
  auto f = [&](double u) { return ker.k(u) * std::fabs(std::sin(u)); };

  double acc = 0.0;
  // first period in w coordinates (integrand |sin(w^n)|, kink at w = pi^(1/n))
  {
    const double wmid = std::pow(kPi, 1.0 / n), wend = std::pow(std::min(V, kTwoPi), 1.0 / n);
    auto fw = [this](double w) {
      return std::fabs(std::sin(std::pow(w, static_cast<double>(n))));
    };
    if (wend <= wmid) return gauss16(fw, 0.0, wend);
    acc += gauss16(fw, 0.0, wmid) + gauss16(fw, wmid, wend);
    if (V <= kTwoPi) return acc;
  }

  const long total_periods = static_cast<long>(std::floor(V / kTwoPi));
  const long cap = 20000;
  const long m = std::min(total_periods, cap);
  double u = kTwoPi;
  for (long j = 1; j < m; ++j) {
    acc += gauss16(f, u, u + kPi) + gauss16(f, u + kPi, u + kTwoPi);
    u += kTwoPi;
  }
  if (total_periods > cap) {
    // |sin| averages 2/pi and int k du = u^(1/n) exactly
    const double Vc = kTwoPi * cap;
    acc += (2.0 / kPi) * (std::pow(V, 1.0 / n) - std::pow(Vc, 1.0 / n));
    // plus the fractional period at the far end, folded into the average
  } else {
    const double Vc = kTwoPi * m;
    double a = Vc;
    double b = kPi * std::floor(Vc / kPi + 1.0);
    while (b < V) {
      acc += gauss16(f, a, b);
      a = b;
      b += kPi;
    }
    acc += gauss16(f, a, V);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Perturbation
// ---------------------------------------------------------------------------

Perturbation Perturbation::zero() { return Perturbation(); }

Perturbation Perturbation::power_decay(double c, double p) {
  Perturbation g;
  g.kind_ = Kind::PowerDecay;
  g.c_ = c;
  g.p_ = p;
  return g;
}

Perturbation Perturbation::scaled_derivative_rate(double c, std::shared_ptr<DecayScale> scale) {
  if (!scale) throw std::invalid_argument("scaled_derivative_rate: scale required");
  Perturbation g;
  g.kind_ = Kind::ScaledDerivativeRate;
  g.c_ = c;
  g.scale_ = std::move(scale);
  return g;
}

Perturbation Perturbation::zero_limit_synthetic(double xi, NonlinearityModel model) {
  Perturbation g;
  g.kind_ = Kind::ZeroLimitSynthetic;
  g.xi_ = xi;
  g.model_ = std::move(model);
  return g;
}

Perturbation Perturbation::oscillating(GammaSpec gamma, int n) {
  if (n < 2) throw std::invalid_argument("oscillating: n must be at least 2");
  Perturbation g;
  g.kind_ = Kind::Oscillating;
  g.osc_ = std::make_shared<OscillatingData>(OscillatingData{std::move(gamma), n});
  return g;
}

Perturbation Perturbation::spiked(double base_c, double base_p, GammaSpec gamma,
                                  double horizon) {
  Perturbation g;
  g.kind_ = Kind::Spiked;
  g.spiked_ = std::make_shared<SpikedData>(build_spiked(base_c, base_p, std::move(gamma), horizon));
  g.horizon_ = horizon;
  return g;
}

Perturbation Perturbation::sampled(std::vector<double> ts, std::vector<double> vs) {
  if (ts.size() != vs.size() || ts.size() < 2)
    throw std::invalid_argument("Perturbation::sampled: need two columns of equal length >= 2");
  auto tab = std::make_shared<std::vector<std::pair<double, double>>>();
  tab->reserve(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i > 0 && !(ts[i] > ts[i - 1]))
      throw std::invalid_argument("Perturbation::sampled: t column must be strictly increasing");
    tab->emplace_back(ts[i], vs[i]);
  }
  Perturbation g;
  g.kind_ = Kind::Sampled;
  g.table_ = std::move(tab);
  g.horizon_ = g.table_->back().first;
  return g;
}

std::string Perturbation::kind_name() const {
  switch (kind_) {
    case Kind::Zero: return "zero";
    case Kind::PowerDecay: return "power-decay";
    case Kind::ScaledDerivativeRate: return "scaled-derivative-rate";
    case Kind::ZeroLimitSynthetic: return "zero-limit-synthetic";
    case Kind::Oscillating: return "oscillating";
    case Kind::Spiked: return "spiked";
    case Kind::Sampled: return "sampled";
  }
  return "?";
}

double Perturbation::eval(double t) const {
  if (!(t >= 0.0) || t > horizon_ * (1.0 + 1e-12))
    throw std::domain_error("Perturbation::eval: t outside [0, horizon]");
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::PowerDecay:
      return c_ * std::pow(1.0 + t, -p_);
    case Kind::ScaledDerivativeRate:
      return c_ * scale_->f_F_inv(t);
    case Kind::ZeroLimitSynthetic: {
      const double d = std::exp(-t * t);
      return xi_ * (-2.0 * t * d) + model_->eval(xi_ * d);
    }
    case Kind::Oscillating:
      return osc_->eval(t);
    case Kind::Spiked:
      return spiked_->eval(t);
    case Kind::Sampled: {
      const auto& tab = *table_;
      if (t <= tab.front().first) return tab.front().second;
      auto it = std::upper_bound(tab.begin(), tab.end(), t,
                                 [](double x, const auto& q) { return x < q.first; });
      if (it == tab.end()) return tab.back().second;
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double wgt = (t - lo.first) / (hi.first - lo.first);
      return lo.second + wgt * (hi.second - lo.second);
    }
  }
  return 0.0;
}

double Perturbation::operator()(double t) const { return eval(t); }

bool Perturbation::has_tail_integral() const {
  switch (kind_) {
    case Kind::Zero: return true;
    case Kind::PowerDecay: return c_ == 0.0 || p_ > 1.0;
    case Kind::ScaledDerivativeRate: return true;
    case Kind::ZeroLimitSynthetic: return true;
    case Kind::Oscillating: return true;
    case Kind::Spiked: return true;
    case Kind::Sampled: return false;
  }
  return false;
}

double Perturbation::tail_integral(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("tail_integral: t must be nonnegative");
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::PowerDecay:
      if (c_ == 0.0) return 0.0;
      if (!(p_ > 1.0)) throw std::domain_error("tail_integral: tail undefined (p <= 1)");
      return c_ * std::pow(1.0 + t, 1.0 - p_) / (p_ - 1.0);
    case Kind::ScaledDerivativeRate:
      return c_ * scale_->F_inv(t);  // int f(F_inv) = F_inv
    case Kind::ZeroLimitSynthetic: {
      double acc = -xi_ * std::exp(-t * t);
      const double cut = 27.5;  // exp(-t^2) underflows past here
      if (t < cut) {
        acc += adaptive_simpson(
            [this](double s) { return model_->eval(xi_ * std::exp(-s * s)); }, t, cut, 1e-14);
      }
      return acc;
    }
    case Kind::Oscillating:
      return osc_->tail(t);
    case Kind::Spiked:
      return spiked_->tail(t);
    case Kind::Sampled:
      throw std::domain_error("tail_integral: tail undefined for sampled tables");
  }
  return 0.0;
}

double Perturbation::sup_abs_on(double a, double b) const {
  if (!(b >= a)) throw std::invalid_argument("sup_abs_on: need a <= b");
  a = std::max(a, 0.0);
  b = std::min(b, horizon_);
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::PowerDecay:
      return std::fabs(c_) * std::max(std::pow(1.0 + a, -p_), std::pow(1.0 + b, -p_));
    case Kind::ScaledDerivativeRate:
      return std::fabs(c_) * scale_->f_F_inv(a);
    case Kind::ZeroLimitSynthetic: {
      double m = std::max(std::fabs(eval(a)), std::fabs(eval(b)));
      for (int i = 1; i < 32; ++i)
        m = std::max(m, std::fabs(eval(a + (b - a) * i / 32.0)));
      return m;
    }
    case Kind::Oscillating:
      return osc_->gamma.value(b);  // envelope
    case Kind::Spiked: {
      double m = std::max(spiked_->base(a), std::fabs(eval(a)));
      const int lo = static_cast<int>(std::ceil(a - 1.0));
      const int hi = std::min(static_cast<int>(std::floor(b)), spiked_->max_spike());
      for (int j = std::max(lo, 0); j <= hi; ++j) {
        const double pt = spiked_->peak_time(j);
        if (pt >= a && pt <= b) m = std::max(m, spiked_->gamma_plus(pt));
      }
      return m;
    }
    case Kind::Sampled: {
      double m = std::max(std::fabs(eval(a)), std::fabs(eval(b)));
      for (const auto& q : *table_)
        if (q.first >= a && q.first <= b) m = std::max(m, std::fabs(q.second));
      return m;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// NoiseIntensity
// ---------------------------------------------------------------------------

NoiseIntensity NoiseIntensity::power_decay(double c, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("NoiseIntensity: gamma must be nonnegative");
  NoiseIntensity s;
  s.kind_ = Kind::PowerDecay;
  s.c_ = c;
  s.gamma_ = gamma;
  return s;
}

NoiseIntensity NoiseIntensity::spiked_square(double base_c, double base_p, GammaSpec gamma,
                                             double horizon) {
  NoiseIntensity s;
  s.kind_ = Kind::SpikedSquare;
  s.spiked_ = std::make_shared<SpikedData>(build_spiked(base_c, base_p, std::move(gamma), horizon));
  return s;
}

NoiseIntensity NoiseIntensity::sampled(std::vector<double> ts, std::vector<double> vs) {
  if (ts.size() != vs.size() || ts.size() < 2)
    throw std::invalid_argument("NoiseIntensity::sampled: need two columns of equal length >= 2");
  auto tab = std::make_shared<std::vector<std::pair<double, double>>>();
  NoiseIntensity s;
  s.table_cum_.assign(ts.size(), 0.0);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i > 0 && !(ts[i] > ts[i - 1]))
      throw std::invalid_argument("NoiseIntensity::sampled: t column must be strictly increasing");
    tab->emplace_back(ts[i], vs[i]);
    if (i > 0) {
      const double s2a = vs[i - 1] * vs[i - 1], s2b = vs[i] * vs[i];
      s.table_cum_[i] = s.table_cum_[i - 1] + 0.5 * (s2a + s2b) * (ts[i] - ts[i - 1]);
    }
  }
  s.kind_ = Kind::Sampled;
  s.table_ = std::move(tab);
  return s;
}

std::string NoiseIntensity::kind_name() const {
  switch (kind_) {
    case Kind::PowerDecay: return "power-decay";
    case Kind::SpikedSquare: return "spiked-square";
    case Kind::Sampled: return "sampled";
  }
  return "?";
}

double NoiseIntensity::sigma(double t) const {
  switch (kind_) {
    case Kind::PowerDecay:
      return c_ * std::pow(1.0 + t, -gamma_);
    case Kind::SpikedSquare:
      return std::sqrt(spiked_->eval(t));
    case Kind::Sampled: {
      const auto& tab = *table_;
      if (t <= tab.front().first) return tab.front().second;
      if (t >= tab.back().first) return 0.0;  // silent beyond the table
      auto it = std::upper_bound(tab.begin(), tab.end(), t,
                                 [](double x, const auto& q) { return x < q.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = (t - lo.first) / (hi.first - lo.first);
      return lo.second + w * (hi.second - lo.second);
    }
  }
  return 0.0;
}

double NoiseIntensity::sigma_sq(double t) const {
  if (kind_ == Kind::SpikedSquare) return spiked_->eval(t);
  const double s = sigma(t);
  return s * s;
}

bool NoiseIntensity::is_square_integrable() const {
  switch (kind_) {
    case Kind::PowerDecay: return c_ == 0.0 || gamma_ > 0.5;
    case Kind::SpikedSquare: return true;
    case Kind::Sampled: return true;
  }
  return false;
}

double NoiseIntensity::varsigma(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("varsigma: t must be nonnegative");
  switch (kind_) {
    case Kind::PowerDecay:
      if (!is_square_integrable())
        throw std::domain_error("varsigma: sigma not square integrable (gamma <= 1/2)");
      if (c_ == 0.0) return 0.0;
      return c_ * c_ * std::pow(1.0 + t, 1.0 - 2.0 * gamma_) / (2.0 * gamma_ - 1.0);
    case Kind::SpikedSquare:
      return spiked_->tail(t);
    case Kind::Sampled: {
      const auto& tab = *table_;
      const double total = table_cum_.back();
      if (t <= tab.front().first) return total;
      if (t >= tab.back().first) return 0.0;
      auto it = std::upper_bound(tab.begin(), tab.end(), t,
                                 [](double x, const auto& q) { return x < q.first; });
      const std::size_t i = static_cast<std::size_t>(it - tab.begin());
      const double s2a = tab[i - 1].second * tab[i - 1].second;
      const double st = sigma(t);
      const double part = table_cum_[i - 1] + 0.5 * (s2a + st * st) * (t - tab[i - 1].first);
      return total - part;
    }
  }
  return 0.0;
}

double NoiseIntensity::varsigma_inv(double tau) const {
  if (!(tau > 0.0)) throw std::domain_error("varsigma_inv: tau must be positive");
  const double v0 = varsigma(0.0);
  if (tau > v0) throw std::domain_error("varsigma_inv: tau above varsigma(0)");
  switch (kind_) {
    case Kind::PowerDecay:
      return std::pow(tau * (2.0 * gamma_ - 1.0) / (c_ * c_), -1.0 / (2.0 * gamma_ - 1.0)) - 1.0;
    case Kind::SpikedSquare:
    case Kind::Sampled: {
      double hi = 1.0;
      while (varsigma(hi) > tau) {
        hi *= 2.0;
        if (hi > 1e12) throw std::domain_error("varsigma_inv: tau below reachable range");
      }
      return bisect([this, tau](double t) { return varsigma(t) - tau; }, 0.0, hi);
    }
  }
  return 0.0;
}

}  // namespace rvode
