#include "vwave/history.hpp"

#include <algorithm>
#include <cmath>

namespace vwave {

double phi1(double x) {
  if (std::abs(x) < 0.5) {
    // 1 - x/2 + x^2/6 - ... = sum_k (-x)^k/(k+1)!
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 16; ++k) {
      term *= -x / (k + 1);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return -std::expm1(-x) / x;
}

double phi2(double x) {
  if (std::abs(x) < 0.5) {
    // 1/2 - x/6 + x^2/24 - ... = sum_k (-x)^k/(k+2)!
    double term = 0.5, sum = 0.5;
    for (int k = 1; k <= 16; ++k) {
      term *= -x / (k + 2);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (x + std::expm1(-x)) / (x * x);
}

StrainHistory::StrainHistory(std::vector<double> times,
                             std::vector<SymTensor2> rates)
    : t_(std::move(times)), r_(std::move(rates)) {
  if (t_.empty() || t_.size() != r_.size())
    throw HistoryTooShort("history needs matching, nonempty time/rate lists");
  if (t_.front() != 0.0)
    throw HistoryTooShort("history must start at t = 0");
  for (size_t k = 1; k < t_.size(); ++k)
    if (!(t_[k] > t_[k - 1]))
      throw HistoryTooShort("history times must be strictly increasing");
}

void StrainHistory::check(double t) const {
  if (t_.empty()) throw HistoryTooShort("empty history");
  if (t > t_.back() * (1.0 + 1e-12) + 1e-300)
    throw HistoryTooShort("query time beyond recorded history");
}

SymTensor2 StrainHistory::rate(double t) const {
  check(t);
  if (t <= t_.front()) return r_.front();
  if (t >= t_.back()) return r_.back();
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  size_t k = static_cast<size_t>(it - t_.begin());
  double w = (t - t_[k - 1]) / (t_[k] - t_[k - 1]);
  return r_[k - 1] * (1.0 - w) + r_[k] * w;
}

SymTensor2 StrainHistory::strain(double t) const {
  check(t);
  SymTensor2 eps;
  for (size_t k = 1; k < t_.size() && t_[k - 1] < t; ++k) {
    double s1 = std::min(t, t_[k]);
    double dt = s1 - t_[k - 1];
    SymTensor2 r1 = rate(s1);
    eps += (r_[k - 1] + r1) * (0.5 * dt);  // trapezoid, exact for PL rate
  }
  return eps;
}

SymTensor2 StrainHistory::exp_convolve(double r, double t) const {
  check(t);
  SymTensor2 h;
  for (size_t k = 1; k < t_.size() && t_[k - 1] < t; ++k) {
    double s1 = std::min(t, t_[k]);
    double dt = s1 - t_[k - 1];
    h = exp_segment_update(h, r, dt, r_[k - 1], rate(s1));
  }
  return h;
}

SymTensor2 exp_segment_update(const SymTensor2& h, double rate, double dt,
                              const SymTensor2& r0, const SymTensor2& r1) {
  double x = rate * dt;
  double decay = std::exp(-x);
  return h * decay + r0 * (dt * phi1(x)) + (r1 - r0) * (dt * phi2(x));
}

StrainHistory operator+(const StrainHistory& a, const StrainHistory& b) {
  std::vector<double> t;
  t.reserve(a.t_.size() + b.t_.size());
  std::merge(a.t_.begin(), a.t_.end(), b.t_.begin(), b.t_.end(),
             std::back_inserter(t));
  t.erase(std::unique(t.begin(), t.end(),
                      [](double x, double y) { return std::abs(x - y) < 1e-15; }),
          t.end());
  double tmax = std::min(a.t_end(), b.t_end());
  std::vector<double> tt;
  for (double x : t)
    if (x <= tmax) tt.push_back(x);
  std::vector<SymTensor2> r;
  r.reserve(tt.size());
  for (double x : tt) r.push_back(a.rate(x) + b.rate(x));
  return StrainHistory(std::move(tt), std::move(r));
}

StrainHistory random_smooth_history(std::mt19937_64& rng, double t_end,
                                    int n_samples, double amplitude,
                                    bool trace_only) {
  if (n_samples < 2) throw HistoryTooShort("need at least two samples");
  std::uniform_int_distribution<int> n_modes_dist(3, 8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double dt = t_end / (n_samples - 1);
  double f_nyquist = 0.5 / dt;
  int n_modes = n_modes_dist(rng);

  struct Mode {
    double omega, phase;
    SymTensor2 amp;
  };
  std::vector<Mode> modes;
  modes.reserve(n_modes);
  for (int m = 0; m < n_modes; ++m) {
    // Band-limit well below Nyquist so the PL sampling resolves every mode.
    double f = (0.05 + 0.3 * unit(rng)) * f_nyquist;
    SymTensor2 amp;
    if (trace_only) {
      amp = SymTensor2::identity() * gauss(rng);
    } else {
      amp = SymTensor2(gauss(rng), gauss(rng), gauss(rng),
                       gauss(rng), gauss(rng), gauss(rng));
    }
    modes.push_back({2.0 * M_PI * f, 2.0 * M_PI * unit(rng),
                     amp * (amplitude / std::sqrt(n_modes))});
  }

  std::vector<double> times(n_samples);
  std::vector<SymTensor2> rates(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    double t = k * dt;
    times[k] = t;
    SymTensor2 r;
    for (const Mode& m : modes) r += m.amp * std::sin(m.omega * t + m.phase);
    rates[k] = r;
  }
  return StrainHistory(std::move(times), std::move(rates));
}

} // namespace vwave
