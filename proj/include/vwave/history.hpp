#ifndef VWAVE_HISTORY_HPP
#define VWAVE_HISTORY_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "vwave/errors.hpp"
#include "vwave/kelvin.hpp"

namespace vwave {

// phi1(x) = (1 - e^-x)/x and phi2(x) = (x - 1 + e^-x)/x^2, the exponential
// integrator weights. Series evaluation near zero avoids cancellation.
double phi1(double x);
double phi2(double x);

// Piecewise-linear strain-rate record: eps_s(t) interpolates linearly between
// the samples. times start at 0 and are strictly increasing.
class StrainHistory {
public:
  StrainHistory() = default;
  StrainHistory(std::vector<double> times, std::vector<SymTensor2> rates);

  size_t size() const { return t_.size(); }
  double t_begin() const { return t_.front(); }
  double t_end() const { return t_.back(); }
  const std::vector<double>& times() const { return t_; }
  const std::vector<SymTensor2>& rates() const { return r_; }

  // Strain rate eps_s at time t (linear interpolation, clamped ends).
  SymTensor2 rate(double t) const;
  // Accumulated strain eps(t) = int_0^t eps_s ds, exact for the PL rate.
  SymTensor2 strain(double t) const;

  // h(t) = int_0^t e^{-r (t-s)} eps_s(s) ds, exact per linear segment.
  // This is the raw memory value every exponential branch is built from.
  SymTensor2 exp_convolve(double r, double t) const;

  // Pointwise sum of two histories sampled on the union of their time grids.
  friend StrainHistory operator+(const StrainHistory& a, const StrainHistory& b);

private:
  void check(double t) const;
  std::vector<double> t_;
  std::vector<SymTensor2> r_;
};

// Exact update of h over one segment of length dt with strain rate going
// linearly from r0 to r1:
//   h <- e^{-r dt} h + dt*phi1(r dt)*r0 + dt*phi2(r dt)*(r1 - r0).
SymTensor2 exp_segment_update(const SymTensor2& h, double rate, double dt,
                              const SymTensor2& r0, const SymTensor2& r1);

// Random smooth test histories: sums of 3-8 sinusoids with random symmetric
// amplitudes, band-limited below the sample Nyquist frequency.
StrainHistory random_smooth_history(std::mt19937_64& rng, double t_end,
                                    int n_samples, double amplitude = 1.0,
                                    bool trace_only = false);

} // namespace vwave

#endif
