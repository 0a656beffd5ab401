#ifndef VWAVE_MITTAG_LEFFLER_HPP
#define VWAVE_MITTAG_LEFFLER_HPP

#include <span>
#include <vector>

#include "vwave/errors.hpp"

namespace vwave::ml {

// E_alpha(z) for 0 < alpha <= 1 and z <= 0, relative accuracy ~1e-10.
// Power series for small |z|, asymptotic expansion for large |z|, and the
// Bernstein spectral integral in between (the radii are alpha-dependent;
// a fixed switch point cannot reach the accuracy target for alpha near 0.7).
double ml_eval(double alpha, double z);

// d/dx E_alpha(-(x/a)^alpha) for x > 0, via the spectral integral
// -int tau e^{-x tau} dbeta(tau). Integrably singular as x -> 0+.
double ml_kernel_derivative(double alpha, double a, double x);

// Spectral density dbeta/dtau of the Mittag-Leffler relaxation kernel:
//   (sin(alpha pi)/pi) (a tau)^alpha / (tau [(a tau)^{2a} + 2(a tau)^a cos(alpha pi) + 1]).
// Nonnegative for 0 < alpha < 1; total mass 1.
double bernstein_density(double alpha, double a, double tau);

// Nonnegative exponential-sum approximation of E_alpha[-(t/a)^alpha].
struct PronyApprox {
  double alpha = 0.5;
  double a = 1.0;
  std::vector<double> nodes;    // relaxation rates tau_k >= 0
  std::vector<double> weights;  // w_k >= 0, sum <= 1

  double eval(double t) const;
  double total_weight() const;
};

struct PronyErrorReport {
  double max_rel_err = 0.0;   // pointwise relative, over the t grid
  double max_abs_err = 0.0;
  double tail_mass_low = 0.0;   // analytic bound of truncated beta mass
  double tail_mass_high = 0.0;
  struct Sample {
    double t, exact, approx, rel_err;
  };
  std::vector<Sample> samples;
};

// Quadrature of the Bernstein density on [c1/t_max, c2/t_min] with
// mass-weighted Gauss-Legendre panels, plus one moment-matched node for the
// truncated low-rate tail. Throws InsufficientNodes for n_nodes < 1 or when
// the reported error exceeds `tol`.
PronyApprox prony_fit(double alpha, double a, int n_nodes, double t_min,
                      double t_max, PronyErrorReport* report = nullptr,
                      double tol = 0.0 /* 0 = no check */);

// L1-scheme Caputo derivative of order alpha at the last sample of a
// uniformly sampled f (spacing dt). First-order accurate.
double caputo_derivative(std::span<const double> f, double dt, double alpha);

} // namespace vwave::ml

#endif
