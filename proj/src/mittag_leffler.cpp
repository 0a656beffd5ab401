#include "vwave/mittag_leffler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vwave::ml {

namespace {

void check_alpha(double alpha, bool allow_one) {
  if (!(alpha > 0.0) || alpha > 1.0 || (!allow_one && alpha == 1.0)) {
    std::ostringstream msg;
    msg << "alpha = " << alpha << " outside the supported range";
    throw OutOfDomain(msg.str());
  }
}

// Power series sum_{n>=0} z^n / Gamma(alpha n + 1) in long double. Terms
// peak near alpha*n ~ x^{1/alpha}; sum until safely past the peak.
double ml_series(double alpha, double z) {
  long double x = -static_cast<long double>(z);
  long double la = static_cast<long double>(alpha);
  long double peak = powl(x, 1.0L / la);
  long double lx = logl(x);
  long double sum = 0.0L;
  for (int n = 0; n < 8000; ++n) {
    long double lt = n * lx - lgammal(la * n + 1.0L);
    long double term = expl(lt);
    if (n % 2) term = -term;
    sum += term;
    if (la * n > peak && fabsl(term) < 1e-22L * fabsl(sum) + 1e-330L) break;
  }
  return static_cast<double>(sum);
}

// Asymptotic expansion E_alpha(-x) ~ sum_{k>=1} (-1)^{k+1} x^{-k}/Gamma(1-alpha k),
// truncated at the smallest term. 1/Gamma(1-alpha k) via reflection.
double ml_asymptotic(double alpha, double x) {
  double lx = std::log(x);
  double sum = 0.0, prev = HUGE_VAL;
  for (int k = 1; k <= 400; ++k) {
    double s = std::sin(M_PI * alpha * k);
    double mag = std::exp(std::lgamma(alpha * k) - k * lx) / M_PI;
    double term = ((k % 2 == 1) ? 1.0 : -1.0) * mag * s;
    double amag = std::abs(mag);
    if (amag > prev) break;  // optimal truncation
    sum += term;
    if (amag < 1e-18 * std::abs(sum)) break;
    prev = amag;
  }
  return sum;
}

// Spectral integral E_alpha(-x) = int_0^inf e^{-x^{1/alpha} tau} dbeta(tau)
// on a log grid (trapezoid; integrand analytic in u = log tau).
double ml_spectral(double alpha, double x) {
  double tp = std::pow(x, 1.0 / alpha);  // time argument
  double sa = std::sin(alpha * M_PI), ca = std::cos(alpha * M_PI);
  // Integration window: density decays like e^{alpha u} to the left; the
  // exponential kernel cuts at u ~ log(45/tp) on the right.
  double ulo = std::min(-42.0 / alpha, std::log(1e-4 / tp));
  double uhi = std::log(45.0 / tp);
  double h = 0.05;
  if (alpha > 0.95) h = std::min(h, (1.0 - alpha) / 8.0 + 1e-7);
  int n = static_cast<int>((uhi - ulo) / h) + 1;
  h = (uhi - ulo) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    double u = ulo + i * h;
    double ta = std::exp(alpha * u);
    double g = std::exp(-tp * std::exp(u)) * sa / M_PI * ta /
               (ta * ta + 2.0 * ta * ca + 1.0);
    sum += (i == 0 || i == n) ? 0.5 * g : g;
  }
  return sum * h;
}

} // namespace

double ml_eval(double alpha, double z) {
  check_alpha(alpha, /*allow_one=*/true);
  if (z > 0.0) throw OutOfDomain("ml_eval requires z <= 0");
  if (z == 0.0) return 1.0;
  if (alpha == 1.0) return std::exp(z);
  double x = -z;
  double r_series = std::pow(18.0, alpha);
  double r_asymp = std::pow(23.0, alpha);
  if (x <= r_series) return ml_series(alpha, z);
  if (x >= r_asymp) return ml_asymptotic(alpha, x);
  return ml_spectral(alpha, x);
}

double bernstein_density(double alpha, double a, double tau) {
  check_alpha(alpha, /*allow_one=*/false);
  if (!(tau > 0.0)) throw OutOfDomain("bernstein_density requires tau > 0");
  if (!(a > 0.0)) throw OutOfDomain("bernstein_density requires a > 0");
  double at = std::pow(a * tau, alpha);
  double den = tau * (at * at + 2.0 * at * std::cos(alpha * M_PI) + 1.0);
  return std::sin(alpha * M_PI) / M_PI * at / den;
}

double ml_kernel_derivative(double alpha, double a, double x) {
  check_alpha(alpha, /*allow_one=*/false);
  if (!(x > 0.0)) throw OutOfDomain("ml_kernel_derivative requires x > 0");
  double sa = std::sin(alpha * M_PI), ca = std::cos(alpha * M_PI);
  double ulo = std::min(-42.0 / alpha - std::log(a), std::log(1e-4 / x));
  double uhi = std::log(50.0 / x);
  double h = 0.05;
  if (alpha > 0.95) h = std::min(h, (1.0 - alpha) / 8.0 + 1e-7);
  int n = static_cast<int>((uhi - ulo) / h) + 1;
  h = (uhi - ulo) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    double u = ulo + i * h;
    double tau = std::exp(u);
    double ta = std::pow(a * tau, alpha);
    double rho = sa / M_PI * ta / (ta * ta + 2.0 * ta * ca + 1.0);  // tau*density
    double g = tau * std::exp(-x * tau) * rho;
    sum += (i == 0 || i == n) ? 0.5 * g : g;
  }
  return -sum * h;
}

double PronyApprox::eval(double t) const {
  double s = 0.0;
  for (size_t k = 0; k < nodes.size(); ++k)
    s += weights[k] * std::exp(-t * nodes[k]);
  return s;
}

double PronyApprox::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

PronyApprox prony_fit(double alpha, double a, int n_nodes, double t_min,
                      double t_max, PronyErrorReport* report, double tol) {
  check_alpha(alpha, /*allow_one=*/false);
  if (n_nodes < 1) throw InsufficientNodes("prony_fit needs n_nodes >= 1");
  if (!(t_min > 0.0) || !(t_max > t_min))
    throw OutOfDomain("prony_fit needs 0 < t_min < t_max");

  const double c1 = 1e-2, c2 = 1e2;
  double tau_lo = c1 / t_max, tau_hi = c2 / t_min;
  double ulo = std::log(tau_lo), uhi = std::log(tau_hi);

  // Mass CDF of the density in u = log(tau); the equal-mass/equal-width mix
  // below concentrates panels at the alpha->1 spectral peak while keeping
  // coverage of the algebraic tails.
  const int nf = 6000;
  std::vector<double> cdf(nf + 1, 0.0);
  double hu = (uhi - ulo) / nf;
  double prevg = std::exp(ulo) * bernstein_density(alpha, a, std::exp(ulo));
  for (int i = 1; i <= nf; ++i) {
    double u = ulo + i * hu;
    double g = std::exp(u) * bernstein_density(alpha, a, std::exp(u));
    cdf[i] = cdf[i - 1] + 0.5 * hu * (prevg + g);
    prevg = g;
  }
  double mass_total = cdf[nf];

  PronyApprox fit;
  fit.alpha = alpha;
  fit.a = a;

  // One moment-matched node carries the truncated low-rate tail (the density
  // behaves like C tau^{alpha-1} there, so both integrals are available in
  // closed form up to the slowly varying bracket).
  double m0 = 0.0, m1 = 0.0;
  {
    const int nq = 400;
    // substitute tau = v^{1/alpha}: integrand becomes smooth near v = 0
    double vhi = std::pow(tau_lo, alpha), hv = vhi / nq;
    for (int i = 0; i < nq; ++i) {
      double v = (i + 0.5) * hv;
      double tau = std::pow(v, 1.0 / alpha);
      double w = bernstein_density(alpha, a, tau) * (1.0 / alpha) *
                 std::pow(v, 1.0 / alpha - 1.0) * hv;
      m0 += w;
      m1 += w * tau;
    }
  }
  int quad_nodes = n_nodes;
  if (m0 > 0.0 && n_nodes >= 2) {
    fit.nodes.push_back(m1 / m0);
    fit.weights.push_back(m0);
    quad_nodes -= 1;
  }

  if (quad_nodes >= 1) {
    // <= 4 points per panel; panels share the remainder so every panel gets
    // a valid Gauss rule.
    int n_panels = (quad_nodes + 3) / 4;
    int per_panel = quad_nodes / n_panels;
    int extra = quad_nodes - per_panel * n_panels;

    // Panel edges at quantiles of 0.5*(mass CDF) + 0.5*(uniform in u).
    auto mix = [&](int i) {
      return 0.5 * cdf[i] / mass_total + 0.5 * static_cast<double>(i) / nf;
    };
    std::vector<double> edges(n_panels + 1);
    edges[0] = ulo;
    edges[n_panels] = uhi;
    int ip = 0;
    for (int p = 1; p < n_panels; ++p) {
      double target = static_cast<double>(p) / n_panels;
      while (ip < nf && mix(ip) < target) ++ip;
      edges[p] = ulo + ip * hu;
    }

    for (int p = 0; p < n_panels; ++p) {
      int q = per_panel + (p < extra ? 1 : 0);
      double mid = 0.5 * (edges[p] + edges[p + 1]);
      double half = 0.5 * (edges[p + 1] - edges[p]);
      for (int i = 0; i < q; ++i) {
        double xi, wi;
        switch (q) {
          case 1:
            xi = 0.0;
            wi = 2.0;
            break;
          case 2:
            xi = (i == 0 ? -1.0 : 1.0) / std::sqrt(3.0);
            wi = 1.0;
            break;
          case 3: {
            static const double x3[3] = {-0.7745966692414834, 0.0,
                                         0.7745966692414834};
            static const double w3[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
            xi = x3[i];
            wi = w3[i];
            break;
          }
          default: {
            static const double x4[4] = {-0.8611363115940526, -0.3399810435848563,
                                         0.3399810435848563, 0.8611363115940526};
            static const double w4[4] = {0.3478548451374538, 0.6521451548625461,
                                         0.6521451548625461, 0.3478548451374538};
            xi = x4[i];
            wi = w4[i];
            break;
          }
        }
        double u = mid + half * xi;
        double tau = std::exp(u);
        fit.nodes.push_back(tau);
        fit.weights.push_back(wi * half * tau * bernstein_density(alpha, a, tau));
      }
    }
  }

  // Error report over a log grid of t.
  PronyErrorReport rep;
  rep.tail_mass_low = m0;
  {
    double at = std::pow(a * tau_hi, alpha);
    rep.tail_mass_high = std::sin(alpha * M_PI) / M_PI / (alpha * at);
  }
  const int nt = 200;
  for (int i = 0; i <= nt; ++i) {
    double t = t_min * std::pow(t_max / t_min, static_cast<double>(i) / nt);
    double exact = ml_eval(alpha, -std::pow(t / a, alpha));
    double approx = fit.eval(t);
    double abs_err = std::abs(approx - exact);
    double rel = abs_err / std::max(std::abs(exact), 1e-300);
    rep.max_abs_err = std::max(rep.max_abs_err, abs_err);
    rep.max_rel_err = std::max(rep.max_rel_err, rel);
    rep.samples.push_back({t, exact, approx, rel});
  }
  if (report) *report = rep;
  if (tol > 0.0 && rep.max_rel_err > tol) {
    std::ostringstream msg;
    msg << "prony_fit: " << n_nodes << " nodes give max relative error "
        << rep.max_rel_err << " > " << tol;
    throw InsufficientNodes(msg.str());
  }
  return fit;
}

double caputo_derivative(std::span<const double> f, double dt, double alpha) {
  check_alpha(alpha, /*allow_one=*/false);
  if (f.size() < 2) throw HistoryTooShort("caputo_derivative needs >= 2 samples");
  if (!(dt > 0.0)) throw OutOfDomain("caputo_derivative needs dt > 0");
  size_t n = f.size() - 1;  // derivative at t = n*dt
  double acc = 0.0;
  for (size_t j = 0; j < n; ++j) {
    // weight of increment f[n-j] - f[n-j-1]
    double b = std::pow(j + 1.0, 1.0 - alpha) - std::pow(static_cast<double>(j), 1.0 - alpha);
    acc += b * (f[n - j] - f[n - j - 1]);
  }
  return acc / (std::tgamma(2.0 - alpha) * std::pow(dt, alpha));
}

} // namespace vwave::ml
