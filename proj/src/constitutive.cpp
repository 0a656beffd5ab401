#include "vwave/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vwave {

namespace {

// 16-point Gauss-Legendre on [-1,1], used for the Mittag-Leffler kernel
// quadrature.
constexpr int kGL = 16;
constexpr double kGLx[kGL] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
constexpr double kGLw[kGL] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
    0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
    0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
    0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
    0.0271524594117541};

void check_order(double t, double s) {
  if (s < 0.0 || s > t * (1.0 + 1e-12) + 1e-300) {
    std::ostringstream msg;
    msg << "kernel arguments need 0 <= s <= t, got s = " << s << ", t = " << t;
    throw OutOfOrder(msg.str());
  }
}

void require_positive(const ScalarParam& p, const char* what) {
  if (!(p.min_value() > 0.0)) {
    std::ostringstream msg;
    msg << what << " must be positive";
    throw ConfigError(msg.str());
  }
}

ScalarParam reciprocal(const ScalarParam& p) {
  return p.map([](double v) { return 1.0 / v; });
}

Kelvin66 symmetrized(const Kelvin66& k) {
  Kelvin66 r;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) r(i, j) = 0.5 * (k(i, j) + k(j, i));
  return r;
}

} // namespace

Kelvin66 KernelTerm::structure_kelvin() const {
  switch (structure) {
    case Structure::TraceProjector:
      return Kelvin66::trace_projector();
    case Structure::Identity:
      return Kelvin66::identity();
    case Structure::Matrix:
      return matrix;
  }
  return {};
}

SymTensor2 KernelTerm::apply_structure(const SymTensor2& v) const {
  switch (structure) {
    case Structure::TraceProjector:
      return SymTensor2::identity() * v.trace();
    case Structure::Identity:
      return v;
    case Structure::Matrix:
      return matrix.apply(v);
  }
  return {};
}

std::string MaterialModel::name() const {
  switch (kind()) {
    case Kind::Elastic: return "Elastic";
    case Kind::ExpConvIso: return "ExpConvIso";
    case Kind::GLSM: return "GLSM";
    case Kind::AgingIso: return "AgingIso";
    case Kind::AgingPlusExp: return "AgingPlusExp";
    case Kind::FractionalZener: return "FractionalZener";
    case Kind::SuperposedSum: return "SuperposedSum";
    case Kind::SuperposedIntegral: return "SuperposedIntegral";
    case Kind::GenericKernel: return "GenericKernel";
    case Kind::ExpTensor: return "ExpTensor";
  }
  return "unknown";
}

double MaterialModel::speed_lambda_generic(const Vec2& x, double t) const {
  return instantaneous(x, t).lambda_max();
}

const std::vector<KernelTerm>& MaterialModel::solver_terms() const {
  throw UnsupportedKind(name() + " has no finite exponential decomposition");
}

std::vector<size_t> MaterialModel::branch_term_indices() const {
  std::vector<size_t> idx;
  const auto& terms = solver_terms();
  for (size_t i = 0; i < terms.size(); ++i)
    if (!(terms[i].rate.is_constant() && terms[i].rate.constant() == 0.0))
      idx.push_back(i);
  return idx;
}

SymTensor2 MaterialModel::stress_from_state(
    const Vec2& x, double t, const SymTensor2& eps,
    std::span<const SymTensor2> branches) const {
  const auto& terms = solver_terms();
  SymTensor2 sigma;
  size_t b = 0;
  for (const KernelTerm& term : terms) {
    bool is_branch =
        !(term.rate.is_constant() && term.rate.constant() == 0.0);
    const SymTensor2& v = is_branch ? branches[b++] : eps;
    sigma += term.apply_structure(v) * term.scale(x, t);
  }
  if (b != branches.size())
    throw ModelMismatch("branch count does not match the model");
  return sigma;
}

// ---------------------------------------------------------------------------
// Term-based models (everything with a finite exponential decomposition).

class TermModel : public MaterialModel {
public:
  const std::vector<KernelTerm>& solver_terms() const override { return terms_; }

  StiffnessTensor eval_C(const Vec2& x, double t, double s) const override {
    check_order(t, s);
    Kelvin66 k;
    for (const KernelTerm& term : terms_) {
      double sc = term.scale(x, t);
      double r = term.rate(x);
      if (r != 0.0) sc *= std::exp(-r * (t - s));
      k += sc * term.structure_kelvin();
    }
    return {k};
  }

  StiffnessTensor eval_Ct(const Vec2& x, double t, double s) const override {
    check_order(t, s);
    Kelvin66 k;
    for (const KernelTerm& term : terms_) {
      double r = term.rate(x);
      double sc = term.scale_dt(x, t) - r * term.scale(x, t);
      if (r != 0.0) sc *= std::exp(-r * (t - s));
      if (sc != 0.0) k += sc * term.structure_kelvin();
    }
    return {k};
  }

  StiffnessTensor instantaneous_dt(const Vec2& x, double t) const override {
    // d/dt C(t,t): the exponential factors cancel, only aging scales move.
    Kelvin66 k;
    for (const KernelTerm& term : terms_) {
      double sc = term.scale_dt(x, t);
      if (sc != 0.0) k += sc * term.structure_kelvin();
    }
    return {k};
  }

  SymTensor2 stress(const Vec2& x, const StrainHistory& h, double t) const override {
    SymTensor2 sigma;
    for (const KernelTerm& term : terms_) {
      SymTensor2 v = h.exp_convolve(term.rate(x), t);
      sigma += term.apply_structure(v) * term.scale(x, t);
    }
    return sigma;
  }

  SymTensor2 sigma_tilde(const Vec2& x, const StrainHistory& h, double t) const override {
    SymTensor2 st;
    for (const KernelTerm& term : terms_) {
      double r = term.rate(x);
      double sc = term.scale_dt(x, t) - r * term.scale(x, t);
      if (sc == 0.0) continue;
      SymTensor2 v = h.exp_convolve(r, t);
      st += term.apply_structure(v) * sc;
    }
    return st;
  }

  ModelEnergies energy_model(const Vec2& x, const StrainHistory& h,
                             double t) const override {
    std::vector<SymTensor2> branches;
    for (size_t i : branch_term_indices())
      branches.push_back(h.exp_convolve(terms_[i].rate(x), t));
    return energy_from_state(x, t, h.strain(t), branches);
  }

protected:
  std::vector<KernelTerm> terms_;

  KernelTerm make_term(KernelTerm::Structure s, ScalarParam coeff,
                       ScalarParam rate = ScalarParam(0.0),
                       AgingTable aging = AgingTable::constant(),
                       double weight = 1.0) {
    KernelTerm t;
    t.structure = s;
    t.coeff = std::move(coeff);
    t.rate = std::move(rate);
    t.aging = std::move(aging);
    t.weight = weight;
    return t;
  }
};

namespace {

class ElasticModel final : public TermModel {
public:
  ElasticModel(ScalarParam lambda, ScalarParam mu)
      : lambda_(std::move(lambda)), mu_(std::move(mu)) {
    require_positive(lambda_, "lambda");
    require_positive(mu_, "mu");
    terms_.push_back(make_term(KernelTerm::Structure::TraceProjector, lambda_));
    terms_.push_back(make_term(KernelTerm::Structure::Identity, mu_.map([](double m) {
      return 2.0 * m;
    })));
  }

  Kind kind() const override { return Kind::Elastic; }

  ModelEnergies energy_from_state(const Vec2& x, double, const SymTensor2& eps,
                                  std::span<const SymTensor2>) const override {
    double tr = eps.trace();
    double e_S = 0.5 * lambda_(x) * tr * tr + mu_(x) * eps.norm2();
    return {e_S, 0.0, {0.0}};
  }

  double speed_lambda_model(const Vec2& x, double) const override {
    return lambda_(x) + 2.0 * mu_(x);
  }

private:
  ScalarParam lambda_, mu_;
};

// Shared formulas of one exponential-convolution isotropic member
// (lambda e^{-(t-s)/gamma} IxI + 2 mu e^{-(t-s)/tau} Isym):
//   e_S   = lambda/2 |tr h_g|^2 + mu |h_t|^2
//   e_D'  = lambda/gamma |tr h_g|^2 + 2 mu/tau |h_t|^2
struct ExpIsoMember {
  double lambda, gamma, mu, tau;
  double e_S(const SymTensor2& hg, const SymTensor2& ht) const {
    double trg = hg.trace();
    return 0.5 * lambda * trg * trg + mu * ht.norm2();
  }
  double e_D_rate(const SymTensor2& hg, const SymTensor2& ht) const {
    double trg = hg.trace();
    return (lambda / gamma) * (trg * trg) + (2.0 * mu / tau) * ht.norm2();
  }
};

class ExpConvIsoModel final : public TermModel {
public:
  ExpConvIsoModel(ScalarParam lambda, ScalarParam mu, ScalarParam gamma,
                  ScalarParam tau)
      : lambda_(std::move(lambda)), mu_(std::move(mu)),
        gamma_(std::move(gamma)), tau_(std::move(tau)) {
    require_positive(lambda_, "lambda");
    require_positive(mu_, "mu");
    require_positive(gamma_, "gamma");
    require_positive(tau_, "tau");
    terms_.push_back(make_term(KernelTerm::Structure::TraceProjector, lambda_,
                               reciprocal(gamma_)));
    terms_.push_back(make_term(KernelTerm::Structure::Identity,
                               mu_.map([](double m) { return 2.0 * m; }),
                               reciprocal(tau_)));
  }

  Kind kind() const override { return Kind::ExpConvIso; }

  ModelEnergies energy_from_state(const Vec2& x, double, const SymTensor2&,
                                  std::span<const SymTensor2> br) const override {
    ExpIsoMember m{lambda_(x), gamma_(x), mu_(x), tau_(x)};
    double ed = m.e_D_rate(br[0], br[1]);
    return {m.e_S(br[0], br[1]), ed, {ed}};
  }

  double speed_lambda_model(const Vec2& x, double) const override {
    return lambda_(x) + 2.0 * mu_(x);
  }

private:
  ScalarParam lambda_, mu_, gamma_, tau_;
};

class GlsmModel final : public TermModel {
public:
  GlsmModel(ScalarParam lambda0, ScalarParam mu0, std::vector<GlsmBranch> br)
      : lambda0_(std::move(lambda0)), mu0_(std::move(mu0)), br_(std::move(br)) {
    require_positive(lambda0_, "lambda0");
    require_positive(mu0_, "mu0");
    terms_.push_back(make_term(KernelTerm::Structure::TraceProjector, lambda0_));
    terms_.push_back(make_term(KernelTerm::Structure::Identity,
                               mu0_.map([](double m) { return 2.0 * m; })));
    for (const GlsmBranch& b : br_) {
      require_positive(b.lambda, "lambda_i");
      require_positive(b.gamma, "gamma_i");
      require_positive(b.mu, "mu_i");
      require_positive(b.tau, "tau_i");
      terms_.push_back(make_term(KernelTerm::Structure::TraceProjector,
                                 b.lambda, reciprocal(b.gamma)));
      terms_.push_back(make_term(KernelTerm::Structure::Identity,
                                 b.mu.map([](double m) { return 2.0 * m; }),
                                 reciprocal(b.tau)));
    }
  }

  Kind kind() const override { return Kind::GLSM; }

  ModelEnergies energy_from_state(const Vec2& x, double, const SymTensor2& eps,
                                  std::span<const SymTensor2> br) const override {
    ModelEnergies e;
    double tr = eps.trace();
    e.e_S = 0.5 * lambda0_(x) * tr * tr + mu0_(x) * eps.norm2();
    e.components.push_back(0.0);
    for (size_t i = 0; i < br_.size(); ++i) {
      ExpIsoMember m{br_[i].lambda(x), br_[i].gamma(x), br_[i].mu(x),
                     br_[i].tau(x)};
      double ed = m.e_D_rate(br[2 * i], br[2 * i + 1]);
      e.e_S += m.e_S(br[2 * i], br[2 * i + 1]);
      e.e_D_rate += ed;
      e.components.push_back(ed);
    }
    return e;
  }

  double speed_lambda_model(const Vec2& x, double) const override {
    double s = lambda0_(x) + 2.0 * mu0_(x);
    for (const GlsmBranch& b : br_) s += b.lambda(x) + 2.0 * b.mu(x);
    return s;
  }
  double speed_lambda_generic(const Vec2& x, double t) const override {
    // superposition bound with the refined member speeds
    return speed_lambda_model(x, t);
  }

private:
  ScalarParam lambda0_, mu0_;
  std::vector<GlsmBranch> br_;
};

class AgingIsoModel final : public TermModel {
public:
  AgingIsoModel(ScalarParam lambda, ScalarParam mu, AgingTable gl, AgingTable gm)
      : lambda_(std::move(lambda)), mu_(std::move(mu)), gl_(std::move(gl)),
        gm_(std::move(gm)) {
    require_positive(lambda_, "lambda");
    require_positive(mu_, "mu");
    terms_.push_back(make_term(KernelTerm::Structure::TraceProjector, lambda_,
                               ScalarParam(0.0), gl_));
    terms_.push_back(make_term(KernelTerm::Structure::Identity,
                               mu_.map([](double m) { return 2.0 * m; }),
                               ScalarParam(0.0), gm_));
  }

  Kind kind() const override { return Kind::AgingIso; }

  ModelEnergies energy_from_state(const Vec2& x, double t, const SymTensor2& eps,
                                  std::span<const SymTensor2>) const override {
    double tr = eps.trace();
    double lam = lambda_(x) * gl_.value(t), mu = mu_(x) * gm_.value(t);
    double lam_t = lambda_(x) * gl_.slope(t), mu_t = mu_(x) * gm_.slope(t);
    double e_S = 0.5 * lam * tr * tr + mu * eps.norm2();
    double ed = -0.5 * (lam_t * tr * tr + 2.0 * mu_t * eps.norm2());
    return {e_S, ed, {ed}};
  }

  double speed_lambda_model(const Vec2& x, double t) const override {
    return lambda_(x) * gl_.value(t) + 2.0 * mu_(x) * gm_.value(t);
  }

private:
  ScalarParam lambda_, mu_;
  AgingTable gl_, gm_;
};

class AgingPlusExpModel final : public TermModel {
public:
  AgingPlusExpModel(ScalarParam lambda0, ScalarParam mu0, AgingTable gl,
                    AgingTable gm, std::vector<GlsmBranch> br)
      : lambda0_(std::move(lambda0)), mu0_(std::move(mu0)), gl_(std::move(gl)),
        gm_(std::move(gm)), br_(std::move(br)) {
    require_positive(lambda0_, "lambda0");
    require_positive(mu0_, "mu0");
    terms_.push_back(make_term(KernelTerm::Structure::TraceProjector, lambda0_,
                               ScalarParam(0.0), gl_));
    terms_.push_back(make_term(KernelTerm::Structure::Identity,
                               mu0_.map([](double m) { return 2.0 * m; }),
                               ScalarParam(0.0), gm_));
    for (const GlsmBranch& b : br_) {
      require_positive(b.lambda, "lambda_i");
      require_positive(b.gamma, "gamma_i");
      require_positive(b.mu, "mu_i");
      require_positive(b.tau, "tau_i");
      terms_.push_back(make_term(KernelTerm::Structure::TraceProjector,
                                 b.lambda, reciprocal(b.gamma)));
      terms_.push_back(make_term(KernelTerm::Structure::Identity,
                                 b.mu.map([](double m) { return 2.0 * m; }),
                                 reciprocal(b.tau)));
    }
  }

  Kind kind() const override { return Kind::AgingPlusExp; }

  ModelEnergies energy_from_state(const Vec2& x, double t, const SymTensor2& eps,
                                  std::span<const SymTensor2> br) const override {
    ModelEnergies e;
    double tr = eps.trace();
    double lam = lambda0_(x) * gl_.value(t), mu = mu0_(x) * gm_.value(t);
    double lam_t = lambda0_(x) * gl_.slope(t), mu_t = mu0_(x) * gm_.slope(t);
    e.e_S = 0.5 * lam * tr * tr + mu * eps.norm2();
    double ed0 = -0.5 * (lam_t * tr * tr + 2.0 * mu_t * eps.norm2());
    e.e_D_rate = ed0;
    e.components.push_back(ed0);
    for (size_t i = 0; i < br_.size(); ++i) {
      ExpIsoMember m{br_[i].lambda(x), br_[i].gamma(x), br_[i].mu(x),
                     br_[i].tau(x)};
      double ed = m.e_D_rate(br[2 * i], br[2 * i + 1]);
      e.e_S += m.e_S(br[2 * i], br[2 * i + 1]);
      e.e_D_rate += ed;
      e.components.push_back(ed);
    }
    return e;
  }

  double speed_lambda_model(const Vec2& x, double t) const override {
    double s = lambda0_(x) * gl_.value(t) + 2.0 * mu0_(x) * gm_.value(t);
    for (const GlsmBranch& b : br_) s += b.lambda(x) + 2.0 * b.mu(x);
    return s;
  }
  double speed_lambda_generic(const Vec2& x, double t) const override {
    return speed_lambda_model(x, t);
  }

private:
  ScalarParam lambda0_, mu0_;
  AgingTable gl_, gm_;
  std::vector<GlsmBranch> br_;
};

class ExpTensorModel final : public TermModel {
public:
  ExpTensorModel(Kelvin66 B, ScalarParam coeff, ScalarParam rate)
      : B_(B), coeff_(std::move(coeff)), rate_(std::move(rate)) {
    if (!B_.is_symmetric(1e-10) || !B_.is_pd(1e-12))
      throw NotPositiveDefinite("exp-tensor weight must be symmetric positive definite");
    require_positive(coeff_, "coeff");
    if (rate_.min_value() < 0.0) throw ConfigError("rate must be >= 0");
    KernelTerm t;
    t.structure = KernelTerm::Structure::Matrix;
    t.matrix = B_;
    t.coeff = coeff_;
    t.rate = rate_;
    terms_.push_back(t);
    lambda_max_B_ = B_.max_eigenvalue();
  }

  Kind kind() const override { return Kind::ExpTensor; }

  ModelEnergies energy_from_state(const Vec2& x, double, const SymTensor2&,
                                  std::span<const SymTensor2> br) const override {
    // sigma = c B h; e_S = sigma:S sigma/2 = (c/2) h:Bh; e_D' = r c h:Bh
    SymTensor2 h = br.empty() ? SymTensor2::zero() : br[0];
    double hBh = double_dot(h, B_.apply(h));
    double c = coeff_(x);
    double ed = rate_(x) * c * hBh;
    return {0.5 * c * hBh, ed, {ed}};
  }

  double speed_lambda_model(const Vec2& x, double) const override {
    return coeff_(x) * lambda_max_B_;
  }

private:
  Kelvin66 B_;
  ScalarParam coeff_, rate_;
  double lambda_max_B_ = 0.0;
};

// ---------------------------------------------------------------------------
// Fractional Zener: exact Mittag-Leffler kernel for evaluation and stress;
// the Prony (discretized Bernstein measure) members provide the internal
// variables, the certified energies and the solver branches.

SymTensor2 ml_convolve(double alpha, double a, const StrainHistory& h, double t,
                       bool derivative_kernel) {
  if (t > h.t_end() * (1.0 + 1e-12) + 1e-300)
    throw HistoryTooShort("query time beyond recorded history");
  auto kernel = [&](double x) {
    return derivative_kernel ? ml::ml_kernel_derivative(alpha, a, x)
                             : ml::ml_eval(alpha, -std::pow(x / a, alpha));
  };
  SymTensor2 acc;
  const auto& times = h.times();
  for (size_t k = 1; k < times.size() && times[k - 1] < t; ++k) {
    double s0 = times[k - 1];
    double s1 = std::min(t, times[k]);
    if (s1 < t) {
      double mid = 0.5 * (s0 + s1), half = 0.5 * (s1 - s0);
      for (int i = 0; i < kGL; ++i) {
        double s = mid + half * kGLx[i];
        acc += h.rate(s) * (kGLw[i] * half * kernel(t - s));
      }
    } else {
      // segment touching s = t: substitute v = (t-s)^alpha, which removes
      // the kernel's weak singularity
      double V = std::pow(t - s0, alpha);
      double mid = 0.5 * V, half = 0.5 * V;
      for (int i = 0; i < kGL; ++i) {
        double v = mid + half * kGLx[i];
        double x = std::pow(v, 1.0 / alpha);
        double jac = (1.0 / alpha) * std::pow(v, 1.0 / alpha - 1.0);
        acc += h.rate(t - x) * (kGLw[i] * half * kernel(x) * jac);
      }
    }
  }
  return acc;
}

class FractionalZenerModel final : public TermModel {
public:
  FractionalZenerModel(double alpha, double a, Kelvin66 C1, Kelvin66 M,
                       FractionalZenerOptions opt)
      : alpha_(alpha), a_(a), C1_(C1), M_(M) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
      throw OutOfDomain("fractional Zener needs 0 < alpha < 1");
    if (!(a > 0.0)) throw OutOfDomain("fractional Zener needs a > 0");
    if (!C1_.is_symmetric(1e-10) || !C1_.is_pd(1e-12))
      throw NotPositiveDefinite("C1 must be symmetric positive definite");
    if (!M_.is_symmetric(1e-10) || !M_.is_pd(1e-12))
      throw NotPositiveDefinite("M must be symmetric positive definite");
    prony_ = ml::prony_fit(alpha, a, opt.prony_nodes, opt.prony_t_min,
                           opt.prony_t_max);
    KernelTerm t0;
    t0.structure = KernelTerm::Structure::Matrix;
    t0.matrix = C1_;
    terms_.push_back(t0);
    for (size_t k = 0; k < prony_.nodes.size(); ++k) {
      if (prony_.weights[k] <= 0.0) continue;
      KernelTerm tk;
      tk.structure = KernelTerm::Structure::Matrix;
      tk.matrix = M_;
      tk.weight = prony_.weights[k];
      tk.rate = ScalarParam(prony_.nodes[k]);
      terms_.push_back(tk);
    }
    lmax_sum_ = C1_.max_eigenvalue() + M_.max_eigenvalue();
  }

  Kind kind() const override { return Kind::FractionalZener; }

  StiffnessTensor eval_C(const Vec2&, double t, double s) const override {
    check_order(t, s);
    double k = ml::ml_eval(alpha_, -std::pow((t - s) / a_, alpha_));
    return {C1_ + k * M_};
  }

  StiffnessTensor eval_Ct(const Vec2&, double t, double s) const override {
    check_order(t, s);
    if (!(s < t))
      throw OutOfDomain("fractional Zener kernel derivative diverges at s = t");
    return {ml::ml_kernel_derivative(alpha_, a_, t - s) * M_};
  }

  StiffnessTensor instantaneous_dt(const Vec2&, double) const override {
    return {Kelvin66::zero()};  // C(t,t) = C1 + M, constant
  }

  SymTensor2 stress(const Vec2&, const StrainHistory& h, double t) const override {
    SymTensor2 hist = ml_convolve(alpha_, a_, h, t, false);
    return C1_.apply(h.strain(t)) + M_.apply(hist);
  }

  SymTensor2 sigma_tilde(const Vec2&, const StrainHistory& h, double t) const override {
    return M_.apply(ml_convolve(alpha_, a_, h, t, true));
  }

  ModelEnergies energy_from_state(const Vec2&, double, const SymTensor2& eps,
                                  std::span<const SymTensor2> br) const override {
    ModelEnergies e;
    e.e_S = 0.5 * double_dot(eps, C1_.apply(eps));
    e.components.push_back(0.0);
    size_t b = 0;
    for (size_t i = 1; i < terms_.size(); ++i, ++b) {
      const SymTensor2& h = br[b];
      double hMh = double_dot(h, M_.apply(h));
      double w = terms_[i].weight;
      double rate = terms_[i].rate.constant();
      e.e_S += 0.5 * w * hMh;
      double ed = w * rate * hMh;
      e.e_D_rate += ed;
      e.components.push_back(ed);
    }
    return e;
  }

  double speed_lambda_model(const Vec2&, double) const override { return lmax_sum_; }
  double speed_lambda_generic(const Vec2&, double) const override { return lmax_sum_; }

  const ml::PronyApprox& prony() const { return prony_; }

private:
  double alpha_, a_;
  Kelvin66 C1_, M_;
  ml::PronyApprox prony_;
  double lmax_sum_ = 0.0;
};

// ---------------------------------------------------------------------------

class SuperposedModel final : public MaterialModel {
public:
  SuperposedModel(Kind kind, std::vector<std::pair<double, Ptr>> members)
      : kind_(kind), members_(std::move(members)) {
    if (members_.empty()) throw EmptySuperposition("no members to superpose");
    for (const auto& [w, m] : members_) {
      if (w < 0.0) throw NegativeWeight("superposition weights must be >= 0");
      if (!m) throw EmptySuperposition("null member");
    }
    try {
      for (const auto& [w, m] : members_) {
        for (KernelTerm t : m->solver_terms()) {
          t.weight *= w;
          terms_.push_back(std::move(t));
        }
        branch_counts_.push_back(m->branch_term_indices().size());
      }
      has_terms_ = true;
    } catch (const UnsupportedKind&) {
      has_terms_ = false;
      terms_.clear();
    }
  }

  Kind kind() const override { return kind_; }

  StiffnessTensor eval_C(const Vec2& x, double t, double s) const override {
    Kelvin66 k;
    for (const auto& [w, m] : members_) k += w * m->eval_C(x, t, s).kelvin;
    return {k};
  }
  StiffnessTensor eval_Ct(const Vec2& x, double t, double s) const override {
    Kelvin66 k;
    for (const auto& [w, m] : members_) k += w * m->eval_Ct(x, t, s).kelvin;
    return {k};
  }
  StiffnessTensor instantaneous_dt(const Vec2& x, double t) const override {
    Kelvin66 k;
    for (const auto& [w, m] : members_) k += w * m->instantaneous_dt(x, t).kelvin;
    return {k};
  }

  SymTensor2 stress(const Vec2& x, const StrainHistory& h, double t) const override {
    SymTensor2 s;
    for (const auto& [w, m] : members_) s += m->stress(x, h, t) * w;
    return s;
  }
  SymTensor2 sigma_tilde(const Vec2& x, const StrainHistory& h, double t) const override {
    SymTensor2 s;
    for (const auto& [w, m] : members_) s += m->sigma_tilde(x, h, t) * w;
    return s;
  }

  ModelEnergies energy_model(const Vec2& x, const StrainHistory& h,
                             double t) const override {
    ModelEnergies e;
    for (const auto& [w, m] : members_) {
      ModelEnergies me = m->energy_model(x, h, t);
      e.e_S += w * me.e_S;
      e.e_D_rate += w * me.e_D_rate;
      e.components.push_back(w * me.e_D_rate);
    }
    return e;
  }

  ModelEnergies energy_from_state(const Vec2& x, double t, const SymTensor2& eps,
                                  std::span<const SymTensor2> br) const override {
    ModelEnergies e;
    size_t off = 0;
    for (size_t i = 0; i < members_.size(); ++i) {
      const auto& [w, m] = members_[i];
      ModelEnergies me =
          m->energy_from_state(x, t, eps, br.subspan(off, branch_counts_[i]));
      off += branch_counts_[i];
      e.e_S += w * me.e_S;
      e.e_D_rate += w * me.e_D_rate;
      e.components.push_back(w * me.e_D_rate);
    }
    return e;
  }

  const std::vector<KernelTerm>& solver_terms() const override {
    if (!has_terms_)
      throw UnsupportedKind("a member has no exponential decomposition");
    return terms_;
  }

  double speed_lambda_model(const Vec2& x, double t) const override {
    double s = 0.0;
    for (const auto& [w, m] : members_) s += w * m->speed_lambda_model(x, t);
    return s;
  }
  double speed_lambda_generic(const Vec2& x, double t) const override {
    double s = 0.0;
    for (const auto& [w, m] : members_) s += w * m->speed_lambda_generic(x, t);
    return s;
  }

  const std::vector<std::pair<double, Ptr>>& members() const { return members_; }

private:
  Kind kind_;
  std::vector<std::pair<double, Ptr>> members_;
  std::vector<KernelTerm> terms_;
  std::vector<size_t> branch_counts_;
  bool has_terms_ = false;
};

class GenericKernelModel final : public MaterialModel {
public:
  GenericKernelModel(KernelFn C, KernelFn Ct, double tol)
      : C_(std::move(C)), Ct_(std::move(Ct)), tol_(tol) {
    if (!C_) throw ConfigError("generic kernel needs a stiffness callable");
  }

  Kind kind() const override { return Kind::GenericKernel; }

  StiffnessTensor eval_C(const Vec2& x, double t, double s) const override {
    check_order(t, s);
    return C_(x, t, s);
  }
  StiffnessTensor eval_Ct(const Vec2& x, double t, double s) const override {
    check_order(t, s);
    if (Ct_) return Ct_(x, t, s);
    double dt = 1e-6 * std::max(1.0, std::abs(t));
    if (t - dt >= s) {
      Kelvin66 k = (C_(x, t + dt, s).kelvin - C_(x, t - dt, s).kelvin) *
                   (0.5 / dt);
      return {k};
    }
    return {(C_(x, t + dt, s).kelvin - C_(x, t, s).kelvin) * (1.0 / dt)};
  }
  StiffnessTensor instantaneous_dt(const Vec2& x, double t) const override {
    double dt = 1e-6 * std::max(1.0, std::abs(t));
    double t0 = std::max(t - dt, 0.0);
    return {(C_(x, t + dt, t + dt).kelvin - C_(x, t0, t0).kelvin) *
            (1.0 / (t + dt - t0))};
  }

  SymTensor2 stress(const Vec2& x, const StrainHistory& h, double t) const override {
    return integrate(x, h, t, false);
  }
  SymTensor2 sigma_tilde(const Vec2& x, const StrainHistory& h, double t) const override {
    return integrate(x, h, t, true);
  }

  ModelEnergies energy_model(const Vec2&, const StrainHistory&, double) const override {
    throw UnsupportedKind(
        "GenericKernel has no certified energy pair; use the generic densities");
  }
  ModelEnergies energy_from_state(const Vec2&, double, const SymTensor2&,
                                  std::span<const SymTensor2>) const override {
    throw UnsupportedKind(
        "GenericKernel has no certified energy pair; use the generic densities");
  }

  double speed_lambda_model(const Vec2& x, double t) const override {
    return speed_lambda_generic(x, t);
  }

private:
  // Composite trapezoid with doubling refinement.
  SymTensor2 integrate(const Vec2& x, const StrainHistory& h, double t,
                       bool dt_kernel) const {
    if (t > h.t_end() * (1.0 + 1e-12) + 1e-300)
      throw HistoryTooShort("query time beyond recorded history");
    if (t <= 0.0) return {};
    auto f = [&](double s) {
      StiffnessTensor c = dt_kernel ? eval_Ct(x, t, s) : eval_C(x, t, s);
      return c.apply(h.rate(s));
    };
    SymTensor2 prev;
    for (int level = 0; level <= 12; ++level) {
      int n = 8 << level;
      double ds = t / n;
      SymTensor2 acc = (f(0.0) + f(t)) * 0.5;
      for (int i = 1; i < n; ++i) acc += f(i * ds);
      acc *= ds;
      if (level > 0) {
        double diff = (acc - prev).norm();
        if (diff <= tol_ * (acc.norm() + 1e-30)) return acc;
      }
      prev = acc;
    }
    return prev;
  }

  KernelFn C_, Ct_;
  double tol_;
};

} // namespace

// ---------------------------------------------------------------------------
// factories

MaterialModel::Ptr make_elastic(ScalarParam lambda, ScalarParam mu) {
  return std::make_shared<ElasticModel>(std::move(lambda), std::move(mu));
}

MaterialModel::Ptr make_exp_conv_iso(ScalarParam lambda, ScalarParam mu,
                                     ScalarParam gamma, ScalarParam tau) {
  return std::make_shared<ExpConvIsoModel>(std::move(lambda), std::move(mu),
                                           std::move(gamma), std::move(tau));
}

MaterialModel::Ptr make_glsm(ScalarParam lambda0, ScalarParam mu0,
                             std::vector<GlsmBranch> branches) {
  return std::make_shared<GlsmModel>(std::move(lambda0), std::move(mu0),
                                     std::move(branches));
}

MaterialModel::Ptr make_aging_iso(ScalarParam lambda, ScalarParam mu,
                                  AgingTable la, AgingTable ma) {
  return std::make_shared<AgingIsoModel>(std::move(lambda), std::move(mu),
                                         std::move(la), std::move(ma));
}

MaterialModel::Ptr make_aging_plus_exp(ScalarParam lambda0, ScalarParam mu0,
                                       AgingTable la, AgingTable ma,
                                       std::vector<GlsmBranch> branches) {
  return std::make_shared<AgingPlusExpModel>(std::move(lambda0), std::move(mu0),
                                             std::move(la), std::move(ma),
                                             std::move(branches));
}

MaterialModel::Ptr make_exp_tensor(Kelvin66 B, ScalarParam coeff,
                                   ScalarParam rate) {
  return std::make_shared<ExpTensorModel>(B, std::move(coeff), std::move(rate));
}

MaterialModel::Ptr make_fractional_zener(double alpha, double a, Kelvin66 C1,
                                         Kelvin66 M, FractionalZenerOptions opt) {
  return std::make_shared<FractionalZenerModel>(alpha, a, C1, M, opt);
}

MaterialModel::Ptr superpose_sum(std::vector<MaterialModel::Ptr> members) {
  std::vector<std::pair<double, MaterialModel::Ptr>> ms;
  ms.reserve(members.size());
  for (auto& m : members) ms.emplace_back(1.0, std::move(m));
  return std::make_shared<SuperposedModel>(MaterialModel::Kind::SuperposedSum,
                                           std::move(ms));
}

MaterialModel::Ptr superpose_integral(
    const std::function<MaterialModel::Ptr(double)>& family,
    const std::vector<double>& nodes, const std::vector<double>& weights) {
  if (nodes.size() != weights.size())
    throw ConfigError("superpose_integral: nodes/weights size mismatch");
  if (nodes.empty()) throw EmptySuperposition("empty quadrature measure");
  std::vector<std::pair<double, MaterialModel::Ptr>> ms;
  for (size_t k = 0; k < nodes.size(); ++k) {
    if (weights[k] < 0.0) throw NegativeWeight("measure weights must be >= 0");
    if (weights[k] == 0.0) continue;
    ms.emplace_back(weights[k], family(nodes[k]));
  }
  if (ms.empty()) throw EmptySuperposition("all weights are zero");
  return std::make_shared<SuperposedModel>(
      MaterialModel::Kind::SuperposedIntegral, std::move(ms));
}

std::optional<SuperposedView> superposed_view(const MaterialModel& m) {
  if (const auto* s = dynamic_cast<const SuperposedModel*>(&m))
    return SuperposedView{s->members()};
  return std::nullopt;
}

MaterialModel::Ptr make_generic_kernel(KernelFn C, KernelFn Ct, double quad_tol) {
  return std::make_shared<GenericKernelModel>(std::move(C), std::move(Ct),
                                              quad_tol);
}

// ---------------------------------------------------------------------------
// generic densities, F^B, residuals, sufficient condition

GenericEnergies energy_densities_generic(const MaterialModel& m, const Vec2& x,
                                         const StrainHistory& h, double t) {
  SymTensor2 sigma = m.stress(x, h, t);
  SymTensor2 stil = m.sigma_tilde(x, h, t);
  Kelvin66 S = m.compliance(x, t).kelvin;
  Kelvin66 Cdot = m.instantaneous_dt(x, t).kelvin;
  Kelvin66 St = symmetrized(matmul(matmul(S, Cdot), S)) * -1.0;
  GenericEnergies e;
  e.e_S = 0.5 * double_dot(sigma, S.apply(sigma));
  e.F = double_dot(sigma, S.apply(stil)) +
        0.5 * double_dot(sigma, St.apply(sigma));
  return e;
}

double check_F_B(const MaterialModel& m,
                 const std::function<Kelvin66(double)>& B, const Vec2& x,
                 const StrainHistory& h, double t) {
  Kelvin66 Bt = B(t);
  if (!Bt.is_symmetric(1e-10) || !Bt.is_pd(1e-12))
    throw NotPositiveDefinite("B(t) must be symmetric positive definite");
  SymTensor2 sigma = m.stress(x, h, t);
  SymTensor2 stil = m.sigma_tilde(x, h, t);
  SymTensor2 edot = h.rate(t);
  Kelvin66 C = m.instantaneous(x, t).kelvin;  // S^{-1}
  double dt = 1e-5 * std::max(1.0, std::abs(t));
  Kelvin66 Bdot;
  if (t - dt >= 0.0)
    Bdot = (B(t + dt) - B(t - dt)) * (0.5 / dt);
  else
    Bdot = (B(t + dt) - B(t)) * (1.0 / dt);
  double term1 = double_dot(sigma, Bt.apply(C.apply(edot)) - edot);
  double term2 = double_dot(sigma, Bt.apply(stil));
  double term3 = 0.5 * double_dot(sigma, Bdot.apply(sigma));
  return term1 + term2 + term3;
}

double work_decomposition_residual(const MaterialModel& m, const Vec2& x,
                                   const StrainHistory& h, double t,
                                   EnergyChoice which) {
  const auto& times = h.times();
  if (times.size() < 3)
    throw HistoryTooShort("need at least 3 samples for the centered difference");
  double dt = times.back();
  for (size_t k = 1; k < times.size(); ++k)
    dt = std::min(dt, times[k] - times[k - 1]);
  if (t - dt < -1e-300 || t + dt > h.t_end() * (1.0 + 1e-12))
    throw HistoryTooShort("t too close to the history boundary");

  auto e_S_at = [&](double u) {
    if (which == EnergyChoice::Model) return m.energy_model(x, h, u).e_S;
    return energy_densities_generic(m, x, h, u).e_S;
  };
  double ed_rate = (which == EnergyChoice::Model)
                       ? m.energy_model(x, h, t).e_D_rate
                       : -energy_densities_generic(m, x, h, t).F;
  double eS_dot = (e_S_at(t + dt) - e_S_at(t - dt)) / (2.0 * dt);
  double power = double_dot(m.stress(x, h, t), h.rate(t));
  return power - (eS_dot + ed_rate);
}

bool check_exponential_sufficient(const Kelvin66& A,
                                  const std::function<Kelvin66(double)>& C0,
                                  double tol, double s_max, int n_samples) {
  double psd_tol = std::max(tol, 1e-8);
  if (!A.is_symmetric(psd_tol) || !A.is_psd(psd_tol)) return false;
  double ds = 1e-5 * std::max(s_max, 1.0);
  for (int i = 0; i < n_samples; ++i) {
    double s = s_max * i / std::max(1, n_samples - 1);
    Kelvin66 c0 = C0(s);
    if (!c0.is_symmetric(psd_tol) || !c0.is_pd(1e-12)) return false;
    Kelvin66 c0dot = (s - ds >= 0.0)
                         ? (C0(s + ds) - C0(s - ds)) * (0.5 / ds)
                         : (C0(s + ds) - C0(s)) * (1.0 / ds);
    if (!c0dot.is_symmetric(1e-6) || !c0dot.is_psd(1e-6)) return false;
    double scale1 = std::max(1.0, A.frobenius_norm() * c0dot.frobenius_norm());
    double scale2 = std::max(1.0, A.frobenius_norm() * c0.frobenius_norm());
    if ((matmul(A, c0dot) - matmul(c0dot, A)).frobenius_norm() > tol * scale1)
      return false;
    if ((matmul(c0, A) - matmul(A, c0)).frobenius_norm() > tol * scale2)
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// speed bounds

double speed_bound(const MaterialModel& m, const ScalarParam& rho,
                   const BallRegion& region, double t_max, BoundKind kind,
                   int n_xy, int n_t) {
  if (!(region.radius > 0.0)) throw ConfigError("region radius must be positive");
  std::vector<Vec2> pts;
  for (int j = 0; j < n_xy; ++j)
    for (int i = 0; i < n_xy; ++i) {
      Vec2 p{region.center.x + region.radius * (2.0 * i / (n_xy - 1) - 1.0),
             region.center.y + region.radius * (2.0 * j / (n_xy - 1) - 1.0)};
      if (norm(p - region.center) <= region.radius) pts.push_back(p);
    }
  if (pts.empty()) pts.push_back(region.center);

  double sup = 0.0;
  int nt = t_max > 0.0 ? n_t : 1;
  for (const Vec2& p : pts) {
    double r = rho(p);
    if (!(r > 0.0)) throw NonPositiveDensity("density must be positive");
    for (int k = 0; k < nt; ++k) {
      double t = nt > 1 ? t_max * k / (nt - 1) : 0.0;
      double lam = (kind == BoundKind::Generic) ? m.speed_lambda_generic(p, t)
                                                : m.speed_lambda_model(p, t);
      sup = std::max(sup, std::sqrt(lam / r));
    }
  }
  return sup;
}

// ---------------------------------------------------------------------------
// dissipation property checks

namespace {

double f_at(const MaterialModel& m, double T1, double delta, double A,
            double* e_D_model) {
  StrainHistory h({0.0, T1, T1 + delta},
                  {SymTensor2::identity(), SymTensor2::identity(),
                   SymTensor2::identity() * -A});
  double t = T1 + delta;
  GenericEnergies g = energy_densities_generic(m, {0, 0}, h, t);
  if (e_D_model) *e_D_model = m.energy_model({0, 0}, h, t).e_D_rate;
  return g.F;
}

} // namespace

FViolation find_generic_F_violation(const MaterialModel& m, int max_evaluations) {
  FViolation best;
  double bT1 = 0, bDelta = 0, bA = 0;

  auto eval = [&](double T1, double delta, double A) {
    if (best.evaluations >= max_evaluations) return;
    ++best.evaluations;
    double f = f_at(m, T1, delta, A, nullptr);
    if (!best.found || f > best.F_generic) {
      best.F_generic = f;
      bT1 = T1;
      bDelta = delta;
      bA = A;
      if (f > 0.0) best.found = true;
    }
  };

  for (double T1 : {2.0, 4.0, 6.0, 8.0, 12.0})
    for (double delta : {0.1, 0.25, 0.5, 1.0, 2.0})
      for (double A : {1.0, 2.0, 5.0, 10.0, 20.0}) eval(T1, delta, A);

  // coordinate refinement around the best candidate
  double sT = 1.0, sD = 0.2, sA = 2.0;
  for (int round = 0; round < 12 && best.evaluations < max_evaluations; ++round) {
    double T1 = bT1, delta = bDelta, A = bA;
    for (double dT : {-sT, 0.0, sT})
      for (double dD : {-sD, 0.0, sD})
        for (double dA : {-sA, 0.0, sA}) {
          double nT = std::max(0.5, T1 + dT);
          double nD = std::max(0.02, delta + dD);
          double nA = std::max(0.1, A + dA);
          eval(nT, nD, nA);
        }
    sT *= 0.6;
    sD *= 0.6;
    sA *= 0.6;
  }

  if (best.F_generic > 0.0) best.found = true;
  best.history = StrainHistory(
      {0.0, bT1, bT1 + bDelta},
      {SymTensor2::identity(), SymTensor2::identity(), SymTensor2::identity() * -bA});
  best.t = bT1 + bDelta;
  best.e_D_model = m.energy_model({0, 0}, best.history, best.t).e_D_rate;
  return best;
}

DissipationScan scan_dissipation(const MaterialModel& m, std::mt19937_64& rng,
                                 int n_histories, double t_end, int n_samples,
                                 int times_per_history) {
  DissipationScan scan;
  scan.min_e_D_rate = HUGE_VAL;
  Vec2 x{0, 0};
  for (int i = 0; i < n_histories; ++i) {
    StrainHistory h = random_smooth_history(rng, t_end, n_samples);
    for (int j = 1; j <= times_per_history; ++j) {
      double t = t_end * j / times_per_history;
      ModelEnergies e = m.energy_model(x, h, t);
      ++scan.samples;
      if (e.e_D_rate < scan.min_e_D_rate) {
        scan.min_e_D_rate = e.e_D_rate;
        scan.worst.assign(1, DissipationSample{t, -e.e_D_rate, e.components});
      }
      if (e.e_D_rate < 0.0) ++scan.violations;
    }
  }
  if (scan.samples == 0) scan.min_e_D_rate = 0.0;
  return scan;
}

} // namespace vwave
