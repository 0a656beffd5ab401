#ifndef VWAVE_CONSTITUTIVE_HPP
#define VWAVE_CONSTITUTIVE_HPP

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vwave/field.hpp"
#include "vwave/history.hpp"
#include "vwave/kelvin.hpp"
#include "vwave/mittag_leffler.hpp"

namespace vwave {

// One additive contribution to the stiffness kernel:
//   coeff(x) * aging(t) * weight * S * exp(-rate(x) * (t - s))
// where S is one of the three structures below. rate == 0 gives a
// non-decaying (static or aging) part.
struct KernelTerm {
  enum class Structure { TraceProjector, Identity, Matrix };

  ScalarParam coeff{1.0};
  AgingTable aging = AgingTable::constant();
  double weight = 1.0;
  ScalarParam rate{0.0};
  Structure structure = Structure::Identity;
  Kelvin66 matrix;  // only for Structure::Matrix

  bool is_static(const Vec2& x) const { return rate(x) == 0.0; }
  double scale(const Vec2& x, double t) const {
    return coeff(x) * aging.value(t) * weight;
  }
  double scale_dt(const Vec2& x, double t) const {
    return coeff(x) * aging.slope(t) * weight;
  }
  Kelvin66 structure_kelvin() const;
  // S applied to a tensor (no scaling).
  SymTensor2 apply_structure(const SymTensor2& v) const;
};

struct GenericEnergies {
  double e_S = 0.0;  // 1/2 sigma : S sigma
  double F = 0.0;    // sigma : S sigma_tilde + 1/2 sigma : S_t sigma
};

struct ModelEnergies {
  double e_S = 0.0;
  double e_D_rate = 0.0;
  std::vector<double> components;  // per-member e_D_rate for superposed kinds
};

struct DissipationSample {
  double time = 0.0;
  double F_value = 0.0;  // -e_D_rate of the certified decomposition
  std::vector<double> components;
};

class MaterialModel {
public:
  using Ptr = std::shared_ptr<const MaterialModel>;

  enum class Kind {
    Elastic,
    ExpConvIso,
    GLSM,
    AgingIso,
    AgingPlusExp,
    FractionalZener,
    SuperposedSum,
    SuperposedIntegral,
    GenericKernel,
    ExpTensor,  // single exponential branch with a tensor weight
  };

  virtual ~MaterialModel() = default;
  virtual Kind kind() const = 0;
  virtual std::string name() const;

  // Kernel evaluation; 0 <= s <= t enforced (OutOfOrder).
  virtual StiffnessTensor eval_C(const Vec2& x, double t, double s) const = 0;
  virtual StiffnessTensor eval_Ct(const Vec2& x, double t, double s) const = 0;
  StiffnessTensor instantaneous(const Vec2& x, double t) const {
    return eval_C(x, t, t);
  }
  // Total derivative d/dt of C(x,t,t); zero for convolution kernels.
  virtual StiffnessTensor instantaneous_dt(const Vec2& x, double t) const = 0;

  ComplianceTensor compliance(const Vec2& x, double t) const {
    return invert(instantaneous(x, t));
  }

  // sigma(t) = int_0^t C(t,s) eps_s ds and sigma_tilde = int_0^t C_t(t,s) eps_s ds.
  virtual SymTensor2 stress(const Vec2& x, const StrainHistory& h, double t) const = 0;
  virtual SymTensor2 sigma_tilde(const Vec2& x, const StrainHistory& h, double t) const = 0;

  // The kind's certified strain-energy / dissipation-rate pair; throws
  // UnsupportedKind for GenericKernel.
  virtual ModelEnergies energy_model(const Vec2& x, const StrainHistory& h,
                                     double t) const = 0;

  // Speed-bound density rho*c^2: the refined per-kind value and the value
  // used by the general theorems (spectral for monolithic kernels, member
  // sums for superposed structures).
  virtual double speed_lambda_model(const Vec2& x, double t) const = 0;
  virtual double speed_lambda_generic(const Vec2& x, double t) const;

  // Finite-sum exponential decomposition backing the solver and the
  // state-based energies. Terms with rate > 0 are memory branches, in order.
  virtual const std::vector<KernelTerm>& solver_terms() const;
  std::vector<size_t> branch_term_indices() const;

  // Energies from current state (strain + one memory tensor per branch);
  // single formula source shared by history-based and solver-based paths.
  virtual ModelEnergies energy_from_state(const Vec2& x, double t,
                                          const SymTensor2& eps,
                                          std::span<const SymTensor2> branches) const = 0;

  // Stress assembled from current state via solver_terms().
  SymTensor2 stress_from_state(const Vec2& x, double t, const SymTensor2& eps,
                               std::span<const SymTensor2> branches) const;
};

// Generic (Lemma-3.2-style) densities from sigma, sigma_tilde, S, S_t.
GenericEnergies energy_densities_generic(const MaterialModel& m, const Vec2& x,
                                         const StrainHistory& h, double t);

// F^B for a user-chosen symmetric positive definite B(t) (Kelvin 6x6);
// B = S reproduces the generic F.
double check_F_B(const MaterialModel& m,
                 const std::function<Kelvin66(double)>& B, const Vec2& x,
                 const StrainHistory& h, double t);

// sigma:eps_dot - (d/dt e_S + e_D_rate), with d/dt e_S by a centered
// difference of half the local sample spacing. Second-order small.
enum class EnergyChoice { Generic, Model };
double work_decomposition_residual(const MaterialModel& m, const Vec2& x,
                                   const StrainHistory& h, double t,
                                   EnergyChoice which);

// Sufficient condition of the exponential-form kernel C(t,s) = e^{-tA} C0(s):
// C0 SPD, C0' PSD, A PSD, and both commutators vanish, all sampled on
// [0, s_max].
bool check_exponential_sufficient(const Kelvin66& A,
                                  const std::function<Kelvin66(double)>& C0,
                                  double tol, double s_max = 1.0,
                                  int n_samples = 9);

// ---- concrete kinds -------------------------------------------------------

MaterialModel::Ptr make_elastic(ScalarParam lambda, ScalarParam mu);
MaterialModel::Ptr make_exp_conv_iso(ScalarParam lambda, ScalarParam mu,
                                     ScalarParam gamma, ScalarParam tau);

struct GlsmBranch {
  ScalarParam lambda, gamma, mu, tau;
};
MaterialModel::Ptr make_glsm(ScalarParam lambda0, ScalarParam mu0,
                             std::vector<GlsmBranch> branches);

MaterialModel::Ptr make_aging_iso(ScalarParam lambda, ScalarParam mu,
                                  AgingTable lambda_aging, AgingTable mu_aging);
MaterialModel::Ptr make_aging_plus_exp(ScalarParam lambda0, ScalarParam mu0,
                                       AgingTable lambda_aging, AgingTable mu_aging,
                                       std::vector<GlsmBranch> branches);

// Single exponential branch weight*B*e^{-rate (t-s)}; the building block for
// continuous superpositions and the Remark-4.3 style kernels.
MaterialModel::Ptr make_exp_tensor(Kelvin66 B, ScalarParam coeff,
                                   ScalarParam rate);

struct FractionalZenerOptions {
  int prony_nodes = 32;
  double prony_t_min = 1e-3;
  double prony_t_max = 1e3;
};
MaterialModel::Ptr make_fractional_zener(double alpha, double a, Kelvin66 C1,
                                         Kelvin66 M,
                                         FractionalZenerOptions opt = {});

MaterialModel::Ptr superpose_sum(std::vector<MaterialModel::Ptr> members);
MaterialModel::Ptr superpose_integral(
    const std::function<MaterialModel::Ptr(double)>& family,
    const std::vector<double>& nodes, const std::vector<double>& weights);

// Superposed models expose their members for per-member diagnostics.
struct SuperposedView {
  std::vector<std::pair<double, MaterialModel::Ptr>> members;  // (weight, model)
};
std::optional<SuperposedView> superposed_view(const MaterialModel& m);

using KernelFn = std::function<StiffnessTensor(const Vec2&, double, double)>;
MaterialModel::Ptr make_generic_kernel(KernelFn C, KernelFn Ct = nullptr,
                                       double quad_tol = 1e-10);

// ---- speed bounds ---------------------------------------------------------

struct BallRegion {
  Vec2 center;
  double radius = 0.0;
};
enum class BoundKind { Generic, Model };

double speed_bound(const MaterialModel& m, const ScalarParam& rho,
                   const BallRegion& region, double t_max, BoundKind kind,
                   int n_xy = 33, int n_t = 33);
inline double speed_bound_generic(const MaterialModel& m, const ScalarParam& rho,
                                  const BallRegion& region, double t_max) {
  return speed_bound(m, rho, region, t_max, BoundKind::Generic);
}
inline double speed_bound_model(const MaterialModel& m, const ScalarParam& rho,
                                const BallRegion& region, double t_max) {
  return speed_bound(m, rho, region, t_max, BoundKind::Model);
}

// ---- dissipation property checks -----------------------------------------

// Search for a history making the generic F positive for an exponential
// convolution model with slow trace relaxation (gamma >> 1). Two-segment
// trace-only candidates, coordinate refinement, bounded evaluation budget.
struct FViolation {
  bool found = false;
  int evaluations = 0;
  double F_generic = 0.0;
  double e_D_model = 0.0;
  StrainHistory history;
  double t = 0.0;
};
FViolation find_generic_F_violation(const MaterialModel& exp_conv_iso,
                                    int max_evaluations = 10000);

// Sample the certified dissipation rate of a model over random smooth
// histories; returns the most negative e_D_rate seen (>= 0 means pass).
struct DissipationScan {
  double min_e_D_rate = 0.0;
  int violations = 0;
  int samples = 0;
  std::vector<DissipationSample> worst;
};
DissipationScan scan_dissipation(const MaterialModel& m, std::mt19937_64& rng,
                                 int n_histories, double t_end = 4.0,
                                 int n_samples = 33, int times_per_history = 4);

} // namespace vwave

#endif
