#ifndef VWAVE_KELVIN_HPP
#define VWAVE_KELVIN_HPP

#include <array>
#include <cmath>
#include <iosfwd>

#include "vwave/errors.hpp"

namespace vwave {

using Vec6 = std::array<double, 6>;

// Symmetric second-order tensor in the embedded 3x3 form. Plane-strain 2D
// usage sets the out-of-plane shears (yz, zx) to zero and keeps the zz slot.
//
// Kelvin component order: (xx, yy, zz, sqrt2*yz, sqrt2*zx, sqrt2*xy); the
// sqrt(2) scaling on off-diagonal slots makes the Frobenius norm of the
// matrix equal to the Euclidean norm of the 6-vector.
class SymTensor2 {
public:
  constexpr SymTensor2() = default;
  constexpr SymTensor2(double xx, double yy, double zz,
                       double yz, double zx, double xy)
      : xx_(xx), yy_(yy), zz_(zz), yz_(yz), zx_(zx), xy_(xy) {}

  static constexpr SymTensor2 zero() { return {}; }
  static constexpr SymTensor2 identity() { return {1, 1, 1, 0, 0, 0}; }
  // Plane-strain helper: in-plane components only, zz and out-of-plane zero.
  static constexpr SymTensor2 plane(double xx, double yy, double xy) {
    return {xx, yy, 0.0, 0.0, 0.0, xy};
  }

  constexpr double xx() const { return xx_; }
  constexpr double yy() const { return yy_; }
  constexpr double zz() const { return zz_; }
  constexpr double yz() const { return yz_; }
  constexpr double zx() const { return zx_; }
  constexpr double xy() const { return xy_; }

  Vec6 kelvin() const;
  static SymTensor2 from_kelvin(const Vec6& v);

  constexpr double trace() const { return xx_ + yy_ + zz_; }
  // Frobenius norm of the full 3x3 matrix.
  double norm() const { return std::sqrt(norm2()); }
  constexpr double norm2() const {
    return xx_ * xx_ + yy_ * yy_ + zz_ * zz_ +
           2.0 * (yz_ * yz_ + zx_ * zx_ + xy_ * xy_);
  }

  SymTensor2& operator+=(const SymTensor2& o);
  SymTensor2& operator-=(const SymTensor2& o);
  SymTensor2& operator*=(double s);

  friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
  friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
  friend SymTensor2 operator*(SymTensor2 a, double s) { return a *= s; }
  friend SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }
  friend SymTensor2 operator-(const SymTensor2& a) { return a * -1.0; }

private:
  double xx_ = 0, yy_ = 0, zz_ = 0, yz_ = 0, zx_ = 0, xy_ = 0;
};

// Componentwise inner product a_ij b_ij (the paper's colon product); equals
// the dot product of the two Kelvin vectors.
double double_dot(const SymTensor2& a, const SymTensor2& b);

// Symmetric 6x6 matrix in Kelvin notation; the shared machinery behind
// stiffness and compliance tensors. Row-major storage of all 36 entries,
// kept symmetric by construction.
class Kelvin66 {
public:
  Kelvin66();

  static Kelvin66 zero() { return {}; }
  static Kelvin66 identity();
  // Rank-one trace projector I (x) I: ones in the upper-left 3x3 block.
  static Kelvin66 trace_projector();

  double operator()(int i, int j) const { return m_[i * 6 + j]; }
  double& operator()(int i, int j) { return m_[i * 6 + j]; }
  const std::array<double, 36>& data() const { return m_; }

  SymTensor2 apply(const SymTensor2& m) const;
  Vec6 apply(const Vec6& v) const;

  // Eigenvalues of the symmetric Kelvin matrix, ascending. These are the
  // tensor eigenvalues (Kelvin conversion preserves the spectrum).
  Vec6 eigenvalues() const;
  double max_eigenvalue() const { return eigenvalues()[5]; }
  double min_eigenvalue() const { return eigenvalues()[0]; }

  bool is_symmetric(double tol = 1e-12) const;
  // Definiteness with a relative tolerance: min eigenvalue >= -tol*scale
  // (resp. > tol*scale), scale = max(|eigenvalues|).
  bool is_psd(double tol = 1e-10) const;
  bool is_pd(double tol = 1e-10) const;

  Kelvin66 inverse() const;  // throws SingularStiffness

  Kelvin66& operator+=(const Kelvin66& o);
  Kelvin66& operator-=(const Kelvin66& o);
  Kelvin66& operator*=(double s);
  friend Kelvin66 operator+(Kelvin66 a, const Kelvin66& b) { return a += b; }
  friend Kelvin66 operator-(Kelvin66 a, const Kelvin66& b) { return a -= b; }
  friend Kelvin66 operator*(Kelvin66 a, double s) { return a *= s; }
  friend Kelvin66 operator*(double s, Kelvin66 a) { return a *= s; }
  // Matrix product (composition of the corresponding 4-tensors on Kelvin
  // vectors); generally not symmetric, used for commutator checks.
  friend Kelvin66 matmul(const Kelvin66& a, const Kelvin66& b);

  double frobenius_norm() const;

private:
  std::array<double, 36> m_{};
};

// Stiffness 4-tensor (stress units) as its Kelvin 6x6 matrix.
struct StiffnessTensor {
  Kelvin66 kelvin;

  SymTensor2 apply(const SymTensor2& m) const { return kelvin.apply(m); }
  Vec6 eigenvalues() const { return kelvin.eigenvalues(); }
  double lambda_max() const { return kelvin.max_eigenvalue(); }
  bool is_psd(double tol = 1e-10) const { return kelvin.is_psd(tol); }
  bool is_pd(double tol = 1e-10) const { return kelvin.is_pd(tol); }

  StiffnessTensor& operator+=(const StiffnessTensor& o) { kelvin += o.kelvin; return *this; }
  friend StiffnessTensor operator+(StiffnessTensor a, const StiffnessTensor& b) { return a += b; }
  friend StiffnessTensor operator-(StiffnessTensor a, const StiffnessTensor& b) {
    a.kelvin -= b.kelvin; return a;
  }
  friend StiffnessTensor operator*(StiffnessTensor a, double s) { a.kelvin *= s; return a; }
  friend StiffnessTensor operator*(double s, StiffnessTensor a) { a.kelvin *= s; return a; }
};

// Compliance 4-tensor (inverse-stress units); inverse of an instantaneous
// stiffness.
struct ComplianceTensor {
  Kelvin66 kelvin;

  SymTensor2 apply(const SymTensor2& m) const { return kelvin.apply(m); }
  Vec6 eigenvalues() const { return kelvin.eigenvalues(); }
};

// lambda I(x)I + 2 mu Isym in Kelvin form. Negative inputs are allowed;
// definiteness is a separate check.
StiffnessTensor isotropic_stiffness(double lambda, double mu);

ComplianceTensor invert(const StiffnessTensor& c, double tol = 1e-10);

// Textual serialization: the 21 upper-triangle Kelvin entries, row-major,
// whitespace separated (model-file format).
std::string to_upper21(const Kelvin66& k);
Kelvin66 from_upper21(const double* entries);  // expects 21 values
std::ostream& operator<<(std::ostream& os, const StiffnessTensor& c);

} // namespace vwave

#endif
