#include "vwave/kelvin.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <ostream>
#include <sstream>

namespace vwave {

namespace {
const double kSqrt2 = std::sqrt(2.0);

using EMat6 = Eigen::Matrix<double, 6, 6>;

EMat6 to_eigen(const Kelvin66& k) {
  EMat6 m;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) m(i, j) = k(i, j);
  return m;
}

Kelvin66 from_eigen(const EMat6& m) {
  Kelvin66 k;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) k(i, j) = m(i, j);
  return k;
}
} // namespace

Vec6 SymTensor2::kelvin() const {
  return {xx_, yy_, zz_, kSqrt2 * yz_, kSqrt2 * zx_, kSqrt2 * xy_};
}

SymTensor2 SymTensor2::from_kelvin(const Vec6& v) {
  return {v[0], v[1], v[2], v[3] / kSqrt2, v[4] / kSqrt2, v[5] / kSqrt2};
}

SymTensor2& SymTensor2::operator+=(const SymTensor2& o) {
  xx_ += o.xx_; yy_ += o.yy_; zz_ += o.zz_;
  yz_ += o.yz_; zx_ += o.zx_; xy_ += o.xy_;
  return *this;
}

SymTensor2& SymTensor2::operator-=(const SymTensor2& o) {
  xx_ -= o.xx_; yy_ -= o.yy_; zz_ -= o.zz_;
  yz_ -= o.yz_; zx_ -= o.zx_; xy_ -= o.xy_;
  return *this;
}

SymTensor2& SymTensor2::operator*=(double s) {
  xx_ *= s; yy_ *= s; zz_ *= s;
  yz_ *= s; zx_ *= s; xy_ *= s;
  return *this;
}

double double_dot(const SymTensor2& a, const SymTensor2& b) {
  return a.xx() * b.xx() + a.yy() * b.yy() + a.zz() * b.zz() +
         2.0 * (a.yz() * b.yz() + a.zx() * b.zx() + a.xy() * b.xy());
}

Kelvin66::Kelvin66() = default;

Kelvin66 Kelvin66::identity() {
  Kelvin66 k;
  for (int i = 0; i < 6; ++i) k(i, i) = 1.0;
  return k;
}

Kelvin66 Kelvin66::trace_projector() {
  Kelvin66 k;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) k(i, j) = 1.0;
  return k;
}

SymTensor2 Kelvin66::apply(const SymTensor2& m) const {
  return SymTensor2::from_kelvin(apply(m.kelvin()));
}

Vec6 Kelvin66::apply(const Vec6& v) const {
  Vec6 r{};
  for (int i = 0; i < 6; ++i) {
    double s = 0.0;
    for (int j = 0; j < 6; ++j) s += m_[i * 6 + j] * v[j];
    r[i] = s;
  }
  return r;
}

Vec6 Kelvin66::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<EMat6> es(to_eigen(*this),
                                          Eigen::EigenvaluesOnly);
  Vec6 ev;
  for (int i = 0; i < 6; ++i) ev[i] = es.eigenvalues()(i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

bool Kelvin66::is_symmetric(double tol) const {
  double scale = frobenius_norm();
  double bound = tol * std::max(scale, 1e-300);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      if (std::abs((*this)(i, j) - (*this)(j, i)) > bound) return false;
  return true;
}

bool Kelvin66::is_psd(double tol) const {
  Vec6 ev = eigenvalues();
  double scale = std::max(std::abs(ev[0]), std::abs(ev[5]));
  return ev[0] >= -tol * std::max(scale, 1e-300);
}

bool Kelvin66::is_pd(double tol) const {
  Vec6 ev = eigenvalues();
  double scale = std::max(std::abs(ev[0]), std::abs(ev[5]));
  return ev[0] > tol * scale && ev[0] > 0.0;
}

Kelvin66 Kelvin66::inverse() const {
  Vec6 ev = eigenvalues();
  double scale = std::max(std::abs(ev[0]), std::abs(ev[5]));
  if (!(ev[0] > 1e-14 * scale) || !(ev[0] > 0.0)) {
    std::ostringstream msg;
    msg << "Kelvin matrix not invertible: min eigenvalue " << ev[0];
    throw SingularStiffness(msg.str());
  }
  EMat6 inv = to_eigen(*this).inverse();
  // Symmetrize to kill roundoff asymmetry from the LU path.
  EMat6 sym = 0.5 * (inv + inv.transpose());
  return from_eigen(sym);
}

Kelvin66& Kelvin66::operator+=(const Kelvin66& o) {
  for (int i = 0; i < 36; ++i) m_[i] += o.m_[i];
  return *this;
}

Kelvin66& Kelvin66::operator-=(const Kelvin66& o) {
  for (int i = 0; i < 36; ++i) m_[i] -= o.m_[i];
  return *this;
}

Kelvin66& Kelvin66::operator*=(double s) {
  for (double& x : m_) x *= s;
  return *this;
}

Kelvin66 matmul(const Kelvin66& a, const Kelvin66& b) {
  Kelvin66 r;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double s = 0.0;
      for (int k = 0; k < 6; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

double Kelvin66::frobenius_norm() const {
  double s = 0.0;
  for (double x : m_) s += x * x;
  return std::sqrt(s);
}

StiffnessTensor isotropic_stiffness(double lambda, double mu) {
  StiffnessTensor c;
  c.kelvin = lambda * Kelvin66::trace_projector() +
             (2.0 * mu) * Kelvin66::identity();
  return c;
}

ComplianceTensor invert(const StiffnessTensor& c, double tol) {
  Vec6 ev = c.kelvin.eigenvalues();
  double scale = std::max(std::abs(ev[0]), std::abs(ev[5]));
  if (!(ev[0] > tol * scale) || !(ev[0] > 0.0)) {
    std::ostringstream msg;
    msg << "stiffness not positive definite: min eigenvalue " << ev[0];
    throw SingularStiffness(msg.str());
  }
  return ComplianceTensor{c.kelvin.inverse()};
}

std::string to_upper21(const Kelvin66& k) {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) {
      if (!first) os << ' ';
      os << k(i, j);
      first = false;
    }
  return os.str();
}

Kelvin66 from_upper21(const double* e) {
  Kelvin66 k;
  int n = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) {
      k(i, j) = e[n];
      k(j, i) = e[n];
      ++n;
    }
  return k;
}

std::ostream& operator<<(std::ostream& os, const StiffnessTensor& c) {
  return os << to_upper21(c.kelvin);
}

} // namespace vwave
