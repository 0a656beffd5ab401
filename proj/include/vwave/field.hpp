#ifndef VWAVE_FIELD_HPP
#define VWAVE_FIELD_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "vwave/errors.hpp"

namespace vwave {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

// Uniform cell grid; values live at cell centers unless stated otherwise.
struct Grid {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  double x0 = 0.0;  // lower-left corner of cell (0,0)
  double y0 = 0.0;

  double cx(int i) const { return x0 + (i + 0.5) * dx; }
  double cy(int j) const { return y0 + (j + 0.5) * dy; }
  double width() const { return nx * dx; }
  double height() const { return ny * dy; }
  double cell_area() const { return dx * dy; }

  int clamp_i(double x) const {
    int i = static_cast<int>(std::floor((x - x0) / dx));
    return std::clamp(i, 0, nx - 1);
  }
  int clamp_j(double y) const {
    int j = static_cast<int>(std::floor((y - y0) / dy));
    return std::clamp(j, 0, ny - 1);
  }

  void validate() const {
    if (nx < 8 || ny < 8) throw ConfigError("grid must be at least 8x8 cells");
    if (!(dx > 0.0) || !(dy > 0.0)) throw ConfigError("grid spacings must be positive");
  }
};

// Plain 2D array of doubles with its own dimensions (cell, face or corner
// counts depending on use).
struct Field2D {
  int nx = 0;
  int ny = 0;
  std::vector<double> a;

  Field2D() = default;
  Field2D(int nx_, int ny_, double fill = 0.0)
      : nx(nx_), ny(ny_), a(static_cast<size_t>(nx_) * ny_, fill) {}

  double operator()(int i, int j) const { return a[static_cast<size_t>(j) * nx + i]; }
  double& operator()(int i, int j) { return a[static_cast<size_t>(j) * nx + i]; }
  size_t size() const { return a.size(); }
  void fill(double v) { std::fill(a.begin(), a.end(), v); }
};

// A scalar material parameter: either a constant or a per-cell sampled field
// (piecewise constant per cell).
class ScalarParam {
public:
  ScalarParam() : c_(0.0) {}
  ScalarParam(double c) : c_(c) {}  // NOLINT: implicit by design
  static ScalarParam sampled(Field2D f, const Grid& g) {
    ScalarParam p(0.0);
    p.f_ = std::move(f);
    p.grid_ = g;
    return p;
  }

  bool is_constant() const { return !f_.has_value(); }
  double constant() const { return c_; }

  double at_cell(int i, int j) const {
    if (!f_) return c_;
    return (*f_)(i, j);
  }
  double operator()(const Vec2& x) const {
    if (!f_) return c_;
    return (*f_)(grid_->clamp_i(x.x), grid_->clamp_j(x.y));
  }
  // Harmonic mean of the four cells around corner (i+1/2, j+1/2); used for
  // modulus-like parameters at staggered shear-stress points.
  double harmonic_corner(int i, int j) const {
    if (!f_) return c_;
    double s = 0.0;
    for (int dj = 0; dj <= 1; ++dj)
      for (int di = 0; di <= 1; ++di) {
        double v = (*f_)(std::min(i + di, f_->nx - 1), std::min(j + dj, f_->ny - 1));
        if (v <= 0.0) throw ConfigError("harmonic averaging needs positive values");
        s += 1.0 / v;
      }
    return 4.0 / s;
  }
  double min_value() const {
    if (!f_) return c_;
    return *std::min_element(f_->a.begin(), f_->a.end());
  }
  double max_value() const {
    if (!f_) return c_;
    return *std::max_element(f_->a.begin(), f_->a.end());
  }
  // Elementwise transform (e.g. reciprocal of a relaxation-time field).
  template <class Fn>
  ScalarParam map(Fn fn) const {
    if (!f_) return ScalarParam(fn(c_));
    ScalarParam p = *this;
    for (double& v : p.f_->a) v = fn(v);
    return p;
  }

private:
  double c_;
  std::optional<Field2D> f_;
  std::optional<Grid> grid_;
};

// Sampled time table with linear interpolation and constant extrapolation,
// used for aging coefficients. Monotonicity (non-increasing values) is
// validated at load; slopes are the exact piecewise-linear slopes.
class AgingTable {
public:
  AgingTable() = default;
  AgingTable(std::vector<double> times, std::vector<double> values);

  static AgingTable constant() {
    return AgingTable({0.0}, {1.0});
  }

  double value(double t) const;
  double slope(double t) const;
  bool is_trivial() const { return t_.size() <= 1; }
  double min_value() const { return v_.empty() ? 1.0 : v_.back(); }
  double max_value() const { return v_.empty() ? 1.0 : v_.front(); }

private:
  std::vector<double> t_;
  std::vector<double> v_;
};

} // namespace vwave

#endif
