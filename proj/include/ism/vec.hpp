// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <string>

namespace ism {

/// Euclidean point / direction in 2 or 3 dimensions (meters, or
/// dimensionless when used as a direction).  Value-semantic; operations
/// never mix dimensions.
class Vec {
 public:
  Vec() = default;
  constexpr Vec(double x, double y) : c_{x, y, 0.0}, dim_(2) {}
  constexpr Vec(double x, double y, double z) : c_{x, y, z}, dim_(3) {}

  static Vec zero(int dim) { return dim == 2 ? Vec(0, 0) : Vec(0, 0, 0); }

  int dim() const { return dim_; }
  bool empty() const { return dim_ == 0; }

  double operator[](int i) const {
    assert(i >= 0 && i < dim_);
    return c_[static_cast<std::size_t>(i)];
  }
  double& operator[](int i) {
    assert(i >= 0 && i < dim_);
    return c_[static_cast<std::size_t>(i)];
  }

  double x() const { return c_[0]; }
  double y() const { return c_[1]; }
  double z() const { assert(dim_ == 3); return c_[2]; }

  Vec operator+(const Vec& o) const {
    assert(dim_ == o.dim_);
    Vec r = *this;
    for (int i = 0; i < dim_; ++i) r[i] += o[i];
    return r;
  }
  Vec operator-(const Vec& o) const {
    assert(dim_ == o.dim_);
    Vec r = *this;
    for (int i = 0; i < dim_; ++i) r[i] -= o[i];
    return r;
  }
  Vec operator*(double s) const {
    Vec r = *this;
    for (int i = 0; i < dim_; ++i) r[i] *= s;
    return r;
  }
  friend Vec operator*(double s, const Vec& v) { return v * s; }
  Vec operator-() const { return *this * -1.0; }

  double dot(const Vec& o) const {
    assert(dim_ == o.dim_);
    double s = 0;
    for (int i = 0; i < dim_; ++i) s += c_[static_cast<std::size_t>(i)] * o[i];
    return s;
  }

  double norm() const { return std::sqrt(dot(*this)); }
  double squared_norm() const { return dot(*this); }

  /// Unit vector in the same direction; {0,...} when the norm is <= eps.
  Vec normalized(double eps = 1e-300) const {
    double n = norm();
    if (n <= eps) return zero(dim_);
    return *this * (1.0 / n);
  }

  bool finite() const {
    for (int i = 0; i < dim_; ++i)
      if (!std::isfinite(c_[static_cast<std::size_t>(i)])) return false;
    return true;
  }

  bool operator==(const Vec& o) const {
    if (dim_ != o.dim_) return false;
    for (int i = 0; i < dim_; ++i)
      if (c_[static_cast<std::size_t>(i)] != o[i]) return false;
    return true;
  }
  bool operator!=(const Vec& o) const { return !(*this == o); }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < dim_; ++i) {
      if (i) s += ", ";
      s += std::to_string(c_[static_cast<std::size_t>(i)]);
    }
    return s + ")";
  }

 private:
  std::array<double, 3> c_{0.0, 0.0, 0.0};
  int dim_ = 0;
};

inline double distance(const Vec& a, const Vec& b) { return (a - b).norm(); }

/// 2D cross product (z component).
inline double cross2(const Vec& a, const Vec& b) {
  assert(a.dim() == 2 && b.dim() == 2);
  return a.x() * b.y() - a.y() * b.x();
}

inline Vec cross3(const Vec& a, const Vec& b) {
  assert(a.dim() == 3 && b.dim() == 3);
  return Vec(a.y() * b.z() - a.z() * b.y(),
             a.z() * b.x() - a.x() * b.z(),
             a.x() * b.y() - a.y() * b.x());
}

/// Rotate a 2D vector a quarter turn counterclockwise.
inline Vec perp2(const Vec& a) {
  assert(a.dim() == 2);
  return Vec(-a.y(), a.x());
}

inline bool is_unit(const Vec& v, double tol = 1e-12) {
  return std::abs(v.norm() - 1.0) <= tol;
}

/// True when u and v span the same line (sign-insensitive comparison).
inline bool same_direction_unsigned(const Vec& u, const Vec& v, double tol = 1e-9) {
  return std::abs(std::abs(u.normalized().dot(v.normalized())) - 1.0) <= tol;
}

/// Distance from point p to the segment [a, b]; lambda_out receives the
/// clamped parameter of the closest point.
inline double point_segment_distance(const Vec& p, const Vec& a, const Vec& b,
                                     double* lambda_out = nullptr) {
  Vec d = b - a;
  double len2 = d.squared_norm();
  double lambda = 0.0;
  if (len2 > 0) lambda = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  if (lambda_out) *lambda_out = lambda;
  return distance(p, a + d * lambda);
}

}  // namespace ism
