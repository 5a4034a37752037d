#pragma once

// Measurement directions on S^2 and the Riemann sphere C u {inf}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <variant>

namespace eprb {

/// A direction on the unit sphere: a Stern-Gerlach or polarizer setting.
class UnitVector3 {
public:
  static constexpr double kNormSlack = 1e-9;

  /// The +z axis.
  UnitVector3() = default;

  /// Accepts vectors whose norm is within 1e-9 of one and renormalizes them.
  UnitVector3(double x, double y, double z) {
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormSlack) {
      throw std::invalid_argument("not a unit vector (norm " + std::to_string(norm) + ")");
    }
    assign(x / norm, y / norm, z / norm);
  }

  /// Normalizes any finite nonzero vector.
  static UnitVector3 normalized(double x, double y, double z) {
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!std::isfinite(norm) || norm == 0.0) {
      throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    }
    return UnitVector3(Raw{}, x / norm, y / norm, z / norm);
  }

  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  UnitVector3 operator-() const { return UnitVector3(Raw{}, -x_, -y_, -z_); }

  friend bool operator==(const UnitVector3&, const UnitVector3&) = default;

private:
  struct Raw {};
  UnitVector3(Raw, double x, double y, double z) { assign(x, y, z); }
  void assign(double x, double y, double z) {
    x_ = x;
    y_ = y;
    z_ = z;
  }

  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 1.0;
};

inline double dot(const UnitVector3& a, const UnitVector3& b) {
  return a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
}

/// Angle in [0, pi]. Uses atan2(|a x b|, a.b) with the dot product clamped to
/// [-1, 1], which is exact at a == b and a == -b.
inline double angle_between(const UnitVector3& a, const UnitVector3& b) {
  const double cx = a.y() * b.z() - a.z() * b.y();
  const double cy = a.z() * b.x() - a.x() * b.z();
  const double cz = a.x() * b.y() - a.y() * b.x();
  const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
  return std::atan2(cross, std::clamp(dot(a, b), -1.0, 1.0));
}

/// Setting in the x-z plane: (sin t, 0, cos t).
inline UnitVector3 unit_from_plane_angle(double theta) {
  return UnitVector3::normalized(std::sin(theta), 0.0, std::cos(theta));
}

/// Spherical parameterization: polar angle from +z, azimuth from +x.
inline UnitVector3 unit_from_spherical(double polar, double azimuth) {
  const double s = std::sin(polar);
  return UnitVector3::normalized(s * std::cos(azimuth), s * std::sin(azimuth), std::cos(polar));
}

/// A point of the Riemann sphere. Infinity is its own state, never a large number.
class RiemannPoint {
public:
  struct Infinity {
    friend bool operator==(Infinity, Infinity) { return true; }
  };

  RiemannPoint(double re, double im) : value_(std::complex<double>(re, im)) {
    if (!std::isfinite(re) || !std::isfinite(im)) {
      throw std::invalid_argument("finite Riemann point needs finite coordinates");
    }
  }
  explicit RiemannPoint(std::complex<double> z) : RiemannPoint(z.real(), z.imag()) {}

  static RiemannPoint infinity() { return RiemannPoint(Infinity{}); }

  bool is_infinite() const { return std::holds_alternative<Infinity>(value_); }
  bool is_finite() const { return !is_infinite(); }

  /// The complex coordinate; throws for the point at infinity.
  std::complex<double> value() const {
    if (is_infinite()) throw std::invalid_argument("point at infinity has no finite coordinate");
    return std::get<std::complex<double>>(value_);
  }

  friend bool operator==(const RiemannPoint&, const RiemannPoint&) = default;

private:
  explicit RiemannPoint(Infinity) : value_(Infinity{}) {}
  std::variant<std::complex<double>, Infinity> value_;
};

/// Stereographic projection C u {inf} -> S^2,
/// z = x + iy  ->  (2x, 2y, 1 - |z|^2) / (1 + |z|^2),  inf -> (0, 0, -1).
inline UnitVector3 stereographic_project(const RiemannPoint& p) {
  if (p.is_infinite()) return UnitVector3(0.0, 0.0, -1.0);
  const std::complex<double> z = p.value();
  const double r = std::abs(z);
  if (r <= 1.0) {
    const double r2 = r * r;
    const double d = 1.0 + r2;
    return UnitVector3::normalized(2.0 * z.real() / d, 2.0 * z.imag() / d, (1.0 - r2) / d);
  }
  // Divide through by |z|^2 so huge |z| does not overflow.
  const double q = 1.0 / r;
  const double s = q * q;
  const double d = s + 1.0;
  return UnitVector3::normalized(2.0 * (z.real() * q) * q / d, 2.0 * (z.imag() * q) * q / d,
                                 (s - 1.0) / d);
}

/// Inverse of stereographic_project. The south pole maps to infinity.
inline RiemannPoint inverse_project(const UnitVector3& v) {
  if (v.z() >= 0.0) {
    const double d = 1.0 + v.z();
    return RiemannPoint(v.x() / d, v.y() / d);
  }
  // Southern hemisphere: z = (1 - v_z)(x + iy) / (x^2 + y^2) avoids cancellation in 1 + v_z.
  const double rho2 = v.x() * v.x() + v.y() * v.y();
  if (rho2 == 0.0) return RiemannPoint::infinity();
  const double k = (1.0 - v.z()) / rho2;
  return RiemannPoint(k * v.x(), k * v.y());
}

}  // namespace eprb
