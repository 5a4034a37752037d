#pragma once

// Numerical Cauchy-Riemann diagnostics. The Wirtinger derivative
//   df/dz' = (1/2) (df/dx + i df/dy)
// vanishes exactly where f is complex differentiable, so a clearly nonzero
// central-difference residual witnesses non-analyticity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eprb/correlation.hpp"
#include "eprb/geometry.hpp"

namespace eprb {

using ComplexFunction = std::function<std::complex<double>(std::complex<double>)>;

inline constexpr double kDefaultStep = 1e-4;
inline constexpr double kDefaultResidualTolerance = 1e-5;
inline constexpr double kDefaultRadius = 10.0;
inline constexpr double kRealValuedTolerance = 1e-12;

/// Central-difference estimate of df/dz' at a finite point z, O(h^2) for smooth f.
/// Each partial divides by the representable distance between its two stencil
/// points rather than the nominal 2h, so linear functions come out exact.
inline std::complex<double> wirtinger_residual(const ComplexFunction& f, const RiemannPoint& zp,
                                               double h = kDefaultStep) {
  if (zp.is_infinite()) throw std::invalid_argument("wirtinger_residual needs a finite point");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step h must be positive");
  const std::complex<double> z = zp.value();
  const double x = z.real();
  const double y = z.imag();

  const double xp = x + h;
  const double xm = x - h;
  const double yp = y + h;
  const double ym = y - h;
  const std::complex<double> dfdx =
      (f({xp, y}) - f({xm, y})) / (xp - xm);
  const std::complex<double> dfdy =
      (f({x, yp}) - f({x, ym})) / (yp - ym);
  // (1/2)(f_x + i f_y) written out in components: u_x - v_y and v_x + u_y.
  return {0.5 * (dfdx.real() - dfdy.imag()), 0.5 * (dfdx.imag() + dfdy.real())};
}

enum class Verdict { AnalyticWithin, NonAnalytic };

inline std::string to_string(Verdict v) {
  return v == Verdict::AnalyticWithin ? "analytic_within" : "non_analytic";
}

struct ResidualPoint {
  RiemannPoint z;
  double residual = 0.0;
};

struct ResidualReport {
  std::vector<ResidualPoint> points;
  double max_residual = 0.0;
  double h = kDefaultStep;
  double tol = kDefaultResidualTolerance;
  Verdict verdict = Verdict::AnalyticWithin;
};

/// |df/dz'| at every sample. Verdict is NonAnalytic iff the maximum exceeds tol.
inline ResidualReport residual_report(const ComplexFunction& f, std::span<const RiemannPoint> samples,
                                      double h = kDefaultStep,
                                      double tol = kDefaultResidualTolerance) {
  ResidualReport r;
  r.h = h;
  r.tol = tol;
  r.points.reserve(samples.size());
  for (const RiemannPoint& z : samples) {
    const double res = std::abs(wirtinger_residual(f, z, h));
    r.points.push_back({z, res});
    r.max_residual = std::max(r.max_residual, res);
  }
  r.verdict = r.max_residual > tol ? Verdict::NonAnalytic : Verdict::AnalyticWithin;
  return r;
}

struct ConstancyResult {
  Verdict analytic = Verdict::AnalyticWithin;
  double spread = 0.0;  // max f - min f over the samples
  bool constant = true;  // spread <= tol
  ResidualReport report;

  /// Residual-flat, real-valued and yet varying: what the constancy theorem forbids.
  bool contradicts_constancy() const {
    return analytic == Verdict::AnalyticWithin && !constant;
  }
};

/// For a real-valued f: are the CR residuals flat, and is f constant over the samples?
/// A non-real value (|Im f| >= 1e-12) puts f outside the theorem and is rejected.
inline ConstancyResult constancy_check(const ComplexFunction& f,
                                       std::span<const RiemannPoint> samples,
                                       double tol = kDefaultResidualTolerance,
                                       double h = kDefaultStep) {
  if (samples.size() < 2) throw std::invalid_argument("constancy_check needs at least 2 samples");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const RiemannPoint& z : samples) {
    const std::complex<double> v = f(z.value());
    if (!(std::abs(v.imag()) < kRealValuedTolerance)) {
      throw std::invalid_argument("function is not real-valued at a sample point");
    }
    lo = std::min(lo, v.real());
    hi = std::max(hi, v.real());
  }
  ConstancyResult out;
  out.report = residual_report(f, samples, h, tol);
  out.analytic = out.report.verdict;
  out.spread = hi - lo;
  out.constant = out.spread <= tol;
  return out;
}

/// Square k x k grid over [-R, R]^2 keeping points with |z| <= R.
inline std::vector<RiemannPoint> disc_grid(double radius, std::size_t k) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("radius must be > 0");
  if (k < 2) throw std::invalid_argument("grid resolution must be >= 2");
  std::vector<RiemannPoint> pts;
  const double step = 2.0 * radius / static_cast<double>(k - 1);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double x = -radius + step * static_cast<double>(i);
      const double y = -radius + step * static_cast<double>(j);
      if (std::hypot(x, y) <= radius * (1.0 + 1e-12)) pts.emplace_back(x, y);
    }
  }
  return pts;
}

/// z -> P_Q(z, w) as a complex function (zero imaginary part).
inline ComplexFunction pq_slice(const RiemannPoint& w) {
  return [w](std::complex<double> z) {
    return std::complex<double>(quantum_correlation_complex(RiemannPoint(z), w), 0.0);
  };
}

/// Residuals of z -> P_Q(z, w) over the disc |z| <= R.
inline ResidualReport pq_nonanalyticity_report(const RiemannPoint& w, double radius = 1.0,
                                               std::size_t k = 21, double h = kDefaultStep,
                                               double tol = kDefaultResidualTolerance) {
  if (radius > kDefaultRadius) {
    throw std::invalid_argument("residual grids are limited to |z| <= " +
                                std::to_string(kDefaultRadius));
  }
  const std::vector<RiemannPoint> grid = disc_grid(radius, k);
  return residual_report(pq_slice(w), grid, h, tol);
}

}  // namespace eprb
