#pragma once

// Generators and independent reference oracles shared by the test binaries.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include "eprb.hpp"

namespace testing_support {

using eprb::UnitVector3;

inline UnitVector3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    const double x = g(rng), y = g(rng), z = g(rng);
    const double n = std::sqrt(x * x + y * y + z * z);
    if (n > 1e-6) return UnitVector3::normalized(x, y, z);
  }
}

inline eprb::SettingsQuad random_quad(std::mt19937_64& rng) {
  return {random_unit(rng), random_unit(rng), random_unit(rng), random_unit(rng)};
}

inline std::complex<double> random_disc(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  for (;;) {
    const std::complex<double> z(u(rng), u(rng));
    if (std::abs(z) <= radius) return z;
  }
}

inline eprb::LambdaSample sphere_lambda(std::mt19937_64& rng) {
  const UnitVector3 v = random_unit(rng);
  return eprb::LambdaSample{{v.x(), v.y(), v.z()}};
}

// Midpoint rule for int_{-1}^{1} g(z) dz / 2, i.e. the average of g(lambda_z) over the
// uniform sphere (Archimedes: lambda_z is uniform on [-1, 1]).
template <class G>
double sphere_z_average(G&& g, int cells = 200000) {
  double s = 0.0;
  const double w = 2.0 / cells;
  for (int i = 0; i < cells; ++i) s += g(-1.0 + (i + 0.5) * w);
  return s * w / 2.0;
}

// Sign model A = sign(a.l), B = -sign(b.l) with a = e_z, b = (sin t, 0, cos t).
// For fixed lambda_z the azimuthal fraction with b.l >= 0 is arccos(-z cot t / rho) / pi,
// leaving a one-dimensional quadrature in z.
inline double sign_model_quadrature(double theta) {
  const double st = std::sin(theta);
  const double ct = std::cos(theta);
  return sphere_z_average([&](double z) {
    const double rho = std::sqrt(1.0 - z * z);
    double frac;
    if (std::abs(st) < 1e-15) {
      frac = ct * z >= 0.0 ? 1.0 : 0.0;
    } else {
      const double t = -z * ct / (st * rho);
      frac = t <= -1.0 ? 1.0 : (t >= 1.0 ? 0.0 : std::acos(t) / std::numbers::pi);
    }
    const double mean_sign_b = 2.0 * frac - 1.0;
    return (z >= 0.0 ? 1.0 : -1.0) * -mean_sign_b;
  });
}

// Second moments E[l_r l_s] over the uniform sphere by a midpoint grid in (z, azimuth).
struct MomentMatrix {
  double m[3][3] = {};
};

inline MomentMatrix sphere_second_moments(int nz = 400, int nphi = 400) {
  MomentMatrix out;
  const double dz = 2.0 / nz;
  const double dphi = 2.0 * std::numbers::pi / nphi;
  for (int i = 0; i < nz; ++i) {
    const double z = -1.0 + (i + 0.5) * dz;
    const double rho = std::sqrt(1.0 - z * z);
    for (int j = 0; j < nphi; ++j) {
      const double phi = (j + 0.5) * dphi;
      const double l[3] = {rho * std::cos(phi), rho * std::sin(phi), z};
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) out.m[r][s] += l[r] * l[s];
    }
  }
  for (auto& row : out.m)
    for (double& v : row) v /= static_cast<double>(nz) * nphi;
  return out;
}

// Four nested loops straight from the series definition, with std::pow.
inline double brute_force_series(const eprb::RealAnalyticCoefficients& c, const UnitVector3& a,
                                 const UnitVector3& b) {
  const double av[3] = {a.x(), a.y(), a.z()};
  const double bv[3] = {b.x(), b.y(), b.z()};
  double total = c.includes_constant_term() ? c.constant_term() : 0.0;
  for (std::size_t i = 1; i <= c.degree(); ++i)
    for (std::size_t j = 1; j <= c.degree(); ++j)
      for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t s = 0; s < 3; ++s)
          total += c.at(i, j, r, s) * std::pow(av[r], static_cast<double>(i)) *
                   std::pow(bv[s], static_cast<double>(j));
  return total;
}

// d/dz' of (1 - z z') / (1 + z z'), worked out by hand: -2 z / (1 + |z|^2)^2.
inline std::complex<double> pq_infinity_wirtinger(std::complex<double> z) {
  const double d = 1.0 + std::norm(z);
  return -2.0 * z / (d * d);
}

inline eprb::CorrelationOracle oracle_for(const std::string& name, std::uint64_t seed,
                                          std::size_t n, bool closed_form = false) {
  eprb::ModelSpec spec;
  spec.name = name;
  eprb::OracleOptions opt;
  opt.n = n;
  opt.closed_form = closed_form;
  return eprb::make_oracle(eprb::make_model(spec), eprb::LambdaSampler::uniform_sphere(seed), opt);
}

}  // namespace testing_support
