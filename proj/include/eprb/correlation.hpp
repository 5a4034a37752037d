#pragma once

// Correlation functions P(a, b; psi): Monte Carlo estimators for the hidden-variable
// model families and the closed-form quantum correlation in real and complex
// coordinates.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "eprb/geometry.hpp"
#include "eprb/hidden_variables.hpp"
#include "eprb/models.hpp"

namespace eprb {

struct CorrelationEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  bool exact = false;

  static CorrelationEstimate closed_form(double v) { return {v, 0.0, 0, true}; }
  static CorrelationEstimate from(const MonteCarloEstimate& mc) {
    return {mc.mean, mc.std_error, mc.n, false};
  }
};

/// lambda-averaged products P1(mu) P2(nu) for the four outcome pairs.
struct JointTable {
  struct Entry {
    double p = 0.0;
    double std_error = 0.0;
  };
  Entry pp, mm, pm, mp;
  std::size_t n = 0;

  double sum() const { return pp.p + mm.p + pm.p + mp.p; }
  /// P(+,+) + P(-,-) - P(+,-) - P(-,+)
  double correlation() const { return pp.p + mm.p - pm.p - mp.p; }
};

/// P(a, b) = int d(lambda) rho A B for a dichotomic model.
inline CorrelationEstimate estimate_correlation(const DeterministicModel& m, const UnitVector3& a,
                                                const UnitVector3& b, const LambdaSampler& s,
                                                std::size_t n, Parallelism par = {}) {
  const auto mc = integrate(
      [&](const LambdaSample& l) {
        return static_cast<double>(evaluate_deterministic(m, a, b, l).product());
      },
      s, n, par);
  return CorrelationEstimate::from(mc);
}

/// P(a, b) = int d(lambda) rho <A><B> for a factorized stochastic model.
inline CorrelationEstimate estimate_stochastic_correlation(const StochasticModel& m,
                                                           const UnitVector3& a,
                                                           const UnitVector3& b,
                                                           const LambdaSampler& s, std::size_t n,
                                                           Parallelism par = {}) {
  const auto mc = integrate(
      [&](const LambdaSample& l) {
        const auto [ma, mb] = mean_outcomes(m, a, b, l);
        return ma * mb;
      },
      s, n, par);
  return CorrelationEstimate::from(mc);
}

inline JointTable estimate_joint(const StochasticModel& m, const UnitVector3& a,
                                 const UnitVector3& b, const LambdaSampler& s, std::size_t n,
                                 Parallelism par = {}) {
  const auto mc = integrate_many<4>(
      [&](const LambdaSample& l) {
        const SingleProbabilities p = evaluate_stochastic(m, a, b, l);
        return std::array<double, 4>{p.p1_plus * p.p2_plus, p.p1_minus * p.p2_minus,
                                     p.p1_plus * p.p2_minus, p.p1_minus * p.p2_plus};
      },
      s, n, par);
  JointTable t;
  t.pp = {mc[0].mean, mc[0].std_error};
  t.mm = {mc[1].mean, mc[1].std_error};
  t.pm = {mc[2].mean, mc[2].std_error};
  t.mp = {mc[3].mean, mc[3].std_error};
  t.n = n;
  return t;
}

/// Singlet correlation P_Q = -a . b. Identical settings give exactly -1, opposite ones +1.
inline CorrelationEstimate quantum_correlation(const UnitVector3& a, const UnitVector3& b) {
  if (a == b) return CorrelationEstimate::closed_form(-1.0);
  if (a == -b) return CorrelationEstimate::closed_form(1.0);
  return CorrelationEstimate::closed_form(-std::clamp(dot(a, b), -1.0, 1.0));
}

/// P_Q in stereographic coordinates, evaluated from the rational expression
///   -[(z+z')(w+w') - (z'-z)(w'-w) + (1-|z|^2)(1-|w|^2)] / [(1+|z|^2)(1+|w|^2)]
/// with z' = conj(z), and the special values at infinity.
inline double quantum_correlation_complex(const RiemannPoint& zp, const RiemannPoint& wp) {
  if (zp.is_infinite() && wp.is_infinite()) return -1.0;
  auto one_infinite = [](std::complex<double> z) {
    const double n = std::norm(z);
    return (1.0 - n) / (1.0 + n);
  };
  if (wp.is_infinite()) return one_infinite(zp.value());
  if (zp.is_infinite()) return one_infinite(wp.value());

  const std::complex<double> z = zp.value();
  const std::complex<double> w = wp.value();
  const std::complex<double> zc = std::conj(z);
  const std::complex<double> wc = std::conj(w);
  const double nz = std::norm(z);
  const double nw = std::norm(w);
  const std::complex<double> numerator =
      (z + zc) * (w + wc) - (zc - z) * (wc - w) + (1.0 - nz) * (1.0 - nw);
  return -numerator.real() / ((1.0 + nz) * (1.0 + nw));
}

/// Correlation of an anticorrelated series pair, P = int rho A B = -int rho A^2.
/// Built from raw (unclamped) series values.
inline CorrelationEstimate series_correlation(const SeriesPair& pair, const UnitVector3& a,
                                              const UnitVector3& b, const LambdaSampler& s,
                                              std::size_t n, Parallelism par = {}) {
  if (!pair.anticorrelated()) {
    throw std::invalid_argument("series_correlation needs a pair from impose_anticorrelation");
  }
  const auto mc = integrate(
      [&](const LambdaSample& l) { return pair.a_value(a, b, l) * pair.b_value(a, b, l); }, s, n,
      par);
  return CorrelationEstimate::from(mc);
}

/// Series prediction against the quantum one at antiparallel settings (a, -a), where
/// quantum mechanics gives +1 but an anticorrelated series can only give P <= 0.
struct NegativityContrast {
  UnitVector3 a;
  CorrelationEstimate series;
  CorrelationEstimate quantum;
  bool contradicts = false;  // series + 4 sigma stays below the quantum value
};

inline NegativityContrast negativity_contrast(const SeriesPair& pair, const UnitVector3& a,
                                              const LambdaSampler& s, std::size_t n,
                                              Parallelism par = {}) {
  NegativityContrast c;
  c.a = a;
  c.series = series_correlation(pair, a, -a, s, n, par);
  c.quantum = quantum_correlation(a, -a);
  c.contradicts = c.series.value + 4.0 * c.series.std_error < c.quantum.value;
  return c;
}

}  // namespace eprb
