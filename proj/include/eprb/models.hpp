#pragma once

// Hidden-variable model families: deterministic dichotomic models, factorized
// stochastic models, and real-analytic series models in the settings.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "eprb/errors.hpp"
#include "eprb/geometry.hpp"
#include "eprb/hidden_variables.hpp"

namespace eprb {

/// A dichotomic measurement result.
enum class Spin : int { Down = -1, Up = +1 };

inline constexpr int value(Spin s) { return static_cast<int>(s); }

/// sign with sign(0) = +1.
inline constexpr Spin sign_of(double x) { return x >= 0.0 ? Spin::Up : Spin::Down; }

inline constexpr Spin flip(Spin s) { return s == Spin::Up ? Spin::Down : Spin::Up; }

struct Outcomes {
  Spin a = Spin::Up;
  Spin b = Spin::Up;

  int product() const { return value(a) * value(b); }
  friend bool operator==(const Outcomes&, const Outcomes&) = default;
};

enum class LocalityClass { Local, ConstantNonlocal, GeneralNonlocal };

inline std::string to_string(LocalityClass c) {
  switch (c) {
    case LocalityClass::Local: return "local";
    case LocalityClass::ConstantNonlocal: return "constant_nonlocal";
    case LocalityClass::GeneralNonlocal: return "general_nonlocal";
  }
  return "unknown";
}

/// Setting-pair function with a known closed form (used for exact oracles).
using ClosedForm = std::function<double(const UnitVector3&, const UnitVector3&)>;

/// A(a, b; psi, lambda), B(a, b; psi, lambda) in {+1, -1}. Both settings reach both
/// sides; `locality` records which of them the evaluator actually reads.
struct DeterministicModel {
  using Evaluator =
      std::function<Outcomes(const UnitVector3&, const UnitVector3&, const LambdaSample&)>;

  std::string name;
  std::string psi_label = "singlet";
  LocalityClass locality = LocalityClass::Local;
  Evaluator evaluator;
  /// Lambda-averaged correlation under a uniform_sphere sampler, when known.
  ClosedForm closed_form;
};

inline Outcomes evaluate_deterministic(const DeterministicModel& m, const UnitVector3& a,
                                       const UnitVector3& b, const LambdaSample& lambda) {
  return m.evaluator(a, b, lambda);
}

/// Marginal outcome probabilities of the two parties for one lambda.
struct SingleProbabilities {
  double p1_plus = 0.5;
  double p1_minus = 0.5;
  double p2_plus = 0.5;
  double p2_minus = 0.5;

  static SingleProbabilities from_plus(double p1_plus, double p2_plus) {
    return {p1_plus, 1.0 - p1_plus, p2_plus, 1.0 - p2_plus};
  }
};

/// Factorized model: P(mu, nu | lambda) = P1(mu | lambda) P2(nu | lambda).
struct StochasticModel {
  using Evaluator = std::function<SingleProbabilities(const UnitVector3&, const UnitVector3&,
                                                      const LambdaSample&)>;

  std::string name;
  std::string psi_label = "singlet";
  LocalityClass locality = LocalityClass::Local;
  Evaluator evaluator;
  ClosedForm closed_form;
};

inline constexpr double kProbabilitySlack = 1e-9;
inline constexpr double kNormalizationTolerance = 1e-12;

/// Evaluates and validates the model's probabilities. Values within 1e-9 outside
/// [0, 1] are clamped; anything further is a ContractViolation.
inline SingleProbabilities evaluate_stochastic(const StochasticModel& m, const UnitVector3& a,
                                               const UnitVector3& b, const LambdaSample& lambda) {
  SingleProbabilities p = m.evaluator(a, b, lambda);
  auto check = [&](double& v, const char* which) {
    if (!std::isfinite(v) || v < -kProbabilitySlack || v > 1.0 + kProbabilitySlack) {
      throw ContractViolation("model '" + m.name + "' returned " + which + " = " +
                              std::to_string(v) + " outside [0, 1]");
    }
    v = std::clamp(v, 0.0, 1.0);
  };
  check(p.p1_plus, "P1(+)");
  check(p.p1_minus, "P1(-)");
  check(p.p2_plus, "P2(+)");
  check(p.p2_minus, "P2(-)");
  if (std::abs(p.p1_plus + p.p1_minus - 1.0) > kNormalizationTolerance ||
      std::abs(p.p2_plus + p.p2_minus - 1.0) > kNormalizationTolerance) {
    throw ContractViolation("model '" + m.name + "' returned unnormalized probabilities");
  }
  return p;
}

/// <A> = P1(+) - P1(-),  <B> = P2(+) - P2(-).
inline std::pair<double, double> mean_outcomes(const StochasticModel& m, const UnitVector3& a,
                                               const UnitVector3& b, const LambdaSample& lambda) {
  const SingleProbabilities p = evaluate_stochastic(m, a, b, lambda);
  return {p.p1_plus - p.p1_minus, p.p2_plus - p.p2_minus};
}

/// The deterministic model as a stochastic one with probabilities in {0, 1}.
inline StochasticModel embed_deterministic(DeterministicModel m) {
  StochasticModel s;
  s.name = m.name + "_embedded";
  s.psi_label = m.psi_label;
  s.locality = m.locality;
  s.closed_form = m.closed_form;
  s.evaluator = [eval = std::move(m.evaluator)](const UnitVector3& a, const UnitVector3& b,
                                                const LambdaSample& l) {
    const Outcomes o = eval(a, b, l);
    return SingleProbabilities::from_plus(o.a == Spin::Up ? 1.0 : 0.0,
                                          o.b == Spin::Up ? 1.0 : 0.0);
  };
  return s;
}

// ---------------------------------------------------------------------------
// Real-analytic series models
// ---------------------------------------------------------------------------

/// Dense coefficients alpha_{ij}^{rs} of
///   A(a, b) = sum_{i,j=1..D} sum_{r,s} alpha_{ij}^{rs} (a_r)^i (b_s)^j  [+ alpha_0].
/// Powers i, j run over 1..D; components r, s over 0..2 (x, y, z).
class RealAnalyticCoefficients {
public:
  static constexpr std::size_t kDefaultDegree = 3;

  explicit RealAnalyticCoefficients(std::size_t degree = kDefaultDegree,
                                    bool includes_constant_term = false)
      : degree_(degree), includes_constant_(includes_constant_term),
        data_(degree * degree * 9, 0.0) {
    if (degree == 0) throw std::invalid_argument("series degree must be >= 1");
  }

  /// alpha_{11}^{rs} = delta_{rs}: the series reduces to a . b.
  static RealAnalyticCoefficients delta(std::size_t degree = kDefaultDegree) {
    RealAnalyticCoefficients c(degree);
    for (std::size_t r = 0; r < 3; ++r) c.at(1, 1, r, r) = 1.0;
    return c;
  }

  /// Uniform coefficients in [-1, 1], damped by 2^-(i+j-2) so higher powers shrink.
  static RealAnalyticCoefficients random(std::size_t degree, std::uint64_t seed) {
    RealAnalyticCoefficients c(degree);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 1; i <= degree; ++i)
      for (std::size_t j = 1; j <= degree; ++j)
        for (std::size_t r = 0; r < 3; ++r)
          for (std::size_t s = 0; s < 3; ++s)
            c.at(i, j, r, s) = std::ldexp(u(rng), -static_cast<int>(i + j - 2));
    return c;
  }

  std::size_t degree() const { return degree_; }
  bool includes_constant_term() const { return includes_constant_; }

  double& at(std::size_t i, std::size_t j, std::size_t r, std::size_t s) {
    return data_[index(i, j, r, s)];
  }
  double at(std::size_t i, std::size_t j, std::size_t r, std::size_t s) const {
    return data_[index(i, j, r, s)];
  }

  double constant_term() const { return constant_; }
  void set_constant_term(double v) {
    if (!includes_constant_) throw std::logic_error("coefficients carry no constant term");
    constant_ = v;
  }

  std::span<const double> values() const { return data_; }

  RealAnalyticCoefficients operator-() const {
    RealAnalyticCoefficients c = *this;
    for (double& v : c.data_) v = -v;
    c.constant_ = -constant_;
    return c;
  }

private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t r, std::size_t s) const {
    if (i < 1 || i > degree_ || j < 1 || j > degree_ || r > 2 || s > 2) {
      throw std::out_of_range("series coefficient index out of range");
    }
    return (((i - 1) * degree_ + (j - 1)) * 3 + r) * 3 + s;
  }

  std::size_t degree_;
  bool includes_constant_;
  double constant_ = 0.0;
  std::vector<double> data_;
};

/// Truncated series value. Not clamped to [-1, 1].
inline double evaluate_series(const RealAnalyticCoefficients& c, const UnitVector3& a,
                              const UnitVector3& b) {
  const std::size_t d = c.degree();
  const double av[3] = {a.x(), a.y(), a.z()};
  const double bv[3] = {b.x(), b.y(), b.z()};
  // pa[i][r] = (a_r)^(i+1)
  std::vector<double> pa(d * 3), pb(d * 3);
  for (std::size_t r = 0; r < 3; ++r) {
    pa[r] = av[r];
    pb[r] = bv[r];
    for (std::size_t i = 1; i < d; ++i) {
      pa[i * 3 + r] = pa[(i - 1) * 3 + r] * av[r];
      pb[i * 3 + r] = pb[(i - 1) * 3 + r] * bv[r];
    }
  }
  const std::span<const double> coeff = c.values();
  double total = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t s = 0; s < 3; ++s, ++k) total += coeff[k] * pa[i * 3 + r] * pb[j * 3 + s];
  return c.includes_constant_term() ? total + c.constant_term() : total;
}

/// Coefficients as a function of lambda.
using CoefficientGenerator = std::function<RealAnalyticCoefficients(const LambdaSample&)>;

/// A and B series for one model. Each side is fixed or generated per lambda.
class SeriesPair {
public:
  using Source = std::variant<RealAnalyticCoefficients, CoefficientGenerator>;

  SeriesPair(Source alpha, Source beta, std::string name = "series")
      : name_(std::move(name)), alpha_(std::move(alpha)), beta_(std::move(beta)) {}

  const std::string& name() const { return name_; }
  bool anticorrelated() const { return anticorrelated_; }
  bool lambda_independent() const {
    return std::holds_alternative<RealAnalyticCoefficients>(alpha_) &&
           std::holds_alternative<RealAnalyticCoefficients>(beta_);
  }

  double a_value(const UnitVector3& a, const UnitVector3& b, const LambdaSample& l) const {
    return evaluate(alpha_, a, b, l);
  }
  double b_value(const UnitVector3& a, const UnitVector3& b, const LambdaSample& l) const {
    return evaluate(beta_, a, b, l);
  }

private:
  friend SeriesPair impose_anticorrelation(const RealAnalyticCoefficients&, std::string);
  friend SeriesPair impose_anticorrelation(CoefficientGenerator, std::string);

  static double evaluate(const Source& src, const UnitVector3& a, const UnitVector3& b,
                         const LambdaSample& l) {
    if (const auto* fixed = std::get_if<RealAnalyticCoefficients>(&src)) {
      return evaluate_series(*fixed, a, b);
    }
    return evaluate_series(std::get<CoefficientGenerator>(src)(l), a, b);
  }

  std::string name_;
  Source alpha_;
  Source beta_;
  bool anticorrelated_ = false;
};

/// Pairs A-coefficients c with B-coefficients -c, so B(a, b) = -A(a, b) everywhere.
inline SeriesPair impose_anticorrelation(const RealAnalyticCoefficients& c,
                                         std::string name = "series") {
  SeriesPair p(c, -c, std::move(name));
  p.anticorrelated_ = true;
  return p;
}

inline SeriesPair impose_anticorrelation(CoefficientGenerator g, std::string name = "series") {
  CoefficientGenerator neg = [g](const LambdaSample& l) { return -g(l); };
  SeriesPair p(std::move(g), std::move(neg), std::move(name));
  p.anticorrelated_ = true;
  return p;
}

/// Scales each coefficient alpha_{ij}^{rs} by (1 + lambda_k) / 2 with k = (r + s) mod dim.
inline CoefficientGenerator lambda_modulated(RealAnalyticCoefficients base) {
  return [base = std::move(base)](const LambdaSample& l) {
    RealAnalyticCoefficients c = base;
    const std::size_t d = c.degree();
    for (std::size_t i = 1; i <= d; ++i)
      for (std::size_t j = 1; j <= d; ++j)
        for (std::size_t r = 0; r < 3; ++r)
          for (std::size_t s = 0; s < 3; ++s)
            c.at(i, j, r, s) *= 0.5 * (1.0 + l[(r + s) % l.dim()]);
    return c;
  };
}

/// Closed-form, lambda-free quantum prediction. Not a hidden-variable model.
struct QuantumModel {
  std::string name = "quantum";
};

}  // namespace eprb
