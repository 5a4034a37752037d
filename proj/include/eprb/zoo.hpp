#pragma once

// Named model registry and the correlation oracles built from it.

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "eprb/correlation.hpp"
#include "eprb/inequalities.hpp"
#include "eprb/models.hpp"

namespace eprb {

/// Parameters understood by the registry; each model reads the ones it needs.
struct ModelSpec {
  std::string name;
  std::size_t degree = RealAnalyticCoefficients::kDefaultDegree;
  std::uint64_t coeff_seed = 0;
  bool include_constant = false;
  bool lambda_dependent = false;
  int alpha = +1;  // constant model outcomes
  int beta = -1;
  bool per_lambda = false;  // constant model: outcomes vary with lambda (never with settings)
  double gain = 1.0;  // linear model slope; above 1 the probabilities leave [0, 1]
};

using Model = std::variant<QuantumModel, DeterministicModel, StochasticModel, SeriesPair>;

struct ZooEntry {
  std::string name;
  std::string kind;      // quantum | deterministic | stochastic | series
  std::string locality;  // local | constant_nonlocal | general_nonlocal | quantum
  std::string description;
};

inline const std::vector<ZooEntry>& zoo() {
  static const std::vector<ZooEntry> entries = {
      {"quantum", "quantum", "quantum", "singlet correlation -a.b, closed form, no hidden variables"},
      {"local_sign", "deterministic", "local", "A = sign(a.lambda), B = -sign(b.lambda)"},
      {"coin", "stochastic", "local", "every outcome probability 1/2"},
      {"linear", "stochastic", "local",
       "P1(+) = (1 + g a.lambda)/2, P2(+) = (1 - g b.lambda)/2 with gain g = 1 by default"},
      {"constant", "deterministic", "constant_nonlocal",
       "A = alpha, B = beta independent of the settings (optionally per lambda)"},
      {"nonlocal_sign", "deterministic", "general_nonlocal",
       "A = sign(a.b + a.lambda), B = sign(b.lambda + 0.1)"},
      {"series_delta", "series", "general_nonlocal",
       "real-analytic series with alpha_11^rs = delta_rs and beta = -alpha"},
      {"series_random", "series", "general_nonlocal",
       "real-analytic series with seeded random alpha and beta = -alpha"},
  };
  return entries;
}

inline const ZooEntry* find_zoo_entry(const std::string& name) {
  const auto& z = zoo();
  const auto it = std::find_if(z.begin(), z.end(), [&](const ZooEntry& e) { return e.name == name; });
  return it == z.end() ? nullptr : &*it;
}

namespace detail {

inline double dot_lambda(const UnitVector3& v, const LambdaSample& l) {
  if (l.dim() != 3) throw std::invalid_argument("model needs a 3-dimensional hidden variable");
  return v.x() * l[0] + v.y() * l[1] + v.z() * l[2];
}

inline Spin spin_from_int(int v, const char* which) {
  if (v == 1) return Spin::Up;
  if (v == -1) return Spin::Down;
  throw std::invalid_argument(std::string(which) + " must be +1 or -1");
}

}  // namespace detail

inline DeterministicModel local_sign_model() {
  DeterministicModel m;
  m.name = "local_sign";
  m.locality = LocalityClass::Local;
  m.evaluator = [](const UnitVector3& a, const UnitVector3& b, const LambdaSample& l) {
    return Outcomes{sign_of(detail::dot_lambda(a, l)), flip(sign_of(detail::dot_lambda(b, l)))};
  };
  // Uniform lambda on S^2: P(theta) = -1 + 2 theta / pi.
  m.closed_form = [](const UnitVector3& a, const UnitVector3& b) {
    return -1.0 + 2.0 * angle_between(a, b) / std::numbers::pi;
  };
  return m;
}

inline DeterministicModel constant_model(int alpha = +1, int beta = -1, bool per_lambda = false) {
  const Spin sa = detail::spin_from_int(alpha, "alpha");
  const Spin sb = detail::spin_from_int(beta, "beta");
  DeterministicModel m;
  m.name = "constant";
  m.locality = LocalityClass::ConstantNonlocal;
  if (!per_lambda) {
    m.evaluator = [sa, sb](const UnitVector3&, const UnitVector3&, const LambdaSample&) {
      return Outcomes{sa, sb};
    };
    m.closed_form = [p = alpha * beta](const UnitVector3&, const UnitVector3&) {
      return static_cast<double>(p);
    };
    return m;
  }
  // alpha(lambda), beta(lambda): flipped by the sign of the first / last component.
  m.evaluator = [alpha, beta](const UnitVector3&, const UnitVector3&, const LambdaSample& l) {
    const int fa = value(sign_of(l[0]));
    const int fb = value(sign_of(l[l.dim() - 1]));
    return Outcomes{static_cast<Spin>(alpha * fa), static_cast<Spin>(beta * fb)};
  };
  return m;
}

/// Depends on both settings; used to show the cross term need not vanish.
inline DeterministicModel nonlocal_sign_model() {
  DeterministicModel m;
  m.name = "nonlocal_sign";
  m.locality = LocalityClass::GeneralNonlocal;
  m.evaluator = [](const UnitVector3& a, const UnitVector3& b, const LambdaSample& l) {
    return Outcomes{sign_of(dot(a, b) + detail::dot_lambda(a, l)),
                    sign_of(detail::dot_lambda(b, l) + 0.1)};
  };
  return m;
}

inline StochasticModel coin_model() {
  StochasticModel m;
  m.name = "coin";
  m.locality = LocalityClass::Local;
  m.evaluator = [](const UnitVector3&, const UnitVector3&, const LambdaSample&) {
    return SingleProbabilities::from_plus(0.5, 0.5);
  };
  m.closed_form = [](const UnitVector3&, const UnitVector3&) { return 0.0; };
  return m;
}

inline StochasticModel linear_model(double gain = 1.0) {
  StochasticModel m;
  m.name = "linear";
  m.locality = LocalityClass::Local;
  m.evaluator = [gain](const UnitVector3& a, const UnitVector3& b, const LambdaSample& l) {
    return SingleProbabilities::from_plus(0.5 * (1.0 + gain * detail::dot_lambda(a, l)),
                                          0.5 * (1.0 - gain * detail::dot_lambda(b, l)));
  };
  // E[lambda lambda^T] = I/3 on the sphere.
  m.closed_form = [gain](const UnitVector3& a, const UnitVector3& b) {
    return -gain * gain * dot(a, b) / 3.0;
  };
  return m;
}

inline SeriesPair series_model(const ModelSpec& spec) {
  RealAnalyticCoefficients c = spec.name == "series_delta"
                                   ? RealAnalyticCoefficients::delta(spec.degree)
                                   : RealAnalyticCoefficients::random(spec.degree, spec.coeff_seed);
  if (spec.include_constant) {
    RealAnalyticCoefficients with_const(c.degree(), true);
    for (std::size_t i = 1; i <= c.degree(); ++i)
      for (std::size_t j = 1; j <= c.degree(); ++j)
        for (std::size_t r = 0; r < 3; ++r)
          for (std::size_t s = 0; s < 3; ++s) with_const.at(i, j, r, s) = c.at(i, j, r, s);
    with_const.set_constant_term(spec.name == "series_delta" ? 0.0 : 0.25);
    c = std::move(with_const);
  }
  if (spec.lambda_dependent) return impose_anticorrelation(lambda_modulated(c), spec.name);
  return impose_anticorrelation(c, spec.name);
}

/// Builds a registered model; unknown names throw std::invalid_argument.
inline Model make_model(const ModelSpec& spec) {
  if (spec.name == "quantum") return QuantumModel{};
  if (spec.name == "local_sign") return local_sign_model();
  if (spec.name == "coin") return coin_model();
  if (spec.name == "linear") return linear_model(spec.gain);
  if (spec.name == "constant") return constant_model(spec.alpha, spec.beta, spec.per_lambda);
  if (spec.name == "nonlocal_sign") return nonlocal_sign_model();
  if (spec.name == "series_delta" || spec.name == "series_random") {
    if (spec.degree < 1) throw std::invalid_argument("degree must be >= 1");
    return series_model(spec);
  }
  throw std::invalid_argument("unknown model '" + spec.name + "'");
}

/// True when the model needs lambda in R^3 (dot products with the settings).
inline bool needs_sphere(const ModelSpec& spec) {
  return spec.name == "local_sign" || spec.name == "linear" || spec.name == "nonlocal_sign";
}

struct OracleOptions {
  std::size_t n = 100000;
  Parallelism par{};
  /// Use the model's closed form instead of sampling (uniform_sphere averages).
  bool closed_form = false;
};

/// Correlation oracle for any registered model. Every call reuses the same sampler,
/// so all setting pairs of one statistic share one hidden-variable stream.
inline CorrelationOracle make_oracle(const Model& model, const LambdaSampler& sampler,
                                     const OracleOptions& opt = {}) {
  return std::visit(
      [&](const auto& m) -> CorrelationOracle {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, QuantumModel>) {
          return [](const UnitVector3& a, const UnitVector3& b) { return quantum_correlation(a, b); };
        } else if constexpr (std::is_same_v<T, SeriesPair>) {
          if (opt.closed_form) {
            if (!m.lambda_independent()) {
              throw std::invalid_argument("lambda-dependent series has no closed form");
            }
            return [m](const UnitVector3& a, const UnitVector3& b) {
              const LambdaSample none;
              return CorrelationEstimate::closed_form(m.a_value(a, b, none) * m.b_value(a, b, none));
            };
          }
          return [m, sampler, opt](const UnitVector3& a, const UnitVector3& b) {
            return series_correlation(m, a, b, sampler, opt.n, opt.par);
          };
        } else {
          if (opt.closed_form) {
            if (!m.closed_form) throw std::invalid_argument("model '" + m.name + "' has no closed form");
            if (sampler.kind() != SamplerKind::UniformSphere) {
              throw std::invalid_argument("closed forms assume the uniform_sphere sampler");
            }
            return [cf = m.closed_form](const UnitVector3& a, const UnitVector3& b) {
              return CorrelationEstimate::closed_form(cf(a, b));
            };
          }
          if constexpr (std::is_same_v<T, DeterministicModel>) {
            return [m, sampler, opt](const UnitVector3& a, const UnitVector3& b) {
              return estimate_correlation(m, a, b, sampler, opt.n, opt.par);
            };
          } else {
            return [m, sampler, opt](const UnitVector3& a, const UnitVector3& b) {
              return estimate_stochastic_correlation(m, a, b, sampler, opt.n, opt.par);
            };
          }
        }
      },
      model);
}

}  // namespace eprb
