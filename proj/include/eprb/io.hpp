#pragma once

// Text and JSON encodings: "x,y,z" vectors, "inf" / "re,im" Riemann points,
// report objects, and the JSON model / sampler configuration blocks.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "eprb/analyticity.hpp"
#include "eprb/correlation.hpp"
#include "eprb/geometry.hpp"
#include "eprb/hidden_variables.hpp"
#include "eprb/inequalities.hpp"
#include "eprb/zoo.hpp"

namespace eprb::io {

using nlohmann::json;

/// Shortest round-trip decimal, independent of the C locale.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a non-negative integer: '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

/// "x,y,z" with '.' radix. The vector must already be unit length (within 1e-9).
inline UnitVector3 parse_vector(std::string_view s) {
  const auto parts = split(s, ',');
  if (parts.size() != 3) throw std::invalid_argument("expected x,y,z but got '" + std::string(s) + "'");
  return UnitVector3(parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2]));
}

inline std::string format_vector(const UnitVector3& v) {
  return format_number(v.x()) + "," + format_number(v.y()) + "," + format_number(v.z());
}

/// "inf" or "re,im".
inline RiemannPoint parse_riemann_point(std::string_view s) {
  if (s == "inf" || s == "infinity") return RiemannPoint::infinity();
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw std::invalid_argument("expected inf or re,im but got '" + std::string(s) + "'");
  return RiemannPoint(parse_double(parts[0]), parse_double(parts[1]));
}

inline json to_json(const UnitVector3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline UnitVector3 vector_from_json(const json& j) {
  if (j.is_string()) return parse_vector(j.get<std::string>());
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("vector must be a 3-element array");
  return UnitVector3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline json to_json(const RiemannPoint& p) {
  if (p.is_infinite()) return "inf";
  return json{{"re", p.value().real()}, {"im", p.value().imag()}};
}

inline RiemannPoint riemann_point_from_json(const json& j) {
  if (j.is_string()) return parse_riemann_point(j.get<std::string>());
  if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
    throw std::invalid_argument("Riemann point must be \"inf\" or {\"re\":..., \"im\":...}");
  }
  return RiemannPoint(j.at("re").get<double>(), j.at("im").get<double>());
}

inline json to_json(const CorrelationEstimate& e) {
  return json{{"value", e.value}, {"stderr", e.std_error}, {"n", e.n}, {"exact", e.exact}};
}

inline json to_json(const SettingsQuad& q) {
  return json{{"a", to_json(q.a)}, {"b", to_json(q.b)}, {"a_prime", to_json(q.a_prime)},
              {"b_prime", to_json(q.b_prime)}};
}

inline json to_json(const ChshReport& r) {
  static constexpr const char* kPairs[4] = {"a,b", "a,b'", "a',b'", "a',b"};
  json corr = json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    json c = to_json(r.correlations[i]);
    c["pair"] = kPairs[i];
    corr.push_back(std::move(c));
  }
  return json{{"s_value", r.s_value},
              {"term1", r.term1},
              {"term2", r.term2},
              {"correlations", std::move(corr)},
              {"combined_stderr", r.combined_std_error},
              {"bound", r.bound},
              {"exact", r.exact},
              {"violated", r.violated},
              {"quad", to_json(r.quad)},
              {"evaluations", r.evaluations}};
}

inline json to_json(const BellReport& r) {
  return json{{"excess", r.excess},
              {"p_ab", to_json(r.p_ab)},
              {"p_ac", to_json(r.p_ac)},
              {"p_bc", to_json(r.p_bc)},
              {"combined_stderr", r.combined_std_error},
              {"exact", r.exact},
              {"violated", r.violated}};
}

inline json to_json(const ResidualReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back(json{{"z", to_json(p.z)}, {"residual", p.residual}});
  return json{{"h", r.h},
              {"tol", r.tol},
              {"max_residual", r.max_residual},
              {"verdict", to_string(r.verdict)},
              {"points", std::move(pts)}};
}

/// {"sampler": {"kind": "uniform_sphere" | "uniform_cube", "dim": r, "seed": u64}}
/// (either the outer object or the inner block).
inline LambdaSampler sampler_from_json(const json& j) {
  const json& s = j.contains("sampler") ? j.at("sampler") : j;
  const std::string kind = s.value("kind", std::string("uniform_sphere"));
  const std::uint64_t seed = s.value("seed", std::uint64_t{0});
  if (kind == "uniform_sphere") {
    if (s.contains("dim") && s.at("dim").get<std::size_t>() != 3) {
      throw std::invalid_argument("uniform_sphere has dim 3");
    }
    return LambdaSampler::uniform_sphere(seed);
  }
  if (kind == "uniform_cube") return LambdaSampler::uniform_cube(s.value("dim", std::size_t{3}), seed);
  throw std::invalid_argument("unknown sampler kind '" + kind + "'");
}

inline json to_json(const LambdaSampler& s) {
  return json{{"kind", to_string(s.kind())}, {"dim", s.dim()}, {"seed", s.seed()}};
}

/// Applies one model parameter given as text (from --param key=value).
inline void apply_param(ModelSpec& spec, const std::string& key, const json& value) {
  auto as_bool = [&](const json& v) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number()) return v.get<double>() != 0.0;
    const std::string t = v.get<std::string>();
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw std::invalid_argument("parameter '" + key + "' expects true or false");
  };
  auto as_u64 = [&](const json& v) -> std::uint64_t {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      const auto i = v.get<std::int64_t>();
      if (i < 0) throw std::invalid_argument("parameter '" + key + "' must be non-negative");
      return static_cast<std::uint64_t>(i);
    }
    if (v.is_string()) return parse_u64(v.get<std::string>());
    throw std::invalid_argument("parameter '" + key + "' expects an integer");
  };
  auto as_int = [&](const json& v) -> int {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_string()) {
      const double d = parse_double(v.get<std::string>());
      if (d != static_cast<int>(d)) throw std::invalid_argument("parameter '" + key + "' expects an integer");
      return static_cast<int>(d);
    }
    throw std::invalid_argument("parameter '" + key + "' expects an integer");
  };

  if (key == "degree") {
    const std::uint64_t d = as_u64(value);
    if (d < 1 || d > 16) throw std::invalid_argument("degree must be in [1, 16]");
    spec.degree = static_cast<std::size_t>(d);
  } else if (key == "coeff_seed") {
    spec.coeff_seed = as_u64(value);
  } else if (key == "include_constant") {
    spec.include_constant = as_bool(value);
  } else if (key == "lambda_dependent") {
    spec.lambda_dependent = as_bool(value);
  } else if (key == "per_lambda") {
    spec.per_lambda = as_bool(value);
  } else if (key == "alpha") {
    spec.alpha = as_int(value);
  } else if (key == "beta") {
    spec.beta = as_int(value);
  } else if (key == "gain") {
    const double g = value.is_number() ? value.get<double>() : parse_double(value.get<std::string>());
    if (!std::isfinite(g)) throw std::invalid_argument("gain must be finite");
    spec.gain = g;
  } else {
    throw std::invalid_argument("unknown model parameter '" + key + "'");
  }
}

/// {"model": name, "params": {...}}
inline ModelSpec model_spec_from_json(const json& j) {
  ModelSpec spec;
  spec.name = j.at("model").get<std::string>();
  if (!find_zoo_entry(spec.name)) throw std::invalid_argument("unknown model '" + spec.name + "'");
  if (j.contains("params")) {
    for (const auto& [k, v] : j.at("params").items()) apply_param(spec, k, v);
  }
  return spec;
}

}  // namespace eprb::io
