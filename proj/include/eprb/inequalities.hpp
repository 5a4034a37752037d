#pragma once

// CHSH and Bell statistics over an arbitrary correlation oracle, the cross term
// whose vanishing yields the CHSH bound for setting-constant models, and a
// deterministic grid + compass-search maximizer of the CHSH statistic.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "eprb/correlation.hpp"
#include "eprb/geometry.hpp"
#include "eprb/models.hpp"

namespace eprb {

/// Correlation as a function of the two settings.
using CorrelationOracle = std::function<CorrelationEstimate(const UnitVector3&, const UnitVector3&)>;

struct SettingsQuad {
  UnitVector3 a, b, a_prime, b_prime;
};

inline constexpr double kStatisticalBand = 4.0;
inline constexpr double kChshBound = 2.0;

struct ChshReport {
  double s_value = 0.0;
  double term1 = 0.0;  // |P(a,b) - P(a,b')|
  double term2 = 0.0;  // |P(a',b') + P(a',b)|
  /// P(a,b), P(a,b'), P(a',b'), P(a',b) in that order.
  std::array<CorrelationEstimate, 4> correlations{};
  double combined_std_error = 0.0;
  double bound = kChshBound;
  bool exact = false;
  bool violated = false;
  SettingsQuad quad;
  std::size_t evaluations = 1;
};

namespace detail {

inline bool all_exact(std::initializer_list<const CorrelationEstimate*> es) {
  for (const auto* e : es)
    if (!e->exact) return false;
  return true;
}

inline double quadrature(std::initializer_list<const CorrelationEstimate*> es) {
  double s = 0.0;
  for (const auto* e : es) s += e->std_error * e->std_error;
  return std::sqrt(s);
}

}  // namespace detail

/// |P(a,b) - P(a,b')| + |P(a',b') + P(a',b)|, bounded by 2 for the covered
/// hidden-variable classes. Exact oracles flag a violation when S > 2, Monte Carlo
/// oracles when S > 2 + 4 sigma (errors combined in quadrature).
inline ChshReport chsh_statistic(const CorrelationOracle& P, const SettingsQuad& q) {
  ChshReport r{.quad = q};
  r.correlations = {P(q.a, q.b), P(q.a, q.b_prime), P(q.a_prime, q.b_prime), P(q.a_prime, q.b)};
  const auto& [ab, abp, apbp, apb] = r.correlations;
  r.term1 = std::abs(ab.value - abp.value);
  r.term2 = std::abs(apbp.value + apb.value);
  r.s_value = r.term1 + r.term2;
  r.combined_std_error = detail::quadrature({&ab, &abp, &apbp, &apb});
  r.exact = detail::all_exact({&ab, &abp, &apbp, &apb});
  r.violated = r.exact ? r.s_value > kChshBound
                       : r.s_value > kChshBound + kStatisticalBand * r.combined_std_error;
  return r;
}

struct BellReport {
  /// |P(a,b) - P(a,c)| - (1 + P(b,c)); positive means the inequality is violated.
  double excess = 0.0;
  CorrelationEstimate p_ab, p_ac, p_bc;
  double combined_std_error = 0.0;
  bool exact = false;
  bool violated = false;
};

/// Bell's original inequality |P(a,b) - P(a,c)| <= 1 + P(b,c).
inline BellReport bell_statistic(const CorrelationOracle& P, const UnitVector3& a,
                                 const UnitVector3& b, const UnitVector3& c) {
  BellReport r;
  r.p_ab = P(a, b);
  r.p_ac = P(a, c);
  r.p_bc = P(b, c);
  r.excess = std::abs(r.p_ab.value - r.p_ac.value) - (1.0 + r.p_bc.value);
  r.combined_std_error = detail::quadrature({&r.p_ab, &r.p_ac, &r.p_bc});
  r.exact = detail::all_exact({&r.p_ab, &r.p_ac, &r.p_bc});
  r.violated = r.exact ? r.excess > 0.0 : r.excess > kStatisticalBand * r.combined_std_error;
  return r;
}

/// I = A B|_(a,b) A B|_(a',b') - A B|_(a,b') A B|_(a',b) at one lambda.
/// Zero whenever the outcomes do not depend on the settings.
inline double cross_term(const DeterministicModel& m, const SettingsQuad& q,
                         const LambdaSample& lambda) {
  const int ab = evaluate_deterministic(m, q.a, q.b, lambda).product();
  const int apbp = evaluate_deterministic(m, q.a_prime, q.b_prime, lambda).product();
  const int abp = evaluate_deterministic(m, q.a, q.b_prime, lambda).product();
  const int apb = evaluate_deterministic(m, q.a_prime, q.b, lambda).product();
  return static_cast<double>(ab * apbp - abp * apb);
}

// ---------------------------------------------------------------------------
// Maximization
// ---------------------------------------------------------------------------

enum class SearchMode { Coplanar, Full };

struct MaximizeResult {
  ChshReport report;
  double grid_best = 0.0;
  std::vector<double> angles;  // best parameter vector
  std::size_t evaluations = 0;
};

inline constexpr std::size_t kMinimumBudget = 100;
inline constexpr std::size_t kGridPointsPerAngle = 24;
inline constexpr double kMinimumStep = 1e-7;

/// Settings from angles: coplanar uses one x-z plane angle per setting (a, a', b, b'),
/// full uses a (polar, azimuth) pair per setting.
inline SettingsQuad quad_from_angles(const std::vector<double>& x, SearchMode mode) {
  if (mode == SearchMode::Coplanar) {
    return {unit_from_plane_angle(x[0]), unit_from_plane_angle(x[2]),
            unit_from_plane_angle(x[1]), unit_from_plane_angle(x[3])};
  }
  return {unit_from_spherical(x[0], x[1]), unit_from_spherical(x[4], x[5]),
          unit_from_spherical(x[2], x[3]), unit_from_spherical(x[6], x[7])};
}

/// Coarse grid over the angle parameterization, then compass search with steps
/// halving from the grid spacing down to 1e-7 (or until the budget runs out).
/// The grid holds min(24, floor((budget/2)^(1/dim))) points per angle, at least 2,
/// and is cut short if it alone would exceed the budget.
/// Fully deterministic: grid ties keep the lexicographically smallest tuple and a
/// trial only replaces the incumbent on strict improvement.
inline MaximizeResult maximize_chsh(const CorrelationOracle& P, std::size_t budget,
                                    SearchMode mode = SearchMode::Coplanar) {
  if (budget < kMinimumBudget) {
    throw std::invalid_argument("maximize_chsh budget must be at least " +
                                std::to_string(kMinimumBudget));
  }
  const std::size_t dim = mode == SearchMode::Coplanar ? 4 : 8;
  std::size_t g = static_cast<std::size_t>(
      std::floor(std::pow(static_cast<double>(budget) / 2.0, 1.0 / static_cast<double>(dim))));
  g = std::clamp<std::size_t>(g, 2, kGridPointsPerAngle);

  // Per-dimension lattice: coplanar angles cover [0, 2pi); in full mode the polar
  // angle uses cell midpoints of [0, pi] and the azimuth covers [0, 2pi).
  std::vector<double> origin(dim, 0.0), spacing(dim, 0.0);
  for (std::size_t d = 0; d < dim; ++d) {
    const bool polar = mode == SearchMode::Full && d % 2 == 0;
    spacing[d] = (polar ? std::numbers::pi : 2.0 * std::numbers::pi) / static_cast<double>(g);
    origin[d] = polar ? 0.5 * spacing[d] : 0.0;
  }

  MaximizeResult out;
  auto evaluate = [&](const std::vector<double>& x) {
    ++out.evaluations;
    return chsh_statistic(P, quad_from_angles(x, mode));
  };

  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> x(dim), best_x;
  ChshReport best;
  bool have_best = false;
  for (;;) {
    for (std::size_t d = 0; d < dim; ++d) x[d] = origin[d] + spacing[d] * static_cast<double>(idx[d]);
    ChshReport r = evaluate(x);
    if (!have_best || r.s_value > best.s_value) {
      best = r;
      best_x = x;
      have_best = true;
    }
    if (out.evaluations >= budget) break;
    // Odometer increment, last index fastest: lexicographic order.
    std::size_t d = dim;
    while (d > 0 && ++idx[d - 1] == g) idx[--d] = 0;
    if (d == 0) break;
  }
  out.grid_best = best.s_value;

  double scale = 1.0;
  auto largest_step = [&] {
    double m = 0.0;
    for (double s : spacing) m = std::max(m, s * scale);
    return m;
  };
  while (largest_step() >= kMinimumStep && out.evaluations < budget) {
    bool improved = false;
    for (std::size_t d = 0; d < dim && out.evaluations < budget; ++d) {
      for (double sign : {+1.0, -1.0}) {
        if (out.evaluations >= budget) break;
        std::vector<double> trial = best_x;
        trial[d] += sign * spacing[d] * scale;
        ChshReport r = evaluate(trial);
        if (r.s_value > best.s_value) {
          best = r;
          best_x = std::move(trial);
          improved = true;
          break;
        }
      }
    }
    if (!improved) scale *= 0.5;
  }

  best.evaluations = out.evaluations;
  out.report = best;
  out.angles = best_x;
  return out;
}

}  // namespace eprb
