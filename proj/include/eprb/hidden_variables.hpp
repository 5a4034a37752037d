#pragma once

// Hidden-variable space, counter-based sampling of rho(lambda), and the
// Monte Carlo engine for integrals  int d(lambda) rho(lambda) f(lambda).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace eprb {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stateless draw number `k` of sample `index` under `seed`.
inline constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t index,
                                            std::uint64_t k) {
  return splitmix64(splitmix64(splitmix64(seed) ^ index) + k * 0xD1B54A32D192ED03ULL);
}

// 53-bit uniform in [0, 1).
inline constexpr double to_unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// lambda = (lambda_1, ..., lambda_r).
struct LambdaSample {
  std::vector<double> components;

  std::size_t dim() const { return components.size(); }
  double operator[](std::size_t i) const { return components[i]; }
};

enum class SamplerKind { UniformSphere, UniformCube };

inline std::string to_string(SamplerKind kind) {
  return kind == SamplerKind::UniformSphere ? "uniform_sphere" : "uniform_cube";
}

/// Immutable description of rho(lambda). sample(i) depends only on (kind, dim, seed, i).
class LambdaSampler {
public:
  static LambdaSampler uniform_sphere(std::uint64_t seed) {
    return LambdaSampler(SamplerKind::UniformSphere, 3, seed);
  }
  static LambdaSampler uniform_cube(std::size_t dim, std::uint64_t seed) {
    if (dim == 0) throw std::invalid_argument("uniform_cube needs dim >= 1");
    return LambdaSampler(SamplerKind::UniformCube, dim, seed);
  }

  SamplerKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }

  /// Writes sample `index` into `out` (resized to dim()).
  void sample_into(std::uint64_t index, LambdaSample& out) const {
    out.components.resize(dim_);
    if (kind_ == SamplerKind::UniformSphere) {
      // Inverse CDF: z uniform on [-1, 1], azimuth uniform on [0, 2pi).
      const double z = 2.0 * detail::to_unit_interval(detail::counter_hash(seed_, index, 0)) - 1.0;
      const double phi =
          2.0 * std::numbers::pi * detail::to_unit_interval(detail::counter_hash(seed_, index, 1));
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      out.components[0] = rho * std::cos(phi);
      out.components[1] = rho * std::sin(phi);
      out.components[2] = z;
      return;
    }
    for (std::size_t k = 0; k < dim_; ++k) {
      out.components[k] = detail::to_unit_interval(detail::counter_hash(seed_, index, k));
    }
  }

  LambdaSample sample(std::uint64_t index) const {
    LambdaSample s;
    sample_into(index, s);
    return s;
  }

  /// True when every component lies in the declared support.
  bool in_support(const LambdaSample& s) const {
    if (s.dim() != dim_) return false;
    if (kind_ == SamplerKind::UniformSphere) {
      const double n2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
      return std::abs(n2 - 1.0) <= 1e-12;
    }
    return std::all_of(s.components.begin(), s.components.end(),
                       [](double v) { return v >= 0.0 && v <= 1.0; });
  }

private:
  LambdaSampler(SamplerKind kind, std::size_t dim, std::uint64_t seed)
      : kind_(kind), dim_(dim), seed_(seed) {}

  SamplerKind kind_;
  std::size_t dim_;
  std::uint64_t seed_;
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample std (n - 1) / sqrt(n)
  std::size_t n = 0;
};

/// Worker count for estimators. Results never depend on it.
struct Parallelism {
  unsigned workers = 1;
};

namespace detail {

// Samples are reduced in fixed-size blocks combined in block order, so the
// floating-point result is independent of how blocks are spread over workers.
inline constexpr std::size_t kBlockSize = 4096;

struct BlockMoments {
  std::size_t count = 0;
  double mean = 0.0;  // running (Welford) mean, exact when all values agree
  double m2 = 0.0;

  void push(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const BlockMoments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double n = na + nb;
    const double delta = o.mean - mean;
    mean += delta * (nb / n);
    m2 += o.m2 + delta * delta * (na * nb / n);
    count += o.count;
  }
};

template <std::size_t K, class F>
std::array<MonteCarloEstimate, K> integrate_blocks(F&& f, const LambdaSampler& sampler,
                                                   std::size_t n, Parallelism par) {
  if (n < 2) throw std::invalid_argument("Monte Carlo integration needs n >= 2");
  const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<std::array<BlockMoments, K>> partial(blocks);

  auto run_blocks = [&](std::size_t first, std::size_t stride) {
    LambdaSample lambda;
    for (std::size_t b = first; b < blocks; b += stride) {
      const std::size_t begin = b * kBlockSize;
      const std::size_t end = std::min(n, begin + kBlockSize);
      auto& acc = partial[b];
      for (std::size_t i = begin; i < end; ++i) {
        sampler.sample_into(i, lambda);
        const std::array<double, K> v = f(static_cast<const LambdaSample&>(lambda));
        for (std::size_t k = 0; k < K; ++k) acc[k].push(v[k]);
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(par.workers, 1, blocks);
  if (workers == 1) {
    run_blocks(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers - 1);
      for (std::size_t w = 1; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            run_blocks(w, workers);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      try {
        run_blocks(0, workers);
      } catch (...) {
        errors[0] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::array<MonteCarloEstimate, K> out{};
  for (std::size_t k = 0; k < K; ++k) {
    BlockMoments total;
    for (const auto& block : partial) total.merge(block[k]);
    const double nn = static_cast<double>(n);
    out[k].mean = total.mean;
    out[k].std_error = std::sqrt(total.m2 / (nn - 1.0)) / std::sqrt(nn);
    out[k].n = n;
  }
  return out;
}

}  // namespace detail

/// Mean and standard error of f(lambda_i) over sample indices 0..n-1.
template <class F>
MonteCarloEstimate integrate(F&& f, const LambdaSampler& sampler, std::size_t n,
                             Parallelism par = {}) {
  auto wrapped = [&f](const LambdaSample& l) { return std::array<double, 1>{f(l)}; };
  return detail::integrate_blocks<1>(wrapped, sampler, n, par)[0];
}

/// Several integrands over one shared sample stream. f returns std::array<double, K>.
template <std::size_t K, class F>
std::array<MonteCarloEstimate, K> integrate_many(F&& f, const LambdaSampler& sampler,
                                                 std::size_t n, Parallelism par = {}) {
  return detail::integrate_blocks<K>(f, sampler, n, par);
}

}  // namespace eprb
