#ifndef ECMAC_INTEGRATE_HPP
#define ECMAC_INTEGRATE_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ecmac/channel.hpp"
#include "ecmac/errors.hpp"
#include "ecmac/quadrature.hpp"

namespace ecmac {

enum class IntegrationMethod { quadrature, monte_carlo };

// How to evaluate E_z{f(z)} over the fading model. Gauss–Laguerre tensor
// grids are the default for one or two users (the exponential density is
// the quadrature weight); Monte Carlo covers higher dimensions.
struct IntegrationSpec {
  IntegrationMethod method = IntegrationMethod::quadrature;
  int nodes_per_dim = 64;
  std::int64_t samples = 200000;
  std::uint64_t seed = 99991;
  double truncation = 0.0;  // > 0 drops quadrature nodes beyond the limit

  void validate() const {
    if (method == IntegrationMethod::quadrature && nodes_per_dim < 8)
      throw usage_error("IntegrationSpec: nodes_per_dim must be >= 8");
    if (method == IntegrationMethod::monte_carlo && samples < 1000)
      throw usage_error("IntegrationSpec: samples must be >= 1000");
  }

  static IntegrationSpec quadrature(int nodes = 64) {
    IntegrationSpec s;
    s.method = IntegrationMethod::quadrature;
    s.nodes_per_dim = nodes;
    return s;
  }

  static IntegrationSpec monte_carlo(std::int64_t samples = 200000,
                                     std::uint64_t seed = 99991) {
    IntegrationSpec s;
    s.method = IntegrationMethod::monte_carlo;
    s.samples = samples;
    s.seed = seed;
    return s;
  }

  // quadrature for small dimension, Monte Carlo beyond
  static IntegrationSpec auto_for(int users, int nodes = 64,
                                  std::int64_t samples = 200000,
                                  std::uint64_t seed = 99991) {
    return users <= 2 ? quadrature(nodes) : monte_carlo(samples, seed);
  }
};

// Value with an attached error estimate: standard error for Monte Carlo,
// node-halving delta for quadrature.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

inline void check_finite(double v, std::span<const double> z) {
  if (!std::isfinite(v)) {
    std::string msg = "non-finite integrand value at state (";
    for (std::size_t j = 0; j < z.size(); ++j)
      msg += (j ? ", " : "") + std::to_string(z[j]);
    throw numeric_error(msg + ")");
  }
}

// Streaming log-sum-exp: keeps the running maximum shifted out so huge
// negative exponents never underflow the total.
class LogSumExp {
 public:
  void add(double term_log, double weight_log) {
    const double t = term_log + weight_log;
    if (std::isnan(t)) throw numeric_error("log-sum-exp: NaN term");
    if (t == -std::numeric_limits<double>::infinity()) return;
    if (t <= max_) {
      sum_ += std::exp(t - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - t) + 1.0;
      max_ = t;
    }
  }
  double value() const {
    if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

template <class F>
double tensor_laguerre(const FadingModel& model, F&& f, int n,
                       double truncation) {
  const QuadRule& rule = gauss_laguerre(n);
  const int m = model.num_users();
  if (m > 3)
    throw usage_error("quadrature expectation supports at most 3 users; "
                      "use Monte Carlo");
  std::vector<double> z(m);
  std::vector<int> idx(m, 0);
  double total = 0.0;
  for (;;) {
    double w = 1.0;
    bool skip = false;
    for (int j = 0; j < m; ++j) {
      z[j] = model.mean[j] * rule.x[idx[j]];
      w *= rule.w[idx[j]];
      if (truncation > 0.0 && z[j] > truncation) skip = true;
    }
    if (!skip) {
      const double v = f(std::span<const double>(z));
      check_finite(v, z);
      total += w * v;
    }
    int j = 0;
    for (; j < m; ++j) {
      if (++idx[j] < rule.size()) break;
      idx[j] = 0;
    }
    if (j == m) break;
  }
  return total;
}

template <class G>
double tensor_laguerre_log(const FadingModel& model, G&& g, int n,
                           double truncation) {
  const QuadRule& rule = gauss_laguerre(n);
  const int m = model.num_users();
  if (m > 3)
    throw usage_error("quadrature expectation supports at most 3 users; "
                      "use Monte Carlo");
  std::vector<double> z(m);
  std::vector<int> idx(m, 0);
  LogSumExp acc;
  for (;;) {
    double logw = 0.0;
    bool skip = false;
    for (int j = 0; j < m; ++j) {
      z[j] = model.mean[j] * rule.x[idx[j]];
      logw += std::log(rule.w[idx[j]]);
      if (truncation > 0.0 && z[j] > truncation) skip = true;
    }
    if (!skip) acc.add(g(std::span<const double>(z)), logw);
    int j = 0;
    for (; j < m; ++j) {
      if (++idx[j] < rule.size()) break;
      idx[j] = 0;
    }
    if (j == m) break;
  }
  return acc.value();
}

inline int half_order(int n) { return n / 2 < 8 ? 8 : n / 2; }

}  // namespace detail

// E_z{f(z)}; f maps a channel state to a real.
template <class F>
Estimate expect(const FadingModel& model, F&& f, const IntegrationSpec& spec) {
  spec.validate();
  if (spec.method == IntegrationMethod::quadrature) {
    const double v = detail::tensor_laguerre(model, f, spec.nodes_per_dim,
                                             spec.truncation);
    const double vh = detail::tensor_laguerre(
        model, f, detail::half_order(spec.nodes_per_dim), spec.truncation);
    return {v, std::abs(v - vh)};
  }
  SplitMix64 rng(spec.seed);
  std::vector<double> z(model.mean.size());
  double sum = 0.0, sumsq = 0.0;
  for (std::int64_t i = 0; i < spec.samples; ++i) {
    model.sample_into(z, rng);
    const double v = f(std::span<const double>(z));
    detail::check_finite(v, z);
    sum += v;
    sumsq += v * v;
  }
  const double n = static_cast<double>(spec.samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

// ln E_z{exp(g(z))}, evaluated in log space so that very large QoS
// exponents cannot underflow the expectation.
template <class G>
Estimate log_expect_exp(const FadingModel& model, G&& g,
                        const IntegrationSpec& spec) {
  spec.validate();
  if (spec.method == IntegrationMethod::quadrature) {
    const double v = detail::tensor_laguerre_log(model, g, spec.nodes_per_dim,
                                                 spec.truncation);
    const double vh = detail::tensor_laguerre_log(
        model, g, detail::half_order(spec.nodes_per_dim), spec.truncation);
    return {v, std::abs(v - vh)};
  }
  std::vector<double> vals(static_cast<std::size_t>(spec.samples));
  SplitMix64 rng(spec.seed);
  std::vector<double> z(model.mean.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (auto& t : vals) {
    model.sample_into(z, rng);
    t = g(std::span<const double>(z));
    if (std::isnan(t)) detail::check_finite(t, z);
    mx = std::max(mx, t);
  }
  if (mx == -std::numeric_limits<double>::infinity())
    return {mx, 0.0};
  double sum = 0.0, sumsq = 0.0;
  for (double t : vals) {
    const double e = std::exp(t - mx);
    sum += e;
    sumsq += e * e;
  }
  const double n = static_cast<double>(spec.samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean);
  // relative std error of the expectation = absolute error of its log
  return {mx + std::log(mean), std::sqrt(var / n) / mean};
}

namespace detail {

// Two-user expectation of an integrand that switches branches across the
// curve z2 = boundary(z1). Inner finite pieces are formed from the full
// half-line integral minus a shifted tail, so every 1-D sweep keeps the
// exponential weight matched to the Gauss–Laguerre rule.
template <class B, class FB, class FA>
double split_quad_value(const FadingModel& model, B&& boundary, FB&& below,
                        FA&& above, int n, double outer_kink) {
  const QuadRule& rule = gauss_laguerre(n);
  const double m1 = model.mean[0];
  const double m2 = model.mean[1];
  const int k = rule.size();

  auto eval = [&](auto&& fn, double z1, double z2) {
    const double v = fn(z1, z2);
    if (!std::isfinite(v)) {
      const double state[2] = {z1, z2};
      check_finite(v, std::span<const double>(state, 2));
    }
    return v;
  };

  // ∫_0^∞ p(z2) [branch] dz2 with the split at b >= 0
  auto inner_split = [&](double z1, double b) {
    double full_below = 0.0;
    for (int i = 0; i < k; ++i)
      full_below += rule.w[i] * eval(below, z1, m2 * rule.x[i]);
    const double tail_factor = std::exp(-b / m2);
    if (tail_factor == 0.0) return full_below;
    double corr = 0.0;
    for (int i = 0; i < k; ++i) {
      const double z2 = b + m2 * rule.x[i];
      corr += rule.w[i] * (eval(above, z1, z2) - eval(below, z1, z2));
    }
    return full_below + tail_factor * corr;
  };

  auto inner_above_only = [&](double z1) {
    double s = 0.0;
    for (int i = 0; i < k; ++i)
      s += rule.w[i] * eval(above, z1, m2 * rule.x[i]);
    return s;
  };

  auto inner_at = [&](double z1) {
    const double b = boundary(z1);
    if (!(b > 0.0)) return inner_above_only(z1);
    return inner_split(z1, b);
  };

  const double zk = std::max(0.0, outer_kink);
  if (std::isinf(zk)) {
    // boundary never positive: single branch everywhere
    double total = 0.0;
    for (int j = 0; j < k; ++j)
      total += rule.w[j] * inner_above_only(m1 * rule.x[j]);
    return total;
  }
  if (zk == 0.0) {
    double total = 0.0;
    for (int j = 0; j < k; ++j)
      total += rule.w[j] * inner_at(m1 * rule.x[j]);
    return total;
  }
  // The clamp max(0, boundary) kinks at z1 = zk; split the outer axis there:
  // ∫_0^zk p A + ∫_zk^∞ p I = ∫_0^∞ p A + e^{-zk/m1} ∫_0^∞ p' (I - A)(zk + t)
  double full_above = 0.0;
  for (int j = 0; j < k; ++j)
    full_above += rule.w[j] * inner_above_only(m1 * rule.x[j]);
  const double tail_factor = std::exp(-zk / m1);
  if (tail_factor == 0.0) return full_above;
  double corr = 0.0;
  for (int j = 0; j < k; ++j) {
    const double z1 = zk + m1 * rule.x[j];
    corr += rule.w[j] * (inner_at(z1) - inner_above_only(z1));
  }
  return full_above + tail_factor * corr;
}

}  // namespace detail

// E{ below(z) if z2 < boundary(z1) else above(z) } for two users.
// outer_kink: the z1 below which the boundary is not positive (pass +inf
// when the boundary is negative everywhere, 0 when positive everywhere).
template <class B, class FB, class FA>
Estimate expect_split(const FadingModel& model, B&& boundary, FB&& below,
                      FA&& above, const IntegrationSpec& spec,
                      double outer_kink = 0.0) {
  spec.validate();
  if (model.num_users() != 2)
    throw usage_error("expect_split: defined for exactly two users");
  if (spec.method == IntegrationMethod::quadrature) {
    const double v = detail::split_quad_value(model, boundary, below, above,
                                              spec.nodes_per_dim, outer_kink);
    const double vh = detail::split_quad_value(
        model, boundary, below, above, detail::half_order(spec.nodes_per_dim),
        outer_kink);
    return {v, std::abs(v - vh)};
  }
  SplitMix64 rng(spec.seed);
  std::vector<double> z(2);
  double sum = 0.0, sumsq = 0.0;
  for (std::int64_t i = 0; i < spec.samples; ++i) {
    model.sample_into(z, rng);
    const double v =
        z[1] < boundary(z[0]) ? below(z[0], z[1]) : above(z[0], z[1]);
    detail::check_finite(v, z);
    sum += v;
    sumsq += v * v;
  }
  const double n = static_cast<double>(spec.samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace ecmac

#endif
