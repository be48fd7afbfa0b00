#ifndef ECMAC_STRATEGIES_HPP
#define ECMAC_STRATEGIES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "ecmac/effective_capacity.hpp"
#include "ecmac/integrate.hpp"
#include "ecmac/roots.hpp"

namespace ecmac {

// All decoding permutations of m users in lexicographic order.
inline std::vector<DecodingOrder> all_orders(int m) {
  std::vector<DecodingOrder> orders;
  DecodingOrder o = DecodingOrder::identity(m);
  do {
    orders.push_back(o);
  } while (std::next_permutation(o.pi.begin(), o.pi.end()));
  return orders;
}

// State-independent time sharing across decoding orders within each frame.
// tau is indexed like all_orders(m).
struct TimeSharing {
  std::vector<double> tau;

  static TimeSharing pure(int m_users, const DecodingOrder& order) {
    const auto orders = all_orders(m_users);
    TimeSharing ts;
    ts.tau.assign(orders.size(), 0.0);
    for (std::size_t i = 0; i < orders.size(); ++i)
      if (orders[i] == order) ts.tau[i] = 1.0;
    return ts;
  }

  // two-user convenience: fraction t on order (0,1), remainder on (1,0)
  static TimeSharing two_user(double t) {
    TimeSharing ts;
    ts.tau = {t, 1.0 - t};
    return ts;
  }

  void validate(int m_users) const {
    std::size_t factorial = 1;
    for (int k = 2; k <= m_users; ++k) factorial *= static_cast<std::size_t>(k);
    if (tau.size() != factorial)
      throw usage_error("TimeSharing: need one fraction per decoding order");
    double total = 0.0;
    for (double t : tau) {
      if (t < -1e-12) throw usage_error("TimeSharing: negative fraction");
      total += t;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw usage_error("TimeSharing: fractions must sum to 1");
  }
};

// Suboptimal state-dependent rule: decode in ascending lambda_j / z_j, so
// the heaviest-weighted user is decoded last (interference free). A zero
// gain sends the ratio to +inf; ties keep the lower user index first.
inline DecodingOrder decode_order_lambda_rule(std::span<const double> lambda,
                                              std::span<const double> z) {
  if (lambda.size() != z.size())
    throw usage_error("decode_order_lambda_rule: dimension mismatch");
  const int m = static_cast<int>(z.size());
  std::vector<double> ratio(z.size());
  for (int j = 0; j < m; ++j) {
    if (lambda[static_cast<std::size_t>(j)] < 0.0)
      throw usage_error("decode_order_lambda_rule: negative weight");
    ratio[static_cast<std::size_t>(j)] =
        z[static_cast<std::size_t>(j)] > 0.0
            ? lambda[static_cast<std::size_t>(j)] / z[static_cast<std::size_t>(j)]
            : std::numeric_limits<double>::infinity();
  }
  DecodingOrder order = DecodingOrder::identity(m);
  std::stable_sort(order.pi.begin(), order.pi.end(), [&](int a, int b) {
    return ratio[static_cast<std::size_t>(a)] < ratio[static_cast<std::size_t>(b)];
  });
  return order;
}

// A rule assigning a decoding permutation to each fading state. For two
// users every supported rule reduces to a curve z2 = boundary(z1): states
// below the curve decode user 0 first (user 1 last), states above decode
// user 1 first. swap_regions flips that assignment while keeping the same
// curve, which is the comparison case for the region-labeling choice.
struct DecodingPartition {
  enum class Kind { fixed, k_rule, lambda_rule };

  Kind kind = Kind::fixed;
  DecodingOrder order;               // fixed
  double k_constant = 1.0;           // k_rule
  double common_beta = 1.0;          // k_rule
  std::array<double, 2> snr{1.0, 1.0};  // k_rule
  std::vector<double> lambda;        // lambda_rule
  bool swap_regions = false;

  static DecodingPartition fixed(DecodingOrder o) {
    o.validate();
    DecodingPartition p;
    p.kind = Kind::fixed;
    p.order = std::move(o);
    return p;
  }

  // Optimal two-user boundary for a common QoS exponent: the curve where
  // ((1+SNR0*z1)/(1+SNR1*z2))^(-beta) == K, i.e.
  //   z2 = ((1 + SNR0*z1) * K^(1/beta) - 1) / SNR1.
  static DecodingPartition k_rule(double k, const SystemConfig& cfg) {
    if (cfg.num_users() != 2)
      throw usage_error("DecodingPartition::k_rule: two users required");
    if (!(k >= 0.0)) throw usage_error("DecodingPartition::k_rule: K < 0");
    DecodingPartition p;
    p.kind = Kind::k_rule;
    p.k_constant = k;
    p.common_beta = cfg.beta(0);
    p.snr = {cfg.users[0].snr, cfg.users[1].snr};
    return p;
  }

  static DecodingPartition lambda_rule(std::vector<double> weights) {
    if (weights.size() < 2)
      throw usage_error("DecodingPartition::lambda_rule: need weights");
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0)
        throw usage_error("DecodingPartition::lambda_rule: negative weight");
      total += w;
    }
    if (!(total > 0.0))
      throw usage_error("DecodingPartition::lambda_rule: zero weights");
    DecodingPartition p;
    p.kind = Kind::lambda_rule;
    p.lambda = std::move(weights);
    return p;
  }

  // linear boundary z2 = c * z1 (the parametric family used for partition
  // searches); c = +inf pins user 0 first everywhere
  static DecodingPartition linear_boundary(double c) {
    if (!(c >= 0.0))
      throw usage_error("DecodingPartition::linear_boundary: c must be >= 0");
    return lambda_rule({1.0, c});
  }

  // K^(1/beta) without overflowing for tiny beta
  double k_pow() const {
    if (k_constant == 0.0) return 0.0;
    const double lr = std::log(k_constant) / common_beta;
    if (lr > 700.0) return std::numeric_limits<double>::infinity();
    return std::exp(lr);
  }

  double boundary(double z1) const {
    switch (kind) {
      case Kind::fixed:
        return order.pi[0] == 0 ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
      case Kind::k_rule: {
        const double kp = k_pow();
        if (std::isinf(kp)) return kp;
        return ((1.0 + snr[0] * z1) * kp - 1.0) / snr[1];
      }
      case Kind::lambda_rule: {
        if (lambda[0] == 0.0) return std::numeric_limits<double>::infinity();
        return (lambda[1] / lambda[0]) * z1;
      }
    }
    return 0.0;
  }

  // z1 below which boundary(z1) <= 0 (for splitting the outer integral);
  // +inf when the boundary is never positive.
  double outer_kink() const {
    switch (kind) {
      case Kind::fixed:
        return order.pi[0] == 0 ? 0.0
                                : std::numeric_limits<double>::infinity();
      case Kind::k_rule: {
        if (k_constant == 0.0) return std::numeric_limits<double>::infinity();
        if (k_constant >= 1.0) return 0.0;
        const double lr = -std::log(k_constant) / common_beta;
        if (lr > 700.0) return std::numeric_limits<double>::infinity();
        return (std::exp(lr) - 1.0) / snr[0];
      }
      case Kind::lambda_rule:
        return 0.0;
    }
    return 0.0;
  }

  // decoding order applied below / above the two-user boundary
  DecodingOrder below_order() const {
    return swap_regions ? DecodingOrder::of({1, 0}) : DecodingOrder::of({0, 1});
  }
  DecodingOrder above_order() const {
    return swap_regions ? DecodingOrder::of({0, 1}) : DecodingOrder::of({1, 0});
  }

  DecodingOrder order_at(std::span<const double> z) const {
    switch (kind) {
      case Kind::fixed:
        return order;
      case Kind::k_rule:
        return z[1] < boundary(z[0]) ? below_order() : above_order();
      case Kind::lambda_rule: {
        DecodingOrder o = decode_order_lambda_rule(lambda, z);
        if (swap_regions) std::reverse(o.pi.begin(), o.pi.end());
        return o;
      }
    }
    return order;
  }
};

namespace detail {

// 2^(-beta * r) for the two-user rate branches, written as direct powers
struct TwoUserMgf {
  double s0, s1;  // per-user SNR
  // user 0 decoded last / first
  double u0_last(double beta, double z1, double z2) const {
    return std::pow(1.0 + s0 * z1, -beta);
  }
  double u0_first(double beta, double z1, double z2) const {
    return std::pow(1.0 + s0 * z1 / (1.0 + s1 * z2), -beta);
  }
  double u1_last(double beta, double z1, double z2) const {
    return std::pow(1.0 + s1 * z2, -beta);
  }
  double u1_first(double beta, double z1, double z2) const {
    return std::pow(1.0 + s1 * z2 / (1.0 + s0 * z1), -beta);
  }
};

}  // namespace detail

// E{2^(-beta_user * r_user)} under a two-user state-dependent partition,
// splitting the quadrature along the boundary curve.
inline Estimate partition_mgf(const SystemConfig& cfg, const FadingModel& model,
                              const DecodingPartition& part, int user,
                              const IntegrationSpec& spec) {
  if (cfg.num_users() != 2)
    throw usage_error("partition_mgf: two users required");
  const detail::TwoUserMgf mgf{cfg.users[0].snr, cfg.users[1].snr};
  const double beta = cfg.beta(user);
  const bool user0_last_below = part.below_order().pi[1] == 0;
  auto boundary = [&](double z1) { return part.boundary(z1); };
  // branch value for this user when user 0 is decoded last / first
  auto val_u0_last = [&](double z1, double z2) {
    return user == 0 ? mgf.u0_last(beta, z1, z2) : mgf.u1_first(beta, z1, z2);
  };
  auto val_u0_first = [&](double z1, double z2) {
    return user == 0 ? mgf.u0_first(beta, z1, z2) : mgf.u1_last(beta, z1, z2);
  };
  if (user0_last_below)
    return expect_split(model, boundary, val_u0_last, val_u0_first, spec,
                        part.outer_kink());
  return expect_split(model, boundary, val_u0_first, val_u0_last, spec,
                      part.outer_kink());
}

// Effective capacities under a state-dependent decoding partition.
// Two-user quadrature splits along the boundary; Monte Carlo and higher
// dimensions evaluate the per-state order directly.
inline std::vector<CapacityEstimate> variable_order_capacities(
    const SystemConfig& cfg, const FadingModel& model,
    const DecodingPartition& part, const IntegrationSpec& spec) {
  cfg.validate();
  const int m = cfg.num_users();
  std::vector<CapacityEstimate> caps(static_cast<std::size_t>(m));
  if (m == 2 && spec.method == IntegrationMethod::quadrature) {
    for (int j = 0; j < 2; ++j) {
      const Estimate phi = partition_mgf(cfg, model, part, j, spec);
      const double b_ln2 = cfg.beta(j) * std::numbers::ln2;
      if (!(phi.value > 0.0)) {
        caps[static_cast<std::size_t>(j)] = {0.0, 0.0, true};
        continue;
      }
      caps[static_cast<std::size_t>(j)] = {-std::log(phi.value) / b_ln2,
                                           phi.error / (phi.value * b_ln2),
                                           false};
    }
    return caps;
  }
  std::vector<double> rates(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    auto rate = [&](std::span<const double> z) {
      instant_rates_into(cfg, part.order_at(z), z, rates);
      return rates[static_cast<std::size_t>(j)];
    };
    caps[static_cast<std::size_t>(j)] =
        effective_capacity(cfg, model, j, rate, spec);
  }
  return caps;
}

// Effective capacities for state-independent time sharing across decoding
// orders: the tau-mixture sits inside the exponent (same frame, same state).
inline std::vector<CapacityEstimate> fixed_order_capacities(
    const SystemConfig& cfg, const FadingModel& model, const TimeSharing& ts,
    const IntegrationSpec& spec) {
  cfg.validate();
  const int m = cfg.num_users();
  ts.validate(m);
  const auto orders = all_orders(m);
  std::vector<CapacityEstimate> caps(static_cast<std::size_t>(m));
  std::vector<double> rates(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    auto rate = [&](std::span<const double> z) {
      double mixed = 0.0;
      for (std::size_t i = 0; i < orders.size(); ++i) {
        if (ts.tau[i] == 0.0) continue;
        instant_rates_into(cfg, orders[i], z, rates);
        mixed += ts.tau[i] * rates[static_cast<std::size_t>(j)];
      }
      return mixed;
    };
    caps[static_cast<std::size_t>(j)] =
        effective_capacity(cfg, model, j, rate, spec);
  }
  return caps;
}

// Solution of the two-user boundary constant: K is the fixed point of
// K = (1 - lambda1) * phi1(K) / (lambda1 * phi2(K)), with phi_j the
// rate MGF values evaluated under the partition K itself induces.
struct KSolution {
  double k = 1.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

inline KSolution optimal_partition_two_user(const SystemConfig& cfg,
                                            const FadingModel& model,
                                            double lambda1,
                                            const IntegrationSpec& spec) {
  cfg.validate();
  if (cfg.num_users() != 2)
    throw usage_error("optimal_partition_two_user: two users required");
  const double t0 = cfg.users[0].theta, t1 = cfg.users[1].theta;
  if (std::abs(t0 - t1) > 1e-12 * std::max(t0, t1))
    throw usage_error(
        "optimal_partition_two_user: users must share a common theta");
  if (!(lambda1 > 0.0 && lambda1 < 1.0))
    throw usage_error("optimal_partition_two_user: lambda1 must be in (0,1)");

  auto phis = [&](double k) -> std::array<double, 2> {
    const DecodingPartition part = DecodingPartition::k_rule(k, cfg);
    const double p1 = partition_mgf(cfg, model, part, 0, spec).value;
    const double p2 = partition_mgf(cfg, model, part, 1, spec).value;
    return {p1, p2};
  };
  auto next_k = [&](double k) {
    const auto p = phis(k);
    return (1.0 - lambda1) * p[0] / (lambda1 * p[1]);
  };

  std::vector<double> history;
  double k = (1.0 - lambda1) / lambda1;  // exact in the ergodic limit
  KSolution sol;
  for (int it = 0; it < 200; ++it) {
    const double target = next_k(k);
    const double residual = k - target;
    history.push_back(residual);
    if (std::abs(residual) / std::max(k, 1.0) < 1e-6) {
      const auto p = phis(k);
      return {k, p[0], p[1], residual, it + 1};
    }
    const double knew = 0.5 * k + 0.5 * target;
    if (!std::isfinite(knew) || knew <= 0.0) break;
    k = knew;
  }

  // damped iteration stalled: bisection on log K over a wide bracket
  auto res_of_log = [&](double lk) {
    const double kk = std::exp(lk);
    return kk - next_k(kk);
  };
  const double lo = std::log(1e-6), hi = std::log(1e6);
  double prev_l = lo, prev_r = res_of_log(lo);
  for (int i = 1; i <= 60; ++i) {
    const double l = lo + (hi - lo) * i / 60.0;
    const double r = res_of_log(l);
    if ((prev_r <= 0.0) != (r <= 0.0)) {
      const RootResult root = bisect(res_of_log, prev_l, l, 1e-12, 1e-12);
      const double kk = std::exp(root.x);
      const auto p = phis(kk);
      const double residual = kk - (1.0 - lambda1) * p[0] / (lambda1 * p[1]);
      if (std::abs(residual) / std::max(kk, 1.0) < 1e-6)
        return {kk, p[0], p[1], residual, static_cast<int>(history.size()) +
                                              root.iterations};
      break;
    }
    prev_l = l;
    prev_r = r;
  }
  throw convergence_error(
      "optimal_partition_two_user: fixed point did not converge", history);
}

// TDMA effective capacity of one user at time fraction delta.
inline CapacityEstimate tdma_capacity(const SystemConfig& cfg,
                                      const FadingModel& model, int user,
                                      double delta,
                                      const IntegrationSpec& spec) {
  if (user < 0 || user >= cfg.num_users())
    throw usage_error("tdma_capacity: bad user index");
  if (delta < 0.0 || delta > 1.0)
    throw usage_error("tdma_capacity: delta outside [0, 1]");
  if (delta == 0.0) return {0.0, 0.0, false};
  // the rate depends only on this user's gain: integrate its marginal
  FadingModel marginal;
  marginal.mean = {model.mean[static_cast<std::size_t>(user)]};
  const double snr = cfg.users[static_cast<std::size_t>(user)].snr;
  const double b_ln2 = cfg.beta(user) * std::numbers::ln2;
  auto g = [&](std::span<const double> z) {
    return -b_ln2 * delta * std::log2(1.0 + snr * z[0] / delta);
  };
  const Estimate le = log_expect_exp(marginal, g, spec);
  if (le.value == -std::numeric_limits<double>::infinity())
    return {0.0, 0.0, true};
  return {-le.value / b_ln2, le.error / b_ln2, false};
}

namespace detail {

// d/d(delta) of the TDMA effective capacity of one user:
//   E{ w(z) h'(z) } / E{ w(z) },  w = (1+u)^(-beta*delta), u = SNR z/delta,
//   h' = log2(1+u) - (u/(1+u)) log2(e).
inline double tdma_capacity_derivative(const SystemConfig& cfg,
                                       const FadingModel& model, int user,
                                       double delta,
                                       const IntegrationSpec& spec) {
  FadingModel marginal;
  marginal.mean = {model.mean[static_cast<std::size_t>(user)]};
  const double snr = cfg.users[static_cast<std::size_t>(user)].snr;
  const double beta = cfg.beta(user);
  constexpr double log2e = 1.4426950408889634074;
  auto num = [&](std::span<const double> z) {
    const double u = snr * z[0] / delta;
    const double w = std::pow(1.0 + u, -beta * delta);
    return w * (std::log2(1.0 + u) - (u / (1.0 + u)) * log2e);
  };
  auto den = [&](std::span<const double> z) {
    const double u = snr * z[0] / delta;
    return std::pow(1.0 + u, -beta * delta);
  };
  const double n = expect(marginal, num, spec).value;
  const double d = expect(marginal, den, spec).value;
  return n / d;
}

}  // namespace detail

struct TdmaAllocation {
  std::vector<double> delta;
  std::vector<CapacityEstimate> capacity;
  double kappa = 0.0;  // common multiplier on the active set
};

// Optimal TDMA time fractions maximizing sum_j lambda_j C_j(delta_j) on the
// simplex. Each weighted derivative lambda_j * C_j'(delta_j) is decreasing,
// so the stationarity condition "derivative equals a common kappa on the
// active set" is solved by bisecting kappa until the fractions sum to one.
inline TdmaAllocation tdma_optimize(const SystemConfig& cfg,
                                    const FadingModel& model,
                                    std::span<const double> lambda,
                                    const IntegrationSpec& spec) {
  cfg.validate();
  const int m = cfg.num_users();
  if (static_cast<int>(lambda.size()) != m)
    throw usage_error("tdma_optimize: weight dimension mismatch");
  double wsum = 0.0;
  for (double l : lambda) {
    if (l < 0.0) throw usage_error("tdma_optimize: negative weight");
    wsum += l;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw usage_error("tdma_optimize: weights must sum to 1");

  constexpr double delta_floor = 1e-9;
  auto delta_of_kappa = [&](int j, double kappa) {
    const double lj = lambda[static_cast<std::size_t>(j)];
    if (lj == 0.0) return 0.0;
    auto g = [&](double d) {
      return lj * detail::tdma_capacity_derivative(cfg, model, j, d, spec);
    };
    if (g(1.0) >= kappa) return 1.0;
    return bisect([&](double d) { return g(d) - kappa; }, delta_floor, 1.0,
                  1e-10, 0.0, 100)
        .x;
  };
  auto total = [&](double kappa) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += delta_of_kappa(j, kappa);
    return s;
  };

  double kappa_hi = 1.0;
  int guard = 0;
  while (total(kappa_hi) > 1.0 && guard++ < 100) kappa_hi *= 2.0;
  double kappa_lo = kappa_hi;
  while (total(kappa_lo) < 1.0 && guard++ < 200) kappa_lo *= 0.5;
  const RootResult r =
      bisect([&](double k) { return total(k) - 1.0; }, kappa_lo, kappa_hi,
             0.0, 1e-10, 100);

  TdmaAllocation out;
  out.kappa = r.x;
  out.delta.resize(static_cast<std::size_t>(m));
  double s = 0.0;
  for (int j = 0; j < m; ++j) {
    out.delta[static_cast<std::size_t>(j)] = delta_of_kappa(j, r.x);
    s += out.delta[static_cast<std::size_t>(j)];
  }
  for (double& d : out.delta) d /= s;  // exact simplex membership
  out.capacity.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    out.capacity[static_cast<std::size_t>(j)] =
        tdma_capacity(cfg, model, j, out.delta[static_cast<std::size_t>(j)], spec);
  return out;
}

}  // namespace ecmac

#endif
