#ifndef ECMAC_QUEUE_SIM_HPP
#define ECMAC_QUEUE_SIM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ecmac/effective_capacity.hpp"
#include "ecmac/region.hpp"
#include "ecmac/strategies.hpp"

namespace ecmac {

// One buffer simulation: constant arrivals against a per-frame service
// process, queue in bits, Lindley recursion Q' = max(Q + arrival - service, 0).
struct QueueRun {
  std::uint64_t frames = 0;
  std::uint64_t warmup = 0;
  double arrival = 0.0;              // bits per frame
  double service_mean = 0.0;         // empirical, bits per frame
  std::vector<double> queue_samples; // stationary queue lengths, bits
};

// Core engine over an arbitrary service sampler (bits per frame).
template <class ServiceFn>
QueueRun simulate_queue(ServiceFn&& service, double arrival_bits,
                        std::uint64_t frames, std::uint64_t seed,
                        std::uint64_t warmup = 10000) {
  if (frames <= warmup)
    throw usage_error("simulate_queue: frames must exceed the warm-up");
  SplitMix64 rng(seed);
  QueueRun run;
  run.frames = frames;
  run.warmup = warmup;
  run.arrival = arrival_bits;
  run.queue_samples.reserve(frames - warmup);
  double q = 0.0;
  double service_sum = 0.0;
  for (std::uint64_t i = 0; i < frames; ++i) {
    const double s = service(rng);
    service_sum += s;
    q = std::max(q + arrival_bits - s, 0.0);
    if (i >= warmup) run.queue_samples.push_back(q);
  }
  run.service_mean = service_sum / static_cast<double>(frames);
  return run;
}

namespace detail {

// per-frame service of one user (bits) under a strategy at equal weights
template <class RateFn>
QueueRun simulate_with_rate(const SystemConfig& cfg, const FadingModel& model,
                            RateFn&& rate, double capacity, double rho,
                            std::uint64_t frames, std::uint64_t seed) {
  const double tb = cfg.tb_product;
  const double arrival = rho * tb * capacity;
  // stability guard: the ergodic service rate must exceed the arrival
  std::vector<double> z(model.mean.size());
  SplitMix64 probe(seed ^ 0x5bf0a8f1d2c3e4b5ULL);
  double ergodic = 0.0;
  const int probe_n = 20000;
  for (int i = 0; i < probe_n; ++i) {
    model.sample_into(z, probe);
    ergodic += rate(std::span<const double>(z));
  }
  ergodic /= probe_n;
  if (arrival >= tb * ergodic)
    throw instability_error(
        "simulate: arrival rate " + std::to_string(arrival) +
        " bits/frame is at or above the mean service rate " +
        std::to_string(tb * ergodic));
  auto service = [&](SplitMix64& rng) {
    model.sample_into(z, rng);
    return tb * rate(std::span<const double>(z));
  };
  return simulate_queue(service, arrival, frames, seed);
}

}  // namespace detail

// Queue validation for one user: arrivals at rho times the effective
// capacity of the strategy's service rate at the configured theta, service
// drawn i.i.d. per frame from the strategy's rate distribution.
inline QueueRun simulate(const SystemConfig& cfg, const FadingModel& model,
                         Strategy strategy, double rho, std::uint64_t frames,
                         std::uint64_t seed, const IntegrationSpec& spec,
                         int user = 0) {
  cfg.validate();
  if (!(rho > 0.0 && rho <= 1.0))
    throw usage_error("simulate: rho must be in (0, 1]");
  const int m = cfg.num_users();
  if (user < 0 || user >= m) throw usage_error("simulate: bad user index");

  std::vector<double> lambda(static_cast<std::size_t>(m),
                             1.0 / static_cast<double>(m));
  std::vector<double> rates(static_cast<std::size_t>(m));

  if (m == 1) {
    const double snr = cfg.users[0].snr;
    auto rate = [snr](std::span<const double> z) {
      return std::log2(1.0 + snr * z[0]);
    };
    const double cap = effective_capacity(cfg, model, 0, rate, spec).value;
    return detail::simulate_with_rate(cfg, model, rate, cap, rho, frames, seed);
  }

  switch (strategy) {
    case Strategy::tdma: {
      const TdmaAllocation alloc = tdma_optimize(cfg, model, lambda, spec);
      const double delta = alloc.delta[static_cast<std::size_t>(user)];
      auto rate = [&cfg, user, delta](std::span<const double> z) {
        return tdma_instant_rate(cfg, user, delta, z);
      };
      return detail::simulate_with_rate(
          cfg, model, rate, alloc.capacity[static_cast<std::size_t>(user)].value,
          rho, frames, seed);
    }
    case Strategy::variable_lambda_rule:
    case Strategy::variable_optimal: {
      DecodingPartition part = DecodingPartition::lambda_rule(lambda);
      if (strategy == Strategy::variable_optimal) {
        const KSolution sol =
            optimal_partition_two_user(cfg, model, lambda[0], spec);
        part = DecodingPartition::k_rule(sol.k, cfg);
      }
      const auto caps = variable_order_capacities(cfg, model, part, spec);
      auto rate = [&cfg, &part, &rates, user](std::span<const double> z) {
        instant_rates_into(cfg, part.order_at(z), z, rates);
        return rates[static_cast<std::size_t>(user)];
      };
      return detail::simulate_with_rate(
          cfg, model, rate, caps[static_cast<std::size_t>(user)].value, rho,
          frames, seed);
    }
    default: {
      // fixed order with the best time sharing at equal weights
      if (m != 2)
        throw usage_error("simulate: fixed-order service is two-user only");
      auto objective = [&](double t) {
        const auto caps =
            fixed_order_capacities(cfg, model, TimeSharing::two_user(t), spec);
        return lambda[0] * caps[0].value + lambda[1] * caps[1].value;
      };
      const double tau = golden_max(objective, 0.0, 1.0, 1e-6);
      const auto caps =
          fixed_order_capacities(cfg, model, TimeSharing::two_user(tau), spec);
      const auto orders = all_orders(2);
      auto rate = [&cfg, &orders, &rates, tau, user](std::span<const double> z) {
        instant_rates_into(cfg, orders[0], z, rates);
        const double r0 = rates[static_cast<std::size_t>(user)];
        instant_rates_into(cfg, orders[1], z, rates);
        return tau * r0 + (1.0 - tau) * rates[static_cast<std::size_t>(user)];
      };
      return detail::simulate_with_rate(
          cfg, model, rate, caps[static_cast<std::size_t>(user)].value, rho,
          frames, seed);
    }
  }
}

struct DecayEstimate {
  double slope = 0.0;
  double r_squared = 0.0;
  std::vector<double> q_grid;
  std::vector<std::uint64_t> exceedances;
};

// q thresholds spanning the empirical 90th to 99.9th percentiles.
inline std::vector<double> default_q_grid(const QueueRun& run,
                                          int points = 12) {
  if (points < 2) throw usage_error("default_q_grid: need at least 2 points");
  std::vector<double> sorted = run.queue_samples;
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&](double p) {
    const double pos = p * (static_cast<double>(sorted.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double qlo = quantile(0.90), qhi = quantile(0.999);
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] =
        qlo + (qhi - qlo) * i / (points - 1.0);
  return grid;
}

// Least-squares slope of ln P(Q >= q) against q; the tail-decay exponent
// estimate is -slope. Requires at least 100 exceedances at the largest q.
inline DecayEstimate decay_exponent(const QueueRun& run,
                                    std::span<const double> q_grid) {
  if (q_grid.size() < 2)
    throw usage_error("decay_exponent: need at least two thresholds");
  std::vector<double> sorted = run.queue_samples;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  DecayEstimate est;
  est.q_grid.assign(q_grid.begin(), q_grid.end());
  est.exceedances.resize(q_grid.size());
  double largest_usable = 0.0;
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), q_grid[i]);
    const std::uint64_t count =
        static_cast<std::uint64_t>(sorted.end() - it);
    est.exceedances[i] = count;
    if (count >= 100) largest_usable = std::max(largest_usable, q_grid[i]);
  }
  if (est.exceedances.back() < 100)
    throw insufficient_data_error(
        "decay_exponent: fewer than 100 exceedances at q = " +
            std::to_string(q_grid.back()) + "; largest usable q is " +
            std::to_string(largest_usable),
        largest_usable);

  // regression of ln(count/n) on q
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double k = static_cast<double>(q_grid.size());
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    const double x = q_grid[i];
    const double y = std::log(static_cast<double>(est.exceedances[i]) / n);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double den = k * sxx - sx * sx;
  est.slope = (k * sxy - sx * sy) / den;
  const double ss_tot = syy - sy * sy / k;
  const double ss_res = ss_tot - est.slope * (sxy - sx * sy / k);
  est.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return est;
}

}  // namespace ecmac

#endif
