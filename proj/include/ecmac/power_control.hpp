#ifndef ECMAC_POWER_CONTROL_HPP
#define ECMAC_POWER_CONTROL_HPP

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecmac/effective_capacity.hpp"
#include "ecmac/integrate.hpp"
#include "ecmac/roots.hpp"
#include "ecmac/strategies.hpp"

namespace ecmac {

// Optimal single-user transmit level against a fixed interference floor:
//   mu = [ (1+I)^(b/(b+1)) / (a^(1/(b+1)) z^(b/(b+1))) - (1+I)/z ]^+,
// zero whenever the effective quality z/(1+I) is below the threshold a.
inline double qos_water_fill(double z, double alpha, double beta,
                             double interference) {
  const double floor = 1.0 + interference;
  if (!(z > alpha * floor)) return 0.0;
  const double p = 1.0 / (beta + 1.0);
  return std::pow(floor, beta * p) /
             (std::pow(alpha, p) * std::pow(z, beta * p)) -
         floor / z;
}

// Fixed-decoding-order power policy: per-user thresholds alpha, with the
// per-state levels solved sequentially from the last-decoded user backward
// (the last user sees no interference, each earlier user sees the already
// solved levels of the users decoded after it).
struct FixedOrderPolicy {
  SystemConfig cfg;
  DecodingOrder order;
  std::vector<double> alpha;

  void evaluate_into(std::span<const double> z, std::span<double> mu) const {
    const int m = cfg.num_users();
    double interference = 0.0;
    for (int k = m - 1; k >= 0; --k) {
      const int u = order.pi[static_cast<std::size_t>(k)];
      mu[static_cast<std::size_t>(u)] =
          qos_water_fill(z[static_cast<std::size_t>(u)],
                         alpha[static_cast<std::size_t>(u)], cfg.beta(u),
                         interference);
      interference += mu[static_cast<std::size_t>(u)] *
                      z[static_cast<std::size_t>(u)];
    }
  }

  std::vector<double> evaluate(std::span<const double> z) const {
    std::vector<double> mu(z.size());
    evaluate_into(z, mu);
    return mu;
  }
};

// Calibrates the thresholds so each average power constraint binds:
// E{mu_j} = SNR_j, solved user by user in the reverse decoding order by
// monotone bisection (E{mu_j} is decreasing in alpha_j).
inline FixedOrderPolicy fixed_order_policy(const SystemConfig& cfg,
                                           const FadingModel& model,
                                           const DecodingOrder& order,
                                           const IntegrationSpec& spec) {
  cfg.validate();
  order.validate();
  const int m = cfg.num_users();
  if (order.size() != m || model.num_users() != m)
    throw usage_error("fixed_order_policy: dimension mismatch");
  FixedOrderPolicy pol{cfg, order, std::vector<double>(
                                       static_cast<std::size_t>(m), 1.0)};
  for (int k = m - 1; k >= 0; --k) {
    const int u = order.pi[static_cast<std::size_t>(k)];
    auto mean_power = [&](double a) {
      pol.alpha[static_cast<std::size_t>(u)] = a;
      auto level = [&](std::span<const double> z) {
        double interference = 0.0;
        double mu_u = 0.0;
        for (int kk = m - 1; kk >= k; --kk) {
          const int uu = order.pi[static_cast<std::size_t>(kk)];
          const double mu =
              qos_water_fill(z[static_cast<std::size_t>(uu)],
                             pol.alpha[static_cast<std::size_t>(uu)],
                             cfg.beta(uu), interference);
          interference += mu * z[static_cast<std::size_t>(uu)];
          if (kk == k) mu_u = mu;
        }
        return mu_u;
      };
      return expect(model, level, spec).value;
    };
    const RootResult r = solve_decreasing(
        mean_power, cfg.users[static_cast<std::size_t>(u)].snr, 1.0);
    if (!r.converged)
      throw convergence_error(
          "fixed_order_policy: average power target unattainable for user " +
          std::to_string(u));
    pol.alpha[static_cast<std::size_t>(u)] = r.x;
  }
  return pol;
}

// Two-user policy for decoding order (user 1 first, user 0 last), written
// out branch by branch: the last-decoded user water-fills on its own
// channel; the first-decoded user water-fills against the interference
// floor (z0/alpha0)^(1/(beta0+1)) that the last user's level induces.
inline std::array<double, 2> two_user_closed_form(const SystemConfig& cfg,
                                                  double alpha0, double alpha1,
                                                  double z0, double z1) {
  if (cfg.num_users() != 2)
    throw usage_error("two_user_closed_form: two users required");
  const double b0 = cfg.beta(0), b1 = cfg.beta(1);
  double mu0 = 0.0, mu1 = 0.0;
  if (z0 > alpha0)
    mu0 = 1.0 / (std::pow(alpha0, 1.0 / (b0 + 1.0)) *
                 std::pow(z0, b0 / (b0 + 1.0))) -
          1.0 / z0;
  if (z0 <= alpha0 && z1 > alpha1) {
    mu1 = 1.0 / (std::pow(alpha1, 1.0 / (b1 + 1.0)) *
                 std::pow(z1, b1 / (b1 + 1.0))) -
          1.0 / z1;
  } else if (z0 > alpha0 &&
             z1 / alpha1 > std::pow(z0 / alpha0, 1.0 / (b0 + 1.0))) {
    mu1 = std::pow(z0 / alpha0, b1 / ((b0 + 1.0) * (b1 + 1.0))) /
              (std::pow(alpha1, 1.0 / (b1 + 1.0)) *
               std::pow(z1, b1 / (b1 + 1.0))) -
          std::pow(z0 / alpha0, 1.0 / (b0 + 1.0)) / z1;
  }
  return {mu0, mu1};
}

// Lagrangian parameters of the two-user variable-decoding-order policy.
// phi_j are the rate MGF values E{2^(-beta_j r_j)} of the policy itself;
// the thresholds combine them with the power multipliers kappa_j.
struct VariableOrderParams {
  double lambda0 = 0.5, lambda1 = 0.5;
  double beta0 = 1.0, beta1 = 1.0;
  double kappa0 = 0.0, kappa1 = 0.0;
  double phi0 = 1.0, phi1 = 1.0;
  double mu_cap = 1e4;

  double alpha_own(int j) const {
    return j == 0 ? kappa0 * phi0 * std::numbers::ln2 / lambda0
                  : kappa1 * phi1 * std::numbers::ln2 / lambda1;
  }
  // cross constant entering the stationarity of the last-decoded user a:
  // kappa_a * phi_b * ln2 / lambda_b
  double alpha_cross(int last) const {
    return last == 0 ? kappa0 * phi1 * std::numbers::ln2 / lambda1
                     : kappa1 * phi0 * std::numbers::ln2 / lambda0;
  }
};

// Joint per-state solve when user a (gain za) is decoded last and user b
// (gain zb) first, both potentially active. The stationarity of mu_a,
// after eliminating mu_b through b's water-fill response, reduces to the
// scalar equation
//   (za/alpha_a)(1+mu_a za)^-(beta_a+1)
//     - (za alpha_b/(zb cross_ab)) [ (zb/(alpha_b(1+mu_a za)))^(1/(beta_b+1)) - 1 ]
//     - 1 = 0,
// solved by bracketed root finding on [0, mu_cap]. Nonpositive roots (and
// brackets without a sign change) collapse to the matching boundary case.
inline std::array<double, 2> interior_state_solve(double alpha_a,
                                                  double alpha_b,
                                                  double cross_ab,
                                                  double beta_a, double beta_b,
                                                  double za, double zb,
                                                  double mu_cap) {
  auto stat = [&](double mu_a) {
    const double floor = 1.0 + mu_a * za;
    return (za / alpha_a) * std::pow(floor, -(beta_a + 1.0)) -
           (za * alpha_b / (zb * cross_ab)) *
               (std::pow(zb / (alpha_b * floor), 1.0 / (beta_b + 1.0)) - 1.0) -
           1.0;
  };
  if (stat(0.0) <= 0.0)
    return {0.0, qos_water_fill(zb, alpha_b, beta_b, 0.0)};
  if (stat(mu_cap) > 0.0)
    return {qos_water_fill(za, alpha_a, beta_a, 0.0), 0.0};
  const RootResult r = brent(stat, 0.0, mu_cap, 1e-13, 200);
  const double mu_a = r.x;
  const double mu_b = qos_water_fill(zb, alpha_b, beta_b, mu_a * za);
  if (!(mu_b > 0.0)) return {qos_water_fill(za, alpha_a, beta_a, 0.0), 0.0};
  return {mu_a, mu_b};
}

namespace detail {

// Per-state policy with user a decoded last, user b first: threshold tests
// first, then the joint interior solve.
inline std::array<double, 2> state_pair_a_last(double za, double zb,
                                               double alpha_a, double alpha_b,
                                               double cross_ab, double beta_a,
                                               double beta_b, double mu_cap) {
  if (!(zb > alpha_b))
    return {qos_water_fill(za, alpha_a, beta_a, 0.0), 0.0};
  auto stat0 = (za / alpha_a) -
               (za * alpha_b / (zb * cross_ab)) *
                   (std::pow(zb / alpha_b, 1.0 / (beta_b + 1.0)) - 1.0) -
               1.0;
  if (stat0 <= 0.0) return {0.0, qos_water_fill(zb, alpha_b, beta_b, 0.0)};
  if (zb / alpha_b < std::pow(za / alpha_a, 1.0 / (beta_a + 1.0)))
    return {qos_water_fill(za, alpha_a, beta_a, 0.0), 0.0};
  return interior_state_solve(alpha_a, alpha_b, cross_ab, beta_a, beta_b, za,
                              zb, mu_cap);
}

}  // namespace detail

// Two-user power policy for a given state-dependent decoding partition.
struct VariableOrderPolicy {
  SystemConfig cfg;
  DecodingPartition part;
  VariableOrderParams params;

  // (mu_0, mu_1) at state (z1, z2)
  std::array<double, 2> evaluate(double z1, double z2) const {
    const bool below = z2 < part.boundary(z1);
    const DecodingOrder ord = below ? part.below_order() : part.above_order();
    return evaluate_with_last(ord.pi[1], z1, z2);
  }

  std::array<double, 2> evaluate_with_last(int last, double z1,
                                           double z2) const {
    if (last == 0) {
      const auto p = detail::state_pair_a_last(
          z1, z2, params.alpha_own(0), params.alpha_own(1),
          params.alpha_cross(0), params.beta0, params.beta1, params.mu_cap);
      return {p[0], p[1]};
    }
    const auto p = detail::state_pair_a_last(
        z2, z1, params.alpha_own(1), params.alpha_own(0),
        params.alpha_cross(1), params.beta1, params.beta0, params.mu_cap);
    return {p[1], p[0]};
  }

  std::vector<double> evaluate(std::span<const double> z) const {
    const auto p = evaluate(z[0], z[1]);
    return {p[0], p[1]};
  }
};

// Convergence diagnostics of the nested (kappa, phi) iteration and the
// per-state optimality conditions of the converged policy.
struct KktReport {
  double max_residual = std::numeric_limits<double>::infinity();
  std::array<double, 2> constraint_gap{
      std::numeric_limits<double>::infinity(),
      std::numeric_limits<double>::infinity()};
  int outer_iterations = 0;
  int inner_rounds = 0;
  bool converged = false;
  VariableOrderParams params;
};

struct VariableOrderResult {
  std::optional<VariableOrderPolicy> policy;
  KktReport report;
};

struct VariableOrderOptions {
  double power_tol = 1e-3;  // relative gap of E{mu_j} vs SNR_j
  double phi_tol = 1e-4;    // relative change of phi between outer rounds
  int max_outer = 100;
  int max_inner_rounds = 60;
  double mu_cap_factor = 1e4;
  int residual_grid = 25;
};

namespace detail {

// E{f(z)} with the two-user split boundary, value only (no error pass):
// the solver's bisections need many cheap evaluations.
template <class B, class FB, class FA>
double split_value(const FadingModel& model, B&& boundary, FB&& below,
                   FA&& above, const IntegrationSpec& spec,
                   double outer_kink) {
  if (spec.method == IntegrationMethod::quadrature)
    return split_quad_value(model, boundary, below, above, spec.nodes_per_dim,
                            outer_kink);
  SplitMix64 rng(spec.seed);
  std::vector<double> z(2);
  double sum = 0.0;
  for (std::int64_t i = 0; i < spec.samples; ++i) {
    model.sample_into(z, rng);
    sum += z[1] < boundary(z[0]) ? below(z[0], z[1]) : above(z[0], z[1]);
  }
  return sum / static_cast<double>(spec.samples);
}

// normalized stationarity residuals (each condition divided by its kappa)
// for the user decoded last (a) and first (b); zero at interior optima
inline double residual_last(double za, double zb, double mu_a, double mu_b,
                            double alpha_a, double cross_ab, double beta_a,
                            double beta_b) {
  const double floor = 1.0 + mu_a * za;
  return (za / alpha_a) * std::pow(floor, -(beta_a + 1.0)) -
         (za / cross_ab) *
             std::pow(1.0 + mu_b * zb / floor, -(beta_b + 1.0)) * mu_b * zb /
             (floor * floor) -
         1.0;
}

inline double residual_first(double za, double zb, double mu_a, double mu_b,
                             double alpha_b, double beta_b) {
  const double floor = 1.0 + mu_a * za;
  return (zb / (alpha_b * floor)) *
             std::pow(1.0 + mu_b * zb / floor, -(beta_b + 1.0)) -
         1.0;
}

}  // namespace detail

// Rate MGF values E{2^(-beta_j r_j)} of a variable-order policy; these are
// the phi values the thresholds must reproduce at a fixed point.
inline std::array<Estimate, 2> policy_mgf(const SystemConfig& cfg,
                                          const FadingModel& model,
                                          const VariableOrderPolicy& pol,
                                          const IntegrationSpec& spec) {
  const auto& part = pol.part;
  auto boundary = [&](double z1) { return part.boundary(z1); };
  const int below_last = part.below_order().pi[1];
  const int above_last = part.above_order().pi[1];
  std::array<Estimate, 2> phi;
  for (int j = 0; j < 2; ++j) {
    const double beta = cfg.beta(j);
    auto value_with_last = [&, j](int last, double z1, double z2) {
      const auto mu = pol.evaluate_with_last(last, z1, z2);
      const double own = j == 0 ? mu[0] * z1 : mu[1] * z2;
      if (j == last) return std::pow(1.0 + own, -beta);
      const double other = j == 0 ? mu[1] * z2 : mu[0] * z1;
      return std::pow(1.0 + own / (1.0 + other), -beta);
    };
    auto below_val = [&](double z1, double z2) {
      return value_with_last(below_last, z1, z2);
    };
    auto above_val = [&](double z1, double z2) {
      return value_with_last(above_last, z1, z2);
    };
    phi[static_cast<std::size_t>(j)] = expect_split(
        model, boundary, below_val, above_val, spec, part.outer_kink());
  }
  return phi;
}

// Effective capacities achieved by a variable-order policy.
inline std::vector<CapacityEstimate> policy_capacities(
    const SystemConfig& cfg, const FadingModel& model,
    const VariableOrderPolicy& pol, const IntegrationSpec& spec) {
  const auto phi = policy_mgf(cfg, model, pol, spec);
  std::vector<CapacityEstimate> caps(2);
  for (int j = 0; j < 2; ++j) {
    const double b_ln2 = cfg.beta(j) * std::numbers::ln2;
    const Estimate& p = phi[static_cast<std::size_t>(j)];
    if (!(p.value > 0.0)) {
      caps[static_cast<std::size_t>(j)] = {0.0, 0.0, true};
      continue;
    }
    caps[static_cast<std::size_t>(j)] = {-std::log(p.value) / b_ln2,
                                         p.error / (p.value * b_ln2), false};
  }
  return caps;
}

// Effective capacities achieved by a fixed-order policy.
inline std::vector<CapacityEstimate> policy_capacities(
    const SystemConfig& cfg, const FadingModel& model,
    const FixedOrderPolicy& pol, const IntegrationSpec& spec) {
  const int m = cfg.num_users();
  std::vector<CapacityEstimate> caps(static_cast<std::size_t>(m));
  std::vector<double> mu(static_cast<std::size_t>(m));
  std::vector<double> rates(static_cast<std::size_t>(m));
  const auto inv = pol.order.inverse();
  for (int j = 0; j < m; ++j) {
    auto rate = [&](std::span<const double> z) {
      pol.evaluate_into(z, mu);
      double interference = 0.0;
      for (int k = m - 1; k > inv[static_cast<std::size_t>(j)]; --k) {
        const int u = pol.order.pi[static_cast<std::size_t>(k)];
        interference += mu[static_cast<std::size_t>(u)] *
                        z[static_cast<std::size_t>(u)];
      }
      return std::log2(1.0 + mu[static_cast<std::size_t>(j)] *
                                 z[static_cast<std::size_t>(j)] /
                                 (1.0 + interference));
    };
    caps[static_cast<std::size_t>(j)] =
        effective_capacity(cfg, model, j, rate, spec);
  }
  return caps;
}

// Nested solver for the variable-order policy: the outer loop relaxes the
// MGF values phi onto the policy they induce, the inner loop bisects the
// power multipliers kappa until both average power constraints bind.
inline VariableOrderResult variable_order_policy(
    const SystemConfig& cfg, const FadingModel& model,
    const DecodingPartition& part, std::span<const double> lambda,
    const IntegrationSpec& spec, const VariableOrderOptions& opt = {}) {
  cfg.validate();
  if (cfg.num_users() != 2 || model.num_users() != 2)
    throw usage_error("variable_order_policy: two users required");
  if (lambda.size() != 2 || !(lambda[0] > 0.0) || !(lambda[1] > 0.0))
    throw usage_error(
        "variable_order_policy: both weights must be strictly positive");

  const double s0 = cfg.users[0].snr, s1 = cfg.users[1].snr;
  VariableOrderPolicy pol;
  pol.cfg = cfg;
  pol.part = part;
  pol.params.lambda0 = lambda[0];
  pol.params.lambda1 = lambda[1];
  pol.params.beta0 = cfg.beta(0);
  pol.params.beta1 = cfg.beta(1);
  pol.params.mu_cap = opt.mu_cap_factor * std::max(s0, s1);

  auto boundary = [&part](double z1) { return part.boundary(z1); };
  const double kink = part.outer_kink();
  const int below_last = part.below_order().pi[1];
  const int above_last = part.above_order().pi[1];

  auto mean_power = [&](int j) {
    auto below_mu = [&](double z1, double z2) {
      return pol.evaluate_with_last(below_last, z1, z2)[static_cast<std::size_t>(j)];
    };
    auto above_mu = [&](double z1, double z2) {
      return pol.evaluate_with_last(above_last, z1, z2)[static_cast<std::size_t>(j)];
    };
    return detail::split_value(model, boundary, below_mu, above_mu, spec, kink);
  };

  // phi start: MGF of the constant-power rates under the same partition
  pol.params.phi0 = partition_mgf(cfg, model, part, 0, spec).value;
  pol.params.phi1 = partition_mgf(cfg, model, part, 1, spec).value;

  // kappa start: thresholds of the single-user problems, translated back
  const auto single_alpha = [&](int j) {
    FadingModel marginal;
    marginal.mean = {model.mean[static_cast<std::size_t>(j)]};
    const double beta = cfg.beta(j);
    auto mean_mu = [&](double a) {
      auto f = [&](std::span<const double> z) {
        return qos_water_fill(z[0], a, beta, 0.0);
      };
      return expect(marginal, f, spec).value;
    };
    return solve_decreasing(mean_mu, cfg.users[static_cast<std::size_t>(j)].snr,
                            1.0)
        .x;
  };
  pol.params.kappa0 =
      single_alpha(0) * lambda[0] / (pol.params.phi0 * std::numbers::ln2);
  pol.params.kappa1 =
      single_alpha(1) * lambda[1] / (pol.params.phi1 * std::numbers::ln2);

  KktReport report;
  double prev_dphi0 = 0.0, prev_dphi1 = 0.0;
  bool phi_converged = false;

  for (int outer = 0; outer < opt.max_outer && !phi_converged; ++outer) {
    report.outer_iterations = outer + 1;
    // inner: alternate scalar bisections on kappa until both constraints bind
    bool inner_ok = false;
    for (int round = 0; round < opt.max_inner_rounds; ++round) {
      ++report.inner_rounds;
      const RootResult r0 = solve_decreasing(
          [&](double k) {
            pol.params.kappa0 = k;
            return mean_power(0);
          },
          s0, std::max(pol.params.kappa0, 1e-12), 1e-11);
      pol.params.kappa0 = r0.x;
      const RootResult r1 = solve_decreasing(
          [&](double k) {
            pol.params.kappa1 = k;
            return mean_power(1);
          },
          s1, std::max(pol.params.kappa1, 1e-12), 1e-11);
      pol.params.kappa1 = r1.x;
      if (!r0.converged || !r1.converged) break;
      report.constraint_gap = {std::abs(mean_power(0) / s0 - 1.0),
                               std::abs(mean_power(1) / s1 - 1.0)};
      if (report.constraint_gap[0] < opt.power_tol &&
          report.constraint_gap[1] < opt.power_tol) {
        inner_ok = true;
        break;
      }
    }
    if (!inner_ok) {
      report.converged = false;
      report.params = pol.params;
      return {std::nullopt, report};
    }
    const auto phi_new = policy_mgf(cfg, model, pol, spec);
    const double d0 = phi_new[0].value - pol.params.phi0;
    const double d1 = phi_new[1].value - pol.params.phi1;
    const double rel_change =
        std::max(std::abs(d0) / pol.params.phi0, std::abs(d1) / pol.params.phi1);
    // damp only when the update direction oscillates
    const bool oscillating =
        (d0 * prev_dphi0 < 0.0) || (d1 * prev_dphi1 < 0.0);
    const double step = oscillating ? 0.5 : 1.0;
    prev_dphi0 = d0;
    prev_dphi1 = d1;
    pol.params.phi0 += step * d0;
    pol.params.phi1 += step * d1;
    if (rel_change < opt.phi_tol) phi_converged = true;
  }

  report.params = pol.params;
  if (!phi_converged) {
    report.converged = false;
    return {std::nullopt, report};
  }

  // final diagnostics with the settled parameters
  report.constraint_gap = {std::abs(mean_power(0) / s0 - 1.0),
                           std::abs(mean_power(1) / s1 - 1.0)};

  // stationarity residuals on a quantile grid of states
  double max_res = 0.0;
  const int n = opt.residual_grid;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double z1 =
          -model.mean[0] * std::log1p(-(i + 0.5) / static_cast<double>(n));
      const double z2 =
          -model.mean[1] * std::log1p(-(j + 0.5) / static_cast<double>(n));
      const bool below = z2 < part.boundary(z1);
      const int last = below ? below_last : above_last;
      const auto mu = pol.evaluate_with_last(last, z1, z2);
      const double za = last == 0 ? z1 : z2;
      const double zb = last == 0 ? z2 : z1;
      const double mu_a = mu[static_cast<std::size_t>(last)];
      const double mu_b = mu[static_cast<std::size_t>(1 - last)];
      const double ra = detail::residual_last(
          za, zb, mu_a, mu_b, pol.params.alpha_own(last),
          pol.params.alpha_cross(last), last == 0 ? pol.params.beta0 : pol.params.beta1,
          last == 0 ? pol.params.beta1 : pol.params.beta0);
      const double rb = detail::residual_first(
          za, zb, mu_a, mu_b, pol.params.alpha_own(1 - last),
          last == 0 ? pol.params.beta1 : pol.params.beta0);
      // interior conditions must vanish; at a zero level the condition may
      // only push further negative (complementary slackness)
      max_res = std::max(max_res, mu_a > 0.0 ? std::abs(ra) : std::max(0.0, ra));
      max_res = std::max(max_res, mu_b > 0.0 ? std::abs(rb) : std::max(0.0, rb));
    }
  }
  report.max_residual = max_res;
  report.converged = report.constraint_gap[0] < opt.power_tol &&
                     report.constraint_gap[1] < opt.power_tol;
  if (!report.converged) return {std::nullopt, report};
  return {pol, report};
}

// Exhaustive search over a parametric family of linear partition
// boundaries z2 = c z1, maximizing the weighted sum of the effective
// capacities under the per-partition optimal power policy.
struct PartitionSearchEntry {
  double c = 0.0;
  double weighted_sum = 0.0;
  bool converged = false;
};

struct PartitionSearchResult {
  double best_c = 1.0;
  double best_weighted_sum = 0.0;
  VariableOrderResult best;
  std::vector<PartitionSearchEntry> entries;
};

inline std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g(static_cast<std::size_t>(count));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    g[static_cast<std::size_t>(i)] =
        std::exp(llo + (lhi - llo) * i / (count - 1.0));
  return g;
}

inline PartitionSearchResult partition_search(
    const SystemConfig& cfg, const FadingModel& model,
    std::span<const double> lambda, std::span<const double> c_grid,
    const IntegrationSpec& spec, const VariableOrderOptions& opt = {}) {
  if (c_grid.empty()) throw usage_error("partition_search: empty grid");
  PartitionSearchResult out;
  bool any = false;
  for (double c : c_grid) {
    PartitionSearchEntry entry;
    entry.c = c;
    const DecodingPartition part = DecodingPartition::linear_boundary(c);
    VariableOrderResult res =
        variable_order_policy(cfg, model, part, lambda, spec, opt);
    if (res.policy) {
      const auto caps = policy_capacities(cfg, model, *res.policy, spec);
      entry.weighted_sum =
          lambda[0] * caps[0].value + lambda[1] * caps[1].value;
      entry.converged = true;
      if (!any || entry.weighted_sum > out.best_weighted_sum) {
        any = true;
        out.best_c = c;
        out.best_weighted_sum = entry.weighted_sum;
        out.best = std::move(res);
      }
    }
    out.entries.push_back(entry);
  }
  if (!any)
    throw convergence_error("partition_search: no grid point converged");
  return out;
}

}  // namespace ecmac

#endif
