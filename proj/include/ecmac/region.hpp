#ifndef ECMAC_REGION_HPP
#define ECMAC_REGION_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ecmac/power_control.hpp"
#include "ecmac/strategies.hpp"

namespace ecmac {

enum class Strategy {
  fixed_order_ts,
  variable_optimal,
  variable_lambda_rule,
  tdma,
  power_fixed,
  power_variable,
};

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::fixed_order_ts: return "fixed-order-ts";
    case Strategy::variable_optimal: return "variable-optimal";
    case Strategy::variable_lambda_rule: return "variable-lambda-rule";
    case Strategy::tdma: return "tdma";
    case Strategy::power_fixed: return "power-fixed";
    case Strategy::power_variable: return "power-variable";
  }
  return "unknown";
}

inline Strategy strategy_from_string(const std::string& name) {
  if (name == "fixed-order-ts") return Strategy::fixed_order_ts;
  if (name == "variable-optimal") return Strategy::variable_optimal;
  if (name == "variable-lambda-rule") return Strategy::variable_lambda_rule;
  if (name == "tdma") return Strategy::tdma;
  if (name == "power-fixed") return Strategy::power_fixed;
  if (name == "power-variable") return Strategy::power_variable;
  throw usage_error("unknown strategy: " + name);
}

struct TracePoint {
  std::vector<double> lambda;
  std::vector<double> capacity;
  double weighted_sum = 0.0;
  double error = 0.0;  // combined integration error of the weighted sum
  bool converged = true;
  std::map<std::string, double> meta;
};

struct RegionTrace {
  Strategy strategy = Strategy::fixed_order_ts;
  std::vector<TracePoint> points;
};

// Uniform weight grid on the two-user simplex, lambda1 from 0 to 1.
inline std::vector<std::vector<double>> simplex_grid_two_user(int count) {
  if (count < 2) throw usage_error("simplex_grid_two_user: count must be >= 2");
  std::vector<std::vector<double>> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double l = static_cast<double>(i) / (count - 1);
    grid.push_back({l, 1.0 - l});
  }
  return grid;
}

namespace detail {

inline TracePoint make_point(std::span<const double> lambda,
                             const std::vector<CapacityEstimate>& caps) {
  TracePoint p;
  p.lambda.assign(lambda.begin(), lambda.end());
  p.capacity.resize(caps.size());
  for (std::size_t j = 0; j < caps.size(); ++j) {
    p.capacity[j] = caps[j].value;
    p.weighted_sum += lambda[j] * caps[j].value;
    p.error += lambda[j] * caps[j].error;
  }
  return p;
}

// best fixed decoding order with time sharing at the given weights
inline TracePoint trace_fixed_order_ts(const SystemConfig& cfg,
                                       const FadingModel& model,
                                       std::span<const double> lambda,
                                       const IntegrationSpec& spec) {
  if (cfg.num_users() != 2)
    throw usage_error("trace: fixed-order-ts tracing is two-user only");
  auto objective = [&](double t) {
    const auto caps =
        fixed_order_capacities(cfg, model, TimeSharing::two_user(t), spec);
    return lambda[0] * caps[0].value + lambda[1] * caps[1].value;
  };
  // golden section, guarded by a coarse grid in case of non-unimodality
  double t_best = golden_max(objective, 0.0, 1.0, 1e-6);
  double f_best = objective(t_best);
  double coarse_best = 0.0, coarse_f = objective(0.0);
  for (int i = 1; i <= 10; ++i) {
    const double t = i / 10.0;
    const double f = objective(t);
    if (f > coarse_f) {
      coarse_f = f;
      coarse_best = t;
    }
  }
  if (coarse_f > f_best + 1e-9) {
    // fall back to a fine grid and refine locally
    double fine_best = coarse_best, fine_f = coarse_f;
    for (int i = 0; i <= 100; ++i) {
      const double t = i / 100.0;
      const double f = objective(t);
      if (f > fine_f) {
        fine_f = f;
        fine_best = t;
      }
    }
    const double lo = std::max(0.0, fine_best - 0.01);
    const double hi = std::min(1.0, fine_best + 0.01);
    t_best = golden_max(objective, lo, hi, 1e-6);
    f_best = objective(t_best);
    if (fine_f > f_best) t_best = fine_best;
  }
  const auto caps =
      fixed_order_capacities(cfg, model, TimeSharing::two_user(t_best), spec);
  TracePoint p = make_point(lambda, caps);
  p.meta["tau"] = t_best;
  return p;
}

inline TracePoint trace_variable_optimal(const SystemConfig& cfg,
                                         const FadingModel& model,
                                         std::span<const double> lambda,
                                         const IntegrationSpec& spec) {
  if (cfg.num_users() != 2)
    throw usage_error("trace: variable-optimal is two-user only");
  const double l0 = lambda[0];
  if (l0 <= 0.0 || l0 >= 1.0) {
    // endpoint: decode the weighted user last in every state
    const DecodingOrder order = l0 >= 1.0 ? DecodingOrder::of({1, 0})
                                          : DecodingOrder::of({0, 1});
    const auto caps = variable_order_capacities(
        cfg, model, DecodingPartition::fixed(order), spec);
    return make_point(lambda, caps);
  }
  const KSolution sol = optimal_partition_two_user(cfg, model, l0, spec);
  const auto caps = variable_order_capacities(
      cfg, model, DecodingPartition::k_rule(sol.k, cfg), spec);
  TracePoint p = make_point(lambda, caps);
  p.meta["K"] = sol.k;
  p.meta["K_residual"] = sol.residual;
  p.meta["K_iterations"] = sol.iterations;
  return p;
}

inline TracePoint trace_lambda_rule(const SystemConfig& cfg,
                                    const FadingModel& model,
                                    std::span<const double> lambda,
                                    const IntegrationSpec& spec) {
  const DecodingPartition part = DecodingPartition::lambda_rule(
      std::vector<double>(lambda.begin(), lambda.end()));
  return make_point(lambda, variable_order_capacities(cfg, model, part, spec));
}

inline TracePoint trace_tdma(const SystemConfig& cfg, const FadingModel& model,
                             std::span<const double> lambda,
                             const IntegrationSpec& spec) {
  const TdmaAllocation alloc = tdma_optimize(cfg, model, lambda, spec);
  TracePoint p = make_point(lambda, alloc.capacity);
  for (std::size_t j = 0; j < alloc.delta.size(); ++j)
    p.meta["delta" + std::to_string(j + 1)] = alloc.delta[j];
  p.meta["kappa"] = alloc.kappa;
  return p;
}

inline TracePoint trace_power_fixed(const SystemConfig& cfg,
                                    const FadingModel& model,
                                    std::span<const double> lambda,
                                    const IntegrationSpec& spec) {
  const int m = cfg.num_users();
  // candidate orders: ascending weight (heaviest decoded last); for two
  // users also try the reverse and keep the better weighted sum
  DecodingOrder asc = DecodingOrder::identity(m);
  std::stable_sort(asc.pi.begin(), asc.pi.end(), [&](int a, int b) {
    return lambda[static_cast<std::size_t>(a)] < lambda[static_cast<std::size_t>(b)];
  });
  std::vector<DecodingOrder> candidates{asc};
  if (m == 2) {
    DecodingOrder rev = asc;
    std::reverse(rev.pi.begin(), rev.pi.end());
    candidates.push_back(rev);
  }
  TracePoint best;
  bool first = true;
  for (const auto& order : candidates) {
    const FixedOrderPolicy pol = fixed_order_policy(cfg, model, order, spec);
    const auto caps = policy_capacities(cfg, model, pol, spec);
    TracePoint p = make_point(lambda, caps);
    for (int j = 0; j < m; ++j)
      p.meta["alpha" + std::to_string(j + 1)] =
          pol.alpha[static_cast<std::size_t>(j)];
    p.meta["order_first"] = order.pi[0];
    if (first || p.weighted_sum > best.weighted_sum) {
      best = std::move(p);
      first = false;
    }
  }
  return best;
}

inline TracePoint trace_power_variable(const SystemConfig& cfg,
                                       const FadingModel& model,
                                       std::span<const double> lambda,
                                       const IntegrationSpec& spec) {
  if (cfg.num_users() != 2)
    throw usage_error("trace: power-variable is two-user only");
  TracePoint p;
  p.lambda.assign(lambda.begin(), lambda.end());
  if (lambda[0] <= 0.0 || lambda[1] <= 0.0)
    return trace_power_fixed(cfg, model, lambda, spec);
  const DecodingPartition part = DecodingPartition::lambda_rule(
      std::vector<double>(lambda.begin(), lambda.end()));
  const VariableOrderResult res =
      variable_order_policy(cfg, model, part, lambda, spec);
  if (!res.policy) {
    p.converged = false;
    p.capacity.assign(2, 0.0);
    p.meta["outer_iterations"] = res.report.outer_iterations;
    return p;
  }
  const auto caps = policy_capacities(cfg, model, *res.policy, spec);
  p = make_point(lambda, caps);
  p.meta["kappa1"] = res.report.params.kappa0;
  p.meta["kappa2"] = res.report.params.kappa1;
  p.meta["phi1"] = res.report.params.phi0;
  p.meta["phi2"] = res.report.params.phi1;
  p.meta["kkt_residual"] = res.report.max_residual;
  return p;
}

}  // namespace detail

// Traces the boundary of a strategy's throughput region over a grid of
// weight vectors. Inner-solver failures are recorded on the affected point
// and the trace is still returned.
inline RegionTrace trace(const SystemConfig& cfg, const FadingModel& model,
                         Strategy strategy,
                         const std::vector<std::vector<double>>& lambda_grid,
                         const IntegrationSpec& spec) {
  cfg.validate();
  RegionTrace tr;
  tr.strategy = strategy;
  for (const auto& lambda : lambda_grid) {
    if (static_cast<int>(lambda.size()) != cfg.num_users())
      throw usage_error("trace: weight dimension mismatch");
    double sum = 0.0;
    for (double l : lambda) sum += l;
    if (std::abs(sum - 1.0) > 1e-9)
      throw usage_error("trace: weights must lie on the simplex");
    TracePoint p;
    try {
      switch (strategy) {
        case Strategy::fixed_order_ts:
          p = detail::trace_fixed_order_ts(cfg, model, lambda, spec);
          break;
        case Strategy::variable_optimal:
          p = detail::trace_variable_optimal(cfg, model, lambda, spec);
          break;
        case Strategy::variable_lambda_rule:
          p = detail::trace_lambda_rule(cfg, model, lambda, spec);
          break;
        case Strategy::tdma:
          p = detail::trace_tdma(cfg, model, lambda, spec);
          break;
        case Strategy::power_fixed:
          p = detail::trace_power_fixed(cfg, model, lambda, spec);
          break;
        case Strategy::power_variable:
          p = detail::trace_power_variable(cfg, model, lambda, spec);
          break;
      }
    } catch (const convergence_error&) {
      p.lambda = lambda;
      p.capacity.assign(static_cast<std::size_t>(cfg.num_users()), 0.0);
      p.converged = false;
    }
    tr.points.push_back(std::move(p));
  }
  return tr;
}

struct ConvexityReport {
  bool convex = true;
  double max_deviation = 0.0;
  int worst_index = -1;
};

namespace detail {

inline double cross(const std::array<double, 2>& o,
                    const std::array<double, 2>& a,
                    const std::array<double, 2>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

inline double point_segment_distance(const std::array<double, 2>& p,
                                     const std::array<double, 2>& a,
                                     const std::array<double, 2>& b) {
  const double vx = b[0] - a[0], vy = b[1] - a[1];
  const double wx = p[0] - a[0], wy = p[1] - a[1];
  const double vv = vx * vx + vy * vy;
  const double t = vv > 0.0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
  const double dx = wx - t * vx, dy = wy - t * vy;
  return std::hypot(dx, dy);
}

}  // namespace detail

// Checks that every traced point lies on (within tol of) the convex hull of
// the traced point set. A dent deeper than tol flags nonconvexity.
inline ConvexityReport convexity_check(const RegionTrace& trace,
                                       double tol = 1e-3) {
  ConvexityReport report;
  std::vector<std::array<double, 2>> pts;
  for (const auto& p : trace.points) {
    if (!p.converged) continue;
    if (p.capacity.size() != 2)
      throw usage_error("convexity_check: two-user traces only");
    pts.push_back({p.capacity[0], p.capacity[1]});
  }
  const std::size_t n = pts.size();
  if (n < 3) return report;
  // Andrew monotone chain on the full point set
  std::vector<std::array<double, 2>> sorted = pts;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::array<double, 2>> hull(2 * sorted.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    while (k >= 2 &&
           detail::cross(hull[k - 2], hull[k - 1], sorted[i]) <= 0.0)
      --k;
    hull[k++] = sorted[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = sorted.size() - 1; i-- > 0;) {
    while (k >= lower &&
           detail::cross(hull[k - 2], hull[k - 1], sorted[i]) <= 0.0)
      --k;
    hull[k++] = sorted[i];
  }
  hull.resize(k > 1 ? k - 1 : k);
  for (std::size_t i = 0; i < n; ++i) {
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < hull.size(); ++h) {
      const auto& a = hull[h];
      const auto& b = hull[(h + 1) % hull.size()];
      dist = std::min(dist, detail::point_segment_distance(pts[i], a, b));
    }
    if (dist > report.max_deviation) {
      report.max_deviation = dist;
      report.worst_index = static_cast<int>(i);
    }
  }
  report.convex = report.max_deviation <= tol;
  return report;
}

struct ContainmentReport {
  bool contained = true;
  double max_violation = -std::numeric_limits<double>::infinity();
  std::vector<double> worst_lambda;
  double max_gap = 0.0;               // largest wsum_outer - wsum_inner
  std::vector<double> largest_gap_lambda;
};

// Supporting-hyperplane containment: for each common weight vector, the
// inner trace's weighted sum must not exceed the outer's beyond three
// combined integration errors.
inline ContainmentReport containment_check(const RegionTrace& inner,
                                           const RegionTrace& outer) {
  ContainmentReport report;
  for (const auto& pi : inner.points) {
    if (!pi.converged) continue;
    for (const auto& po : outer.points) {
      if (!po.converged) continue;
      double diff = 0.0;
      for (std::size_t j = 0; j < pi.lambda.size(); ++j)
        diff = std::max(diff, std::abs(pi.lambda[j] - po.lambda[j]));
      if (diff > 1e-9) continue;
      const double slack = 3.0 * (pi.error + po.error);
      const double violation = pi.weighted_sum - po.weighted_sum - slack;
      if (violation > report.max_violation) {
        report.max_violation = violation;
        report.worst_lambda = pi.lambda;
      }
      const double gap = po.weighted_sum - pi.weighted_sum;
      if (gap > report.max_gap) {
        report.max_gap = gap;
        report.largest_gap_lambda = pi.lambda;
      }
      break;
    }
  }
  report.contained = report.max_violation <= 0.0;
  return report;
}

}  // namespace ecmac

#endif
