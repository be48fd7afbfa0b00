#ifndef ECMAC_EFFECTIVE_CAPACITY_HPP
#define ECMAC_EFFECTIVE_CAPACITY_HPP

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ecmac/channel.hpp"
#include "ecmac/errors.hpp"
#include "ecmac/integrate.hpp"

namespace ecmac {

struct UserConfig {
  double snr = 1.0;    // average transmit SNR, linear
  double theta = 0.01; // QoS exponent, 1/bit
};

// Per-user SNR and QoS exponents plus the time-bandwidth product of a
// frame. theta, T and B enter every rate expression only through the
// normalized exponent beta = theta*T*B/ln 2 and the per-Hz scaling, so the
// product is the only frame parameter exposed.
struct SystemConfig {
  std::vector<UserConfig> users;
  double tb_product = 200.0;

  int num_users() const { return static_cast<int>(users.size()); }

  double beta(int user) const {
    return users[user].theta * tb_product / std::numbers::ln2;
  }

  void validate() const {
    if (users.empty()) throw usage_error("SystemConfig: no users");
    if (!(tb_product > 0.0))
      throw usage_error("SystemConfig: tb_product must be > 0");
    for (const auto& u : users) {
      if (!(u.snr > 0.0)) throw usage_error("SystemConfig: snr must be > 0");
      if (!(u.theta > 0.0))
        throw usage_error("SystemConfig: theta must be > 0");
    }
  }

  static double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
  static double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

  static SystemConfig symmetric(int users, double snr, double theta,
                                double tb) {
    SystemConfig cfg;
    cfg.users.assign(static_cast<std::size_t>(users), UserConfig{snr, theta});
    cfg.tb_product = tb;
    return cfg;
  }
};

// Successive decoding order: pi[k] is the user decoded at stage k, so the
// user at the last stage sees no interference.
struct DecodingOrder {
  std::vector<int> pi;

  static DecodingOrder identity(int m) {
    DecodingOrder o;
    o.pi.resize(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) o.pi[static_cast<std::size_t>(k)] = k;
    return o;
  }

  static DecodingOrder of(std::initializer_list<int> users) {
    DecodingOrder o;
    o.pi.assign(users);
    return o;
  }

  int size() const { return static_cast<int>(pi.size()); }

  // position of each user in the decoding sequence
  std::vector<int> inverse() const {
    std::vector<int> inv(pi.size());
    for (std::size_t k = 0; k < pi.size(); ++k)
      inv[static_cast<std::size_t>(pi[k])] = static_cast<int>(k);
    return inv;
  }

  void validate() const {
    std::vector<bool> seen(pi.size(), false);
    for (int u : pi) {
      if (u < 0 || u >= size() || seen[static_cast<std::size_t>(u)])
        throw usage_error("DecodingOrder: not a permutation");
      seen[static_cast<std::size_t>(u)] = true;
    }
  }

  bool operator==(const DecodingOrder& other) const = default;
};

struct RatePoint {
  std::vector<double> r;  // bits/s/Hz per user
};

// Per-user service rates under superposition coding with successive
// decoding: the user at stage k is decoded against the not-yet-decoded
// users' signals, r = log2(1 + SNR z / (1 + sum of later SNR z)).
inline void instant_rates_into(const SystemConfig& cfg,
                               const DecodingOrder& order,
                               std::span<const double> z,
                               std::span<double> out) {
  const int m = cfg.num_users();
  double interference = 0.0;
  for (int k = m - 1; k >= 0; --k) {
    const int u = order.pi[static_cast<std::size_t>(k)];
    const double s = cfg.users[static_cast<std::size_t>(u)].snr *
                     z[static_cast<std::size_t>(u)];
    out[static_cast<std::size_t>(u)] = std::log2(1.0 + s / (1.0 + interference));
    interference += s;
  }
}

inline RatePoint instant_rates(const SystemConfig& cfg,
                               const DecodingOrder& order,
                               std::span<const double> z) {
  if (static_cast<int>(z.size()) != cfg.num_users() ||
      order.size() != cfg.num_users())
    throw usage_error("instant_rates: dimension mismatch");
  RatePoint rp;
  rp.r.resize(z.size());
  instant_rates_into(cfg, order, z, rp.r);
  return rp;
}

// Orthogonal time sharing: user occupies the whole band for a fraction
// delta of the frame; rate is normalized per frame and per Hz of the full
// band, hence the delta prefactor. delta = 0 returns the continuity limit 0.
inline double tdma_instant_rate(const SystemConfig& cfg, int user,
                                double delta, std::span<const double> z) {
  if (user < 0 || user >= cfg.num_users())
    throw usage_error("tdma_instant_rate: bad user index");
  if (delta < 0.0 || delta > 1.0)
    throw usage_error("tdma_instant_rate: delta outside [0, 1]");
  if (delta == 0.0) return 0.0;
  const double u = cfg.users[static_cast<std::size_t>(user)].snr *
                   z[static_cast<std::size_t>(user)] / delta;
  return delta * std::log2(1.0 + u);
}

struct CapacityEstimate {
  double value = 0.0;
  double error = 0.0;
  bool underflow = false;
};

// Effective capacity of a service-rate function r(z) in bits/s/Hz:
//   C = -(1/(beta ln2)) ln E{ 2^(-beta r(z)) },   beta = theta*T*B/ln2.
// The log-expectation runs in log space, so large beta cannot underflow;
// a fully degenerate expectation is reported as capacity 0 with the flag.
template <class RateFn>
CapacityEstimate effective_capacity(const SystemConfig& cfg,
                                    const FadingModel& model, int user,
                                    RateFn&& rate,
                                    const IntegrationSpec& spec) {
  if (user < 0 || user >= cfg.num_users())
    throw usage_error("effective_capacity: bad user index");
  const double b_ln2 = cfg.beta(user) * std::numbers::ln2;
  auto g = [&](std::span<const double> z) { return -b_ln2 * rate(z); };
  const Estimate le = log_expect_exp(model, g, spec);
  if (le.value == -std::numeric_limits<double>::infinity())
    return {0.0, 0.0, true};
  return {-le.value / b_ln2, le.error / b_ln2, false};
}

}  // namespace ecmac

#endif
