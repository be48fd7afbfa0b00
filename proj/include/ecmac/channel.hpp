#ifndef ECMAC_CHANNEL_HPP
#define ECMAC_CHANNEL_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ecmac/errors.hpp"

namespace ecmac {

// Vector of per-user fading power gains z_j = |h_j|^2.
using ChannelState = std::vector<double>;

// splitmix64: tiny counter-style generator, identical output on every
// platform. Batches are independent streams keyed by (seed, batch).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(seed ^ (stream * 0x9e3779b97f4a7c15ULL + 0xbf58476d1ce4e5b9ULL)) {
    // burn a few outputs so nearby seeds decorrelate
    next_u64();
    next_u64();
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform on [0, 1)
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // standard normal via Box–Muller (one value per call, cached pair)
  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// Independent exponential power gains, one marginal per user. The default
// unit mean corresponds to Rayleigh fading of the amplitude.
struct FadingModel {
  std::vector<double> mean;

  static FadingModel rayleigh(int users, double mean_gain = 1.0) {
    if (users < 1) throw usage_error("FadingModel: need at least one user");
    if (!(mean_gain > 0.0)) throw usage_error("FadingModel: mean must be > 0");
    FadingModel m;
    m.mean.assign(static_cast<std::size_t>(users), mean_gain);
    return m;
  }

  int num_users() const { return static_cast<int>(mean.size()); }

  // joint density: product of the exponential marginals
  double pdf(std::span<const double> z) const {
    if (z.size() != mean.size())
      throw usage_error("FadingModel::pdf: state dimension " +
                        std::to_string(z.size()) + " != user count " +
                        std::to_string(mean.size()));
    double p = 1.0;
    for (std::size_t j = 0; j < mean.size(); ++j) {
      if (z[j] < 0.0) return 0.0;
      p *= std::exp(-z[j] / mean[j]) / mean[j];
    }
    return p;
  }

  double marginal_cdf(int user, double z) const {
    if (user < 0 || user >= num_users())
      throw usage_error("FadingModel::marginal_cdf: bad user index");
    return z <= 0.0 ? 0.0 : 1.0 - std::exp(-z / mean[user]);
  }

  // z = -mean * log(1 - u) by inverse CDF; deterministic given (seed, batch).
  void sample_into(std::span<double> z, SplitMix64& rng) const {
    for (std::size_t j = 0; j < mean.size(); ++j)
      z[j] = -mean[j] * std::log1p(-rng.next_double());
  }

  std::vector<ChannelState> sample(std::int64_t count, std::uint64_t seed,
                                   std::uint64_t batch = 0) const {
    if (count < 1) throw usage_error("FadingModel::sample: count must be >= 1");
    SplitMix64 rng(seed, batch);
    std::vector<ChannelState> out(static_cast<std::size_t>(count),
                                  ChannelState(mean.size()));
    for (auto& state : out) sample_into(state, rng);
    return out;
  }
};

}  // namespace ecmac

#endif
