#ifndef ECMAC_ERRORS_HPP
#define ECMAC_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace ecmac {

// Caller passed inconsistent arguments or an invalid configuration.
struct usage_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numerical evaluation produced a non-finite value; what() names the
// offending state.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative solver exhausted its iteration budget.
struct convergence_error : std::runtime_error {
  std::vector<double> residual_history;
  convergence_error(const std::string& msg, std::vector<double> history = {})
      : std::runtime_error(msg), residual_history(std::move(history)) {}
};

// Queue arrival rate at or above the mean service rate.
struct instability_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tail estimation asked for a threshold with too few exceedances.
struct insufficient_data_error : std::runtime_error {
  double largest_usable_q;
  insufficient_data_error(const std::string& msg, double usable_q)
      : std::runtime_error(msg), largest_usable_q(usable_q) {}
};

}  // namespace ecmac

#endif
