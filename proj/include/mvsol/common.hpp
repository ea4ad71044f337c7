#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mvsol {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Raised when user-supplied data (config files, flux tables, initial data)
/// violates a documented precondition. The CLI maps it to exit code 2.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

// Compensated (Kahan) accumulator for the mass-balance bookkeeping.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

inline bool nearly_equal(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace detail
}  // namespace mvsol
