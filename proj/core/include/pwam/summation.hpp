#pragma once

#include <cmath>

namespace pwam {

// Neumaier-compensated accumulator. Totals built with it are reproducible to
// the bit for a fixed order of add() calls, and the rounding error stays
// bounded independently of the term count.
struct CompensatedSum {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double value) noexcept {
    const double t = sum + value;
    if (std::abs(sum) >= std::abs(value)) {
      compensation += (sum - t) + value;
    } else {
      compensation += (value - t) + sum;
    }
    sum = t;
  }

  // Folds another accumulator in as a single term (its rounded value).
  void merge(const CompensatedSum& other) noexcept { add(other.value()); }

  double value() const noexcept { return sum + compensation; }
};

}  // namespace pwam
