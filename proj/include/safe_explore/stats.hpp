#pragma once

#include <cstddef>
#include <span>

namespace safe_explore {

/// H_n = 1 + 1/2 + ... + 1/n; H_0 = 0.
double harmonic_number(std::size_t n);

struct SummaryStat {
  double mean = 0.0;
  double std_error = 0.0;  // sample sd (n-1 denominator) / sqrt(n)
  double variance = 0.0; // sample variance, n-1 denominator
  std::size_t n = 0;
  bool degenerate = false;  // n == 1: spread undefined, reported as 0
};

/// Mean and standard error of a nonempty sample. Throws ParameterError on empty input.
SummaryStat aggregate(std::span<const double> values);

}  // namespace safe_explore
