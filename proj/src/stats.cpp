#include "safe_explore/stats.hpp"

#include <cmath>

#include "safe_explore/error.hpp"

namespace safe_explore {

double harmonic_number(std::size_t n) {
  double h = 0.0;
  for (std::size_t k = n; k >= 1; --k) h += 1.0 / static_cast<double>(k);
  return h;
}

SummaryStat aggregate(std::span<const double> values) {
  if (values.empty()) throw ParameterError("aggregate of an empty sample");
  SummaryStat s;
  s.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n == 1) {
    s.degenerate = true;
    return s;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.variance = ss / static_cast<double>(s.n - 1);
  s.std_error = std::sqrt(s.variance / static_cast<double>(s.n));
  return s;
}

}  // namespace safe_explore
