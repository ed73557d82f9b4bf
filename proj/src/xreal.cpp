#include "safe_explore/xreal.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

#include "safe_explore/error.hpp"

namespace safe_explore {

double XReal::value() const {
  if (neg_inf_) throw std::logic_error("XReal::value on -inf");
  return value_;
}

XReal operator*(double k, XReal x) {
  if (k < 0.0) throw ParameterError("XReal scaling factor must be nonnegative");
  if (x.neg_inf_) return k == 0.0 ? XReal(0.0) : XReal::neg_inf();
  return XReal(k * x.value_);
}

XReal max_of(std::span<const XReal> xs) {
  XReal best = XReal::neg_inf();
  for (XReal x : xs) best = max(best, x);
  return best;
}

std::string XReal::to_string() const {
  if (neg_inf_) return "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value_);
  return std::string(buf, res.ptr);
}

XReal XReal::parse(const std::string& text) {
  if (text == "-inf") return neg_inf();
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw FormatError("not an extended real: '" + text + "'");
  return XReal(v);
}

std::ostream& operator<<(std::ostream& os, XReal x) { return os << x.to_string(); }

}  // namespace safe_explore
