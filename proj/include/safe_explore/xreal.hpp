#pragma once

#include <compare>
#include <iosfwd>
#include <span>
#include <string>

namespace safe_explore {

/**
 * Extended real: a finite double or the distinguished element -inf.
 *
 * -inf is a tag, never a floating-point infinity, so equality and
 * serialization are exact. Addition absorbs into -inf; max returns the
 * finite operand whenever one exists.
 */
class XReal {
 public:
  constexpr XReal() = default;
  constexpr XReal(double v) : value_(v) {}  // NOLINT: implicit from finite reals

  static constexpr XReal neg_inf() {
    XReal x;
    x.neg_inf_ = true;
    return x;
  }

  constexpr bool is_neg_inf() const { return neg_inf_; }
  constexpr bool is_finite() const { return !neg_inf_; }

  /// Finite payload. Throws std::logic_error on -inf.
  double value() const;

  friend constexpr XReal operator+(XReal a, XReal b) {
    if (a.neg_inf_ || b.neg_inf_) return neg_inf();
    return XReal(a.value_ + b.value_);
  }
  XReal& operator+=(XReal o) { return *this = *this + o; }

  /// Scaling by a nonnegative factor. 0 * -inf is 0 (integration convention).
  friend XReal operator*(double k, XReal x);

  friend constexpr bool operator==(XReal a, XReal b) {
    if (a.neg_inf_ || b.neg_inf_) return a.neg_inf_ == b.neg_inf_;
    return a.value_ == b.value_;
  }
  friend constexpr std::partial_ordering operator<=>(XReal a, XReal b) {
    if (a.neg_inf_ && b.neg_inf_) return std::partial_ordering::equivalent;
    if (a.neg_inf_) return std::partial_ordering::less;
    if (b.neg_inf_) return std::partial_ordering::greater;
    return a.value_ <=> b.value_;
  }

  std::string to_string() const;
  /// Inverse of to_string: "-inf" or a decimal number.
  static XReal parse(const std::string& text);

 private:
  double value_ = 0.0;
  bool neg_inf_ = false;
};

constexpr XReal max(XReal a, XReal b) { return (a < b) ? b : a; }

/// Max over a nonempty range; -inf for an empty one.
XReal max_of(std::span<const XReal> xs);

/// Hard barrier index log(1 - d) for a damage bit: 0 or -inf.
constexpr XReal barrier_index(int damage) { return damage ? XReal::neg_inf() : XReal(0.0); }

std::ostream& operator<<(std::ostream& os, XReal x);

}  // namespace safe_explore
