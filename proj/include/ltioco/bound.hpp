#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace ltioco {

// Upper bound on a clock difference: (value, <), (value, <=) or infinity.
// Encoded as 2*value + (strict ? 0 : 1) so that the integer order is the
// bound order and (m,<) sits just below (m,<=).
class Bound {
 public:
  constexpr Bound() = default;

  static constexpr Bound finite(std::int64_t value, bool strict) {
    return Bound(value * 2 + (strict ? 0 : 1));
  }
  static constexpr Bound le(std::int64_t value) { return finite(value, false); }
  static constexpr Bound lt(std::int64_t value) { return finite(value, true); }
  static constexpr Bound infinity() { return Bound(kInfRaw); }
  static constexpr Bound zero() { return le(0); }

  constexpr bool is_infinite() const { return raw_ == kInfRaw; }
  constexpr bool is_strict() const { return !is_infinite() && (raw_ & 1) == 0; }
  constexpr std::int64_t value() const { return raw_ >> 1; }
  constexpr std::int64_t raw() const { return raw_; }

  constexpr auto operator<=>(const Bound&) const = default;

  friend constexpr Bound operator+(Bound a, Bound b) {
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return Bound(((a.value() + b.value()) << 1) | (a.raw_ & b.raw_ & 1));
  }

  // "(r, <=)", "(r, <)" or "inf"
  std::string to_string() const {
    if (is_infinite()) return "inf";
    return "(" + std::to_string(value()) + (is_strict() ? ", <)" : ", <=)");
  }

 private:
  static constexpr std::int64_t kInfRaw = std::numeric_limits<std::int64_t>::max();
  constexpr explicit Bound(std::int64_t raw) : raw_(raw) {}
  std::int64_t raw_ = 1;
};

inline constexpr Bound min(Bound a, Bound b) { return a < b ? a : b; }

}  // namespace ltioco
