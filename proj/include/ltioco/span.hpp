#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace ltioco {

// Interval of non-negative delays. An absent upper end means unbounded.
struct Span {
  std::int64_t lo = 0;
  bool lo_strict = false;
  std::optional<std::int64_t> up;
  bool up_strict = false;

  static Span closed(std::int64_t lo, std::int64_t up) { return {lo, false, up, false}; }
  static Span from(std::int64_t lo, bool lo_strict = false) { return {lo, lo_strict, std::nullopt, false}; }
  static Span all() { return from(0); }
  static Span point(std::int64_t v) { return closed(v, v); }

  bool unbounded() const { return !up.has_value(); }

  bool empty() const {
    if (!up) return false;
    if (lo > *up) return true;
    return lo == *up && (lo_strict || up_strict);
  }

  // Membership for a rational point num/den.
  bool contains(std::int64_t num, std::int64_t den = 1) const {
    std::int64_t l = lo * den;
    if (num < l || (lo_strict && num == l)) return false;
    if (!up) return true;
    std::int64_t u = *up * den;
    return num < u || (!up_strict && num == u);
  }

  auto operator<=>(const Span& o) const {
    if (auto c = lo <=> o.lo; c != 0) return c;
    if (auto c = lo_strict <=> o.lo_strict; c != 0) return c;
    if (up.has_value() != o.up.has_value()) {
      return up.has_value() ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (up) {
      if (auto c = *up <=> *o.up; c != 0) return c;
    }
    // (.., u) before (.., u]
    return o.up_strict <=> up_strict;
  }
  bool operator==(const Span& o) const = default;

  // "[lo,up]", "[lo,up)", "(lo,up]", "(lo,up)"; unbounded spans are written
  // "(lo,inf)" when lo is included and "(>lo,inf)" when it is not.
  std::string to_string() const {
    if (!up) {
      return std::string(lo_strict ? "(>" : "(") + std::to_string(lo) + ",inf)";
    }
    std::string s = lo_strict ? "(" : "[";
    s += std::to_string(lo) + "," + std::to_string(*up);
    s += up_strict ? ")" : "]";
    return s;
  }
};

// a is contained in b
inline bool span_leq(const Span& a, const Span& b) {
  if (a.lo < b.lo) return false;
  if (a.lo == b.lo && !a.lo_strict && b.lo_strict) return false;
  if (!b.up) return true;
  if (!a.up) return false;
  if (*a.up > *b.up) return false;
  if (*a.up == *b.up && !a.up_strict && b.up_strict) return false;
  return true;
}

// True when the union of a and b is a single interval.
inline bool spans_connect(const Span& a, const Span& b) {
  const Span& first = (a.lo < b.lo || (a.lo == b.lo && !a.lo_strict)) ? a : b;
  const Span& second = (&first == &a) ? b : a;
  if (!first.up) return true;
  if (second.lo < *first.up) return true;
  if (second.lo > *first.up) return false;
  return !(first.up_strict && second.lo_strict);
}

inline Span span_hull(const Span& a, const Span& b) {
  Span r;
  if (a.lo < b.lo) {
    r.lo = a.lo;
    r.lo_strict = a.lo_strict;
  } else if (b.lo < a.lo) {
    r.lo = b.lo;
    r.lo_strict = b.lo_strict;
  } else {
    r.lo = a.lo;
    r.lo_strict = a.lo_strict && b.lo_strict;
  }
  if (!a.up || !b.up) {
    r.up.reset();
    r.up_strict = false;
  } else if (*a.up > *b.up) {
    r.up = a.up;
    r.up_strict = a.up_strict;
  } else if (*b.up > *a.up) {
    r.up = b.up;
    r.up_strict = b.up_strict;
  } else {
    r.up = a.up;
    r.up_strict = a.up_strict && b.up_strict;
  }
  return r;
}

}  // namespace ltioco
