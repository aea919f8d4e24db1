#pragma once

#include <algorithm>
#include <cassert>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ltioco/bound.hpp"
#include "ltioco/error.hpp"
#include "ltioco/span.hpp"

namespace ltioco {

// Clock valuation with a common denominator: clock i has value ticks[i]/den.
// ticks excludes the reference clock.
struct Valuation {
  std::vector<std::int64_t> ticks;
  std::int64_t den = 1;
};

// Difference bound matrix over dim-1 clocks plus the reference clock 0.
// Entry (i,j) bounds x_i - x_j. Operations other than tighten() expect and
// preserve canonical form; an empty DBM is tagged and compares equal to every
// other empty DBM of the same dimension.
class Dbm {
 public:
  Dbm() = default;

  // All clocks non-negative, no other constraint. Canonical.
  static Dbm universal(std::size_t dim) {
    Dbm d(dim, Bound::infinity());
    for (std::size_t i = 0; i < dim; ++i) {
      d.set(i, i, Bound::zero());
      d.set(0, i, Bound::zero());
    }
    return d;
  }

  // All clocks equal to zero.
  static Dbm zero(std::size_t dim) { return Dbm(dim, Bound::zero()); }

  std::size_t dim() const { return dim_; }
  bool empty() const { return empty_; }
  Bound at(std::size_t i, std::size_t j) const { return m_[i * dim_ + j]; }

  // Raw tightening without closure.
  void tighten(std::size_t i, std::size_t j, Bound b) {
    if (b < at(i, j)) set(i, j, b);
  }

  // Floyd-Warshall shortest paths; marks the DBM empty on a negative cycle.
  bool close() {
    if (empty_) return false;
    for (std::size_t k = 0; k < dim_; ++k) {
      for (std::size_t i = 0; i < dim_; ++i) {
        Bound ik = at(i, k);
        if (ik.is_infinite()) continue;
        for (std::size_t j = 0; j < dim_; ++j) {
          Bound via = ik + at(k, j);
          if (via < at(i, j)) set(i, j, via);
        }
      }
      for (std::size_t i = 0; i < dim_; ++i) {
        if (at(i, i) < Bound::zero()) {
          make_empty();
          return false;
        }
      }
    }
    return true;
  }

  // Adds x_i - x_j bound b and restores canonical form incrementally.
  bool constrain(std::size_t i, std::size_t j, Bound b) {
    if (empty_) return false;
    if (!(b < at(i, j))) return true;
    if (b + at(j, i) < Bound::zero()) {
      make_empty();
      return false;
    }
    set(i, j, b);
    for (std::size_t k = 0; k < dim_; ++k) {
      Bound ki = at(k, i);
      if (ki.is_infinite()) continue;
      for (std::size_t l = 0; l < dim_; ++l) {
        Bound via = ki + b + at(j, l);
        if (via < at(k, l)) set(k, l, via);
      }
    }
    return true;
  }

  void up() {
    if (empty_) return;
    for (std::size_t i = 1; i < dim_; ++i) set(i, 0, Bound::infinity());
  }

  // Past: every valuation from which some delay leads into the zone.
  void down() {
    if (empty_) return;
    for (std::size_t j = 1; j < dim_; ++j) {
      Bound b = Bound::zero();
      for (std::size_t i = 1; i < dim_; ++i) b = std::min(b, at(i, j));
      set(0, j, b);
    }
  }

  void reset(std::size_t x) {
    if (empty_) return;
    for (std::size_t j = 0; j < dim_; ++j) {
      set(x, j, at(0, j));
      set(j, x, at(j, 0));
    }
    set(x, x, Bound::zero());
  }

  void free(std::size_t x) {
    if (empty_) return;
    for (std::size_t j = 0; j < dim_; ++j) {
      if (j == x) continue;
      set(x, j, Bound::infinity());
      set(j, x, at(j, 0));
    }
  }

  bool intersect(const Dbm& o) {
    assert(o.dim_ == dim_);
    if (empty_) return false;
    if (o.empty_) {
      make_empty();
      return false;
    }
    bool changed = false;
    for (std::size_t k = 0; k < m_.size(); ++k) {
      if (o.m_[k] < m_[k]) {
        m_[k] = o.m_[k];
        changed = true;
      }
    }
    return changed ? close() : true;
  }

  // o is a subset of *this
  bool includes(const Dbm& o) const {
    assert(o.dim_ == dim_);
    if (o.empty_) return true;
    if (empty_) return false;
    for (std::size_t k = 0; k < m_.size(); ++k) {
      if (m_[k] < o.m_[k]) return false;
    }
    return true;
  }

  // Per-clock extrapolation. ceilings[0] is ignored; a negative ceiling means
  // the clock is never abstracted.
  void extrapolate(const std::vector<std::int64_t>& ceilings) {
    if (empty_) return;
    bool changed = false;
    auto ceil = [&](std::size_t c) { return c == 0 ? 0 : ceilings[c]; };
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) {
        if (i == j) continue;
        Bound b = at(i, j);
        if (b.is_infinite()) continue;
        std::int64_t mi = ceil(i), mj = ceil(j);
        if (mi >= 0 && Bound::le(mi) < b) {
          set(i, j, Bound::infinity());
          changed = true;
        } else if (mj >= 0 && b < Bound::lt(-mj)) {
          set(i, j, Bound::lt(-mj));
          changed = true;
        }
      }
    }
    if (changed) close();
  }

  void k_normalize(std::int64_t k) { extrapolate(std::vector<std::int64_t>(dim_, k)); }

  // Adds a fresh clock at index dim() holding value 0.
  Dbm with_zero_clock() const {
    Dbm d(dim_ + 1, Bound::infinity());
    d.empty_ = empty_;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) d.set(i, j, at(i, j));
    for (std::size_t j = 0; j < dim_; ++j) {
      d.set(dim_, j, at(0, j));
      d.set(j, dim_, at(j, 0));
    }
    d.set(dim_, dim_, Bound::zero());
    return d;
  }

  // Projects away the last clock.
  Dbm without_last_clock() const {
    assert(dim_ > 1);
    Dbm d(dim_ - 1, Bound::infinity());
    d.empty_ = empty_;
    for (std::size_t i = 0; i + 1 < dim_; ++i)
      for (std::size_t j = 0; j + 1 < dim_; ++j) d.set(i, j, at(i, j));
    return d;
  }

  // Range of clock x as a span. Expects a non-empty DBM.
  Span span_of(std::size_t x) const {
    Span s;
    Bound lower = at(0, x);
    s.lo = -lower.value();
    s.lo_strict = lower.is_strict();
    Bound upper = at(x, 0);
    if (upper.is_infinite()) {
      s.up.reset();
    } else {
      s.up = upper.value();
      s.up_strict = upper.is_strict();
    }
    return s;
  }

  bool satisfies(const Valuation& v) const {
    if (empty_) return false;
    auto val = [&](std::size_t i) -> std::int64_t { return i == 0 ? 0 : v.ticks[i - 1]; };
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) {
        Bound b = at(i, j);
        if (b.is_infinite()) continue;
        std::int64_t diff = val(i) - val(j);
        std::int64_t lim = b.value() * v.den;
        if (diff > lim || (b.is_strict() && diff == lim)) return false;
      }
    }
    return true;
  }

  bool operator==(const Dbm& o) const {
    if (dim_ != o.dim_ || empty_ != o.empty_) return false;
    return empty_ || m_ == o.m_;
  }

  std::strong_ordering operator<=>(const Dbm& o) const {
    if (auto c = dim_ <=> o.dim_; c != 0) return c;
    if (empty_ != o.empty_) return empty_ ? std::strong_ordering::less : std::strong_ordering::greater;
    if (empty_) return std::strong_ordering::equal;
    for (std::size_t k = 0; k < m_.size(); ++k) {
      if (auto c = m_[k] <=> o.m_[k]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

  std::size_t hash() const {
    std::size_t h = dim_ * 1315423911u + (empty_ ? 7 : 0);
    if (empty_) return h;
    for (Bound b : m_) h ^= std::hash<std::int64_t>{}(b.raw()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

 private:
  Dbm(std::size_t dim, Bound fill) : dim_(dim), m_(dim * dim, fill) {}

  void set(std::size_t i, std::size_t j, Bound b) { m_[i * dim_ + j] = b; }

  void make_empty() {
    empty_ = true;
    std::fill(m_.begin(), m_.end(), Bound::lt(0));
  }

  std::size_t dim_ = 0;
  std::vector<Bound> m_;
  bool empty_ = false;
};

struct DbmHash {
  std::size_t operator()(const Dbm& d) const { return d.hash(); }
};

// ── Zone: DBM with clock names ──────────────────────────────────────────────

using ClockNames = std::shared_ptr<const std::vector<std::string>>;

inline ClockNames make_clock_names(std::vector<std::string> names) {
  return std::make_shared<const std::vector<std::string>>(std::move(names));
}

enum class Cmp { Less, LessEq, Equal, GreaterEq, Greater };

// Atom "clock cmp value" or "clock - other cmp value".
struct ZoneAtom {
  std::string clock;
  std::string other;
  Cmp cmp = Cmp::LessEq;
  std::int64_t value = 0;
};

class Zone {
 public:
  Zone(Dbm dbm, ClockNames clocks) : dbm_(std::move(dbm)), clocks_(std::move(clocks)) {
    assert(dbm_.dim() == clocks_->size() + 1);
  }

  // Builds the raw matrix of a conjunction without closing it.
  static Zone from_constraint(const std::vector<ZoneAtom>& atoms, ClockNames clocks) {
    Dbm d = Dbm::universal(clocks->size() + 1);
    auto index = [&](const std::string& name) -> std::size_t {
      if (name.empty()) return 0;
      auto it = std::find(clocks->begin(), clocks->end(), name);
      if (it == clocks->end()) throw Error(Errc::UnknownClock, "clock '" + name + "' is not declared");
      return static_cast<std::size_t>(it - clocks->begin()) + 1;
    };
    for (const ZoneAtom& a : atoms) {
      std::size_t i = index(a.clock);
      std::size_t j = index(a.other);
      switch (a.cmp) {
        case Cmp::Less: d.tighten(i, j, Bound::lt(a.value)); break;
        case Cmp::LessEq: d.tighten(i, j, Bound::le(a.value)); break;
        case Cmp::Equal:
          d.tighten(i, j, Bound::le(a.value));
          d.tighten(j, i, Bound::le(-a.value));
          break;
        case Cmp::GreaterEq: d.tighten(j, i, Bound::le(-a.value)); break;
        case Cmp::Greater: d.tighten(j, i, Bound::lt(-a.value)); break;
      }
    }
    return Zone(std::move(d), std::move(clocks));
  }

  static Zone origin(ClockNames clocks) {
    std::size_t n = clocks->size() + 1;
    return Zone(Dbm::zero(n), std::move(clocks));
  }

  const Dbm& dbm() const { return dbm_; }
  const ClockNames& clocks() const { return clocks_; }
  bool is_empty() const { return dbm_.empty(); }

  Zone canonicalize() const {
    Zone z = *this;
    z.dbm_.close();
    return z;
  }

  Zone up() const {
    require_nonempty("up");
    Zone z = *this;
    z.dbm_.up();
    return z;
  }

  Zone reset(const std::vector<std::string>& names) const {
    require_nonempty("reset");
    Zone z = *this;
    for (const auto& n : names) z.dbm_.reset(index_of(n));
    return z;
  }

  Zone intersect(const Zone& o) const {
    require_same_clocks(o);
    Zone z = *this;
    z.dbm_.intersect(o.dbm_);
    return z;
  }

  bool includes(const Zone& o) const {
    require_same_clocks(o);
    return dbm_.includes(o.dbm_);
  }

  Zone k_normalize(std::int64_t k) const {
    if (k < 0) throw Error(Errc::InvalidCeiling, "ceiling must be non-negative");
    Zone z = *this;
    z.dbm_.k_normalize(k);
    return z;
  }

  Span span_of_clock(const std::string& name) const {
    require_nonempty("span_of_clock");
    return dbm_.span_of(index_of(name));
  }

  // Greatest per-clock lower end and least per-clock upper end; the result
  // may be an empty interval.
  Span span_of_zone() const {
    require_nonempty("span_of_zone");
    if (clocks_->empty()) return Span::point(0);
    Span s = dbm_.span_of(1);
    for (std::size_t i = 2; i < dbm_.dim(); ++i) {
      Span c = dbm_.span_of(i);
      if (c.lo > s.lo || (c.lo == s.lo && c.lo_strict)) {
        s.lo = c.lo;
        s.lo_strict = c.lo_strict;
      }
      if (c.up && (!s.up || *c.up < *s.up || (*c.up == *s.up && c.up_strict))) {
        s.up = c.up;
        s.up_strict = c.up_strict;
      }
    }
    return s;
  }

  bool member(const Valuation& v) const {
    if (v.ticks.size() != clocks_->size()) throw Error(Errc::ClockMismatch, "valuation arity differs from zone");
    return dbm_.satisfies(v);
  }

  bool operator==(const Zone& o) const { return *clocks_ == *o.clocks_ && dbm_ == o.dbm_; }

  // Matrix table: reference clock 0_C first, then clocks in declared order.
  std::string to_matrix_string() const {
    std::vector<std::string> names{"0_C"};
    for (const auto& c : *clocks_) names.push_back(c);
    std::size_t n = names.size();
    std::vector<std::vector<std::string>> cells(n + 1, std::vector<std::string>(n + 1));
    cells[0][0] = "";
    for (std::size_t i = 0; i < n; ++i) {
      cells[0][i + 1] = names[i];
      cells[i + 1][0] = names[i];
      for (std::size_t j = 0; j < n; ++j) {
        cells[i + 1][j + 1] = dbm_.empty() ? "empty" : dbm_.at(i, j).to_string();
      }
    }
    std::vector<std::size_t> width(n + 1, 0);
    for (const auto& row : cells)
      for (std::size_t c = 0; c <= n; ++c) width[c] = std::max(width[c], row[c].size());
    std::ostringstream os;
    for (const auto& row : cells) {
      std::string line;
      for (std::size_t c = 0; c <= n; ++c) {
        std::string cell = row[c];
        if (c < n) cell.resize(width[c] + 2, ' ');
        line += cell;
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      os << line << '\n';
    }
    return os.str();
  }

  // Small conjunction equivalent to the zone, e.g. "x<=20 & x==y".
  std::string to_constraint_string() const;

 private:
  std::size_t index_of(const std::string& name) const {
    auto it = std::find(clocks_->begin(), clocks_->end(), name);
    if (it == clocks_->end()) throw Error(Errc::UnknownClock, "clock '" + name + "' is not declared");
    return static_cast<std::size_t>(it - clocks_->begin()) + 1;
  }

  void require_nonempty(const char* op) const {
    if (dbm_.empty()) throw Error(Errc::EmptyZone, std::string(op) + " on empty zone");
  }

  void require_same_clocks(const Zone& o) const {
    if (clocks_ != o.clocks_ && *clocks_ != *o.clocks_) {
      throw Error(Errc::ClockMismatch, "zones range over different clocks");
    }
  }

  Dbm dbm_;
  ClockNames clocks_;
};

// ── Rendering ───────────────────────────────────────────────────────────────

namespace detail {

struct Entry {
  std::size_t i, j;
};

inline std::string render_constraints(const Dbm& d, const std::vector<std::string>& clocks,
                                      const std::vector<Entry>& kept) {
  auto name = [&](std::size_t i) { return clocks[i - 1]; };
  auto has = [&](std::size_t i, std::size_t j) {
    return std::any_of(kept.begin(), kept.end(), [&](const Entry& e) { return e.i == i && e.j == j; });
  };
  std::vector<std::string> parts;
  std::size_t n = d.dim();
  for (std::size_t x = 1; x < n; ++x) {
    Bound lower = d.at(0, x), upper = d.at(x, 0);
    bool hl = has(0, x), hu = has(x, 0);
    if (hl && hu && !lower.is_strict() && !upper.is_strict() && -lower.value() == upper.value()) {
      parts.push_back(name(x) + "==" + std::to_string(upper.value()));
      continue;
    }
    if (hl) parts.push_back(name(x) + (lower.is_strict() ? ">" : ">=") + std::to_string(-lower.value()));
    if (hu) parts.push_back(name(x) + (upper.is_strict() ? "<" : "<=") + std::to_string(upper.value()));
  }
  for (std::size_t x = 1; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      Bound xy = d.at(x, y), yx = d.at(y, x);
      bool hxy = has(x, y), hyx = has(y, x);
      std::string diff = name(x) + "-" + name(y);
      if (hxy && hyx && !xy.is_strict() && !yx.is_strict() && xy.value() == -yx.value()) {
        if (xy.value() == 0) {
          parts.push_back(name(x) + "==" + name(y));
        } else {
          parts.push_back(diff + "==" + std::to_string(xy.value()));
        }
        continue;
      }
      if (hxy) parts.push_back(diff + (xy.is_strict() ? "<" : "<=") + std::to_string(xy.value()));
      if (hyx) parts.push_back(diff + (yx.is_strict() ? ">" : ">=") + std::to_string(-yx.value()));
    }
  }
  if (parts.empty()) return "true";
  std::string s;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) s += " & ";
    s += parts[k];
  }
  return s;
}

}  // namespace detail

inline std::string Zone::to_constraint_string() const {
  if (dbm_.empty()) return "false";
  std::size_t n = dbm_.dim();
  // Candidates in preference order; the tail is dropped first when implied.
  std::vector<detail::Entry> cand;
  for (std::size_t x = 1; x < n; ++x) {
    if (dbm_.at(0, x) != Bound::zero()) cand.push_back({0, x});
    if (!dbm_.at(x, 0).is_infinite()) cand.push_back({x, 0});
  }
  for (std::size_t x = 1; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      if (!dbm_.at(x, y).is_infinite()) cand.push_back({x, y});
      if (!dbm_.at(y, x).is_infinite()) cand.push_back({y, x});
    }
  }
  std::vector<bool> keep(cand.size(), true);
  auto rebuild = [&]() {
    Dbm d = Dbm::universal(n);
    for (std::size_t k = 0; k < cand.size(); ++k)
      if (keep[k]) d.tighten(cand[k].i, cand[k].j, dbm_.at(cand[k].i, cand[k].j));
    d.close();
    return d;
  };
  for (std::size_t k = cand.size(); k-- > 0;) {
    keep[k] = false;
    if (!(rebuild() == dbm_)) keep[k] = true;
  }
  std::vector<detail::Entry> kept;
  for (std::size_t k = 0; k < cand.size(); ++k)
    if (keep[k]) kept.push_back(cand[k]);
  return detail::render_constraints(dbm_, *clocks_, kept);
}

}  // namespace ltioco
