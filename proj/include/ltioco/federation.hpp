#pragma once

#include <cstddef>
#include <vector>

#include "ltioco/dbm.hpp"

namespace ltioco {

// Complement of x_i - x_j ~ b, stated as a bound on x_j - x_i.
inline Bound negate(Bound b) { return Bound::finite(-b.value(), !b.is_strict()); }

// Finite union of zones of one dimension. Parts are canonical and non-empty;
// they may overlap.
class Federation {
 public:
  explicit Federation(std::size_t dim = 0) : dim_(dim) {}

  static Federation of(Dbm d) {
    Federation f(d.dim());
    f.add(std::move(d));
    return f;
  }

  std::size_t dim() const { return dim_; }
  bool empty() const { return parts_.empty(); }
  const std::vector<Dbm>& parts() const { return parts_; }

  void add(Dbm d) {
    if (d.empty()) return;
    for (const auto& p : parts_)
      if (p.includes(d)) return;
    std::erase_if(parts_, [&](const Dbm& p) { return d.includes(p); });
    parts_.push_back(std::move(d));
  }

  void add(const Federation& o) {
    for (const auto& p : o.parts_) add(p);
  }

  Federation intersected(const Dbm& d) const {
    Federation out(dim_);
    for (auto p : parts_) {
      p.intersect(d);
      out.add(std::move(p));
    }
    return out;
  }

  Federation intersected(const Federation& o) const {
    Federation out(dim_);
    for (const auto& q : o.parts_) out.add(intersected(q));
    return out;
  }

  Federation minus(const Dbm& d) const {
    if (d.empty()) return *this;
    Federation out(dim_);
    for (const auto& p : parts_) {
      // Peel off p minus each constraint of d in turn; what is left lies in d.
      Dbm rest = p;
      for (std::size_t i = 0; i < dim_ && !rest.empty(); ++i) {
        for (std::size_t j = 0; j < dim_ && !rest.empty(); ++j) {
          if (i == j) continue;
          Bound b = d.at(i, j);
          if (b.is_infinite() || !(b < rest.at(i, j))) continue;
          Dbm piece = rest;
          piece.constrain(j, i, negate(b));
          out.add(std::move(piece));
          rest.constrain(i, j, b);
        }
      }
    }
    return out;
  }

  Federation minus(const Federation& o) const {
    Federation out = *this;
    for (const auto& q : o.parts_) {
      out = out.minus(q);
      if (out.empty()) break;
    }
    return out;
  }

  // o is a subset of *this
  bool includes(const Federation& o) const { return o.minus(*this).empty(); }

 private:
  std::size_t dim_;
  std::vector<Dbm> parts_;
};

}  // namespace ltioco
