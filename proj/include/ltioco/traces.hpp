#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ltioco/model.hpp"
#include "ltioco/span.hpp"
#include "ltioco/zonegraph.hpp"

namespace ltioco {

enum class Quiet { None, DeltaS, DeltaE, Delta };

// Visible action or a quiescence observation.
struct TraceLabel {
  Quiet quiet = Quiet::None;
  ActionLabel action;

  static TraceLabel of(ActionLabel a) { return {Quiet::None, std::move(a)}; }
  static TraceLabel delta(Quiet q) { return {q, ActionLabel::tau()}; }

  bool is_delta() const { return quiet != Quiet::None; }
  bool is_output_like() const { return is_delta() || action.is_output(); }

  std::string to_string() const {
    switch (quiet) {
      case Quiet::DeltaS: return "delta_S";
      case Quiet::DeltaE: return "delta_E";
      case Quiet::Delta: return "delta";
      case Quiet::None: break;
    }
    return action.to_string();
  }

  auto operator<=>(const TraceLabel&) const = default;
};

struct SpanStep {
  Span span;
  TraceLabel label;

  std::string to_string() const { return span.to_string() + " " + label.to_string(); }

  std::strong_ordering operator<=>(const SpanStep& o) const {
    if (auto c = label <=> o.label; c != 0) return c;
    return span <=> o.span;
  }
  bool operator==(const SpanStep& o) const = default;
};

using SpanTrace = std::vector<SpanStep>;

inline std::string render_trace(const SpanTrace& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ", ";
    s += t[i].to_string();
  }
  return s;
}

// Sorted, duplicate-free set of symbolic states.
using StateSet = std::vector<SymbolicState>;

inline void canonical_set(StateSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

// Which quiescence observations appear in output sets and traces.
enum class QuiescenceMode {
  None,
  SafeAndEnforced,  // delta_S and delta_E
  EnforcedOnly,     // a single delta, meaning no output can ever follow
};

// ── Span arithmetic ─────────────────────────────────────────────────────────

// Coalesces spans with equal labels that overlap or touch; result is sorted.
inline std::vector<SpanStep> merge_spans(std::vector<SpanStep> entries) {
  std::sort(entries.begin(), entries.end());
  std::vector<SpanStep> out;
  for (const auto& e : entries) {
    if (!out.empty() && out.back().label == e.label && spans_connect(out.back().span, e.span)) {
      out.back().span = span_hull(out.back().span, e.span);
    } else {
      out.push_back(e);
    }
  }
  return out;
}

// Every impl entry is covered by a spec entry with the same label.
inline bool out_leq(const std::vector<SpanStep>& impl, const std::vector<SpanStep>& spec,
                    std::vector<SpanStep>* offending = nullptr) {
  bool ok = true;
  for (const auto& e : impl) {
    bool covered = std::any_of(spec.begin(), spec.end(), [&](const SpanStep& s) {
      return s.label == e.label && span_leq(e.span, s.span);
    });
    if (!covered) {
      ok = false;
      if (offending) offending->push_back(e);
    }
  }
  return ok;
}

// ── After-sets ──────────────────────────────────────────────────────────────

namespace detail {

inline bool restrict_t(Dbm& d, std::size_t t, const Span& sp) {
  if (!d.constrain(0, t, Bound::finite(-sp.lo, sp.lo_strict))) return false;
  if (sp.up && !d.constrain(t, 0, Bound::finite(*sp.up, sp.up_strict))) return false;
  return !d.empty();
}

inline void add_tau_closed(const Iolzg& g, const SymbolicState& s, StateSet& out) {
  for (const auto& x : g.tau_closure(s)) out.push_back(x);
}

}  // namespace detail

inline StateSet initial_set(const Iolzg& g) {
  StateSet s;
  detail::add_tau_closed(g, g.initial_state(), s);
  canonical_set(s);
  return s;
}

// Quiescence is a property of the state, not of a delay: its observation
// covers every delay.
inline Span delta_span(const Iolzg&, const SymbolicState&, Quiet) { return Span::all(); }

inline bool has_quiescence(const Iolzg& g, const SymbolicState& s, Quiet q) {
  Quiescence c = g.classify(s);
  switch (q) {
    case Quiet::DeltaS: return c.safe;
    case Quiet::DeltaE:
    case Quiet::Delta: return c.enforced;
    case Quiet::None: break;
  }
  return false;
}

// States reached from `states` by a delay within step.span followed by the
// step's action (and trailing tau moves), or the quiescent subset for a
// quiescence step.
inline StateSet after(const Iolzg& g, const StateSet& states, const SpanStep& step) {
  StateSet out;
  if (step.label.is_delta()) {
    for (const auto& s : states) {
      Federation part = step.label.quiet == Quiet::DeltaS ? g.safe_part(s) : g.enforced_part(s);
      for (const auto& d : part.parts()) out.push_back(g.normalized(s.location, d));
    }
    canonical_set(out);
    return out;
  }
  const LoweredModel& m = g.model();
  const ActionLabel& a = step.label.action;
  std::size_t t = m.dim;
  for (const auto& s : states) {
    for (const auto& cm : g.closure(s)) {
      for (std::size_t si : m.outgoing[cm.location]) {
        const auto& sw = m.switches[si];
        if (sw.action != a) continue;
        Dbm d;
        if (!zg::fire(m, cm.zone_t, sw, d)) continue;
        if (!detail::restrict_t(d, t, step.span)) continue;
        detail::add_tau_closed(g, g.normalized(sw.target, d.without_last_clock()), out);
      }
    }
  }
  canonical_set(out);
  return out;
}

inline StateSet after_trace(const Iolzg& g, const SpanTrace& trace) {
  StateSet s = initial_set(g);
  for (const auto& st : trace) s = after(g, s, st);
  return s;
}

namespace detail {

// Splits the delay axis into maximal intervals over which the set of target
// locations reachable by the action stays the same.
inline std::vector<Span> uniform_intervals(const std::vector<std::pair<Span, std::size_t>>& contribs) {
  std::set<std::int64_t> pts;
  bool unbounded = false;
  for (const auto& [sp, loc] : contribs) {
    pts.insert(sp.lo);
    if (sp.up) {
      pts.insert(*sp.up);
    } else {
      unbounded = true;
    }
  }
  struct Piece {
    Span span;
    std::set<std::size_t> targets;
  };
  std::vector<Piece> pieces;
  auto targets_at = [&](std::int64_t num, std::int64_t den) {
    std::set<std::size_t> t;
    for (const auto& [sp, loc] : contribs)
      if (sp.contains(num, den)) t.insert(loc);
    return t;
  };
  std::vector<std::int64_t> p(pts.begin(), pts.end());
  for (std::size_t i = 0; i < p.size(); ++i) {
    pieces.push_back({Span::point(p[i]), targets_at(p[i], 1)});
    if (i + 1 < p.size()) {
      pieces.push_back({Span{p[i], true, p[i + 1], true}, targets_at(p[i] + p[i + 1], 2)});
    } else if (unbounded) {
      pieces.push_back({Span::from(p[i], true), targets_at(2 * p[i] + 1, 2)});
    }
  }
  std::vector<Span> out;
  const std::set<std::size_t>* last = nullptr;
  for (const auto& pc : pieces) {
    if (pc.targets.empty()) {
      last = nullptr;
      continue;
    }
    if (last && *last == pc.targets) {
      out.back() = span_hull(out.back(), pc.span);
    } else {
      out.push_back(pc.span);
    }
    last = &pc.targets;
  }
  return out;
}

}  // namespace detail

// How the delay axis of a visible step is cut into spans.
//   Location: maximal intervals with a constant set of target locations.
//   AfterSet: maximal intervals with a constant after-set, assembled from
//     integer points and open unit intervals. Unlike Location, no two delays
//     of one span lead to different states, so out-sets keep the correlation
//     between successive delays.
enum class SpanPartition { Location, AfterSet };

namespace detail {

// Integer points and open unit intervals covering sp, up to `cap` for an
// unbounded span, which ends with (cap, inf).
inline std::vector<Span> elementary_pieces(const Span& sp, std::int64_t cap) {
  std::vector<Span> out;
  std::int64_t hi = sp.up ? *sp.up : std::max(sp.lo, cap);
  for (std::int64_t n = sp.lo; n <= hi; ++n) {
    Span pt = Span::point(n);
    if (sp.contains(n, 1)) out.push_back(pt);
    if (n < hi) {
      out.push_back(Span{n, true, n + 1, true});
    } else if (!sp.up) {
      out.push_back(Span::from(n, true));
    }
  }
  return out;
}

}  // namespace detail

// Spans at which `action` can occur from `states`, each paired with the
// after-set for that span.
inline std::vector<std::pair<Span, StateSet>> step_spans(const Iolzg& g, const StateSet& states,
                                                         const ActionLabel& action,
                                                         SpanPartition partition = SpanPartition::Location) {
  const Tioa& a = g.tioa();
  if (action.is_tau() || !(a.is_input(action.name) || a.is_output(action.name))) {
    throw Error(Errc::UnknownLabel, "'" + action.to_string() + "' is not a visible action of " + a.name);
  }
  const LoweredModel& m = g.model();
  std::size_t t = m.dim;
  std::vector<std::pair<Dbm, std::size_t>> fired;  // zone with t, target location
  std::vector<std::pair<Span, std::size_t>> contribs;
  for (const auto& s : states) {
    for (const auto& cm : g.closure(s)) {
      for (std::size_t si : m.outgoing[cm.location]) {
        const auto& sw = m.switches[si];
        if (sw.action != action) continue;
        Dbm d;
        if (!zg::fire(m, cm.zone_t, sw, d)) continue;
        contribs.emplace_back(d.span_of(t), sw.target);
        fired.emplace_back(std::move(d), sw.target);
      }
    }
  }
  auto after_piece = [&](const Span& sp) {
    StateSet next;
    for (const auto& [zone, target] : fired) {
      Dbm d = zone;
      if (detail::restrict_t(d, t, sp)) detail::add_tau_closed(g, g.normalized(target, d.without_last_clock()), next);
    }
    canonical_set(next);
    return next;
  };
  std::vector<std::pair<Span, StateSet>> out;
  if (partition == SpanPartition::Location) {
    for (const auto& sp : detail::uniform_intervals(contribs)) out.emplace_back(sp, after_piece(sp));
    return out;
  }
  for (const auto& sp : detail::uniform_intervals(contribs)) {
    for (const auto& piece : detail::elementary_pieces(sp, g.k() + 1)) {
      StateSet next = after_piece(piece);
      if (next.empty()) continue;
      if (!out.empty() && out.back().second == next && spans_connect(out.back().first, piece)) {
        out.back().first = span_hull(out.back().first, piece);
      } else {
        out.emplace_back(piece, std::move(next));
      }
    }
  }
  return out;
}

// Output set of a state set: outputs with the delays at which they occur,
// plus quiescence observations per `mode`.
inline std::vector<SpanStep> out_set(const Iolzg& g, const StateSet& states, QuiescenceMode mode) {
  const LoweredModel& m = g.model();
  std::size_t t = m.dim;
  std::vector<SpanStep> entries;
  for (const auto& s : states) {
    for (const auto& cm : g.closure(s)) {
      for (std::size_t si : m.outgoing[cm.location]) {
        const auto& sw = m.switches[si];
        if (!sw.action.is_output()) continue;
        Dbm d;
        if (zg::fire(m, cm.zone_t, sw, d)) entries.push_back({d.span_of(t), TraceLabel::of(sw.action)});
      }
    }
    auto add_delta = [&](Quiet q) {
      if (has_quiescence(g, s, q)) entries.push_back({delta_span(g, s, q), TraceLabel::delta(q)});
    };
    if (mode == QuiescenceMode::SafeAndEnforced) {
      add_delta(Quiet::DeltaS);
      add_delta(Quiet::DeltaE);
    } else if (mode == QuiescenceMode::EnforcedOnly) {
      add_delta(Quiet::Delta);
    }
  }
  return merge_spans(std::move(entries));
}

inline std::vector<Quiet> quiescence_labels(QuiescenceMode mode) {
  switch (mode) {
    case QuiescenceMode::SafeAndEnforced: return {Quiet::DeltaS, Quiet::DeltaE};
    case QuiescenceMode::EnforcedOnly: return {Quiet::Delta};
    case QuiescenceMode::None: break;
  }
  return {};
}

// Quiescence steps available from `states`; `block` holds the flavours used
// since the last visible action, each of which may appear once.
inline std::vector<std::pair<SpanStep, StateSet>> delta_steps(const Iolzg& g, const StateSet& states,
                                                              QuiescenceMode mode, const std::vector<Quiet>& block) {
  std::vector<std::pair<SpanStep, StateSet>> out;
  for (Quiet q : quiescence_labels(mode)) {
    if (std::find(block.begin(), block.end(), q) != block.end()) continue;
    std::vector<SpanStep> entries;
    for (const auto& s : states)
      if (has_quiescence(g, s, q)) entries.push_back({delta_span(g, s, q), TraceLabel::delta(q)});
    if (entries.empty()) continue;
    auto merged = merge_spans(std::move(entries));
    Span sp = merged.front().span;
    for (const auto& e : merged) sp = span_hull(sp, e.span);
    SpanStep step{sp, TraceLabel::delta(q)};
    out.emplace_back(step, after(g, states, step));
  }
  return out;
}

// Visible steps from `states`, in trace order.
inline std::vector<std::pair<SpanStep, StateSet>> visible_steps(const Iolzg& g, const StateSet& states,
                                                                SpanPartition partition = SpanPartition::Location) {
  std::vector<std::pair<SpanStep, StateSet>> out;
  for (const auto& a : g.tioa().alphabet()) {
    for (auto& [sp, next] : step_spans(g, states, a, partition)) {
      out.emplace_back(SpanStep{sp, TraceLabel::of(a)}, std::move(next));
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

// All span traces with at most `depth` visible steps. Quiescence steps do
// not count towards the depth.
inline std::set<SpanTrace> enumerate_span_traces(const Iolzg& g, std::size_t depth, bool with_quiescence,
                                                 SpanPartition partition = SpanPartition::Location) {
  std::set<SpanTrace> result;
  QuiescenceMode mode = with_quiescence ? QuiescenceMode::SafeAndEnforced : QuiescenceMode::None;
  SpanTrace cur;
  auto rec = [&](auto&& self, const StateSet& states, std::size_t remaining, std::vector<Quiet> block) -> void {
    result.insert(cur);
    for (auto& [step, next] : delta_steps(g, states, mode, block)) {
      auto b = block;
      b.push_back(step.label.quiet);
      cur.push_back(step);
      self(self, next, remaining, b);
      cur.pop_back();
    }
    if (remaining == 0) return;
    for (auto& [step, next] : visible_steps(g, states, partition)) {
      cur.push_back(step);
      self(self, next, remaining - 1, {});
      cur.pop_back();
    }
  };
  rec(rec, initial_set(g), depth, {});
  return result;
}

}  // namespace ltioco
