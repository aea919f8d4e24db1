#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ltioco/conformance.hpp"
#include "ltioco/error.hpp"
#include "ltioco/model.hpp"
#include "ltioco/traces.hpp"

// Brute-force discrete-time semantics: integer delays, clock values capped at
// ceiling+1 (all constraints with constants up to the ceiling evaluate the
// same on every value above it).

namespace ltioco::oracle {

struct OracleConfig {
  std::optional<std::int64_t> ceiling;  // defaults to the largest constant
  // Largest delay explored per step; unset means ceiling + 1. Exploration
  // also stops early once the reachable sets stop changing.
  std::optional<std::int64_t> max_delay;
  bool closed_only = true;
  // Time grid 1/resolution: constants are multiplied by it, so one unit
  // delay of the discrete system lasts 1/resolution time units.
  std::int64_t resolution = 1;
  // Allow quiescence observations after a delay, (d, delta), instead of only
  // at the instant the previous step completed.
  bool delayed_quiescence = false;
  std::size_t max_states = 4'000'000;
};

using StateId = std::uint32_t;
using StateSetD = std::vector<StateId>;  // sorted, unique

inline constexpr StateId kNone = static_cast<StateId>(-1);

// Explicit transition system with unit delay steps.
class DiscreteSystem {
 public:
  struct Move {
    std::size_t label;  // index into labels()
    StateId target;
  };

  const std::vector<ActionLabel>& labels() const { return labels_; }
  std::size_t size() const { return delay_.size(); }
  StateId initial() const { return initial_; }
  // In grid units.
  std::int64_t ceiling() const { return ceiling_; }
  void set_ceiling(std::int64_t k) { ceiling_ = k; }
  std::int64_t resolution() const { return resolution_; }
  void set_resolution(std::int64_t r) { resolution_ = r; }
  StateId delay_successor(StateId s) const { return delay_[s]; }
  const std::vector<StateId>& tau(StateId s) const { return tau_[s]; }
  const std::vector<Move>& moves(StateId s) const { return moves_[s]; }
  const std::string& describe(StateId s) const { return names_[s]; }

  std::optional<std::size_t> label_index(const ActionLabel& a) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == a) return i;
    return std::nullopt;
  }

  bool safe(StateId s) const { return safe_[s]; }          // unbounded delays possible
  bool enforced(StateId s) const { return enforced_[s]; }  // no output ever
  // Longest strong delay, or nullopt when unbounded.
  std::optional<std::int64_t> max_strong_delay(StateId s) const {
    if (max_delay_[s] < 0) return std::nullopt;
    return max_delay_[s];
  }

  // ── Builder interface ──
  StateId add_state(std::string name) {
    delay_.push_back(kNone);
    tau_.emplace_back();
    moves_.emplace_back();
    names_.push_back(std::move(name));
    return static_cast<StateId>(delay_.size() - 1);
  }
  void set_delay(StateId s, StateId t) { delay_[s] = t; }
  void add_tau(StateId s, StateId t) { tau_[s].push_back(t); }
  void add_move(StateId s, std::size_t label, StateId t) { moves_[s].push_back({label, t}); }
  void set_initial(StateId s) { initial_ = s; }
  std::size_t intern_label(const ActionLabel& a) {
    if (auto i = label_index(a)) return *i;
    labels_.push_back(a);
    return labels_.size() - 1;
  }

  // Computes quiescence and delay tables once all states are present.
  void finish() {
    std::size_t n = size();
    for (auto& t : tau_) {
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
    }
    std::vector<std::vector<StateId>> pred(n);
    for (StateId s = 0; s < n; ++s) {
      if (delay_[s] != kNone) pred[delay_[s]].push_back(s);
      for (StateId t : tau_[s]) pred[t].push_back(s);
    }
    // Enforced: no output reachable through delays and tau moves.
    std::vector<char> can_out(n, 0);
    std::deque<StateId> work;
    for (StateId s = 0; s < n; ++s) {
      for (const auto& m : moves_[s]) {
        if (labels_[m.label].is_output()) {
          can_out[s] = 1;
          work.push_back(s);
          break;
        }
      }
    }
    while (!work.empty()) {
      StateId s = work.front();
      work.pop_front();
      for (StateId p : pred[s])
        if (!can_out[p]) {
          can_out[p] = 1;
          work.push_back(p);
        }
    }
    enforced_.assign(n, 0);
    for (StateId s = 0; s < n; ++s) enforced_[s] = !can_out[s];

    // Safe: greatest set W with every state able to reach, by tau moves, a
    // state whose delay successor is in W.
    safe_.assign(n, 1);
    bool changed = true;
    while (changed) {
      changed = false;
      for (StateId s = 0; s < n; ++s) {
        if (!safe_[s]) continue;
        if (!reaches_safe_delay(s)) {
          safe_[s] = 0;
          changed = true;
        }
      }
    }

    max_delay_.assign(n, -2);
    for (StateId s = 0; s < n; ++s) strong_delay(s);
  }

 private:
  bool reaches_safe_delay(StateId s) const {
    std::vector<StateId> stack{s};
    std::set<StateId> seen{s};
    while (!stack.empty()) {
      StateId c = stack.back();
      stack.pop_back();
      if (delay_[c] != kNone && safe_[delay_[c]]) return true;
      for (StateId t : tau_[c])
        if (seen.insert(t).second) stack.push_back(t);
    }
    return false;
  }

  // -1 encodes unbounded.
  std::int64_t strong_delay(StateId s) {
    std::vector<StateId> chain;
    StateId c = s;
    std::set<StateId> on_chain;
    std::int64_t base = 0;
    while (true) {
      if (max_delay_[c] != -2) {
        base = max_delay_[c];
        break;
      }
      if (on_chain.count(c)) {
        base = -1;
        break;
      }
      on_chain.insert(c);
      chain.push_back(c);
      if (delay_[c] == kNone) {
        max_delay_[c] = 0;
        chain.pop_back();
        base = 0;
        break;
      }
      c = delay_[c];
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      base = base < 0 ? -1 : base + 1;
      max_delay_[*it] = base;
    }
    return max_delay_[s];
  }

  std::vector<ActionLabel> labels_;
  std::vector<StateId> delay_;
  std::vector<std::vector<StateId>> tau_;
  std::vector<std::vector<Move>> moves_;
  std::vector<std::string> names_;
  std::vector<char> safe_;
  std::vector<char> enforced_;
  std::vector<std::int64_t> max_delay_;
  StateId initial_ = 0;
  std::int64_t ceiling_ = 0;
  std::int64_t resolution_ = 1;
};

namespace detail {

struct VecHash {
  std::size_t operator()(const std::vector<std::int32_t>& v) const {
    std::size_t h = v.size();
    for (auto x : v) h = h * 1000003u ^ static_cast<std::size_t>(x);
    return h;
  }
};

inline bool holds(const AtomicConstraint& a, const Tioa& m, const std::vector<std::int32_t>& key) {
  std::int64_t v = key[*m.clock_index(a.clock)];
  switch (a.relation) {
    case Relation::Less: return v < a.bound;
    case Relation::LessEq: return v <= a.bound;
    case Relation::Equal: return v == a.bound;
    case Relation::GreaterEq: return v >= a.bound;
    case Relation::Greater: return v > a.bound;
  }
  return false;
}

inline bool holds(const ClockConstraint& c, const Tioa& m, const std::vector<std::int32_t>& key) {
  return std::all_of(c.conjuncts.begin(), c.conjuncts.end(), [&](const AtomicConstraint& a) { return holds(a, m, key); });
}

inline bool has_strict_constraint(const Tioa& a) {
  auto strict = [](const ClockConstraint& c) {
    return std::any_of(c.conjuncts.begin(), c.conjuncts.end(), [](const AtomicConstraint& x) { return x.is_strict(); });
  };
  return std::any_of(a.locations.begin(), a.locations.end(), [&](const Location& l) { return strict(l.invariant); }) ||
         std::any_of(a.switches.begin(), a.switches.end(), [&](const Switch& s) { return strict(s.guard); });
}

}  // namespace detail

// Copy of a with every constant multiplied by r.
inline Tioa scale_constants(Tioa a, std::int64_t r) {
  if (r < 1) throw Error(Errc::InvalidCeiling, "resolution must be positive");
  for (auto& l : a.locations)
    for (auto& c : l.invariant.conjuncts) c.bound *= r;
  for (auto& s : a.switches)
    for (auto& c : s.guard.conjuncts) c.bound *= r;
  return a;
}

namespace detail {

inline DiscreteSystem discretize_scaled(const Tioa& a, const OracleConfig& cfg) {
  std::int64_t k = cfg.ceiling.value_or(max_constant(a));
  if (k < max_constant(a)) throw Error(Errc::InvalidCeiling, "ceiling below the largest constant");
  if (cfg.closed_only && detail::has_strict_constraint(a)) {
    throw Error(Errc::StrictConstraintRejected, a.name + " uses strict constraints; integer delays are not exhaustive");
  }
  std::int32_t cap = static_cast<std::int32_t>(k + 1);
  DiscreteSystem sys;
  sys.set_ceiling(k);
  for (const auto& l : a.alphabet()) sys.intern_label(l);

  // key[0] = location, key[i] = clock i
  std::unordered_map<std::vector<std::int32_t>, StateId, detail::VecHash> index;
  std::deque<std::vector<std::int32_t>> work;
  auto name_of = [&](const std::vector<std::int32_t>& key) {
    std::string s = a.locations[key[0]].name;
    for (std::size_t i = 1; i < key.size(); ++i) {
      s += (i == 1 ? " " : ",") + a.clocks[i - 1] + "=" + std::to_string(key[i]);
    }
    return s;
  };
  auto visit = [&](std::vector<std::int32_t> key) -> StateId {
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    if (sys.size() >= cfg.max_states) throw Error(Errc::InvalidModel, "discrete state space exceeds the limit");
    StateId id = sys.add_state(name_of(key));
    index.emplace(key, id);
    work.push_back(std::move(key));
    return id;
  };
  auto inv_ok = [&](const std::vector<std::int32_t>& key) {
    return detail::holds(a.locations[key[0]].invariant, a, key);
  };

  std::vector<std::int32_t> init(a.clocks.size() + 1, 0);
  init[0] = static_cast<std::int32_t>(*a.location_index(a.initial));
  sys.set_initial(visit(init));
  while (!work.empty()) {
    std::vector<std::int32_t> key = std::move(work.front());
    work.pop_front();
    StateId id = index.at(key);
    std::vector<std::int32_t> d = key;
    for (std::size_t i = 1; i < d.size(); ++i) d[i] = std::min(d[i] + 1, cap);
    if (inv_ok(d)) sys.set_delay(id, visit(d));
    for (const auto& s : a.switches) {
      if (a.locations[key[0]].name != s.source) continue;
      if (!detail::holds(s.guard, a, key)) continue;
      std::vector<std::int32_t> t = key;
      t[0] = static_cast<std::int32_t>(*a.location_index(s.target));
      for (const auto& x : s.resets) t[*a.clock_index(x)] = 0;
      if (!inv_ok(t)) continue;
      StateId tid = visit(t);
      if (s.action.is_tau()) {
        sys.add_tau(id, tid);
      } else {
        sys.add_move(id, sys.intern_label(s.action), tid);
      }
    }
  }
  sys.finish();
  return sys;
}

}  // namespace detail

// Reachable discrete states of a, with unit delays of 1/cfg.resolution.
inline DiscreteSystem discretize(const Tioa& a_in, const OracleConfig& cfg = {}) {
  require_valid(a_in);
  Tioa a = scale_constants(a_in, cfg.resolution);
  OracleConfig scaled = cfg;
  if (cfg.ceiling) scaled.ceiling = *cfg.ceiling * cfg.resolution;
  DiscreteSystem sys = detail::discretize_scaled(a, scaled);
  sys.set_resolution(cfg.resolution);
  return sys;
}

// State-level parallel product: shared actions synchronise into tau steps,
// delays are taken jointly.
inline DiscreteSystem product(const DiscreteSystem& p, const DiscreteSystem& q) {
  auto shared = [&](const ActionLabel& l, const DiscreteSystem& other) {
    for (const auto& o : other.labels())
      if (o.name == l.name) return true;
    return false;
  };
  if (p.resolution() != q.resolution()) throw Error(Errc::NotComposable, "systems use different time grids");
  DiscreteSystem sys;
  sys.set_ceiling(std::max(p.ceiling(), q.ceiling()));
  sys.set_resolution(p.resolution());
  for (const auto& l : p.labels())
    if (!shared(l, q)) sys.intern_label(l);
  for (const auto& l : q.labels())
    if (!shared(l, p)) sys.intern_label(l);

  std::map<std::pair<StateId, StateId>, StateId> index;
  std::deque<std::pair<StateId, StateId>> work;
  auto visit = [&](std::pair<StateId, StateId> k) {
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    StateId id = sys.add_state(p.describe(k.first) + " | " + q.describe(k.second));
    index.emplace(k, id);
    work.push_back(k);
    return id;
  };
  sys.set_initial(visit({p.initial(), q.initial()}));
  while (!work.empty()) {
    auto [a, b] = work.front();
    work.pop_front();
    StateId id = index.at({a, b});
    for (StateId t : p.tau(a)) sys.add_tau(id, visit({t, b}));
    for (StateId t : q.tau(b)) sys.add_tau(id, visit({a, t}));
    for (const auto& m : p.moves(a)) {
      const ActionLabel& l = p.labels()[m.label];
      if (!shared(l, q)) {
        sys.add_move(id, sys.intern_label(l), visit({m.target, b}));
        continue;
      }
      for (const auto& n : q.moves(b)) {
        if (q.labels()[n.label].name == l.name) sys.add_tau(id, visit({m.target, n.target}));
      }
    }
    for (const auto& n : q.moves(b)) {
      const ActionLabel& l = q.labels()[n.label];
      if (!shared(l, p)) sys.add_move(id, sys.intern_label(l), visit({a, n.target}));
    }
    if (p.delay_successor(a) != kNone && q.delay_successor(b) != kNone) {
      sys.set_delay(id, visit({p.delay_successor(a), q.delay_successor(b)}));
    }
  }
  sys.finish();
  return sys;
}

// ── Weak set operations ─────────────────────────────────────────────────────

inline StateSetD tau_close(const DiscreteSystem& ts, StateSetD s) {
  std::set<StateId> seen(s.begin(), s.end());
  std::vector<StateId> stack(s.begin(), s.end());
  while (!stack.empty()) {
    StateId c = stack.back();
    stack.pop_back();
    for (StateId t : ts.tau(c))
      if (seen.insert(t).second) stack.push_back(t);
  }
  return {seen.begin(), seen.end()};
}

// One time unit, tau moves allowed before and after.
inline StateSetD delay_one(const DiscreteSystem& ts, const StateSetD& s) {
  StateSetD out;
  for (StateId x : s)
    if (ts.delay_successor(x) != kNone) out.push_back(ts.delay_successor(x));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return tau_close(ts, std::move(out));
}

inline StateSetD act(const DiscreteSystem& ts, const StateSetD& s, std::size_t label) {
  StateSetD out;
  for (StateId x : s)
    for (const auto& m : ts.moves(x))
      if (m.label == label) out.push_back(m.target);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return tau_close(ts, std::move(out));
}

inline StateSetD initial_set(const DiscreteSystem& ts) { return tau_close(ts, {ts.initial()}); }

// Sets reached after d = 0, 1, 2, ... time units, until the sequence becomes
// constant (or max_delay is reached). The last element repeats forever when
// `stable` is set.
struct DelaySweep {
  std::vector<StateSetD> sets;
  bool stable = false;
};

inline DelaySweep sweep(const DiscreteSystem& ts, const StateSetD& s, std::optional<std::int64_t> max_delay) {
  DelaySweep r;
  r.sets.push_back(s);
  const std::int64_t hard = 1'000'000;
  while (true) {
    std::int64_t d = static_cast<std::int64_t>(r.sets.size());
    if (r.sets.back().empty()) {
      r.stable = true;
      break;
    }
    if ((max_delay && d > *max_delay) || d > hard) break;
    StateSetD n = delay_one(ts, r.sets.back());
    if (n == r.sets.back()) {
      r.stable = true;
      break;
    }
    r.sets.push_back(std::move(n));
  }
  return r;
}

// ── Traces and observations ─────────────────────────────────────────────────

inline std::string render_delay(std::int64_t ticks, std::int64_t resolution) {
  if (resolution == 1 || ticks % resolution == 0) return std::to_string(ticks / resolution);
  return std::to_string(ticks) + "/" + std::to_string(resolution);
}

// Delays are in grid units (1/resolution time units).
struct TimedStep {
  std::int64_t delay = 0;
  TraceLabel label;

  auto operator<=>(const TimedStep&) const = default;
  std::string to_string(std::int64_t resolution = 1) const {
    return "(" + render_delay(delay, resolution) + ", " + label.to_string() + ")";
  }
};

using TimedTrace = std::vector<TimedStep>;

inline std::string render_timed(const TimedTrace& t, std::int64_t resolution = 1) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ", ";
    s += t[i].to_string(resolution);
  }
  return s;
}

enum class OracleRelation {
  Ltioco,      // outputs with delays, delta_S and delta_E
  TiocoDelta,  // outputs with delays and delta (no output ever)
  TiocoDelays, // outputs and every possible (strong) delay
};

// Observation: an output after a delay, a quiescence flavour, or (for
// TiocoDelays) the ability to let `delay` time units pass.
struct Observation {
  enum class Kind { Output, Quiescence, Delay, UnboundedDelay } kind = Kind::Output;
  std::int64_t delay = 0;
  TraceLabel label;

  auto operator<=>(const Observation&) const = default;
  std::string to_string(std::int64_t resolution = 1) const {
    switch (kind) {
      case Kind::Output: return "(" + render_delay(delay, resolution) + ", " + label.to_string() + ")";
      case Kind::Quiescence: return label.to_string();
      case Kind::Delay: return "delay " + render_delay(delay, resolution);
      case Kind::UnboundedDelay: return "delay inf";
    }
    return "?";
  }
};

inline std::vector<Quiet> quiet_labels(OracleRelation r) {
  switch (r) {
    case OracleRelation::Ltioco: return {Quiet::DeltaS, Quiet::DeltaE};
    case OracleRelation::TiocoDelta: return {Quiet::Delta};
    case OracleRelation::TiocoDelays: break;
  }
  return {};
}

inline bool quiet_holds(const DiscreteSystem& ts, StateId s, Quiet q) {
  switch (q) {
    case Quiet::DeltaS: return ts.safe(s);
    case Quiet::DeltaE:
    case Quiet::Delta: return ts.enforced(s);
    case Quiet::None: break;
  }
  return false;
}

inline StateSetD filter_quiet(const DiscreteSystem& ts, const StateSetD& s, Quiet q) {
  StateSetD out;
  for (StateId x : s)
    if (quiet_holds(ts, x, q)) out.push_back(x);
  return out;
}

inline std::optional<std::int64_t> max_strong_delay(const DiscreteSystem& ts, const StateSetD& s) {
  std::int64_t best = -1;
  for (StateId x : s) {
    auto d = ts.max_strong_delay(x);
    if (!d) return std::nullopt;
    best = std::max(best, *d);
  }
  return best;
}

// Observations of a state set. Output delays are listed individually up to
// the sweep length; when the sweep is stable the last entry stands for every
// larger delay.
inline std::vector<Observation> observe(const DiscreteSystem& ts, const StateSetD& s, OracleRelation rel,
                                        const OracleConfig& cfg) {
  std::vector<Observation> out;
  if (rel == OracleRelation::TiocoDelays) {
    for (std::size_t l = 0; l < ts.labels().size(); ++l) {
      if (!ts.labels()[l].is_output()) continue;
      if (!act(ts, s, l).empty()) out.push_back({Observation::Kind::Output, 0, TraceLabel::of(ts.labels()[l])});
    }
    if (!s.empty()) {
      auto md = max_strong_delay(ts, s);
      if (md) {
        out.push_back({Observation::Kind::Delay, *md, TraceLabel{}});
      } else {
        out.push_back({Observation::Kind::UnboundedDelay, 0, TraceLabel{}});
      }
    }
    return out;
  }
  DelaySweep sw = sweep(ts, s, cfg.max_delay.value_or(ts.ceiling() + 1));
  for (std::size_t d = 0; d < sw.sets.size(); ++d) {
    for (std::size_t l = 0; l < ts.labels().size(); ++l) {
      if (!ts.labels()[l].is_output()) continue;
      if (!act(ts, sw.sets[d], l).empty()) {
        out.push_back({Observation::Kind::Output, static_cast<std::int64_t>(d), TraceLabel::of(ts.labels()[l])});
      }
    }
  }
  for (Quiet q : quiet_labels(rel)) {
    if (!filter_quiet(ts, s, q).empty()) out.push_back({Observation::Kind::Quiescence, 0, TraceLabel::delta(q)});
  }
  return out;
}

// Set of states after a timed trace (weak semantics).
inline StateSetD after(const DiscreteSystem& ts, const TimedTrace& trace) {
  StateSetD s = initial_set(ts);
  for (const auto& st : trace) {
    for (std::int64_t i = 0; i < st.delay; ++i) s = delay_one(ts, s);
    if (st.label.is_delta()) {
      s = filter_quiet(ts, s, st.label.quiet);
    } else {
      auto l = ts.label_index(st.label.action);
      if (!l) return {};
      s = act(ts, s, *l);
    }
  }
  return s;
}

// ── Conformance by exhaustive exploration ───────────────────────────────────

struct OracleVerdict {
  bool pass = true;
  TimedTrace witness;
  std::vector<Observation> offending;
  std::size_t nodes = 0;
  std::int64_t resolution = 1;  // of witness delays
};

namespace detail {

// Observation sets are compared delay by delay, so both sweeps are walked in
// lockstep until both are stable.
struct PairSweep {
  std::vector<StateSetD> impl;
  std::vector<StateSetD> spec;
};

inline PairSweep pair_sweep(const DiscreteSystem& im, const StateSetD& is, const DiscreteSystem& sp,
                            const StateSetD& ss, std::optional<std::int64_t> max_delay) {
  PairSweep r;
  r.impl.push_back(is);
  r.spec.push_back(ss);
  const std::int64_t hard = 1'000'000;
  while (true) {
    std::int64_t d = static_cast<std::int64_t>(r.impl.size());
    if ((max_delay && d > *max_delay) || d > hard) break;
    StateSetD ni = delay_one(im, r.impl.back());
    StateSetD ns = delay_one(sp, r.spec.back());
    if (ni == r.impl.back() && ns == r.spec.back()) break;
    r.impl.push_back(std::move(ni));
    r.spec.push_back(std::move(ns));
  }
  return r;
}

inline std::optional<std::size_t> map_label(const DiscreteSystem& from, std::size_t l, const DiscreteSystem& to) {
  return to.label_index(from.labels()[l]);
}

}  // namespace detail

// Checks impl against spec for every trace of spec with at most `length`
// visible steps (quiescence steps are free but never repeated back to back).
inline OracleVerdict check(const DiscreteSystem& im, const DiscreteSystem& sp, OracleRelation rel,
                           std::size_t length, const OracleConfig& cfg = {}) {
  OracleVerdict v;
  v.resolution = im.resolution();
  OracleConfig c = cfg;
  if (!c.max_delay) c.max_delay = std::max(im.ceiling(), sp.ceiling()) + 1;
  using Key = std::tuple<StateSetD, StateSetD, std::vector<Quiet>>;
  std::map<Key, std::size_t> memo;
  TimedTrace cur;
  bool stop = false;

  auto fail = [&](std::vector<Observation> off) {
    v.pass = false;
    v.witness = cur;
    v.offending = std::move(off);
    stop = true;
  };

  auto rec = [&](auto&& self, const StateSetD& is, const StateSetD& ss, std::size_t remaining,
                 const std::vector<Quiet>& block) -> void {
    if (stop || is.empty()) return;
    ++v.nodes;
    Key key{is, ss, block};
    if (auto it = memo.find(key); it != memo.end() && it->second >= remaining) return;
    memo[key] = remaining;

    detail::PairSweep ps;
    if (rel == OracleRelation::TiocoDelays) {
      auto io = observe(im, is, rel, c);
      auto so = observe(sp, ss, rel, c);
      std::vector<Observation> off;
      for (const auto& o : io) {
        if (o.kind == Observation::Kind::Output) {
          if (std::find(so.begin(), so.end(), o) == so.end()) off.push_back(o);
        }
      }
      auto imd = max_strong_delay(im, is);
      auto smd = ss.empty() ? std::optional<std::int64_t>(-1) : max_strong_delay(sp, ss);
      if (smd && (!imd || *imd > *smd)) {
        if (imd) {
          off.push_back({Observation::Kind::Delay, *smd + 1, TraceLabel{}});
        } else {
          off.push_back({Observation::Kind::UnboundedDelay, 0, TraceLabel{}});
        }
      }
      if (!off.empty()) return fail(std::move(off));
      ps = detail::pair_sweep(im, is, sp, ss, c.max_delay);
    } else {
      ps = detail::pair_sweep(im, is, sp, ss, c.max_delay);
      std::vector<Observation> off;
      for (std::size_t d = 0; d < ps.impl.size(); ++d) {
        for (std::size_t l = 0; l < im.labels().size(); ++l) {
          if (!im.labels()[l].is_output()) continue;
          if (act(im, ps.impl[d], l).empty()) continue;
          auto sl = detail::map_label(im, l, sp);
          if (!sl || act(sp, ps.spec[d], *sl).empty()) {
            off.push_back({Observation::Kind::Output, static_cast<std::int64_t>(d), TraceLabel::of(im.labels()[l])});
          }
        }
        if (!off.empty()) break;
      }
      for (Quiet q : quiet_labels(rel)) {
        if (!filter_quiet(im, is, q).empty() && filter_quiet(sp, ss, q).empty()) {
          off.push_back({Observation::Kind::Quiescence, 0, TraceLabel::delta(q)});
        }
      }
      if (!off.empty()) return fail(std::move(off));
    }

    if (remaining > 0) {
      for (std::size_t d = 0; d < ps.spec.size() && !stop; ++d) {
        for (std::size_t l = 0; l < sp.labels().size() && !stop; ++l) {
          StateSetD sn = act(sp, ps.spec[d], l);
          if (sn.empty()) continue;
          auto il = im.label_index(sp.labels()[l]);
          StateSetD in = il ? act(im, ps.impl[d], *il) : StateSetD{};
          cur.push_back({static_cast<std::int64_t>(d), TraceLabel::of(sp.labels()[l])});
          self(self, in, sn, remaining - 1, {});
          cur.pop_back();
        }
      }
    }
    std::size_t qd = cfg.delayed_quiescence ? ps.spec.size() : 1;
    for (std::size_t d = 0; d < qd; ++d) {
      for (Quiet q : quiet_labels(rel)) {
        if (stop) return;
        if (std::find(block.begin(), block.end(), q) != block.end()) continue;
        StateSetD sn = filter_quiet(sp, ps.spec[d], q);
        if (sn.empty()) continue;
        auto b = block;
        b.push_back(q);
        cur.push_back({static_cast<std::int64_t>(d), TraceLabel::delta(q)});
        self(self, filter_quiet(im, ps.impl[d], q), sn, remaining, b);
        cur.pop_back();
      }
    }
  };
  rec(rec, initial_set(im), initial_set(sp), length, {});
  return v;
}

inline OracleVerdict check(const Tioa& impl, const Tioa& spec, OracleRelation rel, std::size_t length,
                           const OracleConfig& cfg = {}) {
  require_same_alphabet(impl, spec);
  OracleConfig c = cfg;
  if (!c.ceiling) c.ceiling = std::max(max_constant(impl), max_constant(spec));
  return check(discretize(impl, c), discretize(spec, c), rel, length, c);
}

// Timed suspension traces with at most n visible steps and delays up to
// max_delay. Quiescence steps are included when rel has them; with
// delayed_quiescence they may follow any delay, otherwise only delay 0.
inline std::set<TimedTrace> tstraces(const DiscreteSystem& ts, std::size_t n, OracleRelation rel,
                                     std::int64_t max_delay, bool delayed_quiescence = true) {
  std::set<TimedTrace> out;
  TimedTrace cur;
  auto rec = [&](auto&& self, const StateSetD& s, std::size_t remaining, const std::vector<Quiet>& block) -> void {
    out.insert(cur);
    StateSetD c = s;
    for (std::int64_t d = 0; d <= max_delay && !c.empty(); ++d) {
      for (Quiet q : quiet_labels(rel)) {
        if (d > 0 && !delayed_quiescence) break;
        if (std::find(block.begin(), block.end(), q) != block.end()) continue;
        StateSetD f = filter_quiet(ts, c, q);
        if (f.empty()) continue;
        auto b = block;
        b.push_back(q);
        cur.push_back({d, TraceLabel::delta(q)});
        self(self, f, remaining, b);
        cur.pop_back();
      }
      if (remaining > 0) {
        for (std::size_t l = 0; l < ts.labels().size(); ++l) {
          StateSetD nx = act(ts, c, l);
          if (nx.empty()) continue;
          cur.push_back({d, TraceLabel::of(ts.labels()[l])});
          self(self, nx, remaining - 1, {});
          cur.pop_back();
        }
      }
      c = delay_one(ts, c);
    }
  };
  rec(rec, initial_set(ts), n, {});
  return out;
}

// Compares the timed-trace languages (visible steps only, every delay) of two
// systems up to n steps. Returns the first trace present in only one of them.
inline std::optional<TimedTrace> trace_difference(const DiscreteSystem& a, const DiscreteSystem& b, std::size_t n,
                                                  const OracleConfig& cfg = {}) {
  std::set<std::tuple<StateSetD, StateSetD, std::size_t>> seen;
  TimedTrace cur;
  std::optional<TimedTrace> diff;
  std::vector<ActionLabel> labels = a.labels();
  for (const auto& l : b.labels())
    if (!a.label_index(l)) labels.push_back(l);
  auto rec = [&](auto&& self, const StateSetD& sa, const StateSetD& sb, std::size_t remaining) -> void {
    if (diff || remaining == 0) return;
    if (!seen.insert({sa, sb, remaining}).second) return;
    auto ps = detail::pair_sweep(a, sa, b, sb, cfg.max_delay.value_or(std::max(a.ceiling(), b.ceiling()) + 1));
    for (std::size_t d = 0; d < ps.impl.size() && !diff; ++d) {
      for (const auto& l : labels) {
        auto la = a.label_index(l);
        auto lb = b.label_index(l);
        StateSetD na = la ? act(a, ps.impl[d], *la) : StateSetD{};
        StateSetD nb = lb ? act(b, ps.spec[d], *lb) : StateSetD{};
        if (na.empty() && nb.empty()) continue;
        cur.push_back({static_cast<std::int64_t>(d), TraceLabel::of(l)});
        if (na.empty() != nb.empty()) {
          diff = cur;
          return;
        }
        self(self, na, nb, remaining - 1);
        cur.pop_back();
        if (diff) return;
      }
    }
  };
  rec(rec, initial_set(a), initial_set(b), n);
  return diff;
}

// ── Time properties of the delay relation ───────────────────────────────────

struct TimeProperties {
  bool time_additivity = true;
  bool time_reflexivity = true;
  bool time_determinism = true;
};

// Delay relation over d time units: strong uses only unit delay steps, weak
// allows tau moves before, between and after them.
inline StateSetD delay_relation(const DiscreteSystem& ts, StateId s, std::int64_t d, bool weak) {
  StateSetD cur = weak ? tau_close(ts, {s}) : StateSetD{s};
  for (std::int64_t i = 0; i < d && !cur.empty(); ++i) {
    if (weak) {
      cur = delay_one(ts, cur);
    } else {
      StateId n = ts.delay_successor(cur.front());
      cur = n == kNone ? StateSetD{} : StateSetD{n};
    }
  }
  return cur;
}

inline TimeProperties time_properties(const DiscreteSystem& ts, bool weak, std::int64_t horizon) {
  TimeProperties p;
  for (StateId s = 0; s < ts.size(); ++s) {
    if (delay_relation(ts, s, 0, weak) != StateSetD{s}) p.time_reflexivity = false;
    for (std::int64_t d1 = 0; d1 <= horizon; ++d1) {
      StateSetD r1 = delay_relation(ts, s, d1, weak);
      if (r1.size() > 1) p.time_determinism = false;
      for (std::int64_t d2 = 0; d1 + d2 <= horizon; ++d2) {
        std::set<StateId> comp;
        for (StateId m : r1)
          for (StateId e : delay_relation(ts, m, d2, weak)) comp.insert(e);
        StateSetD direct = delay_relation(ts, s, d1 + d2, weak);
        if (StateSetD(comp.begin(), comp.end()) != direct) p.time_additivity = false;
      }
    }
  }
  return p;
}

}  // namespace ltioco::oracle
