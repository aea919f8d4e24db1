#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ltioco/dbm.hpp"
#include "ltioco/federation.hpp"
#include "ltioco/model.hpp"
#include "ltioco/span.hpp"

namespace ltioco {

struct SymbolicState {
  std::size_t location = 0;
  Dbm zone;

  bool operator==(const SymbolicState& o) const { return location == o.location && zone == o.zone; }
  std::strong_ordering operator<=>(const SymbolicState& o) const {
    if (auto c = location <=> o.location; c != 0) return c;
    return zone <=> o.zone;
  }
};

struct SymbolicStateHash {
  std::size_t operator()(const SymbolicState& s) const { return s.zone.hash() * 31 + s.location; }
};

struct ZgEdge {
  std::size_t source = 0;
  std::size_t target = 0;
  bool epsilon = false;
  ActionLabel label;  // meaningful when !epsilon
  std::optional<std::size_t> switch_index;
};

// Member of a delay closure: a location together with the zone it occupies,
// extended by an auxiliary clock t (last index) measuring the delay since
// the closure was entered.
struct ClosureMember {
  std::size_t location = 0;
  Dbm zone_t;
  Span t_span;
};

struct Quiescence {
  bool enforced = false;  // no output reachable by delays and tau moves
  bool safe = false;      // delays of every length are possible
};

// ── Symbolic successor primitives ───────────────────────────────────────────

namespace zg {

inline bool apply(Dbm& d, const std::vector<DbmConstraint>& cs) {
  for (const auto& c : cs)
    if (!d.constrain(c.i, c.j, c.bound)) return false;
  return !d.empty();
}

// Fires s from zone d (which may carry extra trailing clocks); returns false
// if the guard or the target invariant cannot be met.
inline bool fire(const LoweredModel& m, const Dbm& d, const LoweredSwitch& s, Dbm& out) {
  out = d;
  if (!apply(out, s.guard)) return false;
  for (std::size_t x : s.resets) out.reset(x);
  return apply(out, m.invariants[s.target]);
}

inline Dbm initial_zone(const LoweredModel& m) {
  Dbm d = Dbm::zero(m.dim);
  apply(d, m.invariants[m.initial]);
  return d;
}

// Covers [0, inf) with the union of spans.
inline bool covers_all_delays(std::vector<Span> spans) {
  std::sort(spans.begin(), spans.end());
  Span acc;
  bool have = false;
  for (const auto& s : spans) {
    if (!have) {
      if (s.lo != 0 || s.lo_strict) return false;
      acc = s;
      have = true;
      continue;
    }
    if (!spans_connect(acc, s)) return false;
    acc = span_hull(acc, s);
  }
  return have && acc.unbounded();
}

// Merges spans into pairwise disconnected intervals, sorted.
inline std::vector<Span> coalesce(std::vector<Span> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<Span> out;
  for (const auto& s : spans) {
    if (!out.empty() && spans_connect(out.back(), s)) {
      out.back() = span_hull(out.back(), s);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

// Every interval of `inner` lies within some interval of coalesce(outer).
inline bool spans_cover(const std::vector<Span>& inner, const std::vector<Span>& outer) {
  auto merged = coalesce(outer);
  for (const auto& s : coalesce(inner)) {
    bool ok = std::any_of(merged.begin(), merged.end(), [&](const Span& o) { return span_leq(s, o); });
    if (!ok) return false;
  }
  return true;
}

}  // namespace zg

// ── Backward region analysis ────────────────────────────────────────────────
//
// Per location, the valuations that can still produce an output (through
// delays and tau switches) and those that can let unbounded time pass.
// Zones may carry extra trailing clocks; the model constraints only touch the
// first m.dim ones.

namespace zg {

inline Dbm invariant_zone(const LoweredModel& m, std::size_t loc, std::size_t dim) {
  Dbm d = Dbm::universal(dim);
  apply(d, m.invariants[loc]);
  return d;
}

// Valuations before s whose successor lies in `after`.
inline Federation pre_switch(const LoweredModel& m, const LoweredSwitch& s, const Federation& after) {
  Federation out(after.dim());
  for (Dbm d : after.parts()) {
    if (!apply(d, m.invariants[s.target])) continue;
    bool ok = true;
    for (std::size_t x : s.resets) {
      ok = d.constrain(x, 0, Bound::zero()) && d.constrain(0, x, Bound::zero());
      if (!ok) break;
      d.free(x);
    }
    if (!ok || !apply(d, s.guard) || !apply(d, m.invariants[s.source])) continue;
    out.add(std::move(d));
  }
  return out;
}

// Valuations of loc that reach f by waiting.
inline Federation pre_time(const LoweredModel& m, std::size_t loc, const Federation& f) {
  Federation out(f.dim());
  for (Dbm d : f.parts()) {
    d.down();
    if (apply(d, m.invariants[loc])) out.add(std::move(d));
  }
  return out;
}

// Least fixpoint: base[l] plus everything that reaches it through delays and
// tau switches.
inline std::vector<Federation> tau_backward(const LoweredModel& m, std::vector<Federation> reach) {
  std::size_t n = reach.size();
  for (std::size_t l = 0; l < n; ++l) reach[l] = pre_time(m, l, reach[l]);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& sw : m.switches) {
      if (!sw.action.is_tau()) continue;
      Federation add = pre_time(m, sw.source, pre_switch(m, sw, reach[sw.target]));
      if (add.empty() || reach[sw.source].includes(add)) continue;
      reach[sw.source].add(add);
      changed = true;
    }
  }
  return reach;
}

inline std::vector<Federation> can_output_regions(const LoweredModel& m) {
  std::size_t n = m.tioa.locations.size();
  std::vector<Federation> base(n, Federation(m.dim));
  for (const auto& sw : m.switches) {
    if (!sw.action.is_output()) continue;
    base[sw.source].add(pre_switch(m, sw, Federation::of(Dbm::universal(m.dim))));
  }
  return tau_backward(m, std::move(base));
}

// Greatest fixpoint W: from every valuation of W some run of delays and tau
// switches spends at least one time unit and ends in W again. Elapsed time is
// measured with an extra clock at index m.dim.
inline std::vector<Federation> unbounded_delay_regions(const LoweredModel& m) {
  std::size_t n = m.tioa.locations.size();
  std::size_t t = m.dim;
  std::vector<Federation> w;
  for (std::size_t l = 0; l < n; ++l) w.push_back(Federation::of(invariant_zone(m, l, m.dim)));
  while (true) {
    std::vector<Federation> base(n, Federation(m.dim + 1));
    for (std::size_t l = 0; l < n; ++l) {
      for (const auto& p : w[l].parts()) {
        Dbm d = p.with_zero_clock();
        d.free(t);
        if (d.constrain(0, t, Bound::le(-1))) base[l].add(std::move(d));
      }
    }
    auto reach = tau_backward(m, std::move(base));
    bool changed = false;
    for (std::size_t l = 0; l < n; ++l) {
      Federation next(m.dim);
      for (Dbm d : reach[l].parts()) {
        if (d.constrain(t, 0, Bound::zero()) && d.constrain(0, t, Bound::zero())) next.add(d.without_last_clock());
      }
      next = next.intersected(w[l]);
      if (!next.includes(w[l])) changed = true;
      w[l] = std::move(next);
    }
    if (!changed) return w;
  }
}

}  // namespace zg

// ── Input/output labelled zone graph ────────────────────────────────────────

class Iolzg {
 public:
  Iolzg(std::shared_ptr<const LoweredModel> model, std::int64_t k)
      : model_(std::move(model)), k_(k), clocks_(make_clock_names(model_->tioa.clocks)) {
    has_tau_cycle_ = detail::has_tau_cycle(model_->tioa);
  }

  const LoweredModel& model() const { return *model_; }
  const Tioa& tioa() const { return model_->tioa; }
  std::shared_ptr<const LoweredModel> model_ptr() const { return model_; }
  std::int64_t k() const { return k_; }
  const ClockNames& clock_names() const { return clocks_; }

  const std::vector<SymbolicState>& states() const { return states_; }
  const std::vector<ZgEdge>& edges() const { return edges_; }
  const std::vector<std::size_t>& out_edges(std::size_t s) const { return out_[s]; }
  std::size_t initial() const { return 0; }

  Zone zone(const SymbolicState& s) const { return Zone(s.zone, clocks_); }
  const std::string& location_name(std::size_t l) const { return model_->tioa.locations[l].name; }

  std::optional<std::size_t> find(const SymbolicState& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  SymbolicState normalized(std::size_t loc, Dbm d) const {
    d.k_normalize(k_);
    return {loc, std::move(d)};
  }

  SymbolicState initial_state() const { return normalized(model_->initial, zg::initial_zone(*model_)); }

  // Delay closure of s: every location reachable by delays and tau switches,
  // each with the zone it occupies and the delays (t-span) at which it does.
  const std::vector<ClosureMember>& closure(const SymbolicState& s) const {
    auto it = closure_cache_.find(s);
    if (it != closure_cache_.end()) return it->second;
    return closure_cache_.emplace(s, compute_closure(s)).first->second;
  }

  // Valuations of s from which no output can ever be produced.
  Federation enforced_part(const SymbolicState& s) const {
    return Federation::of(s.zone).minus(regions().can_output[s.location]);
  }

  // Valuations of s from which time can pass without bound.
  Federation safe_part(const SymbolicState& s) const {
    return Federation::of(s.zone).intersected(regions().unbounded[s.location]);
  }

  // A flag holds when it holds for some valuation of the zone.
  Quiescence classify(const SymbolicState& s) const {
    auto it = quiescence_cache_.find(s);
    if (it != quiescence_cache_.end()) return it->second;
    Quiescence q{!enforced_part(s).empty(), !safe_part(s).empty()};
    quiescence_cache_.emplace(s, q);
    return q;
  }

  // Zero-delay tau successors of s, transitively, including s itself.
  const std::vector<SymbolicState>& tau_closure(const SymbolicState& s) const {
    auto it = tau_cache_.find(s);
    if (it != tau_cache_.end()) return it->second;
    return tau_cache_.emplace(s, compute_tau_closure(s)).first->second;
  }

  std::vector<SymbolicState> compute_tau_closure(const SymbolicState& s) const {
    std::vector<SymbolicState> out{s};
    std::unordered_set<SymbolicState, SymbolicStateHash> seen{s};
    for (std::size_t i = 0; i < out.size() && i < kClosureLimit; ++i) {
      for (std::size_t si : model_->outgoing[out[i].location]) {
        const auto& sw = model_->switches[si];
        if (!sw.action.is_tau()) continue;
        Dbm tmp;
        if (!zg::fire(*model_, out[i].zone, sw, tmp)) continue;
        SymbolicState n = normalized(sw.target, std::move(tmp));
        if (seen.insert(n).second) out.push_back(std::move(n));
      }
    }
    return out;
  }

  // Used by build_iolzg.
  std::size_t add_state(SymbolicState s, bool& fresh) {
    auto it = index_.find(s);
    if (it != index_.end()) {
      fresh = false;
      return it->second;
    }
    fresh = true;
    std::size_t id = states_.size();
    index_.emplace(s, id);
    states_.push_back(std::move(s));
    out_.emplace_back();
    return id;
  }

  void add_edge(ZgEdge e) {
    out_[e.source].push_back(edges_.size());
    edges_.push_back(std::move(e));
  }

  bool has_tau_cycle() const { return has_tau_cycle_; }

  static constexpr std::size_t kClosureLimit = 100000;

 private:
  struct Regions {
    std::vector<Federation> can_output;
    std::vector<Federation> unbounded;
  };

  const Regions& regions() const {
    if (!regions_) regions_ = std::make_shared<Regions>(Regions{zg::can_output_regions(*model_), zg::unbounded_delay_regions(*model_)});
    return *regions_;
  }

  std::vector<ClosureMember> compute_closure(const SymbolicState& s) const {
    const LoweredModel& m = *model_;
    std::size_t t = m.dim;
    std::vector<std::int64_t> ceilings;
    if (has_tau_cycle_) {
      // Cycles of tau switches: abstract t as well so the closure stays finite.
      std::int64_t tk = (static_cast<std::int64_t>(m.tioa.locations.size()) + 1) * (k_ + 1);
      ceilings.assign(m.dim + 1, k_);
      ceilings[t] = tk;
    }
    std::vector<ClosureMember> members;
    std::unordered_set<SymbolicState, SymbolicStateHash> seen;
    std::deque<SymbolicState> work;
    SymbolicState start{s.location, s.zone.with_zero_clock()};
    seen.insert(start);
    work.push_back(std::move(start));
    while (!work.empty() && seen.size() < kClosureLimit) {
      SymbolicState e = std::move(work.front());
      work.pop_front();
      Dbm d = e.zone;
      d.up();
      if (!zg::apply(d, m.invariants[e.location])) continue;
      if (!ceilings.empty()) d.extrapolate(ceilings);
      bool dup = std::any_of(members.begin(), members.end(), [&](const ClosureMember& cm) {
        return cm.location == e.location && cm.zone_t == d;
      });
      if (!dup) members.push_back({e.location, d, d.span_of(t)});
      for (std::size_t si : m.outgoing[e.location]) {
        const auto& sw = m.switches[si];
        if (!sw.action.is_tau()) continue;
        Dbm nd;
        if (!zg::fire(m, d, sw, nd)) continue;
        if (!ceilings.empty()) nd.extrapolate(ceilings);
        SymbolicState n{sw.target, std::move(nd)};
        if (seen.insert(n).second) work.push_back(std::move(n));
      }
    }
    return members;
  }

  std::shared_ptr<const LoweredModel> model_;
  std::int64_t k_;
  ClockNames clocks_;
  bool has_tau_cycle_ = false;
  std::vector<SymbolicState> states_;
  std::vector<ZgEdge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::unordered_map<SymbolicState, std::size_t, SymbolicStateHash> index_;
  mutable std::unordered_map<SymbolicState, std::vector<ClosureMember>, SymbolicStateHash> closure_cache_;
  mutable std::unordered_map<SymbolicState, Quiescence, SymbolicStateHash> quiescence_cache_;
  mutable std::shared_ptr<const Regions> regions_;
  mutable std::unordered_map<SymbolicState, std::vector<SymbolicState>, SymbolicStateHash> tau_cache_;
};

// Builds the reachable zone graph with every zone k-normalized; k defaults to
// the largest constant of the model.
inline Iolzg build_iolzg(const Tioa& a, std::optional<std::int64_t> k = std::nullopt) {
  auto model = std::make_shared<const LoweredModel>(lower(a));
  std::int64_t ceiling = k.value_or(model->max_constant);
  if (ceiling < model->max_constant) {
    throw Error(Errc::InvalidCeiling, "ceiling " + std::to_string(ceiling) + " is below the largest constant " +
                                          std::to_string(model->max_constant));
  }
  Iolzg g(model, ceiling);
  const LoweredModel& m = *model;
  bool fresh = false;
  g.add_state(g.initial_state(), fresh);
  for (std::size_t cur = 0; cur < g.states().size(); ++cur) {
    SymbolicState s = g.states()[cur];
    Dbm d = s.zone;
    d.up();
    if (zg::apply(d, m.invariants[s.location])) {
      std::size_t id = g.add_state(g.normalized(s.location, std::move(d)), fresh);
      g.add_edge({cur, id, true, ActionLabel::tau(), std::nullopt});
    }
    for (std::size_t si : m.outgoing[s.location]) {
      const auto& sw = m.switches[si];
      Dbm nd;
      if (!zg::fire(m, s.zone, sw, nd)) continue;
      std::size_t id = g.add_state(g.normalized(sw.target, std::move(nd)), fresh);
      g.add_edge({cur, id, false, sw.action, sw.index});
    }
  }
  return g;
}

// Closure as (state, t-span) pairs with the auxiliary clock projected away.
inline std::vector<std::pair<SymbolicState, Span>> delay_closure(const Iolzg& g, const SymbolicState& s) {
  std::vector<std::pair<SymbolicState, Span>> out;
  for (const auto& m : g.closure(s)) out.emplace_back(g.normalized(m.location, m.zone_t.without_last_clock()), m.t_span);
  return out;
}

inline Quiescence classify_quiescence(const Iolzg& g, const SymbolicState& s) { return g.classify(s); }

// ── Input-enabledness and independent progress ─────────────────────────────

enum class Enabledness { Weak, Strong };

struct InputViolation {
  std::size_t state = 0;
  std::string input;
};

// For every state and input, the delays at which the input can be accepted
// must cover the delays at which the state is alive. The weak variant allows
// tau moves before the input; the strong one does not.
inline std::vector<InputViolation> check_input_enabled(const Iolzg& g, Enabledness mode) {
  std::vector<InputViolation> out;
  const LoweredModel& m = g.model();
  for (std::size_t sid = 0; sid < g.states().size(); ++sid) {
    const auto& members = g.closure(g.states()[sid]);
    std::vector<const ClosureMember*> used;
    for (const auto& cm : members) {
      used.push_back(&cm);
      if (mode == Enabledness::Strong) break;
    }
    std::vector<Span> alive;
    for (const auto* cm : used) alive.push_back(cm->t_span);
    for (const auto& in : g.tioa().inputs) {
      std::vector<Span> ok;
      for (const auto* cm : used) {
        for (std::size_t si : m.outgoing[cm->location]) {
          const auto& sw = m.switches[si];
          if (!sw.action.is_input() || sw.action.name != in) continue;
          Dbm tmp;
          if (zg::fire(m, cm->zone_t, sw, tmp)) ok.push_back(tmp.span_of(m.dim));
        }
      }
      if (!zg::spans_cover(alive, ok)) out.push_back({sid, in});
    }
  }
  return out;
}

// States with a valuation that can neither let time pass forever nor reach
// an output.
inline std::vector<std::size_t> check_independent_progress(const Iolzg& g) {
  std::vector<std::size_t> out;
  for (std::size_t sid = 0; sid < g.states().size(); ++sid) {
    const auto& s = g.states()[sid];
    if (!g.enforced_part(s).minus(g.safe_part(s)).empty()) out.push_back(sid);
  }
  return out;
}

// ── DOT export ──────────────────────────────────────────────────────────────

inline std::string export_dot(const Iolzg& g) {
  auto esc = [](const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c == '"' || c == '\\') r += '\\';
      r += c;
    }
    return r;
  };
  std::ostringstream os;
  os << "digraph \"" << esc(g.tioa().name) << "\" {\n";
  os << "  node [shape=box];\n";
  for (std::size_t i = 0; i < g.states().size(); ++i) {
    const auto& s = g.states()[i];
    os << "  s" << i << " [label=\"" << esc(g.location_name(s.location) + " | " + g.zone(s).to_constraint_string())
       << "\"";
    if (i == g.initial()) os << ", peripheries=2";
    os << "];\n";
  }
  for (const auto& e : g.edges()) {
    os << "  s" << e.source << " -> s" << e.target << " [label=\""
       << esc(e.epsilon ? std::string("eps") : e.label.to_string()) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace ltioco
