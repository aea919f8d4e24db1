#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ltioco/bound.hpp"
#include "ltioco/error.hpp"

namespace ltioco {

enum class ActionKind { Input, Output, Tau };

inline constexpr std::string_view kTau = "tau";

struct ActionLabel {
  std::string name = std::string(kTau);
  ActionKind kind = ActionKind::Tau;

  static ActionLabel tau() { return {}; }
  static ActionLabel input(std::string n) { return {std::move(n), ActionKind::Input}; }
  static ActionLabel output(std::string n) { return {std::move(n), ActionKind::Output}; }

  bool is_tau() const { return kind == ActionKind::Tau; }
  bool is_input() const { return kind == ActionKind::Input; }
  bool is_output() const { return kind == ActionKind::Output; }

  std::string to_string() const {
    switch (kind) {
      case ActionKind::Input: return "?" + name;
      case ActionKind::Output: return "!" + name;
      case ActionKind::Tau: break;
    }
    return std::string(kTau);
  }

  auto operator<=>(const ActionLabel&) const = default;
};

enum class Relation { Less, LessEq, Equal, GreaterEq, Greater };

inline std::string_view relation_symbol(Relation r) {
  switch (r) {
    case Relation::Less: return "<";
    case Relation::LessEq: return "<=";
    case Relation::Equal: return "==";
    case Relation::GreaterEq: return ">=";
    case Relation::Greater: return ">";
  }
  return "?";
}

// "clock rel bound", or "clock - other rel bound" when other is set.
struct AtomicConstraint {
  std::string clock;
  std::string other;
  Relation relation = Relation::LessEq;
  std::int64_t bound = 0;

  bool is_diagonal() const { return !other.empty(); }
  bool is_strict() const { return relation == Relation::Less || relation == Relation::Greater; }

  std::string to_string() const {
    std::string lhs = is_diagonal() ? clock + " - " + other : clock;
    return lhs + " " + std::string(relation_symbol(relation)) + " " + std::to_string(bound);
  }

  auto operator<=>(const AtomicConstraint&) const = default;
};

struct ClockConstraint {
  std::vector<AtomicConstraint> conjuncts;

  bool is_true() const { return conjuncts.empty(); }

  std::string to_string() const {
    if (conjuncts.empty()) return "true";
    std::string s;
    for (std::size_t i = 0; i < conjuncts.size(); ++i) {
      if (i) s += " & ";
      s += conjuncts[i].to_string();
    }
    return s;
  }

  auto operator<=>(const ClockConstraint&) const = default;
};

inline ClockConstraint conjoin(const ClockConstraint& a, const ClockConstraint& b) {
  ClockConstraint c = a;
  c.conjuncts.insert(c.conjuncts.end(), b.conjuncts.begin(), b.conjuncts.end());
  return c;
}

struct Location {
  std::string name;
  ClockConstraint invariant;

  auto operator<=>(const Location&) const = default;
};

struct Switch {
  std::string source;
  std::string target;
  ClockConstraint guard;
  ActionLabel action;
  std::vector<std::string> resets;

  auto operator<=>(const Switch&) const = default;
};

// Timed input/output automaton.
struct Tioa {
  std::string name;
  std::vector<std::string> clocks;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<Location> locations;
  std::string initial;
  std::vector<Switch> switches;

  std::optional<std::size_t> location_index(std::string_view n) const {
    for (std::size_t i = 0; i < locations.size(); ++i)
      if (locations[i].name == n) return i;
    return std::nullopt;
  }

  // 1-based; 0 is the reference clock.
  std::optional<std::size_t> clock_index(std::string_view n) const {
    for (std::size_t i = 0; i < clocks.size(); ++i)
      if (clocks[i] == n) return i + 1;
    return std::nullopt;
  }

  bool is_input(std::string_view a) const { return std::find(inputs.begin(), inputs.end(), a) != inputs.end(); }
  bool is_output(std::string_view a) const { return std::find(outputs.begin(), outputs.end(), a) != outputs.end(); }

  // Visible labels, inputs first, each group in declared order.
  std::vector<ActionLabel> alphabet() const {
    std::vector<ActionLabel> out;
    for (const auto& i : inputs) out.push_back(ActionLabel::input(i));
    for (const auto& o : outputs) out.push_back(ActionLabel::output(o));
    return out;
  }

  bool operator==(const Tioa&) const = default;
};

// ── Validation ──────────────────────────────────────────────────────────────

enum class Severity { Error, Warning };

struct Problem {
  Severity severity = Severity::Error;
  std::string element;
  std::string message;
};

struct ValidationOptions {
  bool tau_cycles_are_errors = false;
};

struct ValidationReport {
  bool diagonal_free = true;
  bool invariants_downward_closed = true;
  std::int64_t max_constant = 0;
  bool tau_cycle_free = true;
  std::vector<Problem> problems;

  bool ok() const {
    return std::none_of(problems.begin(), problems.end(),
                        [](const Problem& p) { return p.severity == Severity::Error; });
  }
};

inline std::int64_t max_constant(const Tioa& a) {
  std::int64_t k = 0;
  auto scan = [&](const ClockConstraint& c) {
    for (const auto& at : c.conjuncts) k = std::max(k, at.bound < 0 ? -at.bound : at.bound);
  };
  for (const auto& l : a.locations) scan(l.invariant);
  for (const auto& s : a.switches) scan(s.guard);
  return k;
}

namespace detail {

inline bool has_tau_cycle(const Tioa& a) {
  std::size_t n = a.locations.size();
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& s : a.switches) {
    if (!s.action.is_tau()) continue;
    auto src = a.location_index(s.source), dst = a.location_index(s.target);
    if (src && dst) succ[*src].push_back(*dst);
  }
  std::vector<int> color(n, 0);
  // iterative DFS with explicit stack
  for (std::size_t root = 0; root < n; ++root) {
    if (color[root]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    color[root] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < succ[v].size()) {
        std::size_t w = succ[v][next++];
        if (color[w] == 1) return true;
        if (color[w] == 0) {
          color[w] = 1;
          stack.push_back({w, 0});
        }
      } else {
        color[v] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

template <class T>
bool has_duplicates(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) != v.end();
}

}  // namespace detail

inline ValidationReport validate(const Tioa& a, const ValidationOptions& opts = {}) {
  ValidationReport r;
  auto error = [&](std::string el, std::string msg) { r.problems.push_back({Severity::Error, std::move(el), std::move(msg)}); };
  auto warn = [&](std::string el, std::string msg) { r.problems.push_back({Severity::Warning, std::move(el), std::move(msg)}); };

  if (detail::has_duplicates(a.clocks)) error("clocks", "duplicate clock name");
  if (detail::has_duplicates(a.inputs)) error("inputs", "duplicate input name");
  if (detail::has_duplicates(a.outputs)) error("outputs", "duplicate output name");
  for (const auto& i : a.inputs)
    if (a.is_output(i)) error("action " + i, "declared both as input and as output");
  for (const auto& n : a.inputs)
    if (n == kTau) error("action tau", "tau is reserved for internal switches");
  for (const auto& n : a.outputs)
    if (n == kTau) error("action tau", "tau is reserved for internal switches");

  std::vector<std::string> locs;
  for (const auto& l : a.locations) locs.push_back(l.name);
  if (detail::has_duplicates(locs)) error("locations", "duplicate location name");
  if (a.locations.empty()) error("locations", "automaton has no location");
  if (!a.location_index(a.initial)) error("initial", "initial location '" + a.initial + "' is not declared");

  auto check_constraint = [&](const ClockConstraint& c, const std::string& where, bool invariant) {
    for (const auto& at : c.conjuncts) {
      if (!a.clock_index(at.clock)) error(where, "undeclared clock '" + at.clock + "'");
      if (at.is_diagonal()) {
        r.diagonal_free = false;
        error(where, "diagonal constraint '" + at.to_string() + "' is not supported");
        if (!a.clock_index(at.other)) error(where, "undeclared clock '" + at.other + "'");
      }
      if (at.bound < 0) error(where, "negative constant in '" + at.to_string() + "'");
      if (invariant && !(at.relation == Relation::Less || at.relation == Relation::LessEq)) {
        r.invariants_downward_closed = false;
        error(where, "invariant conjunct '" + at.to_string() + "' is not downward closed");
      }
    }
  };

  for (const auto& l : a.locations) check_constraint(l.invariant, "location " + l.name, true);

  for (std::size_t k = 0; k < a.switches.size(); ++k) {
    const Switch& s = a.switches[k];
    std::string where = "switch " + std::to_string(k) + " (" + s.source + " -> " + s.target + ")";
    if (!a.location_index(s.source)) error(where, "undeclared source location '" + s.source + "'");
    if (!a.location_index(s.target)) error(where, "undeclared target location '" + s.target + "'");
    check_constraint(s.guard, where, false);
    for (const auto& x : s.resets)
      if (!a.clock_index(x)) error(where, "undeclared reset clock '" + x + "'");
    switch (s.action.kind) {
      case ActionKind::Input:
        if (!a.is_input(s.action.name)) error(where, "'" + s.action.name + "' is not a declared input");
        break;
      case ActionKind::Output:
        if (!a.is_output(s.action.name)) error(where, "'" + s.action.name + "' is not a declared output");
        break;
      case ActionKind::Tau: break;
    }
  }

  r.max_constant = max_constant(a);
  r.tau_cycle_free = !detail::has_tau_cycle(a);
  if (!r.tau_cycle_free) {
    std::string msg = "tau switches form a cycle; delay closures may not terminate exactly";
    if (opts.tau_cycles_are_errors) {
      error("switches", msg);
    } else {
      warn("switches", msg);
    }
  }
  return r;
}

inline void require_valid(const Tioa& a) {
  ValidationReport r = validate(a);
  if (r.ok()) return;
  for (const auto& p : r.problems) {
    if (p.severity != Severity::Error) continue;
    Errc code = r.diagonal_free ? Errc::InvalidModel : Errc::DiagonalConstraint;
    throw Error(code, a.name + ": " + p.element + ": " + p.message);
  }
}

// ── Parallel composition ────────────────────────────────────────────────────

namespace detail {

inline bool intersects(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return std::any_of(a.begin(), a.end(), [&](const std::string& x) {
    return std::find(b.begin(), b.end(), x) != b.end();
  });
}

inline bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

inline ClockConstraint rename_clocks(const ClockConstraint& c, const std::map<std::string, std::string>& m) {
  ClockConstraint r = c;
  for (auto& at : r.conjuncts) {
    if (auto it = m.find(at.clock); it != m.end()) at.clock = it->second;
    if (auto it = m.find(at.other); it != m.end()) at.other = it->second;
  }
  return r;
}

}  // namespace detail

// Inputs and outputs of the operands are pairwise disjoint.
inline bool composable(const Tioa& a1, const Tioa& a2) {
  return !detail::intersects(a1.inputs, a2.inputs) && !detail::intersects(a1.outputs, a2.outputs);
}

// Clock renaming applied to the second operand of compose().
inline std::map<std::string, std::string> clock_renaming(const Tioa& a1, const Tioa& a2) {
  std::map<std::string, std::string> m;
  std::set<std::string> taken(a1.clocks.begin(), a1.clocks.end());
  taken.insert(a2.clocks.begin(), a2.clocks.end());
  for (const auto& c : a2.clocks) {
    if (!detail::contains(a1.clocks, c)) continue;
    std::string fresh = c + "_2";
    while (taken.count(fresh)) fresh += "_2";
    taken.insert(fresh);
    m[c] = fresh;
  }
  return m;
}

inline std::string product_location_name(const std::string& l1, const std::string& l2) { return l1 + "." + l2; }

// Syntactically reachable product. Shared actions synchronise into tau
// switches with conjoined guards and the union of resets.
inline Tioa compose(const Tioa& a1, const Tioa& a2_in) {
  if (!composable(a1, a2_in)) {
    throw Error(Errc::NotComposable, a1.name + " and " + a2_in.name + " share an input or an output");
  }
  require_valid(a1);
  require_valid(a2_in);

  auto ren = clock_renaming(a1, a2_in);
  Tioa a2 = a2_in;
  for (auto& c : a2.clocks)
    if (auto it = ren.find(c); it != ren.end()) c = it->second;
  for (auto& l : a2.locations) l.invariant = detail::rename_clocks(l.invariant, ren);
  for (auto& s : a2.switches) {
    s.guard = detail::rename_clocks(s.guard, ren);
    for (auto& x : s.resets)
      if (auto it = ren.find(x); it != ren.end()) x = it->second;
  }

  auto in_sigma = [](const Tioa& a, const std::string& n) { return a.is_input(n) || a.is_output(n); };

  Tioa p;
  p.name = a1.name + "_" + a2.name;
  p.clocks = a1.clocks;
  p.clocks.insert(p.clocks.end(), a2.clocks.begin(), a2.clocks.end());
  for (const auto& i : a1.inputs)
    if (!a2.is_output(i)) p.inputs.push_back(i);
  for (const auto& i : a2.inputs)
    if (!a1.is_output(i) && !detail::contains(p.inputs, i)) p.inputs.push_back(i);
  for (const auto& o : a1.outputs)
    if (!a2.is_input(o)) p.outputs.push_back(o);
  for (const auto& o : a2.outputs)
    if (!a1.is_input(o) && !detail::contains(p.outputs, o)) p.outputs.push_back(o);

  using Pair = std::pair<std::size_t, std::size_t>;
  std::map<Pair, std::size_t> index;
  std::deque<Pair> work;
  auto visit = [&](Pair q) {
    if (index.count(q)) return;
    index[q] = p.locations.size();
    const Location& l1 = a1.locations[q.first];
    const Location& l2 = a2.locations[q.second];
    p.locations.push_back({product_location_name(l1.name, l2.name), conjoin(l1.invariant, l2.invariant)});
    work.push_back(q);
  };
  Pair init{*a1.location_index(a1.initial), *a2.location_index(a2.initial)};
  visit(init);
  p.initial = p.locations.front().name;

  auto union_resets = [](std::vector<std::string> r, const std::vector<std::string>& more) {
    for (const auto& x : more)
      if (!detail::contains(r, x)) r.push_back(x);
    return r;
  };

  while (!work.empty()) {
    Pair q = work.front();
    work.pop_front();
    const std::string& l1 = a1.locations[q.first].name;
    const std::string& l2 = a2.locations[q.second].name;
    std::string src = p.locations[index[q]].name;

    for (const auto& s : a1.switches) {
      if (s.source != l1) continue;
      if (!s.action.is_tau() && in_sigma(a2, s.action.name)) continue;
      Pair t{*a1.location_index(s.target), q.second};
      visit(t);
      p.switches.push_back({src, p.locations[index[t]].name, s.guard, s.action, s.resets});
    }
    for (const auto& s : a2.switches) {
      if (s.source != l2) continue;
      if (!s.action.is_tau() && in_sigma(a1, s.action.name)) continue;
      Pair t{q.first, *a2.location_index(s.target)};
      visit(t);
      p.switches.push_back({src, p.locations[index[t]].name, s.guard, s.action, s.resets});
    }
    for (const auto& s1 : a1.switches) {
      if (s1.source != l1 || s1.action.is_tau() || !in_sigma(a2, s1.action.name)) continue;
      for (const auto& s2 : a2.switches) {
        if (s2.source != l2 || s2.action.is_tau() || s2.action.name != s1.action.name) continue;
        Pair t{*a1.location_index(s1.target), *a2.location_index(s2.target)};
        visit(t);
        p.switches.push_back({src, p.locations[index[t]].name, conjoin(s1.guard, s2.guard), ActionLabel::tau(),
                              union_resets(s1.resets, s2.resets)});
      }
    }
  }
  return p;
}

// ── Lowered form used by the symbolic engines ───────────────────────────────

struct DbmConstraint {
  std::size_t i = 0;
  std::size_t j = 0;
  Bound bound;
};

struct LoweredSwitch {
  std::size_t index = 0;
  std::size_t source = 0;
  std::size_t target = 0;
  std::vector<DbmConstraint> guard;
  ActionLabel action;
  std::vector<std::size_t> resets;
};

struct LoweredModel {
  Tioa tioa;
  std::size_t dim = 1;
  std::size_t initial = 0;
  std::vector<std::vector<DbmConstraint>> invariants;
  std::vector<LoweredSwitch> switches;
  std::vector<std::vector<std::size_t>> outgoing;
  std::int64_t max_constant = 0;
};

inline std::vector<DbmConstraint> lower_constraint(const Tioa& a, const ClockConstraint& c) {
  std::vector<DbmConstraint> out;
  for (const auto& at : c.conjuncts) {
    if (at.is_diagonal()) throw Error(Errc::DiagonalConstraint, "'" + at.to_string() + "' is a diagonal constraint");
    auto x = a.clock_index(at.clock);
    if (!x) throw Error(Errc::UnknownClock, "clock '" + at.clock + "' is not declared");
    std::int64_t r = at.bound;
    switch (at.relation) {
      case Relation::Less: out.push_back({*x, 0, Bound::lt(r)}); break;
      case Relation::LessEq: out.push_back({*x, 0, Bound::le(r)}); break;
      case Relation::Equal:
        out.push_back({*x, 0, Bound::le(r)});
        out.push_back({0, *x, Bound::le(-r)});
        break;
      case Relation::GreaterEq: out.push_back({0, *x, Bound::le(-r)}); break;
      case Relation::Greater: out.push_back({0, *x, Bound::lt(-r)}); break;
    }
  }
  return out;
}

inline LoweredModel lower(const Tioa& a) {
  require_valid(a);
  LoweredModel m;
  m.tioa = a;
  m.dim = a.clocks.size() + 1;
  m.initial = *a.location_index(a.initial);
  for (const auto& l : a.locations) m.invariants.push_back(lower_constraint(a, l.invariant));
  m.outgoing.resize(a.locations.size());
  for (std::size_t k = 0; k < a.switches.size(); ++k) {
    const Switch& s = a.switches[k];
    LoweredSwitch ls;
    ls.index = k;
    ls.source = *a.location_index(s.source);
    ls.target = *a.location_index(s.target);
    ls.guard = lower_constraint(a, s.guard);
    ls.action = s.action;
    for (const auto& x : s.resets) ls.resets.push_back(*a.clock_index(x));
    m.outgoing[ls.source].push_back(m.switches.size());
    m.switches.push_back(std::move(ls));
  }
  m.max_constant = max_constant(a);
  return m;
}

}  // namespace ltioco
