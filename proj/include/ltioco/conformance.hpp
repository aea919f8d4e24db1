#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ltioco/traces.hpp"
#include "ltioco/zonegraph.hpp"

namespace ltioco {

enum class ConformanceRelation {
  Ltioco,      // span traces with safe and enforced quiescence
  TiocoDelta,  // span traces with enforced quiescence only
};

inline QuiescenceMode quiescence_mode(ConformanceRelation r) {
  return r == ConformanceRelation::Ltioco ? QuiescenceMode::SafeAndEnforced : QuiescenceMode::EnforcedOnly;
}

struct CheckConfig {
  ConformanceRelation relation = ConformanceRelation::Ltioco;
  std::size_t depth = 8;
  // Keep exploring after the first failure and record every failing trace.
  bool all_witnesses = false;
  SpanPartition partition = SpanPartition::AfterSet;
};

struct Witness {
  SpanTrace trace;
  std::vector<SpanStep> offending;
  std::vector<SpanStep> impl_out;
  std::vector<SpanStep> spec_out;
};

struct CheckStats {
  std::size_t pairs = 0;   // distinct (impl set, spec set) pairs examined
  std::size_t traces = 0;  // span-trace prefixes expanded
};

struct Verdict {
  bool pass = true;
  std::optional<Witness> witness;  // lexicographically smallest failing trace
  std::vector<Witness> witnesses;  // all failing traces when requested
  std::vector<std::string> warnings;
  CheckStats stats;
};

inline void require_same_alphabet(const Tioa& impl, const Tioa& spec) {
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted(impl.inputs) != sorted(spec.inputs) || sorted(impl.outputs) != sorted(spec.outputs)) {
    throw Error(Errc::AlphabetMismatch, impl.name + " and " + spec.name + " have different inputs or outputs");
  }
}

inline std::vector<std::string> premise_warnings(const Iolzg& impl) {
  std::vector<std::string> w;
  auto ie = check_input_enabled(impl, Enabledness::Weak);
  if (!ie.empty()) {
    w.push_back("implementation is not input-enabled (" + std::to_string(ie.size()) + " state/input pairs, first: state " +
                std::to_string(ie.front().state) + " input " + ie.front().input + ")");
  }
  auto ip = check_independent_progress(impl);
  if (!ip.empty()) {
    w.push_back("implementation lacks independent progress (" + std::to_string(ip.size()) + " states, first: state " +
                std::to_string(ip.front()) + ")");
  }
  return w;
}

// Every span trace of the spec model up to cfg.depth visible steps is
// followed in both graphs; after each trace the implementation's output set
// must be covered by the spec model's.
inline Verdict check(const Iolzg& impl, const Iolzg& spec, const CheckConfig& cfg = {}) {
  require_same_alphabet(impl.tioa(), spec.tioa());
  Verdict v;
  v.warnings = premise_warnings(impl);
  QuiescenceMode mode = quiescence_mode(cfg.relation);

  using Key = std::tuple<StateSet, StateSet, std::vector<Quiet>>;
  std::map<Key, std::size_t> memo;
  std::set<std::pair<StateSet, StateSet>> seen_pairs;
  SpanTrace cur;
  bool stop = false;

  auto rec = [&](auto&& self, const StateSet& is, const StateSet& ss, std::size_t remaining,
                 const std::vector<Quiet>& block) -> void {
    if (stop || is.empty()) return;
    ++v.stats.traces;
    if (seen_pairs.emplace(is, ss).second) ++v.stats.pairs;
    auto io = out_set(impl, is, mode);
    auto so = out_set(spec, ss, mode);
    std::vector<SpanStep> offending;
    if (!out_leq(io, so, &offending)) {
      Witness w{cur, offending, io, so};
      v.pass = false;
      if (!v.witness) v.witness = w;
      if (cfg.all_witnesses) {
        v.witnesses.push_back(std::move(w));
      } else {
        stop = true;
        return;
      }
    }
    if (!cfg.all_witnesses) {
      Key key{is, ss, block};
      auto it = memo.find(key);
      if (it != memo.end() && it->second >= remaining) return;
      memo[key] = remaining;
    }
    std::vector<std::pair<SpanStep, StateSet>> steps;
    if (remaining > 0) steps = visible_steps(spec, ss, cfg.partition);
    for (auto& d : delta_steps(spec, ss, mode, block)) steps.push_back(std::move(d));
    for (auto& [step, snext] : steps) {
      StateSet inext = after(impl, is, step);
      cur.push_back(step);
      if (step.label.is_delta()) {
        auto b = block;
        b.push_back(step.label.quiet);
        self(self, inext, snext, remaining, b);
      } else {
        self(self, inext, snext, remaining - 1, {});
      }
      cur.pop_back();
      if (stop) return;
    }
  };
  rec(rec, initial_set(impl), initial_set(spec), cfg.depth, {});
  return v;
}

inline std::string render_out(const std::vector<SpanStep>& out) {
  std::string s = "{";
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i) s += ", ";
    s += "(" + out[i].span.to_string() + ", " + out[i].label.to_string() + ")";
  }
  return s + "}";
}

inline std::string explain(const Verdict& v) {
  std::ostringstream os;
  if (v.pass) {
    os << "PASS\n";
  } else {
    const Witness& w = *v.witness;
    os << "FAIL\n";
    os << "  trace:     " << (w.trace.empty() ? std::string("(empty)") : render_trace(w.trace)) << '\n';
    os << "  offending: " << render_out(w.offending) << '\n';
    os << "  impl out:  " << render_out(w.impl_out) << '\n';
    os << "  spec out:  " << render_out(w.spec_out) << '\n';
  }
  for (const auto& w : v.warnings) os << "  warning: " << w << '\n';
  return os.str();
}

}  // namespace ltioco
