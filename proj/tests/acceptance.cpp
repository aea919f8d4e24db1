// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "support.hpp"

using namespace ltioco;
using ltioco::testing::fixture_names;
using ltioco::testing::load_fixture;
using ltioco::testing::ModelGenerator;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failed expectations without stopping at the first one.
class Probe {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    pass_ = false;
    if (notes_.size() < 5) notes_.push_back(what);
  }
  Outcome done(const std::string& summary) const {
    Outcome o{pass_, summary};
    for (const auto& n : notes_) o.detail += "\n      " + n;
    return o;
  }

 private:
  bool pass_ = true;
  std::vector<std::string> notes_;
};

oracle::OracleConfig any_constraints() {
  oracle::OracleConfig c;
  c.closed_only = false;
  return c;
}

Verdict symbolic(const Tioa& impl, const Tioa& spec, ConformanceRelation rel, std::size_t depth, bool all = false) {
  CheckConfig cfg;
  cfg.relation = rel;
  cfg.depth = depth;
  cfg.all_witnesses = all;
  return check(build_iolzg(impl), build_iolzg(spec), cfg);
}

bool has_step(const std::vector<SpanStep>& v, const std::string& r) {
  return std::any_of(v.begin(), v.end(), [&](const SpanStep& s) { return s.to_string() == r; });
}

// Random population shared by the property-based criteria.
struct Pair {
  Tioa impl, spec;
};

const std::vector<Pair>& population() {
  static const std::vector<Pair> pairs = [] {
    std::vector<Pair> out;
    ModelGenerator gen(20261015);
    for (int i = 0; i < 200; ++i) {
      Tioa spec = gen.next("spec" + std::to_string(i));
      Tioa impl = (i % 2) ? gen.mutate(spec, "impl" + std::to_string(i)) : gen.next("impl" + std::to_string(i));
      out.push_back({std::move(impl), std::move(spec)});
    }
    return out;
  }();
  return pairs;
}

std::vector<Pair> fixture_pairs() {
  std::vector<Tioa> all;
  for (const auto& f : fixture_names()) all.push_back(load_fixture(f));
  std::vector<Pair> out;
  for (const auto& i : all)
    for (const auto& s : all) {
      auto sorted = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        return v;
      };
      if (sorted(i.inputs) == sorted(s.inputs) && sorted(i.outputs) == sorted(s.outputs)) out.push_back({i, s});
    }
  return out;
}

// ── Criteria ────────────────────────────────────────────────────────────────

Outcome c1_dbm_matrix() {
  Zone z = Zone::from_constraint({{"x", "", Cmp::GreaterEq, 1}, {"x", "", Cmp::LessEq, 2}, {"y", "", Cmp::LessEq, 2}},
                                 make_clock_names({"x", "y"}));
  const std::string want =
      "     0_C      x         y\n"
      "0_C  (0, <=)  (-1, <=)  (0, <=)\n"
      "x    (2, <=)  (0, <=)   inf\n"
      "y    (2, <=)  inf       (0, <=)\n";
  Probe p;
  p.expect(z.to_matrix_string() == want, "matrix was:\n" + z.to_matrix_string());
  return p.done("raw matrix of 1<=x<=2 & y<=2 matches entry for entry");
}

Outcome c2_zone_graph() {
  Iolzg g = build_iolzg(load_fixture("machine.ta"), 20);
  auto has = [&](const std::string& loc, const std::vector<ZoneAtom>& atoms) {
    Zone z = Zone::from_constraint(atoms, g.clock_names()).canonicalize();
    return g.find(SymbolicState{*g.tioa().location_index(loc), z.dbm()}).has_value();
  };
  Probe p;
  p.expect(has("idle", {{"x", "", Cmp::LessEq, 20}, {"x", "y", Cmp::Equal, 0}}), "missing <idle, x<=20 & x==y>");
  p.expect(has("as", {{"x", "", Cmp::LessEq, 10}, {"y", "", Cmp::LessEq, 20}, {"y", "x", Cmp::GreaterEq, 10}}),
           "missing <as, x<=10 & y<=20 & y-x>=10>");
  return p.done(std::to_string(g.states().size()) + " states; both required zones present");
}

Outcome c3_quiescence_table() {
  const std::vector<std::tuple<std::string, bool, bool>> want = {{"quiet_a1.ta", true, true},
                                                                 {"quiet_a2.ta", false, true},
                                                                 {"quiet_a3.ta", false, true},
                                                                 {"quiet_a4.ta", false, false},
                                                                 {"quiet_a5.ta", false, false}};
  Probe p;
  std::string row;
  for (const auto& [f, enforced, safe] : want) {
    Iolzg g = build_iolzg(load_fixture(f));
    Quiescence q = g.classify(g.states()[g.initial()]);
    row += " " + f.substr(6, 2) + "=" + (q.enforced ? "E" : "-") + (q.safe ? "S" : "-");
    p.expect(q.enforced == enforced && q.safe == safe, f + " classified wrongly");
  }
  return p.done("initial states:" + row);
}

Outcome c4_discrimination() {
  Probe p;
  Tioa impl = load_fixture("quiet_a3.ta");
  for (const char* f : {"quiet_a4.ta", "quiet_a5.ta"}) {
    Tioa spec = load_fixture(f);
    std::string n = "quiet_a3.ta vs " + std::string(f) + ": ";
    p.expect(symbolic(impl, spec, ConformanceRelation::TiocoDelta, 8).pass, n + "symbolic tioco_delta should pass");
    p.expect(!symbolic(impl, spec, ConformanceRelation::Ltioco, 8).pass, n + "symbolic ltioco should fail");
    p.expect(oracle::check(impl, spec, oracle::OracleRelation::TiocoDelta, 6).pass, n + "oracle tioco_delta should pass");
    p.expect(!oracle::check(impl, spec, oracle::OracleRelation::Ltioco, 6).pass, n + "oracle ltioco should fail");
  }
  return p.done("a3 against a4 and a5: tioco_delta PASS, ltioco FAIL, in both engines");
}

Outcome c5_output_window() {
  Probe p;
  auto ts = oracle::discretize(load_fixture("delay_a0.ta"));
  std::string outs;
  for (const auto& o : oracle::observe(ts, oracle::initial_set(ts), oracle::OracleRelation::TiocoDelta, {}))
    if (o.kind == oracle::Observation::Kind::Output) outs += (outs.empty() ? "" : " ") + o.to_string();
  p.expect(outs == "(1, !o) (2, !o)", "out after epsilon was {" + outs + "}");
  p.expect(oracle::check(load_fixture("delay_a0.ta"), load_fixture("delay_a1.ta"), oracle::OracleRelation::TiocoDelta, 6)
               .pass,
           "a0 tioco_delta a1 should pass");
  auto v = oracle::check(load_fixture("delay_a2.ta"), load_fixture("delay_a3.ta"), oracle::OracleRelation::TiocoDelta, 6);
  bool delta = std::any_of(v.offending.begin(), v.offending.end(),
                           [](const oracle::Observation& o) { return o.to_string() == "delta"; });
  p.expect(!v.pass && delta, "a2 vs a3 should fail with delta");
  return p.done("out(a0 after eps) = {" + outs + "}; a0 vs a1 PASS; a2 vs a3 FAIL on delta");
}

Outcome c6_unsafe_machine() {
  Probe p;
  Tioa impl = load_fixture("a1_impl.ta"), spec = load_fixture("a1prime_spec.ta");
  Verdict v = symbolic(impl, spec, ConformanceRelation::Ltioco, 3, true);
  p.expect(!v.pass, "symbolic check should fail");
  const Witness* w = nullptr;
  for (const auto& x : v.witnesses)
    if (render_trace(x.trace) == "(>20,inf) ?press, [0,20) ?press") w = &x;
  p.expect(w != nullptr, "no witness with trace (>20,inf) ?press, [0,20) ?press");
  if (w) {
    const Span& a = w->trace[0].span;
    const Span& b = w->trace[1].span;
    p.expect(a.lo == 20 && a.lo_strict && !a.up, "first span endpoints");
    p.expect(b.lo == 0 && !b.lo_strict && b.up == 20 && b.up_strict, "second span endpoints");
    p.expect(has_step(w->offending, "(0,inf) delta_S"), "offending lacks (0,inf) delta_S: " + render_out(w->offending));
  }
  p.expect(oracle::check(spec, impl, oracle::OracleRelation::TiocoDelta, 6, any_constraints()).pass,
           "oracle: relaxed spec tioco_delta machine should pass");
  auto d = oracle::check(spec, impl, oracle::OracleRelation::TiocoDelays, 6, any_constraints());
  p.expect(!d.pass, "oracle: relaxed spec tioco_Delta machine should fail");
  std::string off = w ? render_out(w->offending) : "";
  return p.done("witness (>20,inf) ?press, [0,20) ?press with offending " + off + "; oracle tioco_delta PASS, " +
                "tioco_Delta FAIL");
}

Outcome c7_span_traces() {
  Probe p;
  auto render = [](const std::set<SpanTrace>& ts) {
    std::set<std::string> r;
    for (const auto& t : ts) r.insert(render_trace(t));
    return r;
  };
  auto machine = render(enumerate_span_traces(build_iolzg(load_fixture("machine.ta")), 3, false));
  const std::string clipped = "(>20,inf) ?press, [0,20) ?press, [10,20] ?sugar";
  const std::string unclipped = "(>20,inf) ?press, [0,20) ?press, (10,inf) ?sugar";
  p.expect(machine.count(clipped) == 1, "machine lacks " + clipped);
  p.expect(machine.count(unclipped) == 0, "machine should not produce the unclipped sugar span");
  auto free = render(enumerate_span_traces(build_iolzg(load_fixture("a1_impl.ta")), 3, false));
  p.expect(free.count(unclipped) == 1, "variant without the invariant lacks " + unclipped);
  return p.done("machine: " + clipped + " (invariant-clipped); without the invariant: " + unclipped);
}

Outcome c8_equivalence() {
  std::size_t disagree = 0, sym_pass = 0;
  std::vector<std::string> notes;
  const auto& pop = population();
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& [impl, spec] = pop[i];
    bool sym = symbolic(impl, spec, ConformanceRelation::Ltioco, 4).pass;
    // Half-unit grid: outputs enabled only strictly between integers stay visible.
    oracle::OracleConfig oc;
    oc.ceiling = 4;
    oc.resolution = 2;
    auto ov = oracle::check(impl, spec, oracle::OracleRelation::Ltioco, 4, oc);
    sym_pass += sym;
    if (sym != ov.pass) {
      ++disagree;
      if (notes.size() < 5) {
        std::ostringstream os;
        os << "pair " << i << ": symbolic " << (sym ? "PASS" : "FAIL") << ", oracle " << (ov.pass ? "PASS" : "FAIL");
        if (!ov.pass) os << " at [" << oracle::render_timed(ov.witness, oc.resolution) << "]";
        notes.push_back(os.str());
      }
    }
  }
  Outcome o;
  o.pass = disagree == 0;
  o.detail = std::to_string(pop.size()) + " pairs, " + std::to_string(sym_pass) + " symbolic PASS, " +
             std::to_string(disagree) + " disagreements (oracle grid 1/2)";
  for (const auto& n : notes) o.detail += "\n      " + n;
  return o;
}

// Adds an unguarded self-loop for every input at every location, so the result is input-enabled.
Tioa input_complete(Tioa a) {
  for (const auto& l : a.locations)
    for (const auto& in : a.inputs) {
      Switch sw;
      sw.source = l.name;
      sw.target = l.name;
      sw.action = ActionLabel::input(in);
      a.switches.push_back(sw);
    }
  a.name += "_complete";
  return a;
}

bool meets_hypotheses(const Tioa& impl) {
  Iolzg g = build_iolzg(impl);
  return check_input_enabled(g, Enabledness::Weak).empty() && check_independent_progress(g).empty();
}

// The implication is claimed for input-enabled implementations with independent progress; the
// verdict is taken over those pairs, and violations on the remaining pairs are reported alongside.
Outcome c9_monotonicity() {
  std::size_t checked = 0, in_scope = 0, passes = 0, violations = 0, outside = 0;
  std::vector<std::string> notes, outside_notes;
  auto run = [&](const Tioa& impl, const Tioa& spec, const std::string& tag, const oracle::OracleConfig& oc,
                 std::size_t depth) {
    ++checked;
    bool premises = meets_hypotheses(impl);
    bool sym_l = symbolic(impl, spec, ConformanceRelation::Ltioco, depth).pass;
    bool sym_d = symbolic(impl, spec, ConformanceRelation::TiocoDelta, depth).pass;
    bool or_l = oracle::check(impl, spec, oracle::OracleRelation::Ltioco, depth, oc).pass;
    bool or_d = oracle::check(impl, spec, oracle::OracleRelation::TiocoDelta, depth, oc).pass;
    bool or_D = oracle::check(impl, spec, oracle::OracleRelation::TiocoDelays, depth, oc).pass;
    if (premises) {
      ++in_scope;
      passes += or_l;
    }
    if (!((sym_l && !sym_d) || (or_l && (!or_d || !or_D)))) return;
    std::string note = tag + ": symbolic ltioco/tioco_delta " + std::to_string(sym_l) + "/" + std::to_string(sym_d) +
                       ", oracle ltioco/tioco_delta/tioco_Delta " + std::to_string(or_l) + "/" +
                       std::to_string(or_d) + "/" + std::to_string(or_D);
    auto& count = premises ? violations : outside;
    auto& list = premises ? notes : outside_notes;
    ++count;
    if (list.size() < 5) list.push_back(note);
  };
  oracle::OracleConfig oc;
  oc.ceiling = 4;
  const auto& pop = population();
  for (std::size_t i = 0; i < pop.size(); ++i) {
    run(pop[i].impl, pop[i].spec, "pair " + std::to_string(i), oc, 4);
    run(input_complete(pop[i].impl), pop[i].spec, "completed pair " + std::to_string(i), oc, 4);
  }
  for (const auto& [impl, spec] : fixture_pairs()) run(impl, spec, impl.name + " vs " + spec.name, any_constraints(), 3);
  Outcome o;
  o.pass = violations == 0;
  o.detail = std::to_string(checked) + " pairs, " + std::to_string(in_scope) +
             " with input-enabled, independently progressing impl (" + std::to_string(passes) + " oracle ltioco PASS, " +
             std::to_string(violations) + " violations); " + std::to_string(outside) +
             " implication failures outside those hypotheses";
  for (const auto& n : notes) o.detail += "\n      violation " + n;
  for (const auto& n : outside_notes) o.detail += "\n      outside hypotheses " + n;
  return o;
}

Outcome c10_enforced_safe() {
  Probe p;
  std::size_t models = 0, states = 0;
  auto run = [&](const Tioa& a, const std::string& tag, const oracle::OracleConfig& oc) {
    Iolzg g = build_iolzg(a);
    if (!check_independent_progress(g).empty()) return;
    ++models;
    for (const auto& s : g.states()) {
      ++states;
      Quiescence q = g.classify(s);
      p.expect(!q.enforced || q.safe, tag + ": symbolic state enforced but not safe");
    }
    auto ts = oracle::discretize(a, oc);
    for (oracle::StateId s = 0; s < ts.size(); ++s) {
      ++states;
      p.expect(!ts.enforced(s) || ts.safe(s), tag + ": oracle state " + ts.describe(s) + " enforced but not safe");
    }
  };
  for (const auto& f : fixture_names()) run(load_fixture(f), f, any_constraints());
  oracle::OracleConfig oc;
  oc.ceiling = 4;
  for (const auto& [impl, spec] : population()) {
    run(impl, impl.name, oc);
    run(spec, spec.name, oc);
  }
  return p.done(std::to_string(models) + " independent-progress models, " + std::to_string(states) +
                " symbolic and discrete states, no enforced-only state");
}

Outcome c11_product_traces() {
  oracle::OracleConfig c = any_constraints();
  c.ceiling = 20;
  Tioa m = load_fixture("machine.ta"), u = load_fixture("customer.ta");
  auto composed = oracle::discretize(compose(m, u), c);
  auto prod = oracle::product(oracle::discretize(m, c), oracle::discretize(u, c));
  auto diff = oracle::trace_difference(composed, prod, 5, c);
  Probe p;
  p.expect(!diff.has_value(), diff ? "traces differ at " + oracle::render_timed(*diff) : "");
  return p.done("machine || customer: " + std::to_string(composed.size()) + " composed states, " +
                std::to_string(prod.size()) + " product states, equal traces up to length 5");
}

Outcome c12_compositionality() {
  Probe p;
  Tioa si = load_fixture("sender_impl.ta"), ss = load_fixture("sender_spec.ta");
  Tioa ri = load_fixture("receiver_impl.ta"), rs = load_fixture("receiver_spec.ta");
  for (const Tioa* a : {&si, &ss, &ri, &rs})
    p.expect(check_input_enabled(build_iolzg(*a), Enabledness::Weak).empty(), a->name + " is not input-enabled");
  p.expect(symbolic(si, ss, ConformanceRelation::Ltioco, 8).pass, "sender pair does not conform");
  p.expect(symbolic(ri, rs, ConformanceRelation::Ltioco, 8).pass, "receiver pair does not conform");
  Tioa ci = compose(si, ri), cs = compose(ss, rs);
  Verdict v = symbolic(ci, cs, ConformanceRelation::Ltioco, 8);
  p.expect(v.pass, "composed pair does not conform" + (v.witness ? ": " + render_trace(v.witness->trace) : ""));
  p.expect(oracle::check(ci, cs, oracle::OracleRelation::Ltioco, 6).pass, "oracle: composed pair does not conform");
  return p.done("sender and receiver pairs conform; their compositions conform (symbolic depth 8, oracle length 6)");
}

Outcome c13_time_properties() {
  Probe p;
  for (const auto& f : fixture_names()) {
    auto ts = oracle::discretize(load_fixture(f), any_constraints());
    auto s = oracle::time_properties(ts, false, ts.ceiling() + 2);
    p.expect(s.time_additivity && s.time_reflexivity && s.time_determinism, f + ": strong property violated");
  }
  auto zeno = oracle::discretize(load_fixture("zeno_tau.ta"));
  p.expect(!oracle::time_properties(zeno, true, 3).time_determinism, "weak zeno_tau keeps time determinism");
  return p.done(std::to_string(fixture_names().size()) + " fixtures satisfy all three strongly; weak zeno_tau breaks determinism");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"DBM matrix", c1_dbm_matrix},
      {"zone graph states", c2_zone_graph},
      {"quiescence table", c3_quiescence_table},
      {"discrimination", c4_discrimination},
      {"output window", c5_output_window},
      {"unsafe machine witness", c6_unsafe_machine},
      {"span traces", c7_span_traces},
      {"symbolic/oracle agreement", c8_equivalence},
      {"monotonicity", c9_monotonicity},
      {"enforced implies safe", c10_enforced_safe},
      {"composition traces", c11_product_traces},
      {"compositionality", c12_compositionality},
      {"time properties", c13_time_properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %2zu %-26s %s (%.2fs)  %s\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
