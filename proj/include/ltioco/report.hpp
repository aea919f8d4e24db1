#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "ltioco/conformance.hpp"
#include "ltioco/model.hpp"
#include "ltioco/oracle.hpp"
#include "ltioco/zonegraph.hpp"

// JSON reports. Field names are stable; objects keep insertion order so the
// text is byte-identical across runs.

namespace ltioco::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

inline Json envelope(const std::string& command, std::vector<std::string> inputs) {
  Json j;
  j["command"] = command;
  j["inputs"] = std::move(inputs);
  j["version"] = kVersion;
  return j;
}

inline Json to_json(const ValidationReport& r) {
  Json j;
  j["ok"] = r.ok();
  j["diagonal_free"] = r.diagonal_free;
  j["invariants_downward_closed"] = r.invariants_downward_closed;
  j["tau_cycle_free"] = r.tau_cycle_free;
  j["max_constant"] = r.max_constant;
  Json ps = Json::array();
  for (const auto& p : r.problems) {
    ps.push_back({{"severity", p.severity == Severity::Error ? "error" : "warning"},
                  {"element", p.element},
                  {"message", p.message}});
  }
  j["problems"] = std::move(ps);
  return j;
}

inline Json to_json(const std::vector<SpanStep>& steps) {
  Json a = Json::array();
  for (const auto& s : steps) a.push_back({{"span", s.span.to_string()}, {"label", s.label.to_string()}});
  return a;
}

inline Json to_json(const Witness& w) {
  Json j;
  j["trace"] = to_json(w.trace);
  j["offending"] = to_json(w.offending);
  j["impl_out"] = to_json(w.impl_out);
  j["spec_out"] = to_json(w.spec_out);
  return j;
}

inline Json to_json(const Verdict& v) {
  Json j;
  j["verdict"] = v.pass ? "pass" : "fail";
  j["witness"] = v.witness ? to_json(*v.witness) : Json(nullptr);
  if (!v.witnesses.empty()) {
    Json ws = Json::array();
    for (const auto& w : v.witnesses) ws.push_back(to_json(w));
    j["witnesses"] = std::move(ws);
  }
  j["warnings"] = v.warnings;
  j["stats"] = {{"pairs", v.stats.pairs}, {"traces", v.stats.traces}};
  return j;
}

inline Json to_json(const oracle::OracleVerdict& v) {
  Json j;
  j["verdict"] = v.pass ? "pass" : "fail";
  j["resolution"] = v.resolution;  // witness delays count steps of 1/resolution
  if (v.pass) {
    j["witness"] = nullptr;
  } else {
    Json t = Json::array();
    for (const auto& s : v.witness) t.push_back({{"delay", s.delay}, {"label", s.label.to_string()}});
    Json off = Json::array();
    for (const auto& o : v.offending) off.push_back(o.to_string(v.resolution));
    j["witness"] = {{"trace", std::move(t)}, {"offending", std::move(off)}};
  }
  j["stats"] = {{"nodes", v.nodes}};
  return j;
}

inline Json to_json(const Iolzg& g) {
  Json j;
  j["automaton"] = g.tioa().name;
  j["k"] = g.k();
  Json states = Json::array();
  for (std::size_t i = 0; i < g.states().size(); ++i) {
    const auto& s = g.states()[i];
    Quiescence q = g.classify(s);
    states.push_back({{"id", i},
                      {"location", g.location_name(s.location)},
                      {"zone", g.zone(s).to_constraint_string()},
                      {"enforced", q.enforced},
                      {"safe", q.safe}});
  }
  j["states"] = std::move(states);
  Json edges = Json::array();
  for (const auto& e : g.edges()) {
    edges.push_back({{"source", e.source},
                     {"target", e.target},
                     {"label", e.epsilon ? std::string("eps") : e.label.to_string()}});
  }
  j["edges"] = std::move(edges);
  return j;
}

}  // namespace ltioco::report
