// ltioco: command-line front end.
//
// Exit codes: 0 success / pass, 1 conformance failure, 2 invalid input.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ltioco/ltioco.hpp"
#include "ltioco/report.hpp"

using namespace ltioco;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kInvalid = 2;

void emit(const report::Json& j) { std::cout << j.dump(2) << '\n'; }

Tioa load_valid(const std::string& path) {
  Tioa a = load_model(path);
  require_valid(a);
  return a;
}

int cmd_validate(const std::string& file, bool json) {
  Tioa a = load_model(file);
  ValidationReport r = validate(a);
  if (json) {
    auto j = report::envelope("validate", {file});
    j["validation"] = report::to_json(r);
    emit(j);
  } else {
    std::cout << a.name << ": " << (r.ok() ? "ok" : "invalid") << " (" << a.locations.size() << " locations, "
              << a.clocks.size() << " clocks, k=" << r.max_constant << ")\n";
  }
  for (const auto& p : r.problems) {
    std::cerr << (p.severity == Severity::Error ? "error: " : "warning: ") << p.element << ": " << p.message << '\n';
  }
  return r.ok() ? kOk : kInvalid;
}

int cmd_compose(const std::string& f1, const std::string& f2, const std::string& out) {
  Tioa c = compose(load_valid(f1), load_valid(f2));
  std::string text = render_model(c);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream os(out);
    if (!os) {
      std::cerr << "error: cannot write " << out << '\n';
      return kInvalid;
    }
    os << text;
  }
  return kOk;
}

int cmd_zonegraph(const std::string& file, std::optional<std::int64_t> k, const std::string& dot, bool json) {
  Iolzg g = build_iolzg(load_valid(file), k);
  if (!dot.empty()) {
    std::ofstream os(dot);
    if (!os) {
      std::cerr << "error: cannot write " << dot << '\n';
      return kInvalid;
    }
    os << export_dot(g);
  }
  if (json) {
    auto j = report::envelope("zonegraph", {file});
    j["graph"] = report::to_json(g);
    emit(j);
    return kOk;
  }
  std::cout << g.tioa().name << ": " << g.states().size() << " symbolic states, " << g.edges().size()
            << " edges (k=" << g.k() << ")\n";
  for (std::size_t i = 0; i < g.states().size(); ++i) {
    const auto& s = g.states()[i];
    std::cout << "  s" << i << "  " << g.location_name(s.location) << "  " << g.zone(s).to_constraint_string() << '\n';
  }
  return kOk;
}

int cmd_quiescence(const std::string& file, bool json) {
  Iolzg g = build_iolzg(load_valid(file));
  if (json) {
    auto j = report::envelope("quiescence", {file});
    j["graph"] = report::to_json(g);
    emit(j);
    return kOk;
  }
  std::cout << "state  location  enforced  safe  zone\n";
  for (std::size_t i = 0; i < g.states().size(); ++i) {
    const auto& s = g.states()[i];
    Quiescence q = g.classify(s);
    std::cout << "s" << i << "  " << g.location_name(s.location) << "  " << (q.enforced ? "yes" : "no") << "  "
              << (q.safe ? "yes" : "no") << "  " << g.zone(s).to_constraint_string() << '\n';
  }
  return kOk;
}

int cmd_check(const std::string& impl, const std::string& spec, const std::string& relation, std::size_t depth,
              bool all, bool json) {
  CheckConfig cfg;
  cfg.relation = relation == "ltioco" ? ConformanceRelation::Ltioco : ConformanceRelation::TiocoDelta;
  cfg.depth = depth;
  cfg.all_witnesses = all;
  Iolzg gi = build_iolzg(load_valid(impl));
  Iolzg gs = build_iolzg(load_valid(spec));
  Verdict v = check(gi, gs, cfg);
  if (json) {
    auto j = report::envelope("check", {impl, spec});
    j["relation"] = relation;
    j["depth"] = depth;
    j["result"] = report::to_json(v);
    emit(j);
    for (const auto& w : v.warnings) std::cerr << "warning: " << w << '\n';
  } else {
    std::cout << explain(v);
    if (all && v.witnesses.size() > 1) {
      std::cout << "  all failing traces:\n";
      for (const auto& w : v.witnesses) {
        std::cout << "    " << (w.trace.empty() ? std::string("(empty)") : render_trace(w.trace)) << "  "
                  << render_out(w.offending) << '\n';
      }
    }
  }
  return v.pass ? kOk : kFail;
}

int cmd_oracle(const std::string& impl, const std::string& spec, const std::string& relation, std::size_t length,
               std::optional<std::int64_t> max_delay, std::int64_t resolution, bool allow_strict, bool json) {
  oracle::OracleRelation rel = oracle::OracleRelation::Ltioco;
  if (relation == "tioco-delta") rel = oracle::OracleRelation::TiocoDelta;
  if (relation == "tioco-Delta") rel = oracle::OracleRelation::TiocoDelays;
  oracle::OracleConfig cfg;
  cfg.max_delay = max_delay;
  cfg.closed_only = !allow_strict;
  cfg.resolution = resolution;
  auto v = oracle::check(load_valid(impl), load_valid(spec), rel, length, cfg);
  if (json) {
    auto j = report::envelope("oracle", {impl, spec});
    j["relation"] = relation;
    j["length"] = length;
    j["result"] = report::to_json(v);
    emit(j);
  } else if (v.pass) {
    std::cout << "PASS\n";
  } else {
    std::cout << "FAIL\n  trace:     " << (v.witness.empty() ? std::string("(empty)") : oracle::render_timed(v.witness, v.resolution))
              << "\n  offending:";
    for (const auto& o : v.offending) std::cout << ' ' << o.to_string(v.resolution);
    std::cout << '\n';
  }
  return v.pass ? kOk : kFail;
}

int cmd_spantraces(const std::string& file, std::size_t depth, bool quiescence) {
  Iolzg g = build_iolzg(load_valid(file));
  for (const auto& t : enumerate_span_traces(g, depth, quiescence)) {
    std::cout << (t.empty() ? std::string("(empty)") : render_trace(t)) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Timed input/output conformance toolkit"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "Print a JSON report instead of text");

  std::string f1, f2, out, dot, relation = "ltioco";
  std::optional<std::int64_t> k, max_delay;
  std::int64_t resolution = 1;
  std::size_t depth = 8, length = 6, sdepth = 3;
  bool all = false, quiescence = false, allow_strict = false;

  auto* validate_cmd = app.add_subcommand("validate", "Validate a model file");
  validate_cmd->add_option("file", f1)->required();

  auto* compose_cmd = app.add_subcommand("compose", "Compose two models");
  compose_cmd->add_option("file1", f1)->required();
  compose_cmd->add_option("file2", f2)->required();
  compose_cmd->add_option("-o,--output", out, "Output file (default: stdout)");

  auto* zg_cmd = app.add_subcommand("zonegraph", "Build the labelled zone graph");
  zg_cmd->add_option("file", f1)->required();
  zg_cmd->add_option("--k", k, "Normalisation ceiling (>= largest constant)");
  zg_cmd->add_option("--dot", dot, "Write Graphviz output to this path");

  auto* q_cmd = app.add_subcommand("quiescence", "Per-state quiescence table");
  q_cmd->add_option("file", f1)->required();

  auto* check_cmd = app.add_subcommand("check", "Symbolic conformance check");
  check_cmd->add_option("impl", f1)->required();
  check_cmd->add_option("spec", f2)->required();
  check_cmd->add_option("--relation", relation)->check(CLI::IsMember({"ltioco", "tioco-delta"}));
  check_cmd->add_option("--depth", depth, "Visible steps per trace")->capture_default_str();
  check_cmd->add_flag("--all-witnesses", all, "Report every failing trace");

  auto* oracle_cmd = app.add_subcommand("oracle", "Discrete-time brute-force conformance check");
  oracle_cmd->add_option("impl", f1)->required();
  oracle_cmd->add_option("spec", f2)->required();
  oracle_cmd->add_option("--relation", relation)->check(CLI::IsMember({"ltioco", "tioco-delta", "tioco-Delta"}));
  oracle_cmd->add_option("--length", length, "Visible steps per trace")->capture_default_str();
  oracle_cmd->add_option("--max-delay", max_delay, "Largest delay per step (default: ceiling + 1)");
  oracle_cmd->add_option("--resolution", resolution, "Grid steps per time unit")->check(CLI::PositiveNumber);
  oracle_cmd->add_flag("--allow-strict", allow_strict, "Accept strict constraints (integer delays only)");

  auto* st_cmd = app.add_subcommand("spantraces", "List span traces");
  st_cmd->add_option("file", f1)->required();
  st_cmd->add_option("--depth", sdepth, "Visible steps per trace")->capture_default_str();
  st_cmd->add_flag("--quiescence", quiescence, "Include quiescence steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*validate_cmd) return cmd_validate(f1, json);
    if (*compose_cmd) return cmd_compose(f1, f2, out);
    if (*zg_cmd) return cmd_zonegraph(f1, k, dot, json);
    if (*q_cmd) return cmd_quiescence(f1, json);
    if (*check_cmd) return cmd_check(f1, f2, relation, depth, all, json);
    if (*oracle_cmd) return cmd_oracle(f1, f2, relation, length, max_delay, resolution, allow_strict, json);
    if (*st_cmd) return cmd_spantraces(f1, sdepth, quiescence);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}
