#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "support.hpp"

using ltioco::testing::fixture;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  std::string cmd = std::string(LTIOCO_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ltioco_cli_" + name)).string();
}

}  // namespace

TEST(Cli, ValidateOk) {
  CliRun r = cli("validate " + fixture("machine.ta"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("k=20"), std::string::npos) << r.out;
}

TEST(Cli, ValidateInvalid) {
  std::string f = tmp_path("bad.ta");
  std::ofstream(f) << "automaton B\nclocks x\nlocation l0 initial invariant x >= 1\n";
  EXPECT_EQ(cli("validate " + f).code, 2);
  std::ofstream(f) << "automaton B\nlocation l0 initial\nswitch l0 => l0\n";
  EXPECT_EQ(cli("validate " + f).code, 2);
  EXPECT_EQ(cli("validate /nonexistent/model.ta").code, 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("check " + fixture("machine.ta")).code, 2);
  EXPECT_EQ(cli("check --relation nope " + fixture("machine.ta") + " " + fixture("machine.ta")).code, 2);
}

TEST(Cli, CheckFailsWithWitness) {
  CliRun r = cli("check " + fixture("a1_impl.ta") + " " + fixture("a1prime_spec.ta"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("delta_S"), std::string::npos) << r.out;
  CliRun all = cli("check --all-witnesses --depth 3 " + fixture("a1_impl.ta") + " " + fixture("a1prime_spec.ta"));
  EXPECT_EQ(all.code, 1);
  EXPECT_NE(all.out.find("(>20,inf) ?press, [0,20) ?press"), std::string::npos) << all.out;
}

TEST(Cli, CheckSelfPasses) {
  EXPECT_EQ(cli("check " + fixture("quiet_a3.ta") + " " + fixture("quiet_a3.ta")).code, 0);
  EXPECT_EQ(cli("check --relation tioco-delta " + fixture("quiet_a3.ta") + " " + fixture("quiet_a4.ta")).code, 0);
  EXPECT_EQ(cli("check " + fixture("quiet_a3.ta") + " " + fixture("quiet_a4.ta")).code, 1);
  EXPECT_EQ(cli("check " + fixture("machine.ta") + " " + fixture("quiet_a3.ta")).code, 2);
}

TEST(Cli, Oracle) {
  EXPECT_EQ(cli("oracle " + fixture("delay_a0.ta") + " " + fixture("delay_a1.ta")).code, 0);
  EXPECT_EQ(cli("oracle --relation tioco-delta " + fixture("delay_a2.ta") + " " + fixture("delay_a3.ta")).code, 1);
  EXPECT_EQ(cli("oracle " + fixture("machine.ta") + " " + fixture("machine.ta")).code, 2);
  EXPECT_EQ(cli("oracle --allow-strict --length 2 " + fixture("machine.ta") + " " + fixture("machine.ta")).code, 0);
  EXPECT_EQ(cli("oracle --allow-strict --relation tioco-Delta " + fixture("a1prime_spec.ta") + " " +
                fixture("a1_impl.ta"))
                .code,
            1);
}

TEST(Cli, OracleResolution) {
  std::string spec = tmp_path("res_spec.ta"), impl = tmp_path("res_impl.ta");
  std::ofstream(spec) << "automaton S\nclocks x\noutputs o\nlocation l0 initial\nlocation l1\n"
                         "switch l0 -> l1 when x == 0 via !o\nswitch l0 -> l1 when x >= 1 via !o\n";
  std::ofstream(impl) << "automaton I\nclocks x\noutputs o\nlocation l0 initial\nlocation l1\nswitch l0 -> l1 via !o\n";
  EXPECT_EQ(cli("oracle --length 2 " + impl + " " + spec).code, 0);
  CliRun r = cli("oracle --length 2 --resolution 2 " + impl + " " + spec);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("(1/2, !o)"), std::string::npos) << r.out;
  EXPECT_EQ(cli("oracle --resolution 0 " + impl + " " + spec).code, 2);
}

TEST(Cli, SpanTraces) {
  CliRun r = cli("spantraces --depth 3 " + fixture("machine.ta"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("(>20,inf) ?press, [0,20) ?press, [10,20] ?sugar\n"), std::string::npos);
}

TEST(Cli, ZoneGraphAndDot) {
  std::string dot = tmp_path("machine.dot");
  CliRun r = cli("zonegraph --k 20 --dot " + dot + " " + fixture("machine.ta"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("x<=20 & x==y"), std::string::npos) << r.out;
  std::ifstream in(dot);
  std::string first((std::istreambuf_iterator<char>(in)), {});
  cli("zonegraph --k 20 --dot " + dot + " " + fixture("machine.ta"));
  std::ifstream in2(dot);
  std::string second((std::istreambuf_iterator<char>(in2)), {});
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(first, second);
  EXPECT_EQ(cli("zonegraph --k 3 " + fixture("machine.ta")).code, 2);
}

TEST(Cli, Compose) {
  std::string out = tmp_path("composed.ta");
  EXPECT_EQ(cli("compose " + fixture("machine.ta") + " " + fixture("customer.ta") + " -o " + out).code, 0);
  EXPECT_EQ(cli("validate " + out).code, 0);
  EXPECT_EQ(cli("compose " + fixture("machine.ta") + " " + fixture("machine.ta")).code, 2);
}

TEST(Cli, QuiescenceTable) {
  CliRun r = cli("quiescence " + fixture("quiet_a1.ta"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("yes  yes"), std::string::npos) << r.out;
}

TEST(Cli, JsonReportsAreStable) {
  std::string args = "--json check " + fixture("a1_impl.ta") + " " + fixture("a1prime_spec.ta");
  CliRun a = cli(args), b = cli(args);
  EXPECT_EQ(a.code, 1);
  EXPECT_EQ(a.out, b.out);
  auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["command"], "check");
  EXPECT_EQ(j["result"]["verdict"], "fail");
  EXPECT_EQ(j["result"]["witness"]["trace"][0]["label"], "?press");

  CliRun q = cli("--json quiescence " + fixture("quiet_a2.ta"));
  auto jq = nlohmann::json::parse(q.out);
  EXPECT_EQ(jq["graph"]["states"][0]["enforced"], false);
  EXPECT_EQ(jq["graph"]["states"][0]["safe"], true);
}
