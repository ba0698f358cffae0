#include "oracles.hpp"

#include <netbargain/io.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>

using namespace netbargain;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" NETBARGAIN_CLI "' " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(NETBARGAIN_DATA_DIR) + "/" + name; }

std::string temp(const std::string& name) { return ::testing::TempDir() + "netbargain_cli_" + name; }

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(Cli, SolveSixVertexThenCheck) {
  const auto out = temp("lemma_solution.json");
  auto r = run("solve " + data("lemma1.json") + " -o " + out);
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "status: balanced-found"));
  auto inst = repro::lemma1_instance();
  auto s = io::load_solution(inst, io::read_file(out));
  EXPECT_EQ(s.shares(), repro::lemma1_balanced_solution(inst).shares());
  auto c = run("check " + data("lemma1.json") + " " + out);
  EXPECT_EQ(c.code, 0);
  EXPECT_TRUE(contains(c.out, "balanced: yes"));
  std::remove(out.c_str());
}

TEST(Cli, SolveJsonReport) {
  auto r = run("solve " + data("single_edge.json") + " --format json");
  ASSERT_EQ(r.code, 0);
  auto doc = io::json::parse(r.out);
  EXPECT_EQ(doc["status"], "balanced-found");
  EXPECT_EQ(doc["allocation"]["p"], "7/4");
  EXPECT_EQ(doc["allocation"]["q"], "7/4");
}

TEST(Cli, ExactModeMatchesNumeric) {
  auto a = run("solve " + data("lemma1.json") + " --format json --mode exact");
  auto b = run("solve " + data("lemma1.json") + " --format json");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(io::json::parse(a.out)["solution"], io::json::parse(b.out)["solution"]);
}

TEST(Cli, TriangleExitsTwoWithCertificate) {
  auto r = run("solve " + data("triangle.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.out, "LP relaxation optimum 3/2 exceeds integral optimum 1"));
}

TEST(Cli, CheckReportsUnbalancedSplit) {
  auto r = run("check " + data("lemma1.json") + " " + data("lemma1_even_split.json"));
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "stable: yes"));
  EXPECT_TRUE(contains(r.out, "balanced: no"));
  EXPECT_TRUE(contains(r.out, "balance violation on B-C: 10 vs 5"));
}

TEST(Cli, TamperedSolutionIsAnInputError) {
  const auto path = temp("tampered.json");
  auto text = io::read_file(data("lemma1_balanced.json"));
  text.replace(text.find("\"10/3\""), 6, "\"11/3\"");
  io::write_file(path, text);
  EXPECT_EQ(run("check " + data("lemma1.json") + " " + path).code, 4);
  io::write_file(path, "{ not json");
  EXPECT_EQ(run("check " + data("lemma1.json") + " " + path).code, 4);
  std::remove(path.c_str());
  EXPECT_EQ(run("solve /nonexistent/instance.json").code, 4);
  EXPECT_EQ(run("frobnicate").code, 4);
}

TEST(Cli, ToleranceFromEnvironment) {
  EXPECT_EQ(run("solve " + data("single_edge.json"), "NETBARGAIN_TOL=-1").code, 4);
  EXPECT_EQ(run("solve " + data("single_edge.json"), "NETBARGAIN_TOL=1e-6").code, 0);
  EXPECT_EQ(run("solve " + data("single_edge.json") + " --tol 1e-6", "NETBARGAIN_TOL=-1").code, 0);
}

TEST(Cli, ReduceWritesAuxiliaryAndSidecar) {
  const auto aux = temp("aux.json");
  const auto side = temp("side.json");
  auto r = run("reduce " + data("example1.json") + " -o " + aux + " --sidecar " + side);
  ASSERT_EQ(r.code, 0);
  auto inst = io::load_instance(io::read_file(aux));
  EXPECT_EQ(inst.vertex_count(), 14u);
  EXPECT_TRUE(inst.all_unit_capacity());
  EXPECT_NO_THROW(io::json::parse(io::read_file(side)));
  std::remove(aux.c_str());
  std::remove(side.c_str());
}

TEST(Cli, CoopOnBalancedAllocation) {
  auto r = run("coop " + data("lemma1.json") + " --solution " + data("lemma1_balanced.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "nu(N) = 120"));
  EXPECT_TRUE(contains(r.out, "core: yes"));
  EXPECT_TRUE(contains(r.out, "prekernel: no"));
  auto e = run("coop " + data("lemma1.json") + " --solution " + data("lemma1_even_split.json"));
  EXPECT_TRUE(contains(e.out, "bad vertices: B E"));
  EXPECT_TRUE(contains(e.out, "equivalence: conditions not met"));
  auto x = run("coop " + data("lemma1.json") + " --allocation " + data("lemma1_x20.json") + " --format json");
  auto doc = io::json::parse(x.out);
  EXPECT_EQ(doc["in_core"], true);
  EXPECT_EQ(doc["in_prekernel"], true);
}

TEST(Cli, CoopGuardExitsFive) {
  std::vector<VertexSpec> vs;
  for (int i = 0; i < 17; ++i) vs.push_back({"v" + std::to_string(10 + i), 1});
  const auto path = temp("big.json");
  io::write_file(path, io::write_instance(Instance::create(vs, {})));
  EXPECT_EQ(run("coop " + path).code, 5);
  std::remove(path.c_str());
}

TEST(Cli, Repro) {
  auto ex = run("repro example1");
  EXPECT_EQ(ex.code, 0);
  EXPECT_TRUE(contains(ex.out, "all certifications passed"));
  auto lemma = run("repro lemma1");
  EXPECT_EQ(lemma.code, 1);
  EXPECT_TRUE(contains(lemma.out, "[FAIL] balanced allocation in core and prekernel"));
  EXPECT_EQ(run("repro nothing").code, 4);
}
