#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(ENTEST_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string write_tmp(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "entest_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p.string();
}

const std::string kConfig =
    "estimators = mle, jvhw\nfamily = uniform\nS_grid = 50, 100\nn_grid = 100, 300\ntrials = 30\n";

}  // namespace

TEST(Cli, EstimateMle) {
  const Result r = run("estimate --estimator mle " + write_tmp("h22.txt", "2\n2\n"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0.693147180560\n");
}

TEST(Cli, EstimateBits) {
  const Result r = run("estimate --estimator mle --bits " + write_tmp("h22.txt", "2\n2\n"));
  EXPECT_EQ(r.out, "1.00000000000\n");
}

TEST(Cli, EstimatePerBin) {
  const Result r = run("estimate --estimator corrected --per-bin " + write_tmp("h31.txt", "3\n1\n"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("bin,regime,contribution\n0,plugin,", 0), 0u);
}

TEST(Cli, BoundsMle) {
  const Result r = run("bounds --S 100 --n 1000 --H 4.60517 --which mle");
  EXPECT_EQ(r.code, 0);
  ASSERT_EQ(r.out.rfind("linear,", 0), 0u);
  EXPECT_NEAR(std::stod(r.out.substr(7)), 0.031208, 1e-6);
}

TEST(Cli, BoundsBoth) {
  const Result r = run("bounds --S 100 --n 1000 --H 4.60517");
  EXPECT_NE(r.out.find("mle,linear,"), std::string::npos);
  EXPECT_NE(r.out.find("minimax,linear,"), std::string::npos);
}

TEST(Cli, ApproxDumpDegreeZero) {
  const Result r = run("approx --K 0 --dump");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("k,coeff\n0,0.18393972", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);
}

TEST(Cli, ApproxDumpHasDegreePlusOneRows) {
  const Result r = run("approx --K 6 --dump");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 8);
}

TEST(Cli, Priors) {
  const Result r = run("priors --L 3 --eta 0.05");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("atom,weight0,weight1\n", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
}

TEST(Cli, SimulateIsByteIdenticalAcrossThreads) {
  const std::string cfg = write_tmp("sweep.cfg", kConfig);
  const Result a = run("simulate --config " + cfg + " --seed 4 --threads 1");
  const Result b = run("simulate --config " + cfg + " --seed 4 --threads 4");
  const Result c = run("simulate --config " + cfg + " --seed 4");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  EXPECT_EQ(a.out.rfind("# schema=1\n", 0), 0u);
  EXPECT_NE(a.out, run("simulate --config " + cfg + " --seed 5").out);
}

TEST(Cli, SimulateOutAndResume) {
  const std::string cfg = write_tmp("sweep2.cfg", kConfig);
  const fs::path out = fs::temp_directory_path() / "entest_cli_test" / "sweep.csv";
  fs::remove(out);
  ASSERT_EQ(run("simulate --config " + cfg + " --out " + out.string()).code, 0);
  std::ifstream in(out);
  const std::string full((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(full, run("simulate --config " + cfg).out);
  ASSERT_EQ(run("simulate --config " + cfg + " --out " + out.string() + " --resume").code, 0);
  std::ifstream again(out);
  EXPECT_EQ(std::string((std::istreambuf_iterator<char>(again)), std::istreambuf_iterator<char>()), full);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("--help").code, 0);
  for (const char* sub : {"estimate", "simulate", "approx", "bounds", "priors"}) {
    const Result r = run(std::string(sub) + " --help");
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("--"), std::string::npos) << sub;
  }
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("approx --K 3 --bogus").code, 2);
  EXPECT_EQ(run("estimate --estimator bayes x.txt").code, 2);
  EXPECT_EQ(run("bounds --S 100 --n 1000 --H 9").code, 2);
  EXPECT_EQ(run("simulate --config " + write_tmp("bad.cfg", "trials = 3\n")).code, 2);
}

TEST(Cli, MissingInputIsRuntimeError) {
  const std::string cmd = std::string(ENTEST_CLI_PATH) + " estimate /nonexistent/h.txt 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string text;
  std::array<char, 512> buf;
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) text.append(buf.data(), got);
  const int status = pclose(pipe);
  EXPECT_EQ(WEXITSTATUS(status), 1);
  EXPECT_NE(text.find("/nonexistent/h.txt"), std::string::npos);
}
