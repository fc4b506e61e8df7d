#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun dpiac(const std::string& args) {
  std::string cmd = std::string(DPIAC_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[512];
  while (fgets(buf, sizeof buf, p)) r.out += buf;
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string prog(const char* name) { return std::string(DPIA_EXAMPLES_DIR) + "/" + name; }

fs::path scratch(const std::string& name, const std::string& text) {
  fs::path dir = fs::temp_directory_path() / ("dpiac_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / name) << text;
  return dir / name;
}

}  // namespace

TEST(Cli, CompileToStdout) {
  CliRun r = dpiac("compile " + prog("dot.dpia") + " -o -");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("parfor"), std::string::npos);
}

TEST(Cli, CompileWritesDefaultOutput) {
  fs::path src = scratch("tiled.dpia", "(nat n)(param xs (exp (arr n num)))(map (lam x (* x 2)) xs)");
  CliRun r = dpiac("compile " + src.string() + " --target opencl --dump-stages");
  EXPECT_EQ(r.code, 0) << r.out;
  fs::path stem = src.parent_path() / "tiled";
  EXPECT_TRUE(fs::exists(stem.string() + ".cl"));
  EXPECT_TRUE(fs::exists(stem.string() + ".stage1.dpia"));
  EXPECT_TRUE(fs::exists(stem.string() + ".stage2.dpia"));
  fs::remove_all(src.parent_path());
}

TEST(Cli, ParseErrorExitsTwo) {
  fs::path src = scratch("bad.dpia", "(param xs (exp num)");
  CliRun r = dpiac("check " + src.string());
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("bad.dpia:1:"), std::string::npos) << r.out;
}

TEST(Cli, TypeErrorExitsThree) {
  CliRun r = dpiac("check " + prog("racy.dpia"));
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_NE(r.out.find("'b'"), std::string::npos);
}

TEST(Cli, MissingFileExitsIO) {
  CliRun r = dpiac("check /nonexistent/x.dpia");
  EXPECT_EQ(r.code, 66) << r.out;
}

TEST(Cli, RunOnAllEngines) {
  for (const char* e : {"fn", "imp", "c", "kernel"}) {
    SCOPED_TRACE(e);
    CliRun r = dpiac("run " + prog("dot.dpia") + " " + prog("dot.inputs") + " --engine " + e);
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out, "out = 32\n");
  }
}

TEST(Cli, FuzzSmoke) {
  CliRun r = dpiac("fuzz --seeds 20 --threads 2");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("20/20 passed"), std::string::npos);
  CliRun f = dpiac("fuzz --seeds 40 --fault-flip-split");
  EXPECT_EQ(f.code, 1);
}

TEST(Cli, BadFlagIsUsageError) {
  CliRun r = dpiac("compile " + prog("dot.dpia") + " --target cuda");
  EXPECT_NE(r.code, 0);
}
