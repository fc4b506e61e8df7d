#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "dpia/checker.hpp"
#include "dpia/eval_fn.hpp"
#include "dpia/harness.hpp"
#include "dpia/opencl.hpp"
#include "dpia/pipeline.hpp"
#include "test_util.hpp"

using namespace dpia;
namespace fs = std::filesystem;

namespace {

Compilation kernel(const std::string& text, NumMode mode = NumMode::Int) {
  PipelineOptions o;
  o.codegen.target = Target::OpenCL;
  o.codegen.mode = mode;
  o.function_name = "KERNEL";
  return compile_source(text, o);
}

bool simulate_matches(const std::string& text, const NatEnv& sigma, Launch launch) {
  Compilation c = kernel(text);
  Store in = random_inputs(c.prog, sigma, 5);
  Store init = testutil::with_outputs(c.prog, in, sigma);
  ExecResult r = simulate_kernel(*c.kernel, init, sigma, launch);
  EXPECT_TRUE(r.races.empty());
  Value want = c.prog.body && check_program(c.prog).type->k == PhraseTypeNode::K::Comm
                   ? exec(c.stage2, init, sigma).store.at("out")
                   : eval_fn(c.prog.body, ValueEnv(in.begin(), in.end()), sigma);
  return value_equal(r.store.at("out"), want);
}

const char* kLocalStaging =
    "(nat n) (param xs (exp (arr (* n 4) num)))"
    "(join (mapWorkgroup (lam zs (mapLocal (lam x (+ x 1))"
    " (toLocal (lam ys (mapLocal (lam y (* y 2)) ys)) zs))) (split 4 xs)))";

}  // namespace

TEST(OpenCL, GoldenKernelsSimulate) {
  for (const char* f : {"dot.dpia", "tiled.dpia", "dotvec.dpia", "hoist.dpia"}) {
    SCOPED_TRACE(f);
    for (Launch l : {Launch{1, 1}, Launch{2, 4}, Launch{3, 5}}) {
      EXPECT_TRUE(simulate_matches(testutil::read_program(f), {{"n", 2}}, l));
    }
  }
}

TEST(OpenCL, KernelSignature) {
  Compilation c = kernel(testutil::read_program("dotvec.dpia"), NumMode::Float);
  EXPECT_EQ(c.code.rfind("kernel void KERNEL(", 0), 0u) << c.code;
  EXPECT_NE(c.code.find("global float* out"), std::string::npos);
  EXPECT_NE(c.code.find("int n"), std::string::npos);
}

TEST(OpenCL, LocalBuffersGetBarriers) {
  Compilation c = kernel(kLocalStaging);
  ASSERT_EQ(c.kernel->buffers.size(), 1u);
  EXPECT_EQ(c.kernel->buffers[0].space, "local");
  EXPECT_NE(c.code.find("barrier(CLK_LOCAL_MEM_FENCE)"), std::string::npos) << c.code;
  EXPECT_TRUE(simulate_matches(kLocalStaging, {{"n", 3}}, {2, 3}));
}

TEST(OpenCL, NewLocalOutsideWorkgroupRejected) {
  try {
    kernel(
        "(param xs (exp (arr 4 num))) (param out (acc (arr 4 num)))"
        "(newLocal (arr 4 num) (lam t (parforGlobal out (lam i o (:= o (idx t.2 i))))))");
    FAIL() << "accepted";
  } catch (const DpiaError& e) {
    EXPECT_EQ(e.cls(), ErrorClass::Type) << e.describe();
  }
}

TEST(OpenCL, HoistingMultipliesByTripCounts) {
  Compilation c = kernel(testutil::read_program("hoist.dpia"));
  HoistResult h = hoist_allocations(c.stage2);
  ASSERT_EQ(h.buffers.size(), 1u);
  EXPECT_EQ(data_leaf_count(h.buffers[0].type, {{"n", 3}}), 3u * 1024);
  EXPECT_EQ(h.buffers[0].space, "global");
  EXPECT_NE(c.code.find("global long* tmp_"), std::string::npos) << c.code;
}

TEST(OpenCL, HierarchyLint) {
  Compilation c = kernel(
      "(param xs (exp (arr 4 (arr 4 num))))"
      "(mapGlobal (lam r (mapWorkgroup (lam x (+ x 1)) r)) xs)");
  EXPECT_FALSE(hierarchy_lint(c.stage2).empty());
  Compilation ok = kernel(testutil::read_program("tiled.dpia"));
  EXPECT_TRUE(hierarchy_lint(ok.stage2).empty());
}

TEST(OpenCL, ClangAcceptsKernels) {
  if (std::system("command -v clang >/dev/null 2>&1") != 0) GTEST_SKIP() << "clang not available";
  fs::path dir = fs::temp_directory_path() / ("dpia_cl_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  for (const char* f : {"dot.dpia", "tiled.dpia", "dotvec.dpia", "hoist.dpia"}) {
    SCOPED_TRACE(f);
    fs::path out = dir / (std::string(f) + ".cl");
    std::ofstream(out) << kernel(testutil::read_program(f), NumMode::Float).code;
    std::string cmd = "clang -x cl -cl-std=CL1.2 -Xclang -finclude-default-header -fsyntax-only " +
                      out.string() + " 2>&1";
    EXPECT_EQ(std::system(cmd.c_str()), 0);
  }
  std::ofstream(dir / "local.cl") << kernel(kLocalStaging, NumMode::Float).code;
  EXPECT_EQ(std::system(("clang -x cl -cl-std=CL1.2 -Xclang -finclude-default-header -fsyntax-only " +
                         (dir / "local.cl").string() + " 2>&1")
                            .c_str()),
            0);
  fs::remove_all(dir);
}
