#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "c_normalize.hpp"
#include "dpia/eval_fn.hpp"
#include "dpia/eval_imp.hpp"
#include "dpia/pipeline.hpp"
#include "test_util.hpp"

using namespace dpia;
namespace fs = std::filesystem;

namespace {

Compilation compile(const std::string& text, Target t, NumMode mode = NumMode::Float) {
  PipelineOptions o;
  o.codegen.target = t;
  o.codegen.mode = mode;
  return compile_source(text, o);
}

bool have(const char* tool) {
  return std::system((std::string("command -v ") + tool + " >/dev/null 2>&1").c_str()) == 0;
}

}  // namespace

TEST(Codegen, DotPseudoC) {
  Compilation c = compile(testutil::read_program("dot.dpia"), Target::PseudoC);
  EXPECT_EQ(cnorm::loop_shape(c.code), "parforfor");
  EXPECT_NE(c.code.find("xs[i"), std::string::npos);
  EXPECT_NE(c.code.find("*out = "), std::string::npos) << c.code;
}

TEST(Codegen, TiledLoopNest) {
  Compilation c = compile(testutil::read_program("tiled.dpia"), Target::PseudoC);
  EXPECT_EQ(cnorm::loop_shape(c.code), "parfor(parfor(for))for");
  EXPECT_EQ(c.code.find('/'), std::string::npos);
  EXPECT_EQ(c.code.find('%'), std::string::npos);
}

TEST(Codegen, UnsimplifiedIndicesAgree) {
  NatEnv sigma{{"n", 2}};
  for (bool simplify : {true, false}) {
    PipelineOptions o;
    o.codegen.mode = NumMode::Int;
    o.codegen.simplify = simplify;
    Compilation c = compile_source(testutil::read_program("tiled.dpia"), o);
    std::vector<Value> xs, ys;
    for (int64_t k = 0; k < 64; ++k) {
      xs.push_back(value_num(k));
      ys.push_back(value_num(k % 3));
    }
    Store in{{"xs", value_array(xs)}, {"ys", value_array(ys)}};
    ValueEnv env(in.begin(), in.end());
    ExecResult r = exec_c(*c.unit, testutil::with_outputs(c.prog, in, sigma), sigma);
    EXPECT_TRUE(value_equal(r.store.at("out"), eval_fn(c.prog.body, env, sigma)));
  }
}

TEST(Codegen, PairsBecomeStructs) {
  Compilation c = compile("(param xs (exp (arr 4 num))) (zip xs xs)", Target::COpenMP);
  EXPECT_NE(c.code.find("pair_num_num"), std::string::npos) << c.code;
  EXPECT_NE(c.code.find("struct"), std::string::npos);
}

TEST(Codegen, OpenMPPragmaOnParallelLoops) {
  Compilation c = compile(testutil::read_program("dot.dpia"), Target::COpenMP);
  EXPECT_NE(c.code.find("#pragma omp parallel for"), std::string::npos);
}

TEST(Codegen, HeapAndInitOptions) {
  PipelineOptions o;
  o.codegen.target = Target::COpenMP;
  o.codegen.heap = true;
  o.codegen.init_new = true;
  Compilation c = compile_source(testutil::read_program("dot.dpia"), o);
  EXPECT_NE(c.code.find("calloc(n, sizeof(float))"), std::string::npos) << c.code;
  EXPECT_NE(c.code.find("free("), std::string::npos);
}

TEST(Codegen, CompiledCMatchesInterpreter) {
  if (!have("gcc")) GTEST_SKIP() << "gcc not available";
  Compilation c = compile(testutil::read_program("dot.dpia"), Target::COpenMP);
  fs::path dir = fs::temp_directory_path() / ("dpia_cg_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "dot.c") << "#include <stdio.h>\n#include <stdlib.h>\n"
                               << c.code
                               << "int main(void) {\n"
                                  "  float xs[5] = {1, 2, 3, 4, 5}, ys[5] = {2, 2, 2, 2, 2}, out = 0;\n"
                                  "  dpia_main(&out, xs, ys, 5);\n"
                                  "  printf(\"%g\\n\", out);\n"
                                  "  return 0;\n}\n";
  std::string bin = (dir / "dot").string();
  std::string cc = "gcc -std=c11 -fopenmp -O1 -o " + bin + " " + (dir / "dot.c").string() + " 2>&1";
  ASSERT_EQ(std::system(cc.c_str()), 0);
  FILE* p = popen(bin.c_str(), "r");
  ASSERT_NE(p, nullptr);
  char buf[64] = {};
  ASSERT_NE(fgets(buf, sizeof buf, p), nullptr);
  pclose(p);
  fs::remove_all(dir);
  EXPECT_EQ(std::string(buf), "30\n");
}
