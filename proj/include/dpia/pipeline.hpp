#pragma once

#include <optional>
#include <string>

#include "dpia/codegen.hpp"
#include "dpia/error.hpp"
#include "dpia/opencl.hpp"
#include "dpia/program.hpp"

namespace dpia {

// A DpiaError tagged with the pipeline stage that raised it.
class StageError : public DpiaError {
 public:
  StageError(std::string stage, const DpiaError& e)
      : DpiaError(e.cls(), stage + ": " + e.what(), e.span()), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct PipelineOptions {
  CodegenOptions codegen;
  bool check_only = false;
  std::string function_name = "dpia_main";
};

struct Compilation {
  Program prog;
  Phrase stage1;
  size_t assign_mapIs = 0;
  Phrase stage2;
  std::optional<CUnit> unit;      // pseudo-c and c-openmp
  std::optional<Kernel> kernel;   // opencl
  std::string code;
};

// parse, check, Stage I (re-checked at comm), Stage II (re-checked), then
// codegen or kernel building for the selected target. Errors are rethrown as
// StageError.
Compilation compile_source(const std::string& text, const PipelineOptions& o);
Compilation compile_parsed(Program prog, const PipelineOptions& o);

// Re-checks a comm phrase in the program's parameter contexts.
void recheck_comm(const Program& prog, const Phrase& c);

// Extension of the output file for a target: .pseudo.c, .c or .cl.
std::string target_extension(Target t);

}  // namespace dpia
