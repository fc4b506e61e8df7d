#include "dpia/pipeline.hpp"

#include "dpia/checker.hpp"
#include "dpia/lower.hpp"
#include "dpia/parser.hpp"
#include "dpia/translate.hpp"

namespace dpia {

namespace {

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const DpiaError& e) {
    throw StageError(name, e);
  }
}

}  // namespace

void recheck_comm(const Program& prog, const Phrase& c) {
  KindContext delta;
  TypingContext ctx;
  program_contexts(prog, delta, ctx);
  type_check(delta, ctx, c, pt::comm());
}

Compilation compile_source(const std::string& text, const PipelineOptions& o) {
  Program prog = stage("parse", [&] { return parse_program(text, false); });
  return compile_parsed(std::move(prog), o);
}

Compilation compile_parsed(Program prog, const PipelineOptions& o) {
  Compilation r;
  stage("check", [&] { check_program(prog); });
  r.prog = std::move(prog);
  if (o.check_only) return r;
  stage("stage1", [&] {
    Stage1 s1 = translate_program(r.prog);
    r.stage1 = s1.comm;
    r.assign_mapIs = s1.assign_mapIs;
    recheck_comm(r.prog, r.stage1);
  });
  stage("stage2", [&] {
    r.stage2 = lower(r.stage1);
    if (!is_purely_imperative(r.stage2)) internal_error("Stage II left functional primitives");
    recheck_comm(r.prog, r.stage2);
  });
  if (o.codegen.target == Target::OpenCL) {
    stage("emit", [&] {
      r.kernel = build_kernel(r.prog, r.stage2, o.codegen, o.function_name);
      r.code = emit_kernel(*r.kernel);
    });
  } else {
    stage("emit", [&] {
      r.unit = codegen_program(r.prog, r.stage2, o.codegen, o.function_name);
      r.code = render_unit(*r.unit);
    });
  }
  return r;
}

std::string target_extension(Target t) {
  switch (t) {
    case Target::PseudoC:
      return ".pseudo.c";
    case Target::COpenMP:
      return ".c";
    case Target::OpenCL:
      return ".cl";
  }
  return ".c";
}

}  // namespace dpia
