#pragma once

#include <string>
#include <vector>

#include "dpia/codegen.hpp"
#include "dpia/eval_imp.hpp"
#include "dpia/program.hpp"

namespace dpia {

struct HoistedBuffer {
  std::string name;
  Data type;
  std::string space;  // "global" or "local"
};

struct HoistResult {
  Phrase body;  // the program without the hoisted allocations
  std::vector<HoistedBuffer> buffers;  // in order of first occurrence
};

// Lifts every newGlobal, newLocal and plain new to the top. Sizes are
// multiplied by the trip counts of all enclosing loops (local buffers: only
// loops inside the enclosing work-group loop). Throws a type error for a
// local allocation outside any work-group loop.
HoistResult hoist_allocations(const Phrase& p);
// The hoisted buffers as top-level allocations around the body.
Phrase rewrap_hoisted(const HoistResult& h);

// Work-group loops nested in local or global loops and similar violations.
std::vector<std::string> hierarchy_lint(const Phrase& p);

struct Kernel {
  CUnit unit;
  std::vector<HoistedBuffer> buffers;
  std::vector<std::string> warnings;
};

// Hoists, generates code and places local-memory barriers. With
// opts.allow_nested_alloc the allocations stay nested (simulation only).
Kernel build_kernel(const Program& prog, const Phrase& stage2, CodegenOptions opts,
                    const std::string& name = "KERNEL");
std::string emit_kernel(const Kernel& k);

// Inserts a barrier after each loop that writes a local buffer read by a
// later statement of the same block.
std::vector<c::StmtP> place_barriers(const std::vector<c::StmtP>& body,
                                     const std::set<std::string>& local_buffers);

// Runs the kernel on the C interpreter: all (group, local) id pairs execute
// the stride loops in turn, with per-loop write footprints checked.
ExecResult simulate_kernel(const Kernel& k, const Store& inputs, const NatEnv& sigma,
                           Launch launch = {}, const ImpOptions& o = {});

}  // namespace dpia
