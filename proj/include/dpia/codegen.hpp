#pragma once

#include <map>
#include <string>
#include <vector>

#include "dpia/cast.hpp"
#include "dpia/program.hpp"
#include "dpia/simplify.hpp"
#include "dpia/value.hpp"

namespace dpia {

enum class Target { PseudoC, COpenMP, OpenCL };
std::string target_name(Target t);

struct CodegenOptions {
  Target target = Target::PseudoC;
  NumMode mode = NumMode::Float;
  bool simplify = true;
  bool init_new = false;
  bool heap = false;
  // Test-only: emits split's flat index with the two coordinates swapped.
  bool fault_flip_split = false;
  // Keeps newGlobal/newLocal as nested declarations in kernels; only for
  // simulation before hoisting, the result is not valid OpenCL.
  bool allow_nested_alloc = false;
};

// A phrase-level parameter of the generated function.
struct GenParam {
  std::string name;
  PType type;
  c::Param::Role role = c::Param::Role::Input;
  std::string space;
};

struct CUnit {
  CodegenOptions opts;
  std::vector<Data> structs;  // pair types, dependencies first
  c::Function fn;
};

// Stage III for a purely imperative, beta-normal comm phrase.
CUnit codegen_function(const std::string& name, const std::vector<std::string>& nats,
                       const std::vector<GenParam>& params, const Phrase& body,
                       const CodegenOptions& opts);
// Outputs are the program's acc and var parameters, inputs its exp
// parameters, then one int per nat parameter.
CUnit codegen_program(const Program& prog, const Phrase& stage2, const CodegenOptions& opts,
                      const std::string& name = "dpia_main");

// Deterministic struct name for a data type: pair_num_num, arr8_num, vec4.
std::string mangle_data(const Data& d);
// C spelling of a scalar element: float/long, int for idx, floatN/longN for
// OpenCL vectors, the struct name for pairs.
std::string c_elem_type(const Data& leaf, const CodegenOptions& opts);
// Array layers peeled off a storage type (vectors count as a layer outside
// OpenCL) and the remaining element type.
struct Layout {
  std::vector<Nat> dims;
  Data elem;
};
Layout storage_layout(const Data& d, Target t);

// Size expression in C; nat variables are renamed through `names`.
c::ExprP nat_to_cexpr(const Nat& n, const std::map<std::string, std::string>& names);

std::string render_expr(const c::ExprP& e, const CodegenOptions& opts);
std::string render_unit(const CUnit& u);

}  // namespace dpia
