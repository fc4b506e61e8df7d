#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpia/phrase.hpp"
#include "dpia/types.hpp"

namespace dpia {

enum class PrimGroup { Functional, Imperative, Intermediate };

struct PrimInfo {
  std::string name;
  PType type;  // closed; a chain of dependent functions ending in phrase arguments
  std::vector<Kind> tkinds;
  int nargs = 0;
  PrimGroup group = PrimGroup::Functional;
  // + - * / negate := accept any scalar-like operand type; `type` is the num
  // instance.
  bool overloaded = false;
};

const PrimInfo* lookup_prim(const std::string& name);
bool is_prim_name(const std::string& name);
const std::vector<std::string>& all_prim_names();

// Result of peeling the type arguments off a primitive's type.
struct PrimSig {
  std::vector<PType> params;
  PType result;
};
PrimSig instantiate_prim(const PrimInfo& info, const std::vector<TypeArg>& targs);

bool is_map_family(const std::string& name);     // map, mapGlobal, ..., mapSeq
bool is_mapI_family(const std::string& name);    // mapI, mapIGlobal, ..., mapISeq
bool is_parfor_family(const std::string& name);  // parfor, parforGlobal, ...
bool is_new_family(const std::string& name);     // new, newGlobal, newLocal, newPrivate
bool is_to_family(const std::string& name);      // toGlobal, toLocal, toPrivate
bool is_arith_op(const std::string& name);       // + - * /

std::string mapI_of(const std::string& map_name);     // map -> mapI
std::string parfor_of(const std::string& mapI_name);  // mapI -> parfor; mapISeq -> ""
std::string new_of(const std::string& to_name);       // toLocal -> newLocal

// asVector_4 -> {"asVector", 4}
struct VecPrim {
  std::string base;
  int width;
};
std::optional<VecPrim> vec_prim(const std::string& name);
std::string vec_prim_name(const std::string& base, int width);

}  // namespace dpia
