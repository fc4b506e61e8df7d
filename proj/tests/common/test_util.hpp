#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dpia/eval_imp.hpp"
#include "dpia/program.hpp"

namespace testutil {

inline std::string read_program(const std::string& name) {
  std::ifstream in(std::string(DPIA_EXAMPLES_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing test program " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Zeroed cells for every acc and var parameter.
inline dpia::Store with_outputs(const dpia::Program& p, dpia::Store s, const dpia::NatEnv& sigma,
                                dpia::NumMode mode = dpia::NumMode::Int) {
  for (auto& prm : p.params) {
    if (prm.type->k == dpia::PhraseTypeNode::K::Exp) continue;
    dpia::Data d =
        prm.type->k == dpia::PhraseTypeNode::K::Acc ? prm.type->data : dpia::as_var_type(prm.type);
    s[prm.name] = dpia::zero_value(d, sigma, mode);
  }
  return s;
}

inline dpia::Value ints(std::initializer_list<int64_t> xs) {
  std::vector<dpia::Value> v;
  for (auto x : xs) v.push_back(dpia::value_num(x));
  return dpia::value_array(std::move(v));
}

}  // namespace testutil
