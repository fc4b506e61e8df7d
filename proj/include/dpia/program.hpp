#pragma once

#include <string>
#include <vector>

#include "dpia/phrase.hpp"

namespace dpia {

struct Param {
  std::string name;
  PType type;
  SrcSpan span;
};

// A closed program: nat parameters, phrase parameters and one body.
struct Program {
  std::vector<std::string> nats;
  std::vector<Param> params;
  Phrase body;
  // The acc or var parameter that receives the result; empty when none.
  std::string output;

  const Param* find_param(const std::string& name) const {
    for (auto& p : params) {
      if (p.name == name) return &p;
    }
    return nullptr;
  }
};

}  // namespace dpia
