#pragma once

#include <map>
#include <string>

#include "dpia/phrase.hpp"
#include "dpia/value.hpp"

namespace dpia {

using ValueEnv = std::map<std::string, Value>;

// Reference semantics of the functional sublanguage. Hierarchy-specific maps
// behave as map and toGlobal/toLocal/toPrivate as application.
Value eval_fn(const Phrase& e, const ValueEnv& env, const NatEnv& sigma,
              NumMode mode = NumMode::Int);

}  // namespace dpia
