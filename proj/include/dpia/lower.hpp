#pragma once

#include "dpia/phrase.hpp"

namespace dpia {

// Replaces every mapI-family and reduceI node by its loop definition.
// Accumulators of reduceI live in newPrivate; compound accumulators are
// double-buffered per iteration.
Phrase expand_intermediate(const Phrase& p);

// Beta normalization followed by eta-expansion of loop and allocation bodies
// that are not literal lambdas.
Phrase normalize(const Phrase& p);

// Stage II: expand_intermediate then normalize.
Phrase lower(const Phrase& stage1);

// True when p contains only imperative primitives, layout combinators and
// arithmetic (no map, reduce, mapI, reduceI or toX).
bool is_purely_imperative(const Phrase& p);

}  // namespace dpia
