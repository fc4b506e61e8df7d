#pragma once

#include <string>

#include "dpia/phrase.hpp"
#include "dpia/program.hpp"
#include "dpia/sexp.hpp"

namespace dpia {

std::string literal_text(const Literal& l);

Sexp phrase_to_sexp(const Phrase& p);
// Surface syntax with every type argument explicit; lines are broken at 80
// columns.
std::string pretty_print(const Phrase& p);
std::string program_to_text(const Program& prog);

// Tree dump, one node per line: indentation, tag, then attributes.
std::string dump_ast(const Phrase& p);

}  // namespace dpia
