#pragma once

#include <set>
#include <string>

#include "dpia/program.hpp"
#include "dpia/sexp.hpp"

namespace dpia {

// Parses and elaborates a `.dpia` program. Elided size and data type
// arguments of primitives are inferred from operand types; with `check` the
// result is also run through the SCIR checker.
Program parse_program(const std::string& text, bool check = true);

// Parses one phrase in the scope of `ctx`'s nat and phrase parameters.
Phrase parse_phrase(const std::string& text, const Program& ctx = {});

Nat parse_nat(const Sexp& s, const std::set<std::string>& nat_scope);
Data parse_data(const Sexp& s, const std::set<std::string>& nat_scope,
                const std::set<std::string>& data_scope = {});
PType parse_ptype(const Sexp& s, const std::set<std::string>& nat_scope,
                  const std::set<std::string>& data_scope = {});

// Convenience for tests: a single form, with every identifier treated as a
// nat variable.
Data parse_data_text(const std::string& text);
PType parse_ptype_text(const std::string& text);

}  // namespace dpia
