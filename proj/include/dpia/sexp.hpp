#pragma once

#include <string>
#include <vector>

#include "dpia/phrase.hpp"

namespace dpia {

struct Sexp {
  bool is_atom = true;
  std::string text;
  std::vector<Sexp> items;
  SrcSpan span;

  static Sexp atom(std::string t, SrcSpan s = {}) { return Sexp{true, std::move(t), {}, s}; }
  static Sexp list(std::vector<Sexp> xs, SrcSpan s = {}) {
    return Sexp{false, "", std::move(xs), s};
  }
  bool is(const std::string& a) const { return is_atom && text == a; }
  // Head atom of a non-empty list, or "".
  std::string head() const;
};

// Reads all top-level forms. `;;` starts a comment running to end of line.
std::vector<Sexp> read_sexps(const std::string& text);

std::string sexp_to_string(const Sexp& s);
// Breaks lists whose flat rendering would exceed `width` columns.
std::string sexp_to_text(const Sexp& s, int width = 80);

}  // namespace dpia
