#include "dpia/sexp.hpp"

#include <cctype>

#include "dpia/error.hpp"

namespace dpia {

std::string Sexp::head() const {
  if (is_atom || items.empty() || !items[0].is_atom) return "";
  return items[0].text;
}

namespace {

class Reader {
 public:
  explicit Reader(const std::string& t) : t_(t) {}

  std::vector<Sexp> all() {
    std::vector<Sexp> out;
    skip_ws();
    while (pos_ < t_.size()) {
      out.push_back(form());
      skip_ws();
    }
    return out;
  }

 private:
  const std::string& t_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;

  SrcSpan here() const { return SrcSpan{line_, col_}; }

  void bump() {
    if (t_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < t_.size()) {
      char c = t_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else if (c == ';' && pos_ + 1 < t_.size() && t_[pos_ + 1] == ';') {
        while (pos_ < t_.size() && t_[pos_] != '\n') bump();
      } else {
        break;
      }
    }
  }

  Sexp form() {
    SrcSpan start = here();
    char c = t_[pos_];
    if (c == ')') parse_error("unexpected ')'", start);
    if (c == '(') {
      bump();
      std::vector<Sexp> items;
      skip_ws();
      while (pos_ < t_.size() && t_[pos_] != ')') {
        items.push_back(form());
        skip_ws();
      }
      if (pos_ >= t_.size()) parse_error("unterminated list", start);
      bump();
      return Sexp::list(std::move(items), start);
    }
    std::string a;
    while (pos_ < t_.size()) {
      char d = t_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')') break;
      if (d == ';' && pos_ + 1 < t_.size() && t_[pos_ + 1] == ';') break;
      a.push_back(d);
      bump();
    }
    return Sexp::atom(a, start);
  }
};

void flat(const Sexp& s, std::string& out) {
  if (s.is_atom) {
    out += s.text;
    return;
  }
  out += '(';
  for (size_t i = 0; i < s.items.size(); ++i) {
    if (i) out += ' ';
    flat(s.items[i], out);
  }
  out += ')';
}

void pretty(const Sexp& s, int indent, int width, std::string& out) {
  std::string f = sexp_to_string(s);
  if (s.is_atom || indent + static_cast<int>(f.size()) <= width || s.items.size() < 2) {
    out += f;
    return;
  }
  // Keep the head and the first argument on the opening line when the head is
  // an atom; remaining items go one per line.
  out += '(';
  std::string pad(indent + 2, ' ');
  size_t first = 0;
  if (s.items[0].is_atom) {
    out += s.items[0].text;
    first = 1;
    if (s.items.size() > 1 && s.items[1].is_atom) {
      out += ' ' + s.items[1].text;
      first = 2;
    }
  } else {
    pretty(s.items[0], indent + 1, width, out);
    first = 1;
  }
  for (size_t i = first; i < s.items.size(); ++i) {
    out += '\n' + pad;
    pretty(s.items[i], indent + 2, width, out);
  }
  out += ')';
}

}  // namespace

std::vector<Sexp> read_sexps(const std::string& text) { return Reader(text).all(); }

std::string sexp_to_string(const Sexp& s) {
  std::string out;
  flat(s, out);
  return out;
}

std::string sexp_to_text(const Sexp& s, int width) {
  std::string out;
  pretty(s, 0, width, out);
  return out;
}

}  // namespace dpia
