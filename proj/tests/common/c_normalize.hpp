#pragma once

// Canonical form of small C / OpenCL listings for golden comparisons: blocks
// are flattened, loop and local variable names become L<k> / V<k> in order of
// binding, initialised declarations are split into declaration plus
// assignment, float literals lose their suffix, + and * operands are sorted
// and *p becomes p.

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cnorm {

struct Node {
  std::string kind;  // num, id, bin, neg, deref, index, call, cast, member
  std::string text;
  std::vector<std::shared_ptr<Node>> kids;
};
using NodeP = std::shared_ptr<Node>;

struct Stmt {
  std::string kind;  // loop, decl, assign, call
  std::string keyword;  // loop: for/parfor; decl: type
  std::string var;
  NodeP init, bound, step, lhs, rhs;
  std::vector<NodeP> dims;
  std::vector<Stmt> body;
};

struct Options {
  // Names kept verbatim (parameters); everything else bound is renamed.
  std::set<std::string> externals;
  // Applied to identifiers before anything else, e.g. output -> out, N -> 8.
  std::map<std::string, std::string> substitute;
  // Replace index arguments of vload/vstore and array subscripts by "_".
  bool drop_indices = false;
};

class Parser {
 public:
  explicit Parser(const std::string& src) { lex(src); }

  std::vector<Stmt> parse() {
    std::vector<Stmt> out;
    skip_header();
    while (pos_ < toks_.size()) statement(out);
    return out;
  }

 private:
  std::vector<std::string> toks_;
  size_t pos_ = 0;

  static bool is_type(const std::string& t) {
    static const std::set<std::string> types = {"float",  "int",    "long",  "double",
                                                "float2", "float4", "float8", "float16",
                                                "long4",  "const",  "local", "global",
                                                "private"};
    return types.count(t) > 0;
  }

  void lex(const std::string& s) {
    size_t i = 0;
    while (i < s.size()) {
      char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (s.compare(i, 2, "/*") == 0) {
        size_t e = s.find("*/", i + 2);
        i = e == std::string::npos ? s.size() : e + 2;
      } else if (s.compare(i, 2, "//") == 0 || c == '#') {
        while (i < s.size() && s[i] != '\n') ++i;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
        toks_.push_back(s.substr(i, j - i));
        i = j;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t j = i;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
        toks_.push_back(s.substr(i, j - i));
        i = j;
      } else {
        static const char* two[] = {"+=", "-=", "<=", ">=", "==", "++", "--", "->"};
        bool done = false;
        for (const char* t : two) {
          if (s.compare(i, 2, t) == 0) {
            toks_.push_back(t);
            i += 2;
            done = true;
            break;
          }
        }
        if (!done) toks_.push_back(std::string(1, s[i++]));
      }
    }
  }

  const std::string& peek(size_t k = 0) const {
    static const std::string eof;
    return pos_ + k < toks_.size() ? toks_[pos_ + k] : eof;
  }
  std::string next() { return toks_.at(pos_++); }
  void expect(const std::string& t) {
    if (peek() != t) throw std::runtime_error("expected '" + t + "' near token " + peek());
    ++pos_;
  }

  // Drops "kernel void NAME(...) {" and the matching closing brace.
  void skip_header() {
    size_t k = pos_;
    if (peek() == "kernel") ++k;
    if (k < toks_.size() && toks_[k] == "void") {
      pos_ = k + 2;
      int depth = 0;
      do {
        if (peek() == "(") ++depth;
        if (peek() == ")") --depth;
        ++pos_;
      } while (depth > 0);
      expect("{");
      toks_.pop_back();
    }
  }

  void statement(std::vector<Stmt>& out) {
    if (peek() == "{") {
      ++pos_;
      while (peek() != "}") statement(out);
      ++pos_;
      return;
    }
    if (peek() == ";") {
      ++pos_;
      return;
    }
    if (peek() == "for" || peek() == "parfor") {
      Stmt s;
      s.kind = "loop";
      s.keyword = next();
      expect("(");
      expect("int");
      s.var = next();
      expect("=");
      s.init = expr();
      expect(";");
      next();
      expect("<");
      s.bound = expr();
      expect(";");
      next();
      if (peek() == "++") {
        ++pos_;
        s.step = leaf("num", "1");
      } else {
        expect("+=");
        s.step = expr();
      }
      expect(")");
      statement(s.body);
      out.push_back(std::move(s));
      return;
    }
    if (is_type(peek())) {
      std::string type;
      while (is_type(peek()) || peek() == "*" || peek() == "restrict") {
        std::string t = next();
        if (t != "const" && t != "private") type += (type.empty() ? "" : " ") + t;
      }
      Stmt s;
      s.kind = "decl";
      s.keyword = type;
      s.var = next();
      while (peek() == "[") {
        ++pos_;
        s.dims.push_back(expr());
        expect("]");
      }
      NodeP init;
      if (peek() == "=") {
        ++pos_;
        init = expr();
      }
      expect(";");
      std::string name = s.var;
      out.push_back(std::move(s));
      if (init) {
        Stmt a;
        a.kind = "assign";
        a.lhs = leaf("id", name);
        a.rhs = init;
        out.push_back(std::move(a));
      }
      return;
    }
    NodeP lhs = expr();
    Stmt s;
    if (peek() == "=") {
      ++pos_;
      s.kind = "assign";
      s.lhs = lhs;
      s.rhs = expr();
    } else {
      s.kind = "call";
      s.rhs = lhs;
    }
    expect(";");
    out.push_back(std::move(s));
  }

  static NodeP leaf(const std::string& kind, const std::string& text) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->text = text;
    return n;
  }
  static NodeP node(const std::string& kind, const std::string& text, std::vector<NodeP> kids) {
    auto n = leaf(kind, text);
    n->kids = std::move(kids);
    return n;
  }

  static int prec(const std::string& op) {
    if (op == "+" || op == "-") return 1;
    if (op == "*" || op == "/" || op == "%") return 2;
    return 0;
  }

  NodeP expr(int min = 1) {
    NodeP l = unary();
    while (prec(peek()) >= min) {
      std::string op = next();
      NodeP r = expr(prec(op) + 1);
      l = node("bin", op, {l, r});
    }
    return l;
  }

  NodeP unary() {
    if (peek() == "-") {
      ++pos_;
      return node("neg", "", {unary()});
    }
    if (peek() == "*") {
      ++pos_;
      return node("deref", "", {unary()});
    }
    if (peek() == "(" && is_type(peek(1)) && peek(2) == ")") {
      ++pos_;
      std::string t = next();
      ++pos_;
      NodeP cast = leaf("cast", t);
      if (peek() == "(") {
        ++pos_;
        while (peek() != ")") {
          cast->kids.push_back(expr());
          if (peek() == ",") ++pos_;
        }
        ++pos_;
      } else {
        cast->kids.push_back(unary());
      }
      return cast;
    }
    return postfix(primary());
  }

  NodeP primary() {
    if (peek() == "(") {
      ++pos_;
      NodeP e = expr();
      expect(")");
      return e;
    }
    std::string t = next();
    if (std::isdigit(static_cast<unsigned char>(t[0]))) return leaf("num", t);
    return leaf("id", t);
  }

  NodeP postfix(NodeP e) {
    for (;;) {
      if (peek() == "[") {
        ++pos_;
        NodeP i = expr();
        expect("]");
        e = node("index", "", {e, i});
      } else if (peek() == "." || peek() == "->") {
        ++pos_;
        e = node("member", next(), {e});
      } else if (peek() == "(" && e->kind == "id") {
        ++pos_;
        auto call = leaf("call", e->text);
        while (peek() != ")") {
          call->kids.push_back(expr());
          if (peek() == ",") ++pos_;
        }
        ++pos_;
        e = call;
      } else {
        return e;
      }
    }
  }
};

class Printer {
 public:
  explicit Printer(const Options& o) : o_(o) {}

  std::vector<std::string> lines(const std::vector<Stmt>& body) {
    std::vector<std::string> out;
    emit(body, 0, out);
    return out;
  }

 private:
  const Options& o_;
  std::vector<std::map<std::string, std::string>> scopes_{{}};
  int loops_ = 0, vars_ = 0;

  std::string name(const std::string& raw) {
    std::string n = raw;
    if (auto it = o_.substitute.find(n); it != o_.substitute.end()) n = it->second;
    for (size_t k = scopes_.size(); k > 0; --k) {
      if (auto it = scopes_[k - 1].find(n); it != scopes_[k - 1].end()) return it->second;
    }
    return n;
  }

  static std::string number(const std::string& t) {
    std::string s = t;
    while (!s.empty() && (s.back() == 'f' || s.back() == 'F' || s.back() == 'l' || s.back() == 'L')) {
      s.pop_back();
    }
    double v = std::stod(s);
    if (v == static_cast<double>(static_cast<long long>(v))) {
      return std::to_string(static_cast<long long>(v));
    }
    return std::to_string(v);
  }

  void flatten(const NodeP& n, const std::string& op, std::vector<std::string>& out) {
    if (n->kind == "bin" && n->text == op) {
      flatten(n->kids[0], op, out);
      flatten(n->kids[1], op, out);
    } else {
      out.push_back(expr(n));
    }
  }

  std::string expr(const NodeP& n) {
    if (n->kind == "num") return number(n->text);
    if (n->kind == "id") return name(n->text);
    if (n->kind == "neg") return "(- " + expr(n->kids[0]) + ")";
    if (n->kind == "deref") return expr(n->kids[0]);
    if (n->kind == "member") return expr(n->kids[0]) + "." + n->text;
    if (n->kind == "index") {
      return expr(n->kids[0]) + "[" + (o_.drop_indices ? "_" : expr(n->kids[1])) + "]";
    }
    if (n->kind == "bin") {
      if (n->text == "+" || n->text == "*") {
        std::vector<std::string> ops;
        flatten(n, n->text, ops);
        std::sort(ops.begin(), ops.end());
        std::string s = "(" + n->text;
        for (auto& x : ops) s += " " + x;
        return s + ")";
      }
      return "(" + n->text + " " + expr(n->kids[0]) + " " + expr(n->kids[1]) + ")";
    }
    std::string s = n->kind == "cast" ? "(" + n->text + ")(" : name(n->text) + "(";
    bool vec_mem = n->kind == "call" && (n->text.rfind("vload", 0) == 0 || n->text.rfind("vstore", 0) == 0);
    for (size_t i = 0; i < n->kids.size(); ++i) {
      bool offset = vec_mem && ((n->text[1] == 'l' && i == 0) || (n->text[1] == 's' && i == 1));
      s += (i ? ", " : "") + (o_.drop_indices && offset ? std::string("_") : expr(n->kids[i]));
    }
    return s + ")";
  }

  void emit(const std::vector<Stmt>& body, int depth, std::vector<std::string>& out) {
    std::string ind(static_cast<size_t>(2 * depth), ' ');
    scopes_.emplace_back();
    for (auto& s : body) {
      if (s.kind == "loop") {
        std::string init = expr(s.init), bound = expr(s.bound), step = expr(s.step);
        std::string v = "L" + std::to_string(loops_++);
        scopes_.push_back({{s.var, v}});
        out.push_back(ind + s.keyword + " " + v + " = " + init + "; < " + bound + "; += " + step);
        emit(s.body, depth + 1, out);
        scopes_.pop_back();
      } else if (s.kind == "decl") {
        std::string dims;
        for (auto& d : s.dims) dims += "[" + expr(d) + "]";
        std::string v = o_.externals.count(s.var) ? s.var : "V" + std::to_string(vars_++);
        scopes_.back()[s.var] = v;
        out.push_back(ind + "decl " + s.keyword + " " + v + dims);
      } else if (s.kind == "assign") {
        out.push_back(ind + expr(s.lhs) + " = " + expr(s.rhs));
      } else {
        out.push_back(ind + expr(s.rhs));
      }
    }
    scopes_.pop_back();
  }
};

inline std::vector<std::string> normalize(const std::string& src, const Options& o = {}) {
  Parser p(src);
  std::vector<Stmt> body = p.parse();
  return Printer(o).lines(body);
}

// Loop keywords only, nested with parentheses: "parfor(parfor(for))for".
inline std::string loop_shape(const std::string& src) {
  Parser p(src);
  std::vector<Stmt> body = p.parse();
  std::string out;
  auto walk = [&](auto& self, const std::vector<Stmt>& b) -> void {
    for (auto& s : b) {
      if (s.kind != "loop") continue;
      out += s.keyword;
      bool inner = std::any_of(s.body.begin(), s.body.end(),
                               [](const Stmt& x) { return x.kind == "loop"; });
      if (inner) {
        out += "(";
        self(self, s.body);
        out += ")";
      }
    }
  };
  walk(walk, body);
  return out;
}

inline std::string join_lines(const std::vector<std::string>& ls) {
  std::string s;
  for (auto& l : ls) s += l + "\n";
  return s;
}

}  // namespace cnorm
