#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dpia/nat.hpp"
#include "dpia/types.hpp"

namespace dpia {

struct SrcSpan {
  int line = 0;
  int col = 0;
  bool valid() const { return line > 0; }
  std::string str() const;
};

// Argument of a type application: a nat term or a data type.
struct TypeArg {
  Kind kind = Kind::Nat;
  Nat nat;
  Data data;
  static TypeArg of(Nat n) { return TypeArg{Kind::Nat, std::move(n), nullptr}; }
  static TypeArg of(Data d) { return TypeArg{Kind::Data, Nat(), std::move(d)}; }
};
bool typearg_equal(const TypeArg& a, const TypeArg& b);
std::string typearg_to_sexpr(const TypeArg& a);

struct Literal {
  bool is_int = true;
  int64_t i = 0;
  double f = 0.0;
  Data type;  // num, idx(n) or a vector type (broadcast)
  double as_double() const { return is_int ? static_cast<double>(i) : f; }
  int64_t as_int() const { return is_int ? i : static_cast<int64_t>(f); }
};

struct PhraseNode;
using Phrase = std::shared_ptr<const PhraseNode>;

struct PhraseNode {
  enum class K { Ident, Lam, App, TLam, TApp, Pair, Proj, Prim, Lit };
  K k;
  std::string name;  // identifier, lambda binder, type binder, or primitive
  PType ann;  // optional annotation on a lambda binder
  Phrase a, b;  // body / function+argument / pair components / projected phrase
  TypeArg targ;
  Kind tkind = Kind::Nat;  // kind of a type-lambda binder
  int proj = 0;
  Literal lit;
  SrcSpan span;
};

namespace ph {
Phrase ident(std::string name, SrcSpan span = {});
Phrase lam(std::string binder, PType ann, Phrase body, SrcSpan span = {});
Phrase app(Phrase f, Phrase a, SrcSpan span = {});
Phrase apps(Phrase f, const std::vector<Phrase>& args);
Phrase tlam(std::string binder, Kind k, Phrase body, SrcSpan span = {});
Phrase tapp(Phrase f, TypeArg t, SrcSpan span = {});
Phrase pair(Phrase a, Phrase b, SrcSpan span = {});
Phrase proj(Phrase p, int i, SrcSpan span = {});
Phrase prim(std::string name, SrcSpan span = {});
Phrase lit(Literal l, SrcSpan span = {});
Phrase num(int64_t v);
Phrase numf(double v);
Phrase idx_lit(int64_t v, Nat bound);
Phrase with_span(const Phrase& p, SrcSpan span);

// Fully applied primitive: type arguments first, then phrase arguments.
Phrase prim_app(const std::string& name, const std::vector<TypeArg>& targs,
                const std::vector<Phrase>& args);
Phrase binop(const std::string& op, Phrase x, Phrase y);
Phrase negate(Phrase x);
Phrase assign(Phrase acc, Phrase e);
Phrase seq(Phrase c1, Phrase c2);
Phrase skip();
}  // namespace ph

struct PrimApp {
  std::string name;
  std::vector<TypeArg> targs;
  std::vector<Phrase> args;
  const Nat& nat(size_t i) const { return targs.at(i).nat; }
  const Data& data(size_t i) const { return targs.at(i).data; }
};

// Recognizes a complete application of a primitive (all type and phrase
// arguments present).
std::optional<PrimApp> match_prim(const Phrase& p);
bool is_prim_app(const Phrase& p, const std::string& name);
// For primitives taking a single product argument (+, :=, seq): components
// of the pair, when the argument is a literal pair.
std::optional<std::pair<Phrase, Phrase>> pair_components(const Phrase& p);

std::set<std::string> free_idents(const Phrase& p);
void free_type_vars(const Phrase& p, std::set<std::string>& nats,
                    std::set<std::string>& datas);
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

// Capture-avoiding substitution.
Phrase substitute(const Phrase& body, const std::string& x, const Phrase& repl);
Phrase substitute_nat(const Phrase& body, const std::string& v, const Nat& n);
Phrase substitute_data(const Phrase& body, const std::string& v, const Data& d);

bool alpha_equal(const Phrase& a, const Phrase& b);

// Reduce (lam x. P) Q, (tlam x. P) e and projections of literal pairs until
// none remain. Eta is not applied.
Phrase beta_normalize(const Phrase& p);

// Counts nodes that are complete applications of primitives satisfying pred.
size_t count_prims(const Phrase& p, const std::function<bool(const std::string&)>& pred);
size_t phrase_size(const Phrase& p);

}  // namespace dpia
