#include "dpia/pretty.hpp"

#include <cstdio>

#include "dpia/prims.hpp"

namespace dpia {

using K = PhraseNode::K;

std::string literal_text(const Literal& l) {
  if (l.is_int) return std::to_string(l.i);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", l.f);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace {

Sexp A(std::string s) { return Sexp::atom(std::move(s)); }

Sexp targ_sexp(const TypeArg& t) { return A(typearg_to_sexpr(t)); }

void flatten_seq(const Phrase& p, std::vector<Sexp>& out) {
  if (auto c = pair_components(p); c && is_prim_app(p, "seq")) {
    out.push_back(phrase_to_sexp(c->first));
    flatten_seq(c->second, out);
    return;
  }
  out.push_back(phrase_to_sexp(p));
}

}  // namespace

Sexp phrase_to_sexp(const Phrase& p) {
  if (auto m = match_prim(p)) {
    const std::string& name = m->name;
    if (name == "skip") return A("skip");
    bool pair_arg = m->args.size() == 1 && m->args[0]->k == K::Pair;
    if ((is_arith_op(name) || name == ":=") && pair_arg) {
      return Sexp::list({A(name), phrase_to_sexp(m->args[0]->a), phrase_to_sexp(m->args[0]->b)});
    }
    if (name == "seq" && pair_arg) {
      std::vector<Sexp> items{A("seq")};
      flatten_seq(p, items);
      return Sexp::list(std::move(items));
    }
    if (!is_arith_op(name) && name != ":=" && name != "seq") {
      std::vector<Sexp> items;
      if (auto v = vec_prim(name)) {
        items.push_back(A(v->base));
        items.push_back(A(std::to_string(v->width)));
      } else {
        items.push_back(A(name));
      }
      for (auto& t : m->targs) items.push_back(targ_sexp(t));
      for (auto& a : m->args) items.push_back(phrase_to_sexp(a));
      return Sexp::list(std::move(items));
    }
  }
  switch (p->k) {
    case K::Ident:
      return A(p->name);
    case K::Prim:
      return A(p->name);
    case K::Lit:
      if (p->lit.type->k == DataTypeNode::K::Num) return A(literal_text(p->lit));
      return Sexp::list({A("lit"), A(literal_text(p->lit)), A(data_to_sexpr(p->lit.type))});
    case K::Lam: {
      Sexp binder = p->ann ? Sexp::list({A(p->name), A(ptype_to_sexpr(p->ann))}) : A(p->name);
      return Sexp::list({A("lam"), binder, phrase_to_sexp(p->a)});
    }
    case K::TLam:
      return Sexp::list({A("tlam"), A(p->name), A(kind_name(p->tkind)), phrase_to_sexp(p->a)});
    case K::App:
      return Sexp::list({A("app"), phrase_to_sexp(p->a), phrase_to_sexp(p->b)});
    case K::TApp:
      return Sexp::list({A("tapp"), phrase_to_sexp(p->a), targ_sexp(p->targ)});
    case K::Pair:
      return Sexp::list({A("tuple"), phrase_to_sexp(p->a), phrase_to_sexp(p->b)});
    case K::Proj:
      if (p->a->k == K::Ident) return A(p->a->name + "." + std::to_string(p->proj));
      return Sexp::list({A(p->proj == 1 ? "proj1" : "proj2"), phrase_to_sexp(p->a)});
  }
  return A("?");
}

std::string pretty_print(const Phrase& p) { return sexp_to_text(phrase_to_sexp(p), 80); }

std::string program_to_text(const Program& prog) {
  std::string out;
  for (auto& n : prog.nats) out += "(nat " + n + ")\n";
  for (auto& p : prog.params) out += "(param " + p.name + " " + ptype_to_sexpr(p.type) + ")\n";
  out += pretty_print(prog.body) + "\n";
  return out;
}

namespace {

void dump(const Phrase& p, int depth, std::string& out) {
  out.append(depth * 2, ' ');
  switch (p->k) {
    case K::Ident:
      out += "Ident " + p->name + "\n";
      return;
    case K::Prim:
      out += "Prim " + p->name + "\n";
      return;
    case K::Lit:
      out += "Lit " + literal_text(p->lit) + " " + data_to_sexpr(p->lit.type) + "\n";
      return;
    case K::Lam:
      out += "Lam " + p->name;
      if (p->ann) out += " " + ptype_to_sexpr(p->ann);
      out += "\n";
      dump(p->a, depth + 1, out);
      return;
    case K::TLam:
      out += "TLam " + p->name + " " + kind_name(p->tkind) + "\n";
      dump(p->a, depth + 1, out);
      return;
    case K::App:
      out += "App\n";
      dump(p->a, depth + 1, out);
      dump(p->b, depth + 1, out);
      return;
    case K::TApp:
      out += "TApp " + kind_name(p->targ.kind) + " " + typearg_to_sexpr(p->targ) + "\n";
      dump(p->a, depth + 1, out);
      return;
    case K::Pair:
      out += "Pair\n";
      dump(p->a, depth + 1, out);
      dump(p->b, depth + 1, out);
      return;
    case K::Proj:
      out += "Proj " + std::to_string(p->proj) + "\n";
      dump(p->a, depth + 1, out);
      return;
  }
}

}  // namespace

std::string dump_ast(const Phrase& p) {
  std::string out;
  dump(p, 0, out);
  return out;
}

}  // namespace dpia
