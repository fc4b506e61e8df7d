#include "dpia/parser.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>

#include "dpia/checker.hpp"
#include "dpia/error.hpp"
#include "dpia/prims.hpp"

namespace dpia {

using TK = PhraseTypeNode::K;
using DK = DataTypeNode::K;

namespace {

struct Scope {
  const std::set<std::string>* nats = nullptr;  // null: any identifier is a nat
  const std::set<std::string>* datas = nullptr;
};

bool is_int_atom(const std::string& s) {
  size_t i = (s[0] == '-' && s.size() > 1) ? 1 : 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

bool is_number_atom(const std::string& s) {
  if (s.empty()) return false;
  size_t i = s[0] == '-' ? 1 : 0;
  if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end && *end == '\0';
}

uint64_t to_u64(const Sexp& s) {
  if (!s.is_atom || !is_int_atom(s.text) || s.text[0] == '-') {
    parse_error("expected a natural number, found '" + sexp_to_string(s) + "'", s.span);
  }
  return std::stoull(s.text);
}

Nat nat_of(const Sexp& s, const Scope& sc) {
  if (s.is_atom) {
    if (is_int_atom(s.text)) return Nat(to_u64(s));
    if (sc.nats && !sc.nats->count(s.text)) {
      type_error("unbound nat variable '" + s.text + "'", s.span);
    }
    return Nat::var(s.text);
  }
  std::string h = s.head();
  if ((h == "+" || h == "*") && s.items.size() >= 3) {
    Nat acc = nat_of(s.items[1], sc);
    for (size_t i = 2; i < s.items.size(); ++i) {
      Nat x = nat_of(s.items[i], sc);
      acc = h == "+" ? acc + x : acc * x;
    }
    return acc;
  }
  parse_error("malformed nat expression '" + sexp_to_string(s) + "'", s.span);
}

Data data_of(const Sexp& s, const Scope& sc) {
  if (s.is_atom) {
    if (s.text == "num") return dt::num();
    if (sc.datas && !sc.datas->count(s.text)) {
      type_error("unbound data type variable '" + s.text + "'", s.span);
    }
    return dt::var(s.text);
  }
  std::string h = s.head();
  size_t n = s.items.size();
  if (h == "idx" && n == 2) return dt::idx(nat_of(s.items[1], sc));
  if (h == "arr" && n == 3) return dt::array(nat_of(s.items[1], sc), data_of(s.items[2], sc));
  if (h == "pair" && n == 3) return dt::pair(data_of(s.items[1], sc), data_of(s.items[2], sc));
  if (h == "vec" && n == 2) {
    int w = static_cast<int>(to_u64(s.items[1]));
    if (!is_legal_vector_width(w)) {
      type_error("illegal vector width " + std::to_string(w), s.span);
    }
    return dt::vec(w);
  }
  parse_error("malformed data type '" + sexp_to_string(s) + "'", s.span);
}

PType ptype_of(const Sexp& s, const Scope& sc) {
  if (s.is_atom) {
    if (s.text == "comm") return pt::comm();
    parse_error("malformed phrase type '" + s.text + "'", s.span);
  }
  std::string h = s.head();
  size_t n = s.items.size();
  if (h == "exp" && n == 2) return pt::exp(data_of(s.items[1], sc));
  if (h == "acc" && n == 2) return pt::acc(data_of(s.items[1], sc));
  if (h == "var" && n == 2) return pt::var(data_of(s.items[1], sc));
  if (h == "prod" && n == 3) return pt::prod(ptype_of(s.items[1], sc), ptype_of(s.items[2], sc));
  if ((h == "->" || h == "->p") && n >= 3) {
    PType t = ptype_of(s.items[n - 1], sc);
    for (size_t i = n - 1; i-- > 1;) t = pt::fn(ptype_of(s.items[i], sc), t, h == "->p");
    return t;
  }
  if ((h == "nat-fn" || h == "data-fn") && n == 3 && s.items[1].is_atom) {
    const std::string& b = s.items[1].text;
    std::set<std::string> nats = sc.nats ? *sc.nats : std::set<std::string>{};
    std::set<std::string> datas = sc.datas ? *sc.datas : std::set<std::string>{};
    (h == "nat-fn" ? nats : datas).insert(b);
    Scope inner{sc.nats ? &nats : nullptr, sc.datas ? &datas : nullptr};
    return pt::depfn(b, h == "nat-fn" ? Kind::Nat : Kind::Data, ptype_of(s.items[2], inner));
  }
  parse_error("malformed phrase type '" + sexp_to_string(s) + "'", s.span);
}

bool is_meta(const std::string& name) { return !name.empty() && name[0] == '?'; }

// Elaboration state: metavariables for elided type arguments and their
// solutions.
class Elab {
 public:
  std::set<std::string> nat_scope, data_scope;
  std::map<std::string, PType> env;

  Nat zonk(const Nat& n) {
    Nat cur = n;
    for (int guard = 0; guard < 1000; ++guard) {
      bool changed = false;
      for (auto& v : nat_free_vars(cur)) {
        auto it = nat_sol_.find(v);
        if (it != nat_sol_.end()) {
          cur = nat_subst(cur, v, it->second);
          changed = true;
        }
      }
      if (!changed) break;
    }
    return nat_normalize(cur);
  }

  Data zonk(const Data& d) {
    switch (d->k) {
      case DK::Num:
      case DK::Vec:
        return d;
      case DK::Idx:
        return dt::idx(zonk(d->size));
      case DK::Array:
        return dt::array(zonk(d->size), zonk(d->a));
      case DK::Pair:
        return dt::pair(zonk(d->a), zonk(d->b));
      case DK::Var: {
        auto it = data_sol_.find(d->name);
        return it == data_sol_.end() ? d : zonk(it->second);
      }
    }
    return d;
  }

  PType zonk(const PType& t) {
    switch (t->k) {
      case TK::Exp:
        return pt::exp(zonk(t->data));
      case TK::Acc:
        return pt::acc(zonk(t->data));
      case TK::Comm:
        return t;
      case TK::Prod:
        return pt::prod(zonk(t->a), zonk(t->b));
      case TK::Fn:
        return pt::fn(zonk(t->a), zonk(t->b), t->passive);
      case TK::DepFn:
        return pt::depfn(t->binder, t->binder_kind, zonk(t->a));
    }
    return t;
  }

  TypeArg zonk(const TypeArg& a) {
    return a.kind == Kind::Nat ? TypeArg::of(zonk(a.nat)) : TypeArg::of(zonk(a.data));
  }

  Phrase zonk(const Phrase& p) {
    using K = PhraseNode::K;
    switch (p->k) {
      case K::Ident:
      case K::Prim:
        return p;
      case K::Lit: {
        Literal l = p->lit;
        l.type = zonk(l.type);
        return ph::lit(l, p->span);
      }
      case K::Lam:
        return ph::lam(p->name, p->ann ? zonk(p->ann) : nullptr, zonk(p->a), p->span);
      case K::TLam:
        return ph::tlam(p->name, p->tkind, zonk(p->a), p->span);
      case K::App:
        return ph::app(zonk(p->a), zonk(p->b), p->span);
      case K::TApp:
        return ph::tapp(zonk(p->a), zonk(p->targ), p->span);
      case K::Pair:
        return ph::pair(zonk(p->a), zonk(p->b), p->span);
      case K::Proj:
        return ph::proj(zonk(p->a), p->proj, p->span);
    }
    return p;
  }

  Nat fresh_nat(SrcSpan span) {
    std::string name = "?" + std::to_string(++counter_);
    meta_span_[name] = span;
    return Nat::var(name);
  }

  Data fresh_data(SrcSpan span, bool default_num) {
    std::string name = "?" + std::to_string(++counter_);
    meta_span_[name] = span;
    if (default_num) defaults_.insert(name);
    return dt::var(name);
  }

  // Unsolved literal and operator metas become num; any other unsolved meta
  // is an ambiguity.
  void finish() {
    solve_pending(true);
    for (auto& m : defaults_) {
      Data z = zonk(dt::var(m));
      if (z->k == DK::Var && is_meta(z->name)) data_sol_[z->name] = dt::num();
    }
  }

  void ensure_resolved(const Phrase& p) {
    std::set<std::string> nats, datas;
    free_type_vars(p, nats, datas);
    for (auto* set : {&nats, &datas}) {
      for (auto& v : *set) {
        if (is_meta(v)) {
          type_error("ambiguous type or size argument; write it explicitly", meta_span_[v]);
        }
      }
    }
  }

  void unify(const PType& a0, const PType& b0, SrcSpan span) {
    PType a = zonk(a0), b = zonk(b0);
    if (!unify_p(a, b, span)) mismatch(b, a, span);
  }

  void unify(const Data& a, const Data& b, SrcSpan span) {
    if (!unify_d(a, b, span)) {
      type_error("type mismatch: expected " + data_to_string(zonk(b)) + ", found " +
                     data_to_string(zonk(a)),
                 span);
    }
  }

  [[noreturn]] void mismatch(const PType& expected, const PType& found, SrcSpan span) {
    type_error("type mismatch: expected " + ptype_to_string(zonk(expected)) + ", found " +
                   ptype_to_string(zonk(found)),
               span);
  }

  void solve_pending(bool final) {
    bool progress = true;
    while (progress && !pending_.empty()) {
      progress = false;
      auto work = std::move(pending_);
      pending_.clear();
      for (auto& c : work) {
        Nat a = zonk(c.a), b = zonk(c.b);
        int r = solve_nat(a, b);
        if (r < 0) {
          type_error("size mismatch: " + nat_to_infix(a) + " vs " + nat_to_infix(b), c.span);
        }
        if (r == 0) {
          pending_.push_back(c);
        } else {
          progress = true;
        }
      }
    }
    if (final && !pending_.empty()) {
      type_error("ambiguous size argument (" + nat_to_infix(zonk(pending_[0].a)) + " = " +
                     nat_to_infix(zonk(pending_[0].b)) + "); write it explicitly",
                 pending_[0].span);
    }
  }

 private:
  struct Pending {
    Nat a, b;
    SrcSpan span;
  };

  std::map<std::string, Nat> nat_sol_;
  std::map<std::string, Data> data_sol_;
  std::map<std::string, SrcSpan> meta_span_;
  std::set<std::string> defaults_;
  std::vector<Pending> pending_;
  int counter_ = 0;

  bool unify_p(const PType& a, const PType& b, SrcSpan span) {
    if (a->k != b->k) return false;
    switch (a->k) {
      case TK::Exp:
      case TK::Acc:
        return unify_d(a->data, b->data, span);
      case TK::Comm:
        return true;
      case TK::Prod:
      case TK::Fn:
        return unify_p(a->a, b->a, span) && unify_p(a->b, b->b, span);
      case TK::DepFn:
        return a->binder_kind == b->binder_kind &&
               ptype_equal(a, b);
    }
    return false;
  }

  bool occurs(const std::string& m, const Data& d) {
    std::set<std::string> nats, datas;
    data_collect_vars(d, nats, datas);
    return datas.count(m) > 0;
  }

  bool unify_d(const Data& a0, const Data& b0, SrcSpan span) {
    Data a = zonk(a0), b = zonk(b0);
    if (a->k == DK::Var && b->k == DK::Var && a->name == b->name) return true;
    if (a->k == DK::Var && is_meta(a->name)) return bind_data(a->name, b);
    if (b->k == DK::Var && is_meta(b->name)) return bind_data(b->name, a);
    if (a->k != b->k) return false;
    switch (a->k) {
      case DK::Num:
        return true;
      case DK::Vec:
        return a->width == b->width;
      case DK::Var:
        return false;
      case DK::Idx:
        return unify_n(a->size, b->size, span);
      case DK::Array:
        return unify_n(a->size, b->size, span) && unify_d(a->a, b->a, span);
      case DK::Pair:
        return unify_d(a->a, b->a, span) && unify_d(a->b, b->b, span);
    }
    return false;
  }

  bool bind_data(const std::string& m, const Data& d) {
    if (occurs(m, d)) return false;
    data_sol_[m] = d;
    if (defaults_.count(m) && d->k == DK::Var && is_meta(d->name)) defaults_.insert(d->name);
    return true;
  }

  bool unify_n(const Nat& a, const Nat& b, SrcSpan span) {
    int r = solve_nat(zonk(a), zonk(b));
    if (r < 0) return false;
    if (r == 0) pending_.push_back({a, b, span});
    return true;
  }

  // 1: solved or equal, 0: undetermined for now, -1: contradiction.
  int solve_nat(const Nat& a, const Nat& b) {
    if (nat_equal(a, b)) return 1;
    if (a.kind() == Nat::Kind::Var && is_meta(a.name()) && !nat_free_vars(b).count(a.name())) {
      nat_sol_[a.name()] = b;
      return 1;
    }
    if (b.kind() == Nat::Kind::Var && is_meta(b.name()) && !nat_free_vars(a).count(b.name())) {
      nat_sol_[b.name()] = a;
      return 1;
    }
    std::map<Monomial, int64_t> diff;
    for (auto& [m, c] : to_poly(a)) diff[m] += static_cast<int64_t>(c);
    for (auto& [m, c] : to_poly(b)) diff[m] -= static_cast<int64_t>(c);
    std::set<std::string> metas;
    for (auto it = diff.begin(); it != diff.end();) {
      if (it->second == 0) {
        it = diff.erase(it);
        continue;
      }
      for (auto& v : it->first) {
        if (is_meta(v)) metas.insert(v);
      }
      ++it;
    }
    if (diff.empty()) return 1;
    if (metas.empty()) return -1;
    for (auto& m : metas) {
      const Monomial* home = nullptr;
      int homes = 0;
      for (auto& [mono, c] : diff) {
        long cnt = std::count(mono.begin(), mono.end(), m);
        if (cnt > 0) {
          ++homes;
          if (cnt == 1) home = &mono;
        }
      }
      if (homes != 1 || !home) continue;
      int64_t coeff = diff[*home];
      Nat divisor(static_cast<uint64_t>(coeff < 0 ? -coeff : coeff));
      bool ok = true;
      for (auto& v : *home) {
        if (v == m) continue;
        if (is_meta(v)) ok = false;
        divisor = divisor * Nat::var(v);
      }
      if (!ok) continue;
      // coeff * m * M + rest = 0
      Poly rest;
      for (auto& [mono, c] : diff) {
        if (&mono == home) continue;
        int64_t v = coeff > 0 ? -c : c;
        if (v < 0) return -1;
        rest[mono] = static_cast<uint64_t>(v);
      }
      auto q = nat_div_exact(from_poly(rest), divisor);
      if (!q) {
        bool open = false;
        for (auto& [mono, c] : rest) {
          for (auto& v : mono) open = open || is_meta(v);
        }
        if (open) continue;
        return -1;
      }
      if (nat_free_vars(*q).count(m)) continue;
      nat_sol_[m] = *q;
      return 1;
    }
    return 0;
  }
};

class Parser {
 public:
  Elab& E;
  explicit Parser(Elab& e) : E(e) {}

  Nat nat(const Sexp& s) { return nat_of(s, Scope{&E.nat_scope, &E.data_scope}); }
  Data data(const Sexp& s) { return data_of(s, Scope{&E.nat_scope, &E.data_scope}); }
  PType ptype(const Sexp& s) { return ptype_of(s, Scope{&E.nat_scope, &E.data_scope}); }

  TypeArg targ(const Sexp& s, Kind k) {
    return k == Kind::Nat ? TypeArg::of(nat(s)) : TypeArg::of(data(s));
  }

  Phrase elab(const Sexp& s, const PType& expected, PType& out) {
    Phrase p = elab_inner(s, expected, out);
    if (expected) {
      E.unify(out, expected, s.span);
      out = expected;
    }
    return p;
  }

 private:
  Phrase literal(const Sexp& s, const std::string& text, Data type, const PType& expected,
                 PType& out) {
    Literal l;
    l.is_int = is_int_atom(text);
    if (l.is_int) {
      l.i = std::stoll(text);
    } else {
      l.f = std::strtod(text.c_str(), nullptr);
    }
    if (!type) {
      if (expected && expected->k == TK::Exp) {
        Data d = E.zonk(expected->data);
        type = d->k == DK::Var && is_meta(d->name) ? E.fresh_data(s.span, true) : d;
        if (type != d) E.unify(type, d, s.span);
      } else {
        type = E.fresh_data(s.span, true);
      }
    }
    l.type = type;
    out = pt::exp(type);
    return ph::lit(l, s.span);
  }

  Phrase elab_inner(const Sexp& s, const PType& expected, PType& out) {
    if (s.is_atom) return atom(s, expected, out);
    if (s.items.empty()) parse_error("empty form", s.span);
    const Sexp& h = s.items[0];
    size_t n = s.items.size();
    if (h.is_atom) {
      const std::string& hd = h.text;
      if (!E.env.count(hd)) {
        if (hd == "lam") return lam(s, 1, expected, out);
        if (hd == "tlam") {
          if (n != 4 || !s.items[1].is_atom || !s.items[2].is_atom) {
            parse_error("expected (tlam name nat|data body)", s.span);
          }
          const std::string& b = s.items[1].text;
          Kind k = s.items[2].is("nat") ? Kind::Nat
                   : s.items[2].is("data")
                       ? Kind::Data
                       : (parse_error("type binder kind must be nat or data", s.items[2].span),
                          Kind::Nat);
          auto& scope = k == Kind::Nat ? E.nat_scope : E.data_scope;
          bool had = scope.count(b);
          scope.insert(b);
          PType bt;
          Phrase body = elab(s.items[3], nullptr, bt);
          if (!had) scope.erase(b);
          out = pt::depfn(b, k, bt);
          return ph::tlam(b, k, body, s.span);
        }
        if (hd == "app") {
          if (n < 3) parse_error("app needs a function and an argument", s.span);
          return apply(s, 1, out);
        }
        if (hd == "tapp") {
          if (n != 3) parse_error("expected (tapp f T)", s.span);
          PType ft;
          Phrase f = elab(s.items[1], nullptr, ft);
          ft = E.zonk(ft);
          if (ft->k != TK::DepFn) {
            type_error("type application of a phrase of type " + ptype_to_string(ft), s.span);
          }
          TypeArg a = targ(s.items[2], ft->binder_kind);
          out = a.kind == Kind::Nat ? ptype_subst_nat(ft->a, ft->binder, a.nat)
                                    : ptype_subst_data(ft->a, ft->binder, a.data);
          return ph::tapp(f, a, s.span);
        }
        if (hd == "tuple") {
          if (n != 3) parse_error("expected (tuple a b)", s.span);
          PType ex = expected ? E.zonk(expected) : nullptr;
          bool prod = ex && ex->k == TK::Prod;
          PType ta, tb;
          Phrase a = elab(s.items[1], prod ? ex->a : nullptr, ta);
          Phrase b = elab(s.items[2], prod ? ex->b : nullptr, tb);
          out = pt::prod(ta, tb);
          return ph::pair(a, b, s.span);
        }
        if (hd == "proj1" || hd == "proj2") {
          if (n != 2) parse_error("expected (" + hd + " P)", s.span);
          PType t;
          Phrase q = elab(s.items[1], nullptr, t);
          return projection(q, t, hd == "proj1" ? 1 : 2, s.span, out);
        }
        if (hd == "seq" || hd == ";") {
          if (n == 1) {
            out = pt::comm();
            return ph::skip();
          }
          std::vector<Phrase> cs;
          for (size_t i = 1; i < n; ++i) {
            PType t;
            cs.push_back(elab(s.items[i], pt::comm(), t));
          }
          Phrase r = cs.back();
          for (size_t i = cs.size() - 1; i-- > 0;) r = ph::with_span(ph::seq(cs[i], r), s.span);
          out = pt::comm();
          return r;
        }
        if (hd == ":=") {
          if (n != 3) parse_error("expected (:= A E)", s.span);
          PType ta;
          Phrase a = elab(s.items[1], nullptr, ta);
          ta = E.zonk(ta);
          if (ta->k != TK::Acc) {
            type_error("left side of := has type " + ptype_to_string(ta) + ", expected acc",
                       s.items[1].span);
          }
          PType te;
          Phrase e = elab(s.items[2], pt::exp(ta->data), te);
          out = pt::comm();
          return ph::with_span(ph::assign(a, e), s.span);
        }
        if (hd == "lit") {
          if (n != 3 || !s.items[1].is_atom || !is_number_atom(s.items[1].text)) {
            parse_error("expected (lit V D)", s.span);
          }
          return literal(s, s.items[1].text, data(s.items[2]), expected, out);
        }
        if (hd == "negate") {
          if (n != 2) parse_error("negate takes one argument", s.span);
          Phrase a = elab(s.items[1], expected, out);
          arith_operand(out, s.span);
          return ph::with_span(ph::negate(a), s.span);
        }
        if (is_arith_op(hd)) {
          if (n == 1) return section(s, expected, out);
          if (n == 2) parse_error("operator " + hd + " needs two operands", s.span);
          PType ex = expected;
          Phrase acc = elab(s.items[1], ex, out);
          for (size_t i = 2; i < n; ++i) {
            PType tb;
            Phrase b = elab(s.items[i], out, tb);
            acc = ph::with_span(ph::binop(hd, acc, b), s.span);
          }
          arith_operand(out, s.span);
          return acc;
        }
        if ((hd == "asVector" || hd == "asScalar" || hd == "asScalarAcc" ||
             hd == "asVectorAcc") &&
            n >= 2) {
          int w = static_cast<int>(to_u64(s.items[1]));
          if (!is_legal_vector_width(w)) {
            type_error("illegal vector width " + std::to_string(w), s.items[1].span);
          }
          std::vector<Sexp> rest(s.items.begin() + 2, s.items.end());
          return prim_app(vec_prim_name(hd, w), rest, s.span, expected, out);
        }
        if (const PrimInfo* info = lookup_prim(hd); info && !info->overloaded) {
          std::vector<Sexp> rest(s.items.begin() + 1, s.items.end());
          return prim_app(hd, rest, s.span, expected, out);
        }
      }
    }
    return apply(s, 0, out);
  }

  void arith_operand(const PType& t0, SrcSpan span) {
    PType t = E.zonk(t0);
    if (t->k != TK::Exp) type_error("arithmetic on a phrase of type " + ptype_to_string(t), span);
    auto k = t->data->k;
    if (k != DK::Num && k != DK::Vec && !(k == DK::Var && is_meta(t->data->name))) {
      type_error("arithmetic on non-numeric data " + data_to_string(t->data), span);
    }
  }

  Phrase atom(const Sexp& s, const PType& expected, PType& out) {
    const std::string& t = s.text;
    if (is_number_atom(t)) return literal(s, t, nullptr, expected, out);
    if (auto it = E.env.find(t); it != E.env.end()) {
      out = it->second;
      return ph::ident(t, s.span);
    }
    auto dot = t.rfind('.');
    if (dot != std::string::npos && dot + 2 == t.size() && (t[dot + 1] == '1' || t[dot + 1] == '2')) {
      std::string base = t.substr(0, dot);
      if (auto it = E.env.find(base); it != E.env.end()) {
        return projection(ph::ident(base, s.span), it->second, t[dot + 1] - '0', s.span, out);
      }
    }
    if (t == "skip") {
      out = pt::comm();
      return ph::with_span(ph::skip(), s.span);
    }
    if (const PrimInfo* info = lookup_prim(t)) {
      out = info->type;
      return ph::prim(t, s.span);
    }
    type_error("unbound identifier '" + t + "'", s.span);
  }

  Phrase projection(const Phrase& q, const PType& t0, int i, SrcSpan span, PType& out) {
    PType t = E.zonk(t0);
    if (t->k != TK::Prod) {
      type_error("projection from a phrase of type " + ptype_to_string(t), span);
    }
    out = i == 1 ? t->a : t->b;
    return ph::proj(q, i, span);
  }

  Phrase bind_lam(const std::string& x, const PType& bt, const Sexp& body_s,
                  const PType& body_expected, bool passive, SrcSpan span, PType& out) {
    auto saved = E.env.find(x) != E.env.end() ? std::optional<PType>(E.env[x]) : std::nullopt;
    E.env[x] = bt;
    PType body_t;
    Phrase body = elab(body_s, body_expected, body_t);
    if (saved) {
      E.env[x] = *saved;
    } else {
      E.env.erase(x);
    }
    out = pt::fn(bt, body_t, passive);
    return ph::lam(x, bt, body, span);
  }

  // (lam b1 b2 ... body) starting at binder index i.
  Phrase lam(const Sexp& s, size_t i, const PType& expected, PType& out) {
    size_t n = s.items.size();
    if (n < 3) parse_error("expected (lam x body)", s.span);
    const Sexp& b = s.items[i];
    std::string x;
    PType ann;
    if (b.is_atom) {
      x = b.text;
    } else if (b.items.size() == 2 && b.items[0].is_atom) {
      x = b.items[0].text;
      ann = ptype(b.items[1]);
    } else {
      parse_error("malformed lambda binder '" + sexp_to_string(b) + "'", b.span);
    }
    if (lookup_prim(x) || x == "skip") parse_error("binder shadows primitive '" + x + "'", b.span);
    PType ex = expected ? E.zonk(expected) : nullptr;
    bool fn = ex && ex->k == TK::Fn;
    PType bt = ann;
    if (ann && fn) E.unify(ann, ex->a, b.span);
    if (!bt) {
      if (!fn) {
        type_error("cannot infer the type of binder '" + x + "'; annotate it as (" + x + " T)",
                   b.span);
      }
      bt = ex->a;
    }
    if (i + 2 < n) {
      Sexp rest = Sexp::list({}, s.span);
      rest.items.push_back(s.items[0]);
      rest.items.insert(rest.items.end(), s.items.begin() + i + 1, s.items.end());
      auto saved = E.env.find(x) != E.env.end() ? std::optional<PType>(E.env[x]) : std::nullopt;
      E.env[x] = bt;
      PType body_t;
      Phrase body = lam(rest, 1, fn ? ex->b : nullptr, body_t);
      if (saved) {
        E.env[x] = *saved;
      } else {
        E.env.erase(x);
      }
      out = pt::fn(bt, body_t, fn && ex->passive);
      return ph::lam(x, bt, body, s.span);
    }
    return bind_lam(x, bt, s.items[i + 1], fn ? ex->b : nullptr, fn && ex->passive, s.span, out);
  }

  // (+) is (lam x (lam y (+ x y))).
  Phrase section(const Sexp& s, const PType& expected, PType& out) {
    PType ex = expected ? E.zonk(expected) : nullptr;
    PType tx, ty;
    if (ex && ex->k == TK::Fn && ex->b->k == TK::Fn) {
      tx = ex->a;
      ty = ex->b->a;
    } else {
      tx = ty = pt::exp(E.fresh_data(s.span, true));
    }
    SrcSpan sp = s.span;
    Sexp body = Sexp::list({Sexp::atom(s.items[0].text, sp), Sexp::atom("x", sp),
                            Sexp::atom("y", sp)},
                           sp);
    auto sx = E.env.count("x") ? std::optional<PType>(E.env["x"]) : std::nullopt;
    auto sy = E.env.count("y") ? std::optional<PType>(E.env["y"]) : std::nullopt;
    E.env["x"] = tx;
    E.env["y"] = ty;
    PType bt;
    Phrase b = elab(body, ex && ex->k == TK::Fn && ex->b->k == TK::Fn ? ex->b->b : nullptr, bt);
    E.env.erase("x");
    E.env.erase("y");
    if (sx) E.env["x"] = *sx;
    if (sy) E.env["y"] = *sy;
    out = pt::fn(tx, pt::fn(ty, bt));
    return ph::lam("x", tx, ph::lam("y", ty, b, sp), sp);
  }

  // Application chain: items[start] is the function, the rest are arguments.
  Phrase apply(const Sexp& s, size_t start, PType& out) {
    PType ft;
    Phrase f = elab(s.items[start], nullptr, ft);
    if (start + 1 >= s.items.size()) {
      parse_error("'" + sexp_to_string(s.items[start]) + "' is not a primitive or form", s.span);
    }
    for (size_t i = start + 1; i < s.items.size(); ++i) {
      ft = E.zonk(ft);
      if (ft->k != TK::Fn) {
        type_error("application of a phrase of type " + ptype_to_string(ft) +
                       ", which is not a function",
                   s.items[i].span);
      }
      PType ta;
      Phrase a = elab(s.items[i], ft->a, ta);
      f = ph::app(f, a, s.span);
      ft = ft->b;
    }
    out = ft;
    return f;
  }

  static bool is_lambda_form(const Sexp& s) { return !s.is_atom && s.head() == "lam"; }
  static bool is_annotated_lambda(const Sexp& s) {
    if (!is_lambda_form(s) || s.items.size() < 3) return false;
    for (size_t i = 1; i + 1 < s.items.size(); ++i) {
      if (s.items[i].is_atom) return false;
    }
    return true;
  }

  Phrase prim_app(const std::string& name, const std::vector<Sexp>& items, SrcSpan span,
                  const PType& expected, PType& out) {
    const PrimInfo* info = lookup_prim(name);
    size_t ntk = info->tkinds.size(), na = info->nargs;
    size_t k = items.size();
    std::vector<TypeArg> targs(ntk);
    std::vector<bool> given(ntk, false);
    size_t first_arg = 0;
    if (k == ntk + na) {
      for (size_t i = 0; i < ntk; ++i) {
        targs[i] = targ(items[i], info->tkinds[i]);
        given[i] = true;
      }
      first_arg = ntk;
    } else if (k == na + 1 && (name == "split" || name == "joinAcc")) {
      size_t which = name == "split" ? 0 : 1;
      targs[which] = TypeArg::of(nat(items[0]));
      given[which] = true;
      first_arg = 1;
    } else if (k != na) {
      parse_error("arity error: " + name + " takes " + std::to_string(na) + " argument" +
                      (na == 1 ? "" : "s") + " (or " + std::to_string(ntk + na) +
                      " with explicit type arguments), found " + std::to_string(k),
                  span);
    }
    for (size_t i = 0; i < ntk; ++i) {
      if (given[i]) continue;
      targs[i] = info->tkinds[i] == Kind::Nat ? TypeArg::of(E.fresh_nat(span))
                                              : TypeArg::of(E.fresh_data(span, false));
    }
    PrimSig sig = instantiate_prim(*info, targs);
    if (expected) E.unify(sig.result, expected, span);

    std::vector<Phrase> args(na);
    std::vector<size_t> order;
    for (int pass = 0; pass < 3; ++pass) {
      for (size_t i = 0; i < na; ++i) {
        const Sexp& a = items[first_arg + i];
        int cls = !is_lambda_form(a) ? 0 : is_annotated_lambda(a) ? 1 : 2;
        if (cls == pass) order.push_back(i);
      }
    }
    for (size_t i : order) {
      const Sexp& a = items[first_arg + i];
      PType ta;
      args[i] = elab(a, sig.params[i], ta);
      E.solve_pending(false);
    }
    out = sig.result;
    return ph::with_span(ph::prim_app(name, targs, args), span);
  }
};

Program finish_program(Elab& E, Program prog, Phrase body, PType t, bool check) {
  E.finish();
  body = E.zonk(body);
  E.ensure_resolved(body);
  t = E.zonk(t);
  prog.body = body;
  std::vector<const Param*> outs;
  for (auto& p : prog.params) {
    if (p.type->k != TK::Exp) outs.push_back(&p);
  }
  if (outs.empty() && t->k == TK::Exp) {
    if (prog.find_param("out")) type_error("parameter 'out' must be an acceptor", prog.body->span);
    prog.params.push_back(Param{"out", pt::acc(t->data), {}});
    prog.output = "out";
  } else if (outs.size() == 1) {
    prog.output = outs[0]->name;
  }
  if (check) check_program(prog);
  return prog;
}

}  // namespace

Nat parse_nat(const Sexp& s, const std::set<std::string>& nat_scope) {
  return nat_of(s, Scope{&nat_scope, nullptr});
}

Data parse_data(const Sexp& s, const std::set<std::string>& nat_scope,
                const std::set<std::string>& data_scope) {
  return data_of(s, Scope{&nat_scope, &data_scope});
}

PType parse_ptype(const Sexp& s, const std::set<std::string>& nat_scope,
                  const std::set<std::string>& data_scope) {
  return ptype_of(s, Scope{&nat_scope, &data_scope});
}

namespace {
Sexp single_form(const std::string& text) {
  auto forms = read_sexps(text);
  if (forms.size() != 1) parse_error("expected exactly one form");
  return forms[0];
}
}  // namespace

Data parse_data_text(const std::string& text) {
  static const std::set<std::string> none;
  return data_of(single_form(text), Scope{nullptr, &none});
}

PType parse_ptype_text(const std::string& text) {
  static const std::set<std::string> none;
  return ptype_of(single_form(text), Scope{nullptr, &none});
}

Program parse_program(const std::string& text, bool check) {
  auto forms = read_sexps(text);
  Elab E;
  Program prog;
  const Sexp* body = nullptr;
  for (auto& f : forms) {
    std::string h = f.head();
    if (h == "nat") {
      if (f.items.size() < 2) parse_error("expected (nat name ...)", f.span);
      for (size_t i = 1; i < f.items.size(); ++i) {
        if (!f.items[i].is_atom || is_int_atom(f.items[i].text)) {
          parse_error("nat parameter must be a name", f.items[i].span);
        }
        prog.nats.push_back(f.items[i].text);
        E.nat_scope.insert(f.items[i].text);
      }
    } else if (h == "param") {
      if (f.items.size() != 3 || !f.items[1].is_atom) {
        parse_error("expected (param name type)", f.span);
      }
      const std::string& x = f.items[1].text;
      if (prog.find_param(x)) parse_error("duplicate parameter '" + x + "'", f.span);
      if (lookup_prim(x)) parse_error("parameter shadows primitive '" + x + "'", f.span);
      PType t = parse_ptype(f.items[2], E.nat_scope, {});
      if (t->k != TK::Exp && t->k != TK::Acc && !as_var_type(t)) {
        type_error("parameter '" + x + "' must have type exp, acc or var", f.span);
      }
      prog.params.push_back(Param{x, t, f.span});
      E.env[x] = t;
    } else {
      if (body) parse_error("a program has exactly one body", f.span);
      body = &f;
    }
  }
  if (!body) parse_error("program has no body");
  Parser P(E);
  PType t;
  Phrase p = P.elab(*body, nullptr, t);
  return finish_program(E, std::move(prog), p, t, check);
}

Phrase parse_phrase(const std::string& text, const Program& ctx) {
  Sexp s = single_form(text);
  Elab E;
  for (auto& n : ctx.nats) E.nat_scope.insert(n);
  for (auto& p : ctx.params) E.env[p.name] = p.type;
  Parser P(E);
  PType t;
  Phrase p = P.elab(s, nullptr, t);
  E.finish();
  p = E.zonk(p);
  E.ensure_resolved(p);
  return p;
}

}  // namespace dpia
