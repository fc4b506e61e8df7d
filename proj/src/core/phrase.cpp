#include "dpia/phrase.hpp"

#include <algorithm>
#include <map>

#include "dpia/prims.hpp"

namespace dpia {

using K = PhraseNode::K;

std::string SrcSpan::str() const {
  if (!valid()) return "?";
  return std::to_string(line) + ":" + std::to_string(col);
}

bool typearg_equal(const TypeArg& a, const TypeArg& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Kind::Nat) return nat_equal(a.nat, b.nat);
  return data_equal(a.data, b.data);
}

std::string typearg_to_sexpr(const TypeArg& a) {
  return a.kind == Kind::Nat ? nat_to_sexpr(a.nat) : data_to_sexpr(a.data);
}

namespace ph {
namespace {
std::shared_ptr<PhraseNode> mk(K k, SrcSpan span) {
  auto n = std::make_shared<PhraseNode>();
  n->k = k;
  n->span = span;
  return n;
}
}  // namespace

Phrase ident(std::string name, SrcSpan span) {
  auto n = mk(K::Ident, span);
  n->name = std::move(name);
  return n;
}
Phrase lam(std::string binder, PType ann, Phrase body, SrcSpan span) {
  auto n = mk(K::Lam, span);
  n->name = std::move(binder);
  n->ann = std::move(ann);
  n->a = std::move(body);
  return n;
}
Phrase app(Phrase f, Phrase a, SrcSpan span) {
  auto n = mk(K::App, span);
  n->a = std::move(f);
  n->b = std::move(a);
  return n;
}
Phrase apps(Phrase f, const std::vector<Phrase>& args) {
  for (auto& a : args) f = app(f, a);
  return f;
}
Phrase tlam(std::string binder, Kind k, Phrase body, SrcSpan span) {
  auto n = mk(K::TLam, span);
  n->name = std::move(binder);
  n->tkind = k;
  n->a = std::move(body);
  return n;
}
Phrase tapp(Phrase f, TypeArg t, SrcSpan span) {
  auto n = mk(K::TApp, span);
  n->a = std::move(f);
  n->targ = std::move(t);
  return n;
}
Phrase pair(Phrase a, Phrase b, SrcSpan span) {
  auto n = mk(K::Pair, span);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}
Phrase proj(Phrase p, int i, SrcSpan span) {
  auto n = mk(K::Proj, span);
  n->a = std::move(p);
  n->proj = i;
  return n;
}
Phrase prim(std::string name, SrcSpan span) {
  auto n = mk(K::Prim, span);
  n->name = std::move(name);
  return n;
}
Phrase lit(Literal l, SrcSpan span) {
  auto n = mk(K::Lit, span);
  n->lit = std::move(l);
  return n;
}
Phrase num(int64_t v) { return lit(Literal{true, v, 0.0, dt::num()}); }
Phrase numf(double v) { return lit(Literal{false, 0, v, dt::num()}); }
Phrase idx_lit(int64_t v, Nat bound) {
  return lit(Literal{true, v, 0.0, dt::idx(std::move(bound))});
}
Phrase with_span(const Phrase& p, SrcSpan span) {
  auto n = std::make_shared<PhraseNode>(*p);
  n->span = span;
  return n;
}

Phrase prim_app(const std::string& name, const std::vector<TypeArg>& targs,
                const std::vector<Phrase>& args) {
  Phrase f = prim(name);
  for (auto& t : targs) f = tapp(f, t);
  return apps(f, args);
}
Phrase binop(const std::string& op, Phrase x, Phrase y) {
  return app(prim(op), pair(std::move(x), std::move(y)));
}
Phrase negate(Phrase x) { return app(prim("negate"), std::move(x)); }
Phrase assign(Phrase acc, Phrase e) {
  return app(prim(":="), pair(std::move(acc), std::move(e)));
}
Phrase seq(Phrase c1, Phrase c2) { return app(prim("seq"), pair(std::move(c1), std::move(c2))); }
Phrase skip() { return prim("skip"); }
}  // namespace ph

std::optional<PrimApp> match_prim(const Phrase& p) {
  std::vector<Phrase> args;
  const PhraseNode* n = p.get();
  while (n->k == K::App) {
    args.push_back(n->b);
    n = n->a.get();
  }
  std::vector<TypeArg> targs;
  while (n->k == K::TApp) {
    targs.push_back(n->targ);
    n = n->a.get();
  }
  if (n->k != K::Prim) return std::nullopt;
  const PrimInfo* info = lookup_prim(n->name);
  if (!info) return std::nullopt;
  if (args.size() != static_cast<size_t>(info->nargs) || targs.size() != info->tkinds.size()) {
    return std::nullopt;
  }
  std::reverse(args.begin(), args.end());
  std::reverse(targs.begin(), targs.end());
  return PrimApp{n->name, std::move(targs), std::move(args)};
}

bool is_prim_app(const Phrase& p, const std::string& name) {
  auto m = match_prim(p);
  return m && m->name == name;
}

std::optional<std::pair<Phrase, Phrase>> pair_components(const Phrase& p) {
  auto m = match_prim(p);
  if (!m || m->args.size() != 1 || m->args[0]->k != K::Pair) return std::nullopt;
  return std::make_pair(m->args[0]->a, m->args[0]->b);
}

namespace {

void collect_free(const Phrase& p, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (p->k) {
    case K::Ident:
      if (!bound.count(p->name)) out.insert(p->name);
      return;
    case K::Lam: {
      bool fresh = bound.insert(p->name).second;
      collect_free(p->a, bound, out);
      if (fresh) bound.erase(p->name);
      return;
    }
    case K::App:
    case K::Pair:
      collect_free(p->a, bound, out);
      collect_free(p->b, bound, out);
      return;
    case K::TLam:
    case K::TApp:
    case K::Proj:
      collect_free(p->a, bound, out);
      return;
    case K::Prim:
    case K::Lit:
      return;
  }
}

void typearg_vars(const TypeArg& t, std::set<std::string>& nats, std::set<std::string>& datas) {
  if (t.kind == Kind::Nat) {
    nat_collect_vars(t.nat, nats);
  } else {
    data_collect_vars(t.data, nats, datas);
  }
}

}  // namespace

std::set<std::string> free_idents(const Phrase& p) {
  std::set<std::string> bound, out;
  collect_free(p, bound, out);
  return out;
}

void free_type_vars(const Phrase& p, std::set<std::string>& nats, std::set<std::string>& datas) {
  switch (p->k) {
    case K::Ident:
    case K::Prim:
      return;
    case K::Lit:
      data_collect_vars(p->lit.type, nats, datas);
      return;
    case K::Lam:
      if (p->ann) ptype_collect_vars(p->ann, nats, datas);
      free_type_vars(p->a, nats, datas);
      return;
    case K::App:
    case K::Pair:
      free_type_vars(p->a, nats, datas);
      free_type_vars(p->b, nats, datas);
      return;
    case K::Proj:
      free_type_vars(p->a, nats, datas);
      return;
    case K::TApp:
      typearg_vars(p->targ, nats, datas);
      free_type_vars(p->a, nats, datas);
      return;
    case K::TLam: {
      std::set<std::string> n2, d2;
      free_type_vars(p->a, n2, d2);
      if (p->tkind == Kind::Nat) {
        n2.erase(p->name);
      } else {
        d2.erase(p->name);
      }
      nats.insert(n2.begin(), n2.end());
      datas.insert(d2.begin(), d2.end());
      return;
    }
  }
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string n = base;
  while (avoid.count(n)) n += "'";
  return n;
}

namespace {

Phrase rebuild(const Phrase& p, Phrase a, Phrase b) {
  if (a == p->a && b == p->b) return p;
  auto n = std::make_shared<PhraseNode>(*p);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

struct Subst {
  const std::string& x;
  const Phrase& repl;
  std::set<std::string> fv_repl;

  Phrase go(const Phrase& p) {
    switch (p->k) {
      case K::Ident:
        return p->name == x ? repl : p;
      case K::Prim:
      case K::Lit:
        return p;
      case K::Lam: {
        if (p->name == x) return p;
        if (fv_repl.count(p->name)) {
          std::set<std::string> fv_body = free_idents(p->a);
          if (!fv_body.count(x)) return p;
          std::set<std::string> avoid = fv_repl;
          avoid.insert(fv_body.begin(), fv_body.end());
          avoid.insert(x);
          std::string y = fresh_name(p->name, avoid);
          Phrase body = substitute(p->a, p->name, ph::ident(y));
          return ph::lam(y, p->ann, go(body), p->span);
        }
        return rebuild(p, go(p->a), nullptr);
      }
      case K::TLam: {
        std::set<std::string> nats, datas;
        free_type_vars(repl, nats, datas);
        auto& clash = p->tkind == Kind::Nat ? nats : datas;
        if (clash.count(p->name)) {
          std::set<std::string> n2, d2;
          free_type_vars(p->a, n2, d2);
          std::set<std::string> avoid = clash;
          avoid.insert(n2.begin(), n2.end());
          avoid.insert(d2.begin(), d2.end());
          std::string y = fresh_name(p->name, avoid);
          Phrase body = p->tkind == Kind::Nat ? substitute_nat(p->a, p->name, Nat::var(y))
                                              : substitute_data(p->a, p->name, dt::var(y));
          return ph::tlam(y, p->tkind, go(body), p->span);
        }
        return rebuild(p, go(p->a), nullptr);
      }
      case K::App:
      case K::Pair:
        return rebuild(p, go(p->a), go(p->b));
      case K::TApp:
      case K::Proj:
        return rebuild(p, go(p->a), nullptr);
    }
    return p;
  }
};

// Substitution of a type variable inside phrase annotations.
struct TypeSubst {
  bool is_nat;
  const std::string& v;
  Nat n;
  Data d;

  Data data(const Data& t) const {
    return is_nat ? data_subst_nat(t, v, n) : data_subst_data(t, v, d);
  }
  PType ptype(const PType& t) const {
    return is_nat ? ptype_subst_nat(t, v, n) : ptype_subst_data(t, v, d);
  }
  std::set<std::string> repl_vars() const {
    std::set<std::string> nats, datas;
    if (is_nat) {
      nat_collect_vars(n, nats);
    } else {
      data_collect_vars(d, nats, datas);
    }
    nats.insert(datas.begin(), datas.end());
    return nats;
  }

  Phrase go(const Phrase& p) const {
    switch (p->k) {
      case K::Ident:
      case K::Prim:
        return p;
      case K::Lit: {
        auto m = std::make_shared<PhraseNode>(*p);
        m->lit.type = data(p->lit.type);
        return m;
      }
      case K::Lam: {
        auto m = std::make_shared<PhraseNode>(*p);
        if (p->ann) m->ann = ptype(p->ann);
        m->a = go(p->a);
        return m;
      }
      case K::TApp: {
        auto m = std::make_shared<PhraseNode>(*p);
        if (p->targ.kind == Kind::Nat) {
          if (is_nat) m->targ.nat = nat_subst(p->targ.nat, v, n);
        } else {
          m->targ.data = data(p->targ.data);
        }
        m->a = go(p->a);
        return m;
      }
      case K::TLam: {
        bool same_kind = (p->tkind == Kind::Nat) == is_nat;
        if (same_kind && p->name == v) return p;
        auto rv = repl_vars();
        if (rv.count(p->name)) {
          std::set<std::string> n2, d2;
          free_type_vars(p->a, n2, d2);
          rv.insert(n2.begin(), n2.end());
          rv.insert(d2.begin(), d2.end());
          rv.insert(v);
          std::string y = fresh_name(p->name, rv);
          Phrase body = p->tkind == Kind::Nat ? substitute_nat(p->a, p->name, Nat::var(y))
                                              : substitute_data(p->a, p->name, dt::var(y));
          return ph::tlam(y, p->tkind, go(body), p->span);
        }
        return rebuild(p, go(p->a), nullptr);
      }
      case K::App:
      case K::Pair:
        return rebuild(p, go(p->a), go(p->b));
      case K::Proj:
        return rebuild(p, go(p->a), nullptr);
    }
    return p;
  }
};

}  // namespace

Phrase substitute(const Phrase& body, const std::string& x, const Phrase& repl) {
  Subst s{x, repl, free_idents(repl)};
  return s.go(body);
}

Phrase substitute_nat(const Phrase& body, const std::string& v, const Nat& n) {
  TypeSubst s{true, v, n, nullptr};
  return s.go(body);
}

Phrase substitute_data(const Phrase& body, const std::string& v, const Data& d) {
  TypeSubst s{false, v, Nat(), d};
  return s.go(body);
}

namespace {

struct AlphaEq {
  std::vector<std::pair<std::string, std::string>> binders;
  int counter = 0;

  // Position of the innermost binder for `name` on side `left`, or -1.
  int lookup(const std::string& name, bool left) const {
    for (int i = static_cast<int>(binders.size()) - 1; i >= 0; --i) {
      const auto& b = binders[i];
      if ((left ? b.first : b.second) == name) return i;
    }
    return -1;
  }

  bool eq(const Phrase& a, const Phrase& b) {
    if (a->k != b->k) return false;
    switch (a->k) {
      case K::Ident: {
        int ia = lookup(a->name, true);
        int ib = lookup(b->name, false);
        if (ia != ib) return false;
        return ia >= 0 || a->name == b->name;
      }
      case K::Prim:
        return a->name == b->name;
      case K::Lit:
        return a->lit.is_int == b->lit.is_int && a->lit.i == b->lit.i &&
               a->lit.f == b->lit.f && data_equal(a->lit.type, b->lit.type);
      case K::Lam: {
        if (a->ann && b->ann && !ptype_equal(a->ann, b->ann)) return false;
        binders.emplace_back(a->name, b->name);
        bool r = eq(a->a, b->a);
        binders.pop_back();
        return r;
      }
      case K::TLam: {
        if (a->tkind != b->tkind) return false;
        std::string c = "%t" + std::to_string(counter++);
        Phrase ba, bb;
        if (a->tkind == Kind::Nat) {
          ba = substitute_nat(a->a, a->name, Nat::var(c));
          bb = substitute_nat(b->a, b->name, Nat::var(c));
        } else {
          ba = substitute_data(a->a, a->name, dt::var(c));
          bb = substitute_data(b->a, b->name, dt::var(c));
        }
        return eq(ba, bb);
      }
      case K::TApp:
        return typearg_equal(a->targ, b->targ) && eq(a->a, b->a);
      case K::App:
      case K::Pair:
        return eq(a->a, b->a) && eq(a->b, b->b);
      case K::Proj:
        return a->proj == b->proj && eq(a->a, b->a);
    }
    return false;
  }
};

Phrase type_beta(const Phrase& tlam, const TypeArg& t) {
  if (tlam->tkind == Kind::Nat) return substitute_nat(tlam->a, tlam->name, t.nat);
  return substitute_data(tlam->a, tlam->name, t.data);
}

}  // namespace

bool alpha_equal(const Phrase& a, const Phrase& b) {
  AlphaEq e;
  return e.eq(a, b);
}

Phrase beta_normalize(const Phrase& p) {
  switch (p->k) {
    case K::Ident:
    case K::Prim:
    case K::Lit:
      return p;
    case K::Lam:
    case K::TLam:
      return rebuild(p, beta_normalize(p->a), nullptr);
    case K::App: {
      Phrase f = beta_normalize(p->a);
      if (f->k == K::Lam) return beta_normalize(substitute(f->a, f->name, p->b));
      return rebuild(p, f, beta_normalize(p->b));
    }
    case K::TApp: {
      Phrase f = beta_normalize(p->a);
      if (f->k == K::TLam) return beta_normalize(type_beta(f, p->targ));
      return rebuild(p, f, nullptr);
    }
    case K::Pair:
      return rebuild(p, beta_normalize(p->a), beta_normalize(p->b));
    case K::Proj: {
      Phrase q = beta_normalize(p->a);
      if (q->k == K::Pair) return p->proj == 1 ? q->a : q->b;
      return rebuild(p, q, nullptr);
    }
  }
  return p;
}

size_t count_prims(const Phrase& p, const std::function<bool(const std::string&)>& pred) {
  size_t n = 0;
  if (auto m = match_prim(p); m && pred(m->name)) ++n;
  if (p->a) n += count_prims(p->a, pred);
  if (p->b) n += count_prims(p->b, pred);
  return n;
}

size_t phrase_size(const Phrase& p) {
  size_t n = 1;
  if (p->a) n += phrase_size(p->a);
  if (p->b) n += phrase_size(p->b);
  return n;
}

}  // namespace dpia
