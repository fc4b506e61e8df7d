#include "dpia/checker.hpp"

#include <vector>

#include "dpia/error.hpp"
#include "dpia/prims.hpp"

namespace dpia {

using K = PhraseNode::K;
using TK = PhraseTypeNode::K;

void check_kind(const KindContext& delta, const Nat& n, SrcSpan span) {
  for (auto& v : nat_free_vars(n)) {
    auto it = delta.find(v);
    if (it == delta.end()) type_error("unbound nat variable '" + v + "'", span);
    if (it->second != Kind::Nat) {
      type_error("'" + v + "' has kind " + kind_name(it->second) + ", expected nat", span);
    }
  }
}

void check_kind(const KindContext& delta, const Data& d, SrcSpan span) {
  using DK = DataTypeNode::K;
  switch (d->k) {
    case DK::Num:
      return;
    case DK::Idx:
      check_kind(delta, d->size, span);
      return;
    case DK::Array:
      check_kind(delta, d->size, span);
      check_kind(delta, d->a, span);
      return;
    case DK::Pair:
      check_kind(delta, d->a, span);
      check_kind(delta, d->b, span);
      return;
    case DK::Vec:
      if (!is_legal_vector_width(d->width)) {
        type_error("illegal vector width " + std::to_string(d->width), span);
      }
      return;
    case DK::Var: {
      auto it = delta.find(d->name);
      if (it == delta.end()) type_error("unbound data type variable '" + d->name + "'", span);
      if (it->second != Kind::Data) {
        type_error("'" + d->name + "' has kind " + kind_name(it->second) + ", expected data",
                   span);
      }
      return;
    }
  }
}

void check_kind(const KindContext& delta, const PType& t, SrcSpan span) {
  switch (t->k) {
    case TK::Exp:
    case TK::Acc:
      check_kind(delta, t->data, span);
      return;
    case TK::Comm:
      return;
    case TK::Prod:
    case TK::Fn:
      check_kind(delta, t->a, span);
      check_kind(delta, t->b, span);
      return;
    case TK::DepFn: {
      KindContext inner = delta;
      inner[t->binder] = t->binder_kind;
      check_kind(inner, t->a, span);
      return;
    }
  }
}

bool types_equal(const PType& a, const PType& b) { return ptype_equal(a, b); }

namespace {

// Equality up to passivity annotations; `promote` permits a plain function
// where a passive one is expected.
bool convertible(const PType& actual, const PType& expected, bool promote) {
  if (actual->k != expected->k) return false;
  switch (actual->k) {
    case TK::Exp:
    case TK::Acc:
      return data_equal(actual->data, expected->data);
    case TK::Comm:
      return true;
    case TK::Prod:
      return convertible(actual->a, expected->a, promote) &&
             convertible(actual->b, expected->b, promote);
    case TK::Fn:
      if (expected->passive && !actual->passive && !promote) return false;
      return convertible(expected->a, actual->a, true) &&
             convertible(actual->b, expected->b, promote);
    case TK::DepFn:
      return ptype_equal(actual, expected) ||
             (actual->binder_kind == expected->binder_kind &&
              convertible(actual->a,
                          actual->binder_kind == Kind::Nat
                              ? ptype_subst_nat(expected->a, expected->binder,
                                                Nat::var(actual->binder))
                              : ptype_subst_data(expected->a, expected->binder,
                                                 dt::var(actual->binder)),
                          promote));
  }
  return false;
}

void merge(UsageReport& into, const UsageReport& from) {
  for (auto& [x, u] : from) {
    auto it = into.find(x);
    if (it == into.end()) {
      into[x] = u;
    } else if (u == Usage::Active) {
      it->second = Usage::Active;
    }
  }
}

void passify(CheckResult& r) {
  if (!is_passive(r.type)) return;
  for (auto& [x, u] : r.usage) u = Usage::Passive;
}

std::string active_list(const UsageReport& u) {
  std::string s;
  for (auto& [x, m] : u) {
    if (m != Usage::Active) continue;
    if (!s.empty()) s += ", ";
    s += "'" + x + "'";
  }
  return s;
}

class Checker {
 public:
  Checker(KindContext delta, TypingContext ctx, bool lenient)
      : delta_(std::move(delta)), ctx_(std::move(ctx)), lenient_(lenient) {}

  CheckResult infer(const Phrase& p, SrcSpan outer) {
    SrcSpan span = p->span.valid() ? p->span : outer;
    switch (p->k) {
      case K::Ident:
        return ident(p, span);
      case K::Prim: {
        const PrimInfo* info = lookup_prim(p->name);
        if (!info) type_error("unknown primitive '" + p->name + "'", span);
        return {info->type, {}};
      }
      case K::Lit: {
        kind(p->lit.type, span);
        const Data& t = p->lit.type;
        if (t->k == DataTypeNode::K::Idx) {
          if (!p->lit.is_int || p->lit.i < 0) type_error("index literal must be a natural", span);
          if (auto c = t->size.as_const(); c && static_cast<uint64_t>(p->lit.i) >= *c) {
            type_error("index literal " + std::to_string(p->lit.i) + " out of range for " +
                           data_to_string(t),
                       span);
          }
        } else if (t->k != DataTypeNode::K::Num && t->k != DataTypeNode::K::Vec) {
          type_error("literal of non-scalar type " + data_to_string(t), span);
        }
        return {pt::exp(t), {}};
      }
      case K::Lam: {
        if (!p->ann) {
          type_error("cannot infer the type of lambda binder '" + p->name +
                         "'; annotate it or use it where a function type is expected",
                     span);
        }
        kind(p->ann, span);
        locals_.emplace_back(p->name, p->ann);
        CheckResult body = infer(p->a, span);
        locals_.pop_back();
        CheckResult r{pt::fn(p->ann, body.type), std::move(body.usage)};
        r.usage.erase(p->name);
        passify(r);
        return r;
      }
      case K::TLam: {
        auto saved = delta_;
        delta_[p->name] = p->tkind;
        CheckResult body = infer(p->a, span);
        delta_ = saved;
        return {pt::depfn(p->name, p->tkind, body.type), std::move(body.usage)};
      }
      case K::TApp: {
        CheckResult f = infer(p->a, span);
        if (f.type->k != TK::DepFn) {
          type_error("type application of a phrase of type " + ptype_to_string(f.type), span);
        }
        if (f.type->binder_kind != p->targ.kind) {
          type_error("type argument of kind " + kind_name(p->targ.kind) + " where " +
                         kind_name(f.type->binder_kind) + " is expected",
                     span);
        }
        PType t;
        if (p->targ.kind == Kind::Nat) {
          kind(p->targ.nat, span);
          t = ptype_subst_nat(f.type->a, f.type->binder, p->targ.nat);
        } else {
          kind(p->targ.data, span);
          t = ptype_subst_data(f.type->a, f.type->binder, p->targ.data);
        }
        CheckResult r{t, std::move(f.usage)};
        passify(r);
        return r;
      }
      case K::App:
        return app(p, span);
      case K::Pair: {
        CheckResult a = infer(p->a, span);
        CheckResult b = infer(p->b, span);
        CheckResult r{pt::prod(a.type, b.type), std::move(a.usage)};
        merge(r.usage, b.usage);
        passify(r);
        return r;
      }
      case K::Proj: {
        CheckResult q = infer(p->a, span);
        if (q.type->k != TK::Prod) {
          type_error("projection from a phrase of type " + ptype_to_string(q.type), span);
        }
        CheckResult r{p->proj == 1 ? q.type->a : q.type->b, std::move(q.usage)};
        passify(r);
        return r;
      }
    }
    internal_error("unhandled phrase node", span);
  }

  CheckResult check(const Phrase& p, const PType& expected, SrcSpan outer) {
    SrcSpan span = p->span.valid() ? p->span : outer;
    if (p->k == K::Lam && expected->k == TK::Fn) {
      if (p->ann && !convertible(p->ann, expected->a, true) &&
          !convertible(expected->a, p->ann, true)) {
        type_error("lambda binder '" + p->name + "' annotated " + ptype_to_string(p->ann) +
                       " but " + ptype_to_string(expected->a) + " is expected",
                   span);
      }
      if (p->ann) kind(p->ann, span);
      locals_.emplace_back(p->name, p->ann ? p->ann : expected->a);
      CheckResult body = check(p->a, expected->b, span);
      locals_.pop_back();
      CheckResult r{pt::fn(locals_type(p, expected), body.type, expected->passive),
                    std::move(body.usage)};
      r.usage.erase(p->name);
      if (expected->passive) promote(r.usage, span);
      passify(r);
      return r;
    }
    if (p->k == K::TLam && expected->k == TK::DepFn && p->tkind == expected->binder_kind) {
      PType inner = p->tkind == Kind::Nat
                        ? ptype_subst_nat(expected->a, expected->binder, Nat::var(p->name))
                        : ptype_subst_data(expected->a, expected->binder, dt::var(p->name));
      auto saved = delta_;
      delta_[p->name] = p->tkind;
      CheckResult body = check(p->a, inner, span);
      delta_ = saved;
      return {pt::depfn(p->name, p->tkind, body.type), std::move(body.usage)};
    }
    CheckResult r = infer(p, span);
    if (convertible(r.type, expected, false)) return {expected, std::move(r.usage)};
    if (convertible(r.type, expected, true)) {
      promote(r.usage, span);
      return {expected, std::move(r.usage)};
    }
    type_error("type mismatch: expected " + ptype_to_string(expected) + ", found " +
                   ptype_to_string(r.type),
               span);
  }

 private:
  KindContext delta_;
  TypingContext ctx_;
  bool lenient_;
  std::vector<std::pair<std::string, PType>> locals_;

  static PType locals_type(const Phrase& p, const PType& expected) {
    return p->ann ? p->ann : expected->a;
  }

  template <typename T>
  void kind(const T& t, SrcSpan span) {
    if (!lenient_) check_kind(delta_, t, span);
  }

  void promote(const UsageReport& usage, SrcSpan span) {
    if (lenient_) return;
    std::string act = active_list(usage);
    if (!act.empty()) {
      type_error("passivity violation: body of a passive function uses " + act +
                     " actively (a parallel loop body may only write through its own "
                     "acceptor)",
                 span);
    }
  }

  CheckResult ident(const Phrase& p, SrcSpan span) {
    for (auto it = locals_.rbegin(); it != locals_.rend(); ++it) {
      if (it->first == p->name) {
        CheckResult r{it->second, {{p->name, Usage::Active}}};
        passify(r);
        return r;
      }
    }
    if (auto it = ctx_.active.find(p->name); it != ctx_.active.end()) {
      CheckResult r{it->second, {{p->name, Usage::Active}}};
      passify(r);
      return r;
    }
    if (auto it = ctx_.passive.find(p->name); it != ctx_.passive.end()) {
      return {it->second, {{p->name, Usage::Passive}}};
    }
    type_error("unbound identifier '" + p->name + "'", span);
  }

  CheckResult overloaded(const std::string& op, const Phrase& arg, SrcSpan span) {
    CheckResult a = infer(arg, span);
    const PType& t = a.type;
    PType result;
    if (op == "negate") {
      if (t->k != TK::Exp || !arith_data(t->data)) {
        type_error("negate expects exp[num] or a vector, found " + ptype_to_string(t), span);
      }
      result = t;
    } else if (op == ":=") {
      if (t->k != TK::Prod || t->a->k != TK::Acc || t->b->k != TK::Exp) {
        type_error("assignment expects acc[d] x exp[d], found " + ptype_to_string(t), span);
      }
      if (!is_scalar_like(t->a->data)) {
        type_error("primitive assignment at non-scalar type " + data_to_string(t->a->data),
                   span);
      }
      if (!data_equal(t->a->data, t->b->data)) {
        type_error("assignment of exp[" + data_to_string(t->b->data) + "] to acc[" +
                       data_to_string(t->a->data) + "]",
                   span);
      }
      result = pt::comm();
    } else {
      if (t->k != TK::Prod || t->a->k != TK::Exp || t->b->k != TK::Exp ||
          !data_equal(t->a->data, t->b->data) || !arith_data(t->a->data)) {
        type_error("operator " + op + " expects two operands of the same num or vector type, "
                   "found " + ptype_to_string(t),
                   span);
      }
      result = t->a;
    }
    CheckResult r{result, std::move(a.usage)};
    passify(r);
    return r;
  }

  static bool arith_data(const Data& d) {
    return d->k == DataTypeNode::K::Num || d->k == DataTypeNode::K::Vec;
  }

  CheckResult app(const Phrase& p, SrcSpan span) {
    if (p->a->k == K::Prim) {
      const PrimInfo* info = lookup_prim(p->a->name);
      if (info && info->overloaded) return overloaded(p->a->name, p->b, span);
    }
    CheckResult f = infer(p->a, span);
    if (f.type->k != TK::Fn) {
      type_error("application of a phrase of type " + ptype_to_string(f.type) +
                     ", which is not a function",
                 span);
    }
    CheckResult a = check(p->b, f.type->a, span);
    if (!lenient_) {
      std::string clash;
      for (auto& [x, u] : a.usage) {
        auto it = f.usage.find(x);
        if (it == f.usage.end()) continue;
        if (u == Usage::Active || it->second == Usage::Active) {
          if (!clash.empty()) clash += ", ";
          clash += "'" + x + "'";
        }
      }
      if (!clash.empty()) {
        type_error("interference: " + clash +
                       " used in both function and argument of an application where at "
                       "least one use is active",
                   span);
      }
    }
    CheckResult r{f.type->b, std::move(f.usage)};
    merge(r.usage, a.usage);
    passify(r);
    return r;
  }
};

}  // namespace

CheckResult type_check(const KindContext& delta, const TypingContext& ctx, const Phrase& p,
                       const PType& expected) {
  for (auto& [x, t] : ctx.passive) {
    if (ctx.active.count(x)) type_error("identifier '" + x + "' is in both context zones");
    check_kind(delta, t);
  }
  for (auto& [x, t] : ctx.active) check_kind(delta, t);
  Checker c(delta, ctx, false);
  CheckResult r = expected ? c.check(p, expected, p->span) : c.infer(p, p->span);
  for (auto& [x, u] : r.usage) {
    if (u == Usage::Active && ctx.passive.count(x)) {
      type_error("identifier '" + x + "' from the passive context is used actively", p->span);
    }
  }
  return r;
}

void program_contexts(const Program& prog, KindContext& delta, TypingContext& ctx) {
  for (auto& n : prog.nats) delta[n] = Kind::Nat;
  for (auto& p : prog.params) {
    if (p.type->k == TK::Exp) {
      ctx.passive[p.name] = p.type;
    } else {
      ctx.active[p.name] = p.type;
    }
  }
}

CheckResult check_program(const Program& prog) {
  KindContext delta;
  TypingContext ctx;
  program_contexts(prog, delta, ctx);
  return type_check(delta, ctx, prog.body);
}

PType synth_type(const TypeEnv& env, const Phrase& p) {
  TypingContext ctx;
  ctx.active = env;
  Checker c({}, ctx, true);
  return c.infer(p, p->span).type;
}

}  // namespace dpia
