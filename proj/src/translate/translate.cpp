#include "dpia/translate.hpp"

#include "dpia/checker.hpp"
#include "dpia/error.hpp"
#include "dpia/prims.hpp"

namespace dpia {

using K = PhraseNode::K;
using DK = DataTypeNode::K;

namespace {

void collect_names(const Phrase& p, std::set<std::string>& out) {
  if (!p) return;
  if (p->k == K::Ident || p->k == K::Lam) out.insert(p->name);
  collect_names(p->a, out);
  collect_names(p->b, out);
}

TypeArg N(const Nat& n) { return TypeArg::of(n); }
TypeArg D(const Data& d) { return TypeArg::of(d); }

}  // namespace

bool is_trivial_exp(const Phrase& E) {
  return count_prims(E, [](const std::string& n) {
           return is_map_family(n) || n == "reduce" || is_to_family(n);
         }) == 0;
}

Translator::Translator(std::set<std::string> avoid) : avoid_(std::move(avoid)) {}

std::string Translator::fresh(const std::string& base) {
  for (;;) {
    std::string n = base + std::to_string(++counter_);
    if (!avoid_.count(n)) {
      avoid_.insert(n);
      return n;
    }
  }
}

std::pair<std::string, Phrase> Translator::open_fn(const Phrase& F, const std::string& base) {
  if (F->k == K::Lam) return {F->name, F->a};
  std::string x = fresh(base);
  return {x, ph::app(F, ph::ident(x))};
}

Phrase Translator::reify(const Data& d, const Continuation& C) {
  std::string r = fresh("r");
  return ph::lam(r, pt::exp(d), C(ph::ident(r)));
}

Phrase Translator::gen_assign(const Phrase& A, const Data& d, const Phrase& E) {
  switch (d->k) {
    case DK::Num:
    case DK::Idx:
    case DK::Vec:
      return ph::assign(A, E);
    case DK::Array: {
      ++assign_mapIs_;
      std::string x = fresh("x"), a = fresh("a");
      Phrase body = gen_assign(ph::ident(a), d->a, ph::ident(x));
      Phrase F = ph::lam(x, pt::exp(d->a), ph::lam(a, pt::acc(d->a), body));
      return ph::prim_app("mapI", {N(d->size), D(d->a), D(d->a)}, {F, E, A});
    }
    case DK::Pair: {
      std::vector<TypeArg> ts{D(d->a), D(d->b)};
      Phrase c1 = gen_assign(ph::prim_app("pairAcc1", ts, {A}), d->a,
                             ph::prim_app("fst", ts, {E}));
      Phrase c2 = gen_assign(ph::prim_app("pairAcc2", ts, {A}), d->b,
                             ph::prim_app("snd", ts, {E}));
      return ph::seq(c1, c2);
    }
    case DK::Var:
      break;
  }
  internal_error("gen_assign at non-concrete type " + data_to_string(d));
}

Phrase Translator::acceptor(const Phrase& E, const Data& d, const Phrase& A) {
  if (is_trivial_exp(E)) return gen_assign(A, d, E);
  auto m = match_prim(E);
  if (!m) internal_error("translate: unexpected expression form", E->span);
  const std::string& name = m->name;
  const auto& ta = m->targs;
  const auto& args = m->args;

  if (is_arith_op(name)) {
    auto [e1, e2] = *pair_components(E);
    return continuation(e1, d, [&, e2 = e2](const Phrase& x) {
      return continuation(e2, d, [&](const Phrase& y) {
        return ph::assign(A, ph::binop(name, x, y));
      });
    });
  }
  if (name == "negate") {
    return continuation(args[0], d, [&](const Phrase& x) { return ph::assign(A, ph::negate(x)); });
  }
  if (is_map_family(name)) {
    const Nat& n = m->nat(0);
    const Data &d1 = m->data(1), &d2 = m->data(2);
    return continuation(args[1], dt::array(n, d1), [&](const Phrase& x) {
      auto [xb, body] = open_fn(args[0], "x");
      std::string o = fresh("o");
      Phrase F = ph::lam(xb, pt::exp(d1),
                         ph::lam(o, pt::acc(d2), acceptor(body, d2, ph::ident(o))));
      return ph::prim_app(mapI_of(name), {N(n), D(d1), D(d2)}, {F, x, A});
    });
  }
  if (name == "reduce") {
    const Nat& n = m->nat(0);
    const Data &d1 = m->data(1), &d2 = m->data(2);
    return continuation(args[2], dt::array(n, d1), [&](const Phrase& x) {
      return continuation(args[1], d2, [&](const Phrase& init) {
        Phrase F = reduce_fn(args[0], d1, d2);
        Phrase C = reify(d2, [&](const Phrase& r) { return gen_assign(A, d2, r); });
        return ph::prim_app("reduceI", {N(n), D(d1), D(d2)}, {F, init, x, C});
      });
    });
  }
  if (name == "zip") {
    const Nat& n = m->nat(0);
    const Data &d1 = m->data(1), &d2 = m->data(2);
    return ph::seq(acceptor(args[0], dt::array(n, d1), ph::prim_app("zipAcc1", ta, {A})),
                   acceptor(args[1], dt::array(n, d2), ph::prim_app("zipAcc2", ta, {A})));
  }
  if (name == "split") {
    const Nat &n = m->nat(0), &mm = m->nat(1);
    return acceptor(args[0], dt::array(n * mm, m->data(2)), ph::prim_app("splitAcc", ta, {A}));
  }
  if (name == "join") {
    const Nat &n = m->nat(0), &mm = m->nat(1);
    return acceptor(args[0], dt::array(n, dt::array(mm, m->data(2))),
                    ph::prim_app("joinAcc", ta, {A}));
  }
  if (name == "pair") {
    return ph::seq(acceptor(args[0], m->data(0), ph::prim_app("pairAcc1", ta, {A})),
                   acceptor(args[1], m->data(1), ph::prim_app("pairAcc2", ta, {A})));
  }
  if (name == "fst" || name == "snd") {
    Data whole = dt::pair(m->data(0), m->data(1));
    return continuation(args[0], whole, [&](const Phrase& x) {
      return gen_assign(A, d, ph::prim_app(name, ta, {x}));
    });
  }
  if (name == "idx") {
    const Nat& n = m->nat(0);
    return continuation(args[0], dt::array(n, m->data(1)), [&](const Phrase& x) {
      return continuation(args[1], dt::idx(n), [&](const Phrase& j) {
        return gen_assign(A, d, ph::prim_app("idx", ta, {x, j}));
      });
    });
  }
  if (auto v = vec_prim(name)) {
    const Nat& mm = m->nat(0);
    Nat wn(static_cast<uint64_t>(v->width));
    if (v->base == "asScalar") {
      return acceptor(args[0], dt::array(mm, dt::vec(v->width)),
                      ph::prim_app(vec_prim_name("asScalarAcc", v->width), ta, {A}));
    }
    if (v->base == "asVector") {
      return acceptor(args[0], dt::array(mm * wn, dt::num()),
                      ph::prim_app(vec_prim_name("asVectorAcc", v->width), ta, {A}));
    }
  }
  if (is_to_family(name)) {
    return acceptor(beta_normalize(ph::app(args[0], args[1])), m->data(1), A);
  }
  internal_error("translate: no acceptor clause for '" + name + "'", E->span);
}

Phrase Translator::reduce_fn(const Phrase& F0, const Data& d1, const Data& d2) {
  auto [xb, inner] = open_fn(F0, "x");
  Phrase inner_fn = inner->k == K::Lam ? inner : nullptr;
  std::string yb;
  Phrase body;
  if (inner_fn) {
    yb = inner_fn->name;
    body = inner_fn->a;
  } else {
    yb = fresh("y");
    body = ph::app(inner, ph::ident(yb));
  }
  if (yb == xb) {
    std::string y2 = fresh("y");
    body = substitute(body, yb, ph::ident(y2));
    yb = y2;
  }
  std::string o = fresh("o");
  return ph::lam(xb, pt::exp(d1),
                 ph::lam(yb, pt::exp(d2),
                         ph::lam(o, pt::acc(d2), acceptor(body, d2, ph::ident(o)))));
}

Phrase Translator::continuation(const Phrase& E, const Data& d, const Continuation& C) {
  if (is_trivial_exp(E)) return C(E);
  auto m = match_prim(E);
  if (!m) internal_error("translate: unexpected expression form", E->span);
  const std::string& name = m->name;
  const auto& ta = m->targs;
  const auto& args = m->args;

  auto through_new = [&](const std::string& new_name, const Data& td, const Phrase& fill) {
    std::string tmp = fresh("tmp");
    Phrase t = ph::ident(tmp);
    Phrase body = ph::seq(acceptor(fill, td, ph::proj(t, 1)), C(ph::proj(t, 2)));
    return ph::prim_app(new_name, {D(td)}, {ph::lam(tmp, pt::var(td), body)});
  };

  if (is_arith_op(name)) {
    auto [e1, e2] = *pair_components(E);
    return continuation(e1, d, [&, e2 = e2](const Phrase& x) {
      return continuation(e2, d, [&](const Phrase& y) { return C(ph::binop(name, x, y)); });
    });
  }
  if (name == "negate") {
    return continuation(args[0], d, [&](const Phrase& x) { return C(ph::negate(x)); });
  }
  if (is_map_family(name)) return through_new("new", d, E);
  if (name == "reduce") {
    const Nat& n = m->nat(0);
    const Data &d1 = m->data(1), &d2 = m->data(2);
    return continuation(args[2], dt::array(n, d1), [&](const Phrase& x) {
      return continuation(args[1], d2, [&](const Phrase& init) {
        Phrase F = reduce_fn(args[0], d1, d2);
        return ph::prim_app("reduceI", {N(n), D(d1), D(d2)}, {F, init, x, reify(d2, C)});
      });
    });
  }
  if (name == "zip" || name == "pair") {
    Data t0 = name == "zip" ? dt::array(m->nat(0), m->data(1)) : m->data(0);
    Data t1 = name == "zip" ? dt::array(m->nat(0), m->data(2)) : m->data(1);
    return continuation(args[0], t0, [&](const Phrase& x) {
      return continuation(args[1], t1,
                          [&](const Phrase& y) { return C(ph::prim_app(name, ta, {x, y})); });
    });
  }
  if (name == "idx") {
    const Nat& n = m->nat(0);
    return continuation(args[0], dt::array(n, m->data(1)), [&](const Phrase& x) {
      return continuation(args[1], dt::idx(n), [&](const Phrase& j) {
        return C(ph::prim_app("idx", ta, {x, j}));
      });
    });
  }
  if (is_to_family(name)) {
    return through_new(new_of(name), m->data(1), beta_normalize(ph::app(args[0], args[1])));
  }
  // Layout operators and projections pass straight through.
  Data inner;
  if (name == "split") {
    inner = dt::array(m->nat(0) * m->nat(1), m->data(2));
  } else if (name == "join") {
    inner = dt::array(m->nat(0), dt::array(m->nat(1), m->data(2)));
  } else if (name == "fst" || name == "snd") {
    inner = dt::pair(m->data(0), m->data(1));
  } else if (auto v = vec_prim(name)) {
    Nat wn(static_cast<uint64_t>(v->width));
    if (v->base == "asScalar") inner = dt::array(m->nat(0), dt::vec(v->width));
    if (v->base == "asVector") inner = dt::array(m->nat(0) * wn, dt::num());
  }
  if (!inner) internal_error("translate: no continuation clause for '" + name + "'", E->span);
  return continuation(args[0], inner,
                      [&](const Phrase& x) { return C(ph::prim_app(name, ta, {x})); });
}

Phrase output_acceptor(const Program& prog) {
  const Param* p = prog.find_param(prog.output);
  if (!p) internal_error("program has no output parameter");
  if (as_var_type(p->type)) return ph::proj(ph::ident(p->name), 1);
  return ph::ident(p->name);
}

Stage1 translate_program(const Program& prog) {
  Phrase body = beta_normalize(prog.body);
  TypeEnv env;
  for (auto& p : prog.params) env[p.name] = p.type;
  PType t = synth_type(env, body);
  if (t->k == PhraseTypeNode::K::Comm) return {body, 0};
  if (t->k != PhraseTypeNode::K::Exp) {
    type_error("program body must have type exp or comm, found " + ptype_to_string(t));
  }
  std::set<std::string> avoid;
  collect_names(body, avoid);
  for (auto& p : prog.params) avoid.insert(p.name);
  Translator tr(avoid);
  Phrase out = tr.acceptor(body, t->data, output_acceptor(prog));
  return {out, tr.assign_mapIs()};
}

}  // namespace dpia
