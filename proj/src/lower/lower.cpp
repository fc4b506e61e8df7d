#include "dpia/lower.hpp"

#include "dpia/error.hpp"
#include "dpia/prims.hpp"
#include "dpia/translate.hpp"

namespace dpia {

using K = PhraseNode::K;

namespace {

void collect_names(const Phrase& p, std::set<std::string>& out) {
  if (!p) return;
  if (p->k == K::Ident || p->k == K::Lam) out.insert(p->name);
  collect_names(p->a, out);
  collect_names(p->b, out);
}

Phrase rebuild(const Phrase& p, Phrase a, Phrase b) {
  if (a == p->a && b == p->b) return p;
  auto n = std::make_shared<PhraseNode>(*p);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Expander {
 public:
  explicit Expander(const Phrase& root) {
    collect_names(root, avoid_);
    tr_ = Translator(avoid_);
  }

  Phrase run(const Phrase& p) {
    if (auto m = match_prim(p)) {
      if (is_mapI_family(m->name)) return run(mapI(*m));
      if (m->name == "reduceI") return run(reduceI(*m));
    }
    if (!p->a && !p->b) return p;
    return rebuild(p, p->a ? run(p->a) : nullptr, p->b ? run(p->b) : nullptr);
  }

 private:
  std::set<std::string> avoid_;
  Translator tr_;
  int counter_ = 0;

  std::string fresh(const std::string& base) {
    for (;;) {
      std::string n = base + std::to_string(++counter_);
      if (!avoid_.count(n)) {
        avoid_.insert(n);
        return n;
      }
    }
  }

  Phrase mapI(const PrimApp& m) {
    const Nat& n = m.nat(0);
    const Data &d1 = m.data(1), &d2 = m.data(2);
    const Phrase &F = m.args[0], &E = m.args[1], &A = m.args[2];
    std::string i = fresh("i");
    Phrase elem = ph::prim_app("idx", {TypeArg::of(n), TypeArg::of(d1)}, {E, ph::ident(i)});
    PType it = pt::exp(dt::idx(n));
    std::string loop = parfor_of(m.name);
    if (loop.empty()) {
      Phrase out = ph::prim_app("idxAcc", {TypeArg::of(n), TypeArg::of(d2)}, {A, ph::ident(i)});
      Phrase body = ph::lam(i, it, ph::apps(F, {elem, out}));
      return ph::prim_app("for", {TypeArg::of(n)}, {body});
    }
    std::string a = fresh("o");
    Phrase body =
        ph::lam(i, it, ph::lam(a, pt::acc(d2), ph::apps(F, {elem, ph::ident(a)})));
    return ph::prim_app(loop, {TypeArg::of(n), TypeArg::of(d2)}, {A, body});
  }

  Phrase reduceI(const PrimApp& m) {
    const Nat& n = m.nat(0);
    const Data &d1 = m.data(1), &d2 = m.data(2);
    const Phrase &F = m.args[0], &I = m.args[1], &E = m.args[2], &C = m.args[3];
    std::string acc = fresh("accum"), i = fresh("i");
    Phrase accp = ph::ident(acc);
    Phrase w = ph::proj(accp, 1), r = ph::proj(accp, 2);
    Phrase elem = ph::prim_app("idx", {TypeArg::of(n), TypeArg::of(d1)}, {E, ph::ident(i)});
    Phrase step;
    if (is_scalar_like(d2)) {
      step = ph::apps(F, {elem, r, w});
    } else {
      std::string t = fresh("t");
      Phrase tp = ph::ident(t);
      Phrase inner = ph::seq(ph::apps(F, {elem, r, ph::proj(tp, 1)}),
                             tr_.gen_assign(w, d2, ph::proj(tp, 2)));
      step = ph::prim_app("newPrivate", {TypeArg::of(d2)}, {ph::lam(t, pt::var(d2), inner)});
    }
    Phrase loop =
        ph::prim_app("for", {TypeArg::of(n)}, {ph::lam(i, pt::exp(dt::idx(n)), step)});
    Phrase body = ph::seq(tr_.gen_assign(w, d2, I), ph::seq(loop, ph::app(C, r)));
    return ph::prim_app("newPrivate", {TypeArg::of(d2)}, {ph::lam(acc, pt::var(d2), body)});
  }
};

// Loop and allocation bodies must be literal lambdas for code generation.
class EtaLoops {
 public:
  explicit EtaLoops(const Phrase& root) { collect_names(root, avoid_); }

  Phrase run(const Phrase& p) {
    if (auto m = match_prim(p)) {
      const std::string& name = m->name;
      int body_ix = -1, depth = 0;
      std::vector<PType> binders;
      if (name == "for") {
        body_ix = 0;
        binders = {pt::exp(dt::idx(m->nat(0)))};
      } else if (is_parfor_family(name)) {
        body_ix = 1;
        binders = {pt::exp(dt::idx(m->nat(0))), pt::acc(m->data(1))};
      } else if (is_new_family(name)) {
        body_ix = 0;
        binders = {pt::var(m->data(0))};
      }
      if (body_ix >= 0) {
        std::vector<Phrase> args = m->args;
        args[body_ix] = expand(args[body_ix], binders, depth);
        for (auto& a : args) a = run(a);
        return ph::with_span(ph::prim_app(name, m->targs, args), p->span);
      }
    }
    if (!p->a && !p->b) return p;
    return rebuild(p, p->a ? run(p->a) : nullptr, p->b ? run(p->b) : nullptr);
  }

 private:
  std::set<std::string> avoid_;
  int counter_ = 0;

  Phrase expand(const Phrase& f, const std::vector<PType>& binders, int depth) {
    if (depth == static_cast<int>(binders.size())) return f;
    if (f->k == K::Lam) return ph::lam(f->name, f->ann, expand(f->a, binders, depth + 1), f->span);
    std::string x;
    do {
      x = "eta" + std::to_string(++counter_);
    } while (avoid_.count(x));
    avoid_.insert(x);
    return ph::lam(x, binders[depth],
                   expand(beta_normalize(ph::app(f, ph::ident(x))), binders, depth + 1));
  }
};

}  // namespace

Phrase expand_intermediate(const Phrase& p) { return Expander(p).run(p); }

Phrase normalize(const Phrase& p) {
  Phrase b = beta_normalize(p);
  return EtaLoops(b).run(b);
}

Phrase lower(const Phrase& stage1) {
  Phrase out = normalize(expand_intermediate(stage1));
  if (count_prims(out, [](const std::string& n) {
        return is_mapI_family(n) || n == "reduceI";
      }) != 0) {
    internal_error("lower: residual intermediate combinator");
  }
  return out;
}

bool is_purely_imperative(const Phrase& p) {
  return count_prims(p, [](const std::string& n) {
           return is_map_family(n) || n == "reduce" || is_to_family(n) || is_mapI_family(n) ||
                  n == "reduceI";
         }) == 0;
}

}  // namespace dpia
