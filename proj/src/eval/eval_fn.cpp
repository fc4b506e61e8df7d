#include "dpia/eval_fn.hpp"

#include <memory>

#include "dpia/error.hpp"
#include "dpia/prims.hpp"

namespace dpia {

namespace {

using K = PhraseNode::K;

struct Sem;
using SemP = std::shared_ptr<const Sem>;
struct EnvNode;
using Env = std::shared_ptr<const EnvNode>;

struct EnvNode {
  std::string name;
  SemP val;
  Env next;
};

// Data value, lambda closure, partially applied primitive, or phrase pair.
struct Sem {
  enum class T { Data, Closure, Prim, Pair } t = T::Data;
  Value v;
  Phrase lam;
  Env env;
  std::string prim;
  std::vector<TypeArg> targs;
  std::vector<SemP> args;
  SemP a, b;
};

SemP data(Value v) {
  auto s = std::make_shared<Sem>();
  s->v = std::move(v);
  return s;
}

class Evaluator {
 public:
  Evaluator(const NatEnv& sigma, NumMode mode) : sigma_(sigma), mode_(mode) {}

  SemP eval(const Phrase& p, const Env& env) {
    switch (p->k) {
      case K::Ident: {
        for (const EnvNode* e = env.get(); e; e = e->next.get()) {
          if (e->name == p->name) return e->val;
        }
        internal_error("eval: unbound identifier '" + p->name + "'", p->span);
      }
      case K::Lit:
        return data(literal(p->lit));
      case K::Lam: {
        auto s = std::make_shared<Sem>();
        s->t = Sem::T::Closure;
        s->lam = p;
        s->env = env;
        return s;
      }
      case K::Prim: {
        auto s = std::make_shared<Sem>();
        s->t = Sem::T::Prim;
        s->prim = p->name;
        return complete(s);
      }
      case K::TApp: {
        SemP f = eval(p->a, env);
        if (f->t != Sem::T::Prim) internal_error("eval: type application of a non-primitive");
        auto s = std::make_shared<Sem>(*f);
        s->targs.push_back(p->targ);
        return complete(s);
      }
      case K::TLam:
        internal_error("eval: type abstraction in a functional expression", p->span);
      case K::App:
        return apply(eval(p->a, env), eval(p->b, env));
      case K::Pair: {
        SemP a = eval(p->a, env), b = eval(p->b, env);
        if (a->t == Sem::T::Data && b->t == Sem::T::Data) return data(value_pair(a->v, b->v));
        auto s = std::make_shared<Sem>();
        s->t = Sem::T::Pair;
        s->a = a;
        s->b = b;
        return s;
      }
      case K::Proj: {
        SemP q = eval(p->a, env);
        if (q->t == Sem::T::Pair) return p->proj == 1 ? q->a : q->b;
        if (q->t == Sem::T::Data && q->v.k == Value::K::Pair) return data(q->v.xs[p->proj - 1]);
        internal_error("eval: projection from a non-pair", p->span);
      }
    }
    internal_error("eval: unhandled node");
  }

  SemP apply(const SemP& f, const SemP& arg) {
    if (f->t == Sem::T::Closure) {
      auto env = std::make_shared<const EnvNode>(EnvNode{f->lam->name, arg, f->env});
      return eval(f->lam->a, env);
    }
    if (f->t == Sem::T::Prim) {
      auto s = std::make_shared<Sem>(*f);
      s->args.push_back(arg);
      return complete(s);
    }
    internal_error("eval: application of a non-function");
  }

  Value value(const SemP& s) {
    if (s->t != Sem::T::Data) internal_error("eval: expected a data value");
    return s->v;
  }

 private:
  const NatEnv& sigma_;
  NumMode mode_;

  Value literal(const Literal& l) {
    Value scalar = l.is_int && mode_ == NumMode::Int ? value_num(l.i)
                                                      : value_num_mode(l.as_double(), mode_);
    switch (l.type->k) {
      case DataTypeNode::K::Idx:
        return value_idx(l.as_int());
      case DataTypeNode::K::Vec:
        return value_vec(std::vector<Value>(l.type->width, scalar));
      default:
        return scalar;
    }
  }

  SemP complete(const std::shared_ptr<Sem>& s) {
    const PrimInfo* info = lookup_prim(s->prim);
    if (!info) internal_error("eval: unknown primitive " + s->prim);
    size_t ntk = info->overloaded ? 0 : info->tkinds.size();
    if (s->targs.size() < ntk || s->args.size() < static_cast<size_t>(info->nargs)) return s;
    return data(run(s->prim, s->targs, s->args));
  }

  uint64_t nat(const TypeArg& t) { return nat_eval(t.nat, sigma_); }

  Value run(const std::string& name, const std::vector<TypeArg>& targs,
            const std::vector<SemP>& args) {
    if (is_arith_op(name)) {
      Value p = value(args[0]);
      return value_arith(name, p.xs[0], p.xs[1]);
    }
    if (name == "negate") return value_negate(value(args[0]));
    if (is_map_family(name)) {
      Value xs = value(args[1]);
      std::vector<Value> out;
      out.reserve(xs.xs.size());
      for (auto& x : xs.xs) out.push_back(value(apply(args[0], data(x))));
      return value_array(std::move(out));
    }
    if (name == "reduce") {
      SemP acc = args[1];
      Value xs = value(args[2]);
      for (auto& x : xs.xs) acc = apply(apply(args[0], data(x)), acc);
      return value(acc);
    }
    if (name == "zip") {
      Value a = value(args[0]), b = value(args[1]);
      std::vector<Value> out;
      for (size_t i = 0; i < a.xs.size(); ++i) out.push_back(value_pair(a.xs[i], b.xs[i]));
      return value_array(std::move(out));
    }
    if (name == "split") {
      uint64_t n = nat(targs[0]);
      Value a = value(args[0]);
      if (n == 0) internal_error("eval: split by zero");
      std::vector<Value> rows;
      for (size_t i = 0; i * n < a.xs.size(); ++i) {
        rows.push_back(value_array(std::vector<Value>(a.xs.begin() + i * n,
                                                      a.xs.begin() + (i + 1) * n)));
      }
      return value_array(std::move(rows));
    }
    if (name == "join") {
      Value a = value(args[0]);
      std::vector<Value> out;
      for (auto& row : a.xs) out.insert(out.end(), row.xs.begin(), row.xs.end());
      return value_array(std::move(out));
    }
    if (name == "pair") return value_pair(value(args[0]), value(args[1]));
    if (name == "fst") return value(args[0]).xs[0];
    if (name == "snd") return value(args[0]).xs[1];
    if (name == "idx") {
      Value a = value(args[0]);
      int64_t i = value(args[1]).i;
      if (i < 0 || static_cast<size_t>(i) >= a.xs.size()) {
        internal_error("eval: index " + std::to_string(i) + " out of bounds");
      }
      return a.xs[i];
    }
    if (is_to_family(name)) return value(apply(args[0], args[1]));
    if (auto v = vec_prim(name)) {
      Value a = value(args[0]);
      size_t w = static_cast<size_t>(v->width);
      if (v->base == "asVector") {
        std::vector<Value> out;
        for (size_t i = 0; i + w <= a.xs.size(); i += w) {
          out.push_back(value_vec(std::vector<Value>(a.xs.begin() + i, a.xs.begin() + i + w)));
        }
        return value_array(std::move(out));
      }
      if (v->base == "asScalar") {
        std::vector<Value> out;
        for (auto& x : a.xs) out.insert(out.end(), x.xs.begin(), x.xs.end());
        return value_array(std::move(out));
      }
    }
    internal_error("eval: '" + name + "' is not a functional primitive");
  }
};

}  // namespace

Value eval_fn(const Phrase& e, const ValueEnv& env, const NatEnv& sigma, NumMode mode) {
  Env en;
  for (auto& [x, v] : env) en = std::make_shared<const EnvNode>(EnvNode{x, data(v), en});
  Evaluator ev(sigma, mode);
  return ev.value(ev.eval(e, en));
}

}  // namespace dpia
