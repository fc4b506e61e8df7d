#include <functional>
#include <optional>
#include <random>

#include "dpia/checker.hpp"
#include "dpia/eval_fn.hpp"
#include "dpia/harness.hpp"
#include "dpia/lower.hpp"
#include "dpia/parser.hpp"
#include "dpia/pipeline.hpp"
#include "dpia/translate.hpp"

namespace dpia {

namespace {

using Failure = std::optional<std::string>;

class Instance {
 public:
  Instance(uint64_t seed, uint64_t max_size) : rng_(seed), max_(std::max<uint64_t>(1, max_size)) {}

  uint64_t pick(uint64_t n) { return rng_() % n; }
  uint64_t size() { return 1 + pick(max_); }
  // Two factors whose product stays within the size cap.
  std::pair<uint64_t, uint64_t> factors() {
    uint64_t a = 1 + pick(max_);
    uint64_t b = 1 + pick(std::max<uint64_t>(1, max_ / a));
    return {a, b};
  }
  Data elem() { return pick(3) == 0 ? dt::pair(dt::num(), dt::num()) : dt::num(); }
  Data component() { return pick(2) ? dt::num() : dt::array(Nat(size()), dt::num()); }

  // Arithmetic over the given num or pair variables.
  std::string scalar(const std::vector<std::pair<std::string, Data>>& vars, int depth) {
    if (depth == 0 || pick(3) == 0) {
      if (vars.empty() || pick(4) == 0) return std::to_string(pick(7));
      auto& [name, d] = vars[pick(vars.size())];
      if (d->k == DataTypeNode::K::Pair) return pick(2) ? "(fst " + name + ")" : "(snd " + name + ")";
      return name;
    }
    static const char* ops[] = {"+", "-", "*"};
    return std::string("(") + ops[pick(3)] + " " + scalar(vars, depth - 1) + " " +
           scalar(vars, depth - 1) + ")";
  }

  void param(const std::string& name, const PType& t) { ctx.params.push_back(Param{name, t, {}}); }
  Phrase parse(const std::string& text) { return parse_phrase(text, ctx); }

  Store store() {
    Store s;
    for (auto& p : ctx.params) {
      s[p.name] = p.type->k == PhraseTypeNode::K::Exp
                      ? random_value(p.type->data, {}, NumMode::Int, rng_)
                      : zero_value(p.type->data, {}, NumMode::Int);
    }
    return s;
  }

  Value eval(const Phrase& e, const Store& s) {
    ValueEnv env(s.begin(), s.end());
    return eval_fn(e, env, {}, NumMode::Int);
  }

  TypeEnv env() const {
    TypeEnv e;
    for (auto& p : ctx.params) e[p.name] = p.type;
    return e;
  }

  // Assignments in a seq of := expanded by their data type.
  Phrase expand(const Phrase& c) {
    if (auto m = match_prim(c)) {
      if (m->name == "seq") {
        auto cs = pair_components(c);
        return ph::seq(expand(cs->first), expand(cs->second));
      }
      if (m->name == ":=") {
        auto ae = pair_components(c);
        return tr.gen_assign(ae->first, synth_type(env(), ae->second)->data, ae->second);
      }
    }
    return c;
  }

  Failure run(const char* side, const Phrase& c, const Store& init, const Store& want) {
    recheck_comm(ctx, c);
    ExecResult r = exec(lower(c), init, {});
    if (!r.races.empty()) return std::string(side) + ": " + r.races.front().describe();
    for (auto& [name, v] : want) {
      if (!value_equal(r.store.at(name), v)) {
        return std::string(side) + ": cell " + name + " is " + value_to_string(r.store.at(name)) +
               ", expected " + value_to_string(v);
      }
    }
    return std::nullopt;
  }

  Program ctx;
  Translator tr{{"tmp", "xs", "ys", "a", "out", "out2", "e1", "e2", "x", "y", "o", "r"}};

 private:
  std::mt19937_64 rng_;
  uint64_t max_;
};

Failure either(Failure a, Failure b) { return a ? a : b; }

Failure prop_map(Instance& I) {
  uint64_t n = I.size();
  Data d1 = I.elem();
  I.param("xs", pt::exp(dt::array(Nat(n), d1)));
  I.param("a", pt::acc(dt::array(Nat(n), dt::num())));
  std::string f = I.scalar({{"x", d1}}, 2);
  Phrase lhs = I.parse("(mapI (lam x o (:= o " + f + ")) xs a)");
  Phrase m = I.parse("(map (lam x " + f + ") xs)");
  Store s = I.store(), want = s;
  want["a"] = I.eval(m, s);
  Phrase rhs = I.tr.acceptor(m, dt::array(Nat(n), dt::num()), ph::ident("a"));
  return either(I.run("mapI", lhs, s, want), I.run("acceptor(map)", rhs, s, want));
}

Failure prop_temp_storage(Instance& I) {
  uint64_t n = I.size();
  Data d;
  std::string e;
  switch (I.pick(4)) {
    case 0:
      d = dt::num();
      I.param("xs", pt::exp(dt::num()));
      I.param("ys", pt::exp(dt::pair(dt::num(), dt::num())));
      e = I.scalar({{"xs", dt::num()}, {"ys", dt::pair(dt::num(), dt::num())}}, 3);
      break;
    case 1:
      d = dt::pair(dt::num(), dt::array(Nat(n), dt::num()));
      I.param("xs", pt::exp(dt::num()));
      I.param("ys", pt::exp(dt::array(Nat(n), dt::num())));
      e = "(pair xs ys)";
      break;
    case 2: {
      auto [a, b] = I.factors();
      d = dt::array(Nat(a * b), dt::num());
      I.param("xs", pt::exp(dt::array(Nat(a), dt::array(Nat(b), dt::num()))));
      e = "(join xs)";
      break;
    }
    default:
      d = dt::array(Nat(n), dt::pair(dt::num(), dt::num()));
      I.param("xs", pt::exp(dt::array(Nat(n), dt::num())));
      I.param("ys", pt::exp(dt::array(Nat(n), dt::num())));
      e = "(zip xs ys)";
      break;
  }
  I.param("out", pt::acc(d));
  I.param("out2", pt::acc(d));
  Phrase E = I.parse(e);
  auto C = [&](const Phrase& x) {
    return ph::seq(I.tr.gen_assign(ph::ident("out"), d, x), I.tr.gen_assign(ph::ident("out2"), d, x));
  };
  Phrase tmp = ph::ident("tmp");
  Phrase body = ph::seq(I.tr.gen_assign(ph::proj(tmp, 1), d, E), C(ph::proj(tmp, 2)));
  Phrase lhs = ph::prim_app("new", {TypeArg::of(d)}, {ph::lam("tmp", pt::var(d), body)});
  Phrase rhs = C(E);
  Store s = I.store(), want = s;
  want["out"] = want["out2"] = I.eval(E, s);
  return either(I.run("new", lhs, s, want), I.run("C(E)", rhs, s, want));
}

Failure prop_reduce(Instance& I) {
  uint64_t n = I.size();
  Data d1 = I.elem();
  I.param("xs", pt::exp(dt::array(Nat(n), d1)));
  I.param("out", pt::acc(dt::num()));
  std::string f = I.scalar({{"x", d1}, {"y", dt::num()}}, 2);
  std::string init = std::to_string(I.pick(5));
  Phrase lhs = I.parse("(reduceI (lam x y o (:= o " + f + ")) " + init + " xs (lam r (:= out r)))");
  Phrase red = I.parse("(reduce (lam x y " + f + ") " + init + " xs)");
  Store s = I.store(), want = s;
  want["out"] = I.eval(red, s);
  Phrase rhs = I.tr.continuation(red, dt::num(), [](const Phrase& r) {
    return ph::assign(ph::ident("out"), r);
  });
  return either(I.run("reduceI", lhs, s, want), I.run("continuation(reduce)", rhs, s, want));
}

// A := layout(E...) against the acceptor-combinator form.
Failure layout(Instance& I, const std::string& lhs_text, const std::string& rhs_text,
               const std::string& value_text) {
  Store s = I.store(), want = s;
  want["a"] = I.eval(I.parse(value_text), s);
  return either(I.run("assign", I.expand(I.parse(lhs_text)), s, want),
                I.run("acceptor", I.expand(I.parse(rhs_text)), s, want));
}

Failure prop_pair(Instance& I) {
  Data d1 = I.component(), d2 = I.component();
  I.param("e1", pt::exp(d1));
  I.param("e2", pt::exp(d2));
  I.param("a", pt::acc(dt::pair(d1, d2)));
  return layout(I, "(:= a (pair e1 e2))", "(seq (:= (pairAcc1 a) e1) (:= (pairAcc2 a) e2))",
                "(pair e1 e2)");
}

Failure prop_zip(Instance& I) {
  uint64_t n = I.size();
  Data d1 = I.elem(), d2 = I.elem();
  I.param("e1", pt::exp(dt::array(Nat(n), d1)));
  I.param("e2", pt::exp(dt::array(Nat(n), d2)));
  I.param("a", pt::acc(dt::array(Nat(n), dt::pair(d1, d2))));
  return layout(I, "(:= a (zip e1 e2))", "(seq (:= (zipAcc1 a) e1) (:= (zipAcc2 a) e2))",
                "(zip e1 e2)");
}

Failure prop_split(Instance& I) {
  auto [m, k] = I.factors();
  Data el = I.elem();
  I.param("e1", pt::exp(dt::array(Nat(m * k), el)));
  I.param("a", pt::acc(dt::array(Nat(m), dt::array(Nat(k), el))));
  std::string ks = std::to_string(k);
  return layout(I, "(:= a (split " + ks + " e1))", "(:= (splitAcc a) e1)", "(split " + ks + " e1)");
}

Failure prop_join(Instance& I) {
  auto [m, k] = I.factors();
  Data el = I.elem();
  I.param("e1", pt::exp(dt::array(Nat(m), dt::array(Nat(k), el))));
  I.param("a", pt::acc(dt::array(Nat(m * k), el)));
  std::string ks = std::to_string(k);
  return layout(I, "(:= a (join e1))", "(:= (joinAcc " + ks + " a) e1)", "(join e1)");
}

}  // namespace

std::vector<PropertyResult> equivalence_suite(uint64_t seed, size_t instances, int max_size) {
  std::vector<std::pair<const char*, std::function<Failure(Instance&)>>> props = {
      {"map", prop_map},           {"temp-storage", prop_temp_storage},
      {"reduce", prop_reduce},     {"layout-pair", prop_pair},
      {"layout-zip", prop_zip},    {"layout-split", prop_split},
      {"layout-join", prop_join}};
  std::vector<PropertyResult> out;
  for (size_t p = 0; p < props.size(); ++p) {
    PropertyResult r;
    r.name = props[p].first;
    for (size_t i = 0; i < instances; ++i) {
      Instance I(seed * 1000003 + p * 7919 + i, static_cast<uint64_t>(max_size));
      Failure f;
      try {
        f = props[p].second(I);
      } catch (const std::exception& e) {
        f = std::string("exception: ") + e.what();
      }
      ++r.instances;
      if (f) {
        if (r.failures++ == 0) r.first_failure = "instance " + std::to_string(i) + ": " + *f;
      }
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace dpia
