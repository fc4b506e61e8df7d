#include "dpia/simplify.hpp"

#include <algorithm>

namespace dpia::c {

using EK = Expr::K;

namespace {

std::optional<int64_t> add_ov(std::optional<int64_t> a, std::optional<int64_t> b) {
  int64_t r;
  if (!a || !b || __builtin_add_overflow(*a, *b, &r)) return std::nullopt;
  return r;
}

std::optional<int64_t> mul_ov(std::optional<int64_t> a, std::optional<int64_t> b) {
  int64_t r;
  if (!a || !b || __builtin_mul_overflow(*a, *b, &r)) return std::nullopt;
  return r;
}

std::optional<int64_t> const_of(const ExprP& e) {
  if (e->k == EK::IntLit) return e->i;
  return std::nullopt;
}

bool is_lit(const ExprP& e, int64_t v) { return e->k == EK::IntLit && e->i == v; }

}  // namespace

std::string expr_key(const ExprP& e) {
  switch (e->k) {
    case EK::IntLit:
      return std::to_string(e->i);
    case EK::NumLit:
      return "#" + std::to_string(e->f);
    case EK::Var:
      return e->name;
    case EK::Bin:
      return "(" + expr_key(e->a) + " " + e->op + " " + expr_key(e->b) + ")";
    case EK::Neg:
      return "(-" + expr_key(e->a) + ")";
    case EK::Access: {
      std::string s = (e->deref ? "*" : "") + e->name;
      for (auto& st : e->steps) {
        if (st.k == Step::K::Field) s += ".x" + std::to_string(st.field);
        else if (st.k == Step::K::Lane) s += "<" + expr_key(st.e) + ">";
        else s += "[" + expr_key(st.e) + "]";
      }
      return s;
    }
    case EK::VLoad:
      return "vload" + std::to_string(e->width) + "(" + expr_key(e->a) + "," + e->name + ")";
    case EK::VecLit: {
      std::string s = "<";
      for (auto& x : e->elems) s += expr_key(x) + ",";
      return s + ">";
    }
  }
  return "?";
}

Interval expr_range(const ExprP& e, const RangeEnv& env) {
  switch (e->k) {
    case EK::IntLit:
      return {e->i, e->i};
    case EK::Var: {
      auto it = env.find(e->name);
      if (it != env.end()) return {it->second.first, it->second.second};
      return {0, std::nullopt};
    }
    case EK::Neg: {
      Interval a = expr_range(e->a, env);
      Interval r;
      if (a.hi && *a.hi != INT64_MIN) r.lo = -*a.hi;
      if (a.lo && *a.lo != INT64_MIN) r.hi = -*a.lo;
      return r;
    }
    case EK::Bin: {
      Interval a = expr_range(e->a, env), b = expr_range(e->b, env);
      switch (e->op) {
        case '+':
          return {add_ov(a.lo, b.lo), add_ov(a.hi, b.hi)};
        case '-': {
          Interval r;
          if (a.lo && b.hi && *b.hi != INT64_MIN) r.lo = add_ov(a.lo, -*b.hi);
          if (a.hi && b.lo && *b.lo != INT64_MIN) r.hi = add_ov(a.hi, -*b.lo);
          return r;
        }
        case '*': {
          if (a.lo && b.lo && *a.lo >= 0 && *b.lo >= 0) {
            return {mul_ov(a.lo, b.lo), mul_ov(a.hi, b.hi)};
          }
          if (a.lo && a.hi && b.lo && b.hi) {
            std::optional<int64_t> lo, hi;
            for (auto x : {*a.lo, *a.hi}) {
              for (auto y : {*b.lo, *b.hi}) {
                auto p = mul_ov(x, y);
                if (!p) return {};
                lo = lo ? std::min(*lo, *p) : *p;
                hi = hi ? std::max(*hi, *p) : *p;
              }
            }
            return {lo, hi};
          }
          return {};
        }
        case '/': {
          auto c = const_of(e->b);
          if (c && *c > 0 && a.lo && *a.lo >= 0) {
            Interval r{*a.lo / *c, std::nullopt};
            if (a.hi) r.hi = *a.hi / *c;
            return r;
          }
          return {};
        }
        case '%': {
          auto c = const_of(e->b);
          if (c && *c > 0 && a.lo && *a.lo >= 0) {
            if (a.hi && *a.hi < *c) return a;
            return {0, *c - 1};
          }
          return {};
        }
      }
      return {};
    }
    default:
      return {};
  }
}

LinearForm linear_form(const ExprP& e) {
  LinearForm lf;
  auto atom = [&](const ExprP& x) {
    lf.terms[expr_key(x)] = {1, x};
    return lf;
  };
  switch (e->k) {
    case EK::IntLit:
      lf.c = e->i;
      return lf;
    case EK::Neg: {
      LinearForm a = linear_form(e->a);
      for (auto& [k, t] : a.terms) t.first = -t.first;
      a.c = -a.c;
      return a;
    }
    case EK::Bin: {
      if (e->op == '+' || e->op == '-') {
        LinearForm a = linear_form(e->a), b = linear_form(e->b);
        int64_t s = e->op == '+' ? 1 : -1;
        for (auto& [k, t] : b.terms) {
          auto& slot = a.terms[k];
          if (!slot.second) slot.second = t.second;
          slot.first += s * t.first;
        }
        a.c += s * b.c;
        std::erase_if(a.terms, [](auto& kv) { return kv.second.first == 0; });
        return a;
      }
      if (e->op == '*') {
        LinearForm a = linear_form(e->a), b = linear_form(e->b);
        if (b.terms.empty()) std::swap(a, b);
        if (a.terms.empty()) {
          int64_t k = a.c;
          for (auto& [key, t] : b.terms) t.first *= k;
          b.c *= k;
          std::erase_if(b.terms, [](auto& kv) { return kv.second.first == 0; });
          return b;
        }
      }
      return atom(e);
    }
    default:
      return atom(e);
  }
}

ExprP linear_to_expr(const LinearForm& lf) {
  ExprP acc;
  for (auto& [k, t] : lf.terms) {
    int64_t co = t.first;
    ExprP term = std::llabs(co) == 1 ? t.second : bin('*', int_lit(std::llabs(co)), t.second);
    if (!acc) acc = co < 0 ? neg(term) : term;
    else acc = bin(co < 0 ? '-' : '+', acc, term);
  }
  if (!acc) return int_lit(lf.c);
  if (lf.c > 0) acc = bin('+', acc, int_lit(lf.c));
  if (lf.c < 0) acc = bin('-', acc, int_lit(-lf.c));
  return acc;
}

namespace {

std::optional<ExprP> rule_const_fold(const ExprP& e, const RangeEnv&) {
  if (e->k == EK::Neg && e->a->k == EK::IntLit) return int_lit(-e->a->i);
  if (e->k != EK::Bin || e->a->k != EK::IntLit || e->b->k != EK::IntLit) return std::nullopt;
  int64_t x = e->a->i, y = e->b->i;
  switch (e->op) {
    case '+':
      return int_lit(x + y);
    case '-':
      return int_lit(x - y);
    case '*':
      return int_lit(x * y);
    case '/':
      if (y == 0) return std::nullopt;
      return int_lit(x / y);
    case '%':
      if (y == 0) return std::nullopt;
      return int_lit(x % y);
  }
  return std::nullopt;
}

std::optional<ExprP> rule_identity(const ExprP& e, const RangeEnv&) {
  if (e->k != EK::Bin) return std::nullopt;
  const ExprP &a = e->a, &b = e->b;
  switch (e->op) {
    case '+':
      if (is_lit(b, 0)) return a;
      if (is_lit(a, 0)) return b;
      break;
    case '-':
      if (is_lit(b, 0)) return a;
      break;
    case '*':
      if (is_lit(b, 1)) return a;
      if (is_lit(a, 1)) return b;
      if (is_lit(a, 0) || is_lit(b, 0)) return int_lit(0);
      break;
    case '/':
      if (is_lit(b, 1)) return a;
      break;
    case '%':
      if (is_lit(b, 1)) return int_lit(0);
      break;
  }
  return std::nullopt;
}

bool is_linear_node(const ExprP& e) {
  return e->k == EK::Neg || (e->k == EK::Bin && (e->op == '+' || e->op == '-' || e->op == '*'));
}

std::optional<ExprP> rule_linear(const ExprP& e, const RangeEnv&) {
  if (!is_linear_node(e)) return std::nullopt;
  LinearForm lf = linear_form(e);
  if (lf.terms.empty()) return std::nullopt;
  // Products of two non-constant factors stay as atoms; nothing to do.
  if (lf.terms.size() == 1 && lf.c == 0 && lf.terms.begin()->first == expr_key(e)) {
    return std::nullopt;
  }
  ExprP r = linear_to_expr(lf);
  if (expr_key(r) == expr_key(e)) return std::nullopt;
  return r;
}

struct DivSplit {
  LinearForm quot;  // already divided by the divisor
  LinearForm rem;
};

// a = c*Q + R with 0 <= R < c and a >= 0.
std::optional<DivSplit> split_by(const ExprP& a, int64_t c, const RangeEnv& env) {
  Interval ra = expr_range(a, env);
  if (!ra.lo || *ra.lo < 0) return std::nullopt;
  LinearForm lf = linear_form(a);
  DivSplit s;
  for (auto& [k, t] : lf.terms) {
    if (t.first % c == 0) s.quot.terms[k] = {t.first / c, t.second};
    else s.rem.terms[k] = t;
  }
  s.quot.c = lf.c / c;
  s.rem.c = lf.c % c;
  if (s.rem.c < 0) {
    s.rem.c += c;
    s.quot.c -= 1;
  }
  Interval rr = expr_range(linear_to_expr(s.rem), env);
  if (!rr.lo || !rr.hi || *rr.lo < 0 || *rr.hi >= c) return std::nullopt;
  return s;
}

std::optional<ExprP> rule_div_range(const ExprP& e, const RangeEnv& env) {
  if (e->k != EK::Bin || e->op != '/') return std::nullopt;
  auto c = const_of(e->b);
  if (!c || *c <= 0) return std::nullopt;
  auto s = split_by(e->a, *c, env);
  if (!s) return std::nullopt;
  return linear_to_expr(s->quot);
}

std::optional<ExprP> rule_mod_range(const ExprP& e, const RangeEnv& env) {
  if (e->k != EK::Bin || e->op != '%') return std::nullopt;
  auto c = const_of(e->b);
  if (!c || *c <= 0) return std::nullopt;
  auto s = split_by(e->a, *c, env);
  if (!s) return std::nullopt;
  ExprP r = linear_to_expr(s->rem);
  if (expr_key(r) == expr_key(e)) return std::nullopt;
  return r;
}

std::optional<ExprP> rule_div_div(const ExprP& e, const RangeEnv& env) {
  if (e->k != EK::Bin || e->op != '/' || e->a->k != EK::Bin || e->a->op != '/') {
    return std::nullopt;
  }
  auto c2 = const_of(e->b), c1 = const_of(e->a->b);
  if (!c1 || !c2 || *c1 <= 0 || *c2 <= 0) return std::nullopt;
  Interval r = expr_range(e->a->a, env);
  if (!r.lo || *r.lo < 0) return std::nullopt;
  auto p = mul_ov(*c1, *c2);
  if (!p) return std::nullopt;
  return bin('/', e->a->a, int_lit(*p));
}

std::optional<ExprP> rule_mod_mod(const ExprP& e, const RangeEnv& env) {
  if (e->k != EK::Bin || e->op != '%' || e->a->k != EK::Bin || e->a->op != '%') {
    return std::nullopt;
  }
  auto c2 = const_of(e->b), c1 = const_of(e->a->b);
  if (!c1 || !c2 || *c1 <= 0 || *c2 <= 0 || *c1 % *c2 != 0) return std::nullopt;
  Interval r = expr_range(e->a->a, env);
  if (!r.lo || *r.lo < 0) return std::nullopt;
  return bin('%', e->a->a, e->b);
}

// q*c*(a/c) + q*(a%c) == q*a for any a and c != 0.
std::optional<ExprP> rule_div_mod_merge(const ExprP& e, const RangeEnv&) {
  if (!is_linear_node(e)) return std::nullopt;
  LinearForm lf = linear_form(e);
  for (auto& [key, t] : lf.terms) {
    const ExprP& m = t.second;
    if (m->k != EK::Bin || m->op != '%') continue;
    auto c = const_of(m->b);
    if (!c || *c == 0) continue;
    auto it = lf.terms.find(expr_key(bin('/', m->a, m->b)));
    if (it == lf.terms.end() || it->second.first != t.first * *c) continue;
    int64_t q = t.first;
    std::string div_key = it->first, mod_key = key;
    lf.terms.erase(div_key);
    lf.terms.erase(mod_key);
    LinearForm a = linear_form(m->a);
    for (auto& [k2, t2] : a.terms) {
      auto& slot = lf.terms[k2];
      if (!slot.second) slot.second = t2.second;
      slot.first += q * t2.first;
    }
    lf.c += q * a.c;
    std::erase_if(lf.terms, [](auto& kv) { return kv.second.first == 0; });
    return linear_to_expr(lf);
  }
  return std::nullopt;
}

ExprP with_children(const ExprP& e, ExprP a, ExprP b) {
  if (a == e->a && b == e->b) return e;
  auto n = std::make_shared<Expr>(*e);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

ExprP simplify_rec(const ExprP& e, const RangeEnv& env, std::map<std::string, int>* fired,
                   int depth) {
  if (e->k != EK::Bin && e->k != EK::Neg) return e;
  ExprP cur = with_children(e, simplify_rec(e->a, env, fired, depth),
                            e->b ? simplify_rec(e->b, env, fired, depth) : nullptr);
  if (depth > 32) return cur;
  for (auto& rule : simplify_rules()) {
    if (auto r = rule.apply(cur, env)) {
      if (fired) ++(*fired)[rule.name];
      return simplify_rec(*r, env, fired, depth + 1);
    }
  }
  return cur;
}

}  // namespace

const std::vector<SimplifyRule>& simplify_rules() {
  static const std::vector<SimplifyRule> rules = {
      {"const-fold", rule_const_fold}, {"identity", rule_identity},
      {"div-range", rule_div_range},   {"mod-range", rule_mod_range},
      {"div-div", rule_div_div},       {"mod-mod", rule_mod_mod},
      {"div-mod-merge", rule_div_mod_merge}, {"linear", rule_linear},
  };
  return rules;
}

ExprP simplify_index(const ExprP& e, const RangeEnv& env, std::map<std::string, int>* fired) {
  return simplify_rec(e, env, fired, 0);
}

std::optional<int64_t> eval_index(const ExprP& e, const std::map<std::string, int64_t>& vars) {
  switch (e->k) {
    case EK::IntLit:
      return e->i;
    case EK::Var: {
      auto it = vars.find(e->name);
      if (it == vars.end()) return std::nullopt;
      return it->second;
    }
    case EK::Neg: {
      auto a = eval_index(e->a, vars);
      if (!a) return std::nullopt;
      return -*a;
    }
    case EK::Bin: {
      auto a = eval_index(e->a, vars), b = eval_index(e->b, vars);
      if (!a || !b) return std::nullopt;
      switch (e->op) {
        case '+':
          return *a + *b;
        case '-':
          return *a - *b;
        case '*':
          return *a * *b;
        case '/':
          if (*b == 0) return std::nullopt;
          return *a / *b;
        case '%':
          if (*b == 0) return std::nullopt;
          return *a % *b;
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace dpia::c
