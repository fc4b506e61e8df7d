#include "dpia/nat.hpp"

#include <algorithm>
#include <stdexcept>

namespace dpia {

struct Nat::Node {
  Kind kind;
  uint64_t value = 0;
  std::string name;
  std::shared_ptr<const Node> a, b;
  Node(Kind k) : kind(k) {}
};

namespace {
std::shared_ptr<const Nat::Node> zero_node() {
  static auto z = [] {
    auto n = std::make_shared<Nat::Node>(Nat::Kind::Const);
    return std::shared_ptr<const Nat::Node>(n);
  }();
  return z;
}
}  // namespace

Nat::Nat() : n_(zero_node()) {}

Nat::Nat(uint64_t c) {
  auto n = std::make_shared<Node>(Kind::Const);
  n->value = c;
  n_ = n;
}

Nat Nat::var(std::string name) {
  auto n = std::make_shared<Node>(Kind::Var);
  n->name = std::move(name);
  return Nat(std::shared_ptr<const Node>(n));
}

Nat::Kind Nat::kind() const { return n_->kind; }
uint64_t Nat::value() const { return n_->value; }
const std::string& Nat::name() const { return n_->name; }
Nat Nat::lhs() const { return Nat(n_->a); }
Nat Nat::rhs() const { return Nat(n_->b); }

Nat operator+(const Nat& a, const Nat& b) {
  auto n = std::make_shared<Nat::Node>(Nat::Kind::Sum);
  n->a = a.n_;
  n->b = b.n_;
  return Nat(std::shared_ptr<const Nat::Node>(n));
}

Nat operator*(const Nat& a, const Nat& b) {
  auto n = std::make_shared<Nat::Node>(Nat::Kind::Prod);
  n->a = a.n_;
  n->b = b.n_;
  return Nat(std::shared_ptr<const Nat::Node>(n));
}

std::optional<uint64_t> Nat::as_const() const {
  Poly p = to_poly(*this);
  if (p.empty()) return 0;
  if (p.size() == 1 && p.begin()->first.empty()) return p.begin()->second;
  return std::nullopt;
}

namespace {

void poly_add(Poly& acc, const Poly& p) {
  for (auto& [m, c] : p) {
    acc[m] += c;
  }
}

Poly poly_mul(const Poly& x, const Poly& y) {
  Poly r;
  for (auto& [m1, c1] : x) {
    for (auto& [m2, c2] : y) {
      Monomial m = m1;
      m.insert(m.end(), m2.begin(), m2.end());
      std::sort(m.begin(), m.end());
      r[m] += c1 * c2;
    }
  }
  return r;
}

void poly_prune(Poly& p) {
  for (auto it = p.begin(); it != p.end();) {
    if (it->second == 0) {
      it = p.erase(it);
    } else {
      ++it;
    }
  }
}

// Monomial ordering for printing: lower degree first, then lexicographic.
bool mono_less(const Monomial& a, const Monomial& b) {
  if (a.size() != b.size()) return a.size() > b.size();
  return a < b;
}

}  // namespace

Poly to_poly(const Nat& e) {
  Poly p;
  switch (e.kind()) {
    case Nat::Kind::Const:
      if (e.value() != 0) p[{}] = e.value();
      return p;
    case Nat::Kind::Var:
      p[{e.name()}] = 1;
      return p;
    case Nat::Kind::Sum:
      p = to_poly(e.lhs());
      poly_add(p, to_poly(e.rhs()));
      poly_prune(p);
      return p;
    case Nat::Kind::Prod:
      p = poly_mul(to_poly(e.lhs()), to_poly(e.rhs()));
      poly_prune(p);
      return p;
  }
  return p;
}

Nat from_poly(const Poly& p) {
  std::vector<std::pair<Monomial, uint64_t>> terms(p.begin(), p.end());
  std::sort(terms.begin(), terms.end(),
            [](auto& x, auto& y) { return mono_less(x.first, y.first); });
  std::optional<Nat> result;
  for (auto& [m, c] : terms) {
    if (c == 0) continue;
    std::optional<Nat> term;
    if (c != 1 || m.empty()) term = Nat(c);
    for (auto& v : m) {
      term = term ? *term * Nat::var(v) : Nat::var(v);
    }
    result = result ? *result + *term : *term;
  }
  return result ? *result : Nat(0);
}

Nat nat_normalize(const Nat& e) { return from_poly(to_poly(e)); }

bool nat_equal(const Nat& a, const Nat& b) { return to_poly(a) == to_poly(b); }

uint64_t nat_eval(const Nat& e, const NatEnv& sigma) {
  switch (e.kind()) {
    case Nat::Kind::Const:
      return e.value();
    case Nat::Kind::Var: {
      auto it = sigma.find(e.name());
      if (it == sigma.end()) {
        throw std::runtime_error("unassigned nat variable '" + e.name() + "'");
      }
      return it->second;
    }
    case Nat::Kind::Sum:
      return nat_eval(e.lhs(), sigma) + nat_eval(e.rhs(), sigma);
    case Nat::Kind::Prod:
      return nat_eval(e.lhs(), sigma) * nat_eval(e.rhs(), sigma);
  }
  return 0;
}

void nat_collect_vars(const Nat& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Nat::Kind::Const:
      return;
    case Nat::Kind::Var:
      out.insert(e.name());
      return;
    default:
      nat_collect_vars(e.lhs(), out);
      nat_collect_vars(e.rhs(), out);
  }
}

std::set<std::string> nat_free_vars(const Nat& e) {
  std::set<std::string> s;
  nat_collect_vars(e, s);
  return s;
}

Nat nat_subst(const Nat& e, const std::string& var, const Nat& repl) {
  switch (e.kind()) {
    case Nat::Kind::Const:
      return e;
    case Nat::Kind::Var:
      return e.name() == var ? repl : e;
    case Nat::Kind::Sum:
      return nat_subst(e.lhs(), var, repl) + nat_subst(e.rhs(), var, repl);
    case Nat::Kind::Prod:
      return nat_subst(e.lhs(), var, repl) * nat_subst(e.rhs(), var, repl);
  }
  return e;
}

std::optional<Nat> nat_div_exact(const Nat& p, const Nat& divisor) {
  Poly d = to_poly(divisor);
  if (d.size() != 1) return std::nullopt;
  const auto& [dm, dc] = *d.begin();
  Poly num = to_poly(p);
  Poly out;
  for (auto& [m, c] : num) {
    if (c % dc != 0) return std::nullopt;
    Monomial rest = m;
    for (auto& v : dm) {
      auto it = std::find(rest.begin(), rest.end(), v);
      if (it == rest.end()) return std::nullopt;
      rest.erase(it);
    }
    out[rest] += c / dc;
  }
  return from_poly(out);
}

std::string nat_to_sexpr(const Nat& e0) {
  Nat e = nat_normalize(e0);
  struct P {
    static std::string go(const Nat& e) {
      switch (e.kind()) {
        case Nat::Kind::Const:
          return std::to_string(e.value());
        case Nat::Kind::Var:
          return e.name();
        case Nat::Kind::Sum:
          return "(+ " + go(e.lhs()) + " " + go(e.rhs()) + ")";
        case Nat::Kind::Prod:
          return "(* " + go(e.lhs()) + " " + go(e.rhs()) + ")";
      }
      return "";
    }
  };
  return P::go(e);
}

std::string nat_to_infix(const Nat& e0) {
  Nat e = nat_normalize(e0);
  struct P {
    static std::string go(const Nat& e, int prec) {
      switch (e.kind()) {
        case Nat::Kind::Const:
          return std::to_string(e.value());
        case Nat::Kind::Var:
          return e.name();
        case Nat::Kind::Sum: {
          std::string s = go(e.lhs(), 1) + "+" + go(e.rhs(), 1);
          return prec > 1 ? "(" + s + ")" : s;
        }
        case Nat::Kind::Prod:
          return go(e.lhs(), 2) + "*" + go(e.rhs(), 2);
      }
      return "";
    }
  };
  return P::go(e, 0);
}

}  // namespace dpia
