#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dpia {

// Type-level natural number terms: constants, variables, sums and products.
class Nat {
 public:
  enum class Kind { Const, Var, Sum, Prod };

  Nat();
  explicit Nat(uint64_t c);
  static Nat var(std::string name);

  Kind kind() const;
  uint64_t value() const;
  const std::string& name() const;
  Nat lhs() const;
  Nat rhs() const;

  bool is_const() const { return kind() == Kind::Const; }
  // Constant value after normalization, if the term has no variables.
  std::optional<uint64_t> as_const() const;

  friend Nat operator+(const Nat& a, const Nat& b);
  friend Nat operator*(const Nat& a, const Nat& b);

 struct Node;

 private:
  explicit Nat(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

// Multiset of variable names, kept sorted.
using Monomial = std::vector<std::string>;
using Poly = std::map<Monomial, uint64_t>;

Poly to_poly(const Nat& e);
Nat from_poly(const Poly& p);
Nat nat_normalize(const Nat& e);
bool nat_equal(const Nat& a, const Nat& b);

using NatEnv = std::map<std::string, uint64_t>;
uint64_t nat_eval(const Nat& e, const NatEnv& sigma);

std::set<std::string> nat_free_vars(const Nat& e);
void nat_collect_vars(const Nat& e, std::set<std::string>& out);
Nat nat_subst(const Nat& e, const std::string& var, const Nat& repl);

// Exact division of a polynomial by a single monomial (constant times
// variables). Returns nullopt when some term is not divisible.
std::optional<Nat> nat_div_exact(const Nat& p, const Nat& divisor);

std::string nat_to_sexpr(const Nat& e);
std::string nat_to_infix(const Nat& e);

}  // namespace dpia
