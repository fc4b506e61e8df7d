#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpia/cast.hpp"

namespace dpia::c {

// Inclusive ranges of loop variables. Variables not listed are assumed
// non-negative and unbounded (size parameters).
using RangeEnv = std::map<std::string, std::pair<int64_t, int64_t>>;

struct Interval {
  std::optional<int64_t> lo, hi;
};
Interval expr_range(const ExprP& e, const RangeEnv& env);

// Sum of coefficient * atom plus a constant. Atoms are maximal non-linear
// subterms, keyed by their printed form.
struct LinearForm {
  std::map<std::string, std::pair<int64_t, ExprP>> terms;
  int64_t c = 0;
};
LinearForm linear_form(const ExprP& e);
ExprP linear_to_expr(const LinearForm& lf);
std::string expr_key(const ExprP& e);

struct SimplifyRule {
  std::string name;
  std::function<std::optional<ExprP>(const ExprP&, const RangeEnv&)> apply;
};
const std::vector<SimplifyRule>& simplify_rules();

// Applies the rules bottom-up to a fixpoint. `fired` counts rule uses.
ExprP simplify_index(const ExprP& e, const RangeEnv& env,
                     std::map<std::string, int>* fired = nullptr);

// C semantics for int expressions over Var and literals; nullopt on division
// by zero or unknown variables.
std::optional<int64_t> eval_index(const ExprP& e, const std::map<std::string, int64_t>& vars);

}  // namespace dpia::c
