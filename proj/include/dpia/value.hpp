#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dpia/types.hpp"

namespace dpia {

enum class NumMode { Int, Float };

struct Value {
  enum class K { Num, Idx, Array, Pair, Vec };
  K k = K::Num;
  bool fl = false;  // Num in float mode
  int64_t i = 0;
  double f = 0.0;
  std::vector<Value> xs;  // array elements, pair components or vector lanes

  double as_double() const { return fl ? f : static_cast<double>(i); }
};

Value value_num(int64_t v);
Value value_numf(double v);
Value value_num_mode(double v, NumMode mode);
Value value_idx(int64_t v);
Value value_array(std::vector<Value> xs);
Value value_pair(Value a, Value b);
Value value_vec(std::vector<Value> lanes);

// Integer arithmetic wraps modulo 2^64 and division by zero yields 0.
Value scalar_arith(const std::string& op, const Value& a, const Value& b);
Value scalar_negate(const Value& a);
// Lane-wise over vectors, scalar otherwise.
Value value_arith(const std::string& op, const Value& a, const Value& b);
Value value_negate(const Value& a);

Value zero_value(const Data& d, const NatEnv& sigma, NumMode mode);
Value random_value(const Data& d, const NatEnv& sigma, NumMode mode, std::mt19937_64& rng);
bool value_equal(const Value& a, const Value& b);
// Relative tolerance on float leaves, exact elsewhere.
bool value_close(const Value& a, const Value& b, double rel);
// Checks shape against the data type.
bool value_has_type(const Value& v, const Data& d, const NatEnv& sigma);

// [1, 2, 3] for arrays, (a, b) for pairs, <a, b, c, d> for vectors.
std::string value_to_string(const Value& v);
Value parse_value(const std::string& text, const Data& d, const NatEnv& sigma, NumMode mode);

// Scalar leaves (num, idx) in row-major order.
void value_leaves(const Value& v, std::vector<const Value*>& out);

}  // namespace dpia
