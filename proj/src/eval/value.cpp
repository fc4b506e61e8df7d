#include "dpia/value.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "dpia/error.hpp"

namespace dpia {

using DK = DataTypeNode::K;

Value value_num(int64_t v) {
  Value x;
  x.i = v;
  return x;
}

Value value_numf(double v) {
  Value x;
  x.fl = true;
  x.f = v;
  return x;
}

Value value_num_mode(double v, NumMode mode) {
  return mode == NumMode::Float ? value_numf(v) : value_num(static_cast<int64_t>(v));
}

Value value_idx(int64_t v) {
  Value x;
  x.k = Value::K::Idx;
  x.i = v;
  return x;
}

Value value_array(std::vector<Value> xs) {
  Value x;
  x.k = Value::K::Array;
  x.xs = std::move(xs);
  return x;
}

Value value_pair(Value a, Value b) {
  Value x;
  x.k = Value::K::Pair;
  x.xs.push_back(std::move(a));
  x.xs.push_back(std::move(b));
  return x;
}

Value value_vec(std::vector<Value> lanes) {
  Value x;
  x.k = Value::K::Vec;
  x.xs = std::move(lanes);
  return x;
}

Value scalar_arith(const std::string& op, const Value& a, const Value& b) {
  if (a.fl || b.fl) {
    double x = a.as_double(), y = b.as_double();
    char c = op[0];
    return value_numf(c == '+' ? x + y : c == '-' ? x - y : c == '*' ? x * y : x / y);
  }
  uint64_t x = static_cast<uint64_t>(a.i), y = static_cast<uint64_t>(b.i);
  switch (op[0]) {
    case '+':
      return value_num(static_cast<int64_t>(x + y));
    case '-':
      return value_num(static_cast<int64_t>(x - y));
    case '*':
      return value_num(static_cast<int64_t>(x * y));
    default:
      if (b.i == 0) return value_num(0);
      if (b.i == -1) return value_num(static_cast<int64_t>(0 - x));
      return value_num(a.i / b.i);
  }
}

Value scalar_negate(const Value& a) {
  if (a.fl) return value_numf(-a.f);
  return value_num(static_cast<int64_t>(0 - static_cast<uint64_t>(a.i)));
}

Value value_arith(const std::string& op, const Value& a, const Value& b) {
  if (a.k == Value::K::Vec) {
    std::vector<Value> lanes;
    for (size_t i = 0; i < a.xs.size(); ++i) lanes.push_back(scalar_arith(op, a.xs[i], b.xs[i]));
    return value_vec(std::move(lanes));
  }
  return scalar_arith(op, a, b);
}

Value value_negate(const Value& a) {
  if (a.k == Value::K::Vec) {
    std::vector<Value> lanes;
    for (auto& x : a.xs) lanes.push_back(scalar_negate(x));
    return value_vec(std::move(lanes));
  }
  return scalar_negate(a);
}

Value zero_value(const Data& d, const NatEnv& sigma, NumMode mode) {
  switch (d->k) {
    case DK::Num:
      return value_num_mode(0, mode);
    case DK::Idx:
      return value_idx(0);
    case DK::Vec:
      return value_vec(std::vector<Value>(d->width, value_num_mode(0, mode)));
    case DK::Array: {
      uint64_t n = nat_eval(d->size, sigma);
      return value_array(std::vector<Value>(n, zero_value(d->a, sigma, mode)));
    }
    case DK::Pair:
      return value_pair(zero_value(d->a, sigma, mode), zero_value(d->b, sigma, mode));
    case DK::Var:
      break;
  }
  internal_error("zero value of non-concrete type " + data_to_string(d));
}

Value random_value(const Data& d, const NatEnv& sigma, NumMode mode, std::mt19937_64& rng) {
  switch (d->k) {
    case DK::Num:
      return value_num_mode(static_cast<double>(static_cast<int64_t>(rng() % 19) - 9), mode);
    case DK::Idx: {
      uint64_t n = nat_eval(d->size, sigma);
      return value_idx(n == 0 ? 0 : static_cast<int64_t>(rng() % n));
    }
    case DK::Vec: {
      std::vector<Value> lanes;
      for (int i = 0; i < d->width; ++i) lanes.push_back(random_value(dt::num(), sigma, mode, rng));
      return value_vec(std::move(lanes));
    }
    case DK::Array: {
      uint64_t n = nat_eval(d->size, sigma);
      std::vector<Value> xs;
      xs.reserve(n);
      for (uint64_t i = 0; i < n; ++i) xs.push_back(random_value(d->a, sigma, mode, rng));
      return value_array(std::move(xs));
    }
    case DK::Pair: {
      Value a = random_value(d->a, sigma, mode, rng);
      return value_pair(std::move(a), random_value(d->b, sigma, mode, rng));
    }
    case DK::Var:
      break;
  }
  internal_error("random value of non-concrete type " + data_to_string(d));
}

bool value_equal(const Value& a, const Value& b) {
  if (a.k != b.k) return false;
  if (a.k == Value::K::Num) {
    if (a.fl != b.fl) return false;
    return a.fl ? a.f == b.f : a.i == b.i;
  }
  if (a.k == Value::K::Idx) return a.i == b.i;
  if (a.xs.size() != b.xs.size()) return false;
  for (size_t i = 0; i < a.xs.size(); ++i) {
    if (!value_equal(a.xs[i], b.xs[i])) return false;
  }
  return true;
}

bool value_close(const Value& a, const Value& b, double rel) {
  if (a.k != b.k) return false;
  if (a.k == Value::K::Num) {
    if (!a.fl && !b.fl) return a.i == b.i;
    double x = a.as_double(), y = b.as_double();
    double scale = std::max({std::fabs(x), std::fabs(y), 1.0});
    return std::fabs(x - y) <= rel * scale;
  }
  if (a.k == Value::K::Idx) return a.i == b.i;
  if (a.xs.size() != b.xs.size()) return false;
  for (size_t i = 0; i < a.xs.size(); ++i) {
    if (!value_close(a.xs[i], b.xs[i], rel)) return false;
  }
  return true;
}

bool value_has_type(const Value& v, const Data& d, const NatEnv& sigma) {
  switch (d->k) {
    case DK::Num:
      return v.k == Value::K::Num;
    case DK::Idx:
      return v.k == Value::K::Idx && v.i >= 0 &&
             static_cast<uint64_t>(v.i) < nat_eval(d->size, sigma);
    case DK::Vec:
      return v.k == Value::K::Vec && v.xs.size() == static_cast<size_t>(d->width);
    case DK::Array: {
      if (v.k != Value::K::Array || v.xs.size() != nat_eval(d->size, sigma)) return false;
      for (auto& x : v.xs) {
        if (!value_has_type(x, d->a, sigma)) return false;
      }
      return true;
    }
    case DK::Pair:
      return v.k == Value::K::Pair && value_has_type(v.xs[0], d->a, sigma) &&
             value_has_type(v.xs[1], d->b, sigma);
    case DK::Var:
      return false;
  }
  return false;
}

namespace {

std::string num_text(const Value& v) {
  if (!v.fl) return std::to_string(v.i);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v.f);
  return buf;
}

std::string join_values(const std::vector<Value>& xs) {
  std::string s;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += value_to_string(xs[i]);
  }
  return s;
}

class ValueReader {
 public:
  ValueReader(const std::string& t, const NatEnv& sigma, NumMode mode)
      : t_(t), sigma_(sigma), mode_(mode) {}

  Value read(const Data& d) {
    Value v = value(d);
    ws();
    if (pos_ != t_.size()) fail("trailing characters");
    return v;
  }

 private:
  const std::string& t_;
  const NatEnv& sigma_;
  NumMode mode_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) {
    parse_error("value: " + msg + " at offset " + std::to_string(pos_));
  }

  void ws() {
    while (pos_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[pos_]))) ++pos_;
  }

  void expect(char c) {
    ws();
    if (pos_ >= t_.size() || t_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  double number() {
    ws();
    const char* start = t_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(start, &end);
    if (end == start) fail("expected a number");
    pos_ += static_cast<size_t>(end - start);
    return v;
  }

  std::vector<Value> seq(char open, char close, const Data& elem, size_t n) {
    expect(open);
    std::vector<Value> xs;
    for (size_t i = 0; i < n; ++i) {
      if (i) expect(',');
      xs.push_back(value(elem));
    }
    expect(close);
    return xs;
  }

  Value value(const Data& d) {
    switch (d->k) {
      case DK::Num:
        return value_num_mode(number(), mode_);
      case DK::Idx:
        return value_idx(static_cast<int64_t>(number()));
      case DK::Vec:
        return value_vec(seq('<', '>', dt::num(), static_cast<size_t>(d->width)));
      case DK::Array:
        return value_array(seq('[', ']', d->a, nat_eval(d->size, sigma_)));
      case DK::Pair: {
        expect('(');
        Value a = value(d->a);
        expect(',');
        Value b = value(d->b);
        expect(')');
        return value_pair(std::move(a), std::move(b));
      }
      case DK::Var:
        break;
    }
    fail("non-concrete type");
  }
};

}  // namespace

std::string value_to_string(const Value& v) {
  switch (v.k) {
    case Value::K::Num:
      return num_text(v);
    case Value::K::Idx:
      return std::to_string(v.i);
    case Value::K::Array:
      return "[" + join_values(v.xs) + "]";
    case Value::K::Pair:
      return "(" + join_values(v.xs) + ")";
    case Value::K::Vec:
      return "<" + join_values(v.xs) + ">";
  }
  return "?";
}

Value parse_value(const std::string& text, const Data& d, const NatEnv& sigma, NumMode mode) {
  return ValueReader(text, sigma, mode).read(d);
}

void value_leaves(const Value& v, std::vector<const Value*>& out) {
  if (v.k == Value::K::Num || v.k == Value::K::Idx) {
    out.push_back(&v);
    return;
  }
  for (auto& x : v.xs) value_leaves(x, out);
}

}  // namespace dpia
