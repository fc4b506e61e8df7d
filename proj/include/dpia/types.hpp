#pragma once

#include <memory>
#include <string>

#include "dpia/nat.hpp"

namespace dpia {

enum class Kind { Nat, Data, Phrase };
std::string kind_name(Kind k);

struct DataTypeNode;
using Data = std::shared_ptr<const DataTypeNode>;

struct DataTypeNode {
  enum class K { Num, Idx, Array, Pair, Vec, Var };
  K k;
  Nat size;  // idx bound or array length
  Data a, b;  // array element is `a`; pair components are `a`, `b`
  int width = 0;
  std::string name;  // data type variable
};

namespace dt {
Data num();
Data idx(Nat bound);
Data array(Nat n, Data elem);
Data pair(Data a, Data b);
Data vec(int width);
Data var(std::string name);
}  // namespace dt

bool is_legal_vector_width(int w);
// num, idx and vectors: the data types assigned by the primitive :=.
bool is_scalar_like(const Data& d);
bool data_equal(const Data& a, const Data& b);
Data data_subst_nat(const Data& d, const std::string& var, const Nat& n);
Data data_subst_data(const Data& d, const std::string& var, const Data& r);
void data_collect_vars(const Data& d, std::set<std::string>& nats,
                       std::set<std::string>& datas);
std::string data_to_sexpr(const Data& d);
// Compact rendering used in diagnostics: n.num, (num x num), num<4>.
std::string data_to_string(const Data& d);
// Total number of scalar leaves, sizes evaluated under sigma.
uint64_t data_leaf_count(const Data& d, const NatEnv& sigma);

struct PhraseTypeNode;
using PType = std::shared_ptr<const PhraseTypeNode>;

struct PhraseTypeNode {
  enum class K { Exp, Acc, Comm, Prod, Fn, DepFn };
  K k;
  Data data;
  PType a, b;  // product components, or function argument and result
  bool passive = false;
  std::string binder;  // DepFn
  Kind binder_kind = Kind::Nat;
};

namespace pt {
PType exp(Data d);
PType acc(Data d);
PType comm();
PType prod(PType a, PType b);
PType var(Data d);
PType fn(PType a, PType b, bool passive = false);
PType pfn(PType a, PType b);
PType depfn(std::string binder, Kind k, PType body);
}  // namespace pt

bool is_passive(const PType& t);
bool ptype_equal(const PType& a, const PType& b);
PType ptype_subst_nat(const PType& t, const std::string& var, const Nat& n);
PType ptype_subst_data(const PType& t, const std::string& var, const Data& d);
void ptype_collect_vars(const PType& t, std::set<std::string>& nats,
                        std::set<std::string>& datas);
std::string ptype_to_sexpr(const PType& t);
std::string ptype_to_string(const PType& t);

// If t is var[d] (acc[d] x exp[d]) returns d.
Data as_var_type(const PType& t);

}  // namespace dpia
