#include "dpia/types.hpp"

#include <stdexcept>

namespace dpia {

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::Nat:
      return "nat";
    case Kind::Data:
      return "data";
    case Kind::Phrase:
      return "phrase";
  }
  return "?";
}

namespace dt {
namespace {
std::shared_ptr<DataTypeNode> mk(DataTypeNode::K k) {
  auto n = std::make_shared<DataTypeNode>();
  n->k = k;
  return n;
}
}  // namespace

Data num() {
  static Data n = mk(DataTypeNode::K::Num);
  return n;
}
Data idx(Nat bound) {
  auto n = mk(DataTypeNode::K::Idx);
  n->size = std::move(bound);
  return n;
}
Data array(Nat size, Data elem) {
  auto n = mk(DataTypeNode::K::Array);
  n->size = std::move(size);
  n->a = std::move(elem);
  return n;
}
Data pair(Data a, Data b) {
  auto n = mk(DataTypeNode::K::Pair);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}
Data vec(int width) {
  auto n = mk(DataTypeNode::K::Vec);
  n->width = width;
  return n;
}
Data var(std::string name) {
  auto n = mk(DataTypeNode::K::Var);
  n->name = std::move(name);
  return n;
}
}  // namespace dt

bool is_legal_vector_width(int w) {
  return w == 2 || w == 3 || w == 4 || w == 8 || w == 16;
}

bool is_scalar_like(const Data& d) {
  using K = DataTypeNode::K;
  return d->k == K::Num || d->k == K::Idx || d->k == K::Vec;
}

bool data_equal(const Data& a, const Data& b) {
  using K = DataTypeNode::K;
  if (a == b) return true;
  if (a->k != b->k) return false;
  switch (a->k) {
    case K::Num:
      return true;
    case K::Idx:
      return nat_equal(a->size, b->size);
    case K::Array:
      return nat_equal(a->size, b->size) && data_equal(a->a, b->a);
    case K::Pair:
      return data_equal(a->a, b->a) && data_equal(a->b, b->b);
    case K::Vec:
      return a->width == b->width;
    case K::Var:
      return a->name == b->name;
  }
  return false;
}

Data data_subst_nat(const Data& d, const std::string& var, const Nat& n) {
  using K = DataTypeNode::K;
  switch (d->k) {
    case K::Num:
    case K::Vec:
    case K::Var:
      return d;
    case K::Idx:
      return dt::idx(nat_subst(d->size, var, n));
    case K::Array:
      return dt::array(nat_subst(d->size, var, n), data_subst_nat(d->a, var, n));
    case K::Pair:
      return dt::pair(data_subst_nat(d->a, var, n), data_subst_nat(d->b, var, n));
  }
  return d;
}

Data data_subst_data(const Data& d, const std::string& var, const Data& r) {
  using K = DataTypeNode::K;
  switch (d->k) {
    case K::Num:
    case K::Vec:
    case K::Idx:
      return d;
    case K::Var:
      return d->name == var ? r : d;
    case K::Array:
      return dt::array(d->size, data_subst_data(d->a, var, r));
    case K::Pair:
      return dt::pair(data_subst_data(d->a, var, r), data_subst_data(d->b, var, r));
  }
  return d;
}

void data_collect_vars(const Data& d, std::set<std::string>& nats,
                       std::set<std::string>& datas) {
  using K = DataTypeNode::K;
  switch (d->k) {
    case K::Num:
    case K::Vec:
      return;
    case K::Var:
      datas.insert(d->name);
      return;
    case K::Idx:
      nat_collect_vars(d->size, nats);
      return;
    case K::Array:
      nat_collect_vars(d->size, nats);
      data_collect_vars(d->a, nats, datas);
      return;
    case K::Pair:
      data_collect_vars(d->a, nats, datas);
      data_collect_vars(d->b, nats, datas);
      return;
  }
}

std::string data_to_sexpr(const Data& d) {
  using K = DataTypeNode::K;
  switch (d->k) {
    case K::Num:
      return "num";
    case K::Idx:
      return "(idx " + nat_to_sexpr(d->size) + ")";
    case K::Array:
      return "(arr " + nat_to_sexpr(d->size) + " " + data_to_sexpr(d->a) + ")";
    case K::Pair:
      return "(pair " + data_to_sexpr(d->a) + " " + data_to_sexpr(d->b) + ")";
    case K::Vec:
      return "(vec " + std::to_string(d->width) + ")";
    case K::Var:
      return d->name;
  }
  return "?";
}

std::string data_to_string(const Data& d) {
  using K = DataTypeNode::K;
  switch (d->k) {
    case K::Num:
      return "num";
    case K::Idx:
      return "idx(" + nat_to_infix(d->size) + ")";
    case K::Array: {
      std::string n = nat_to_infix(d->size);
      if (n.find('+') != std::string::npos) n = "(" + n + ")";
      return n + "." + data_to_string(d->a);
    }
    case K::Pair:
      return "(" + data_to_string(d->a) + " x " + data_to_string(d->b) + ")";
    case K::Vec:
      return "num<" + std::to_string(d->width) + ">";
    case K::Var:
      return d->name;
  }
  return "?";
}

uint64_t data_leaf_count(const Data& d, const NatEnv& sigma) {
  using K = DataTypeNode::K;
  switch (d->k) {
    case K::Num:
    case K::Idx:
      return 1;
    case K::Vec:
      return static_cast<uint64_t>(d->width);
    case K::Array:
      return nat_eval(d->size, sigma) * data_leaf_count(d->a, sigma);
    case K::Pair:
      return data_leaf_count(d->a, sigma) + data_leaf_count(d->b, sigma);
    case K::Var:
      throw std::runtime_error("leaf count of data variable " + d->name);
  }
  return 0;
}

namespace pt {
namespace {
std::shared_ptr<PhraseTypeNode> mk(PhraseTypeNode::K k) {
  auto n = std::make_shared<PhraseTypeNode>();
  n->k = k;
  return n;
}
}  // namespace

PType exp(Data d) {
  auto n = mk(PhraseTypeNode::K::Exp);
  n->data = std::move(d);
  return n;
}
PType acc(Data d) {
  auto n = mk(PhraseTypeNode::K::Acc);
  n->data = std::move(d);
  return n;
}
PType comm() {
  static PType c = mk(PhraseTypeNode::K::Comm);
  return c;
}
PType prod(PType a, PType b) {
  auto n = mk(PhraseTypeNode::K::Prod);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}
PType var(Data d) { return prod(acc(d), exp(d)); }
PType fn(PType a, PType b, bool passive) {
  auto n = mk(PhraseTypeNode::K::Fn);
  n->a = std::move(a);
  n->b = std::move(b);
  n->passive = passive;
  return n;
}
PType pfn(PType a, PType b) { return fn(std::move(a), std::move(b), true); }
PType depfn(std::string binder, Kind k, PType body) {
  auto n = mk(PhraseTypeNode::K::DepFn);
  n->binder = std::move(binder);
  n->binder_kind = k;
  n->a = std::move(body);
  return n;
}
}  // namespace pt

bool is_passive(const PType& t) {
  using K = PhraseTypeNode::K;
  switch (t->k) {
    case K::Exp:
      return true;
    case K::Acc:
    case K::Comm:
      return false;
    case K::Prod:
      return is_passive(t->a) && is_passive(t->b);
    case K::Fn:
      return t->passive || is_passive(t->b);
    case K::DepFn:
      return is_passive(t->a);
  }
  return false;
}

bool ptype_equal(const PType& a, const PType& b) {
  using K = PhraseTypeNode::K;
  if (a == b) return true;
  if (a->k != b->k) return false;
  switch (a->k) {
    case K::Exp:
    case K::Acc:
      return data_equal(a->data, b->data);
    case K::Comm:
      return true;
    case K::Prod:
      return ptype_equal(a->a, b->a) && ptype_equal(a->b, b->b);
    case K::Fn:
      return a->passive == b->passive && ptype_equal(a->a, b->a) &&
             ptype_equal(a->b, b->b);
    case K::DepFn: {
      if (a->binder_kind != b->binder_kind) return false;
      if (a->binder == b->binder) return ptype_equal(a->a, b->a);
      // Compare under a common fresh binder.
      std::string fresh = "%" + a->binder + "%" + b->binder;
      PType ba, bb;
      if (a->binder_kind == Kind::Nat) {
        ba = ptype_subst_nat(a->a, a->binder, Nat::var(fresh));
        bb = ptype_subst_nat(b->a, b->binder, Nat::var(fresh));
      } else {
        ba = ptype_subst_data(a->a, a->binder, dt::var(fresh));
        bb = ptype_subst_data(b->a, b->binder, dt::var(fresh));
      }
      return ptype_equal(ba, bb);
    }
  }
  return false;
}

PType ptype_subst_nat(const PType& t, const std::string& var, const Nat& n) {
  using K = PhraseTypeNode::K;
  switch (t->k) {
    case K::Exp:
      return pt::exp(data_subst_nat(t->data, var, n));
    case K::Acc:
      return pt::acc(data_subst_nat(t->data, var, n));
    case K::Comm:
      return t;
    case K::Prod:
      return pt::prod(ptype_subst_nat(t->a, var, n), ptype_subst_nat(t->b, var, n));
    case K::Fn:
      return pt::fn(ptype_subst_nat(t->a, var, n), ptype_subst_nat(t->b, var, n),
                    t->passive);
    case K::DepFn:
      if (t->binder_kind == Kind::Nat && t->binder == var) return t;
      return pt::depfn(t->binder, t->binder_kind, ptype_subst_nat(t->a, var, n));
  }
  return t;
}

PType ptype_subst_data(const PType& t, const std::string& var, const Data& d) {
  using K = PhraseTypeNode::K;
  switch (t->k) {
    case K::Exp:
      return pt::exp(data_subst_data(t->data, var, d));
    case K::Acc:
      return pt::acc(data_subst_data(t->data, var, d));
    case K::Comm:
      return t;
    case K::Prod:
      return pt::prod(ptype_subst_data(t->a, var, d), ptype_subst_data(t->b, var, d));
    case K::Fn:
      return pt::fn(ptype_subst_data(t->a, var, d), ptype_subst_data(t->b, var, d),
                    t->passive);
    case K::DepFn:
      if (t->binder_kind == Kind::Data && t->binder == var) return t;
      return pt::depfn(t->binder, t->binder_kind, ptype_subst_data(t->a, var, d));
  }
  return t;
}

void ptype_collect_vars(const PType& t, std::set<std::string>& nats,
                        std::set<std::string>& datas) {
  using K = PhraseTypeNode::K;
  switch (t->k) {
    case K::Exp:
    case K::Acc:
      data_collect_vars(t->data, nats, datas);
      return;
    case K::Comm:
      return;
    case K::Prod:
    case K::Fn:
      ptype_collect_vars(t->a, nats, datas);
      ptype_collect_vars(t->b, nats, datas);
      return;
    case K::DepFn: {
      std::set<std::string> n2, d2;
      ptype_collect_vars(t->a, n2, d2);
      if (t->binder_kind == Kind::Nat) {
        n2.erase(t->binder);
      } else {
        d2.erase(t->binder);
      }
      nats.insert(n2.begin(), n2.end());
      datas.insert(d2.begin(), d2.end());
      return;
    }
  }
}

Data as_var_type(const PType& t) {
  using K = PhraseTypeNode::K;
  if (t->k != K::Prod || t->a->k != K::Acc || t->b->k != K::Exp) return nullptr;
  if (!data_equal(t->a->data, t->b->data)) return nullptr;
  return t->a->data;
}

std::string ptype_to_sexpr(const PType& t) {
  using K = PhraseTypeNode::K;
  switch (t->k) {
    case K::Exp:
      return "(exp " + data_to_sexpr(t->data) + ")";
    case K::Acc:
      return "(acc " + data_to_sexpr(t->data) + ")";
    case K::Comm:
      return "comm";
    case K::Prod:
      if (Data d = as_var_type(t)) return "(var " + data_to_sexpr(d) + ")";
      return "(prod " + ptype_to_sexpr(t->a) + " " + ptype_to_sexpr(t->b) + ")";
    case K::Fn:
      return std::string(t->passive ? "(->p " : "(-> ") + ptype_to_sexpr(t->a) +
             " " + ptype_to_sexpr(t->b) + ")";
    case K::DepFn:
      return std::string(t->binder_kind == Kind::Nat ? "(nat-fn " : "(data-fn ") +
             t->binder + " " + ptype_to_sexpr(t->a) + ")";
  }
  return "?";
}

std::string ptype_to_string(const PType& t) {
  using K = PhraseTypeNode::K;
  switch (t->k) {
    case K::Exp:
      return "exp[" + data_to_string(t->data) + "]";
    case K::Acc:
      return "acc[" + data_to_string(t->data) + "]";
    case K::Comm:
      return "comm";
    case K::Prod:
      if (Data d = as_var_type(t)) return "var[" + data_to_string(d) + "]";
      return "(" + ptype_to_string(t->a) + " x " + ptype_to_string(t->b) + ")";
    case K::Fn:
      return "(" + ptype_to_string(t->a) + (t->passive ? " ->p " : " -> ") +
             ptype_to_string(t->b) + ")";
    case K::DepFn:
      return "(" + t->binder + ":" + kind_name(t->binder_kind) + ") -> " +
             ptype_to_string(t->a);
  }
  return "?";
}

}  // namespace dpia
