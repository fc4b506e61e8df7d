#include "dpia/prims.hpp"

#include <map>
#include <stdexcept>

namespace dpia {

namespace {

// Binder names carry a '#' so that instantiating one binder with a user type
// never captures a later binder.
std::string B(const char* v) { return std::string("#") + v; }
Nat N(const char* v) { return Nat::var(B(v)); }
Data D(const char* v) { return dt::var(B(v)); }
PType nat_fn(const char* v, PType body) { return pt::depfn(B(v), Kind::Nat, std::move(body)); }
PType data_fn(const char* v, PType body) { return pt::depfn(B(v), Kind::Data, std::move(body)); }
PType fn(PType a, PType b) { return pt::fn(std::move(a), std::move(b)); }
PType fn3(PType a, PType b, PType c) { return fn(a, fn(b, c)); }
PType fn4(PType a, PType b, PType c, PType d) { return fn(a, fn(b, fn(c, d))); }
PType fn5(PType a, PType b, PType c, PType d, PType e) {
  return fn(a, fn(b, fn(c, fn(d, e))));
}
PType exp(Data d) { return pt::exp(std::move(d)); }
PType acc(Data d) { return pt::acc(std::move(d)); }
Data arr(Nat n, Data d) { return dt::array(std::move(n), std::move(d)); }

void finish(PrimInfo& info) {
  PType t = info.type;
  while (t->k == PhraseTypeNode::K::DepFn) {
    info.tkinds.push_back(t->binder_kind);
    t = t->a;
  }
}

std::map<std::string, PrimInfo> build_table() {
  std::map<std::string, PrimInfo> tab;
  auto add = [&](const std::string& name, PType type, int nargs, PrimGroup g,
                 bool overloaded = false) {
    PrimInfo info;
    info.name = name;
    info.type = std::move(type);
    info.nargs = nargs;
    info.group = g;
    info.overloaded = overloaded;
    finish(info);
    tab[name] = info;
  };
  using G = PrimGroup;
  Data num = dt::num();
  PType num2 = pt::prod(exp(num), exp(num));

  for (const char* op : {"+", "-", "*", "/"}) {
    add(op, fn(num2, exp(num)), 1, G::Functional, true);
  }
  add("negate", fn(exp(num), exp(num)), 1, G::Functional, true);

  PType map_t = nat_fn(
      "n", data_fn("d1", data_fn("d2", fn3(fn(exp(D("d1")), exp(D("d2"))),
                                           exp(arr(N("n"), D("d1"))),
                                           exp(arr(N("n"), D("d2")))))));
  for (const char* m : {"map", "mapGlobal", "mapWorkgroup", "mapLocal", "mapSeq"}) {
    add(m, map_t, 2, G::Functional);
  }
  add("reduce",
      nat_fn("n", data_fn("d1", data_fn("d2", fn4(fn3(exp(D("d1")), exp(D("d2")), exp(D("d2"))),
                                                  exp(D("d2")), exp(arr(N("n"), D("d1"))),
                                                  exp(D("d2")))))),
      3, G::Functional);
  add("zip",
      nat_fn("n", data_fn("d1", data_fn("d2", fn3(exp(arr(N("n"), D("d1"))),
                                                  exp(arr(N("n"), D("d2"))),
                                                  exp(arr(N("n"), dt::pair(D("d1"), D("d2")))))))),
      2, G::Functional);
  add("split",
      nat_fn("n", nat_fn("m", data_fn("d", fn(exp(arr(N("n") * N("m"), D("d"))),
                                              exp(arr(N("m"), arr(N("n"), D("d")))))))),
      1, G::Functional);
  add("join",
      nat_fn("n", nat_fn("m", data_fn("d", fn(exp(arr(N("n"), arr(N("m"), D("d")))),
                                              exp(arr(N("n") * N("m"), D("d"))))))),
      1, G::Functional);
  add("pair",
      data_fn("d1", data_fn("d2", fn3(exp(D("d1")), exp(D("d2")),
                                      exp(dt::pair(D("d1"), D("d2")))))),
      2, G::Functional);
  add("fst", data_fn("d1", data_fn("d2", fn(exp(dt::pair(D("d1"), D("d2"))), exp(D("d1"))))),
      1, G::Functional);
  add("snd", data_fn("d1", data_fn("d2", fn(exp(dt::pair(D("d1"), D("d2"))), exp(D("d2"))))),
      1, G::Functional);
  add("idx",
      nat_fn("n", data_fn("d", fn3(exp(arr(N("n"), D("d"))), exp(dt::idx(N("n"))),
                                   exp(D("d"))))),
      2, G::Functional);
  PType to_t = data_fn("d1", data_fn("d2", fn3(fn(exp(D("d1")), exp(D("d2"))),
                                               exp(D("d1")), exp(D("d2")))));
  for (const char* t : {"toGlobal", "toLocal", "toPrivate"}) add(t, to_t, 2, G::Functional);

  for (int w : {2, 3, 4, 8, 16}) {
    Nat wn(static_cast<uint64_t>(w));
    add(vec_prim_name("asVector", w),
        nat_fn("m", fn(exp(arr(N("m") * wn, num)), exp(arr(N("m"), dt::vec(w))))), 1,
        G::Functional);
    add(vec_prim_name("asScalar", w),
        nat_fn("m", fn(exp(arr(N("m"), dt::vec(w))), exp(arr(N("m") * wn, num)))), 1,
        G::Functional);
    add(vec_prim_name("asScalarAcc", w),
        nat_fn("m", fn(acc(arr(N("m") * wn, num)), acc(arr(N("m"), dt::vec(w))))), 1,
        G::Imperative);
    add(vec_prim_name("asVectorAcc", w),
        nat_fn("m", fn(acc(arr(N("m"), dt::vec(w))), acc(arr(N("m") * wn, num)))), 1,
        G::Imperative);
  }

  add("skip", pt::comm(), 0, G::Imperative);
  add("seq", fn(pt::prod(pt::comm(), pt::comm()), pt::comm()), 1, G::Imperative);
  PType new_t = data_fn("d", fn(fn(pt::var(D("d")), pt::comm()), pt::comm()));
  for (const char* n : {"new", "newGlobal", "newLocal", "newPrivate"}) {
    add(n, new_t, 1, G::Imperative);
  }
  add(":=", fn(pt::prod(acc(num), exp(num)), pt::comm()), 1, G::Imperative, true);
  add("for", nat_fn("n", fn(fn(exp(dt::idx(N("n"))), pt::comm()), pt::comm())), 1,
      G::Imperative);
  PType parfor_t = nat_fn(
      "n", data_fn("d", fn3(acc(arr(N("n"), D("d"))),
                            fn(exp(dt::idx(N("n"))), pt::pfn(acc(D("d")), pt::comm())),
                            pt::comm())));
  for (const char* p : {"parfor", "parforGlobal", "parforWorkgroup", "parforLocal"}) {
    add(p, parfor_t, 2, G::Imperative);
  }
  add("splitAcc",
      nat_fn("n", nat_fn("m", data_fn("d", fn(acc(arr(N("m"), arr(N("n"), D("d")))),
                                              acc(arr(N("n") * N("m"), D("d"))))))),
      1, G::Imperative);
  add("joinAcc",
      nat_fn("n", nat_fn("m", data_fn("d", fn(acc(arr(N("n") * N("m"), D("d"))),
                                              acc(arr(N("n"), arr(N("m"), D("d")))))))),
      1, G::Imperative);
  add("pairAcc1", data_fn("d1", data_fn("d2", fn(acc(dt::pair(D("d1"), D("d2"))), acc(D("d1"))))),
      1, G::Imperative);
  add("pairAcc2", data_fn("d1", data_fn("d2", fn(acc(dt::pair(D("d1"), D("d2"))), acc(D("d2"))))),
      1, G::Imperative);
  add("zipAcc1",
      nat_fn("n", data_fn("d1", data_fn("d2", fn(acc(arr(N("n"), dt::pair(D("d1"), D("d2")))),
                                                 acc(arr(N("n"), D("d1"))))))),
      1, G::Imperative);
  add("zipAcc2",
      nat_fn("n", data_fn("d1", data_fn("d2", fn(acc(arr(N("n"), dt::pair(D("d1"), D("d2")))),
                                                 acc(arr(N("n"), D("d2"))))))),
      1, G::Imperative);
  add("idxAcc",
      nat_fn("n", data_fn("d", fn3(acc(arr(N("n"), D("d"))), exp(dt::idx(N("n"))),
                                   acc(D("d"))))),
      2, G::Imperative);

  PType mapI_t = nat_fn(
      "n", data_fn("d1", data_fn("d2", fn4(fn(exp(D("d1")), pt::pfn(acc(D("d2")), pt::comm())),
                                           exp(arr(N("n"), D("d1"))),
                                           acc(arr(N("n"), D("d2"))), pt::comm()))));
  for (const char* m : {"mapI", "mapIGlobal", "mapIWorkgroup", "mapILocal", "mapISeq"}) {
    add(m, mapI_t, 3, G::Intermediate);
  }
  add("reduceI",
      nat_fn("n", data_fn("d1", data_fn("d2", fn5(fn4(exp(D("d1")), exp(D("d2")), acc(D("d2")),
                                                      pt::comm()),
                                                  exp(D("d2")), exp(arr(N("n"), D("d1"))),
                                                  fn(exp(D("d2")), pt::comm()), pt::comm())))),
      4, G::Intermediate);
  return tab;
}

const std::map<std::string, PrimInfo>& table() {
  static const std::map<std::string, PrimInfo> t = build_table();
  return t;
}

bool one_of(const std::string& s, std::initializer_list<const char*> xs) {
  for (const char* x : xs) {
    if (s == x) return true;
  }
  return false;
}

}  // namespace

const PrimInfo* lookup_prim(const std::string& name) {
  auto& t = table();
  auto it = t.find(name);
  return it == t.end() ? nullptr : &it->second;
}

bool is_prim_name(const std::string& name) { return lookup_prim(name) != nullptr; }

const std::vector<std::string>& all_prim_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (auto& [k, _] : table()) v.push_back(k);
    return v;
  }();
  return names;
}

PrimSig instantiate_prim(const PrimInfo& info, const std::vector<TypeArg>& targs) {
  if (targs.size() != info.tkinds.size()) {
    throw std::logic_error("primitive " + info.name + " expects " +
                           std::to_string(info.tkinds.size()) + " type arguments");
  }
  PType t = info.type;
  for (const TypeArg& a : targs) {
    if (a.kind == Kind::Nat) {
      t = ptype_subst_nat(t->a, t->binder, a.nat);
    } else {
      t = ptype_subst_data(t->a, t->binder, a.data);
    }
  }
  PrimSig sig;
  for (int i = 0; i < info.nargs; ++i) {
    sig.params.push_back(t->a);
    t = t->b;
  }
  sig.result = t;
  return sig;
}

bool is_map_family(const std::string& n) {
  return one_of(n, {"map", "mapGlobal", "mapWorkgroup", "mapLocal", "mapSeq"});
}
bool is_mapI_family(const std::string& n) {
  return one_of(n, {"mapI", "mapIGlobal", "mapIWorkgroup", "mapILocal", "mapISeq"});
}
bool is_parfor_family(const std::string& n) {
  return one_of(n, {"parfor", "parforGlobal", "parforWorkgroup", "parforLocal"});
}
bool is_new_family(const std::string& n) {
  return one_of(n, {"new", "newGlobal", "newLocal", "newPrivate"});
}
bool is_to_family(const std::string& n) {
  return one_of(n, {"toGlobal", "toLocal", "toPrivate"});
}
bool is_arith_op(const std::string& n) { return one_of(n, {"+", "-", "*", "/"}); }

std::string mapI_of(const std::string& m) { return "mapI" + m.substr(3); }

std::string parfor_of(const std::string& m) {
  if (m == "mapISeq") return "";
  return "parfor" + m.substr(4);
}

std::string new_of(const std::string& t) { return "new" + t.substr(2); }

std::optional<VecPrim> vec_prim(const std::string& name) {
  auto us = name.rfind('_');
  if (us == std::string::npos) return std::nullopt;
  std::string base = name.substr(0, us);
  if (!one_of(base, {"asVector", "asScalar", "asScalarAcc", "asVectorAcc"})) {
    return std::nullopt;
  }
  int w = 0;
  try {
    w = std::stoi(name.substr(us + 1));
  } catch (...) {
    return std::nullopt;
  }
  if (!is_legal_vector_width(w)) return std::nullopt;
  return VecPrim{base, w};
}

std::string vec_prim_name(const std::string& base, int width) {
  return base + "_" + std::to_string(width);
}

}  // namespace dpia
