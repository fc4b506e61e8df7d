#include "dpia/eval_imp.hpp"

#include "dpia/error.hpp"
#include "dpia/prims.hpp"

namespace dpia {

using K = PhraseNode::K;

std::string LeafAddress::str() const {
  std::string s = cell;
  for (int64_t p : path) {
    if (p < 0) s += ".x" + std::to_string(-p);
    else s += "[" + std::to_string(p) + "]";
  }
  return s;
}

std::string RaceViolation::describe() const {
  return "race in " + loop + ": iterations " + std::to_string(iter_a) + " and " +
         std::to_string(iter_b) + " both write " + address.str();
}

std::optional<RaceViolation> check_race(const std::vector<std::set<LeafAddress>>& footprints,
                                        const std::string& loop) {
  std::map<LeafAddress, int64_t> owner;
  for (size_t it = 0; it < footprints.size(); ++it) {
    for (auto& a : footprints[it]) {
      auto [pos, fresh] = owner.emplace(a, static_cast<int64_t>(it));
      if (!fresh && pos->second != static_cast<int64_t>(it)) {
        return RaceViolation{loop, pos->second, static_cast<int64_t>(it), a};
      }
    }
  }
  return std::nullopt;
}

namespace {

struct CS {
  enum class K { Index, Field, Lane } k;
  int64_t v;
};
using CPath = std::vector<CS>;

CPath cons(CS s, const CPath& ps) {
  CPath r;
  r.reserve(ps.size() + 1);
  r.push_back(s);
  r.insert(r.end(), ps.begin(), ps.end());
  return r;
}
CPath tail(const CPath& ps, size_t n) {
  if (ps.size() < n) internal_error("exec: access path too short");
  return CPath(ps.begin() + static_cast<std::ptrdiff_t>(n), ps.end());
}
CS I(int64_t v) { return CS{CS::K::Index, v}; }
CS F(int64_t v) { return CS{CS::K::Field, v}; }
CS L(int64_t v) { return CS{CS::K::Lane, v}; }

struct Loc {
  std::string cell;
  CPath path;
};

class Exec {
 public:
  Exec(const NatEnv& sigma, const ImpOptions& o) : sigma_(sigma), o_(o) {}

  ExecResult run(const Phrase& p, Store store) {
    for (auto& [name, v] : store) {
      cells_[name] = v;
      env_[name] = Bind{false, name, 0};
    }
    comm(p);
    ExecResult r;
    for (auto& [name, v] : store) r.store[name] = cells_.at(name);
    r.races = std::move(races_);
    r.parallel_loops = parallel_loops_;
    return r;
  }

 private:
  struct Bind {
    bool is_idx;
    std::string cell;
    int64_t idx;
  };
  struct Frame {
    std::string loop;
    std::vector<std::set<LeafAddress>> its;
    size_t cur = 0;
  };

  const NatEnv& sigma_;
  ImpOptions o_;
  std::map<std::string, Value> cells_;
  std::map<std::string, Bind> env_;
  std::vector<Frame> frames_;
  std::vector<RaceViolation> races_;
  std::map<const PhraseNode*, Phrase> parfor_bodies_;
  size_t parallel_loops_ = 0;
  int counter_ = 0;

  int64_t nat(const Nat& n) { return static_cast<int64_t>(nat_eval(n, sigma_)); }

  Value& locate(const Loc& l) {
    auto it = cells_.find(l.cell);
    if (it == cells_.end()) internal_error("exec: unknown cell " + l.cell);
    Value* v = &it->second;
    for (auto& s : l.path) {
      size_t ix = static_cast<size_t>(s.k == CS::K::Field ? s.v - 1 : s.v);
      if (s.v < 0 || ix >= v->xs.size()) {
        internal_error("exec: out-of-bounds access " + std::to_string(s.v) + " in " + l.cell);
      }
      v = &v->xs[ix];
    }
    return *v;
  }

  void record(const Loc& l) {
    if (frames_.empty()) return;
    LeafAddress a{l.cell, {}};
    for (auto& s : l.path) a.path.push_back(s.k == CS::K::Field ? -s.v : s.v);
    for (auto& f : frames_) f.its[f.cur].insert(a);
  }

  void write(const Loc& l, const Value& v) {
    locate(l) = v;
    record(l);
  }

  std::optional<Loc> root(const Phrase& p, int want) {
    const Phrase* id = nullptr;
    if (p->k == K::Ident) id = &p;
    else if (p->k == K::Proj && p->proj == want && p->a->k == K::Ident) id = &p->a;
    if (!id) return std::nullopt;
    auto it = env_.find((*id)->name);
    if (it == env_.end() || it->second.is_idx) return std::nullopt;
    return Loc{it->second.cell, {}};
  }

  Loc acc(const Phrase& A, const CPath& ps) {
    if (auto r = root(A, 1)) {
      r->path = ps;
      return *r;
    }
    auto m = match_prim(A);
    if (!m) internal_error("exec: unexpected acceptor");
    const std::string& n = m->name;
    if (n == "idxAcc") return acc(m->args[0], cons(I(index(m->args[1])), ps));
    if (n == "splitAcc") {
      int64_t k = ps.at(0).v, w = nat(m->nat(0));
      return acc(m->args[0], cons(I(k / w), cons(I(k % w), tail(ps, 1))));
    }
    if (n == "joinAcc") {
      int64_t lin = ps.at(0).v * nat(m->nat(1)) + ps.at(1).v;
      return acc(m->args[0], cons(I(lin), tail(ps, 2)));
    }
    if (n == "pairAcc1" || n == "pairAcc2") {
      return acc(m->args[0], cons(F(n == "pairAcc1" ? 1 : 2), ps));
    }
    if (n == "zipAcc1" || n == "zipAcc2") {
      return acc(m->args[0], cons(ps.at(0), cons(F(n == "zipAcc1" ? 1 : 2), tail(ps, 1))));
    }
    if (auto v = vec_prim(n)) {
      int64_t w = v->width;
      if (v->base == "asScalarAcc") {
        return acc(m->args[0], cons(I(ps.at(0).v * w + ps.at(1).v), tail(ps, 2)));
      }
      if (v->base == "asVectorAcc") {
        int64_t k = ps.at(0).v;
        return acc(m->args[0], cons(I(k / w), cons(L(k % w), tail(ps, 1))));
      }
    }
    internal_error("exec: unexpected acceptor primitive " + n);
  }

  int64_t index(const Phrase& E) {
    Value v = exp(E, {});
    return v.k == Value::K::Idx ? v.i : static_cast<int64_t>(v.as_double());
  }

  Value literal(const Literal& l) {
    if (l.type && l.type->k == DataTypeNode::K::Idx) return value_idx(l.as_int());
    if (o_.mode == NumMode::Int) return value_num(l.as_int());
    return value_numf(l.as_double());
  }

  Value exp(const Phrase& E, const CPath& ps) {
    if (E->k == K::Ident) {
      auto it = env_.find(E->name);
      if (it != env_.end() && it->second.is_idx) return value_idx(it->second.idx);
    }
    if (auto r = root(E, 2)) {
      r->path = ps;
      return locate(*r);
    }
    if (E->k == K::Lit) return literal(E->lit);
    auto m = match_prim(E);
    if (!m) internal_error("exec: unexpected expression");
    const std::string& n = m->name;
    if (is_arith_op(n)) {
      auto xy = pair_components(E);
      return scalar_arith(n, exp(xy->first, ps), exp(xy->second, ps));
    }
    if (n == "negate") return scalar_negate(exp(m->args[0], ps));
    if (n == "idx") return exp(m->args[0], cons(I(index(m->args[1])), ps));
    if (n == "zip") return exp(m->args[ps.at(1).v == 1 ? 0 : 1], cons(ps.at(0), tail(ps, 2)));
    if (n == "split") {
      int64_t lin = ps.at(0).v * nat(m->nat(0)) + ps.at(1).v;
      return exp(m->args[0], cons(I(lin), tail(ps, 2)));
    }
    if (n == "join") {
      int64_t k = ps.at(0).v, w = nat(m->nat(1));
      return exp(m->args[0], cons(I(k / w), cons(I(k % w), tail(ps, 1))));
    }
    if (n == "pair") return exp(m->args[ps.at(0).v == 1 ? 0 : 1], tail(ps, 1));
    if (n == "fst" || n == "snd") return exp(m->args[0], cons(F(n == "fst" ? 1 : 2), ps));
    if (auto v = vec_prim(n)) {
      int64_t w = v->width;
      if (v->base == "asVector") {
        return exp(m->args[0], cons(I(ps.at(0).v * w + ps.at(1).v), tail(ps, 2)));
      }
      if (v->base == "asScalar") {
        int64_t k = ps.at(0).v;
        return exp(m->args[0], cons(I(k / w), cons(L(k % w), tail(ps, 1))));
      }
    }
    internal_error("exec: residual functional primitive " + n);
  }

  // Vector width of the data written through A, 0 for scalars.
  int acc_width(const Phrase& A) {
    if (auto r = root(A, 1)) {
      const Value& v = locate(*r);
      return v.k == Value::K::Vec ? static_cast<int>(v.xs.size()) : 0;
    }
    auto m = match_prim(A);
    if (!m) internal_error("exec: unexpected acceptor");
    Data d;
    if (m->name == "idxAcc") d = m->data(1);
    else if (m->name == "pairAcc1") d = m->data(0);
    else if (m->name == "pairAcc2") d = m->data(1);
    return d && d->k == DataTypeNode::K::Vec ? d->width : 0;
  }

  void assign(const Phrase& A, const Phrase& E) {
    int w = acc_width(A);
    if (w == 0) {
      write(acc(A, {}), exp(E, {}));
      return;
    }
    std::vector<Value> lanes;
    for (int k = 0; k < w; ++k) lanes.push_back(exp(E, {L(k)}));
    for (int k = 0; k < w; ++k) write(acc(A, {L(k)}), lanes[static_cast<size_t>(k)]);
  }

  template <class Fn>
  void scoped(const std::string& name, Bind b, Fn&& f) {
    auto it = env_.find(name);
    std::optional<Bind> saved;
    if (it != env_.end()) saved = it->second;
    env_[name] = b;
    f();
    if (saved) env_[name] = *saved;
    else env_.erase(name);
  }

  void comm(const Phrase& P) {
    auto m = match_prim(P);
    if (!m) internal_error("exec: unexpected command");
    const std::string& n = m->name;
    if (n == "skip") return;
    if (n == "seq") {
      auto xy = pair_components(P);
      comm(xy->first);
      comm(xy->second);
      return;
    }
    if (n == ":=") {
      auto xy = pair_components(P);
      assign(xy->first, xy->second);
      return;
    }
    if (is_new_family(n)) {
      const Phrase& f = m->args[0];
      std::string cell = f->name + "#" + std::to_string(++counter_);
      cells_[cell] = zero_value(m->data(0), sigma_, o_.mode);
      scoped(f->name, Bind{false, cell, 0}, [&] { comm(f->a); });
      cells_.erase(cell);
      return;
    }
    if (n == "for") {
      const Phrase& f = m->args[0];
      int64_t count = nat(m->nat(0));
      for (int64_t i = 0; i < count; ++i) {
        scoped(f->name, Bind{true, "", i}, [&] { comm(f->a); });
      }
      return;
    }
    if (is_parfor_family(n)) {
      const Phrase& f = m->args[1];
      auto cached = parfor_bodies_.find(P.get());
      Phrase body;
      if (cached != parfor_bodies_.end()) {
        body = cached->second;
      } else {
        Phrase sub = ph::prim_app("idxAcc", {m->targs[0], m->targs[1]},
                                  {m->args[0], ph::ident(f->name)});
        body = substitute(f->a->a, f->a->name, sub);
        parfor_bodies_[P.get()] = body;
      }
      int64_t count = nat(m->nat(0));
      ++parallel_loops_;
      frames_.push_back(Frame{n, std::vector<std::set<LeafAddress>>(count), 0});
      for (int64_t k = 0; k < count; ++k) {
        int64_t i = o_.reverse_parfor ? count - 1 - k : k;
        frames_.back().cur = static_cast<size_t>(i);
        scoped(f->name, Bind{true, "", i}, [&] { comm(body); });
      }
      if (auto v = check_race(frames_.back().its, n)) races_.push_back(*v);
      frames_.pop_back();
      return;
    }
    internal_error("exec: residual functional combinator " + n);
  }
};

}  // namespace

ExecResult exec(const Phrase& p, Store store, const NatEnv& sigma, const ImpOptions& o) {
  return Exec(sigma, o).run(p, std::move(store));
}

}  // namespace dpia
