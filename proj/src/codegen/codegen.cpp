#include "dpia/codegen.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "dpia/checker.hpp"
#include "dpia/error.hpp"
#include "dpia/prims.hpp"

namespace dpia {

using K = PhraseNode::K;
using DK = DataTypeNode::K;
using c::ExprP;
using c::Step;
using c::StmtP;
using Path = std::vector<Step>;

std::string target_name(Target t) {
  switch (t) {
    case Target::PseudoC:
      return "pseudo-c";
    case Target::COpenMP:
      return "c-openmp";
    case Target::OpenCL:
      return "opencl";
  }
  return "?";
}

namespace {

std::string sanitize_nat_text(const std::string& s) {
  std::string r;
  for (char ch : s) r += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  return r;
}

}  // namespace

ExprP nat_to_cexpr(const Nat& n, const std::map<std::string, std::string>& names) {
  Poly p = to_poly(n);
  ExprP acc;
  for (auto& [mono, coeff] : p) {
    ExprP term;
    for (auto& v : mono) {
      auto it = names.find(v);
      ExprP x = c::var(it != names.end() ? it->second : v);
      term = term ? c::bin('*', term, x) : x;
    }
    if (!term) term = c::int_lit(static_cast<int64_t>(coeff));
    else if (coeff != 1) term = c::bin('*', c::int_lit(static_cast<int64_t>(coeff)), term);
    acc = acc ? c::bin('+', acc, term) : term;
  }
  return acc ? acc : c::int_lit(0);
}

std::string mangle_data(const Data& d) {
  switch (d->k) {
    case DK::Num:
      return "num";
    case DK::Idx:
      return "idx";
    case DK::Vec:
      return "vec" + std::to_string(d->width);
    case DK::Array:
      return "arr" + sanitize_nat_text(nat_to_infix(d->size)) + "_" + mangle_data(d->a);
    case DK::Pair:
      return "pair_" + mangle_data(d->a) + "_" + mangle_data(d->b);
    case DK::Var:
      return "d_" + d->name;
  }
  return "?";
}

std::string c_elem_type(const Data& leaf, const CodegenOptions& opts) {
  std::string scalar = opts.mode == NumMode::Float ? "float" : "long";
  switch (leaf->k) {
    case DK::Num:
      return scalar;
    case DK::Idx:
      return "int";
    case DK::Vec:
      if (opts.target == Target::OpenCL) return scalar + std::to_string(leaf->width);
      return scalar;
    case DK::Pair:
      return mangle_data(leaf);
    default:
      internal_error("no C type for data type " + data_to_string(leaf));
  }
}

Layout storage_layout(const Data& d, Target t) {
  Layout l;
  Data cur = d;
  for (;;) {
    if (cur->k == DK::Array) {
      l.dims.push_back(cur->size);
      cur = cur->a;
    } else if (cur->k == DK::Vec && t != Target::OpenCL) {
      l.dims.push_back(Nat(static_cast<uint64_t>(cur->width)));
      cur = dt::num();
    } else {
      break;
    }
  }
  l.elem = cur;
  return l;
}

namespace {

const std::set<std::string>& reserved_names() {
  static const std::set<std::string> r = {
      "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
      "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
      "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch",
      "typedef", "union", "unsigned", "void", "volatile", "while", "kernel", "global",
      "local", "private", "constant", "parfor", "main", "malloc", "calloc", "free", "barrier",
      "get_global_id", "get_global_size", "get_group_id", "get_num_groups", "get_local_id",
      "get_local_size", "vload2", "vload3", "vload4", "vload8", "vload16", "vstore2",
      "vstore3", "vstore4", "vstore8", "vstore16", "x1", "x2", "KERNEL"};
  return r;
}

struct Root {
  std::string cname;
  Data type;
  bool deref = false;
};

class Gen {
 public:
  explicit Gen(const CodegenOptions& o) : o_(o) {}

  CUnit run(const std::string& name, const std::vector<std::string>& nats,
            const std::vector<GenParam>& params, const Phrase& body) {
    CUnit u;
    u.opts = o_;
    u.fn.name = name;
    used_.insert(name);
    for (auto& n : nats) nat_names_[n] = fresh(n);
    std::vector<c::Param> outs, ins, temps, sizes;
    for (auto& p : params) {
      Data d = p.type->k == PhraseTypeNode::K::Exp || p.type->k == PhraseTypeNode::K::Acc
                   ? p.type->data
                   : as_var_type(p.type);
      if (!d) internal_error("parameter '" + p.name + "' has no data type");
      tenv_[p.name] = p.type;
      Root r{fresh(p.name), d, false};
      Layout l = storage_layout(d, o_.target);
      bool pointer = !l.dims.empty();
      if (p.role != c::Param::Role::Input && !pointer) r.deref = true;
      roots_[p.name] = r;
      declare_structs(d);
      c::Param cp{r.cname, p.name, d, p.role, p.space};
      switch (p.role) {
        case c::Param::Role::Output:
          outs.push_back(cp);
          break;
        case c::Param::Role::Input:
          ins.push_back(cp);
          break;
        default:
          temps.push_back(cp);
          break;
      }
    }
    for (auto& n : nats) {
      sizes.push_back(c::Param{nat_names_[n], n, dt::idx(Nat::var(n)), c::Param::Role::Size, ""});
    }
    for (auto* v : {&outs, &ins, &temps, &sizes}) {
      u.fn.params.insert(u.fn.params.end(), v->begin(), v->end());
    }
    comm(body, u.fn.body);
    u.structs = structs_;
    return u;
  }

 private:
  CodegenOptions o_;
  std::set<std::string> used_;
  std::map<std::string, std::string> nat_names_;
  std::map<std::string, Root> roots_;
  std::map<std::string, std::string> idx_vars_;
  TypeEnv tenv_;
  c::RangeEnv ranges_;
  std::vector<Data> structs_;
  std::set<std::string> struct_names_;

  std::string fresh(const std::string& base) {
    std::string s;
    for (char ch : base) {
      s += std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ? ch : '_';
    }
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) s = "v" + s;
    std::string cand = s;
    for (int k = 2; used_.count(cand) || reserved_names().count(cand); ++k) {
      cand = s + "_" + std::to_string(k);
    }
    used_.insert(cand);
    return cand;
  }

  void declare_structs(const Data& d) {
    switch (d->k) {
      case DK::Array:
        declare_structs(d->a);
        return;
      case DK::Pair: {
        declare_structs(d->a);
        declare_structs(d->b);
        std::string n = mangle_data(d);
        if (struct_names_.insert(n).second) structs_.push_back(d);
        return;
      }
      default:
        return;
    }
  }

  ExprP nat_expr(const Nat& n) { return nat_to_cexpr(n, nat_names_); }

  ExprP simp(const ExprP& e) { return o_.simplify ? c::simplify_index(e, ranges_) : e; }

  // --- storage -----------------------------------------------------------

  ExprP resolve(const Root& r, const Path& ps) {
    std::vector<Step> steps;
    Data t = r.type;
    ExprP lin;
    size_t i = 0;
    for (;;) {
      bool array_layer = t->k == DK::Array || (t->k == DK::Vec && o_.target != Target::OpenCL);
      if (array_layer) {
        if (i >= ps.size()) internal_error("codegen: path shorter than type of " + r.cname);
        const Step& s = ps[i++];
        if (s.k == Step::K::Field) internal_error("codegen: field step at array layer");
        ExprP sz = t->k == DK::Array ? nat_expr(t->size) : c::int_lit(t->width);
        lin = lin ? c::bin('+', c::bin('*', lin, sz), s.e) : s.e;
        t = t->k == DK::Array ? t->a : dt::num();
        continue;
      }
      if (lin) {
        steps.push_back(c::index_step(simp(lin)));
        lin = nullptr;
      }
      if (i == ps.size()) break;
      const Step& s = ps[i++];
      if (t->k == DK::Pair) {
        if (s.k != Step::K::Field) internal_error("codegen: expected field step on pair");
        steps.push_back(s);
        t = s.field == 1 ? t->a : t->b;
      } else if (t->k == DK::Vec) {
        if (s.k != Step::K::Lane) internal_error("codegen: expected lane step on vector");
        steps.push_back(c::lane_step(simp(s.e)));
        t = dt::num();
      } else {
        internal_error("codegen: path longer than type of " + r.cname);
      }
    }
    return c::access(r.cname, steps, r.deref);
  }

  std::optional<Root> root_of(const Phrase& p, int want_proj) {
    if (p->k == K::Ident) {
      auto it = roots_.find(p->name);
      if (it != roots_.end()) return it->second;
    }
    if (p->k == K::Proj && p->proj == want_proj && p->a->k == K::Ident) {
      auto it = roots_.find(p->a->name);
      if (it != roots_.end()) return it->second;
    }
    return std::nullopt;
  }

  // --- acceptors ---------------------------------------------------------

  static Path cons(Step s, const Path& ps) {
    Path r;
    r.reserve(ps.size() + 1);
    r.push_back(std::move(s));
    r.insert(r.end(), ps.begin(), ps.end());
    return r;
  }

  static Path tail(const Path& ps, size_t n) { return Path(ps.begin() + n, ps.end()); }

  void need(const Path& ps, size_t n, const std::string& what) {
    if (ps.size() < n) internal_error("codegen: path too short at " + what);
  }

  ExprP acc(const Phrase& A, const Path& ps) {
    if (auto r = root_of(A, 1)) return resolve(*r, ps);
    auto m = match_prim(A);
    if (!m) internal_error("codegen: unexpected acceptor " + std::to_string(static_cast<int>(A->k)));
    const std::string& n = m->name;
    if (n == "idxAcc") return acc(m->args[0], cons(c::index_step(exp(m->args[1], {})), ps));
    if (n == "splitAcc") {
      need(ps, 1, n);
      ExprP k = ps[0].e, w = nat_expr(m->nat(0));
      Path r = cons(c::index_step(c::bin('/', k, w)),
                    cons(c::index_step(c::bin('%', k, w)), tail(ps, 1)));
      return acc(m->args[0], r);
    }
    if (n == "joinAcc") {
      need(ps, 2, n);
      ExprP lin = c::bin('+', c::bin('*', ps[0].e, nat_expr(m->nat(1))), ps[1].e);
      return acc(m->args[0], cons(c::index_step(lin), tail(ps, 2)));
    }
    if (n == "pairAcc1" || n == "pairAcc2") {
      return acc(m->args[0], cons(c::field_step(n == "pairAcc1" ? 1 : 2), ps));
    }
    if (n == "zipAcc1" || n == "zipAcc2") {
      need(ps, 1, n);
      Path r = cons(ps[0], cons(c::field_step(n == "zipAcc1" ? 1 : 2), tail(ps, 1)));
      return acc(m->args[0], r);
    }
    if (auto v = vec_prim(n)) {
      ExprP w = c::int_lit(v->width);
      if (v->base == "asScalarAcc") {
        need(ps, 2, n);
        ExprP lin = c::bin('+', c::bin('*', ps[0].e, w), ps[1].e);
        return acc(m->args[0], cons(c::index_step(lin), tail(ps, 2)));
      }
      if (v->base == "asVectorAcc") {
        need(ps, 1, n);
        ExprP k = ps[0].e;
        Path r = cons(c::index_step(c::bin('/', k, w)),
                      cons(c::lane_step(c::bin('%', k, w)), tail(ps, 1)));
        return acc(m->args[0], r);
      }
    }
    internal_error("codegen: unexpected acceptor primitive " + n);
  }

  // --- expressions -------------------------------------------------------

  ExprP literal(const Literal& l) {
    if (l.type && l.type->k == DK::Idx) return c::int_lit(l.as_int());
    if (o_.mode == NumMode::Float) return c::num_lit(l.as_double(), true);
    return c::num_lit(static_cast<double>(l.as_int()), false);
  }

  ExprP exp(const Phrase& E, const Path& ps) {
    if (E->k == K::Ident) {
      auto iv = idx_vars_.find(E->name);
      if (iv != idx_vars_.end()) {
        if (!ps.empty()) internal_error("codegen: path on index variable");
        return c::var(iv->second);
      }
    }
    if (auto r = root_of(E, 2)) return resolve(*r, ps);
    if (E->k == K::Lit) return literal(E->lit);
    auto m = match_prim(E);
    if (!m) internal_error("codegen: unexpected expression " + std::to_string(static_cast<int>(E->k)));
    const std::string& n = m->name;
    if (is_arith_op(n)) {
      auto xy = pair_components(E);
      if (!xy) internal_error("codegen: arithmetic without operand pair");
      return c::bin(n[0], exp(xy->first, ps), exp(xy->second, ps));
    }
    if (n == "negate") return c::neg(exp(m->args[0], ps));
    if (n == "idx") return exp(m->args[0], cons(c::index_step(exp(m->args[1], {})), ps));
    if (n == "zip") {
      need(ps, 2, n);
      if (ps[1].k != Step::K::Field) internal_error("codegen: zip needs a field step");
      return exp(m->args[ps[1].field == 1 ? 0 : 1], cons(ps[0], tail(ps, 2)));
    }
    if (n == "split") {
      need(ps, 2, n);
      ExprP sz = nat_expr(m->nat(0));
      ExprP lin = o_.fault_flip_split ? c::bin('+', c::bin('*', ps[1].e, sz), ps[0].e)
                                      : c::bin('+', c::bin('*', ps[0].e, sz), ps[1].e);
      return exp(m->args[0], cons(c::index_step(lin), tail(ps, 2)));
    }
    if (n == "join") {
      need(ps, 1, n);
      ExprP k = ps[0].e, w = nat_expr(m->nat(1));
      Path r = cons(c::index_step(c::bin('/', k, w)),
                    cons(c::index_step(c::bin('%', k, w)), tail(ps, 1)));
      return exp(m->args[0], r);
    }
    if (n == "pair") {
      need(ps, 1, n);
      if (ps[0].k != Step::K::Field) internal_error("codegen: pair needs a field step");
      return exp(m->args[ps[0].field == 1 ? 0 : 1], tail(ps, 1));
    }
    if (n == "fst" || n == "snd") {
      return exp(m->args[0], cons(c::field_step(n == "fst" ? 1 : 2), ps));
    }
    if (auto v = vec_prim(n)) {
      ExprP w = c::int_lit(v->width);
      if (v->base == "asVector") {
        need(ps, 2, n);
        ExprP lin = c::bin('+', c::bin('*', ps[0].e, w), ps[1].e);
        return exp(m->args[0], cons(c::index_step(lin), tail(ps, 2)));
      }
      if (v->base == "asScalar") {
        need(ps, 1, n);
        ExprP k = ps[0].e;
        Path r = cons(c::index_step(c::bin('/', k, w)),
                      cons(c::lane_step(c::bin('%', k, w)), tail(ps, 1)));
        return exp(m->args[0], r);
      }
    }
    internal_error("codegen: residual functional primitive " + n);
  }

  // --- vectors (OpenCL) --------------------------------------------------

  static Path with_lane(const Path& ps, int k) {
    Path r = ps;
    r.push_back(c::lane_step(c::int_lit(k)));
    return r;
  }

  // All lanes are the same native vector variable.
  static std::optional<ExprP> native_vector(const std::vector<ExprP>& L) {
    for (size_t k = 0; k < L.size(); ++k) {
      const ExprP& e = L[k];
      if (e->k != c::Expr::K::Access || e->name != L[0]->name || e->deref != L[0]->deref ||
          e->steps.empty() || e->steps.back().k != Step::K::Lane ||
          e->steps.back().e->k != c::Expr::K::IntLit ||
          e->steps.back().e->i != static_cast<int64_t>(k) ||
          e->steps.size() != L[0]->steps.size()) {
        return std::nullopt;
      }
      for (size_t s = 0; s + 1 < e->steps.size(); ++s) {
        const Step &x = e->steps[s], &y = L[0]->steps[s];
        if (x.k != y.k || x.field != y.field || !c::expr_equal(x.e, y.e)) return std::nullopt;
      }
    }
    std::vector<Step> prefix(L[0]->steps.begin(), L[0]->steps.end() - 1);
    return c::access(L[0]->name, prefix, L[0]->deref);
  }

  // Lanes k are base[e0 + k] with e0 divisible by the width: the vector
  // offset e0 / w.
  std::optional<ExprP> contiguous(const std::vector<ExprP>& L) {
    int64_t w = static_cast<int64_t>(L.size());
    c::LinearForm f0;
    for (size_t k = 0; k < L.size(); ++k) {
      const ExprP& e = L[k];
      if (e->k != c::Expr::K::Access || e->deref || e->name != L[0]->name ||
          e->steps.size() != 1 || e->steps[0].k != Step::K::Index) {
        return std::nullopt;
      }
      c::LinearForm f = c::linear_form(e->steps[0].e);
      if (k == 0) {
        f0 = f;
        continue;
      }
      if (f.c - f0.c != static_cast<int64_t>(k) || f.terms.size() != f0.terms.size()) {
        return std::nullopt;
      }
      for (auto& [key, t] : f.terms) {
        auto it = f0.terms.find(key);
        if (it == f0.terms.end() || it->second.first != t.first) return std::nullopt;
      }
    }
    c::LinearForm q = f0;
    if (q.c % w != 0) return std::nullopt;
    q.c /= w;
    for (auto& [key, t] : q.terms) {
      if (t.first % w != 0) return std::nullopt;
      t.first /= w;
    }
    return simp(c::linear_to_expr(q));
  }

  ExprP vec_read(const Phrase& E, const Path& ps, int w) {
    if (auto m = match_prim(E)) {
      if (is_arith_op(m->name)) {
        auto xy = pair_components(E);
        return c::bin(m->name[0], vec_read(xy->first, ps, w), vec_read(xy->second, ps, w));
      }
      if (m->name == "negate") return c::neg(vec_read(m->args[0], ps, w));
    }
    if (E->k == K::Lit) return c::vec_lit(std::vector<ExprP>(w, literal(E->lit)));
    std::vector<ExprP> L;
    for (int k = 0; k < w; ++k) L.push_back(exp(E, with_lane(ps, k)));
    if (auto v = native_vector(L)) return *v;
    if (auto off = contiguous(L)) return c::vload(w, *off, L[0]->name);
    return c::vec_lit(L);
  }

  // --- commands ----------------------------------------------------------

  void assign(const Phrase& A, const Phrase& E, std::vector<StmtP>& out) {
    PType t = synth_type(tenv_, E);
    if (!t || t->k != PhraseTypeNode::K::Exp) internal_error("codegen: assignment of non-expression");
    const Data& d = t->data;
    if (d->k != DK::Vec) {
      out.push_back(c::assign(acc(A, {}), exp(E, {})));
      return;
    }
    int w = d->width;
    if (o_.target == Target::OpenCL) {
      std::vector<ExprP> L;
      for (int k = 0; k < w; ++k) L.push_back(acc(A, with_lane({}, k)));
      if (auto v = native_vector(L)) {
        out.push_back(c::assign(*v, vec_read(E, {}, w)));
        return;
      }
      if (auto off = contiguous(L)) {
        out.push_back(c::vstore(w, vec_read(E, {}, w), *off, L[0]->name));
        return;
      }
    }
    for (int k = 0; k < w; ++k) {
      out.push_back(c::assign(acc(A, with_lane({}, k)), exp(E, with_lane({}, k))));
    }
  }

  template <class F>
  void scoped(const std::string& name, F&& f) {
    auto save_root = roots_.find(name) != roots_.end() ? std::optional<Root>(roots_[name])
                                                       : std::nullopt;
    auto save_idx = idx_vars_.count(name) ? std::optional<std::string>(idx_vars_[name])
                                          : std::nullopt;
    auto save_t = tenv_.count(name) ? tenv_[name] : nullptr;
    roots_.erase(name);
    idx_vars_.erase(name);
    f();
    roots_.erase(name);
    idx_vars_.erase(name);
    tenv_.erase(name);
    if (save_root) roots_[name] = *save_root;
    if (save_idx) idx_vars_[name] = *save_idx;
    if (save_t) tenv_[name] = save_t;
  }

  std::string space_of(const std::string& new_name) {
    if (o_.target != Target::OpenCL) return "";
    if (new_name == "newPrivate") return "";
    if (new_name == "newLocal") return "local";
    return "global";
  }

  c::LoopKind loop_kind(const std::string& parfor_name) {
    if (o_.target == Target::OpenCL) {
      if (parfor_name == "parforGlobal") return c::LoopKind::Global;
      if (parfor_name == "parforWorkgroup") return c::LoopKind::Workgroup;
      if (parfor_name == "parforLocal") return c::LoopKind::Local;
      return c::LoopKind::Seq;
    }
    return o_.target == Target::COpenMP ? c::LoopKind::OmpPar : c::LoopKind::Par;
  }

  std::string loop_var_base(const std::string& dpia, c::LoopKind k) {
    switch (k) {
      case c::LoopKind::Global:
        return "gl_id";
      case c::LoopKind::Workgroup:
        return "g_id";
      case c::LoopKind::Local:
        return "l_id";
      default:
        return dpia;
    }
  }

  void loop(const Phrase& body_lam, const Nat& n, c::LoopKind kind, const Phrase* parfor_acc,
            const Data& elem, std::vector<StmtP>& out) {
    if (body_lam->k != K::Lam) internal_error("codegen: loop body is not a lambda");
    const std::string& i = body_lam->name;
    Phrase body = body_lam->a;
    if (parfor_acc) {
      if (body->k != K::Lam) internal_error("codegen: parfor body is not a binary lambda");
      Phrase sub = ph::prim_app("idxAcc", {TypeArg::of(n), TypeArg::of(elem)},
                                {*parfor_acc, ph::ident(i)});
      body = substitute(body->a, body->name, sub);
    }
    std::vector<StmtP> inner;
    std::string ci;
    scoped(i, [&] {
      ci = fresh(loop_var_base(i, kind));
      idx_vars_[i] = ci;
      tenv_[i] = pt::exp(dt::idx(n));
      if (auto c = n.as_const(); c && *c > 0) ranges_[ci] = {0, static_cast<int64_t>(*c) - 1};
      comm(body, inner);
      ranges_.erase(ci);
    });
    out.push_back(c::loop(kind, ci, nat_expr(n), std::move(inner)));
  }

  void comm(const Phrase& P, std::vector<StmtP>& out) {
    auto m = match_prim(P);
    if (!m) internal_error("codegen: unexpected command " + std::to_string(static_cast<int>(P->k)));
    const std::string& n = m->name;
    if (n == "skip") {
      out.push_back(c::comment("skip"));
    } else if (n == "seq") {
      auto xy = pair_components(P);
      if (!xy) internal_error("codegen: seq without command pair");
      comm(xy->first, out);
      comm(xy->second, out);
    } else if (n == ":=") {
      auto xy = pair_components(P);
      if (!xy) internal_error("codegen: assignment without operand pair");
      assign(xy->first, xy->second, out);
    } else if (is_new_family(n)) {
      const Phrase& f = m->args[0];
      if (f->k != K::Lam) internal_error("codegen: new body is not a lambda");
      if (o_.target == Target::OpenCL && n != "newPrivate" && !o_.allow_nested_alloc) {
        internal_error("codegen: un-hoisted " + n + " in kernel");
      }
      const Data& d = m->data(0);
      declare_structs(d);
      std::vector<StmtP> inner;
      scoped(f->name, [&] {
        Root r{fresh(f->name), d, false};
        roots_[f->name] = r;
        tenv_[f->name] = pt::var(d);
        inner.push_back(c::declare(c::Decl{r.cname, d, space_of(n), o_.init_new, o_.heap}));
        comm(f->a, inner);
      });
      out.push_back(c::block(std::move(inner)));
    } else if (n == "for") {
      loop(m->args[0], m->nat(0), c::LoopKind::Seq, nullptr, nullptr, out);
    } else if (is_parfor_family(n)) {
      loop(m->args[1], m->nat(0), loop_kind(n), &m->args[0], m->data(1), out);
    } else {
      internal_error("codegen: residual functional combinator " + n);
    }
  }
};

}  // namespace

CUnit codegen_function(const std::string& name, const std::vector<std::string>& nats,
                       const std::vector<GenParam>& params, const Phrase& body,
                       const CodegenOptions& opts) {
  return Gen(opts).run(name, nats, params, body);
}

CUnit codegen_program(const Program& prog, const Phrase& stage2, const CodegenOptions& opts,
                      const std::string& name) {
  std::vector<GenParam> ps;
  for (auto& p : prog.params) {
    auto role = p.type->k == PhraseTypeNode::K::Exp ? c::Param::Role::Input
                                                     : c::Param::Role::Output;
    ps.push_back(GenParam{p.name, p.type, role, opts.target == Target::OpenCL ? "global" : ""});
  }
  return codegen_function(name, prog.nats, ps, stage2, opts);
}

}  // namespace dpia
