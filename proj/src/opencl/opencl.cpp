#include "dpia/opencl.hpp"

#include <algorithm>
#include <functional>

#include "dpia/error.hpp"
#include "dpia/prims.hpp"

namespace dpia {

using K = PhraseNode::K;

namespace {

void collect_names(const Phrase& p, std::set<std::string>& out) {
  if (!p) return;
  if (p->k == K::Ident || p->k == K::Lam) out.insert(p->name);
  collect_names(p->a, out);
  collect_names(p->b, out);
}

Phrase rebuild(const Phrase& p, Phrase a, Phrase b) {
  if (a == p->a && b == p->b) return p;
  auto n = std::make_shared<PhraseNode>(*p);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Phrase with_lam_body(const Phrase& lam, Phrase body) {
  return ph::lam(lam->name, lam->ann, std::move(body), lam->span);
}

class Hoister {
 public:
  explicit Hoister(const Phrase& root) { collect_names(root, avoid_); }

  Phrase run(const Phrase& p) {
    if (auto m = match_prim(p)) {
      const std::string& n = m->name;
      if (n == "for" && m->args[0]->k == K::Lam) {
        const Phrase& f = m->args[0];
        loops_.push_back({m->nat(0), f->name, n});
        Phrase body = run(f->a);
        loops_.pop_back();
        return ph::with_span(ph::prim_app(n, m->targs, {with_lam_body(f, body)}), p->span);
      }
      if (is_parfor_family(n) && m->args[1]->k == K::Lam && m->args[1]->a->k == K::Lam) {
        const Phrase& f = m->args[1];
        loops_.push_back({m->nat(0), f->name, n});
        Phrase body = run(f->a->a);
        loops_.pop_back();
        Phrase lam = with_lam_body(f, with_lam_body(f->a, body));
        return ph::with_span(ph::prim_app(n, m->targs, {m->args[0], lam}), p->span);
      }
      if (is_new_family(n) && n != "newPrivate" && m->args[0]->k == K::Lam) {
        return run(hoist(n, m->data(0), m->args[0], p->span));
      }
    }
    if (!p->a && !p->b) return p;
    return rebuild(p, p->a ? run(p->a) : nullptr, p->b ? run(p->b) : nullptr);
  }

  std::vector<HoistedBuffer> buffers;

 private:
  struct Loop {
    Nat n;
    std::string var;
    std::string prim;
  };
  std::vector<Loop> loops_;
  std::set<std::string> avoid_;

  Phrase hoist(const std::string& prim, const Data& d, const Phrase& f, SrcSpan span) {
    size_t first = 0;
    std::string space = "global";
    if (prim == "newLocal") {
      space = "local";
      int wg = -1;
      for (size_t k = 0; k < loops_.size(); ++k) {
        if (loops_[k].prim == "parforGlobal") {
          type_error("newLocal '" + f->name + "' inside a global loop is shared across work-groups",
                     span);
        }
        if (loops_[k].prim == "parforWorkgroup") wg = static_cast<int>(k);
      }
      if (wg < 0) {
        type_error("newLocal '" + f->name + "' outside any work-group loop is shared across "
                   "work-groups", span);
      }
      first = static_cast<size_t>(wg) + 1;
    }
    Data t = d;
    for (size_t k = loops_.size(); k > first; --k) t = dt::array(loops_[k - 1].n, t);
    std::string name = fresh_name(f->name + "'", avoid_);
    avoid_.insert(name);
    buffers.push_back(HoistedBuffer{name, t, space});
    Phrase A = ph::proj(ph::ident(name), 1), E = ph::proj(ph::ident(name), 2);
    Data cur = t;
    for (size_t k = first; k < loops_.size(); ++k) {
      Data elem = cur->a;
      std::vector<TypeArg> ta = {TypeArg::of(loops_[k].n), TypeArg::of(elem)};
      A = ph::prim_app("idxAcc", ta, {A, ph::ident(loops_[k].var)});
      E = ph::prim_app("idx", ta, {E, ph::ident(loops_[k].var)});
      cur = elem;
    }
    return beta_normalize(substitute(f->a, f->name, ph::pair(A, E)));
  }
};

void lint_walk(const Phrase& p, std::vector<std::string>& stack, std::vector<std::string>& out) {
  if (!p) return;
  if (auto m = match_prim(p); m && is_parfor_family(m->name)) {
    const std::string& n = m->name;
    auto inside = [&](const char* k) {
      return std::find(stack.begin(), stack.end(), k) != stack.end();
    };
    if (n == "parforWorkgroup" && (inside("parforLocal") || inside("parforWorkgroup"))) {
      out.push_back("parforWorkgroup nested inside a work-group or local loop");
    }
    if (n == "parforWorkgroup" && inside("parforGlobal")) {
      out.push_back("parforWorkgroup nested inside a global loop");
    }
    if (n == "parforLocal" && !inside("parforWorkgroup")) {
      out.push_back("parforLocal outside any work-group loop");
    }
    if (n == "parforLocal" && inside("parforLocal")) {
      out.push_back("parforLocal nested inside a local loop");
    }
    if (n == "parforGlobal" && (inside("parforGlobal") || inside("parforWorkgroup") ||
                                inside("parforLocal"))) {
      out.push_back("parforGlobal nested inside another hierarchy loop");
    }
    stack.push_back(n);
    for (auto& a : m->args) lint_walk(a, stack, out);
    stack.pop_back();
    return;
  }
  lint_walk(p->a, stack, out);
  lint_walk(p->b, stack, out);
}

void expr_names(const c::ExprP& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->k == c::Expr::K::Access || e->k == c::Expr::K::VLoad) out.insert(e->name);
  for (auto& s : e->steps) expr_names(s.e, out);
  expr_names(e->a, out);
  expr_names(e->b, out);
  for (auto& x : e->elems) expr_names(x, out);
}

void stmt_access(const c::StmtP& s, std::set<std::string>& writes, std::set<std::string>& reads) {
  switch (s->k) {
    case c::Stmt::K::Assign:
      writes.insert(s->lhs->name);
      for (auto& st : s->lhs->steps) expr_names(st.e, reads);
      expr_names(s->rhs, reads);
      break;
    case c::Stmt::K::VStore:
      writes.insert(s->base);
      expr_names(s->lhs, reads);
      expr_names(s->rhs, reads);
      break;
    case c::Stmt::K::Block:
    case c::Stmt::K::For:
      for (auto& b : s->body) stmt_access(b, writes, reads);
      break;
    default:
      break;
  }
}

}  // namespace

HoistResult hoist_allocations(const Phrase& p) {
  Hoister h(p);
  Phrase body = h.run(p);
  return HoistResult{body, h.buffers};
}

Phrase rewrap_hoisted(const HoistResult& h) {
  Phrase body = h.body;
  for (size_t k = h.buffers.size(); k > 0; --k) {
    const HoistedBuffer& b = h.buffers[k - 1];
    std::string prim = b.space == "local" ? "newLocal" : "newGlobal";
    body = ph::prim_app(prim, {TypeArg::of(b.type)}, {ph::lam(b.name, pt::var(b.type), body)});
  }
  return body;
}

std::vector<std::string> hierarchy_lint(const Phrase& p) {
  std::vector<std::string> stack, out;
  lint_walk(p, stack, out);
  return out;
}

std::vector<c::StmtP> place_barriers(const std::vector<c::StmtP>& body,
                                     const std::set<std::string>& local_buffers) {
  std::vector<c::StmtP> in;
  for (auto& s : body) {
    if (s->k == c::Stmt::K::Block || s->k == c::Stmt::K::For) {
      auto n = std::make_shared<c::Stmt>(*s);
      n->body = place_barriers(s->body, local_buffers);
      in.push_back(n);
    } else {
      in.push_back(s);
    }
  }
  std::vector<c::StmtP> out;
  for (size_t k = 0; k < in.size(); ++k) {
    out.push_back(in[k]);
    if (in[k]->k != c::Stmt::K::For && in[k]->k != c::Stmt::K::Block) continue;
    std::set<std::string> w, r;
    stmt_access(in[k], w, r);
    bool needed = false;
    for (size_t j = k + 1; j < in.size() && !needed; ++j) {
      std::set<std::string> w2, r2;
      stmt_access(in[j], w2, r2);
      for (auto& name : w) {
        if (local_buffers.count(name) && r2.count(name)) needed = true;
      }
    }
    if (needed) out.push_back(c::barrier("CLK_LOCAL_MEM_FENCE"));
  }
  return out;
}

Kernel build_kernel(const Program& prog, const Phrase& stage2, CodegenOptions opts,
                    const std::string& name) {
  opts.target = Target::OpenCL;
  Kernel k;
  k.warnings = hierarchy_lint(stage2);
  HoistResult h{stage2, {}};
  if (!opts.allow_nested_alloc) h = hoist_allocations(stage2);
  k.buffers = h.buffers;
  std::vector<GenParam> ps;
  for (auto& p : prog.params) {
    auto role = p.type->k == PhraseTypeNode::K::Exp ? c::Param::Role::Input
                                                     : c::Param::Role::Output;
    ps.push_back(GenParam{p.name, p.type, role, "global"});
  }
  for (auto& b : h.buffers) {
    ps.push_back(GenParam{b.name, pt::var(b.type), c::Param::Role::Temp, b.space});
  }
  k.unit = codegen_function(name, prog.nats, ps, h.body, opts);
  std::set<std::string> locals;
  for (auto& p : k.unit.fn.params) {
    if (p.role == c::Param::Role::Temp && p.space == "local") locals.insert(p.name);
  }
  if (!locals.empty()) k.unit.fn.body = place_barriers(k.unit.fn.body, locals);
  return k;
}

std::string emit_kernel(const Kernel& k) { return render_unit(k.unit); }

ExecResult simulate_kernel(const Kernel& k, const Store& inputs, const NatEnv& sigma,
                           Launch launch, const ImpOptions& o) {
  return exec_c(k.unit, inputs, sigma, o, launch);
}

}  // namespace dpia
