#include "dpia/cast.hpp"

namespace dpia::c {

namespace {
std::shared_ptr<Expr> mk(Expr::K k) {
  auto e = std::make_shared<Expr>();
  e->k = k;
  return e;
}
std::shared_ptr<Stmt> mks(Stmt::K k) {
  auto s = std::make_shared<Stmt>();
  s->k = k;
  return s;
}
}  // namespace

ExprP int_lit(int64_t v) {
  auto e = mk(Expr::K::IntLit);
  e->i = v;
  return e;
}

ExprP num_lit(double v, bool fl) {
  auto e = mk(Expr::K::NumLit);
  e->f = v;
  e->i = static_cast<int64_t>(v);
  e->fl = fl;
  return e;
}

ExprP var(std::string name) {
  auto e = mk(Expr::K::Var);
  e->name = std::move(name);
  return e;
}

ExprP bin(char op, ExprP a, ExprP b) {
  auto e = mk(Expr::K::Bin);
  e->op = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ExprP neg(ExprP a) {
  auto e = mk(Expr::K::Neg);
  e->a = std::move(a);
  return e;
}

ExprP access(std::string name, std::vector<Step> steps, bool deref) {
  auto e = mk(Expr::K::Access);
  e->name = std::move(name);
  e->steps = std::move(steps);
  e->deref = deref;
  return e;
}

ExprP vload(int width, ExprP offset, std::string base) {
  auto e = mk(Expr::K::VLoad);
  e->width = width;
  e->a = std::move(offset);
  e->name = std::move(base);
  return e;
}

ExprP vec_lit(std::vector<ExprP> lanes) {
  auto e = mk(Expr::K::VecLit);
  e->width = static_cast<int>(lanes.size());
  e->elems = std::move(lanes);
  return e;
}

Step index_step(ExprP e) { return Step{Step::K::Index, std::move(e), 0}; }
Step field_step(int f) { return Step{Step::K::Field, nullptr, f}; }
Step lane_step(ExprP e) { return Step{Step::K::Lane, std::move(e), 0}; }

bool expr_equal(const ExprP& a, const ExprP& b) {
  if (a == b) return true;
  if (!a || !b || a->k != b->k) return false;
  switch (a->k) {
    case Expr::K::IntLit:
      return a->i == b->i;
    case Expr::K::NumLit:
      return a->f == b->f && a->fl == b->fl;
    case Expr::K::Var:
      return a->name == b->name;
    case Expr::K::Bin:
      return a->op == b->op && expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
    case Expr::K::Neg:
      return expr_equal(a->a, b->a);
    case Expr::K::Access:
      if (a->name != b->name || a->deref != b->deref || a->steps.size() != b->steps.size()) {
        return false;
      }
      for (size_t i = 0; i < a->steps.size(); ++i) {
        const Step &x = a->steps[i], &y = b->steps[i];
        if (x.k != y.k || x.field != y.field || !expr_equal(x.e, y.e)) return false;
      }
      return true;
    case Expr::K::VLoad:
      return a->width == b->width && a->name == b->name && expr_equal(a->a, b->a);
    case Expr::K::VecLit:
      if (a->elems.size() != b->elems.size()) return false;
      for (size_t i = 0; i < a->elems.size(); ++i) {
        if (!expr_equal(a->elems[i], b->elems[i])) return false;
      }
      return true;
  }
  return false;
}

StmtP comment(std::string text) {
  auto s = mks(Stmt::K::Comment);
  s->text = std::move(text);
  return s;
}

StmtP assign(ExprP lhs, ExprP rhs) {
  auto s = mks(Stmt::K::Assign);
  s->lhs = std::move(lhs);
  s->rhs = std::move(rhs);
  return s;
}

StmtP vstore(int width, ExprP value, ExprP offset, std::string base) {
  auto s = mks(Stmt::K::VStore);
  s->width = width;
  s->rhs = std::move(value);
  s->lhs = std::move(offset);
  s->base = std::move(base);
  return s;
}

StmtP declare(Decl d) {
  auto s = mks(Stmt::K::Decl);
  s->decl = std::move(d);
  return s;
}

StmtP block(std::vector<StmtP> body) {
  auto s = mks(Stmt::K::Block);
  s->body = std::move(body);
  return s;
}

StmtP loop(LoopKind k, std::string var, ExprP bound, std::vector<StmtP> body) {
  auto s = mks(Stmt::K::For);
  s->loop = k;
  s->var = std::move(var);
  s->bound = std::move(bound);
  s->body = std::move(body);
  return s;
}

StmtP barrier(std::string fence) {
  auto s = mks(Stmt::K::Barrier);
  s->text = std::move(fence);
  return s;
}

}  // namespace dpia::c
