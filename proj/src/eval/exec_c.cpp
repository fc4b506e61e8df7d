#include "dpia/error.hpp"
#include "dpia/eval_imp.hpp"

namespace dpia {

using DK = DataTypeNode::K;
using c::Expr;
using c::ExprP;
using c::Stmt;
using c::StmtP;

namespace {

bool flat_layer(const Data& d, Target t) {
  return d->k == DK::Array || (d->k == DK::Vec && t != Target::OpenCL);
}

Value convert_elem(const Value& v, const Data& d, Target t);

void flatten(const Value& v, const Data& d, Target t, std::vector<Value>& out) {
  if (flat_layer(d, t)) {
    Data elem = d->k == DK::Array ? d->a : dt::num();
    for (auto& x : v.xs) flatten(x, elem, t, out);
    return;
  }
  out.push_back(convert_elem(v, d, t));
}

Value convert_elem(const Value& v, const Data& d, Target t) {
  if (d->k == DK::Pair) {
    return value_pair(to_c_layout(v.xs.at(0), d->a, t), to_c_layout(v.xs.at(1), d->b, t));
  }
  return v;
}

Value unconvert_elem(const Value& v, const Data& d, const NatEnv& sigma, Target t) {
  if (d->k == DK::Pair) {
    return value_pair(from_c_layout(v.xs.at(0), d->a, sigma, t),
                      from_c_layout(v.xs.at(1), d->b, sigma, t));
  }
  return v;
}

Value unflatten(const std::vector<Value>& flat, size_t& pos, const Data& d,
                const NatEnv& sigma, Target t) {
  if (d->k == DK::Array) {
    uint64_t n = nat_eval(d->size, sigma);
    std::vector<Value> xs;
    for (uint64_t i = 0; i < n; ++i) xs.push_back(unflatten(flat, pos, d->a, sigma, t));
    return value_array(std::move(xs));
  }
  if (d->k == DK::Vec && t != Target::OpenCL) {
    std::vector<Value> xs;
    for (int i = 0; i < d->width; ++i) xs.push_back(flat.at(pos++));
    return value_vec(std::move(xs));
  }
  return unconvert_elem(flat.at(pos++), d, sigma, t);
}

}  // namespace

Value to_c_layout(const Value& v, const Data& d, Target t) {
  if (!flat_layer(d, t)) return convert_elem(v, d, t);
  std::vector<Value> flat;
  flatten(v, d, t, flat);
  return value_array(std::move(flat));
}

Value from_c_layout(const Value& v, const Data& d, const NatEnv& sigma, Target t) {
  if (!flat_layer(d, t)) return unconvert_elem(v, d, sigma, t);
  size_t pos = 0;
  return unflatten(v.xs, pos, d, sigma, t);
}

namespace {

class CExec {
 public:
  CExec(const CUnit& u, const NatEnv& sigma, const ImpOptions& o, Launch l)
      : u_(u), sigma_(sigma), o_(o), launch_(l) {}

  ExecResult run(const Store& inputs) {
    Target t = u_.opts.target;
    for (auto& p : u_.fn.params) {
      if (p.role == c::Param::Role::Size) {
        auto it = sigma_.find(p.source);
        if (it == sigma_.end()) internal_error("exec_c: no value for size " + p.source);
        ints_[p.name] = static_cast<int64_t>(it->second);
        continue;
      }
      auto it = inputs.find(p.source);
      Value v = it != inputs.end() ? it->second : zero_value(p.type, sigma_, o_.mode);
      cells_[p.name] = to_c_layout(v, p.type, t);
      vars_[p.name] = p.name;
      space_[p.name] = p.space;
    }
    block(u_.fn.body);
    ExecResult r;
    for (auto& p : u_.fn.params) {
      if (p.role == c::Param::Role::Size) continue;
      r.store[p.source] = from_c_layout(cells_.at(p.name), p.type, sigma_, t);
    }
    r.races = std::move(races_);
    r.parallel_loops = parallel_loops_;
    return r;
  }

 private:
  struct Frame {
    std::string loop;
    c::LoopKind kind;
    std::vector<std::set<LeafAddress>> its;
    size_t cur = 0;
  };

  const CUnit& u_;
  const NatEnv& sigma_;
  ImpOptions o_;
  Launch launch_;
  std::map<std::string, Value> cells_;
  std::map<std::string, std::string> vars_;  // C name -> cell
  std::map<std::string, std::string> space_;  // cell -> address space
  std::map<std::string, int64_t> ints_;
  std::vector<Frame> frames_;
  std::vector<RaceViolation> races_;
  size_t parallel_loops_ = 0;
  int counter_ = 0;

  int64_t as_int(const Value& v) {
    return v.k == Value::K::Idx ? v.i : (v.fl ? static_cast<int64_t>(v.f) : v.i);
  }

  Value* locate(const ExprP& e, LeafAddress& addr) {
    auto vit = vars_.find(e->name);
    if (vit == vars_.end()) internal_error("exec_c: undeclared variable " + e->name);
    addr.cell = vit->second;
    Value* v = &cells_.at(vit->second);
    for (auto& s : e->steps) {
      int64_t ix = s.k == c::Step::K::Field ? s.field - 1 : as_int(eval(s.e));
      if (ix < 0 || static_cast<size_t>(ix) >= v->xs.size()) {
        internal_error("exec_c: out-of-bounds access " + std::to_string(ix) + " in " + e->name);
      }
      addr.path.push_back(s.k == c::Step::K::Field ? -s.field : ix);
      v = &v->xs[static_cast<size_t>(ix)];
    }
    return v;
  }

  void record(const LeafAddress& a) {
    bool local = space_[a.cell] == "local";
    for (auto& f : frames_) {
      // Each work-group owns its local memory; the buffer is reused by the
      // successive iterations a group executes.
      if (local && f.kind == c::LoopKind::Workgroup) continue;
      f.its[f.cur].insert(a);
    }
  }

  void store_leaf(Value* slot, const LeafAddress& a, const Value& v) {
    if (slot->k == Value::K::Vec && v.k == Value::K::Vec) {
      for (size_t k = 0; k < slot->xs.size(); ++k) {
        slot->xs[k] = v.xs.at(k);
        LeafAddress ak = a;
        ak.path.push_back(static_cast<int64_t>(k));
        record(ak);
      }
      return;
    }
    *slot = v;
    record(a);
  }

  Value eval(const ExprP& e) {
    switch (e->k) {
      case Expr::K::IntLit:
        return value_idx(e->i);
      case Expr::K::NumLit:
        return e->fl ? value_numf(e->f) : value_num(e->i);
      case Expr::K::Var: {
        auto it = ints_.find(e->name);
        if (it == ints_.end()) internal_error("exec_c: unknown int variable " + e->name);
        return value_idx(it->second);
      }
      case Expr::K::Bin: {
        Value a = eval(e->a), b = eval(e->b);
        if (a.k == Value::K::Idx && b.k == Value::K::Idx) {
          int64_t x = a.i, y = b.i;
          switch (e->op) {
            case '+':
              return value_idx(x + y);
            case '-':
              return value_idx(x - y);
            case '*':
              return value_idx(x * y);
            case '/':
            case '%':
              if (y == 0) internal_error("exec_c: index division by zero");
              return value_idx(e->op == '/' ? x / y : x % y);
          }
        }
        return value_arith(std::string(1, e->op), a, b);
      }
      case Expr::K::Neg: {
        Value a = eval(e->a);
        if (a.k == Value::K::Idx) return value_idx(-a.i);
        return value_negate(a);
      }
      case Expr::K::Access: {
        LeafAddress a;
        return *locate(e, a);
      }
      case Expr::K::VLoad: {
        auto vit = vars_.find(e->name);
        if (vit == vars_.end()) internal_error("exec_c: undeclared variable " + e->name);
        const Value& base = cells_.at(vit->second);
        int64_t off = as_int(eval(e->a)) * e->width;
        std::vector<Value> lanes;
        for (int k = 0; k < e->width; ++k) {
          int64_t ix = off + k;
          if (ix < 0 || static_cast<size_t>(ix) >= base.xs.size()) {
            internal_error("exec_c: out-of-bounds vload in " + e->name);
          }
          lanes.push_back(base.xs[static_cast<size_t>(ix)]);
        }
        return value_vec(std::move(lanes));
      }
      case Expr::K::VecLit: {
        std::vector<Value> lanes;
        for (auto& x : e->elems) lanes.push_back(eval(x));
        return value_vec(std::move(lanes));
      }
    }
    internal_error("exec_c: bad expression");
  }

  int64_t bound(const ExprP& e) { return as_int(eval(e)); }

  void block(const std::vector<StmtP>& body) {
    std::vector<std::pair<std::string, std::optional<std::string>>> declared;
    for (auto& s : body) stmt(*s, declared);
    for (auto it = declared.rbegin(); it != declared.rend(); ++it) {
      cells_.erase(vars_[it->first]);
      if (it->second) vars_[it->first] = *it->second;
      else vars_.erase(it->first);
    }
  }

  void body_with_var(const Stmt& s, int64_t v) {
    auto saved = ints_.find(s.var) != ints_.end() ? std::optional<int64_t>(ints_[s.var])
                                                  : std::nullopt;
    ints_[s.var] = v;
    block(s.body);
    if (saved) ints_[s.var] = *saved;
    else ints_.erase(s.var);
  }

  void parallel(const Stmt& s, int64_t n, const std::vector<int64_t>& order) {
    ++parallel_loops_;
    frames_.push_back(Frame{s.var, s.loop, std::vector<std::set<LeafAddress>>(n), 0});
    for (int64_t v : order) {
      frames_.back().cur = static_cast<size_t>(v);
      body_with_var(s, v);
    }
    if (auto r = check_race(frames_.back().its, s.var)) races_.push_back(*r);
    frames_.pop_back();
  }

  // Iteration order of an id-stride loop: every id in turn, each striding
  // through its share of the range.
  std::vector<int64_t> stride_order(int64_t n, int64_t ids) {
    std::vector<int64_t> order;
    for (int64_t id = 0; id < ids; ++id) {
      int64_t first = o_.reverse_parfor ? ids - 1 - id : id;
      for (int64_t v = first; v < n; v += ids) order.push_back(v);
    }
    return order;
  }

  void stmt(const Stmt& s, std::vector<std::pair<std::string, std::optional<std::string>>>& declared) {
    switch (s.k) {
      case Stmt::K::Comment:
      case Stmt::K::Barrier:
        return;
      case Stmt::K::Assign: {
        Value v = eval(s.rhs);
        LeafAddress a;
        Value* slot = locate(s.lhs, a);
        store_leaf(slot, a, v);
        return;
      }
      case Stmt::K::VStore: {
        Value v = eval(s.rhs);
        auto vit = vars_.find(s.base);
        if (vit == vars_.end()) internal_error("exec_c: undeclared variable " + s.base);
        Value& base = cells_.at(vit->second);
        int64_t off = as_int(eval(s.lhs)) * s.width;
        for (int k = 0; k < s.width; ++k) {
          int64_t ix = off + k;
          if (ix < 0 || static_cast<size_t>(ix) >= base.xs.size()) {
            internal_error("exec_c: out-of-bounds vstore in " + s.base);
          }
          base.xs[static_cast<size_t>(ix)] = v.xs.at(static_cast<size_t>(k));
          record(LeafAddress{vit->second, {ix}});
        }
        return;
      }
      case Stmt::K::Decl: {
        const c::Decl& d = s.decl;
        std::string cell = d.name + "#" + std::to_string(++counter_);
        cells_[cell] = to_c_layout(zero_value(d.type, sigma_, o_.mode), d.type, u_.opts.target);
        space_[cell] = d.space;
        auto it = vars_.find(d.name);
        declared.push_back({d.name, it != vars_.end() ? std::optional<std::string>(it->second)
                                                      : std::nullopt});
        vars_[d.name] = cell;
        return;
      }
      case Stmt::K::Block:
        block(s.body);
        return;
      case Stmt::K::For: {
        int64_t n = bound(s.bound);
        switch (s.loop) {
          case c::LoopKind::Seq:
            for (int64_t v = 0; v < n; ++v) body_with_var(s, v);
            return;
          case c::LoopKind::Par:
          case c::LoopKind::OmpPar: {
            std::vector<int64_t> order;
            for (int64_t v = 0; v < n; ++v) order.push_back(o_.reverse_parfor ? n - 1 - v : v);
            parallel(s, n, order);
            return;
          }
          case c::LoopKind::Workgroup:
            parallel(s, n, stride_order(n, launch_.groups));
            return;
          case c::LoopKind::Local:
            parallel(s, n, stride_order(n, launch_.local));
            return;
          case c::LoopKind::Global:
            parallel(s, n, stride_order(n, static_cast<int64_t>(launch_.groups) * launch_.local));
            return;
        }
        return;
      }
    }
  }
};

}  // namespace

ExecResult exec_c(const CUnit& u, const Store& inputs, const NatEnv& sigma, const ImpOptions& o,
                  Launch launch) {
  if (launch.groups <= 0 || launch.local <= 0) internal_error("launch sizes must be positive");
  return CExec(u, sigma, o, launch).run(inputs);
}

}  // namespace dpia
