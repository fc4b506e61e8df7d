#include <cstdio>
#include <sstream>

#include "dpia/codegen.hpp"
#include "dpia/error.hpp"

namespace dpia {

using c::Expr;
using c::ExprP;
using c::Stmt;
using c::StmtP;

namespace {

std::string scalar_type(const CodegenOptions& o) {
  return o.mode == NumMode::Float ? "float" : "long";
}

std::string float_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s + "f";
}

std::string lane_name(int64_t k) {
  static const char* digits = "0123456789abcdef";
  return std::string(".s") + digits[k & 15];
}

std::string expr(const ExprP& e, const CodegenOptions& o, bool top);

std::string access_text(const ExprP& e, const CodegenOptions& o) {
  std::string s = e->deref ? (e->steps.empty() ? "*" + e->name : "(*" + e->name + ")") : e->name;
  for (auto& st : e->steps) {
    switch (st.k) {
      case c::Step::K::Index:
        s += "[" + expr(st.e, o, true) + "]";
        break;
      case c::Step::K::Field:
        s += ".x" + std::to_string(st.field);
        break;
      case c::Step::K::Lane:
        if (st.e->k == Expr::K::IntLit) s += lane_name(st.e->i);
        else s = "((" + scalar_type(o) + "*)&" + s + ")[" + expr(st.e, o, true) + "]";
        break;
    }
  }
  return s;
}

std::string expr(const ExprP& e, const CodegenOptions& o, bool top) {
  switch (e->k) {
    case Expr::K::IntLit:
      return std::to_string(e->i);
    case Expr::K::NumLit:
      return e->fl ? float_text(e->f) : std::to_string(e->i);
    case Expr::K::Var:
      return e->name;
    case Expr::K::Bin: {
      std::string s = expr(e->a, o, false) + " " + e->op + " " + expr(e->b, o, false);
      return top ? s : "(" + s + ")";
    }
    case Expr::K::Neg:
      return "-" + expr(e->a, o, false);
    case Expr::K::Access:
      return access_text(e, o);
    case Expr::K::VLoad:
      return "vload" + std::to_string(e->width) + "(" + expr(e->a, o, true) + ", " + e->name + ")";
    case Expr::K::VecLit: {
      std::string s = "(" + scalar_type(o) + std::to_string(e->width) + ")(";
      for (size_t i = 0; i < e->elems.size(); ++i) {
        if (i) s += ", ";
        s += expr(e->elems[i], o, true);
      }
      return s + ")";
    }
  }
  return "?";
}

class Renderer {
 public:
  explicit Renderer(const CUnit& u) : u_(u), o_(u.opts) {
    for (auto& p : u.fn.params) {
      if (p.role == c::Param::Role::Size) names_[p.source] = p.name;
    }
  }

  std::string run() {
    if (o_.target == Target::COpenMP && o_.heap) out_ << "#include <stdlib.h>\n\n";
    for (auto& d : u_.structs) {
      out_ << "typedef struct {\n";
      out_ << "  " << member(d->a, "x1") << ";\n";
      out_ << "  " << member(d->b, "x2") << ";\n";
      out_ << "} " << mangle_data(d) << ";\n\n";
    }
    if (o_.target == Target::OpenCL) out_ << "kernel void " << u_.fn.name << "(";
    else out_ << "void " << u_.fn.name << "(";
    for (size_t i = 0; i < u_.fn.params.size(); ++i) {
      if (i) out_ << ", ";
      out_ << param(u_.fn.params[i]);
    }
    out_ << ") {\n";
    stmts(u_.fn.body, 1);
    out_ << "}\n";
    return out_.str();
  }

 private:
  const CUnit& u_;
  const CodegenOptions& o_;
  std::map<std::string, std::string> names_;
  std::ostringstream out_;
  int zero_counter_ = 0;

  std::string size_text(const std::vector<Nat>& dims) {
    Nat n(1);
    for (auto& d : dims) n = n * d;
    return expr(c::simplify_index(nat_to_cexpr(nat_normalize(n), names_), {}), o_, true);
  }

  std::string member(const Data& d, const std::string& name) {
    Layout l = storage_layout(d, o_.target);
    std::string s = c_elem_type(l.elem, o_) + " " + name;
    if (!l.dims.empty()) s += "[" + size_text(l.dims) + "]";
    return s;
  }

  std::string param(const c::Param& p) {
    if (p.role == c::Param::Role::Size) return "int " + p.name;
    Layout l = storage_layout(p.type, o_.target);
    std::string t = c_elem_type(l.elem, o_);
    std::string space = o_.target == Target::OpenCL && !p.space.empty() ? p.space + " " : "";
    if (p.role == c::Param::Role::Input) {
      if (l.dims.empty()) return "const " + t + " " + p.name;
      return "const " + space + t + "* restrict " + p.name;
    }
    return space + t + "* " + p.name;
  }

  std::string zero_of(const Data& elem) {
    std::string t = c_elem_type(elem, o_);
    if (elem->k == DataTypeNode::K::Pair) return "(" + t + "){0}";
    if (elem->k == DataTypeNode::K::Vec) return "(" + t + ")(0)";
    if (elem->k == DataTypeNode::K::Num && o_.mode == NumMode::Float) return "0.0f";
    return "0";
  }

  void indent(int d) {
    for (int i = 0; i < d; ++i) out_ << "  ";
  }

  void decl(const c::Decl& d, int depth, std::vector<std::string>& frees) {
    Layout l = storage_layout(d.type, o_.target);
    std::string t = c_elem_type(l.elem, o_);
    std::string space = o_.target == Target::OpenCL && !d.space.empty() ? d.space + " " : "";
    indent(depth);
    if (l.dims.empty()) {
      out_ << space << t << " " << d.name;
      if (d.zero_init) out_ << " = " << zero_of(l.elem);
      out_ << ";\n";
      return;
    }
    std::string size = size_text(l.dims);
    if (d.heap && o_.target != Target::OpenCL) {
      const char* fn = d.zero_init ? "calloc" : "malloc";
      out_ << t << "* " << d.name << " = (" << t << "*)" << fn << "(" << size
           << ", sizeof(" << t << "));\n";
      frees.push_back(d.name);
      return;
    }
    out_ << space << t << " " << d.name << "[" << size << "];\n";
    if (d.zero_init) {
      std::string z = "z" + std::to_string(++zero_counter_);
      indent(depth);
      out_ << "for (int " << z << " = 0; " << z << " < " << size << "; " << z << " += 1) "
           << d.name << "[" << z << "] = " << zero_of(l.elem) << ";\n";
    }
  }

  void loop_header(const Stmt& s, int depth) {
    std::string v = s.var, n = expr(s.bound, o_, true);
    auto strided = [&](const char* id, const char* size) {
      return "for (int " + v + " = " + id + "(0); " + v + " < " + n + "; " + v + " += " + size +
             "(0)) {\n";
    };
    switch (s.loop) {
      case c::LoopKind::OmpPar:
        indent(depth);
        out_ << "#pragma omp parallel for\n";
        [[fallthrough]];
      case c::LoopKind::Seq:
        indent(depth);
        out_ << "for (int " << v << " = 0; " << v << " < " << n << "; " << v << " += 1) {\n";
        break;
      case c::LoopKind::Par:
        indent(depth);
        out_ << "parfor (int " << v << " = 0; " << v << " < " << n << "; " << v << " += 1) {\n";
        break;
      case c::LoopKind::Global:
        indent(depth);
        out_ << strided("get_global_id", "get_global_size");
        break;
      case c::LoopKind::Workgroup:
        indent(depth);
        out_ << strided("get_group_id", "get_num_groups");
        break;
      case c::LoopKind::Local:
        indent(depth);
        out_ << strided("get_local_id", "get_local_size");
        break;
    }
  }

  void stmts(const std::vector<StmtP>& ss, int depth) {
    std::vector<std::string> frees;
    for (auto& s : ss) stmt(*s, depth, frees);
    for (auto& f : frees) {
      indent(depth);
      out_ << "free(" << f << ");\n";
    }
  }

  void stmt(const Stmt& s, int depth, std::vector<std::string>& frees) {
    switch (s.k) {
      case Stmt::K::Comment:
        indent(depth);
        out_ << "/* " << s.text << " */\n";
        break;
      case Stmt::K::Assign:
        indent(depth);
        out_ << expr(s.lhs, o_, true) << " = " << expr(s.rhs, o_, true) << ";\n";
        break;
      case Stmt::K::VStore:
        indent(depth);
        out_ << "vstore" << s.width << "(" << expr(s.rhs, o_, true) << ", "
             << expr(s.lhs, o_, true) << ", " << s.base << ");\n";
        break;
      case Stmt::K::Decl:
        decl(s.decl, depth, frees);
        break;
      case Stmt::K::Block:
        indent(depth);
        out_ << "{\n";
        stmts(s.body, depth + 1);
        indent(depth);
        out_ << "}\n";
        break;
      case Stmt::K::For:
        loop_header(s, depth);
        stmts(s.body, depth + 1);
        indent(depth);
        out_ << "}\n";
        break;
      case Stmt::K::Barrier:
        indent(depth);
        out_ << "barrier(" << s.text << ");\n";
        break;
    }
  }
};

}  // namespace

std::string render_expr(const ExprP& e, const CodegenOptions& opts) { return expr(e, opts, true); }

std::string render_unit(const CUnit& u) { return Renderer(u).run(); }

}  // namespace dpia
