#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dpia/types.hpp"

namespace dpia::c {

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

// Selector applied to a variable: flattened array index, struct field x1/x2,
// or vector lane.
struct Step {
  enum class K { Index, Field, Lane };
  K k = K::Index;
  ExprP e;  // Index, Lane
  int field = 0;
};

struct Expr {
  enum class K { IntLit, NumLit, Var, Bin, Neg, Access, VLoad, VecLit };
  K k = K::IntLit;
  int64_t i = 0;
  double f = 0.0;
  bool fl = false;  // NumLit in float mode
  std::string name;  // Var, Access and VLoad base
  char op = '+';  // + - * / %
  ExprP a, b;
  std::vector<Step> steps;
  bool deref = false;  // scalar passed by pointer: *out
  int width = 0;  // VLoad, VecLit
  std::vector<ExprP> elems;  // VecLit
};

ExprP int_lit(int64_t v);
ExprP num_lit(double v, bool fl);
ExprP var(std::string name);
ExprP bin(char op, ExprP a, ExprP b);
ExprP neg(ExprP a);
ExprP access(std::string name, std::vector<Step> steps, bool deref = false);
ExprP vload(int width, ExprP offset, std::string base);
ExprP vec_lit(std::vector<ExprP> lanes);

Step index_step(ExprP e);
Step field_step(int f);
Step lane_step(ExprP e);

bool expr_equal(const ExprP& a, const ExprP& b);

struct Stmt;
using StmtP = std::shared_ptr<const Stmt>;

enum class LoopKind { Seq, Par, OmpPar, Global, Workgroup, Local };

struct Decl {
  std::string name;
  Data type;  // DPIA data type of the whole variable
  std::string space;  // "", "local", "global", "private"
  bool zero_init = false;
  bool heap = false;
};

struct Stmt {
  enum class K { Comment, Assign, VStore, Decl, Block, For, Barrier };
  K k = K::Comment;
  std::string text;  // Comment; Barrier fence flags
  ExprP lhs, rhs;  // Assign; VStore value is rhs, offset is lhs
  std::string base;  // VStore
  int width = 0;  // VStore
  c::Decl decl;
  std::vector<StmtP> body;  // Block, For
  LoopKind loop = LoopKind::Seq;
  std::string var;  // For
  ExprP bound;  // For
};

StmtP comment(std::string text);
StmtP assign(ExprP lhs, ExprP rhs);
StmtP vstore(int width, ExprP value, ExprP offset, std::string base);
StmtP declare(Decl d);
StmtP block(std::vector<StmtP> body);
StmtP loop(LoopKind k, std::string var, ExprP bound, std::vector<StmtP> body);
StmtP barrier(std::string fence);

struct Param {
  std::string name;
  std::string source;  // DPIA identifier or nat variable
  Data type;  // DPIA data type; int size parameters have type idx
  enum class Role { Output, Input, Temp, Size } role = Role::Input;
  std::string space;  // OpenCL address space of pointer parameters
};

struct Function {
  std::string name;
  std::vector<Param> params;
  std::vector<StmtP> body;
};

}  // namespace dpia::c
