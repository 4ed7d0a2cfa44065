#pragma once

// Abstract syntax for Core Elixir (typed lambda calculus with tuples,
// type-cases and pattern-guard cases) and for the FW-Elixir surface
// language it is lowered from.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fwx/types.hpp"

namespace fwx {

struct Span2 {
  int line = 0;
  int col = 0;
};

// ---------------------------------------------------------------------------
// Core patterns and guards

struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

struct Pattern {
  enum class K { Int, Atom, Var, Tuple, And } k;
  int64_t ival = 0;
  Atom aval = 0;
  std::string var;
  std::vector<PatternPtr> elems;  // Tuple
  PatternPtr left, right;         // And

  static PatternPtr mk_int(int64_t v) {
    auto p = std::make_shared<Pattern>();
    p->k = K::Int;
    p->ival = v;
    return p;
  }
  static PatternPtr mk_atom(Atom a) {
    auto p = std::make_shared<Pattern>();
    p->k = K::Atom;
    p->aval = a;
    return p;
  }
  static PatternPtr mk_var(std::string v) {
    auto p = std::make_shared<Pattern>();
    p->k = K::Var;
    p->var = std::move(v);
    return p;
  }
  static PatternPtr mk_tuple(std::vector<PatternPtr> es) {
    auto p = std::make_shared<Pattern>();
    p->k = K::Tuple;
    p->elems = std::move(es);
    return p;
  }
  static PatternPtr mk_and(PatternPtr l, PatternPtr r) {
    auto p = std::make_shared<Pattern>();
    p->k = K::And;
    p->left = std::move(l);
    p->right = std::move(r);
    return p;
  }
};

inline void pattern_vars(const PatternPtr& p, std::vector<std::string>& out) {
  switch (p->k) {
    case Pattern::K::Var: out.push_back(p->var); break;
    case Pattern::K::Tuple:
      for (const auto& e : p->elems) pattern_vars(e, out);
      break;
    case Pattern::K::And:
      pattern_vars(p->left, out);
      pattern_vars(p->right, out);
      break;
    default: break;
  }
}

struct GAtom;
using GAtomPtr = std::shared_ptr<const GAtom>;

struct GAtom {
  enum class K { Int, Atom, Var, Tuple, Proj, Size } k;
  int64_t ival = 0;
  Atom aval = 0;
  std::string var;
  std::vector<GAtomPtr> elems;  // Tuple
  GAtomPtr subject, index;      // Proj: elem(subject, index); Size: subject

  static GAtomPtr mk_int(int64_t v) {
    auto a = std::make_shared<GAtom>();
    a->k = K::Int;
    a->ival = v;
    return a;
  }
  static GAtomPtr mk_atom(Atom at) {
    auto a = std::make_shared<GAtom>();
    a->k = K::Atom;
    a->aval = at;
    return a;
  }
  static GAtomPtr mk_var(std::string v) {
    auto a = std::make_shared<GAtom>();
    a->k = K::Var;
    a->var = std::move(v);
    return a;
  }
  static GAtomPtr mk_tuple(std::vector<GAtomPtr> es) {
    auto a = std::make_shared<GAtom>();
    a->k = K::Tuple;
    a->elems = std::move(es);
    return a;
  }
  static GAtomPtr mk_proj(GAtomPtr subject, GAtomPtr index) {
    auto a = std::make_shared<GAtom>();
    a->k = K::Proj;
    a->subject = std::move(subject);
    a->index = std::move(index);
    return a;
  }
  static GAtomPtr mk_size(GAtomPtr subject) {
    auto a = std::make_shared<GAtom>();
    a->k = K::Size;
    a->subject = std::move(subject);
    return a;
  }
};

struct Guard;
using GuardPtr = std::shared_ptr<const Guard>;

struct Guard {
  enum class K { IsOf, Eq, Neq, And, Or } k;
  GAtomPtr a0, a1;
  Type test = Type::none();  // IsOf
  GuardPtr g0, g1;

  static GuardPtr mk_isof(GAtomPtr a, Type t) {
    auto g = std::make_shared<Guard>();
    g->k = K::IsOf;
    g->a0 = std::move(a);
    g->test = std::move(t);
    return g;
  }
  static GuardPtr mk_eq(GAtomPtr a, GAtomPtr b) {
    auto g = std::make_shared<Guard>();
    g->k = K::Eq;
    g->a0 = std::move(a);
    g->a1 = std::move(b);
    return g;
  }
  static GuardPtr mk_neq(GAtomPtr a, GAtomPtr b) {
    auto g = std::make_shared<Guard>();
    g->k = K::Neq;
    g->a0 = std::move(a);
    g->a1 = std::move(b);
    return g;
  }
  static GuardPtr mk_and(GuardPtr a, GuardPtr b) {
    auto g = std::make_shared<Guard>();
    g->k = K::And;
    g->g0 = std::move(a);
    g->g1 = std::move(b);
    return g;
  }
  static GuardPtr mk_or(GuardPtr a, GuardPtr b) {
    auto g = std::make_shared<Guard>();
    g->k = K::Or;
    g->g0 = std::move(a);
    g->g1 = std::move(b);
    return g;
  }
};

// ---------------------------------------------------------------------------
// Core expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct InterfaceArrow {
  std::vector<Type> dom;
  Type cod = Type::none();
};

struct TypeBranch {
  Type test = Type::none();
  ExprPtr body;
};

struct Clause {
  std::vector<PatternPtr> pats;  // one pattern per parameter
  GuardPtr guard;
  ExprPtr body;
};

struct Expr {
  enum class K {
    Int,
    Atom,
    Var,
    Lam,      // annotated, possibly multi-parameter
    PatLam,   // unannotated pattern-matching function
    App,
    Tuple,
    Proj,    // elem(subject, index)
    Size,
    Plus,
    TypeCase,
    PatCase,
  } k;
  Span2 span;
  int node_id = 0;  // stable identity for branch-attainability audits

  int64_t ival = 0;
  Atom aval = 0;
  std::string var;

  std::vector<InterfaceArrow> iface;
  std::vector<std::string> params;
  ExprPtr body;

  std::vector<Clause> clauses;  // PatLam clauses / PatCase branches

  ExprPtr fn;
  std::vector<ExprPtr> args;  // App arguments / Tuple elements

  ExprPtr a, b;  // Proj(subject=a, index=b), Plus(a,b), Size(a)

  ExprPtr scrut;
  std::vector<TypeBranch> tbranches;
};

inline int next_node_id() {
  static int id = 0;
  return ++id;
}

inline std::shared_ptr<Expr> mk_expr(Expr::K k, Span2 sp = {}) {
  auto e = std::make_shared<Expr>();
  e->k = k;
  e->span = sp;
  e->node_id = next_node_id();
  return e;
}

inline ExprPtr e_int(int64_t v, Span2 sp = {}) {
  auto e = mk_expr(Expr::K::Int, sp);
  e->ival = v;
  return e;
}
inline ExprPtr e_atom(Atom a, Span2 sp = {}) {
  auto e = mk_expr(Expr::K::Atom, sp);
  e->aval = a;
  return e;
}
inline ExprPtr e_var(std::string v, Span2 sp = {}) {
  auto e = mk_expr(Expr::K::Var, sp);
  e->var = std::move(v);
  return e;
}
inline ExprPtr e_lam(std::vector<InterfaceArrow> iface, std::vector<std::string> params,
                     ExprPtr body, Span2 sp = {}) {
  auto e = mk_expr(Expr::K::Lam, sp);
  e->iface = std::move(iface);
  e->params = std::move(params);
  e->body = std::move(body);
  return e;
}
inline ExprPtr e_patlam(std::vector<Clause> clauses, Span2 sp = {}) {
  auto e = mk_expr(Expr::K::PatLam, sp);
  e->clauses = std::move(clauses);
  return e;
}
inline ExprPtr e_app(ExprPtr fn, std::vector<ExprPtr> args, Span2 sp = {}) {
  auto e = mk_expr(Expr::K::App, sp);
  e->fn = std::move(fn);
  e->args = std::move(args);
  return e;
}
inline ExprPtr e_tuple(std::vector<ExprPtr> elems, Span2 sp = {}) {
  auto e = mk_expr(Expr::K::Tuple, sp);
  e->args = std::move(elems);
  return e;
}
inline ExprPtr e_proj(ExprPtr subject, ExprPtr index, Span2 sp = {}) {
  auto e = mk_expr(Expr::K::Proj, sp);
  e->a = std::move(subject);
  e->b = std::move(index);
  return e;
}
inline ExprPtr e_size(ExprPtr subject, Span2 sp = {}) {
  auto e = mk_expr(Expr::K::Size, sp);
  e->a = std::move(subject);
  return e;
}
inline ExprPtr e_plus(ExprPtr l, ExprPtr r, Span2 sp = {}) {
  auto e = mk_expr(Expr::K::Plus, sp);
  e->a = std::move(l);
  e->b = std::move(r);
  return e;
}
inline ExprPtr e_typecase(ExprPtr scrut, std::vector<TypeBranch> branches, Span2 sp = {}) {
  auto e = mk_expr(Expr::K::TypeCase, sp);
  e->scrut = std::move(scrut);
  e->tbranches = std::move(branches);
  return e;
}
inline ExprPtr e_patcase(ExprPtr scrut, std::vector<Clause> branches, Span2 sp = {}) {
  auto e = mk_expr(Expr::K::PatCase, sp);
  e->scrut = std::move(scrut);
  e->clauses = std::move(branches);
  return e;
}

// ---------------------------------------------------------------------------
// FW-Elixir surface syntax

struct FwExpr;
using FwExprPtr = std::shared_ptr<const FwExpr>;
struct FwGuard;
using FwGuardPtr = std::shared_ptr<const FwGuard>;

// selectors double as guard operands; checks are the is_* predicates
struct FwGuard {
  enum class K {
    SelInt,
    SelAtom,
    SelVar,
    SelTuple,
    SelElem,   // elem(sel, sel)
    SelSize,   // tuple_size(sel)
    IsInteger,
    IsAtom,
    IsBoolean,
    IsTuple,
    IsFunction,
    IsFunctionN,
    Not,
    And,
    Or,
    Eq,
    Neq,
  } k;
  Span2 span;
  int64_t ival = 0;
  Atom aval = 0;
  std::string var;
  std::vector<FwGuardPtr> elems;
  FwGuardPtr a, b;  // operands / selector arguments
  int64_t arity = 0;  // IsFunctionN

  static std::shared_ptr<FwGuard> mk(K k, Span2 sp = {}) {
    auto g = std::make_shared<FwGuard>();
    g->k = k;
    g->span = sp;
    return g;
  }
};

inline bool fw_is_selector(const FwGuard& g) {
  switch (g.k) {
    case FwGuard::K::SelInt:
    case FwGuard::K::SelAtom:
    case FwGuard::K::SelVar:
    case FwGuard::K::SelTuple:
    case FwGuard::K::SelElem:
    case FwGuard::K::SelSize: return true;
    default: return false;
  }
}

struct FwClause {
  std::vector<PatternPtr> pats;
  FwGuardPtr guard;  // may be null (no `when`)
  FwExprPtr body;
};

struct FwExpr {
  enum class K { Int, Atom, Var, Tuple, Fn, App, Plus, Case, Elem, Size } k;
  Span2 span;
  int64_t ival = 0;
  Atom aval = 0;
  std::string var;
  std::vector<FwExprPtr> elems;  // tuple / call args
  FwExprPtr fn, a, b;
  std::vector<FwClause> clauses;  // Fn / Case (Case scrutinee in `a`)

  static std::shared_ptr<FwExpr> mk(K k, Span2 sp = {}) {
    auto e = std::make_shared<FwExpr>();
    e->k = k;
    e->span = sp;
    return e;
  }
};

// a source file: named definitions (each possibly annotated) plus an
// optional trailing expression
struct FwDef {
  std::string name;
  std::optional<std::vector<InterfaceArrow>> iface;
  bool iface_dyn_under_neg = false;
  std::vector<FwClause> clauses;
  size_t arity = 0;
  Span2 span;
};

struct FwModule {
  std::vector<FwDef> defs;
  FwExprPtr main;  // may be null
};

}  // namespace fwx
