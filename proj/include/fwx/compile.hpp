#pragma once

// FW-Elixir to Core Elixir: the mutually recursive guard compilation
// (negation elimination), expression skeletons, and multi-clause lowering.

#include <string>
#include <vector>

#include "fwx/ast.hpp"
#include "fwx/parser.hpp"
#include "fwx/types.hpp"

namespace fwx {

// ---------------------------------------------------------------------------
// Guard compilation

inline GAtomPtr compile_selector(const FwGuardPtr& d) {
  switch (d->k) {
    case FwGuard::K::SelInt: return GAtom::mk_int(d->ival);
    case FwGuard::K::SelAtom: return GAtom::mk_atom(d->aval);
    case FwGuard::K::SelVar: return GAtom::mk_var(d->var);
    case FwGuard::K::SelTuple: {
      std::vector<GAtomPtr> es;
      for (const auto& e : d->elems) es.push_back(compile_selector(e));
      return GAtom::mk_tuple(std::move(es));
    }
    case FwGuard::K::SelElem:
      return GAtom::mk_proj(compile_selector(d->a), compile_selector(d->b));
    case FwGuard::K::SelSize: return GAtom::mk_size(compile_selector(d->a));
    default: throw std::logic_error("compile_selector: not a selector");
  }
}

inline Type check_test_type(const FwGuard& c) {
  switch (c.k) {
    case FwGuard::K::IsInteger: return t_int();
    case FwGuard::K::IsAtom: return t_atom();
    case FwGuard::K::IsBoolean: return t_bool();
    case FwGuard::K::IsTuple: return t_tuple();
    case FwGuard::K::IsFunction: return t_fun();
    case FwGuard::K::IsFunctionN: return t_fun_n(static_cast<size_t>(c.arity));
    default: throw std::logic_error("check_test_type: not a check");
  }
}

inline GuardPtr compile_guard(const FwGuardPtr& g);
inline GuardPtr compile_neg_guard(const FwGuardPtr& g);

inline GuardPtr compile_guard(const FwGuardPtr& g) {
  if (fw_is_selector(*g))
    return Guard::mk_isof(compile_selector(g), t_atom_singleton(atom_true));
  switch (g->k) {
    case FwGuard::K::IsInteger:
    case FwGuard::K::IsAtom:
    case FwGuard::K::IsBoolean:
    case FwGuard::K::IsTuple:
    case FwGuard::K::IsFunction:
    case FwGuard::K::IsFunctionN:
      return Guard::mk_isof(compile_selector(g->a), check_test_type(*g));
    case FwGuard::K::And:
      return Guard::mk_and(compile_guard(g->a), compile_guard(g->b));
    case FwGuard::K::Or:
      return Guard::mk_or(compile_guard(g->a), compile_guard(g->b));
    case FwGuard::K::Not: return compile_neg_guard(g->a);
    case FwGuard::K::Eq:
      return Guard::mk_eq(compile_selector(g->a), compile_selector(g->b));
    case FwGuard::K::Neq:
      return Guard::mk_neq(compile_selector(g->a), compile_selector(g->b));
    default: throw std::logic_error("compile_guard: unreachable");
  }
}

inline GuardPtr compile_neg_guard(const FwGuardPtr& g) {
  if (fw_is_selector(*g))
    return Guard::mk_isof(compile_selector(g), t_atom_singleton(atom_false));
  switch (g->k) {
    case FwGuard::K::IsInteger:
    case FwGuard::K::IsAtom:
    case FwGuard::K::IsBoolean:
    case FwGuard::K::IsTuple:
    case FwGuard::K::IsFunction:
    case FwGuard::K::IsFunctionN:
      return Guard::mk_isof(compile_selector(g->a), t_neg(check_test_type(*g)));
    case FwGuard::K::And:
      return Guard::mk_or(compile_neg_guard(g->a), compile_neg_guard(g->b));
    case FwGuard::K::Or:
      return Guard::mk_and(compile_neg_guard(g->a), compile_neg_guard(g->b));
    case FwGuard::K::Not: return compile_guard(g->a);
    case FwGuard::K::Eq:
      return Guard::mk_neq(compile_selector(g->a), compile_selector(g->b));
    case FwGuard::K::Neq:
      return Guard::mk_eq(compile_selector(g->a), compile_selector(g->b));
    default: throw std::logic_error("compile_neg_guard: unreachable");
  }
}

// ---------------------------------------------------------------------------
// Skeletons and lowering

inline int& fresh_counter() {
  static int n = 0;
  return n;
}
inline std::string fresh_var(const std::string& stem) {
  return "_" + stem + std::to_string(++fresh_counter());
}

// the pattern mirroring an expression's tuple-and-variable structure;
// anything else becomes a fresh wildcard
inline PatternPtr skeleton(const ExprPtr& e) {
  switch (e->k) {
    case Expr::K::Var: return Pattern::mk_var(e->var);
    case Expr::K::Tuple: {
      std::vector<PatternPtr> elems;
      for (const auto& x : e->args) elems.push_back(skeleton(x));
      return Pattern::mk_tuple(std::move(elems));
    }
    default: return Pattern::mk_var(fresh_var("sk"));
  }
}

struct Module {
  struct Def {
    std::string name;
    ExprPtr expr;
    bool annotated = false;
    bool iface_dyn_under_neg = false;
    Span2 span;
  };
  std::vector<Def> defs;
  ExprPtr main;
};

namespace detail {

// clauses without `when` get the trivially-true guard on the clause's
// first variable, or on a fresh conjoined wildcard when it binds none
inline void ensure_guard(Clause& cl) {
  if (cl.guard) return;
  std::vector<std::string> vars;
  for (const auto& p : cl.pats) pattern_vars(p, vars);
  if (!vars.empty()) {
    cl.guard = Guard::mk_isof(GAtom::mk_var(vars.front()), Type::any());
    return;
  }
  if (cl.pats.empty()) {
    // a zero-arity clause: nothing to test
    cl.guard = Guard::mk_isof(GAtom::mk_int(0), Type::any());
    return;
  }
  std::string w = fresh_var("w");
  cl.pats[0] = Pattern::mk_and(cl.pats[0], Pattern::mk_var(w));
  cl.guard = Guard::mk_isof(GAtom::mk_var(w), Type::any());
}

}  // namespace detail

inline ExprPtr lower(const FwExprPtr& e);

inline Clause lower_clause(const FwClause& c) {
  Clause cl;
  cl.pats = c.pats;
  if (c.guard) cl.guard = compile_guard(c.guard);
  cl.body = lower(c.body);
  detail::ensure_guard(cl);
  return cl;
}

inline ExprPtr lower(const FwExprPtr& e) {
  switch (e->k) {
    case FwExpr::K::Int: return e_int(e->ival, e->span);
    case FwExpr::K::Atom: return e_atom(e->aval, e->span);
    case FwExpr::K::Var: return e_var(e->var, e->span);
    case FwExpr::K::Tuple: {
      std::vector<ExprPtr> es;
      for (const auto& x : e->elems) es.push_back(lower(x));
      return e_tuple(std::move(es), e->span);
    }
    case FwExpr::K::Elem: return e_proj(lower(e->a), lower(e->b), e->span);
    case FwExpr::K::Size: return e_size(lower(e->a), e->span);
    case FwExpr::K::Plus: return e_plus(lower(e->a), lower(e->b), e->span);
    case FwExpr::K::App: {
      std::vector<ExprPtr> args;
      for (const auto& x : e->elems) args.push_back(lower(x));
      return e_app(lower(e->fn), std::move(args), e->span);
    }
    case FwExpr::K::Fn: {
      std::vector<Clause> clauses;
      for (const auto& c : e->clauses) clauses.push_back(lower_clause(c));
      return e_patlam(std::move(clauses), e->span);
    }
    case FwExpr::K::Case: {
      ExprPtr scrut = lower(e->a);
      std::vector<Clause> clauses;
      for (const auto& c : e->clauses) {
        Clause cl = lower_clause(c);
        // conjoin the scrutinee's skeleton so guard narrowing reaches
        // the matched expression's variables
        cl.pats[0] = Pattern::mk_and(skeleton(scrut), cl.pats[0]);
        clauses.push_back(std::move(cl));
      }
      return e_patcase(std::move(scrut), std::move(clauses), e->span);
    }
  }
  throw std::logic_error("lower: unreachable");
}

// an annotated definition becomes an annotated lambda over fresh
// parameters whose body matches the parameter tuple against the clauses
inline ExprPtr lower_def(const FwDef& def) {
  std::vector<Clause> clauses;
  for (const auto& c : def.clauses) clauses.push_back(lower_clause(c));
  if (!def.iface) {
    return e_patlam(std::move(clauses), def.span);
  }
  std::vector<std::string> params;
  for (size_t i = 0; i < def.arity; ++i) params.push_back(fresh_var("p"));
  ExprPtr scrut;
  if (def.arity == 1) {
    scrut = e_var(params[0], def.span);
  } else {
    std::vector<ExprPtr> es;
    for (const auto& p : params) es.push_back(e_var(p, def.span));
    scrut = e_tuple(std::move(es), def.span);
  }
  std::vector<Clause> body_clauses;
  for (auto& cl : clauses) {
    Clause b;
    PatternPtr pat =
        cl.pats.size() == 1 ? cl.pats[0] : Pattern::mk_tuple(cl.pats);
    b.pats = {Pattern::mk_and(skeleton(scrut), pat)};
    b.guard = cl.guard;
    b.body = cl.body;
    body_clauses.push_back(std::move(b));
  }
  ExprPtr body = e_patcase(scrut, std::move(body_clauses), def.span);
  return e_lam(*def.iface, std::move(params), std::move(body), def.span);
}

inline Module lower_module(const FwModule& m) {
  Module out;
  for (const auto& d : m.defs) {
    Module::Def def;
    def.name = d.name;
    def.annotated = d.iface.has_value();
    def.iface_dyn_under_neg = d.iface_dyn_under_neg;
    def.span = d.span;
    def.expr = lower_def(d);
    out.defs.push_back(std::move(def));
  }
  if (m.main) out.main = lower(m.main);
  return out;
}

// ---------------------------------------------------------------------------
// Pretty-printing of the surface syntax

inline std::string fw_pretty(const FwExprPtr& e);

inline std::string pattern_pretty(const PatternPtr& p) {
  switch (p->k) {
    case Pattern::K::Int: return std::to_string(p->ival);
    case Pattern::K::Atom:
      if (p->aval == atom_true) return "true";
      if (p->aval == atom_false) return "false";
      return ":" + atom_name(p->aval);
    case Pattern::K::Var: return p->var;
    case Pattern::K::Tuple: {
      std::string s = "{";
      for (size_t i = 0; i < p->elems.size(); ++i) {
        if (i) s += ", ";
        s += pattern_pretty(p->elems[i]);
      }
      return s + "}";
    }
    case Pattern::K::And:
      return pattern_pretty(p->left) + " & " + pattern_pretty(p->right);
  }
  return "?";
}

inline std::string fw_guard_pretty(const FwGuardPtr& g, int need = 0) {
  auto wrap = [&](int prec, std::string s) {
    return prec < need ? "(" + s + ")" : s;
  };
  switch (g->k) {
    case FwGuard::K::SelInt: return std::to_string(g->ival);
    case FwGuard::K::SelAtom:
      if (g->aval == atom_true) return "true";
      if (g->aval == atom_false) return "false";
      return ":" + atom_name(g->aval);
    case FwGuard::K::SelVar: return g->var;
    case FwGuard::K::SelTuple: {
      std::string s = "{";
      for (size_t i = 0; i < g->elems.size(); ++i) {
        if (i) s += ", ";
        s += fw_guard_pretty(g->elems[i]);
      }
      return s + "}";
    }
    case FwGuard::K::SelElem:
      return "elem(" + fw_guard_pretty(g->a) + ", " + fw_guard_pretty(g->b) + ")";
    case FwGuard::K::SelSize: return "tuple_size(" + fw_guard_pretty(g->a) + ")";
    case FwGuard::K::IsInteger: return "is_integer(" + fw_guard_pretty(g->a) + ")";
    case FwGuard::K::IsAtom: return "is_atom(" + fw_guard_pretty(g->a) + ")";
    case FwGuard::K::IsBoolean: return "is_boolean(" + fw_guard_pretty(g->a) + ")";
    case FwGuard::K::IsTuple: return "is_tuple(" + fw_guard_pretty(g->a) + ")";
    case FwGuard::K::IsFunction: return "is_function(" + fw_guard_pretty(g->a) + ")";
    case FwGuard::K::IsFunctionN:
      return "is_function(" + fw_guard_pretty(g->a) + ", " + std::to_string(g->arity) +
             ")";
    case FwGuard::K::Not: return wrap(3, "not " + fw_guard_pretty(g->a, 4));
    case FwGuard::K::And:
      return wrap(2, fw_guard_pretty(g->a, 2) + " and " + fw_guard_pretty(g->b, 3));
    case FwGuard::K::Or:
      return wrap(1, fw_guard_pretty(g->a, 1) + " or " + fw_guard_pretty(g->b, 2));
    case FwGuard::K::Eq:
      return wrap(4, fw_guard_pretty(g->a, 5) + " == " + fw_guard_pretty(g->b, 5));
    case FwGuard::K::Neq:
      return wrap(4, fw_guard_pretty(g->a, 5) + " != " + fw_guard_pretty(g->b, 5));
  }
  return "?";
}

inline std::string fw_clause_pretty(const FwClause& c) {
  std::string s;
  for (size_t i = 0; i < c.pats.size(); ++i) {
    if (i) s += ", ";
    s += pattern_pretty(c.pats[i]);
  }
  if (c.guard) s += " when " + fw_guard_pretty(c.guard);
  s += " -> " + fw_pretty(c.body);
  return s;
}

inline std::string fw_pretty(const FwExprPtr& e) {
  switch (e->k) {
    case FwExpr::K::Int: return std::to_string(e->ival);
    case FwExpr::K::Atom:
      if (e->aval == atom_true) return "true";
      if (e->aval == atom_false) return "false";
      return ":" + atom_name(e->aval);
    case FwExpr::K::Var: return e->var;
    case FwExpr::K::Tuple: {
      std::string s = "{";
      for (size_t i = 0; i < e->elems.size(); ++i) {
        if (i) s += ", ";
        s += fw_pretty(e->elems[i]);
      }
      return s + "}";
    }
    case FwExpr::K::Elem:
      return "elem(" + fw_pretty(e->a) + ", " + fw_pretty(e->b) + ")";
    case FwExpr::K::Size: return "tuple_size(" + fw_pretty(e->a) + ")";
    case FwExpr::K::Plus: {
      auto wrap = [](const FwExprPtr& x) {
        std::string s = fw_pretty(x);
        return x->k == FwExpr::K::Fn || x->k == FwExpr::K::Case ? "(" + s + ")" : s;
      };
      return wrap(e->a) + " + " + wrap(e->b);
    }
    case FwExpr::K::App: {
      std::string s = fw_pretty(e->fn);
      if (e->fn->k != FwExpr::K::Var) s = "(" + s + ")";
      s += "(";
      for (size_t i = 0; i < e->elems.size(); ++i) {
        if (i) s += ", ";
        s += fw_pretty(e->elems[i]);
      }
      return s + ")";
    }
    case FwExpr::K::Fn: {
      std::string s = "fn ";
      for (size_t i = 0; i < e->clauses.size(); ++i) {
        if (i) s += "; ";
        s += fw_clause_pretty(e->clauses[i]);
      }
      return s + " end";
    }
    case FwExpr::K::Case: {
      std::string s = "case " + fw_pretty(e->a) + " do ";
      for (size_t i = 0; i < e->clauses.size(); ++i) {
        if (i) s += "; ";
        s += fw_clause_pretty(e->clauses[i]);
      }
      return s + " end";
    }
  }
  return "?";
}

inline std::string fw_iface_pretty(const std::vector<InterfaceArrow>& iface) {
  std::string s = "$ ";
  for (size_t i = 0; i < iface.size(); ++i) {
    if (i) s += " and ";
    std::string a = "(";
    for (size_t k = 0; k < iface[i].dom.size(); ++k) {
      if (k) a += ", ";
      a += print_type(iface[i].dom[k]);
    }
    a += ") -> " + print_type(iface[i].cod);
    s += iface.size() > 1 ? "(" + a + ")" : a;
  }
  return s;
}

inline std::string fw_module_pretty(const FwModule& m) {
  std::string s;
  for (const auto& d : m.defs) {
    if (d.iface) s += fw_iface_pretty(*d.iface) + "\n";
    for (const auto& c : d.clauses) {
      s += "def " + d.name + "(";
      for (size_t i = 0; i < c.pats.size(); ++i) {
        if (i) s += ", ";
        s += pattern_pretty(c.pats[i]);
      }
      s += ")";
      if (c.guard) s += " when " + fw_guard_pretty(c.guard);
      s += ", do: " + fw_pretty(c.body) + "\n";
    }
  }
  if (m.main) s += fw_pretty(m.main) + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// Core expression rendering (diagnostics, fuzz reports)

inline std::string core_pretty(const ExprPtr& e);

inline std::string guard_pretty(const GuardPtr& g);

inline std::string gatom_pretty(const GAtomPtr& a) {
  switch (a->k) {
    case GAtom::K::Int: return std::to_string(a->ival);
    case GAtom::K::Atom:
      if (a->aval == atom_true) return "true";
      if (a->aval == atom_false) return "false";
      return ":" + atom_name(a->aval);
    case GAtom::K::Var: return a->var;
    case GAtom::K::Tuple: {
      std::string s = "{";
      for (size_t i = 0; i < a->elems.size(); ++i) {
        if (i) s += ", ";
        s += gatom_pretty(a->elems[i]);
      }
      return s + "}";
    }
    case GAtom::K::Proj:
      return "elem(" + gatom_pretty(a->subject) + ", " + gatom_pretty(a->index) + ")";
    case GAtom::K::Size: return "tuple_size(" + gatom_pretty(a->subject) + ")";
  }
  return "?";
}

inline std::string guard_pretty(const GuardPtr& g) {
  switch (g->k) {
    case Guard::K::IsOf:
      return gatom_pretty(g->a0) + " isof " + print_type(g->test);
    case Guard::K::Eq: return gatom_pretty(g->a0) + " == " + gatom_pretty(g->a1);
    case Guard::K::Neq: return gatom_pretty(g->a0) + " != " + gatom_pretty(g->a1);
    case Guard::K::And:
      return "(" + guard_pretty(g->g0) + " and " + guard_pretty(g->g1) + ")";
    case Guard::K::Or:
      return "(" + guard_pretty(g->g0) + " or " + guard_pretty(g->g1) + ")";
  }
  return "?";
}

inline std::string core_clause_pretty(const Clause& cl) {
  std::string s;
  for (size_t i = 0; i < cl.pats.size(); ++i) {
    if (i) s += ", ";
    s += pattern_pretty(cl.pats[i]);
  }
  if (cl.guard) s += " when " + guard_pretty(cl.guard);
  return s + " -> " + core_pretty(cl.body);
}

inline std::string core_pretty(const ExprPtr& e) {
  switch (e->k) {
    case Expr::K::Int: return std::to_string(e->ival);
    case Expr::K::Atom:
      if (e->aval == atom_true) return "true";
      if (e->aval == atom_false) return "false";
      return ":" + atom_name(e->aval);
    case Expr::K::Var: return e->var;
    case Expr::K::Lam: {
      std::string s = "fn[";
      for (size_t i = 0; i < e->iface.size(); ++i) {
        if (i) s += " and ";
        s += "(";
        for (size_t k = 0; k < e->iface[i].dom.size(); ++k) {
          if (k) s += ", ";
          s += print_type(e->iface[i].dom[k]);
        }
        s += ") -> " + print_type(e->iface[i].cod);
      }
      s += "] ";
      for (const auto& p : e->params) s += p + " ";
      return s + "-> " + core_pretty(e->body) + " end";
    }
    case Expr::K::PatLam: {
      std::string s = "fn ";
      for (size_t i = 0; i < e->clauses.size(); ++i) {
        if (i) s += "; ";
        s += core_clause_pretty(e->clauses[i]);
      }
      return s + " end";
    }
    case Expr::K::App: {
      std::string s = "(" + core_pretty(e->fn) + ").(";
      for (size_t i = 0; i < e->args.size(); ++i) {
        if (i) s += ", ";
        s += core_pretty(e->args[i]);
      }
      return s + ")";
    }
    case Expr::K::Tuple: {
      std::string s = "{";
      for (size_t i = 0; i < e->args.size(); ++i) {
        if (i) s += ", ";
        s += core_pretty(e->args[i]);
      }
      return s + "}";
    }
    case Expr::K::Proj:
      return "elem(" + core_pretty(e->a) + ", " + core_pretty(e->b) + ")";
    case Expr::K::Size: return "tuple_size(" + core_pretty(e->a) + ")";
    case Expr::K::Plus:
      return "(" + core_pretty(e->a) + " + " + core_pretty(e->b) + ")";
    case Expr::K::TypeCase: {
      std::string s = "case " + core_pretty(e->scrut) + " of ";
      for (size_t i = 0; i < e->tbranches.size(); ++i) {
        if (i) s += "; ";
        s += print_type(e->tbranches[i].test) + " -> " + core_pretty(e->tbranches[i].body);
      }
      return s + " end";
    }
    case Expr::K::PatCase: {
      std::string s = "case " + core_pretty(e->scrut) + " do ";
      for (size_t i = 0; i < e->clauses.size(); ++i) {
        if (i) s += "; ";
        s += core_clause_pretty(e->clauses[i]);
      }
      return s + " end";
    }
  }
  return "?";
}

}  // namespace fwx
