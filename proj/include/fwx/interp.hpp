#pragma once

// Fuel-bounded evaluator for Core Elixir, with the labeled runtime
// failures of the reduction semantics, pattern matching, guard
// evaluation (atom errors absorb to false), and value-in-test-type
// membership.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fwx/ast.hpp"
#include "fwx/subtype.hpp"
#include "fwx/types.hpp"

namespace fwx {

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct EnvNode;
using EnvPtr = std::shared_ptr<const EnvNode>;
struct EnvNode {
  std::string name;
  ValuePtr v;
  EnvPtr next;
};

inline EnvPtr env_bind(EnvPtr env, std::string name, ValuePtr v) {
  return std::make_shared<EnvNode>(EnvNode{std::move(name), std::move(v), std::move(env)});
}
inline const ValuePtr* env_lookup(const EnvPtr& env, const std::string& name) {
  for (const EnvNode* n = env.get(); n; n = n->next.get())
    if (n->name == name) return &n->v;
  return nullptr;
}

struct Value {
  enum class K { Int, Atom, Tuple, Closure } k;
  int64_t i = 0;
  Atom a = 0;
  std::vector<ValuePtr> elems;
  const Expr* lam = nullptr;  // Lam or PatLam node
  EnvPtr env;

  static ValuePtr mk_int(int64_t v) {
    auto x = std::make_shared<Value>();
    x->k = K::Int;
    x->i = v;
    return x;
  }
  static ValuePtr mk_atom(Atom a) {
    auto x = std::make_shared<Value>();
    x->k = K::Atom;
    x->a = a;
    return x;
  }
  static ValuePtr mk_tuple(std::vector<ValuePtr> es) {
    auto x = std::make_shared<Value>();
    x->k = K::Tuple;
    x->elems = std::move(es);
    return x;
  }
  static ValuePtr mk_closure(const Expr* lam, EnvPtr env) {
    auto x = std::make_shared<Value>();
    x->k = K::Closure;
    x->lam = lam;
    x->env = std::move(env);
    return x;
  }
};

inline size_t closure_arity(const Value& v) {
  if (v.lam->k == Expr::K::Lam) return v.lam->params.size();
  return v.lam->clauses.empty() ? 0 : v.lam->clauses.front().pats.size();
}

inline bool value_eq(const ValuePtr& a, const ValuePtr& b) {
  if (a->k != b->k) return false;
  switch (a->k) {
    case Value::K::Int: return a->i == b->i;
    case Value::K::Atom: return a->a == b->a;
    case Value::K::Tuple: {
      if (a->elems.size() != b->elems.size()) return false;
      for (size_t i = 0; i < a->elems.size(); ++i)
        if (!value_eq(a->elems[i], b->elems[i])) return false;
      return true;
    }
    case Value::K::Closure: return a->lam == b->lam && a->env == b->env;
  }
  return false;
}

inline std::string print_value(const ValuePtr& v) {
  switch (v->k) {
    case Value::K::Int: return std::to_string(v->i);
    case Value::K::Atom:
      if (v->a == atom_true) return "true";
      if (v->a == atom_false) return "false";
      return ":" + atom_name(v->a);
    case Value::K::Tuple: {
      std::string s = "{";
      for (size_t i = 0; i < v->elems.size(); ++i) {
        if (i) s += ", ";
        s += print_value(v->elems[i]);
      }
      return s + "}";
    }
    case Value::K::Closure: return "#fun/" + std::to_string(closure_arity(*v));
  }
  return "?";
}

// the singleton (for constants) or shape type of a value; closures get
// their annotated interface, unannotated ones the arity-n function top
inline Type value_shape_type(const ValuePtr& v) {
  switch (v->k) {
    case Value::K::Int: return t_int_singleton(v->i);
    case Value::K::Atom: return t_atom_singleton(v->a);
    case Value::K::Tuple: {
      std::vector<Type> es;
      for (const auto& e : v->elems) es.push_back(value_shape_type(e));
      return t_tuple_of(es, false);
    }
    case Value::K::Closure: {
      if (v->lam->k == Expr::K::Lam && !v->lam->iface.empty()) {
        Type t = Type::any();
        bool first = true;
        for (const auto& a : v->lam->iface) {
          Type arrow = t_arrow_of(a.dom, a.cod);
          t = first ? arrow : t_inter(t, arrow);
          first = false;
        }
        return t;
      }
      return t_fun_n(closure_arity(*v));
    }
  }
  return Type::any();
}

inline Type singleton_of(const ValuePtr& v) {
  if (v->k == Value::K::Closure)
    throw std::invalid_argument("singleton_of: functional value");
  return value_shape_type(v);
}

// ---------------------------------------------------------------------------
// Membership v in tau (test types only: arrows are arity tests)

inline bool member(const ValuePtr& v, const StaticType& t);

namespace detail {

inline bool in_prod(const ValuePtr& v, const TupleProd& p) {
  if (v->k != Value::K::Tuple) return false;
  size_t n = v->elems.size();
  if (p.open ? n < p.elems.size() : n != p.elems.size()) return false;
  for (size_t i = 0; i < p.elems.size(); ++i)
    if (!member(v->elems[i], p.elems[i])) return false;
  return true;
}

inline bool in_arrow(const ValuePtr& v, const FunArrow& a) {
  if (v->k != Value::K::Closure) return false;
  if (closure_arity(*v) != a.arity()) return false;
  // test types only carry arity tests: (none,..,none) -> term
  for (size_t i = 0; i + 1 < a.types.size(); ++i)
    if (!is_empty_static(a.types[i]))
      throw std::logic_error("member: non-trivial arrow in test type");
  if (!subtype_static(st_any(), a.cod()))
    throw std::logic_error("member: non-trivial arrow in test type");
  return true;
}

}  // namespace detail

inline bool member(const ValuePtr& v, const StaticType& t) {
  switch (v->k) {
    case Value::K::Int: return t.ints.contains(v->i);
    case Value::K::Atom: return t.atoms.contains(v->a);
    case Value::K::Tuple: {
      for (const auto& l : t.tuples) {
        if (!detail::in_prod(v, l.pos)) continue;
        bool ok = true;
        for (const auto& n : l.negs)
          if (detail::in_prod(v, n)) {
            ok = false;
            break;
          }
        if (ok) return true;
      }
      return false;
    }
    case Value::K::Closure: {
      for (const auto& l : t.funs) {
        bool ok = true;
        for (const auto& p : l.pos)
          if (!detail::in_arrow(v, p)) {
            ok = false;
            break;
          }
        if (!ok) continue;
        for (const auto& n : l.negs)
          if (detail::in_arrow(v, n)) {
            ok = false;
            break;
          }
        if (ok) return true;
      }
      return false;
    }
  }
  return false;
}

inline bool member(const ValuePtr& v, const Type& t) {
  if (t.has_dyn()) throw std::invalid_argument("member: gradual test type");
  return member(v, t.down);
}

// ---------------------------------------------------------------------------
// Pattern matching

using Bindings = std::vector<std::pair<std::string, ValuePtr>>;

inline bool match(const ValuePtr& v, const PatternPtr& p, Bindings& out) {
  switch (p->k) {
    case Pattern::K::Int: return v->k == Value::K::Int && v->i == p->ival;
    case Pattern::K::Atom: return v->k == Value::K::Atom && v->a == p->aval;
    case Pattern::K::Var:
      out.emplace_back(p->var, v);
      return true;
    case Pattern::K::Tuple: {
      if (v->k != Value::K::Tuple || v->elems.size() != p->elems.size()) return false;
      for (size_t i = 0; i < p->elems.size(); ++i)
        if (!match(v->elems[i], p->elems[i], out)) return false;
      return true;
    }
    case Pattern::K::And:
      return match(v, p->left, out) && match(v, p->right, out);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Evaluation

enum class FailureLabel {
  CaseEscape,
  OutOfRange,
  NotTuple,
  BadFunction,
  NonIntPlus,
  SizeNonTuple,
};

inline const char* failure_name(FailureLabel l) {
  switch (l) {
    case FailureLabel::CaseEscape: return "caseEscape";
    case FailureLabel::OutOfRange: return "outOfRange";
    case FailureLabel::NotTuple: return "notTuple";
    case FailureLabel::BadFunction: return "badFunction";
    case FailureLabel::NonIntPlus: return "nonIntPlus";
    case FailureLabel::SizeNonTuple: return "sizeNonTuple";
  }
  return "?";
}

struct Outcome {
  enum class K { Value, Failure, Timeout } k;
  ValuePtr v;
  FailureLabel label = FailureLabel::CaseEscape;

  static Outcome value(ValuePtr x) { return {K::Value, std::move(x)}; }
  static Outcome failure(FailureLabel l) { return {K::Failure, nullptr, l}; }
  static Outcome timeout() { return {K::Timeout, nullptr}; }
  bool is_value() const { return k == K::Value; }
};

namespace detail {

struct Fuel {
  int64_t left;
  bool step() { return --left >= 0; }
};

// Fail is an atom error: it makes the whole guard false, bypassing the
// enclosing connectives (rule Context_omega)
enum class GuardVerdict { True, False, Fail, Timeout };

inline Outcome eval(const ExprPtr& e, const EnvPtr& env, Fuel& fuel);

// guard atoms; errors are reported so the guard machinery can absorb them
struct AtomResult {
  enum class K { Value, Error, Timeout } k;
  ValuePtr v;
};

inline AtomResult eval_gatom(const GAtomPtr& a, const EnvPtr& env, Fuel& fuel) {
  switch (a->k) {
    case GAtom::K::Int: return {AtomResult::K::Value, Value::mk_int(a->ival)};
    case GAtom::K::Atom: return {AtomResult::K::Value, Value::mk_atom(a->aval)};
    case GAtom::K::Var: {
      const ValuePtr* v = env_lookup(env, a->var);
      if (!v) return {AtomResult::K::Error, nullptr};
      return {AtomResult::K::Value, *v};
    }
    case GAtom::K::Tuple: {
      std::vector<ValuePtr> es;
      for (const auto& x : a->elems) {
        AtomResult r = eval_gatom(x, env, fuel);
        if (r.k != AtomResult::K::Value) return r;
        es.push_back(r.v);
      }
      return {AtomResult::K::Value, Value::mk_tuple(std::move(es))};
    }
    case GAtom::K::Proj: {
      AtomResult s = eval_gatom(a->subject, env, fuel);
      if (s.k != AtomResult::K::Value) return s;
      AtomResult i = eval_gatom(a->index, env, fuel);
      if (i.k != AtomResult::K::Value) return i;
      if (!fuel.step()) return {AtomResult::K::Timeout, nullptr};
      if (s.v->k != Value::K::Tuple) return {AtomResult::K::Error, nullptr};
      if (i.v->k != Value::K::Int || i.v->i < 0 ||
          static_cast<size_t>(i.v->i) >= s.v->elems.size())
        return {AtomResult::K::Error, nullptr};
      return {AtomResult::K::Value, s.v->elems[static_cast<size_t>(i.v->i)]};
    }
    case GAtom::K::Size: {
      AtomResult s = eval_gatom(a->subject, env, fuel);
      if (s.k != AtomResult::K::Value) return s;
      if (!fuel.step()) return {AtomResult::K::Timeout, nullptr};
      if (s.v->k != Value::K::Tuple) return {AtomResult::K::Error, nullptr};
      return {AtomResult::K::Value, Value::mk_int(static_cast<int64_t>(s.v->elems.size()))};
    }
  }
  return {AtomResult::K::Error, nullptr};
}

inline GuardVerdict eval_guard(const GuardPtr& g, const EnvPtr& env, Fuel& fuel) {
  switch (g->k) {
    case Guard::K::IsOf: {
      AtomResult r = eval_gatom(g->a0, env, fuel);
      if (r.k == AtomResult::K::Timeout) return GuardVerdict::Timeout;
      if (r.k == AtomResult::K::Error) return GuardVerdict::Fail;
      if (!fuel.step()) return GuardVerdict::Timeout;
      return member(r.v, g->test) ? GuardVerdict::True : GuardVerdict::False;
    }
    case Guard::K::Eq:
    case Guard::K::Neq: {
      AtomResult x = eval_gatom(g->a0, env, fuel);
      if (x.k == AtomResult::K::Timeout) return GuardVerdict::Timeout;
      if (x.k == AtomResult::K::Error) return GuardVerdict::Fail;
      AtomResult y = eval_gatom(g->a1, env, fuel);
      if (y.k == AtomResult::K::Timeout) return GuardVerdict::Timeout;
      if (y.k == AtomResult::K::Error) return GuardVerdict::Fail;
      if (!fuel.step()) return GuardVerdict::Timeout;
      bool eq = value_eq(x.v, y.v);
      return (g->k == Guard::K::Eq ? eq : !eq) ? GuardVerdict::True
                                               : GuardVerdict::False;
    }
    case Guard::K::And: {
      GuardVerdict l = eval_guard(g->g0, env, fuel);
      if (l != GuardVerdict::True) return l;  // short-circuit And_false
      if (!fuel.step()) return GuardVerdict::Timeout;
      return eval_guard(g->g1, env, fuel);
    }
    case Guard::K::Or: {
      GuardVerdict l = eval_guard(g->g0, env, fuel);
      if (l != GuardVerdict::False) return l;  // short-circuit Or_true
      if (!fuel.step()) return GuardVerdict::Timeout;
      return eval_guard(g->g1, env, fuel);
    }
  }
  return GuardVerdict::False;
}

// first clause whose pattern-guard pair accepts the given values
struct MatchResult {
  enum class K { Clause, NoMatch, Timeout } k;
  size_t index = 0;
  Bindings binds;
};

inline MatchResult first_match(const std::vector<Clause>& clauses,
                               const std::vector<ValuePtr>& vs, const EnvPtr& env,
                               Fuel& fuel) {
  for (size_t ci = 0; ci < clauses.size(); ++ci) {
    const Clause& cl = clauses[ci];
    if (cl.pats.size() != vs.size()) continue;
    Bindings binds;
    bool ok = true;
    for (size_t i = 0; i < vs.size() && ok; ++i) ok = match(vs[i], cl.pats[i], binds);
    if (!ok) continue;
    EnvPtr genv = env;
    for (const auto& [n, v] : binds) genv = env_bind(genv, n, v);
    GuardVerdict gv = eval_guard(cl.guard, genv, fuel);
    if (gv == GuardVerdict::Timeout) return {MatchResult::K::Timeout, 0, {}};
    if (gv == GuardVerdict::True) return {MatchResult::K::Clause, ci, std::move(binds)};
  }
  return {MatchResult::K::NoMatch, 0, {}};
}

inline Outcome eval(const ExprPtr& e, const EnvPtr& env, Fuel& fuel) {
  switch (e->k) {
    case Expr::K::Int: return Outcome::value(Value::mk_int(e->ival));
    case Expr::K::Atom: return Outcome::value(Value::mk_atom(e->aval));
    case Expr::K::Var: {
      const ValuePtr* v = env_lookup(env, e->var);
      if (!v) throw std::logic_error("unbound variable '" + e->var + "'");
      return Outcome::value(*v);
    }
    case Expr::K::Lam:
    case Expr::K::PatLam: return Outcome::value(Value::mk_closure(e.get(), env));
    case Expr::K::Tuple: {
      std::vector<ValuePtr> es;
      for (const auto& x : e->args) {
        Outcome r = eval(x, env, fuel);
        if (!r.is_value()) return r;
        es.push_back(r.v);
      }
      return Outcome::value(Value::mk_tuple(std::move(es)));
    }
    case Expr::K::Proj: {
      Outcome s = eval(e->a, env, fuel);
      if (!s.is_value()) return s;
      Outcome i = eval(e->b, env, fuel);
      if (!i.is_value()) return i;
      if (!fuel.step()) return Outcome::timeout();
      if (s.v->k != Value::K::Tuple) return Outcome::failure(FailureLabel::NotTuple);
      if (i.v->k != Value::K::Int || i.v->i < 0 ||
          static_cast<size_t>(i.v->i) >= s.v->elems.size())
        return Outcome::failure(FailureLabel::OutOfRange);
      return Outcome::value(s.v->elems[static_cast<size_t>(i.v->i)]);
    }
    case Expr::K::Size: {
      Outcome s = eval(e->a, env, fuel);
      if (!s.is_value()) return s;
      if (!fuel.step()) return Outcome::timeout();
      if (s.v->k != Value::K::Tuple)
        return Outcome::failure(FailureLabel::SizeNonTuple);
      return Outcome::value(Value::mk_int(static_cast<int64_t>(s.v->elems.size())));
    }
    case Expr::K::Plus: {
      Outcome l = eval(e->a, env, fuel);
      if (!l.is_value()) return l;
      Outcome r = eval(e->b, env, fuel);
      if (!r.is_value()) return r;
      if (!fuel.step()) return Outcome::timeout();
      if (l.v->k != Value::K::Int || r.v->k != Value::K::Int)
        return Outcome::failure(FailureLabel::NonIntPlus);
      return Outcome::value(Value::mk_int(l.v->i + r.v->i));
    }
    case Expr::K::App: {
      Outcome f = eval(e->fn, env, fuel);
      if (!f.is_value()) return f;
      std::vector<ValuePtr> args;
      for (const auto& x : e->args) {
        Outcome r = eval(x, env, fuel);
        if (!r.is_value()) return r;
        args.push_back(r.v);
      }
      if (!fuel.step()) return Outcome::timeout();
      if (f.v->k != Value::K::Closure)
        return Outcome::failure(FailureLabel::BadFunction);
      const Expr* lam = f.v->lam;
      if (lam->k == Expr::K::Lam) {
        if (lam->params.size() != args.size())
          return Outcome::failure(FailureLabel::BadFunction);
        EnvPtr benv = f.v->env;
        for (size_t i = 0; i < args.size(); ++i)
          benv = env_bind(benv, lam->params[i], args[i]);
        return eval(lam->body, benv, fuel);
      }
      if (closure_arity(*f.v) != args.size())
        return Outcome::failure(FailureLabel::BadFunction);
      MatchResult m = first_match(lam->clauses, args, f.v->env, fuel);
      if (m.k == MatchResult::K::Timeout) return Outcome::timeout();
      if (m.k == MatchResult::K::NoMatch)
        return Outcome::failure(FailureLabel::CaseEscape);
      EnvPtr benv = f.v->env;
      for (const auto& [n, v] : m.binds) benv = env_bind(benv, n, v);
      return eval(lam->clauses[m.index].body, benv, fuel);
    }
    case Expr::K::TypeCase: {
      Outcome s = eval(e->scrut, env, fuel);
      if (!s.is_value()) return s;
      if (!fuel.step()) return Outcome::timeout();
      for (const auto& br : e->tbranches)
        if (member(s.v, br.test)) return eval(br.body, env, fuel);
      return Outcome::failure(FailureLabel::CaseEscape);
    }
    case Expr::K::PatCase: {
      Outcome s = eval(e->scrut, env, fuel);
      if (!s.is_value()) return s;
      if (!fuel.step()) return Outcome::timeout();
      MatchResult m = first_match(e->clauses, {s.v}, env, fuel);
      if (m.k == MatchResult::K::Timeout) return Outcome::timeout();
      if (m.k == MatchResult::K::NoMatch)
        return Outcome::failure(FailureLabel::CaseEscape);
      EnvPtr benv = env;
      for (const auto& [n, v] : m.binds) benv = env_bind(benv, n, v);
      return eval(e->clauses[m.index].body, benv, fuel);
    }
  }
  throw std::logic_error("eval: unreachable");
}

}  // namespace detail

inline Outcome evaluate(const ExprPtr& e, int64_t fuel, EnvPtr env = nullptr) {
  detail::Fuel f{fuel};
  return detail::eval(e, env, f);
}

// guard evaluation entry point used by the analysis cross-checks
inline std::optional<bool> eval_guard(const GuardPtr& g, const Bindings& binds,
                                      int64_t fuel) {
  EnvPtr env;
  for (const auto& [n, v] : binds) env = env_bind(env, n, v);
  detail::Fuel f{fuel};
  auto r = detail::eval_guard(g, env, f);
  if (r == detail::GuardVerdict::Timeout) return std::nullopt;
  // Fail (an atom error) makes the whole guard false
  return r == detail::GuardVerdict::True;
}

// v / (p when g): bindings on success
inline std::optional<Bindings> match_guarded(const ValuePtr& v, const PatternPtr& p,
                                             const GuardPtr& g, int64_t fuel) {
  Bindings binds;
  if (!match(v, p, binds)) return std::nullopt;
  if (g) {
    auto r = eval_guard(g, binds, fuel);
    if (!r || !*r) return std::nullopt;
  }
  return binds;
}

}  // namespace fwx
