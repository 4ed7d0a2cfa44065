#pragma once

// Differential validation: a seeded generator of closed Core programs, the
// tiered soundness contracts checked against the evaluator, and the
// iota-enumeration cross-check of the arrow decision procedure.

#include <chrono>
#include <random>
#include <string>
#include <vector>

#include "fwx/check.hpp"
#include "fwx/compile.hpp"
#include "fwx/interp.hpp"
#include "fwx/phi_oracle.hpp"

namespace fwx {

struct FuzzViolation {
  std::string program;
  std::string expected;
  std::string observed;
};

struct FuzzReport {
  uint64_t seed = 0;
  int generated = 0;
  int discarded = 0;   // ill-typed generations
  int checked_static = 0;
  int checked_omega = 0;
  int checked_gradual = 0;
  int timeouts = 0;
  std::vector<FuzzViolation> violations;
  int64_t wall_ms = 0;
  bool pass() const { return violations.empty(); }
};

namespace fuzzdetail {

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(uint64_t seed) : rng(seed) {}
  int pick(int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); }
  bool coin(int pct) { return pick(100) < pct; }

  int fresh = 0;
  std::string fresh_name() { return "v" + std::to_string(++fresh); }

  Type pool_type() {
    switch (pick(12)) {
      case 0: return t_int();
      case 1: return t_bool();
      case 2: return t_atom();
      case 3: return t_int_singleton(pick(3));
      case 4: return t_atom_singleton(atom_true);
      case 5: return t_tuple_of({t_int(), t_int()});
      case 6: return t_tuple_of({Type::any(), t_int()});
      case 7: return t_tuple_of({t_bool()}, true);
      case 8: return Type::dyn();
      case 9: return t_union(t_int(), t_bool());
      case 10: return t_tuple();
      default: return Type::any();
    }
  }

  Type test_type() {
    switch (pick(8)) {
      case 0: return t_int();
      case 1: return t_bool();
      case 2: return t_atom();
      case 3: return t_tuple();
      case 4: return t_tuple_of({Type::any(), Type::any()});
      case 5: return t_int_singleton(pick(3));
      case 6: return t_union(t_int(), t_bool());
      default: return t_fun();
    }
  }

  ExprPtr constant() {
    switch (pick(6)) {
      case 0: return e_int(pick(3));
      case 1: return e_int(42);
      case 2: return e_atom(atom_true);
      case 3: return e_atom(atom_false);
      case 4: return e_atom(intern_atom("ok"));
      default: return e_int(pick(7) - 3);
    }
  }

  GuardPtr guard_template(const std::string& x) {
    GAtomPtr v = GAtom::mk_var(x);
    switch (pick(9)) {
      case 0: return Guard::mk_isof(v, t_int());
      case 1: return Guard::mk_isof(v, t_bool());
      case 2: return Guard::mk_isof(v, t_tuple());
      case 3: return Guard::mk_eq(GAtom::mk_size(v), GAtom::mk_int(2));
      case 4:
        return Guard::mk_isof(GAtom::mk_proj(v, GAtom::mk_int(pick(2))), t_int());
      case 5: return Guard::mk_eq(v, GAtom::mk_int(pick(3)));
      case 6:
        return Guard::mk_or(Guard::mk_isof(v, t_int()), Guard::mk_isof(v, t_bool()));
      case 7:
        // an inexact arm: equality of projections approximates
        return Guard::mk_or(
            Guard::mk_isof(GAtom::mk_proj(v, GAtom::mk_int(0)), t_bool()),
            Guard::mk_eq(GAtom::mk_proj(v, GAtom::mk_int(0)),
                         GAtom::mk_proj(v, GAtom::mk_int(1))));
      default:
        return Guard::mk_and(Guard::mk_isof(v, t_tuple()),
                             Guard::mk_eq(GAtom::mk_size(v), GAtom::mk_int(2)));
    }
  }

  ExprPtr gen(int depth, std::vector<std::string>& scope) {
    if (depth <= 0) {
      if (!scope.empty() && coin(40)) return e_var(scope[pick((int)scope.size())]);
      return constant();
    }
    int roll = pick(100);
    if (roll < 30) {
      // annotated lambda with a random single-arrow interface
      std::string p = fresh_name();
      InterfaceArrow arrow;
      arrow.dom = {pool_type()};
      arrow.cod = coin(50) ? Type::dyn() : pool_type();
      scope.push_back(p);
      ExprPtr body = gen(depth - 1, scope);
      scope.pop_back();
      return e_lam({arrow}, {p}, body);
    }
    if (roll < 50) {
      // pattern-guard case with one to three branches
      ExprPtr scrut = gen(depth - 1, scope);
      int nb = 1 + pick(3);
      std::vector<Clause> clauses;
      for (int i = 0; i < nb; ++i) {
        std::string x = fresh_name();
        Clause cl;
        cl.pats = {Pattern::mk_var(x)};
        cl.guard = (i + 1 == nb && coin(50))
                       ? Guard::mk_isof(GAtom::mk_var(x), Type::any())
                       : guard_template(x);
        scope.push_back(x);
        cl.body = gen(depth - 1, scope);
        scope.pop_back();
        clauses.push_back(std::move(cl));
      }
      return e_patcase(scrut, std::move(clauses));
    }
    if (roll < 56) {
      // unannotated guarded function
      std::string x = fresh_name();
      Clause cl;
      cl.pats = {Pattern::mk_var(x)};
      cl.guard = guard_template(x);
      scope.push_back(x);
      cl.body = gen(depth - 1, scope);
      scope.pop_back();
      return e_patlam({cl});
    }
    if (roll < 62) {
      std::vector<TypeBranch> bs;
      int nb = 1 + pick(2);
      ExprPtr scrut = gen(depth - 1, scope);
      for (int i = 0; i < nb; ++i) bs.push_back({test_type(), gen(depth - 1, scope)});
      return e_typecase(scrut, std::move(bs));
    }
    if (roll < 72) {
      std::vector<ExprPtr> es;
      int ne = pick(3);
      for (int i = 0; i < ne; ++i) es.push_back(gen(depth - 1, scope));
      return e_tuple(std::move(es));
    }
    if (roll < 78) {
      // a computed index exercises the out-of-range rules
      ExprPtr ix = coin(60) ? e_int(pick(3))
                            : (coin(50) ? e_size(gen(depth - 1, scope))
                                        : e_plus(e_int(pick(2)), e_int(pick(2))));
      return e_proj(gen(depth - 1, scope), std::move(ix));
    }
    if (roll < 86) return e_plus(gen(depth - 1, scope), gen(depth - 1, scope));
    if (roll < 96) {
      // applications mostly target freshly generated functions
      ExprPtr fn;
      if (coin(70)) {
        std::string pname = fresh_name();
        InterfaceArrow arrow;
        arrow.dom = {coin(40) ? Type::dyn() : pool_type()};
        arrow.cod = coin(60) ? Type::dyn() : pool_type();
        scope.push_back(pname);
        ExprPtr body = gen(depth - 1, scope);
        scope.pop_back();
        fn = e_lam({arrow}, {pname}, body);
      } else {
        fn = gen(depth - 1, scope);
      }
      std::vector<ExprPtr> args{gen(depth - 1, scope)};
      return e_app(std::move(fn), std::move(args));
    }
    if (!scope.empty()) return e_var(scope[pick((int)scope.size())]);
    return constant();
  }
};

// strong-arrow marks are environment-sensitive (promotion depends on how
// precisely captured variables are typed), so the shape assertions
// compare with the marks erased; promotion soundness has its own
// empirical probe
inline StaticType strip_strong(const StaticType& t);
inline TupleProd strip_strong(const TupleProd& p) {
  TupleProd r = p;
  for (auto& e : r.elems) e = strip_strong(e);
  return r;
}
inline FunArrow strip_strong(const FunArrow& a) {
  FunArrow r = a;
  r.strong = false;
  for (auto& e : r.types) e = strip_strong(e);
  return r;
}
inline StaticType strip_strong(const StaticType& t) {
  StaticType r = t;
  for (auto& l : r.tuples) {
    l.pos = strip_strong(l.pos);
    for (auto& n : l.negs) n = strip_strong(n);
  }
  for (auto& l : r.funs) {
    for (auto& a : l.pos) a = strip_strong(a);
    for (auto& a : l.negs) a = strip_strong(a);
  }
  return r;
}

// derive the most precise closed type of a value by re-checking closures
// over the recursively derived types of their captured environments
inline Type value_best_type(Checker& ck, const ValuePtr& v, bool strong_mode);

inline CheckEnv closure_env_types(Checker& ck, const ValuePtr& v, bool strong_mode) {
  CheckEnv env;
  for (const EnvNode* n = v->env.get(); n; n = n->next.get())
    if (!env.count(n->name)) env[n->name] = value_best_type(ck, n->v, strong_mode);
  return env;
}

inline bool closure_free(const ValuePtr& v) {
  if (v->k == Value::K::Closure) return false;
  if (v->k == Value::K::Tuple)
    for (const auto& e : v->elems)
      if (!closure_free(e)) return false;
  return true;
}

inline Type value_best_type(Checker& ck, const ValuePtr& v, bool strong_mode) {
  // tuples of constants are constants: the whole singleton carries the
  // dynamic mark in the strong system
  if (strong_mode && closure_free(v)) return t_inter(singleton_of(v), Type::dyn());
  switch (v->k) {
    case Value::K::Int: {
      Type t = t_int_singleton(v->i);
      return strong_mode ? t_inter(t, Type::dyn()) : t;
    }
    case Value::K::Atom: {
      Type t = t_atom_singleton(v->a);
      return strong_mode ? t_inter(t, Type::dyn()) : t;
    }
    case Value::K::Tuple: {
      std::vector<Type> es;
      for (const auto& e : v->elems) es.push_back(value_best_type(ck, e, strong_mode));
      return t_tuple_of(es, false);
    }
    case Value::K::Closure: {
      // re-check the closure's code over the derived environment types;
      // the alias does not own the node (the program outlives the check)
      ExprPtr alias(std::shared_ptr<const Expr>{}, v->lam);
      CheckEnv env = closure_env_types(ck, v, strong_mode);
      try {
        if (strong_mode) return ck.strong(env, alias);
        return ck.check(env, alias).type;
      } catch (const TypeError&) {
        return t_fun_n(closure_arity(*v));
      }
    }
  }
  return Type::any();
}

// can the value be given the judged type (modulo the lambda-to-dynamic
// escape of the strong system)?
inline bool value_fits(Checker& ck, const ValuePtr& v, const Type& t, bool strong_mode) {
  Type best = value_best_type(ck, v, strong_mode);
  if (subtype(best, t)) return true;
  // shape typing: the judgment need not be principal (a re-check under
  // more precise environment types can land on an incomparable gradual
  // variant), so values are asserted against the upper extreme
  if (!strong_mode)
    return subtype_static(strip_strong(best.up), strip_strong(t.up));
  if (strong_mode) {
    // tuples may mix precise components with the dynamic escape; approximate
    // by also accepting the shape with every function component at dynamic()
    struct Loosen {
      static Type run(const ValuePtr& v) {
        switch (v->k) {
          case Value::K::Closure: return Type::dyn();
          case Value::K::Tuple: {
            std::vector<Type> es;
            for (const auto& e : v->elems) es.push_back(run(e));
            return t_tuple_of(es, false);
          }
          case Value::K::Int: return t_inter(t_int_singleton(v->i), Type::dyn());
          case Value::K::Atom: return t_inter(t_atom_singleton(v->a), Type::dyn());
        }
        return Type::any();
      }
    };
    if (subtype(Loosen::run(v), t)) return true;
    if (subtype_static(strip_strong(best.up), strip_strong(t.up))) return true;
  }
  return false;
}


}  // namespace fuzzdetail

inline FuzzReport fuzz_soundness(uint64_t seed, int count, int64_t fuel) {
  auto t0 = std::chrono::steady_clock::now();
  FuzzReport report;
  report.seed = seed;
  fuzzdetail::Gen gen(seed);
  for (int i = 0; i < count; ++i) {
    std::vector<std::string> scope;
    ExprPtr prog = gen.gen(1 + gen.pick(5), scope);
    ++report.generated;
    Checker ck;
    Judgment j;
    try {
      j = ck.check({}, prog);
    } catch (const TypeError&) {
      ++report.discarded;
      continue;
    }
    bool has_error = false;
    bool omega_case_fired = false, omega_range_fired = false;
    for (const auto& d : ck.diags) {
      has_error = has_error || d.severity == Diagnostic::Severity::Error;
      if (d.code == "non-exhaustive-maybe") omega_case_fired = true;
      if (d.code == "out-of-range-maybe") omega_range_fired = true;
    }
    if (has_error) {
      ++report.discarded;
      continue;
    }
    Tier tier = j.tier;
    if (tier == Tier::Static) ++report.checked_static;
    if (tier == Tier::Omega) ++report.checked_omega;
    if (tier == Tier::Gradual) ++report.checked_gradual;
    Outcome out = evaluate(prog, fuel);
    if (out.k == Outcome::K::Timeout) {
      ++report.timeouts;
      continue;
    }
    auto violation = [&](std::string expected, std::string observed) {
      report.violations.push_back({core_pretty(prog) + "  [tier " + tier_name(tier) +
                                       " : " + print_type(j.type) + "]",
                                   std::move(expected), std::move(observed)});
    };
    if (out.k == Outcome::K::Failure) {
      if (tier == Tier::Static) {
        violation("no runtime failure (static tier)", failure_name(out.label));
      } else if (tier == Tier::Omega) {
        bool ok = (out.label == FailureLabel::OutOfRange && omega_range_fired) ||
                  (out.label == FailureLabel::CaseEscape && omega_case_fired);
        if (!ok)
          violation("only warned omega failures (omega tier)", failure_name(out.label));
      }
      continue;
    }
    // a value: static and omega tiers claim plain typing, the gradual
    // tier claims the strong (shape) judgment
    bool strong_mode = tier == Tier::Gradual;
    if (!fuzzdetail::value_fits(ck, out.v, j.type, strong_mode))
      violation("value of type " + print_type(j.type), print_value(out.v));
  }
  report.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return report;
}

// random Phi instances compared against the direct iota enumeration
inline FuzzReport oracle_phi(uint64_t seed, int count) {
  auto t0 = std::chrono::steady_clock::now();
  FuzzReport report;
  report.seed = seed;
  std::mt19937_64 rng(seed);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); };
  auto pool = [&]() -> StaticType {
    switch (pick(6)) {
      case 0: return st_int();
      case 1: return st_bool();
      case 2: return st_atom();
      case 3: return st_int_singleton(pick(3));
      case 4: return st_none();
      default: return st_any();
    }
  };
  for (int i = 0; i < count; ++i) {
    ++report.generated;
    size_t n = 1 + static_cast<size_t>(pick(3));
    std::vector<FunArrow> P;
    size_t m = static_cast<size_t>(pick(5));
    for (size_t k = 0; k < m; ++k) {
      FunArrow a;
      for (size_t d = 0; d <= n; ++d) a.types.push_back(pool());
      P.push_back(std::move(a));
    }
    FunArrow neg;
    for (size_t d = 0; d <= n; ++d) neg.types.push_back(pool());
    bool algo = phi_decides(P, neg);
    bool oracle = phi_oracle(P, neg);
    ++report.checked_static;
    if (algo != oracle) {
      StaticType lhs = st_any();
      bool first = true;
      for (const auto& a : P) {
        StaticType at;
        at.funs = {FunLine{{a}, {}}};
        lhs = first ? at : st_inter(lhs, at);
        first = false;
      }
      StaticType rhs;
      rhs.funs = {FunLine{{neg}, {}}};
      report.violations.push_back({print_static(lhs) + " <= " + print_static(rhs),
                                   oracle ? "true" : "false", algo ? "true" : "false"});
    }
  }
  report.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return report;
}

}  // namespace fwx
