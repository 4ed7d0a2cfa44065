#pragma once

// Guard analysis: the judgment Gamma;p |- g -> R over pairs of safe and
// success environments with exactness flags, accepted types of patterns,
// pattern environments, dependency-aware refinement, and the branch
// sequencing that threads "surely accepted" subtractions.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fwx/ast.hpp"
#include "fwx/subtype.hpp"
#include "fwx/types.hpp"

namespace fwx {

using TEnv = std::map<std::string, StaticType>;

struct EnvFlag {
  TEnv env;
  bool exact = true;
};

// an entry with no success env is a <safe; false> result
struct GuardEntry {
  EnvFlag safe;
  std::optional<EnvFlag> success;
};

struct GuardResult {
  bool omega = false;
  std::vector<GuardEntry> entries;

  bool failed() const {
    if (omega) return true;
    for (const auto& e : entries)
      if (e.success) return false;
    return true;
  }
  static GuardResult wo() {
    GuardResult r;
    r.omega = true;
    return r;
  }
  static GuardResult false_result(EnvFlag safe) {
    GuardResult r;
    r.entries.push_back({std::move(safe), std::nullopt});
    return r;
  }
  static GuardResult single(EnvFlag safe, EnvFlag success) {
    GuardResult r;
    r.entries.push_back({std::move(safe), std::move(success)});
    return r;
  }
};

// ---------------------------------------------------------------------------
// Accepted types and pattern environments

inline StaticType acc(const PatternPtr& p, const TEnv& env) {
  switch (p->k) {
    case Pattern::K::Int: return st_int_singleton(p->ival);
    case Pattern::K::Atom: return st_atom_singleton(p->aval);
    case Pattern::K::Var: {
      auto it = env.find(p->var);
      return it == env.end() ? st_any() : it->second;
    }
    case Pattern::K::Tuple: {
      std::vector<StaticType> es;
      for (const auto& e : p->elems) es.push_back(acc(e, env));
      return st_tuple_of(std::move(es), false);
    }
    case Pattern::K::And: return st_inter(acc(p->left, env), acc(p->right, env));
  }
  return st_any();
}

inline bool pattern_binds(const PatternPtr& p, const std::string& x) {
  std::vector<std::string> vars;
  pattern_vars(p, vars);
  for (const auto& v : vars)
    if (v == x) return true;
  return false;
}

// T(t/p): the deducible type of each capture variable of p for values of
// type t (which must be below the pattern's accepted shape)
inline void env_of_pattern_into(const StaticType& t, const PatternPtr& p, TEnv& out) {
  switch (p->k) {
    case Pattern::K::Var: out[p->var] = t; return;
    case Pattern::K::Tuple: {
      for (size_t i = 0; i < p->elems.size(); ++i)
        env_of_pattern_into(tuple_field(t, i), p->elems[i], out);
      return;
    }
    case Pattern::K::And: {
      // the left arm owns shared variables
      TEnv right;
      env_of_pattern_into(t, p->right, right);
      TEnv left;
      env_of_pattern_into(t, p->left, left);
      for (auto& [k, v] : right) out[k] = v;
      for (auto& [k, v] : left) out[k] = v;
      return;
    }
    default: return;
  }
}

inline TEnv env_of_pattern(const StaticType& t, const PatternPtr& p) {
  TEnv out;
  env_of_pattern_into(t, p, out);
  return out;
}

// Gamma[x ~> t]_p: narrow x and re-derive the other pattern variables so
// dependencies between capture variables propagate
inline TEnv refine(const TEnv& env, const std::string& x, const StaticType& t,
                   const PatternPtr& p) {
  TEnv out = env;
  auto it = out.find(x);
  out[x] = it == out.end() ? t : st_inter(it->second, t);
  if (p && pattern_binds(p, x)) {
    StaticType tp = acc(p, out);
    TEnv derived = env_of_pattern(tp, p);
    for (auto& [k, v] : derived) out[k] = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Static typing of guard atoms (only when evaluation cannot fail)

inline std::optional<StaticType> type_atom(const GAtomPtr& a, const TEnv& env) {
  switch (a->k) {
    case GAtom::K::Int: return st_int_singleton(a->ival);
    case GAtom::K::Atom: return st_atom_singleton(a->aval);
    case GAtom::K::Var: {
      auto it = env.find(a->var);
      if (it == env.end()) return std::nullopt;
      return it->second;
    }
    case GAtom::K::Tuple: {
      std::vector<StaticType> es;
      for (const auto& e : a->elems) {
        auto t = type_atom(e, env);
        if (!t) return std::nullopt;
        es.push_back(*t);
      }
      return st_tuple_of(std::move(es), false);
    }
    case GAtom::K::Proj: {
      auto ts = type_atom(a->subject, env);
      auto ti = type_atom(a->index, env);
      if (!ts || !ti) return std::nullopt;
      // safe only for a known in-bounds integer index
      if (!ti->atoms.is_none() || !ti->tuples.empty() || !ti->funs.empty())
        return std::nullopt;
      if (ti->ints.cofinite || ti->ints.xs.size() != 1) return std::nullopt;
      int64_t i = ti->ints.xs[0];
      if (i < 0) return std::nullopt;
      if (!subtype_static(*ts, st_tuple())) return std::nullopt;
      if (!tuple_all_longer(*ts, static_cast<size_t>(i))) return std::nullopt;
      return tuple_field(*ts, static_cast<size_t>(i));
    }
    case GAtom::K::Size: {
      auto ts = type_atom(a->subject, env);
      if (!ts) return std::nullopt;
      if (!subtype_static(*ts, st_tuple())) return std::nullopt;
      auto sizes = tuple_sizes(*ts);
      if (!sizes) return st_int();
      StaticType r = st_none();
      for (size_t s : *sizes) r = st_union(r, st_int_singleton(static_cast<int64_t>(s)));
      return r;
    }
  }
  return std::nullopt;
}

inline std::optional<int64_t> singleton_int(const StaticType& t) {
  if (!t.atoms.is_none() || !t.tuples.empty() || !t.funs.empty()) return std::nullopt;
  if (t.ints.cofinite || t.ints.xs.size() != 1) return std::nullopt;
  return t.ints.xs[0];
}

// a type inhabited by exactly one constant (integer, atom, or a closed
// tuple of such)
inline bool is_singleton_type(const StaticType& t) {
  int kinds = 0;
  bool single = false;
  if (!t.ints.is_none()) {
    ++kinds;
    single = !t.ints.cofinite && t.ints.xs.size() == 1;
  }
  if (!t.atoms.is_none()) {
    ++kinds;
    single = !t.atoms.cofinite && t.atoms.xs.size() == 1;
  }
  bool tuple_inhabited = false;
  for (const auto& l : t.tuples)
    if (!tuple_line_empty(l)) tuple_inhabited = true;
  if (tuple_inhabited) {
    ++kinds;
    if (kinds == 1) {
      // require a single closed product of singleton components
      if (t.tuples.size() != 1 || t.tuples[0].pos.open) return false;
      for (const auto& e : t.tuples[0].pos.elems)
        if (!is_singleton_type(e)) return false;
      // the negations must not carve anything out (they were pruned if vacuous)
      if (!t.tuples[0].negs.empty()) return false;
      single = true;
    }
  }
  for (const auto& l : t.funs)
    if (!fun_line_empty(l)) return false;
  return kinds == 1 && single;
}

// ---------------------------------------------------------------------------
// The guard analysis judgment

struct GuardAnalysis {
  PatternPtr pattern;                  // threaded through all judgments
  std::vector<std::string> warnings;   // e.g. arms that can never succeed

  GuardResult analyze(const TEnv& env, const GuardPtr& g) {
    switch (g->k) {
      case Guard::K::IsOf: return analyze_isof(env, g->a0, g->test.up);
      case Guard::K::Eq: return analyze_eq(env, g->a0, g->a1, false);
      case Guard::K::Neq: return analyze_eq(env, g->a0, g->a1, true);
      case Guard::K::And: return analyze_and(env, g->g0, g->g1);
      case Guard::K::Or: return analyze_or(env, g->g0, g->g1);
    }
    return GuardResult::wo();
  }

 private:
  static bool env_equal(const TEnv& a, const TEnv& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [k, v] : a) {
      auto it = b.find(k);
      if (it == b.end() || !equiv_static(v, it->second)) return false;
    }
    return true;
  }

  GuardResult analyze_isof(const TEnv& env, const GAtomPtr& a, const StaticType& test) {
    // [true] / [false]: settled by typing the atom
    if (auto s = type_atom(a, env)) {
      if (is_empty_static(st_inter(*s, test))) return GuardResult::false_result({env, true});
      if (subtype_static(*s, test)) return GuardResult::single({env, true}, {env, true});
    }
    switch (a->k) {
      case GAtom::K::Var: {
        // [var]
        auto it = env.find(a->var);
        if (it == env.end()) return GuardResult::wo();
        TEnv refined = refine(env, a->var, test, pattern);
        return GuardResult::single({env, true}, {refined, true});
      }
      case GAtom::K::Proj: return analyze_proj_isof(env, a, test);
      case GAtom::K::Size: return analyze_size_isof(env, a, test);
      case GAtom::K::Tuple: {
        // approximate: each component must be safe to evaluate
        TEnv cur = env;
        bool safe_exact = true;
        for (const auto& e : a->elems) {
          GuardResult r = analyze_isof(cur, e, st_any());
          if (r.failed()) return GuardResult::wo();
          cur = r.entries[0].success->env;
          safe_exact = safe_exact && r.entries[0].safe.exact;
        }
        return GuardResult::single({cur, safe_exact && false}, {cur, false});
      }
      default:
        // constants were fully settled by [true]/[false]
        return GuardResult::false_result({env, true});
    }
  }

  GuardResult analyze_proj_isof(const TEnv& env, const GAtomPtr& a,
                                const StaticType& test) {
    auto ti = type_atom(a->index, env);
    std::optional<int64_t> idx = ti ? singleton_int(*ti) : std::nullopt;
    if (idx && *idx >= 0) {
      size_t i = static_cast<size_t>(*idx);
      // [proj]: first the non-erroring premise "a isof tuple^{>i}"
      StaticType longer = st_tuple_of(std::vector<StaticType>(i + 1, st_any()), true);
      GuardResult sub1 = analyze_isof(env, a->subject, longer);
      if (sub1.failed()) return GuardResult::wo();  // [bound_w]
      EnvFlag safe = *sub1.entries[0].success;
      // then the success premise "a isof {1,...,1, test, ..}"
      std::vector<StaticType> elems(i, st_any());
      elems.push_back(test);
      StaticType at = st_tuple_of(std::move(elems), true);
      GuardResult sub2 = analyze_isof(safe.env, a->subject, at);
      if (sub2.failed()) return GuardResult::false_result(safe);
      EnvFlag succ = *sub2.entries[0].success;
      succ.exact = succ.exact && safe.exact;
      return GuardResult::single(safe, succ);
    }
    // approximate [proj]: index materializes to an integer, subject to a tuple
    GuardResult sub1 = analyze_isof(env, a->index, st_int());
    if (sub1.failed()) return GuardResult::wo();  // [proj_w]
    GuardResult sub2 = analyze_isof(sub1.entries[0].success->env, a->subject, st_tuple());
    if (sub2.failed()) return GuardResult::wo();  // [proj_w]
    EnvFlag d = *sub2.entries[0].success;
    return GuardResult::single({d.env, false}, {d.env, false});
  }

  GuardResult analyze_size_isof(const TEnv& env, const GAtomPtr& a,
                                const StaticType& test) {
    GuardResult sub1 = analyze_isof(env, a->subject, st_tuple());
    if (sub1.failed()) return GuardResult::wo();  // [size_w]
    EnvFlag safe = *sub1.entries[0].success;
    // tuples whose size lies in the integer part of the test
    FcSet<int64_t> sizes = st_inter(test, st_int()).ints;
    StaticType sized;
    if (!sizes.cofinite) {
      sized = st_none();
      for (int64_t n : sizes.xs)
        if (n >= 0)
          sized = st_union(sized, st_tuple_of(std::vector<StaticType>(
                                                  static_cast<size_t>(n), st_any()),
                                              false));
    } else {
      sized = st_tuple();
      for (int64_t n : sizes.xs)
        if (n >= 0)
          sized = st_diff(sized, st_tuple_of(std::vector<StaticType>(
                                                 static_cast<size_t>(n), st_any()),
                                             false));
    }
    GuardResult sub2 = analyze_isof(env, a->subject, sized);
    if (sub2.failed()) return GuardResult::false_result(safe);
    EnvFlag succ = *sub2.entries[0].success;
    succ.exact = succ.exact && safe.exact;
    return GuardResult::single(safe, succ);
  }

  GuardResult analyze_eq(const TEnv& env, const GAtomPtr& a0, const GAtomPtr& a1,
                         bool neq) {
    auto s0 = type_atom(a0, env);
    auto s1 = type_atom(a1, env);
    if (s0 && s1 && is_singleton_type(*s0) && is_singleton_type(*s1)) {
      bool same = equiv_static(*s0, *s1);
      bool holds = neq ? !same : same;
      if (holds) return GuardResult::single({env, true}, {env, true});
      return GuardResult::false_result({env, true});
    }
    // [eq1] / [eq2]: one singleton side turns equality into a type test
    if (s0 && is_singleton_type(*s0))
      return analyze_isof(env, a1, neq ? st_neg(*s0) : *s0);
    if (s1 && is_singleton_type(*s1))
      return analyze_isof(env, a0, neq ? st_neg(*s1) : *s1);
    // approximate [eq]: both sides must evaluate safely
    GuardResult sub1 = analyze_isof(env, a0, st_any());
    if (sub1.failed()) return GuardResult::wo();  // [eq_w]
    EnvFlag f = *sub1.entries[0].success;
    GuardResult sub2 = analyze_isof(f.env, a1, st_any());
    if (sub2.failed()) return GuardResult::wo();  // [eq_w]
    EnvFlag d = *sub2.entries[0].success;
    return GuardResult::single({d.env, sub1.entries[0].safe.exact && d.exact}, {d.env, false});
  }

  GuardResult analyze_and(const TEnv& env, const GuardPtr& g1, const GuardPtr& g2) {
    GuardResult r1 = analyze(env, g1);
    if (r1.omega) return GuardResult::wo();
    GuardResult out;
    bool all_omega = true;
    for (const auto& e1 : r1.entries) {
      if (!e1.success) {
        out.entries.push_back(e1);  // g1 false here: conjunction false
        all_omega = false;
        continue;
      }
      const EnvFlag& phi = e1.safe;
      const EnvFlag& delta = *e1.success;
      GuardResult r2 = analyze(delta.env, g2);
      if (r2.omega) {
        // g2 always errors once g1 succeeds; outside g1's success the
        // conjunction is still safely false, so keep an inexact false
        // entry rather than declaring the whole guard erroring
        out.entries.push_back({EnvFlag{phi.env, false}, std::nullopt});
        continue;
      }
      all_omega = false;
      for (const auto& e2 : r2.entries) {
        // safe environments are necessary conditions, so the wider left
        // one is always valid; its sufficiency additionally needs g2's
        // safety to be sufficient over everything g1 lets through
        bool suff = phi.exact && e2.safe.exact &&
                    subtype_static(acc(pattern, delta.env), acc(pattern, e2.safe.env));
        EnvFlag safe{phi.env, suff};
        if (e2.success)
          out.entries.push_back(
              {safe, EnvFlag{e2.success->env, delta.exact && e2.success->exact}});
        else
          out.entries.push_back({safe, std::nullopt});
      }
    }
    if (out.entries.empty() && all_omega) return GuardResult::wo();
    return out;
  }

  GuardResult analyze_or(const TEnv& env, const GuardPtr& g1, const GuardPtr& g2) {
    GuardResult r1 = analyze(env, g1);
    if (r1.omega) return GuardResult::wo();
    // the right arm runs where the left was false without erroring:
    // within the left's collective safe region, minus its surely
    // captured values
    StaticType left_safe_all = st_none();
    StaticType left_safe_sure = st_none();
    bool left_succeeds = false;
    for (const auto& e1 : r1.entries) {
      left_safe_all = st_union(left_safe_all, acc(pattern, e1.safe.env));
      if (e1.safe.exact)
        left_safe_sure = st_union(left_safe_sure, acc(pattern, e1.safe.env));
      left_succeeds = left_succeeds || e1.success.has_value();
    }
    StaticType residue = st_inter(acc(pattern, env), left_safe_all);
    for (const auto& e1 : r1.entries)
      if (e1.success && e1.success->exact)
        residue = st_diff(residue, acc(pattern, e1.success->env));
    if (!left_succeeds) warnings.push_back("left arm of 'or' can never succeed");
    TEnv env2 = env;
    for (auto& [k, v] : env_of_pattern(residue, pattern)) env2[k] = v;
    GuardResult r2 = analyze(env2, g2);
    // reaching the right arm surely requires the left evaluation to be
    // error-free, and exactness of the subtraction
    bool right_never_errors = false;
    if (!r2.omega)
      for (const auto& e2 : r2.entries)
        right_never_errors =
            right_never_errors || (e2.safe.exact && env_equal(e2.safe.env, env2));
    GuardResult out;
    for (const auto& e1 : r1.entries) {
      if (!e1.success) continue;
      // when the guard is false the evaluation continues into the right
      // arm, so the or's safety needs that arm error-free on the residue
      out.entries.push_back(
          {EnvFlag{e1.safe.env, e1.safe.exact && right_never_errors}, *e1.success});
    }
    bool right_succeeds = false;
    if (!r2.omega) {
      for (const auto& e2 : r2.entries) {
        bool safe_gate =
            e2.safe.exact && subtype_static(acc(pattern, e2.safe.env), left_safe_sure);
        if (e2.success) {
          bool succ_gate = e2.success->exact &&
                           subtype_static(acc(pattern, e2.success->env), left_safe_sure);
          right_succeeds = true;
          out.entries.push_back({EnvFlag{e2.safe.env, safe_gate},
                                 EnvFlag{e2.success->env, succ_gate}});
        } else {
          out.entries.push_back({EnvFlag{e2.safe.env, safe_gate}, std::nullopt});
        }
      }
    }
    if (!right_succeeds)
      warnings.push_back("right arm of 'or' can never succeed");
    if (out.entries.empty()) return GuardResult::wo();
    return out;
  }
};

// entry point matching the judgment Gamma ; p |- g -> R
inline GuardResult analyze_guard(const TEnv& env, const PatternPtr& p, const GuardPtr& g,
                                 std::vector<std::string>* warnings = nullptr) {
  GuardAnalysis ga;
  ga.pattern = p;
  GuardResult r = ga.analyze(env, g);
  if (warnings)
    warnings->insert(warnings->end(), ga.warnings.begin(), ga.warnings.end());
  return r;
}

// ---------------------------------------------------------------------------
// Pattern sequences: accepted types per branch

struct AcceptedType {
  StaticType type;
  bool exact = true;
};
using AcceptedTypes = std::vector<AcceptedType>;

struct BranchAnalysis {
  AcceptedTypes accepted;        // the (t_ij, b_ij) list
  StaticType input = st_none();  // scrutinee type remaining for this branch
  bool guard_failed = false;     // the [fail] rule applied
};

inline std::vector<BranchAnalysis> analyze_branches(
    const TEnv& outer, const StaticType& scrutinee,
    const std::vector<std::pair<PatternPtr, GuardPtr>>& branches,
    std::vector<std::string>* warnings = nullptr) {
  std::vector<BranchAnalysis> out;
  StaticType t = scrutinee;
  for (const auto& [p, g] : branches) {
    BranchAnalysis ba;
    ba.input = t;
    StaticType shape = acc(p, TEnv{});
    StaticType tp = st_inter(t, shape);
    TEnv env = outer;
    for (auto& [k, v] : env_of_pattern(tp, p)) env[k] = v;
    // arm warnings are only meaningful while inputs can still arrive
    GuardResult r =
        analyze_guard(env, p, g, is_empty_static(tp) ? nullptr : warnings);
    if (r.failed()) {
      // [fail]
      ba.guard_failed = true;
      ba.accepted.push_back({st_none(), true});
    } else {
      std::vector<std::string> pvars;
      pattern_vars(p, pvars);
      for (const auto& e : r.entries) {
        if (!e.success) continue;
        bool exact = e.success->exact;
        // exactness cannot survive conditions on variables the pattern
        // does not bind (the accepted type cannot express them)
        for (const auto& [k, v] : e.success->env) {
          bool bound = false;
          for (const auto& pv : pvars) bound = bound || pv == k;
          if (bound) continue;
          auto it = env.find(k);
          if (it == env.end() || !equiv_static(v, it->second)) exact = false;
        }
        ba.accepted.push_back({acc(p, e.success->env), exact});
      }
      if (ba.accepted.empty()) {
        ba.guard_failed = true;
        ba.accepted.push_back({st_none(), true});
      }
    }
    // [seq]: subtract the surely accepted types
    for (const auto& a : ba.accepted)
      if (a.exact) t = st_diff(t, a.type);
    out.push_back(std::move(ba));
  }
  return out;
}

struct AcceptedSummary {
  StaticType possibly = st_none();
  StaticType surely = st_none();
};

inline AcceptedSummary accepted_summaries(const AcceptedTypes& a) {
  AcceptedSummary s;
  for (const auto& x : a) {
    s.possibly = st_union(s.possibly, x.type);
    if (x.exact) s.surely = st_union(s.surely, x.type);
  }
  return s;
}

}  // namespace fwx
