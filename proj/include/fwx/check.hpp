#pragma once

// The typing systems: static rules first, then the omega rules (which
// warn), then the gradual rules; the strong system used to promote
// single-arrow functions; guard-analysis-driven case typing; inference
// for unannotated pattern functions; interface normalization.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fwx/ast.hpp"
#include "fwx/compile.hpp"
#include "fwx/guards.hpp"
#include "fwx/interp.hpp"
#include "fwx/subtype.hpp"

namespace fwx {

enum class Tier { Static = 0, Omega = 1, Gradual = 2 };

inline const char* tier_name(Tier t) {
  switch (t) {
    case Tier::Static: return "static";
    case Tier::Omega: return "omega";
    case Tier::Gradual: return "gradual";
  }
  return "?";
}

inline Tier tier_max(Tier a, Tier b) { return a < b ? b : a; }

struct Diagnostic {
  enum class Severity { Error, Warning } severity;
  Tier rule_class = Tier::Static;
  std::string code;
  std::string message;
  Span2 span;
};

struct Judgment {
  Type type;
  Tier tier = Tier::Static;
};

struct TypeError {
  Diagnostic diag;
};

using CheckEnv = std::map<std::string, Type>;

// ---------------------------------------------------------------------------
// Interface normalization

// rewrite an interface so static domains become the cells of their Venn
// diagram (joint cells get intersected codomains), overlapping gradual
// arrows merge by union, and gradual domains cede the multiply-claimed
// static regions
inline std::vector<InterfaceArrow> normalize_interface(
    const std::vector<InterfaceArrow>& iface) {
  if (iface.empty()) throw TypeError{{Diagnostic::Severity::Error, Tier::Static,
                                      "interface-empty", "empty interface", {}}};
  size_t n = iface.front().dom.size();
  for (const auto& a : iface)
    if (a.dom.size() != n)
      throw TypeError{{Diagnostic::Severity::Error, Tier::Static, "interface-arity",
                       "interface arrows have mixed arity", {}}};
  if (n != 1) {
    // the splitting construction is stated for unary interfaces; wider
    // arrows pass through unchanged
    return iface;
  }
  std::vector<InterfaceArrow> statics, graduals;
  for (const auto& a : iface)
    (a.dom[0].has_dyn() ? graduals : statics).push_back(a);
  std::vector<InterfaceArrow> out;
  size_t m = statics.size();
  for (size_t mask = 1; mask < (size_t(1) << m); ++mask) {
    Type dom = Type::any();
    Type cod = Type::any();
    for (size_t i = 0; i < m; ++i)
      if (mask & (size_t(1) << i)) {
        dom = t_inter(dom, statics[i].dom[0]);
        cod = t_inter(cod, statics[i].cod);
      }
    for (size_t i = 0; i < m; ++i)
      if (!(mask & (size_t(1) << i))) dom = t_diff(dom, statics[i].dom[0]);
    if (is_empty_static(dom.up)) continue;
    out.push_back({{dom}, cod});
  }
  // regions claimed by more than one static arrow
  Type claimed = Type::none();
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j)
      claimed = t_union(claimed, t_inter(statics[i].dom[0], statics[j].dom[0]));
  // merge overlapping gradual arrows by codomain union
  std::vector<InterfaceArrow> gs = graduals;
  for (bool merged = true; merged;) {
    merged = false;
    for (size_t i = 0; i < gs.size() && !merged; ++i)
      for (size_t j = i + 1; j < gs.size() && !merged; ++j) {
        if (is_empty_static(t_inter(gs[i].dom[0], gs[j].dom[0]).up)) continue;
        gs[i] = {{t_union(gs[i].dom[0], gs[j].dom[0])},
                 t_union(gs[i].cod, gs[j].cod)};
        gs.erase(gs.begin() + static_cast<long>(j));
        merged = true;
      }
  }
  for (auto& g : gs) {
    Type dom = t_diff(g.dom[0], claimed);
    if (is_empty_static(dom.up)) continue;
    out.push_back({{dom}, g.cod});
  }
  if (out.empty())
    throw TypeError{{Diagnostic::Severity::Error, Tier::Static, "interface-empty",
                     "every interface arrow has an empty domain", {}}};
  return out;
}

// ---------------------------------------------------------------------------
// The checker

struct Checker {
  bool gradual_mode = true;
  std::vector<Diagnostic> diags;

  // branch attainability across interface-arrow passes (plain mode only)
  std::map<int, size_t> case_sizes;
  std::map<int, std::set<size_t>> case_attained;
  std::map<int, Span2> case_spans;
  std::map<int, bool> case_is_pattern;
  bool in_strong = false;

  void warn(Tier cls, std::string code, std::string msg, Span2 sp) {
    diags.push_back(
        {Diagnostic::Severity::Warning, cls, std::move(code), std::move(msg), sp});
  }
  [[noreturn]] void fail(std::string code, std::string msg, Span2 sp) {
    throw TypeError{
        {Diagnostic::Severity::Error, Tier::Static, std::move(code), std::move(msg), sp}};
  }

  // ---- helpers over packed argument products ----

  static StaticType pack(const std::vector<Type>& ts, bool up) {
    std::vector<StaticType> es;
    for (const auto& t : ts) es.push_back(up ? t.up : t.down);
    return st_tuple_of(std::move(es), false);
  }

  // ---- the main judgment ----

  Judgment check(const CheckEnv& env, const ExprPtr& e,
                 const std::optional<Type>& expected = std::nullopt) {
    switch (e->k) {
      case Expr::K::Int: return {t_int_singleton(e->ival), Tier::Static};
      case Expr::K::Atom: return {t_atom_singleton(e->aval), Tier::Static};
      case Expr::K::Var: {
        auto it = env.find(e->var);
        if (it == env.end()) fail("scope-error", "unbound variable '" + e->var + "'", e->span);
        return {it->second, Tier::Static};
      }
      case Expr::K::Tuple: {
        std::vector<Type> ts;
        Tier tier = Tier::Static;
        for (const auto& x : e->args) {
          Judgment j = check(env, x);
          ts.push_back(j.type);
          tier = tier_max(tier, j.tier);
        }
        return {t_tuple_of(ts, false), tier};
      }
      case Expr::K::Lam: return check_lam(env, e);
      case Expr::K::PatLam: return infer_fn(env, e, expected_domain(expected, e), true);
      case Expr::K::App: return check_app(env, e);
      case Expr::K::Proj: return check_proj(env, e);
      case Expr::K::Size: return check_size(env, e);
      case Expr::K::Plus: return check_plus(env, e);
      case Expr::K::TypeCase: return check_typecase(env, e, expected);
      case Expr::K::PatCase: return check_patcase(env, e, expected);
    }
    fail("internal", "unreachable", e->span);
  }

  // domain hint for inferring an unannotated function against an
  // expected arrow type
  static std::optional<StaticType> expected_domain(const std::optional<Type>& expected,
                                                   const ExprPtr& e) {
    if (!expected) return std::nullopt;
    size_t n = e->clauses.empty() ? 1 : e->clauses.front().pats.size();
    if (!subtype_static(expected->up, st_fun_n(n))) return std::nullopt;
    return fun_domain(expected->down, n);
  }

  // ---- lambdas ----

  Judgment check_lam(const CheckEnv& env, const ExprPtr& e) {
    std::vector<InterfaceArrow> iface = normalize_interface(e->iface);
    Tier tier = Tier::Static;
    Type type = Type::any();
    bool first = true;
    for (const auto& arrow : iface) {
      if (arrow.dom.size() != e->params.size())
        fail("interface-arity", "interface arity does not match the parameter list",
             e->span);
      CheckEnv benv = env;
      for (size_t i = 0; i < e->params.size(); ++i) benv[e->params[i]] = arrow.dom[i];
      Judgment bj = check(benv, e->body, arrow.cod);
      if (!subtype(bj.type, arrow.cod))
        fail("body-type-mismatch",
             "body has type " + print_type(bj.type) + ", not a subtype of " +
                 print_type(arrow.cod),
             e->span);
      tier = tier_max(tier, bj.tier);
      Type at = t_arrow_of(arrow.dom, arrow.cod);
      type = first ? at : t_inter(type, at);
      first = false;
    }
    // the top premise of the lambda rule: the body types at term() with
    // dynamic parameters (this is total, but surfaces scope errors in
    // branches no arrow pass reaches)
    {
      CheckEnv senv = env;
      for (const auto& p : e->params) senv[p] = Type::dyn();
      bool saved = in_strong;
      in_strong = true;
      (void)strong(senv, e->body);
      in_strong = saved;
    }
    // eager strong promotion at the collapsed single arrow
    {
      bool saved = in_strong;
      in_strong = true;
      auto st = try_promote_strong(env, e->params, e->body, iface);
      in_strong = saved;
      if (st) type = t_inter(type, *st);
    }
    return {type, tier};
  }

  // ---- application ----

  Judgment check_app(const CheckEnv& env, const ExprPtr& e) {
    Judgment jf = check(env, e->fn);
    std::vector<Type> args;
    Tier tier = jf.tier;
    for (const auto& x : e->args) {
      Judgment j = check(env, x);
      args.push_back(j.type);
      tier = tier_max(tier, j.tier);
    }
    size_t n = args.size();
    const Type& f = jf.type;
    if (is_empty_static(f.up)) return {Type::none(), tier};
    StaticType args_up = pack(args, true);
    StaticType args_down = pack(args, false);
    // static application: every materialization of the function must
    // accept every materialization of the arguments, i.e. the up-extreme
    // domain covers the up-extreme arguments (the down-extreme domain is
    // always at least as wide)
    if (subtype_static(f.up, st_fun_n(n))) {
      auto dom_up = fun_domain(f.up, n);
      if (dom_up && subtype_static(args_up, *dom_up)) {
        auto r_down = st_apply(f.down, args_up, n);
        auto r_up = st_apply(f.up, args_up, n);
        if (r_up) {
          StaticType down = r_down ? *r_down : st_none();
          return {Type::make(down, st_union(*r_up, down)), tier};
        }
      }
    }
    if (gradual_mode) {
      // strong application: any strong arrow the function type fits,
      // with consistent arguments, yields codomain /\ dynamic()
      std::optional<Type> best;
      for (const auto& cand : strong_candidates(f)) {
        if (cand.arity() != n) continue;
        std::vector<StaticType> cd(cand.types.begin(), cand.types.end() - 1);
        StaticType cdom = st_tuple_of(std::move(cd), false);
        if (!subtype_static(args_down, cdom)) continue;
        Type r = Type::make(st_none(), cand.cod());
        best = best ? t_inter(*best, r) : r;
      }
      if (best) return {*best, Tier::Gradual};
      // materialized application: the function can be a function of this
      // arity and the arguments fit its domain under materialization
      if (subtype_static(f.down, st_fun_n(n))) {
        auto dom_down = fun_domain(f.down, n);
        if (dom_down && subtype_static(args_down, *dom_down))
          return {Type::dyn(), Tier::Gradual};
      }
    }
    if (!subtype_static(f.down, st_fun_n(n)))
      fail("not-a-function",
           "expression of type " + print_type(f) + " cannot be a function of arity " +
               std::to_string(n),
           e->span);
    fail("bad-argument",
         "arguments are incompatible with the domain of " + print_type(f), e->span);
  }

  // ---- projection ----

  Judgment check_proj(const CheckEnv& env, const ExprPtr& e) {
    Judgment js = check(env, e->a);
    Judgment ji = check(env, e->b);
    Tier tier = tier_max(js.tier, ji.tier);
    const Type& ts = js.type;
    const Type& ti = ji.type;
    bool subj_tuple = subtype_static(ts.up, st_tuple());
    // exact projection: a finite nonnegative index set against tuples
    // that are provably long enough
    if (!ti.has_dyn() && subtype(ti, t_int()) && !ti.down.ints.cofinite) {
      bool ok = subj_tuple && !ti.down.ints.xs.empty();
      for (int64_t i : ti.down.ints.xs)
        ok = ok && i >= 0 &&
             tuple_all_longer(ts.up, static_cast<size_t>(i));
      if (ti.down.ints.xs.empty() && subj_tuple)
        return {Type::none(), tier};  // no index value can flow
      if (ok) {
        StaticType down = st_none(), up = st_none();
        for (int64_t i : ti.down.ints.xs) {
          down = st_union(down, tuple_field(ts.down, static_cast<size_t>(i)));
          up = st_union(up, tuple_field(ts.up, static_cast<size_t>(i)));
        }
        return {Type::make(down, up), tier};
      }
    }
    // omega rules: integer index against bounded or arbitrary tuples
    if (subtype(ti, t_int()) && subj_tuple) {
      auto fields = tuple_fields_union(ts.up);
      if (fields) {
        warn(Tier::Omega, "out-of-range-maybe",
             "projection index may be out of range", e->span);
        auto fd = tuple_fields_union(ts.down);
        return {Type::make(fd ? *fd : st_none(), *fields), tier_max(tier, Tier::Omega)};
      }
      warn(Tier::Omega, "out-of-range-maybe", "projection index may be out of range",
           e->span);
      return {Type::any(), tier_max(tier, Tier::Omega)};
    }
    if (gradual_mode && consistent_subtype(ti, t_int())) {
      if (subj_tuple) {
        auto fields = tuple_fields_union(ts.up);
        Type r = fields ? Type::make(st_none(), *fields) : Type::dyn();
        return {r, Tier::Gradual};
      }
      if (consistent_subtype(ts, t_tuple())) return {Type::dyn(), Tier::Gradual};
    }
    if (!consistent_subtype(ts, t_tuple()))
      fail("not-a-tuple", "subject of type " + print_type(ts) + " cannot be a tuple",
           e->span);
    fail("bad-index", "index of type " + print_type(ti) + " cannot be an integer",
         e->span);
  }

  // ---- size, plus ----

  Judgment check_size(const CheckEnv& env, const ExprPtr& e) {
    Judgment js = check(env, e->a);
    if (subtype(js.type, t_tuple())) {
      auto sizes = tuple_sizes(js.type.up);
      if (sizes) {
        StaticType r = st_none();
        for (size_t s : *sizes) r = st_union(r, st_int_singleton(static_cast<int64_t>(s)));
        auto dsizes = tuple_sizes(js.type.down);
        StaticType d = st_none();
        if (dsizes)
          for (size_t s : *dsizes) d = st_union(d, st_int_singleton(static_cast<int64_t>(s)));
        return {Type::make(js.type.has_dyn() ? d : r, r), js.tier};
      }
      return {t_int(), js.tier};
    }
    if (gradual_mode && consistent_subtype(js.type, t_tuple()))
      return {t_inter(t_int(), Type::dyn()), Tier::Gradual};
    fail("bad-size-operand", "tuple_size of type " + print_type(js.type), e->span);
  }

  Judgment check_plus(const CheckEnv& env, const ExprPtr& e) {
    Judgment l = check(env, e->a);
    Judgment r = check(env, e->b);
    Tier tier = tier_max(l.tier, r.tier);
    if (subtype(l.type, t_int()) && subtype(r.type, t_int())) return {t_int(), tier};
    if (gradual_mode && consistent_subtype(l.type, t_int()) &&
        consistent_subtype(r.type, t_int()))
      return {t_inter(t_int(), Type::dyn()), Tier::Gradual};
    const Type& bad = subtype(l.type, t_int()) ? r.type : l.type;
    fail("bad-plus-operand",
         "operand of type " + print_type(bad) + " is not an integer", e->span);
  }

  // ---- cases ----

  void register_case(const ExprPtr& e, size_t branches, bool pattern) {
    if (in_strong) return;
    if (!case_sizes.count(e->node_id)) {
      case_sizes[e->node_id] = branches;
      case_spans[e->node_id] = e->span;
      case_is_pattern[e->node_id] = pattern;
      case_attained[e->node_id];
    }
  }
  void attain(const ExprPtr& e, size_t branch) {
    if (!in_strong) case_attained[e->node_id].insert(branch);
  }

  Judgment check_typecase(const CheckEnv& env, const ExprPtr& e,
                          const std::optional<Type>& expected) {
    Judgment js = check(env, e->scrut);
    register_case(e, e->tbranches.size(), false);
    const Type& t = js.type;
    Tier tier = js.tier;
    Type result = Type::none();
    Type prev = Type::none();
    bool narrow = e->scrut->k == Expr::K::Var;
    for (size_t i = 0; i < e->tbranches.size(); ++i) {
      const TypeBranch& br = e->tbranches[i];
      Type ti = t_diff(t_inter(t, br.test), prev);
      prev = t_union(prev, br.test);
      if (is_empty_static(ti.up)) continue;
      attain(e, i);
      CheckEnv benv = env;
      if (narrow) benv[e->scrut->var] = ti;
      Judgment bj = check(benv, br.body, expected);
      result = t_union(result, bj.type);
      tier = tier_max(tier, bj.tier);
    }
    Type all = Type::none();
    for (const auto& br : e->tbranches) all = t_union(all, br.test);
    if (subtype(t, all)) return {result, tier};
    if (gradual_mode && consistent_subtype(t, all))
      return {t_inter(result, Type::dyn()), Tier::Gradual};
    fail("non-exhaustive",
         "scrutinee of type " + print_type(t) + " escapes every branch", e->span);
  }

  static TEnv to_tenv(const CheckEnv& env) {
    TEnv out;
    for (const auto& [k, v] : env) out[k] = v.up;
    return out;
  }

  Judgment check_patcase(const CheckEnv& env, const ExprPtr& e,
                         const std::optional<Type>& expected) {
    Judgment js = check(env, e->scrut);
    if (!is_empty_static(js.type.up)) register_case(e, e->clauses.size(), true);
    const Type& t = js.type;
    std::vector<std::pair<PatternPtr, GuardPtr>> branches;
    for (const auto& cl : e->clauses) branches.emplace_back(cl.pats[0], cl.guard);
    std::vector<std::string> ws;
    auto analysis = analyze_branches(to_tenv(env), t.up, branches, &ws);
    for (const auto& w : ws) warn(Tier::Static, "always-false-guard", w, e->span);
    Tier tier = js.tier;
    Type result = Type::none();
    StaticType surely = st_none(), possibly = st_none();
    for (size_t i = 0; i < analysis.size(); ++i) {
      const Clause& cl = e->clauses[i];
      for (const auto& a : analysis[i].accepted) {
        possibly = st_union(possibly, a.type);
        if (a.exact) surely = st_union(surely, a.type);
        if (is_empty_static(a.type)) continue;
        attain(e, i);
        CheckEnv benv = env;
        // the down-extreme stays honest: values of the scrutinee carry
        // static types below its down-extreme, narrowed to this branch
        TEnv down_env = env_of_pattern(st_inter(t.down, a.type), cl.pats[0]);
        for (auto& [k, v] : env_of_pattern(a.type, cl.pats[0])) {
          auto it = down_env.find(k);
          benv[k] = Type::make(it == down_env.end() ? st_none() : it->second, v);
        }
        Judgment bj = check(benv, cl.body, expected);
        result = t_union(result, bj.type);
        tier = tier_max(tier, bj.tier);
      }
    }
    if (subtype(t, Type::of(surely))) return {result, tier};
    if (subtype(t, Type::of(possibly))) {
      warn(Tier::Omega, "non-exhaustive-maybe",
           "pattern matching may not be exhaustive", e->span);
      return {result, tier_max(tier, Tier::Omega)};
    }
    if (gradual_mode && consistent_subtype(t, Type::of(possibly)))
      return {t_inter(result, Type::dyn()), Tier::Gradual};
    fail("non-exhaustive",
         "scrutinee of type " + print_type(t) + " escapes every clause", e->span);
  }

  // ---- inference for unannotated pattern functions ----

  Judgment infer_fn(const CheckEnv& env, const ExprPtr& e,
                    const std::optional<StaticType>& domain_hint, bool propagate) {
    if (e->clauses.empty()) fail("internal", "function without clauses", e->span);
    size_t n = e->clauses.front().pats.size();
    std::vector<std::pair<PatternPtr, GuardPtr>> branches;
    for (const auto& cl : e->clauses) {
      PatternPtr p = n == 1 ? cl.pats[0] : Pattern::mk_tuple(cl.pats);
      branches.emplace_back(p, cl.guard);
    }
    StaticType scrut = domain_hint
                           ? (n == 1 ? tuple_field(*domain_hint, 0) : *domain_hint)
                           : (n == 1 ? st_any()
                                     : st_tuple_of(std::vector<StaticType>(n, st_any()),
                                                   false));
    // a vacuous context domain reaches no clause; that is not redundancy
    if (!is_empty_static(scrut)) register_case(e, e->clauses.size(), true);
    std::vector<std::string> ws;
    auto analysis = analyze_branches(to_tenv(env), scrut, branches, &ws);
    for (const auto& w : ws) warn(Tier::Static, "always-false-guard", w, e->span);
    Tier tier = Tier::Static;
    // the encoded case inside the inference is exhaustive only for the
    // surely accepted region; an inexact domain piece can still escape
    // the match at runtime, which is the omega-rule story
    StaticType surely = st_none();
    for (const auto& b : analysis)
      for (const auto& a : b.accepted)
        if (a.exact) surely = st_union(surely, a.type);
    bool warned_inexact = false;
    std::vector<InterfaceArrow> arrows;
    std::vector<std::pair<StaticType, size_t>> accepted_doms;  // with branch index
    for (size_t i = 0; i < analysis.size(); ++i) {
      for (const auto& a : analysis[i].accepted) {
        if (is_empty_static(a.type)) continue;
        attain(e, i);
        if (!subtype_static(a.type, surely)) {
          tier = tier_max(tier, Tier::Omega);
          if (!warned_inexact) {
            warn(Tier::Omega, "non-exhaustive-maybe",
                 "an inferred domain piece is approximate; applications may "
                 "escape the match",
                 e->span);
            warned_inexact = true;
          }
        }
        accepted_doms.emplace_back(a.type, i);
        CheckEnv benv = env;
        for (auto& [k, v] : env_of_pattern(a.type, branches[i].first))
          benv[k] = Type::of(v);
        Judgment bj = check(benv, e->clauses[i].body);
        tier = tier_max(tier, bj.tier);
        InterfaceArrow arrow;
        if (n == 1) {
          arrow.dom = {Type::of(a.type)};
        } else {
          for (size_t k = 0; k < n; ++k) arrow.dom.push_back(Type::of(tuple_field(a.type, k)));
        }
        arrow.cod = bj.type;
        arrows.push_back(std::move(arrow));
      }
    }
    Type type = Type::any();
    if (arrows.empty()) {
      // no input is ever accepted: every application escapes the match
      std::vector<Type> dom(n, Type::any());
      type = t_arrow_of(dom, Type::none());
      return {type, tier};
    }
    bool first = true;
    std::vector<Type> union_dom(n, Type::none());
    Type union_cod = Type::none();
    for (const auto& a : arrows) {
      Type at = t_arrow_of(a.dom, a.cod);
      type = first ? at : t_inter(type, at);
      first = false;
      for (size_t k = 0; k < n; ++k) union_dom[k] = t_union(union_dom[k], a.dom[k]);
      union_cod = t_union(union_cod, a.cod);
    }
    if (propagate) type = t_inter(type, t_arrow_of(union_dom, Type::dyn()));
    // eager strong promotion at the collapsed arrow
    Type collapsed = t_arrow_of(union_dom, union_cod);
    if (subtype(type, collapsed)) {
      bool saved = in_strong;
      in_strong = true;
      Type st = strong_patlam_body(env, e, branches, analysis);
      in_strong = saved;
      if (subtype(st, t_inter(union_cod, Type::dyn())))
        type = t_inter(type, strong_of(collapsed));
    }
    return {type, tier};
  }

  // promotion inside the strong system: the collapsed arrow of the held
  // interface, provided the body strong-checks at codomain /\ dynamic()
  std::optional<Type> try_promote_strong(const CheckEnv& env,
                                         const std::vector<std::string>& params,
                                         const ExprPtr& body,
                                         const std::vector<InterfaceArrow>& held) {
    std::vector<Type> dom = held.front().dom;
    Type cod = held.front().cod;
    Type plain = t_arrow_of(held.front().dom, held.front().cod);
    for (size_t i = 1; i < held.size(); ++i) {
      for (size_t k = 0; k < dom.size(); ++k) dom[k] = t_union(dom[k], held[i].dom[k]);
      cod = t_union(cod, held[i].cod);
      plain = t_inter(plain, t_arrow_of(held[i].dom, held[i].cod));
    }
    Type collapsed = t_arrow_of(dom, cod);
    if (!subtype(plain, collapsed)) return std::nullopt;
    CheckEnv senv = env;
    for (const auto& p : params) senv[p] = Type::dyn();
    Type st = strong(senv, body);
    if (!subtype(st, t_inter(cod, Type::dyn()))) return std::nullopt;
    return strong_of(collapsed);
  }

  // the whole strong typing of an unannotated function: accepted types
  // from the analysis, bodies strong-typed, the dynamic arrow, and the
  // strong collapsed arrow when it holds
  Type strong_infer(const CheckEnv& env, const ExprPtr& e) {
    if (e->clauses.empty()) return t_fun_n(0);
    size_t n = e->clauses.front().pats.size();
    std::vector<std::pair<PatternPtr, GuardPtr>> branches;
    for (const auto& cl : e->clauses) {
      PatternPtr p = n == 1 ? cl.pats[0] : Pattern::mk_tuple(cl.pats);
      branches.emplace_back(p, cl.guard);
    }
    StaticType scrut =
        n == 1 ? st_any() : st_tuple_of(std::vector<StaticType>(n, st_any()), false);
    auto analysis = analyze_branches(to_tenv(env), scrut, branches, nullptr);
    Type type = t_fun_n(n);
    std::vector<Type> union_dom(n, Type::none());
    Type union_cod = Type::none();
    Type strong_cod = Type::none();
    bool any = false;
    for (size_t i = 0; i < analysis.size(); ++i) {
      for (const auto& a : analysis[i].accepted) {
        if (is_empty_static(a.type)) continue;
        any = true;
        CheckEnv benv = env;
        for (auto& [k, v] : env_of_pattern(a.type, branches[i].first))
          benv[k] = Type::of(v);
        Type cod = strong(benv, e->clauses[i].body);
        std::vector<Type> dom;
        if (n == 1)
          dom = {Type::of(a.type)};
        else
          for (size_t k = 0; k < n; ++k) dom.push_back(Type::of(tuple_field(a.type, k)));
        type = t_inter(type, t_arrow_of(dom, cod));
        for (size_t k = 0; k < n; ++k) union_dom[k] = t_union(union_dom[k], dom[k]);
        union_cod = t_union(union_cod, cod);
        // the strong premise types the branch under dynamic-narrowed bindings
        CheckEnv denv = env;
        for (auto& [k, v] : env_of_pattern(a.type, branches[i].first))
          denv[k] = Type::make(st_none(), v);
        strong_cod = t_union(strong_cod, strong(denv, e->clauses[i].body));
      }
    }
    if (!any) {
      std::vector<Type> dom(n, Type::any());
      return t_arrow_of(dom, Type::none());
    }
    type = t_inter(type, t_arrow_of(union_dom, Type::dyn()));
    Type collapsed = t_arrow_of(union_dom, union_cod);
    if (subtype(type, collapsed) && subtype(strong_cod, t_inter(union_cod, Type::dyn())))
      type = t_inter(type, strong_of(collapsed));
    return type;
  }

  // the strong type of the encoded case body under dynamic parameters
  Type strong_patlam_body(const CheckEnv& env, const ExprPtr& e,
                          const std::vector<std::pair<PatternPtr, GuardPtr>>& branches,
                          const std::vector<BranchAnalysis>& analysis) {
    Type result = Type::none();
    for (size_t i = 0; i < analysis.size(); ++i) {
      for (const auto& a : analysis[i].accepted) {
        if (is_empty_static(a.type)) continue;
        CheckEnv benv = env;
        for (auto& [k, v] : env_of_pattern(a.type, branches[i].first))
          benv[k] = Type::make(st_none(), v);
        result = t_union(result, strong(benv, e->clauses[i].body));
      }
    }
    return result;
  }

  // ---- the strong system (every scope-correct term checks at term()) ----

  Type strong(const CheckEnv& env, const ExprPtr& e) {
    switch (e->k) {
      case Expr::K::Int:
        return t_inter(t_int_singleton(e->ival), Type::dyn());
      case Expr::K::Atom:
        return t_inter(t_atom_singleton(e->aval), Type::dyn());
      case Expr::K::Var: {
        auto it = env.find(e->var);
        if (it == env.end()) fail("scope-error", "unbound variable '" + e->var + "'", e->span);
        return it->second;
      }
      case Expr::K::Tuple: {
        std::vector<Type> ts;
        for (const auto& x : e->args) ts.push_back(strong(env, x));
        return t_tuple_of(ts, false);
      }
      case Expr::K::Lam: {
        // interface arrows whose bodies strong-check at their codomain
        // contribute; the others are simply not usable here (the runtime
        // never enforces annotations)
        bool saved = in_strong;
        in_strong = true;
        std::vector<InterfaceArrow> iface;
        try {
          iface = normalize_interface(e->iface);
        } catch (const TypeError&) {
          iface = e->iface;
        }
        Type type = t_fun_n(e->params.size());
        std::vector<InterfaceArrow> held;
        for (const auto& arrow : iface) {
          if (arrow.dom.size() != e->params.size()) continue;
          CheckEnv benv = env;
          for (size_t i = 0; i < e->params.size(); ++i) benv[e->params[i]] = arrow.dom[i];
          if (subtype(strong(benv, e->body), arrow.cod)) held.push_back(arrow);
        }
        for (const auto& arrow : held)
          type = t_inter(type, t_arrow_of(arrow.dom, arrow.cod));
        if (!held.empty())
          if (auto st = try_promote_strong(env, e->params, e->body, held))
            type = t_inter(type, *st);
        {
          CheckEnv senv = env;
          for (const auto& p : e->params) senv[p] = Type::dyn();
          (void)strong(senv, e->body);  // surface scope errors in dead arrows
        }
        in_strong = saved;
        return type;
      }
      case Expr::K::PatLam: {
        bool saved = in_strong;
        in_strong = true;
        Type t = strong_infer(env, e);
        in_strong = saved;
        return t;
      }
      case Expr::K::App: {
        Type f = strong(env, e->fn);
        std::vector<Type> args;
        for (const auto& x : e->args) args.push_back(strong(env, x));
        size_t n = args.size();
        if (is_empty_static(f.up)) return Type::none();
        StaticType args_up = pack(args, true);
        StaticType args_down = pack(args, false);
        if (subtype_static(f.up, st_fun_n(n))) {
          auto dom_up = fun_domain(f.up, n);
          if (dom_up && subtype_static(args_up, *dom_up)) {
            auto r_down = st_apply(f.down, args_up, n);
            auto r_up = st_apply(f.up, args_up, n);
            if (r_up) {
              StaticType down = r_down ? *r_down : st_none();
              return Type::make(down, st_union(*r_up, down));
            }
          }
        }
        std::optional<Type> best;
        for (const auto& cand : strong_candidates(f)) {
          if (cand.arity() != n) continue;
          Type r = Type::make(st_none(), cand.cod());
          best = best ? t_inter(*best, r) : r;
        }
        if (best) return *best;
        return Type::dyn();
      }
      case Expr::K::Proj: {
        Type ts = strong(env, e->a);
        Type ti = strong(env, e->b);
        if (subtype_static(ts.up, st_tuple())) {
          // exact selection when the index is a known integer set
          if (subtype_static(ti.up, st_int()) && !ti.up.ints.cofinite &&
              !ti.up.ints.xs.empty()) {
            bool ok = true;
            for (int64_t i : ti.up.ints.xs)
              ok = ok && i >= 0 && tuple_all_longer(ts.up, static_cast<size_t>(i));
            if (ok) {
              StaticType down = st_none(), up = st_none();
              for (int64_t i : ti.up.ints.xs) {
                down = st_union(down, tuple_field(ts.down, static_cast<size_t>(i)));
                up = st_union(up, tuple_field(ts.up, static_cast<size_t>(i)));
              }
              return Type::make(down, up);
            }
          }
          auto fields = tuple_fields_union(ts.up);
          if (fields) {
            auto fd = tuple_fields_union(ts.down);
            return Type::make(fd ? *fd : st_none(), *fields);
          }
        }
        return Type::dyn();
      }
      case Expr::K::Size: {
        (void)strong(env, e->a);
        return t_inter(t_int(), Type::dyn());
      }
      case Expr::K::Plus: {
        (void)strong(env, e->a);
        (void)strong(env, e->b);
        return t_inter(t_int(), Type::dyn());
      }
      case Expr::K::TypeCase: {
        Type t = strong(env, e->scrut);
        Type result = Type::none();
        Type prev = Type::none();
        bool narrow = e->scrut->k == Expr::K::Var;
        for (const auto& br : e->tbranches) {
          Type ti = t_diff(t_inter(t, br.test), prev);
          prev = t_union(prev, br.test);
          if (is_empty_static(ti.up)) continue;
          CheckEnv benv = env;
          if (narrow) benv[e->scrut->var] = ti;
          result = t_union(result, strong(benv, br.body));
        }
        return result;
      }
      case Expr::K::PatCase: {
        Type t = strong(env, e->scrut);
        std::vector<std::pair<PatternPtr, GuardPtr>> branches;
        for (const auto& cl : e->clauses) branches.emplace_back(cl.pats[0], cl.guard);
        auto analysis = analyze_branches(to_tenv(env), t.up, branches, nullptr);
        bool dyn_scrut = t.has_dyn();
        Type result = Type::none();
        for (size_t i = 0; i < analysis.size(); ++i) {
          for (const auto& a : analysis[i].accepted) {
            if (is_empty_static(a.type)) continue;
            CheckEnv benv = env;
            for (auto& [k, v] : env_of_pattern(a.type, e->clauses[i].pats[0]))
              benv[k] = dyn_scrut ? Type::make(st_none(), v) : Type::of(v);
            result = t_union(result, strong(benv, e->clauses[i].body));
          }
        }
        return result;
      }
    }
    fail("internal", "unreachable", e->span);
  }

  // ---- attainability audit ----

  void audit() {
    for (const auto& [id, size] : case_sizes) {
      const auto& got = case_attained[id];
      for (size_t i = 0; i < size; ++i)
        if (!got.count(i)) {
          bool pat = case_is_pattern[id];
          warn(Tier::Static, pat ? "redundant-branch" : "unused-branch",
               (pat ? "clause " : "branch ") + std::to_string(i + 1) +
                   " is never reached",
               case_spans[id]);
        }
    }
  }
};

// ---------------------------------------------------------------------------
// Whole-module checking

struct DefReport {
  std::string name;
  std::optional<Judgment> judgment;  // absent when the definition failed
};

struct ModuleReport {
  std::vector<DefReport> defs;
  std::optional<Judgment> main;
  std::vector<Diagnostic> diags;
  bool ok = true;

  Tier tier() const {
    Tier t = Tier::Static;
    for (const auto& d : defs)
      if (d.judgment) t = tier_max(t, d.judgment->tier);
    if (main) t = tier_max(t, main->tier);
    return t;
  }
};

inline ModuleReport check_module(const Module& m, bool gradual_mode = true,
                                 CheckEnv base = {}) {
  ModuleReport report;
  Checker ck;
  ck.gradual_mode = gradual_mode;
  CheckEnv env = std::move(base);
  for (const auto& def : m.defs) {
    if (def.iface_dyn_under_neg)
      ck.warn(Tier::Static, "annotation-dyn-under-negation",
              "dynamic() under negation in annotation of '" + def.name +
                  "'; extremes are used",
              def.span);
    try {
      Judgment j = ck.check(env, def.expr);
      env[def.name] = j.type;
      report.defs.push_back({def.name, j});
    } catch (const TypeError& te) {
      ck.diags.push_back(te.diag);
      report.ok = false;
      report.defs.push_back({def.name, std::nullopt});
      env[def.name] = Type::dyn();
    }
  }
  if (m.main) {
    try {
      report.main = ck.check(env, m.main);
    } catch (const TypeError& te) {
      ck.diags.push_back(te.diag);
      report.ok = false;
    }
  }
  ck.audit();
  // drop duplicate diagnostics from repeated interface-arrow passes
  std::vector<Diagnostic> dedup;
  std::set<std::string> seen;
  for (const auto& d : ck.diags) {
    std::string key = d.code + "@" + std::to_string(d.span.line) + ":" +
                      std::to_string(d.span.col) + ":" + d.message;
    if (seen.insert(key).second) dedup.push_back(d);
  }
  report.diags = std::move(dedup);
  return report;
}

}  // namespace fwx
