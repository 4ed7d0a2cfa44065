#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "fwx/check.hpp"
#include "fwx/compile.hpp"
#include "fwx/fuzz.hpp"
#include "fwx/guards.hpp"
#include "fwx/interp.hpp"
#include "fwx/json_out.hpp"
#include "fwx/parser.hpp"
#include "fwx/phi_oracle.hpp"
#include "fwx/type_parse.hpp"

using namespace fwx;
namespace fs = std::filesystem;

namespace {

Type tp(const std::string& s) { return parse_type(s); }

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void verdict(int n, const std::string& name, bool pass) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << n << ": " << name
            << std::endl;
  CHECK_MESSAGE(pass, "criterion ", n, ": ", name);
}

std::string corpus_dir() {
  const char* d = std::getenv("FWX_CORPUS_DIR");
  return d ? d : "corpus";
}

ModuleReport check_src(const std::string& src, bool gradual = true) {
  return check_module(lower_module(parse_fw_module(src)), gradual);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kNegate =
    "$ (integer() -> integer()) and (boolean() -> boolean())\n"
    "def negate(x) when is_integer(x), do: 0 + x\n"
    "def negate(x) when is_boolean(x), do: case x do true -> false; false -> true end\n";

}  // namespace

TEST_CASE("criterion 1: walkthrough golden suite") {
  Stopwatch sw;
  bool ok = true;
  auto expect = [&](bool cond, const std::string& what) {
    ok = ok && cond;
    CHECK_MESSAGE(cond, what);
  };

  // second({true,42}) : integer(), statically
  {
    ModuleReport r = check_src(slurp(fs::path(corpus_dir()) / "second_static.fwx"));
    expect(r.ok && r.main && equiv(r.main->type, t_int()) &&
               r.main->tier == Tier::Static,
           "second at the static type");
  }
  // second(dyn) : dynamic() at the plain type
  {
    ModuleReport r = check_src(slurp(fs::path(corpus_dir()) / "second_dyn.fwx"));
    expect(r.ok && r.main && equiv(r.main->type, Type::dyn()), "second(dyn) is dynamic()");
  }
  // second_strong(dyn) : integer() and dynamic()
  {
    ModuleReport r = check_src(slurp(fs::path(corpus_dir()) / "second_strong.fwx"));
    expect(r.ok && r.main && equiv(r.main->type, t_inter(t_int(), Type::dyn())),
           "second_strong(dyn) is integer() and dynamic()");
  }
  // inc_second is strong too; the sum of the two applications is an integer
  {
    ModuleReport r = check_src(slurp(fs::path(corpus_dir()) / "inc_second.fwx"));
    expect(r.ok && r.main && subtype(r.main->type, t_int()),
           "inc_second(dyn) + second_strong(dyn) is well typed");
  }
  // negate(dyn) : (integer() or boolean()) and dynamic()
  {
    ModuleReport r = check_src(slurp(fs::path(corpus_dir()) / "negate_intersection.fwx"));
    expect(r.ok && r.main &&
               equiv(r.main->type, tp("(integer() or boolean()) and dynamic()")),
           "negate(dyn) propagates dynamic()");
  }
  // subtract at (dynamic(), dynamic()) -> integer()
  {
    ModuleReport r = check_src(slurp(fs::path(corpus_dir()) / "subtract_dyn.fwx"));
    expect(r.ok, "subtract at dynamic pair");
  }
  // subtract at (integer(), integer()) -> integer() needs the intersection
  {
    ModuleReport good = check_src(slurp(fs::path(corpus_dir()) / "subtract_int.fwx"));
    ModuleReport bad = check_src(slurp(fs::path(corpus_dir()) / "subtract_union_bad.fwx"));
    expect(good.ok && !bad.ok,
           "subtract typechecks only when negate carries the intersection type");
  }
  // negate at integer() -> integer(): redundant clause; at term() -> term(): error
  {
    ModuleReport warn = check_src(slurp(fs::path(corpus_dir()) / "negate_int_iface.fwx"));
    bool has_warn = false;
    for (const auto& d : warn.diags) has_warn = has_warn || d.code == "redundant-branch";
    ModuleReport err = check_src(slurp(fs::path(corpus_dir()) / "negate_term_iface.fwx"));
    bool has_err = false;
    for (const auto& d : err.diags) has_err = has_err || d.code == "non-exhaustive";
    expect(warn.ok && has_warn, "redundant clause warned");
    expect(!err.ok && has_err, "non-exhaustive clauses rejected");
  }
  // test: inference reproduces the four-arrow split
  {
    ModuleReport r = check_src(slurp(fs::path(corpus_dir()) / "test_infer.fwx"));
    REQUIRE(r.ok);
    Type t = r.defs[0].judgment->type;
    Type t1 = tp("({term(), integer(), ..}) -> integer()");
    // the or-rule subtracts the first arm's surely accepted values, so the
    // :int arrow's domain excludes integer second components
    Type t2 = tp("({:int, not integer(), ..}) -> not integer()");
    Type t3 = tp("({boolean()} or {boolean(), not integer(), ..}) -> boolean()");
    Type t4 =
        tp("({not (boolean() or :int), not integer(), ..}) -> not (boolean() or :int)");
    Type tdyn = tp("({term(), term(), ..} or {boolean()}) -> dynamic()");
    expect(subtype(t, t1), "testty1");
    expect(subtype(t, t2), "testty2 (with the or-rule subtraction)");
    expect(subtype(t, t3), "testty3");
    expect(subtype(t, t4), "testty4");
    expect(subtype(t, tdyn), "the dynamic arrow over the full domain");
    // and the coarser rendering with the full {:int, term(), ..} domain
    // is refined by the inferred type
    Type coarse = t_inter(t_inter(t1, tp("({:int, term(), ..}) -> term()")),
                          t_inter(t3, t_inter(t4, tdyn)));
    expect(subtype(t, coarse), "the coarse intersection is refined");
  }
  // test at its other declared domains
  {
    ModuleReport r1 = check_src(slurp(fs::path(corpus_dir()) / "test_domain_tt.fwx"));
    bool maybe = false;
    for (const auto& d : r1.diags) maybe = maybe || d.code == "non-exhaustive-maybe";
    expect(r1.ok && maybe, "{term(), term(), ..} domain warns about exhaustiveness");
    ModuleReport r2 = check_src(slurp(fs::path(corpus_dir()) / "test_bool_first.fwx"));
    bool clean = true;
    for (const auto& d : r2.diags) clean = clean && d.code != "non-exhaustive-maybe";
    expect(r2.ok && clean, "{boolean(), term()} domain is surely exhaustive");
    ModuleReport r3 = check_src(slurp(fs::path(corpus_dir()) / "test_redundant.fwx"));
    bool red = false;
    for (const auto& d : r3.diags) red = red || d.code == "redundant-branch";
    expect(r3.ok && red, "{:int, term(), ..} domain warns about the second clause");
    ModuleReport r4 = check_src(slurp(fs::path(corpus_dir()) / "test_tuple_bad.fwx"));
    expect(!r4.ok, "tuple() domain is rejected");
  }
  // curry and bump
  {
    ModuleReport r = check_src(slurp(fs::path(corpus_dir()) / "curry.fwx"));
    expect(r.ok, "curry typechecks at its declared type");
    ModuleReport b = check_src(slurp(fs::path(corpus_dir()) / "bump_anon.fwx"));
    expect(b.ok && b.main && subtype(b.main->type, t_inter(t_int(), Type::dyn())),
           "bump's anonymous function application");
    Judgment anon = [&] {
      Checker ck;
      return ck.check({}, lower(parse_fw_expr("fn x when is_integer(x) -> x + 1 end")));
    }();
    expect(subtype(anon.type, tp("(integer()) -> (integer() and dynamic())")),
           "the anonymous function refines integer() -> integer() and dynamic()");
  }
  bool in_time = sw.seconds() < 5.0;
  expect(in_time, "golden suite runtime under 5s");
  verdict(1, "walkthrough golden suite", ok);
}

TEST_CASE("criterion 2: quoted subtyping relations") {
  bool ok = true;
  auto expect = [&](bool cond, const std::string& what) {
    ok = ok && cond;
    CHECK_MESSAGE(cond, what);
  };
  Type prec = tp("({dynamic(), dynamic(), ..}) -> dynamic()");
  Type loose = tp("(dynamic()) -> dynamic()");
  // the relations that actually hold between these two declarations:
  // ? -> ? materializes into (and is a subtype of) the tuple-domain arrow,
  // and the two are consistent subtypes both ways
  expect(precision(loose, prec), "(?->?) materializes into ({?,?,..})->?");
  expect(subtype(loose, prec), "(?->?) <= ({?,?,..})->?");
  expect(consistent_subtype(prec, loose) && consistent_subtype(loose, prec),
         "consistent subtyping holds both ways");
  expect(subtype(tp("((integer()) -> integer()) and ((boolean()) -> boolean())"),
                 tp("(integer() or boolean()) -> (integer() or boolean())")),
         "intersection below the union arrow");
  expect(consistent_subtype(tp("(dynamic() or boolean()) -> integer()"),
                            tp("(integer()) -> dynamic()")),
         "(? or bool -> int) consistent below (int -> ?)");
  expect(equiv(tp("{dynamic(), dynamic()}"), tp("dynamic() and {term(), term()}")),
         "{?,?} equivalent to ? and {1,1}");
  expect(equiv(tp("({none(), none()}) -> term()"), tp("(none()) -> term()")),
         "empty tuple domain collapses to the unary function top");
  expect(!equiv(tp("(none(), none()) -> term()"), tp("(none()) -> term()")),
         "the true binary function top differs");
  verdict(2, "documented subtyping relations", ok);
}

TEST_CASE("criterion 3: phi against the iota enumeration") {
  Stopwatch sw;
  FuzzReport r = oracle_phi(0, 500);
  bool ok = r.pass() && r.generated == 500 && sw.seconds() < 30.0;
  verdict(3, "phi oracle, 500 instances", ok);
}

TEST_CASE("criterion 4: gradual normal form") {
  Stopwatch sw;
  std::mt19937_64 rng(4);
  auto pool = [&]() -> Type {
    switch (rng() % 7) {
      case 0: return t_int();
      case 1: return t_bool();
      case 2: return Type::dyn();
      case 3: return t_int_singleton(static_cast<int64_t>(rng() % 3));
      case 4: return t_tuple_of({Type::dyn(), t_int()});
      case 5: return t_arrow_of({Type::dyn()}, t_bool());
      default: return Type::any();
    }
  };
  bool ok = true;
  for (int i = 0; i < 1000 && ok; ++i) {
    Type a = pool(), b = pool(), c = pool();
    Type t;
    switch (rng() % 4) {
      case 0: t = t_union(a, t_inter(b, c)); break;
      case 1: t = t_inter(a, t_union(b, c)); break;
      case 2: t = t_arrow_of({a}, t_union(b, c)); break;
      default: t = t_tuple_of({a, b}); break;
    }
    Type nf = t_union(t_inter(Type::dyn(), dyn_up(t)), dyn_down(t));
    ok = ok && equiv(t, nf);
  }
  ok = ok && sw.seconds() < 10.0;
  verdict(4, "gradual normal form on 1000 types", ok);
}

TEST_CASE("criterion 5: guard analysis brackets the interpreter") {
  Stopwatch sw;
  std::mt19937_64 rng(5);
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };

  std::vector<ValuePtr> base = {
      Value::mk_int(0),  Value::mk_int(1),  Value::mk_int(2),
      Value::mk_atom(atom_true), Value::mk_atom(atom_false),
      Value::mk_atom(intern_atom("a")),
  };
  std::vector<ValuePtr> universe = base;
  universe.push_back(Value::mk_tuple({}));
  for (const auto& a : base) universe.push_back(Value::mk_tuple({a}));
  for (const auto& a : base)
    for (const auto& b : base) universe.push_back(Value::mk_tuple({a, b}));
  for (const auto& a : base)
    universe.push_back(Value::mk_tuple(
        {Value::mk_tuple({a, Value::mk_int(1)}), Value::mk_int(2)}));
  static ExprPtr fn = e_patlam({Clause{{Pattern::mk_var("v")},
                                       Guard::mk_isof(GAtom::mk_var("v"), Type::any()),
                                       e_var("v")}});
  universe.push_back(Value::mk_closure(fn.get(), nullptr));
  REQUIRE(universe.size() <= 2000);

  std::vector<std::string> test_pool = {
      "integer()", "boolean()", "atom()", "tuple()", "{term(), term()}",
      "{integer(), ..}", "0", ":a", "not tuple()", "integer() or boolean()",
      "function()",
  };
  auto rand_pattern = [&](auto&& self, int depth) -> PatternPtr {
    switch (pick(depth > 0 ? 5 : 3)) {
      case 0: return Pattern::mk_var("x");
      case 1: return Pattern::mk_var("y");
      case 2: return Pattern::mk_var("z");
      case 3: {
        std::vector<PatternPtr> es;
        int n = pick(3);
        for (int i = 0; i < n; ++i) es.push_back(self(self, depth - 1));
        return Pattern::mk_tuple(std::move(es));
      }
      default: return Pattern::mk_and(Pattern::mk_var("w"), self(self, depth - 1));
    }
  };
  auto rand_guard = [&](auto&& self, const std::vector<std::string>& vars,
                        int depth) -> GuardPtr {
    auto var = [&] { return GAtom::mk_var(vars[pick((int)vars.size())]); };
    auto atom = [&]() -> GAtomPtr {
      switch (pick(4)) {
        case 0: return var();
        case 1: return GAtom::mk_int(pick(3));
        case 2: return GAtom::mk_proj(var(), GAtom::mk_int(pick(3)));
        default: return GAtom::mk_size(var());
      }
    };
    if (depth <= 0 || pick(3) == 0) {
      switch (pick(4)) {
        case 0: return Guard::mk_isof(var(), tp(test_pool[pick((int)test_pool.size())]));
        case 1:
          return Guard::mk_isof(GAtom::mk_proj(var(), GAtom::mk_int(pick(3))),
                                tp(test_pool[pick((int)test_pool.size())]));
        case 2: return Guard::mk_eq(atom(), atom());
        default: return Guard::mk_neq(atom(), atom());
      }
    }
    switch (pick(3)) {
      case 0:
        return Guard::mk_and(self(self, vars, depth - 1), self(self, vars, depth - 1));
      default:
        return Guard::mk_or(self(self, vars, depth - 1), self(self, vars, depth - 1));
    }
  };

  int pairs = 0;
  int violations = 0;
  while (pairs < 200) {
    size_t nb = 1 + static_cast<size_t>(pick(2));
    std::vector<std::pair<PatternPtr, GuardPtr>> branches;
    for (size_t b = 0; b < nb; ++b) {
      PatternPtr p = rand_pattern(rand_pattern, 2);
      std::vector<std::string> vars;
      pattern_vars(p, vars);
      if (vars.empty()) {
        p = Pattern::mk_and(p, Pattern::mk_var("x"));
        vars.push_back("x");
      }
      branches.emplace_back(p, rand_guard(rand_guard, vars, 2));
    }
    pairs += static_cast<int>(nb);
    auto analysis = analyze_branches(TEnv{}, st_any(), branches);
    for (const auto& v : universe) {
      std::optional<size_t> accepted_at;
      for (size_t i = 0; i < nb && !accepted_at; ++i)
        if (match_guarded(v, branches[i].first, branches[i].second, 10000))
          accepted_at = i;
      for (size_t i = 0; i < nb; ++i) {
        bool in_possibly = false;
        bool all_exact = true;
        for (const auto& a : analysis[i].accepted) {
          in_possibly = in_possibly || member(v, a.type);
          all_exact = all_exact && a.exact;
        }
        // necessity of the possibly accepted types
        if (accepted_at && *accepted_at == i && !in_possibly) ++violations;
        // sufficiency of the surely accepted types
        for (const auto& a : analysis[i].accepted)
          if (a.exact && member(v, a.type) && !(accepted_at && *accepted_at <= i))
            ++violations;
        // tightness when every flag is exact
        if (all_exact && in_possibly && !(accepted_at && *accepted_at <= i))
          ++violations;
      }
    }
  }
  bool ok = violations == 0 && pairs >= 200;
  CHECK(violations == 0);
  verdict(5, "guard analysis vs interpreter (" + std::to_string(pairs) + " pairs, " +
                 std::to_string(universe.size()) + " values, " +
                 std::to_string(sw.seconds()) + "s)",
          ok);
}

TEST_CASE("criterion 6: guard compilation equivalence") {
  // the printed example first
  FwExprPtr e = parse_fw_expr("fn x when not (is_function(x) or is_tuple(x)) -> x end");
  GuardPtr g = compile_guard(e->clauses.front().guard);
  bool printed =
      g->k == Guard::K::And && g->g0->k == Guard::K::IsOf && g->g1->k == Guard::K::IsOf &&
      equiv(g->g0->test, t_neg(t_fun())) && equiv(g->g1->test, t_neg(t_tuple()));

  std::mt19937_64 rng(6);
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  std::vector<ValuePtr> universe = {
      Value::mk_int(0),
      Value::mk_int(2),
      Value::mk_atom(atom_true),
      Value::mk_atom(atom_false),
      Value::mk_atom(intern_atom("a")),
      Value::mk_tuple({}),
      Value::mk_tuple({Value::mk_int(1)}),
      Value::mk_tuple({Value::mk_int(0), Value::mk_atom(atom_true)}),
  };
  static ExprPtr fn = e_patlam({Clause{{Pattern::mk_var("v")},
                                       Guard::mk_isof(GAtom::mk_var("v"), Type::any()),
                                       e_var("v")}});
  universe.push_back(Value::mk_closure(fn.get(), nullptr));

  // FW-guard generator over x, y with boolean connective operands
  std::function<FwGuardPtr(int)> sel = [&](int depth) -> FwGuardPtr {
    switch (pick(depth > 0 ? 6 : 4)) {
      case 0: {
        auto g2 = FwGuard::mk(FwGuard::K::SelInt);
        g2->ival = pick(3);
        return g2;
      }
      case 1: {
        auto g2 = FwGuard::mk(FwGuard::K::SelAtom);
        g2->aval = pick(2) ? atom_true : intern_atom("a");
        return g2;
      }
      case 2:
      case 3: {
        auto g2 = FwGuard::mk(FwGuard::K::SelVar);
        g2->var = pick(2) ? "x" : "y";
        return g2;
      }
      case 4: {
        auto g2 = FwGuard::mk(FwGuard::K::SelElem);
        g2->a = sel(depth - 1);
        auto ix = FwGuard::mk(FwGuard::K::SelInt);
        ix->ival = pick(3);
        g2->b = ix;
        return g2;
      }
      default: {
        auto g2 = FwGuard::mk(FwGuard::K::SelSize);
        g2->a = sel(depth - 1);
        return g2;
      }
    }
  };
  std::function<FwGuardPtr()> check_g = [&]() -> FwGuardPtr {
    FwGuard::K ks[] = {FwGuard::K::IsInteger, FwGuard::K::IsAtom, FwGuard::K::IsBoolean,
                       FwGuard::K::IsTuple, FwGuard::K::IsFunction};
    auto g2 = FwGuard::mk(ks[pick(5)]);
    g2->a = sel(1);
    if (pick(4) == 0) {
      g2->k = FwGuard::K::IsFunctionN;
      g2->arity = pick(2) + 1;
    }
    return g2;
  };
  std::function<FwGuardPtr(int)> gen = [&](int depth) -> FwGuardPtr {
    if (depth <= 0) return check_g();
    switch (pick(8)) {
      case 0:
      case 1: return check_g();
      case 2: {
        auto g2 = FwGuard::mk(FwGuard::K::Not);
        g2->a = gen(depth - 1);
        return g2;
      }
      case 3:
      case 4: {
        auto g2 = FwGuard::mk(pick(2) ? FwGuard::K::And : FwGuard::K::Or);
        g2->a = gen(depth - 1);
        g2->b = gen(depth - 1);
        return g2;
      }
      case 5: {
        auto g2 = FwGuard::mk(pick(2) ? FwGuard::K::Eq : FwGuard::K::Neq);
        g2->a = sel(1);
        g2->b = sel(1);
        return g2;
      }
      default: return check_g();
    }
  };

  // strict-boolean Elixir-style oracle
  struct GOut {
    bool err = false;
    ValuePtr v;
  };
  std::function<GOut(const FwGuardPtr&, const std::map<std::string, ValuePtr>&)> fw_eval =
      [&](const FwGuardPtr& g2, const std::map<std::string, ValuePtr>& env) -> GOut {
    auto val = [](ValuePtr v) { return GOut{false, std::move(v)}; };
    auto boolean = [&](bool b) {
      return val(Value::mk_atom(b ? atom_true : atom_false));
    };
    const GOut error{true, nullptr};
    switch (g2->k) {
      case FwGuard::K::SelInt: return val(Value::mk_int(g2->ival));
      case FwGuard::K::SelAtom: return val(Value::mk_atom(g2->aval));
      case FwGuard::K::SelVar: {
        auto it = env.find(g2->var);
        return it == env.end() ? error : val(it->second);
      }
      case FwGuard::K::SelTuple: {
        std::vector<ValuePtr> es;
        for (const auto& e2 : g2->elems) {
          GOut r = fw_eval(e2, env);
          if (r.err) return error;
          es.push_back(r.v);
        }
        return val(Value::mk_tuple(std::move(es)));
      }
      case FwGuard::K::SelElem: {
        GOut t = fw_eval(g2->a, env);
        if (t.err) return error;
        GOut i = fw_eval(g2->b, env);
        if (i.err) return error;
        if (t.v->k != Value::K::Tuple || i.v->k != Value::K::Int || i.v->i < 0 ||
            static_cast<size_t>(i.v->i) >= t.v->elems.size())
          return error;
        return val(t.v->elems[static_cast<size_t>(i.v->i)]);
      }
      case FwGuard::K::SelSize: {
        GOut t = fw_eval(g2->a, env);
        if (t.err || t.v->k != Value::K::Tuple) return error;
        return val(Value::mk_int(static_cast<int64_t>(t.v->elems.size())));
      }
      case FwGuard::K::IsInteger: {
        GOut r = fw_eval(g2->a, env);
        return r.err ? error : boolean(r.v->k == Value::K::Int);
      }
      case FwGuard::K::IsAtom: {
        GOut r = fw_eval(g2->a, env);
        return r.err ? error : boolean(r.v->k == Value::K::Atom);
      }
      case FwGuard::K::IsBoolean: {
        GOut r = fw_eval(g2->a, env);
        return r.err ? error
                     : boolean(r.v->k == Value::K::Atom &&
                               (r.v->a == atom_true || r.v->a == atom_false));
      }
      case FwGuard::K::IsTuple: {
        GOut r = fw_eval(g2->a, env);
        return r.err ? error : boolean(r.v->k == Value::K::Tuple);
      }
      case FwGuard::K::IsFunction: {
        GOut r = fw_eval(g2->a, env);
        return r.err ? error : boolean(r.v->k == Value::K::Closure);
      }
      case FwGuard::K::IsFunctionN: {
        GOut r = fw_eval(g2->a, env);
        return r.err ? error
                     : boolean(r.v->k == Value::K::Closure &&
                               closure_arity(*r.v) == static_cast<size_t>(g2->arity));
      }
      case FwGuard::K::Not: {
        GOut r = fw_eval(g2->a, env);
        if (r.err || r.v->k != Value::K::Atom) return error;
        if (r.v->a == atom_true) return boolean(false);
        if (r.v->a == atom_false) return boolean(true);
        return error;
      }
      case FwGuard::K::And: {
        GOut l = fw_eval(g2->a, env);
        if (l.err || l.v->k != Value::K::Atom) return error;
        if (l.v->a == atom_false) return boolean(false);
        if (l.v->a != atom_true) return error;
        return fw_eval(g2->b, env);
      }
      case FwGuard::K::Or: {
        GOut l = fw_eval(g2->a, env);
        if (l.err || l.v->k != Value::K::Atom) return error;
        if (l.v->a == atom_true) return boolean(true);
        if (l.v->a != atom_false) return error;
        return fw_eval(g2->b, env);
      }
      case FwGuard::K::Eq:
      case FwGuard::K::Neq: {
        GOut l = fw_eval(g2->a, env);
        if (l.err) return error;
        GOut r = fw_eval(g2->b, env);
        if (r.err) return error;
        bool eq = value_eq(l.v, r.v);
        return boolean(g2->k == FwGuard::K::Eq ? eq : !eq);
      }
    }
    return error;
  };
  auto matched = [&](const FwGuardPtr& g2, const std::map<std::string, ValuePtr>& env) {
    GOut r = fw_eval(g2, env);
    return !r.err && r.v->k == Value::K::Atom && r.v->a == atom_true;
  };

  int violations = 0;
  int guards = 0;
  for (int gi = 0; gi < 500; ++gi) {
    FwGuardPtr fg = pick(5) == 0 ? sel(1) : gen(2);
    ++guards;
    GuardPtr tg = compile_guard(fg);
    GuardPtr ng = compile_neg_guard(fg);
    auto notg = FwGuard::mk(FwGuard::K::Not);
    notg->a = fg;
    for (const auto& vx : universe)
      for (const auto& vy : universe) {
        std::map<std::string, ValuePtr> env{{"x", vx}, {"y", vy}};
        Bindings binds{{"x", vx}, {"y", vy}};
        auto c1 = eval_guard(tg, binds, 100000);
        auto c2 = eval_guard(ng, binds, 100000);
        if (!c1 || !c2 || matched(fg, env) != *c1 || matched(notg, env) != *c2)
          ++violations;
      }
  }
  bool ok = printed && violations == 0 && guards >= 500;
  CHECK(violations == 0);
  CHECK(printed);
  verdict(6, "guard compilation equivalence, 500 guards", ok);
}

TEST_CASE("criterion 7: tiered soundness fuzz, 10000 programs") {
  Stopwatch sw;
  FuzzReport r = fuzz_soundness(0, 10000, 10000);
  bool ok = r.pass() && r.generated == 10000 && sw.seconds() < 120.0;
  for (size_t i = 0; i < r.violations.size() && i < 3; ++i)
    MESSAGE(r.violations[i].program, " expected ", r.violations[i].expected, " observed ",
            r.violations[i].observed);
  verdict(7,
          "soundness fuzz (static " + std::to_string(r.checked_static) + ", omega " +
              std::to_string(r.checked_omega) + ", gradual " +
              std::to_string(r.checked_gradual) + ", " + std::to_string(r.wall_ms) + "ms)",
          ok);
}

TEST_CASE("criterion 8: interface normalization rewrites") {
  bool ok = true;
  auto expect = [&](bool cond, const std::string& what) {
    ok = ok && cond;
    CHECK_MESSAGE(cond, what);
  };
  std::vector<InterfaceArrow> in = {
      {{tp("integer()")}, tp("integer()")},
      {{tp("5")}, tp("5")},
      {{tp("dynamic()")}, tp("dynamic()")},
  };
  auto out = normalize_interface(in);
  expect(out.size() == 3, "three arrows survive");
  auto find_dom = [&](const Type& d) -> const InterfaceArrow* {
    for (const auto& a : out)
      if (equiv(a.dom[0], d)) return &a;
    return nullptr;
  };
  const InterfaceArrow* a1 = find_dom(tp("integer() and not 5"));
  const InterfaceArrow* a2 = find_dom(tp("5"));
  const InterfaceArrow* a3 = find_dom(tp("dynamic() and not 5"));
  expect(a1 && equiv(a1->cod, tp("integer()")), "(int minus 5) -> int");
  expect(a2 && equiv(a2->cod, tp("5")), "5 -> 5");
  expect(a3 && equiv(a3->cod, Type::dyn()), "(? minus 5) -> ?");

  std::vector<InterfaceArrow> in2 = {
      {{tp("dynamic()")}, tp("integer()")},
      {{tp("dynamic()")}, tp("5")},
  };
  auto out2 = normalize_interface(in2);
  expect(out2.size() == 1 && equiv(out2[0].dom[0], Type::dyn()) &&
             equiv(out2[0].cod, tp("integer() or 5")),
         "{? -> int; ? -> 5} merges to {? -> int or 5}");
  verdict(8, "interface normalization rewrites", ok);
}

TEST_CASE("criterion 9: strong promotion and the empirical probe") {
  bool ok = true;
  auto expect = [&](bool cond, const std::string& what) {
    ok = ok && cond;
    CHECK_MESSAGE(cond, what);
  };
  const char* defs =
      "$ {term(), integer()} -> integer()\n"
      "def second_strong(x) when is_integer(elem(x, 1)), do: elem(x, 1)\n"
      "$ {term(), integer()} -> integer()\n"
      "def inc_second(x), do: elem(x, 1) + 1\n"
      "$ integer() -> integer()\n"
      "def id(x), do: x\n"
      "$ (integer() -> integer()) and (boolean() -> boolean())\n"
      "def negate(x) when is_integer(x), do: 0 + x\n"
      "def negate(x) when is_boolean(x), do: case x do true -> false; false -> true "
      "end\n";
  Module m = lower_module(parse_fw_module(defs));
  ModuleReport r = check_module(m, true);
  REQUIRE(r.ok);
  Type strong_arrow = tp("(({term(), integer()}) -> integer())*");
  expect(subtype(r.defs[0].judgment->type, strong_arrow), "second_strong promotes");
  expect(subtype(r.defs[1].judgment->type, strong_arrow), "inc_second promotes");
  expect(!subtype(r.defs[2].judgment->type, tp("((integer()) -> integer())*")),
         "the identity at integer() -> integer() does not promote");
  expect(subtype(r.defs[3].judgment->type,
                 tp("((integer() or boolean()) -> integer() or boolean())*")),
         "negate promotes at its collapsed arrow");

  // 200 random values outside {term(), integer()}: the promoted functions
  // either fail on a check or return integers
  std::mt19937_64 rng(9);
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  Type dom = tp("{term(), integer()}");
  auto outside = [&]() -> ValuePtr {
    while (true) {
      ValuePtr v;
      switch (pick(6)) {
        case 0: v = Value::mk_int(pick(100)); break;
        case 1: v = Value::mk_atom(pick(2) ? atom_true : intern_atom("zzz")); break;
        case 2: v = Value::mk_tuple({}); break;
        case 3: v = Value::mk_tuple({Value::mk_int(pick(5))}); break;
        case 4:
          v = Value::mk_tuple({Value::mk_int(pick(5)), Value::mk_atom(atom_true)});
          break;
        default:
          v = Value::mk_tuple(
              {Value::mk_atom(atom_false), Value::mk_atom(intern_atom("q")),
               Value::mk_int(3)});
          break;
      }
      if (!member(v, dom)) return v;
    }
  };
  int probes = 0, bad = 0;
  for (const auto& name : {std::string("second_strong"), std::string("inc_second")}) {
    const Expr* lam = nullptr;
    for (size_t i = 0; i < m.defs.size(); ++i)
      if (m.defs[i].name == name) lam = m.defs[i].expr.get();
    REQUIRE(lam);
    for (int i = 0; i < 200; ++i) {
      ValuePtr arg = outside();
      ExprPtr alias(std::shared_ptr<const Expr>{}, lam);
      ExprPtr call = e_app(alias, {e_var("arg")});
      Outcome o = evaluate(call, 100000, env_bind(nullptr, "arg", arg));
      ++probes;
      if (o.k == Outcome::K::Value && !member(o.v, t_int())) ++bad;
    }
  }
  // negate outside integer() or boolean(): values must stay in the codomain
  {
    const Expr* lam = nullptr;
    for (size_t i = 0; i < m.defs.size(); ++i)
      if (m.defs[i].name == "negate") lam = m.defs[i].expr.get();
    REQUIRE(lam);
    Type ncod = tp("integer() or boolean()");
    for (int i = 0; i < 200; ++i) {
      ValuePtr arg;
      switch (pick(4)) {
        case 0: arg = Value::mk_atom(intern_atom("zz")); break;
        case 1: arg = Value::mk_tuple({Value::mk_int(pick(3))}); break;
        case 2: arg = Value::mk_tuple({}); break;
        default:
          arg = Value::mk_tuple({Value::mk_atom(atom_true), Value::mk_int(1)});
          break;
      }
      ExprPtr alias(std::shared_ptr<const Expr>{}, lam);
      Outcome o = evaluate(e_app(alias, {e_var("arg")}), 100000,
                           env_bind(nullptr, "arg", arg));
      ++probes;
      if (o.k == Outcome::K::Value && !member(o.v, ncod)) ++bad;
    }
  }
  expect(bad == 0, "no shape violations over " + std::to_string(probes) + " probes");
  verdict(9, "strong promotion with the empirical probe", ok);
}

TEST_CASE("pretty-printing is a fixpoint across the corpus") {
  fs::path dir = corpus_dir();
  int n = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".fwx") continue;
    FwModule m = parse_fw_module(slurp(entry.path()));
    std::string once = fw_module_pretty(m);
    CHECK(fw_module_pretty(parse_fw_module(once)) == once);
    ++n;
  }
  CHECK(n >= 12);
}

TEST_CASE("fuzz reports are reproducible") {
  FuzzReport a = fuzz_soundness(11, 500, 10000);
  FuzzReport b = fuzz_soundness(11, 500, 10000);
  CHECK(a.generated == b.generated);
  CHECK(a.discarded == b.discarded);
  CHECK(a.checked_static == b.checked_static);
  CHECK(a.checked_omega == b.checked_omega);
  CHECK(a.checked_gradual == b.checked_gradual);
  REQUIRE(a.violations.size() == b.violations.size());
  for (size_t i = 0; i < a.violations.size(); ++i)
    CHECK(a.violations[i].program == b.violations[i].program);
}

TEST_CASE("static corpus programs evaluate to values of their type") {
  fs::path dir = corpus_dir();
  int checked = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".fwx") continue;
    Module m = lower_module(parse_fw_module(slurp(entry.path())));
    if (!m.main) continue;
    ModuleReport r = check_module(m, true);
    if (!r.ok || !r.main || r.main->tier != Tier::Static) continue;
    EnvPtr env;
    detail::Fuel f{100000};
    bool defs_ok = true;
    for (const auto& def : m.defs) {
      Outcome o = detail::eval(def.expr, env, f);
      defs_ok = defs_ok && o.is_value();
      if (o.is_value()) env = env_bind(env, def.name, o.v);
    }
    REQUIRE(defs_ok);
    Outcome o = detail::eval(m.main, env, f);
    REQUIRE(o.is_value());
    Checker ck;
    CHECK(fuzzdetail::value_fits(ck, o.v, r.main->type, false));
    ++checked;
  }
  CHECK(checked >= 3);
}

TEST_CASE("golden corpus stays byte-identical") {
  fs::path dir = corpus_dir();
  bool regen = std::getenv("FWX_REGEN") != nullptr;
  int compared = 0;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".fwx") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  REQUIRE(files.size() >= 12);
  for (const auto& src_path : files) {
    std::string src = slurp(src_path);
    nlohmann::json expected_case;
    FwModule fm = parse_fw_module(src);
    Module m = lower_module(fm);
    ModuleReport r = check_module(m, true);
    expected_case["check"] = report_json(r);
    expected_case["run"] = r.ok ? run_json(m, 100000) : nlohmann::json();
    std::string rendered = expected_case.dump(2) + "\n";
    fs::path golden = src_path;
    golden.replace_extension(".expected.json");
    if (regen) {
      std::ofstream out(golden);
      out << rendered;
      continue;
    }
    REQUIRE_MESSAGE(fs::exists(golden), golden.string(), " missing; run with FWX_REGEN=1");
    std::string want = slurp(golden);
    CHECK_MESSAGE(want == rendered, "corpus drift in ", src_path.string());
    ++compared;
  }
  if (!regen) CHECK(compared >= 12);
}
