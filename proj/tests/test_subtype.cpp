#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fwx/phi_oracle.hpp"
#include "fwx/subtype.hpp"
#include "fwx/type_parse.hpp"
#include "fwx/types.hpp"

using namespace fwx;

namespace {
Type tp(const std::string& s) { return parse_type(s); }

StaticType pool_type(std::mt19937_64& rng) {
  switch (rng() % 6) {
    case 0: return st_int();
    case 1: return st_bool();
    case 2: return st_atom();
    case 3: return st_int_singleton(static_cast<int64_t>(rng() % 3));
    case 4: return st_none();
    default: return st_any();
  }
}

FunArrow rand_arrow(std::mt19937_64& rng, size_t n) {
  FunArrow a;
  for (size_t i = 0; i <= n; ++i) a.types.push_back(pool_type(rng));
  return a;
}
}  // namespace

TEST_CASE("documented subtyping relations") {
  // the "more precise" declaration for second: ? -> ? materializes into
  // {?,?,..} -> ?, which is also where subtyping on the extremes points
  Type prec = tp("({dynamic(), dynamic(), ..}) -> dynamic()");
  Type loose = tp("(dynamic()) -> dynamic()");
  CHECK(precision(loose, prec));
  CHECK(subtype(loose, prec));
  CHECK(consistent_subtype(prec, loose));
  CHECK(consistent_subtype(loose, prec));
  // (int -> int) and (bool -> bool) <= (int or bool -> int or bool)
  CHECK(subtype(tp("((integer()) -> integer()) and ((boolean()) -> boolean())"),
                tp("(integer() or boolean()) -> (integer() or boolean())")));
  // consistent subtyping example
  CHECK(consistent_subtype(tp("(dynamic() or boolean()) -> integer()"),
                           tp("(integer()) -> dynamic()")));
  // {?,?} == ? and {1,1}
  CHECK(equiv(tp("{dynamic(), dynamic()}"),
              tp("dynamic() and {term(), term()}")));
  // unary arrow with empty tuple domain == unary arrow with empty domain,
  // while the true binary type is different
  CHECK(equiv(tp("({none(), none()}) -> term()"), tp("(none()) -> term()")));
  CHECK(!equiv(tp("(none(), none()) -> term()"), tp("(none()) -> term()")));
  CHECK(!subtype(tp("(none(), none()) -> term()"), tp("(none()) -> term()")));
}

TEST_CASE("arrows of different arity are disjoint") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 40; ++i) {
    StaticType t = pool_type(rng), s = pool_type(rng);
    StaticType a1 = st_arrow_of({t}, s);
    StaticType a2 = st_arrow_of({t, t}, s);
    CHECK(is_empty_static(st_inter(a1, a2)));
  }
}

TEST_CASE("phi base cases and reflexivity") {
  FunArrow ii;
  ii.types = {st_int(), st_int()};
  CHECK(phi({st_int()}, st_neg(st_int()), {ii}));
  // every binary function <= (none(), none()) -> term()
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    std::vector<FunArrow> P;
    for (size_t k = 0; k < rng() % 3; ++k) P.push_back(rand_arrow(rng, 2));
    CHECK(phi({st_none(), st_none()}, st_neg(st_any()), P));
  }
}

TEST_CASE("phi agrees with the iota-enumeration oracle") {
  std::mt19937_64 rng(11);
  int count = 0;
  for (int i = 0; i < 500; ++i) {
    size_t n = 1 + rng() % 3;
    std::vector<FunArrow> P;
    size_t m = rng() % 5;
    for (size_t k = 0; k < m; ++k) P.push_back(rand_arrow(rng, n));
    FunArrow neg = rand_arrow(rng, n);
    bool a = phi_decides(P, neg);
    bool b = phi_oracle(P, neg);
    CHECK(a == b);
    ++count;
  }
  CHECK(count == 500);
}

TEST_CASE("precision") {
  CHECK(precision(Type::dyn(), t_int()));
  CHECK(!precision(t_int(), Type::dyn()));
  CHECK(precision(tp("{dynamic(), dynamic()}"), tp("{integer(), boolean()}")));
  CHECK(precision(Type::dyn(), tp("{integer(), boolean()}")));
}

TEST_CASE("consistent subtyping") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    StaticType s = pool_type(rng);
    Type t = Type::of(s);
    CHECK(consistent_subtype(t, t));
  }
  CHECK(!consistent_subtype(t_int(), t_bool()));
  CHECK(consistent_subtype(Type::dyn(), t_int()));
  CHECK(consistent_subtype(t_int(), Type::dyn()));
}

TEST_CASE("subtype is a preorder on samples") {
  std::mt19937_64 rng(23);
  std::vector<Type> sample;
  for (int i = 0; i < 12; ++i) {
    StaticType a = pool_type(rng), b = pool_type(rng);
    sample.push_back(Type::of(st_union(a, b)));
    sample.push_back(Type::of(st_inter(a, st_neg(b))));
  }
  for (const auto& t : sample) CHECK(subtype(t, t));
  for (const auto& a : sample)
    for (const auto& b : sample)
      for (const auto& c : sample)
        if (subtype(a, b) && subtype(b, c)) CHECK(subtype(a, c));
}

TEST_CASE("materialization witnesses imply consistent subtyping") {
  // any sampled pair of materializations t1' of t1 and t2' of t2 with
  // t1' <= t2' witnesses t1 <~ t2
  std::mt19937_64 rng(41);
  auto rnd = [&]() -> StaticType { return pool_type(rng); };
  for (int i = 0; i < 120; ++i) {
    Type t1 = t_union(t_inter(Type::dyn(), Type::of(rnd())), Type::of(rnd()));
    Type t2 = t_union(t_inter(Type::dyn(), Type::of(rnd())), Type::of(rnd()));
    for (int k = 0; k < 4; ++k) {
      // a materialization lies between the extremes
      StaticType m1 = st_union(t1.down, st_inter(rnd(), t1.up));
      StaticType m2 = st_union(t2.down, st_inter(rnd(), t2.up));
      CHECK(precision(t1, Type::of(m1)));
      CHECK(precision(t2, Type::of(m2)));
      if (subtype_static(m1, m2)) CHECK(consistent_subtype(t1, t2));
    }
    // and the canonical witnesses always work when the relation holds
    if (consistent_subtype(t1, t2)) CHECK(subtype_static(t1.down, t2.up));
  }
}

TEST_CASE("gradual normal form: t == (? and up) or down") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 200; ++i) {
    StaticType a = pool_type(rng), b = pool_type(rng);
    Type t = t_union(t_inter(Type::dyn(), Type::of(st_union(a, b))),
                     Type::of(st_inter(a, b)));
    Type nf = t_union(t_inter(Type::dyn(), dyn_up(t)), dyn_down(t));
    CHECK(equiv(t, nf));
  }
  Type arr = tp("(dynamic()) -> integer()");
  CHECK(equiv(arr, t_union(t_inter(Type::dyn(), dyn_up(arr)), dyn_down(arr))));
}

TEST_CASE("strong arrow containment") {
  // (t -> s)* and not (t -> s)* is empty
  Type ii_star = tp("((integer()) -> integer())*");
  CHECK(is_empty(t_inter(ii_star, t_neg(ii_star))));
  // intersection of strong arrows collapses: <= (int or bool -> none())*
  Type both = t_inter(tp("((integer()) -> integer())*"),
                      tp("((boolean()) -> boolean())*"));
  CHECK(subtype(both, tp("((integer() or boolean()) -> none())*")));
  // a strong arrow is a subtype of its plain arrow
  CHECK(subtype(ii_star, tp("(integer()) -> integer()")));
  CHECK(!subtype(tp("(integer()) -> integer()"), ii_star));
  // (1 -> t)* == 1 -> t and (t -> 1)* == t -> 1
  CHECK(equiv(tp("((term()) -> integer())*"), tp("(term()) -> integer()")));
  CHECK(equiv(tp("((integer()) -> term())*"), tp("(integer()) -> term()")));
}

TEST_CASE("strong vs plain containment on hand-picked instances") {
  // (t -> s) and (c -> d)* <= (a -> b) iff a <= t or c, and
  // for all J: a <= union or codomain intersection <= b
  Type lhs = t_inter(tp("(integer()) -> integer()"),
                     tp("((boolean()) -> false)*"));
  CHECK(subtype(lhs, tp("(integer() or boolean()) -> (integer() or false)")));
  CHECK(!subtype(lhs, tp("(integer() or boolean()) -> integer()")));
  CHECK(subtype(lhs, tp("(boolean()) -> false")));
  CHECK(!subtype(lhs, tp("(atom()) -> term()")));  // atoms beyond bool not covered
}

TEST_CASE("strong_of on static and gradual arrows") {
  // strong_of(1 -> t) == 1 -> t
  CHECK(equiv(strong_of(tp("(term()) -> integer()")), tp("(term()) -> integer()")));
  // strong_of(? -> ?) == (1 -> 0) or ((0 -> 1) and ?)
  Type s = strong_of(tp("(dynamic()) -> dynamic()"));
  Type expect = t_union(tp("(term()) -> none()"),
                        t_inter(tp("(none()) -> term()"), Type::dyn()));
  CHECK(equiv(s, expect));
  // strong_of(? -> int) == (1 -> int) or ((0 -> int)* and ?)
  Type s2 = strong_of(tp("(dynamic()) -> integer()"));
  Type expect2 = t_union(tp("(term()) -> integer()"),
                         t_inter(tp("((none()) -> integer())*"), Type::dyn()));
  CHECK(equiv(s2, expect2));
  CHECK_THROWS(strong_of(t_int()));
}

TEST_CASE("is_empty rejects gradual input") {
  CHECK_THROWS_AS((void)is_empty(Type::dyn()), std::invalid_argument);
}

TEST_CASE("application helper") {
  StaticType negate = st_inter(st_arrow_of({st_int()}, st_int()),
                               st_arrow_of({st_bool()}, st_bool()));
  auto pack1 = [](StaticType t) { return st_tuple_of({std::move(t)}, false); };
  auto r1 = st_apply(negate, pack1(st_int()), 1);
  REQUIRE(r1.has_value());
  CHECK(equiv_static(*r1, st_int()));
  auto r2 = st_apply(negate, pack1(st_union(st_int(), st_bool())), 1);
  REQUIRE(r2.has_value());
  CHECK(equiv_static(*r2, st_union(st_int(), st_bool())));
  CHECK(!st_apply(negate, pack1(st_atom()), 1).has_value());
  auto dom = fun_domain(negate, 1);
  REQUIRE(dom.has_value());
  CHECK(equiv_static(*dom, pack1(st_union(st_int(), st_bool()))));
}

TEST_CASE("tuple field helpers") {
  Type t = tp("{boolean(), integer()}");
  CHECK(equiv_static(tuple_field(t.up, 1), st_int()));
  CHECK(equiv_static(tuple_field(t.up, 0), st_bool()));
  CHECK(equiv_static(tuple_field(t.up, 2), st_none()));
  // negated-line projection: ({1,1} \ {{1,1},1}) field 0 = not {1,1}
  Type d = t_diff(tp("{term(), term()}"), tp("{{term(), term()}, term()}"));
  CHECK(equiv_static(tuple_field(d.up, 0), st_neg(st_tuple_of({st_any(), st_any()}, false))));
  CHECK(tuple_all_longer(t.up, 1));
  CHECK(!tuple_all_longer(t.up, 2));
  auto b = tuple_arity_bound(tp("{integer()} or {integer(), atom()}").up);
  REQUIRE(b.has_value());
  CHECK(*b == 2);
  CHECK(!tuple_arity_bound(tp("{integer(), ..}").up).has_value());
  auto fu = tuple_fields_union(tp("{integer()} or {boolean(), :z}").up);
  REQUIRE(fu.has_value());
  CHECK(equiv_static(*fu, st_union(st_union(st_int(), st_bool()),
                                   st_atom_singleton(intern_atom("z")))));
}

TEST_CASE("strong candidates extraction") {
  Type lam = t_inter(t_inter(tp("(integer()) -> integer()"),
                             tp("(boolean()) -> boolean()")),
                     tp("((integer() or boolean()) -> integer() or boolean())*"));
  auto cands = strong_candidates(lam);
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].strong);
  CHECK(equiv_static(cands[0].types[0], st_union(st_int(), st_bool())));
}
