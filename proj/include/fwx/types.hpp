#pragma once

// Set-theoretic types for Core Elixir, in disjunctive normal form
// partitioned by kind: integers and atoms as finite/cofinite sets,
// tuples as product lines, functions as arity-indexed arrow lines
// (plain and strong). A gradual type is the pair of its two static
// extremes; `dynamic()` is the pair (none, term).

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace fwx {

using Atom = uint32_t;

inline std::vector<std::string>& atom_table() {
  static std::vector<std::string> names{"false", "true"};
  return names;
}
inline Atom intern_atom(const std::string& s) {
  static std::unordered_map<std::string, Atom> ids{{"false", 0u}, {"true", 1u}};
  auto it = ids.find(s);
  if (it != ids.end()) return it->second;
  Atom id = static_cast<Atom>(atom_table().size());
  atom_table().push_back(s);
  ids.emplace(s, id);
  return id;
}
inline const std::string& atom_name(Atom a) { return atom_table()[a]; }
inline constexpr Atom atom_false = 0;
inline constexpr Atom atom_true = 1;

// ---------------------------------------------------------------------------
// Finite-or-cofinite scalar sets

template <class T>
struct FcSet {
  bool cofinite = false;
  std::vector<T> xs;  // sorted unique; the excluded elements when cofinite

  static FcSet none() { return {}; }
  static FcSet all() { return {true, {}}; }
  static FcSet of(T x) { return {false, {x}}; }

  bool is_none() const { return !cofinite && xs.empty(); }
  bool is_all() const { return cofinite && xs.empty(); }
  bool contains(T x) const {
    bool in = std::binary_search(xs.begin(), xs.end(), x);
    return cofinite ? !in : in;
  }
};

template <class T>
std::vector<T> vec_union(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> r;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}
template <class T>
std::vector<T> vec_inter(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}
template <class T>
std::vector<T> vec_diff(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> r;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

template <class T>
FcSet<T> set_neg(const FcSet<T>& a) {
  return {!a.cofinite, a.xs};
}
template <class T>
FcSet<T> set_union(const FcSet<T>& a, const FcSet<T>& b) {
  if (!a.cofinite && !b.cofinite) return {false, vec_union(a.xs, b.xs)};
  if (a.cofinite && !b.cofinite) return {true, vec_diff(a.xs, b.xs)};
  if (!a.cofinite && b.cofinite) return {true, vec_diff(b.xs, a.xs)};
  return {true, vec_inter(a.xs, b.xs)};
}
template <class T>
FcSet<T> set_inter(const FcSet<T>& a, const FcSet<T>& b) {
  return set_neg(set_union(set_neg(a), set_neg(b)));
}
template <class T>
FcSet<T> set_diff(const FcSet<T>& a, const FcSet<T>& b) {
  return set_inter(a, set_neg(b));
}
template <class T>
bool set_subset(const FcSet<T>& a, const FcSet<T>& b) {
  return set_diff(a, b).is_none();
}

// ---------------------------------------------------------------------------
// Structure of the tuple and function parts

struct StaticType;

struct TupleProd {
  std::vector<StaticType> elems;
  bool open = false;  // open: arity >= elems.size(), trailing elements unconstrained
};

struct TupleLine {
  TupleProd pos;
  std::vector<TupleProd> negs;
};

struct FunArrow {
  // domain types followed by the codomain; arity = types.size() - 1
  std::vector<StaticType> types;
  bool strong = false;
  size_t arity() const { return types.size() - 1; }
  const StaticType& cod() const { return types.back(); }
};

struct FunLine {
  std::vector<FunArrow> pos;
  std::vector<FunArrow> negs;
};

using TuplePart = std::vector<TupleLine>;  // union of lines; empty = no tuples
using FunPart = std::vector<FunLine>;      // union of lines; empty = no functions

struct StaticType {
  FcSet<int64_t> ints;
  FcSet<Atom> atoms;
  TuplePart tuples;
  FunPart funs;
};

// ---------------------------------------------------------------------------
// Canonical encoding: total structural order, map keys, dedup

inline void encode(const StaticType& t, std::string& out);

inline void encode(const TupleProd& p, std::string& out) {
  out += p.open ? "O(" : "C(";
  for (const auto& e : p.elems) {
    encode(e, out);
    out += ',';
  }
  out += ')';
}
inline void encode(const TupleLine& l, std::string& out) {
  encode(l.pos, out);
  for (const auto& n : l.negs) {
    out += '!';
    encode(n, out);
  }
}
inline void encode(const FunArrow& a, std::string& out) {
  out += a.strong ? "S(" : "A(";
  for (const auto& e : a.types) {
    encode(e, out);
    out += ',';
  }
  out += ')';
}
inline void encode(const FunLine& l, std::string& out) {
  out += '[';
  for (const auto& p : l.pos) encode(p, out);
  for (const auto& n : l.negs) {
    out += '!';
    encode(n, out);
  }
  out += ']';
}
inline void encode(const StaticType& t, std::string& out) {
  out += t.ints.cofinite ? "i~" : "i";
  for (auto x : t.ints.xs) out += std::to_string(x) + ";";
  out += t.atoms.cofinite ? "a~" : "a";
  {
    std::vector<std::string> names;
    names.reserve(t.atoms.xs.size());
    for (auto a : t.atoms.xs) names.push_back(atom_name(a));
    std::sort(names.begin(), names.end());
    for (auto& n : names) out += n + ";";
  }
  out += 'T';
  for (const auto& l : t.tuples) encode(l, out);
  out += 'F';
  for (const auto& l : t.funs) encode(l, out);
}

template <class T>
std::string encoded(const T& x) {
  std::string s;
  encode(x, s);
  return s;
}

inline bool struct_eq(const StaticType& a, const StaticType& b) {
  return encoded(a) == encoded(b);
}

template <class T>
void sort_dedup_by_encoding(std::vector<T>& v) {
  std::vector<std::pair<std::string, size_t>> keys;
  keys.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) keys.emplace_back(encoded(v[i]), i);
  std::sort(keys.begin(), keys.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<T> out;
  out.reserve(v.size());
  for (size_t i = 0; i < keys.size(); ++i) {
    if (i > 0 && keys[i].first == keys[i - 1].first) continue;
    out.push_back(v[keys[i].second]);
  }
  v = std::move(out);
}

// ---------------------------------------------------------------------------
// Part-level constants and syntactic checks

inline bool is_none_syn(const StaticType& t) {
  return t.ints.is_none() && t.atoms.is_none() && t.tuples.empty() && t.funs.empty();
}

inline TupleProd tuple_univ_prod() { return TupleProd{{}, true}; }
inline TuplePart tuple_univ() { return {TupleLine{tuple_univ_prod(), {}}}; }
inline FunPart fun_univ() { return {FunLine{{}, {}}}; }

// intersection of two product literals; nullopt when the arities are
// incompatible (hence the intersection is syntactically empty)
inline std::optional<TupleProd> prod_inter(const TupleProd& a, const TupleProd& b);

inline StaticType st_none() { return {}; }
inline StaticType st_any() {
  return {FcSet<int64_t>::all(), FcSet<Atom>::all(), tuple_univ(), fun_univ()};
}

inline StaticType st_union(const StaticType& a, const StaticType& b);
inline StaticType st_inter(const StaticType& a, const StaticType& b);
inline StaticType st_neg(const StaticType& a);
inline StaticType st_diff(const StaticType& a, const StaticType& b) {
  return st_inter(a, st_neg(b));
}

// --- tuple part algebra ---

inline std::optional<TupleProd> prod_inter(const TupleProd& a, const TupleProd& b) {
  size_t na = a.elems.size(), nb = b.elems.size();
  bool open;
  size_t n;
  if (a.open && b.open) {
    open = true;
    n = std::max(na, nb);
  } else if (a.open) {
    if (nb < na) return std::nullopt;
    open = false;
    n = nb;
  } else if (b.open) {
    if (na < nb) return std::nullopt;
    open = false;
    n = na;
  } else {
    if (na != nb) return std::nullopt;
    open = false;
    n = na;
  }
  TupleProd r;
  r.open = open;
  r.elems.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const StaticType* x = i < na ? &a.elems[i] : nullptr;
    const StaticType* y = i < nb ? &b.elems[i] : nullptr;
    if (x && y)
      r.elems.push_back(st_inter(*x, *y));
    else
      r.elems.push_back(x ? *x : *y);
  }
  return r;
}

// can a negative literal intersect the positive one at all?
inline bool prod_overlaps(const TupleProd& pos, const TupleProd& neg) {
  if (!pos.open && !neg.open) return pos.elems.size() == neg.elems.size();
  if (!pos.open && neg.open) return pos.elems.size() >= neg.elems.size();
  return true;  // pos open: closed negs of arity >= |pos| and all open negs overlap
}

inline void norm_tuple_line(TupleLine& l, bool& drop) {
  drop = false;
  std::string pk = encoded(l.pos);
  std::vector<TupleProd> negs;
  for (auto& n : l.negs) {
    if (!prod_overlaps(l.pos, n)) continue;  // vacuous negation
    auto both = prod_inter(l.pos, n);
    if (!both) continue;
    if (encoded(*both) == pk) {  // negation covers the positive: empty line
      drop = true;
      return;
    }
    negs.push_back(*both);  // restrict the negation to the positive's space
  }
  sort_dedup_by_encoding(negs);
  l.negs = std::move(negs);
}

inline TuplePart tup_norm(TuplePart p) {
  TuplePart out;
  for (auto& l : p) {
    bool drop;
    norm_tuple_line(l, drop);
    if (!drop) out.push_back(std::move(l));
  }
  sort_dedup_by_encoding(out);
  return out;
}

inline TuplePart tup_union(const TuplePart& a, const TuplePart& b) {
  TuplePart r = a;
  r.insert(r.end(), b.begin(), b.end());
  return tup_norm(std::move(r));
}

inline TuplePart tup_inter(const TuplePart& a, const TuplePart& b) {
  TuplePart r;
  for (const auto& la : a)
    for (const auto& lb : b) {
      auto pos = prod_inter(la.pos, lb.pos);
      if (!pos) continue;
      TupleLine l;
      l.pos = *pos;
      l.negs = la.negs;
      l.negs.insert(l.negs.end(), lb.negs.begin(), lb.negs.end());
      r.push_back(std::move(l));
    }
  return tup_norm(std::move(r));
}

inline TuplePart tup_neg(const TuplePart& a) {
  TuplePart acc = tuple_univ();
  for (const auto& l : a) {
    // complement of one line: !pos or any of the negs
    TuplePart comp;
    comp.push_back(TupleLine{tuple_univ_prod(), {l.pos}});
    for (const auto& n : l.negs) comp.push_back(TupleLine{n, {}});
    acc = tup_inter(acc, comp);
    if (acc.empty()) return acc;
  }
  return acc;
}

// --- function part algebra ---

inline void norm_fun_line(FunLine& l, bool& drop) {
  drop = false;
  if (!l.pos.empty()) {
    size_t n = l.pos.front().arity();
    for (const auto& p : l.pos)
      if (p.arity() != n) {  // arrows of distinct arity are disjoint
        drop = true;
        return;
      }
    std::vector<FunArrow> negs;
    for (auto& g : l.negs)
      if (g.arity() == n) negs.push_back(std::move(g));
    l.negs = std::move(negs);
  }
  sort_dedup_by_encoding(l.pos);
  sort_dedup_by_encoding(l.negs);
  // a negation identical to a positive empties the line
  for (const auto& p : l.pos) {
    std::string pk = encoded(p);
    for (const auto& g : l.negs)
      if (encoded(g) == pk) {
        drop = true;
        return;
      }
  }
}

inline FunPart fun_norm(FunPart p) {
  FunPart out;
  for (auto& l : p) {
    bool drop;
    norm_fun_line(l, drop);
    if (!drop) out.push_back(std::move(l));
  }
  sort_dedup_by_encoding(out);
  return out;
}

inline FunPart fun_union(const FunPart& a, const FunPart& b) {
  FunPart r = a;
  r.insert(r.end(), b.begin(), b.end());
  return fun_norm(std::move(r));
}

inline FunPart fun_inter(const FunPart& a, const FunPart& b) {
  FunPart r;
  for (const auto& la : a)
    for (const auto& lb : b) {
      FunLine l;
      l.pos = la.pos;
      l.pos.insert(l.pos.end(), lb.pos.begin(), lb.pos.end());
      l.negs = la.negs;
      l.negs.insert(l.negs.end(), lb.negs.begin(), lb.negs.end());
      r.push_back(std::move(l));
    }
  return fun_norm(std::move(r));
}

inline FunPart fun_neg(const FunPart& a) {
  FunPart acc = fun_univ();
  for (const auto& l : a) {
    FunPart comp;
    for (const auto& p : l.pos) comp.push_back(FunLine{{}, {p}});
    for (const auto& n : l.negs) comp.push_back(FunLine{{n}, {}});
    if (comp.empty()) return {};  // complement of the whole kind
    acc = fun_inter(acc, comp);
    if (acc.empty()) return acc;
  }
  return acc;
}

// --- whole static types ---

inline StaticType st_union(const StaticType& a, const StaticType& b) {
  return {set_union(a.ints, b.ints), set_union(a.atoms, b.atoms),
          tup_union(a.tuples, b.tuples), fun_union(a.funs, b.funs)};
}
inline StaticType st_inter(const StaticType& a, const StaticType& b) {
  return {set_inter(a.ints, b.ints), set_inter(a.atoms, b.atoms),
          tup_inter(a.tuples, b.tuples), fun_inter(a.funs, b.funs)};
}
inline StaticType st_neg(const StaticType& a) {
  return {set_neg(a.ints), set_neg(a.atoms), tup_neg(a.tuples), fun_neg(a.funs)};
}

inline StaticType st_int() {
  StaticType t;
  t.ints = FcSet<int64_t>::all();
  return t;
}
inline StaticType st_atom() {
  StaticType t;
  t.atoms = FcSet<Atom>::all();
  return t;
}
inline StaticType st_bool() {
  StaticType t;
  t.atoms = {false, {atom_false, atom_true}};
  return t;
}
inline StaticType st_tuple() {
  StaticType t;
  t.tuples = tuple_univ();
  return t;
}
inline StaticType st_fun() {
  StaticType t;
  t.funs = fun_univ();
  return t;
}
inline StaticType st_int_singleton(int64_t n) {
  StaticType t;
  t.ints = FcSet<int64_t>::of(n);
  return t;
}
inline StaticType st_atom_singleton(Atom a) {
  StaticType t;
  t.atoms = FcSet<Atom>::of(a);
  return t;
}
inline StaticType st_tuple_of(std::vector<StaticType> elems, bool open) {
  StaticType t;
  t.tuples = {TupleLine{TupleProd{std::move(elems), open}, {}}};
  return t;
}
inline StaticType st_arrow_of(std::vector<StaticType> doms, StaticType cod,
                              bool strong = false) {
  FunArrow a;
  a.types = std::move(doms);
  a.types.push_back(std::move(cod));
  a.strong = strong;
  StaticType t;
  t.funs = {FunLine{{a}, {}}};
  return t;
}
// the type of all functions of arity n: (none,...,none) -> term
inline StaticType st_fun_n(size_t n) {
  std::vector<StaticType> doms(n, st_none());
  return st_arrow_of(std::move(doms), st_any());
}

// ---------------------------------------------------------------------------
// Gradual types: pair of static extremes (down <= up)

struct Type {
  StaticType down;
  StaticType up;

  static Type of(StaticType s) { return {s, s}; }
  static Type make(StaticType d, StaticType u) {
    // keep `up` union-absorbed so printing and reparsing are stable
    StaticType uu = st_union(u, d);
    return {std::move(d), std::move(uu)};
  }
  static Type none() { return of(st_none()); }
  static Type any() { return of(st_any()); }
  static Type dyn() { return {st_none(), st_any()}; }

  bool has_dyn() const { return !struct_eq(down, up); }
};

inline bool struct_eq(const Type& a, const Type& b) {
  return struct_eq(a.down, b.down) && struct_eq(a.up, b.up);
}

inline Type t_union(const Type& a, const Type& b) {
  return Type::make(st_union(a.down, b.down), st_union(a.up, b.up));
}
inline Type t_inter(const Type& a, const Type& b) {
  return Type::make(st_inter(a.down, b.down), st_inter(a.up, b.up));
}
inline Type t_neg(const Type& a) {
  return Type::make(st_neg(a.up), st_neg(a.down));
}
inline Type t_diff(const Type& a, const Type& b) { return t_inter(a, t_neg(b)); }

enum class TypeOp { Union, Intersect, Negate, Diff };

inline Type combine(TypeOp op, const Type& lhs, const Type* rhs = nullptr) {
  switch (op) {
    case TypeOp::Union: return t_union(lhs, *rhs);
    case TypeOp::Intersect: return t_inter(lhs, *rhs);
    case TypeOp::Negate: return t_neg(lhs);
    case TypeOp::Diff: return t_diff(lhs, *rhs);
  }
  return Type::none();
}

inline Type dyn_up(const Type& t) { return Type::of(t.up); }
inline Type dyn_down(const Type& t) { return Type::of(t.down); }

inline Type t_int() { return Type::of(st_int()); }
inline Type t_atom() { return Type::of(st_atom()); }
inline Type t_bool() { return Type::of(st_bool()); }
inline Type t_tuple() { return Type::of(st_tuple()); }
inline Type t_fun() { return Type::of(st_fun()); }
inline Type t_fun_n(size_t n) { return Type::of(st_fun_n(n)); }
inline Type t_int_singleton(int64_t n) { return Type::of(st_int_singleton(n)); }
inline Type t_atom_singleton(Atom a) { return Type::of(st_atom_singleton(a)); }

inline Type t_tuple_of(const std::vector<Type>& elems, bool open = false) {
  std::vector<StaticType> downs, ups;
  downs.reserve(elems.size());
  ups.reserve(elems.size());
  for (const auto& e : elems) {
    downs.push_back(e.down);
    ups.push_back(e.up);
  }
  return Type::make(st_tuple_of(std::move(downs), open),
                    st_tuple_of(std::move(ups), open));
}

// domains are contravariant: the lower extreme of an arrow takes the
// upper extremes of its domains
inline Type t_arrow_of(const std::vector<Type>& doms, const Type& cod) {
  std::vector<StaticType> dn, up;
  dn.reserve(doms.size());
  up.reserve(doms.size());
  for (const auto& d : doms) {
    dn.push_back(d.up);
    up.push_back(d.down);
  }
  return Type::make(st_arrow_of(std::move(dn), cod.down),
                    st_arrow_of(std::move(up), cod.up));
}

// ---------------------------------------------------------------------------
// Printing (canonical, parseable by parse_type)

inline std::string print_type(const Type& t);
inline std::string print_static(const StaticType& t);

namespace detail {

inline std::string paren_if(bool c, const std::string& s) {
  return c ? "(" + s + ")" : s;
}

// a printed piece plus how tightly it binds: 0 = or, 1 = and, 2 = atom-like
struct Piece {
  std::string text;
  int prec;
};

inline std::string at_prec(const Piece& p, int need) {
  return paren_if(p.prec < need, p.text);
}

inline Piece print_prod(const TupleProd& p) {
  std::string s = "{";
  for (size_t i = 0; i < p.elems.size(); ++i) {
    if (i) s += ", ";
    s += print_static(p.elems[i]);
  }
  if (p.open) {
    if (!p.elems.empty()) s += ", ";
    s += "..";
  }
  s += "}";
  return {s, 2};
}

inline Piece print_arrow(const FunArrow& a) {
  std::string s = "(";
  for (size_t i = 0; i + 1 < a.types.size(); ++i) {
    if (i) s += ", ";
    s += print_static(a.types[i]);
  }
  s += ") -> " + print_static(a.cod());
  if (a.strong) return {"(" + s + ")*", 2};
  return {"(" + s + ")", 2};
}

inline void add_negs(std::string& s, const std::vector<std::string>& negs) {
  for (const auto& n : negs) s += " and not " + n;
}

}  // namespace detail

inline std::string print_static(const StaticType& t) {
  using detail::Piece;
  if (is_none_syn(t)) return "none()";
  if (struct_eq(t, st_any())) return "term()";
  std::vector<Piece> pieces;
  // integers
  if (t.ints.is_all())
    pieces.push_back({"integer()", 2});
  else if (t.ints.cofinite) {
    std::string s = "integer()";
    std::vector<std::string> negs;
    for (auto x : t.ints.xs) negs.push_back(std::to_string(x));
    detail::add_negs(s, negs);
    pieces.push_back({s, 1});
  } else {
    for (auto x : t.ints.xs) pieces.push_back({std::to_string(x), 2});
  }
  // atoms
  auto atom_text = [](Atom a) {
    if (a == atom_true) return std::string("true");
    if (a == atom_false) return std::string("false");
    return ":" + atom_name(a);
  };
  if (t.atoms.is_all())
    pieces.push_back({"atom()", 2});
  else if (struct_eq(([&] {
             StaticType b;
             b.atoms = t.atoms;
             return b;
           })(),
                     st_bool()))
    pieces.push_back({"boolean()", 2});
  else if (t.atoms.cofinite) {
    std::string s = "atom()";
    std::vector<std::string> negs;
    for (auto a : t.atoms.xs) negs.push_back(atom_text(a));
    std::sort(negs.begin(), negs.end());
    detail::add_negs(s, negs);
    pieces.push_back({s, 1});
  } else {
    std::vector<std::string> names;
    for (auto a : t.atoms.xs) names.push_back(atom_text(a));
    std::sort(names.begin(), names.end());
    for (auto& n : names) pieces.push_back({n, 2});
  }
  // tuples
  if (struct_eq(([&] {
        StaticType b;
        b.tuples = t.tuples;
        return b;
      })(),
                st_tuple()))
    pieces.push_back({"tuple()", 2});
  else
    for (const auto& l : t.tuples) {
      std::string s = detail::print_prod(l.pos).text;
      std::vector<std::string> negs;
      for (const auto& n : l.negs) negs.push_back(detail::print_prod(n).text);
      detail::add_negs(s, negs);
      pieces.push_back({s, negs.empty() ? 2 : 1});
    }
  // functions
  if (struct_eq(([&] {
        StaticType b;
        b.funs = t.funs;
        return b;
      })(),
                st_fun()))
    pieces.push_back({"function()", 2});
  else
    for (const auto& l : t.funs) {
      std::vector<std::string> parts;
      for (const auto& p : l.pos) parts.push_back(detail::print_arrow(p).text);
      if (parts.empty()) parts.push_back("function()");
      std::string s = parts[0];
      for (size_t i = 1; i < parts.size(); ++i) s += " and " + parts[i];
      std::vector<std::string> negs;
      for (const auto& n : l.negs) negs.push_back(detail::print_arrow(n).text);
      detail::add_negs(s, negs);
      pieces.push_back({s, (parts.size() + negs.size()) > 1 ? 1 : 2});
    }
  std::string out;
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (i) out += " or ";
    out += pieces[i].text;  // or-level operands: and binds tighter, no parens needed
  }
  return out;
}

// defined in subtype.hpp; used by the printer to drop redundant lines
inline StaticType simplified(const StaticType& t);
inline bool subtype_static(const StaticType& a, const StaticType& b);

inline std::string print_type(const Type& t) {
  StaticType down = simplified(t.down);
  StaticType up = simplified(t.up);
  if (encoded(down) != encoded(up) && subtype_static(up, down)) up = down;
  if (encoded(down) == encoded(up)) return print_static(down);
  if (is_none_syn(down)) {
    if (struct_eq(up, st_any())) return "dynamic()";
    std::string u = print_static(up);
    bool needs = u.find(" or ") != std::string::npos;
    return detail::paren_if(needs, u) + " and dynamic()";
  }
  std::string u = print_static(up);
  return "(" + detail::paren_if(u.find(" or ") != std::string::npos, u) +
         " and dynamic()) or " + print_static(down);
}

}  // namespace fwx
