#pragma once

// Emptiness and subtyping for the canonical types: per-kind decomposition,
// the backtrack-free multi-arity arrow decision, strong-arrow containment,
// and the gradual relations derived from the two static extremes.

#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fwx/types.hpp"

namespace fwx {

inline bool subtype_cache_enabled() {
  static const bool on = [] {
    const char* e = std::getenv("FWX_SUBTYPE_CACHE");
    return !(e && std::string(e) == "off");
  }();
  return on;
}

inline bool is_empty_static(const StaticType& t);

inline bool subtype_static(const StaticType& a, const StaticType& b) {
  return is_empty_static(st_diff(a, b));
}
inline bool equiv_static(const StaticType& a, const StaticType& b) {
  return subtype_static(a, b) && subtype_static(b, a);
}

// ---------------------------------------------------------------------------
// Closed products of a fixed arity

// P \ (N0 u N1 u ...) = empty?
inline bool closed_prod_diff_empty(const std::vector<StaticType>& pos,
                                   const std::vector<std::vector<StaticType>>& negs,
                                   size_t from = 0) {
  for (const auto& c : pos)
    if (is_empty_static(c)) return true;
  if (from == negs.size()) return false;
  const auto& n = negs[from];
  // P \ N splits into one branch per coordinate; arity 0 has no branches
  // (the negative covers the unit tuple entirely)
  for (size_t k = 0; k < pos.size(); ++k) {
    std::vector<StaticType> next = pos;
    next[k] = st_diff(pos[k], n[k]);
    if (!closed_prod_diff_empty(next, negs, from + 1)) return false;
  }
  return true;
}

// i-th field of P \ (negs...), assuming i < arity
inline StaticType closed_prod_field(size_t i, const std::vector<StaticType>& pos,
                                    const std::vector<std::vector<StaticType>>& negs,
                                    size_t from = 0) {
  for (const auto& c : pos)
    if (is_empty_static(c)) return st_none();
  if (from == negs.size()) return pos[i];
  const auto& n = negs[from];
  StaticType r = st_none();
  for (size_t k = 0; k < pos.size(); ++k) {
    std::vector<StaticType> next = pos;
    next[k] = st_diff(pos[k], n[k]);
    r = st_union(r, closed_prod_field(i, next, negs, from + 1));
  }
  return r;
}

namespace detail {

// expand a product literal to a fixed-arity vector of element types
inline std::optional<std::vector<StaticType>> expand_prod(const TupleProd& p, size_t a) {
  if (p.open ? p.elems.size() > a : p.elems.size() != a) return std::nullopt;
  std::vector<StaticType> v = p.elems;
  v.resize(a, st_any());
  return v;
}

// concrete arities at which the line can be inhabited, plus whether the
// open representative class (all arities > max mentioned) applies
struct ArityClasses {
  std::vector<size_t> concrete;
  bool open_rep = false;
  size_t rep_arity = 0;
};

inline ArityClasses line_arities(const TupleLine& l) {
  size_t m = l.pos.elems.size();
  for (const auto& n : l.negs) m = std::max(m, n.elems.size());
  ArityClasses r;
  if (!l.pos.open) {
    r.concrete.push_back(l.pos.elems.size());
    return r;
  }
  for (size_t a = l.pos.elems.size(); a <= m; ++a) r.concrete.push_back(a);
  r.open_rep = true;
  r.rep_arity = m + 1;
  return r;
}

inline std::vector<std::vector<StaticType>> expand_negs(const std::vector<TupleProd>& negs,
                                                        size_t a, bool rep) {
  std::vector<std::vector<StaticType>> out;
  for (const auto& n : negs) {
    if (rep && !n.open) continue;  // a closed literal cannot reach the representative class
    if (auto v = expand_prod(n, a)) out.push_back(std::move(*v));
  }
  return out;
}

}  // namespace detail

inline bool tuple_line_empty(const TupleLine& l) {
  auto cls = detail::line_arities(l);
  for (size_t a : cls.concrete) {
    auto pos = detail::expand_prod(l.pos, a);
    if (!pos) continue;
    if (!closed_prod_diff_empty(*pos, detail::expand_negs(l.negs, a, false))) return false;
  }
  if (cls.open_rep) {
    auto pos = detail::expand_prod(l.pos, cls.rep_arity);
    if (pos &&
        !closed_prod_diff_empty(*pos, detail::expand_negs(l.negs, cls.rep_arity, true)))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Arrows: Phi decision for plain multi-arity arrows

// decides /\P <= (doms) -> s when called as phi(doms, not s, P)
inline bool phi(const std::vector<StaticType>& doms, const StaticType& t,
                const std::vector<FunArrow>& arrows, size_t from = 0) {
  if (from == arrows.size()) {
    for (const auto& d : doms)
      if (is_empty_static(d)) return true;
    return is_empty_static(t);
  }
  const FunArrow& a = arrows[from];
  if (!phi(doms, st_inter(t, a.cod()), arrows, from + 1)) return false;
  for (size_t k = 0; k < doms.size(); ++k) {
    std::vector<StaticType> next = doms;
    next[k] = st_diff(doms[k], a.types[k]);
    if (!phi(next, t, arrows, from + 1)) return false;
  }
  return true;
}

namespace detail {

inline StaticType dom_prod(const FunArrow& a) {
  std::vector<StaticType> ds(a.types.begin(), a.types.end() - 1);
  return st_tuple_of(std::move(ds), false);
}
inline StaticType full_prod(size_t n) {
  return st_tuple_of(std::vector<StaticType>(n, st_any()), false);
}

// /\I /\ (C->d)* <= (A->b) per the intersection-with-one-strong containment
inline bool strong_vs_plain(const std::vector<FunArrow>& plain, const StaticType& domC,
                            const StaticType& codD, const FunArrow& neg) {
  StaticType a = dom_prod(neg);
  const StaticType& b = neg.cod();
  StaticType all = domC;
  for (const auto& p : plain) all = st_union(all, dom_prod(p));
  if (!subtype_static(a, all)) return false;
  size_t m = plain.size();
  for (size_t mask = 0; mask < (size_t(1) << m); ++mask) {
    StaticType uj = st_none();
    StaticType cods = codD;
    for (size_t i = 0; i < m; ++i) {
      if (mask & (size_t(1) << i))
        uj = st_union(uj, dom_prod(plain[i]));
      else
        cods = st_inter(cods, plain[i].cod());
    }
    if (subtype_static(a, uj)) continue;
    if (subtype_static(cods, b)) continue;
    return false;
  }
  return true;
}

// /\I /\ (C->d)* <= (A->b)* with A nonempty: the first disjunct must cover
// the whole input space, not just A
inline bool strong_vs_strong(const std::vector<FunArrow>& plain, const StaticType& domC,
                             const StaticType& codD, const FunArrow& neg) {
  StaticType a = dom_prod(neg);
  const StaticType& b = neg.cod();
  size_t n = neg.arity();
  StaticType all = domC;
  for (const auto& p : plain) all = st_union(all, dom_prod(p));
  if (!subtype_static(a, all)) return false;
  size_t m = plain.size();
  for (size_t mask = 0; mask < (size_t(1) << m); ++mask) {
    StaticType uj = st_none();
    StaticType cods = codD;
    for (size_t i = 0; i < m; ++i) {
      if (mask & (size_t(1) << i))
        uj = st_union(uj, dom_prod(plain[i]));
      else
        cods = st_inter(cods, plain[i].cod());
    }
    if (subtype_static(full_prod(n), uj)) continue;
    if (subtype_static(cods, b)) continue;
    return false;
  }
  return true;
}

}  // namespace detail

inline bool fun_line_empty(const FunLine& l) {
  if (l.pos.empty()) return false;  // some arity is always left unconstrained
  size_t n = l.pos.front().arity();
  for (const auto& p : l.pos)
    if (p.arity() != n) return true;
  std::vector<FunArrow> plain, strong, negs;
  for (const auto& p : l.pos) (p.strong ? strong : plain).push_back(p);
  for (const auto& g : l.negs)
    if (g.arity() == n) negs.push_back(g);
  if (negs.empty()) return false;
  // collapse the strong positives into a single (union of domains ->
  // intersection of codomains)*
  bool has_strong = !strong.empty();
  StaticType domC = st_none();
  StaticType codD = st_any();
  for (const auto& s : strong) {
    domC = st_union(domC, detail::dom_prod(s));
    codD = st_inter(codD, s.cod());
  }
  for (const auto& g : negs) {
    if (!g.strong) {
      if (has_strong) {
        if (detail::strong_vs_plain(plain, domC, codD, g)) return true;
      } else {
        std::vector<StaticType> doms(g.types.begin(), g.types.end() - 1);
        if (phi(doms, st_neg(g.cod()), plain)) return true;
      }
    } else {
      // an empty strong domain denotes the whole arity-n function space
      if (is_empty_static(detail::dom_prod(g))) return true;
      if (detail::strong_vs_strong(plain, has_strong ? domC : st_none(),
                                   has_strong ? codD : st_any(), g))
        return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Emptiness with memoization

namespace detail {
inline std::unordered_map<std::string, bool>& empty_cache() {
  static thread_local std::unordered_map<std::string, bool> m;
  return m;
}
}  // namespace detail

inline bool is_empty_static(const StaticType& t) {
  if (!t.ints.is_none() || !t.atoms.is_none()) return false;
  if (t.tuples.empty() && t.funs.empty()) return true;
  std::string key;
  bool use_cache = subtype_cache_enabled();
  if (use_cache) {
    key = encoded(t);
    auto it = detail::empty_cache().find(key);
    if (it != detail::empty_cache().end()) return it->second;
  }
  bool result = true;
  for (const auto& l : t.tuples)
    if (!tuple_line_empty(l)) {
      result = false;
      break;
    }
  if (result)
    for (const auto& l : t.funs)
      if (!fun_line_empty(l)) {
        result = false;
        break;
      }
  if (use_cache) detail::empty_cache().emplace(std::move(key), result);
  return result;
}

// ---------------------------------------------------------------------------
// Gradual relations

inline bool subtype(const Type& a, const Type& b) {
  return subtype_static(a.down, b.down) && subtype_static(a.up, b.up);
}
inline bool precision(const Type& a, const Type& b) {
  return subtype_static(a.down, b.down) && subtype_static(b.up, a.up);
}
inline bool consistent_subtype(const Type& a, const Type& b) {
  return subtype_static(a.down, b.up);
}
inline bool equiv(const Type& a, const Type& b) {
  return subtype(a, b) && subtype(b, a);
}

inline bool is_empty(const Type& t) {
  if (t.has_dyn()) throw std::invalid_argument("is_empty: gradual type");
  return is_empty_static(t.down);
}

// ---------------------------------------------------------------------------
// Tuple projection and size helpers

// the i-th field of the tuple portion; values lacking a field i contribute none
inline StaticType tuple_field(const StaticType& t, size_t i) {
  StaticType r = st_none();
  for (const auto& l : t.tuples) {
    auto cls = detail::line_arities(l);
    for (size_t a : cls.concrete) {
      if (a <= i) continue;
      auto pos = detail::expand_prod(l.pos, a);
      if (!pos) continue;
      r = st_union(r, closed_prod_field(i, *pos, detail::expand_negs(l.negs, a, false)));
    }
    if (cls.open_rep) {
      size_t a = std::max(cls.rep_arity, i + 1);
      auto pos = detail::expand_prod(l.pos, a);
      if (pos)
        r = st_union(r, closed_prod_field(i, *pos, detail::expand_negs(l.negs, a, true)));
    }
  }
  return r;
}

// true when every tuple in t has more than i elements
inline bool tuple_all_longer(const StaticType& t, size_t i) {
  StaticType open = st_tuple_of(std::vector<StaticType>(i + 1, st_any()), true);
  StaticType tup;
  tup.tuples = t.tuples;
  return subtype_static(tup, open);
}

// maximum arity when bounded (all-closed), nullopt when arbitrarily long
// tuples are possible; none() part gives 0
inline std::optional<size_t> tuple_arity_bound(const StaticType& t) {
  size_t m = 0;
  for (const auto& l : t.tuples) {
    auto cls = detail::line_arities(l);
    if (cls.open_rep) {
      auto pos = detail::expand_prod(l.pos, cls.rep_arity);
      if (pos &&
          !closed_prod_diff_empty(*pos, detail::expand_negs(l.negs, cls.rep_arity, true)))
        return std::nullopt;
    }
    for (size_t a : cls.concrete) {
      auto pos = detail::expand_prod(l.pos, a);
      if (!pos) continue;
      if (!closed_prod_diff_empty(*pos, detail::expand_negs(l.negs, a, false)))
        m = std::max(m, a);
    }
  }
  return m;
}

// exact set of inhabited tuple sizes when bounded
inline std::optional<std::vector<size_t>> tuple_sizes(const StaticType& t) {
  std::vector<size_t> out;
  for (const auto& l : t.tuples) {
    auto cls = detail::line_arities(l);
    if (cls.open_rep) {
      auto pos = detail::expand_prod(l.pos, cls.rep_arity);
      if (pos &&
          !closed_prod_diff_empty(*pos, detail::expand_negs(l.negs, cls.rep_arity, true)))
        return std::nullopt;
    }
    for (size_t a : cls.concrete) {
      auto pos = detail::expand_prod(l.pos, a);
      if (!pos) continue;
      if (!closed_prod_diff_empty(*pos, detail::expand_negs(l.negs, a, false)))
        out.push_back(a);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// union of all fields of all inhabited tuples (requires a bounded arity)
inline std::optional<StaticType> tuple_fields_union(const StaticType& t) {
  auto bound = tuple_arity_bound(t);
  if (!bound) return std::nullopt;
  StaticType r = st_none();
  for (size_t i = 0; i < *bound; ++i) r = st_union(r, tuple_field(t, i));
  return r;
}

// ---------------------------------------------------------------------------
// Function domain and application

// safe domain of the arity-n function portion, encoded as a closed product
inline std::optional<StaticType> fun_domain(const StaticType& t, size_t n) {
  StaticType dom = detail::full_prod(n);
  bool seen = false;
  for (const auto& l : t.funs) {
    if (fun_line_empty(l)) continue;
    seen = true;
    StaticType d = st_none();
    bool any = false;
    for (const auto& p : l.pos) {
      if (p.arity() != n) return std::nullopt;  // inhabited foreign-arity line
      d = st_union(d, detail::dom_prod(p));
      any = true;
    }
    if (!any) return std::nullopt;  // unconstrained functions in t
    dom = st_inter(dom, d);
  }
  if (!seen) return st_none();  // no function values at all
  return dom;
}

// minimal codomain of applying t (whose function part must cover argsProd)
// to arguments packed as the closed product argsProd
inline std::optional<StaticType> st_apply(const StaticType& t, const StaticType& argsProd,
                                          size_t n) {
  if (is_empty_static(argsProd)) return st_none();
  StaticType result = st_none();
  bool seen_line = false;
  for (const auto& l : t.funs) {
    if (fun_line_empty(l)) continue;
    seen_line = true;
    std::vector<FunArrow> pos;
    for (const auto& p : l.pos) {
      if (p.arity() != n) return std::nullopt;
      pos.push_back(p);
    }
    if (pos.empty()) return std::nullopt;
    // the arguments must be covered by the domains of this line
    StaticType cover = st_none();
    for (const auto& p : pos) cover = st_union(cover, detail::dom_prod(p));
    if (!subtype_static(argsProd, cover)) return std::nullopt;
    size_t m = pos.size();
    for (size_t mask = 1; mask < (size_t(1) << m); ++mask) {
      StaticType region = argsProd;
      StaticType cods = st_any();
      for (size_t i = 0; i < m; ++i) {
        if (mask & (size_t(1) << i)) {
          region = st_inter(region, detail::dom_prod(pos[i]));
          cods = st_inter(cods, pos[i].cod());
        } else {
          region = st_diff(region, detail::dom_prod(pos[i]));
        }
      }
      if (!is_empty_static(region)) result = st_union(result, cods);
    }
  }
  if (!seen_line) return st_none();  // empty function type: vacuous application
  return result;
}

// strong arrow literals that the whole type is contained in
inline std::vector<FunArrow> strong_candidates(const Type& t) {
  std::vector<FunArrow> out;
  std::vector<std::string> seen;
  for (const auto& l : t.up.funs)
    for (const auto& p : l.pos) {
      if (!p.strong) continue;
      std::string k = encoded(p);
      if (std::find(seen.begin(), seen.end(), k) != seen.end()) continue;
      seen.push_back(k);
      StaticType lit;
      lit.funs = {FunLine{{p}, {}}};
      if (subtype_static(t.up, lit)) out.push_back(p);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Display simplification: semantically redundant lines and literals are
// dropped so printed types stay readable; the result is equivalent

inline StaticType simplified(const StaticType& t) {
  StaticType r = t;
  // drop uninhabited lines
  {
    TuplePart keep;
    for (auto& l : r.tuples)
      if (!tuple_line_empty(l)) keep.push_back(l);
    r.tuples = std::move(keep);
  }
  {
    FunPart keep;
    for (auto& l : r.funs)
      if (!fun_line_empty(l)) keep.push_back(l);
    r.funs = std::move(keep);
  }
  // negations restricted to nothing carve nothing out
  for (auto& l : r.tuples) {
    std::vector<TupleProd> negs;
    for (auto& n : l.negs)
      if (!tuple_line_empty(TupleLine{n, {}})) negs.push_back(n);
    l.negs = std::move(negs);
  }
  for (auto& l : r.funs) {
    std::vector<FunArrow> negs;
    for (auto& n : l.negs)
      if (!fun_line_empty(FunLine{{n}, {}})) negs.push_back(n);
    l.negs = std::move(negs);
  }
  // drop function-line positives implied by the rest of their line,
  // preferring to shed strong literals so plain arrows survive
  for (auto& l : r.funs) {
    for (int pass = 0; pass < 2; ++pass) {
      for (size_t i = 0; i < l.pos.size();) {
        if ((pass == 0) != l.pos[i].strong) {
          ++i;
          continue;
        }
        FunLine rest = l;
        rest.pos.erase(rest.pos.begin() + static_cast<long>(i));
        if (rest.pos.empty()) {
          ++i;
          continue;
        }
        StaticType lhs, lit;
        lhs.funs = {rest};
        lit.funs = {FunLine{{l.pos[i]}, {}}};
        if (subtype_static(lhs, lit))
          l.pos = std::move(rest.pos);
        else
          ++i;
      }
    }
  }
  // drop lines subsumed by another line of the same part
  auto prune_lines = [](auto& lines, auto as_type) {
    for (size_t i = 0; i < lines.size();) {
      bool drop = false;
      for (size_t j = 0; j < lines.size() && !drop; ++j) {
        if (i == j) continue;
        if (subtype_static(as_type(lines[i]), as_type(lines[j])) &&
            (!subtype_static(as_type(lines[j]), as_type(lines[i])) || j < i))
          drop = true;
      }
      if (drop)
        lines.erase(lines.begin() + static_cast<long>(i));
      else
        ++i;
    }
  };
  prune_lines(r.funs, [](const FunLine& l) {
    StaticType x;
    x.funs = {l};
    return x;
  });
  prune_lines(r.tuples, [](const TupleLine& l) {
    StaticType x;
    x.tuples = {l};
    return x;
  });
  r.tuples = tup_norm(std::move(r.tuples));
  r.funs = fun_norm(std::move(r.funs));
  return r;
}

// ---------------------------------------------------------------------------
// Strong type of an arrow (gradual extension when the arrow mentions ?)

// the single plain arrow the type is equivalent to, when there is one
inline std::optional<FunArrow> single_plain_arrow(const StaticType& s) {
  if (!s.ints.is_none() || !s.atoms.is_none()) return std::nullopt;
  for (const auto& l : s.tuples)
    if (!tuple_line_empty(l)) return std::nullopt;
  for (const auto& l : s.funs) {
    if (l.pos.size() != 1 || !l.negs.empty() || l.pos.front().strong) continue;
    StaticType lone;
    lone.funs = {FunLine{{l.pos.front()}, {}}};
    if (equiv_static(s, lone)) return l.pos.front();
  }
  return std::nullopt;
}

inline Type strong_of(const Type& t) {
  auto down = single_plain_arrow(t.down);
  auto up = single_plain_arrow(t.up);
  if (!down || !up) throw std::invalid_argument("strong_of: not a single arrow type");
  auto star = [](const FunArrow& a) {
    FunArrow s = a;
    s.strong = true;
    StaticType r;
    r.funs = {FunLine{{s}, {}}};
    return r;
  };
  if (!t.has_dyn()) return Type::of(star(*down));
  StaticType x = star(*down);
  StaticType y = star(*up);
  return Type::make(st_inter(x, y), st_union(x, y));
}

}  // namespace fwx
