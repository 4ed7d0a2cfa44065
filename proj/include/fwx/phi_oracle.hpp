#pragma once

// Independent decision of  /\P <= (a1,..,an) -> b  for arity-n arrows, by
// direct enumeration of the coordinate assignments iota : P -> [1, n+1]
// of the multi-arity set-containment characterization; cross-checks phi.

#include <vector>

#include "fwx/subtype.hpp"
#include "fwx/types.hpp"

namespace fwx {

inline bool phi_oracle(const std::vector<FunArrow>& pos, const FunArrow& neg) {
  size_t n = neg.arity();
  for (const auto& p : pos)
    if (p.arity() != n) return false;
  size_t m = pos.size();
  // iota maps each positive arrow to a coordinate 0..n-1 or to n (codomain slot)
  std::vector<size_t> iota(m, 0);
  while (true) {
    bool ok = false;
    for (size_t k = 0; k < n && !ok; ++k) {
      StaticType u = st_none();
      for (size_t i = 0; i < m; ++i)
        if (iota[i] == k) u = st_union(u, pos[i].types[k]);
      if (subtype_static(neg.types[k], u)) ok = true;
    }
    if (!ok) {
      StaticType c = st_any();
      for (size_t i = 0; i < m; ++i)
        if (iota[i] == n) c = st_inter(c, pos[i].cod());
      if (subtype_static(c, neg.cod())) ok = true;
    }
    if (!ok) return false;
    // next assignment
    size_t i = 0;
    while (i < m) {
      if (++iota[i] <= n) break;
      iota[i] = 0;
      ++i;
    }
    if (i == m) break;
  }
  return true;
}

// phi packaged the same way: decides /\P <= (doms) -> cod
inline bool phi_decides(const std::vector<FunArrow>& pos, const FunArrow& neg) {
  std::vector<StaticType> doms(neg.types.begin(), neg.types.end() - 1);
  return phi(doms, st_neg(neg.cod()), pos);
}

}  // namespace fwx
