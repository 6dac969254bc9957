// Tuple equivalence modulo hidden attributes, and the Flip / EFlip rewriters.
#pragma once

#include <vector>

#include "provlock/model.hpp"

namespace provlock {

// A tuple over an explicit schema of attribute indices.
struct Tuple {
    std::vector<AttrIndex> schema;
    Row values;

    bool has(AttrIndex a) const;
    int get(AttrIndex a) const;  // throws Error("SchemaMismatch") when absent
    void set(AttrIndex a, int v);
    Tuple project(const std::vector<AttrIndex>& attrs) const;
    // Agreement on the given attributes (both tuples must carry them).
    bool agrees_on(const Tuple& o, const std::vector<AttrIndex>& attrs) const;
    bool operator==(const Tuple& o) const { return schema == o.schema && values == o.values; }
};

Tuple concat(const Tuple& a, const Tuple& b);

// x ≡_H y: equal on B∖H.  Both tuples must be defined on exactly B (any order).
bool equiv(const Tuple& x, const Tuple& y, const std::vector<AttrIndex>& B, AttrSet H);

// Flip_{p,q}(u).  p and q share the schema P; u is on Q.  When u agrees with p on Q∩P
// the Q∩P part is replaced by q's values, when it agrees with q by p's values,
// otherwise u is returned unchanged.  Q∖P is always kept.
Tuple flip(const Tuple& p, const Tuple& q, const Tuple& u);

// EFlip_{p,q;v}(u).  p and q are defined on P ∪ R, v on R, u on Q.  The switch is
// keyed on v: v = π_R(p) writes q's values on Q∩P, v = π_R(q) writes p's values,
// otherwise u is unchanged.
Tuple eflip(const Tuple& p, const Tuple& q, const std::vector<AttrIndex>& P, const Tuple& v, const Tuple& u);

}  // namespace provlock
