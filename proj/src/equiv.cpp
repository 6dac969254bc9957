#include "provlock/equiv.hpp"

#include <algorithm>

namespace provlock {

bool Tuple::has(AttrIndex a) const {
    return std::find(schema.begin(), schema.end(), a) != schema.end();
}

int Tuple::get(AttrIndex a) const {
    auto it = std::find(schema.begin(), schema.end(), a);
    if (it == schema.end()) throw Error("SchemaMismatch", "attribute #" + std::to_string(a) + " not in tuple");
    return values[it - schema.begin()];
}

void Tuple::set(AttrIndex a, int v) {
    auto it = std::find(schema.begin(), schema.end(), a);
    if (it == schema.end()) throw Error("SchemaMismatch", "attribute #" + std::to_string(a) + " not in tuple");
    values[it - schema.begin()] = v;
}

Tuple Tuple::project(const std::vector<AttrIndex>& attrs) const {
    Tuple t{attrs, {}};
    for (AttrIndex a : attrs) t.values.push_back(get(a));
    return t;
}

bool Tuple::agrees_on(const Tuple& o, const std::vector<AttrIndex>& attrs) const {
    for (AttrIndex a : attrs)
        if (get(a) != o.get(a)) return false;
    return true;
}

Tuple concat(const Tuple& a, const Tuple& b) {
    Tuple t = a;
    for (std::size_t i = 0; i < b.schema.size(); ++i) {
        if (t.has(b.schema[i])) throw Error("SchemaMismatch", "concatenated tuples overlap");
        t.schema.push_back(b.schema[i]);
        t.values.push_back(b.values[i]);
    }
    return t;
}

bool equiv(const Tuple& x, const Tuple& y, const std::vector<AttrIndex>& B, AttrSet H) {
    const AttrSet b = AttrSet::of(B);
    if (AttrSet::of(x.schema) != b || AttrSet::of(y.schema) != b || x.schema.size() != B.size() ||
        y.schema.size() != B.size())
        throw Error("SchemaMismatch", "equiv needs both tuples on the attribute set B");
    for (AttrIndex a : (b - H).members())
        if (x.get(a) != y.get(a)) return false;
    return true;
}

static std::vector<AttrIndex> common(const std::vector<AttrIndex>& Q, const std::vector<AttrIndex>& P) {
    std::vector<AttrIndex> out;
    for (AttrIndex a : Q)
        if (std::find(P.begin(), P.end(), a) != P.end()) out.push_back(a);
    return out;
}

static Tuple overwrite(Tuple u, const Tuple& src, const std::vector<AttrIndex>& attrs) {
    for (AttrIndex a : attrs) u.set(a, src.get(a));
    return u;
}

Tuple flip(const Tuple& p, const Tuple& q, const Tuple& u) {
    if (AttrSet::of(p.schema) != AttrSet::of(q.schema))
        throw Error("SchemaMismatch", "flip needs p and q on the same schema");
    const auto qp = common(u.schema, p.schema);
    if (u.agrees_on(p, qp)) return overwrite(u, q, qp);
    if (u.agrees_on(q, qp)) return overwrite(u, p, qp);
    return u;
}

Tuple eflip(const Tuple& p, const Tuple& q, const std::vector<AttrIndex>& P, const Tuple& v, const Tuple& u) {
    const auto qp = common(u.schema, P);
    if (v.agrees_on(p, v.schema)) return overwrite(u, q, qp);
    if (v.agrees_on(q, v.schema)) return overwrite(u, p, qp);
    return u;
}

}  // namespace provlock
