#include "provlock/public_safety.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "provlock/parallel.hpp"

namespace provlock {

std::vector<AttrIndex> IOTable::attrs() const {
    auto out = inputs;
    out.insert(out.end(), outputs.begin(), outputs.end());
    return out;
}

IOTable io_table(const ModuleTable& m) {
    IOTable t{m.inputs, m.outputs, {}};
    for (std::size_t c = 0; c < m.input_count(); ++c) t.rows.emplace_back(m.input_at(c), m.table[c]);
    return t;
}

namespace {

std::vector<std::size_t> visible_positions(const std::vector<AttrIndex>& attrs, AttrSet H) {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < attrs.size(); ++i)
        if (!H.contains(attrs[i])) pos.push_back(i);
    return pos;
}

bool same_at(const Row& a, const Row& b, const std::vector<std::size_t>& pos) {
    for (std::size_t p : pos)
        if (a[p] != b[p]) return false;
    return true;
}

Row visible(const Row& r, const std::vector<std::size_t>& pos) {
    Row out;
    out.reserve(pos.size());
    for (std::size_t p : pos) out.push_back(r[p]);
    return out;
}

struct Counts {
    bool dsafe;
    std::size_t n_inputs;
    std::size_t n_outputs;
};

Counts group_counts(const IOTable& t, AttrSet H) {
    const auto vi = visible_positions(t.inputs, H);
    const auto vo = visible_positions(t.outputs, H);
    std::map<Row, Row> groups;
    std::set<Row> outs;
    bool dsafe = true;
    for (const auto& [x, y] : t.rows) {
        Row xv = visible(x, vi), yv = visible(y, vo);
        auto [it, fresh] = groups.emplace(std::move(xv), yv);
        if (!fresh && it->second != yv) dsafe = false;
        outs.insert(std::move(yv));
    }
    return {dsafe, groups.size(), outs.size()};
}

}  // namespace

bool is_dsafe(const IOTable& t, AttrSet H) {
    const auto vi = visible_positions(t.inputs, H);
    const auto vo = visible_positions(t.outputs, H);
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t j = i + 1; j < t.rows.size(); ++j)
            if (same_at(t.rows[i].first, t.rows[j].first, vi) && !same_at(t.rows[i].second, t.rows[j].second, vo))
                return false;
    return true;
}

bool is_usafe(const IOTable& t, AttrSet H) {
    const auto vi = visible_positions(t.inputs, H);
    const auto vo = visible_positions(t.outputs, H);
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t j = i + 1; j < t.rows.size(); ++j)
            if (same_at(t.rows[i].second, t.rows[j].second, vo) && !same_at(t.rows[i].first, t.rows[j].first, vi))
                return false;
    return true;
}

bool is_udsafe(const IOTable& t, AttrSet H) { return is_dsafe(t, H) && is_usafe(t, H); }

static std::vector<AttrSet> filter_subsets(const IOTable& t, int jobs, bool need_usafe) {
    std::vector<AttrSet> candidates;
    for_each_subset(t.attrs(), [&](AttrSet s) { candidates.push_back(s); });
    std::vector<char> ok(candidates.size(), 0);
    parallel_for(candidates.size(), jobs, [&](std::size_t i) {
        const Counts c = group_counts(t, candidates[i]);
        ok[i] = c.dsafe && (!need_usafe || c.n_inputs == c.n_outputs);
    });
    std::vector<AttrSet> out;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (ok[i]) out.push_back(candidates[i]);
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

std::vector<AttrSet> enumerate_udsafe(const IOTable& t, int jobs) { return filter_subsets(t, jobs, true); }

std::vector<AttrSet> enumerate_dsafe(const IOTable& t, int jobs) { return filter_subsets(t, jobs, false); }

UDSafeCatalog enumerate_udsafe(const Workflow& w, int module, int jobs) {
    return {module, enumerate_udsafe(io_table(w.modules[module]), jobs)};
}

CompositeModule compose_public(const Workflow& w, const std::vector<int>& members, bool require_connected) {
    if (members.empty()) throw Error("NotConnected", "a composite needs at least one member");
    std::set<int> mset(members.begin(), members.end());
    for (int m : members)
        if (!w.modules[m].is_public())
            throw Error("NonPublicMember", "module " + w.modules[m].name + " is private");

    // Undirected connectivity through shared attributes.
    std::set<int> reached{members.front()};
    std::vector<int> stack{members.front()};
    while (!stack.empty()) {
        int a = stack.back();
        stack.pop_back();
        for (int b : mset)
            if (!reached.count(b) && w.modules[a].attr_set().intersects(w.modules[b].attr_set())) {
                reached.insert(b);
                stack.push_back(b);
            }
    }
    if (require_connected && reached.size() != mset.size()) throw Error("NotConnected", "members do not share attributes");

    CompositeModule c;
    for (int m : w.topo_order)
        if (mset.count(m)) c.members.push_back(m);

    AttrSet produced, consumed, all;
    for (int m : c.members) {
        produced |= w.modules[m].output_set();
        consumed |= w.modules[m].input_set();
        all |= w.modules[m].attr_set();
    }
    c.inputs = (consumed - produced).members();
    for (AttrIndex a : produced.members()) {
        bool leaves = w.consumers[a].empty();
        for (int k : w.consumers[a])
            if (!mset.count(k)) leaves = true;
        if (leaves) c.outputs.push_back(a);
    }

    c.joined.schema = all.members();
    c.boundary.inputs = c.inputs;
    c.boundary.outputs = c.outputs;
    for (const Row& x : domain_product(w, c.inputs)) {
        Row t(w.attribute_count(), 0);
        for (std::size_t i = 0; i < x.size(); ++i) t[c.inputs[i]] = x[i];
        for (int m : c.members) {
            const auto& mod = w.modules[m];
            Row in;
            for (AttrIndex a : mod.inputs) in.push_back(t[a]);
            const Row& out = mod.apply(in);
            for (std::size_t k = 0; k < mod.outputs.size(); ++k) t[mod.outputs[k]] = out[k];
        }
        Row joined_row, y;
        for (AttrIndex a : c.joined.schema) joined_row.push_back(t[a]);
        for (AttrIndex a : c.outputs) y.push_back(t[a]);
        c.joined.insert(std::move(joined_row));
        c.boundary.rows.emplace_back(x, std::move(y));
    }
    return c;
}

}  // namespace provlock
