#include "provlock/closures.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace provlock {

namespace {

std::vector<int> in_topo_order(const Workflow& w, const std::vector<char>& mark) {
    std::vector<int> out;
    for (int m : w.topo_order)
        if (mark[m]) out.push_back(m);
    return out;
}

bool feeds(const Workflow& w, int a, int b) {
    return w.modules[a].output_set().intersects(w.modules[b].input_set());
}

bool shares(const Workflow& w, int a, int b) {
    return w.modules[a].attr_set().intersects(w.modules[b].attr_set());
}

template <class Adjacent>
bool search(const Workflow& w, int from, int to, Adjacent adjacent) {
    if (from == to) return true;
    const int n = static_cast<int>(w.modules.size());
    std::vector<char> seen(n, 0);
    std::deque<int> queue{from};
    seen[from] = 1;
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        for (int k = 0; k < n; ++k) {
            if (seen[k] || !adjacent(cur, k)) continue;
            if (k == to) return true;
            if (!w.modules[k].is_public()) continue;
            seen[k] = 1;
            queue.push_back(k);
        }
    }
    return false;
}

}  // namespace

bool directed_public_path(const Workflow& w, int from, int to) {
    return search(w, from, to, [&](int a, int b) { return feeds(w, a, b); });
}

bool undirected_public_path(const Workflow& w, int from, int to) {
    return search(w, from, to, [&](int a, int b) { return a != b && shares(w, a, b); });
}

int owner_of(const Workflow& w, AttrSet h) {
    int owner = -1;
    for (AttrIndex a : h.members()) {
        int p = w.producer[a];
        if (p < 0 || w.modules[p].is_public() || (owner >= 0 && owner != p))
            throw Error("NotOutputOfPrivate", w.attributes[a].name + " is not an output of the same private module");
        owner = p;
    }
    return owner;
}

std::vector<int> public_closure(const Workflow& w, AttrSet h) {
    owner_of(w, h);
    const int n = static_cast<int>(w.modules.size());
    std::vector<char> in(n, 0);
    std::deque<int> queue;
    for (int j = 0; j < n; ++j)
        if (w.modules[j].is_public() && w.modules[j].attr_set().intersects(h)) {
            in[j] = 1;
            queue.push_back(j);
        }
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        for (int k = 0; k < n; ++k)
            if (!in[k] && w.modules[k].is_public() && shares(w, cur, k)) {
                in[k] = 1;
                queue.push_back(k);
            }
    }
    return in_topo_order(w, in);
}

std::vector<int> downward_closure(const Workflow& w, AttrSet h) {
    const int n = static_cast<int>(w.modules.size());
    std::vector<char> in(n, 0);
    for (int m : w.topo_order) {
        if (w.modules[m].input_set().intersects(h)) in[m] = 1;
        for (int p = 0; p < n && !in[m]; ++p)
            if (in[p] && feeds(w, p, m)) in[m] = 1;
    }
    return in_topo_order(w, in);
}

const char* to_string(ShapeViolation v) {
    switch (v) {
        case ShapeViolation::DataSharing: return "DataSharing";
        case ShapeViolation::NoDirectedPath: return "NoDirectedPath";
        case ShapeViolation::MultiplePrivatePredecessors: return "MultiplePrivatePredecessors";
        case ShapeViolation::ExternalInput: return "ExternalInput";
    }
    return "?";
}

Classification classify_single_predecessor(const Workflow& w) {
    Classification c;
    for (std::size_t a = 0; a < w.attribute_count(); ++a)
        if (w.consumers[a].size() > 1)
            c.violations.push_back({ShapeViolation::DataSharing, "", w.attributes[a].name, ""});

    for (int i : w.private_modules()) {
        const auto& owner = w.modules[i];
        const auto closure = public_closure(w, owner.output_set());
        std::set<int> members(closure.begin(), closure.end());
        for (int j : closure) {
            std::vector<int> preds;
            for (int k : w.private_modules())
                if (directed_public_path(w, k, j)) preds.push_back(k);
            if (std::find(preds.begin(), preds.end(), i) == preds.end())
                c.violations.push_back({ShapeViolation::NoDirectedPath, w.modules[j].name, "", owner.name});
            for (int k : preds)
                if (k != i)
                    c.violations.push_back(
                        {ShapeViolation::MultiplePrivatePredecessors, w.modules[j].name, w.modules[k].name, owner.name});
            for (AttrIndex a : w.modules[j].inputs)
                if (w.producer[a] < 0)
                    c.violations.push_back(
                        {ShapeViolation::ExternalInput, w.modules[j].name, w.attributes[a].name, owner.name});
        }
    }
    c.is_single_predecessor = c.violations.empty();
    return c;
}

}  // namespace provlock
