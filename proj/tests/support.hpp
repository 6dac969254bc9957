// Shared test helpers: brute-force oracles written straight from the definitions, and
// seeded generators for random boolean modules, workflows and closures.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "provlock/closures.hpp"
#include "provlock/model.hpp"
#include "provlock/public_safety.hpp"
#include "provlock/reproduce.hpp"
#include "provlock/standalone.hpp"
#include "provlock/workflow_privacy.hpp"

#ifndef PROVLOCK_DATA_DIR
#define PROVLOCK_DATA_DIR "data"
#endif

namespace testsupport {

using namespace provlock;

inline std::string data_dir() { return PROVLOCK_DATA_DIR; }

inline Workflow fixture(const std::string& id) { return load_fixture(data_dir(), id); }

inline AttrSet attrs(const Workflow& w, std::vector<std::string> names) { return w.attrs_by_name(names); }

// ---------------------------------------------------------------- definitional checks

// Values of `row` (aligned with `schema`) on the attributes not in H.
inline Row visible_part(const std::vector<AttrIndex>& schema, const Row& row, AttrSet H) {
    Row out;
    for (std::size_t k = 0; k < schema.size(); ++k)
        if (!H.contains(schema[k])) out.push_back(row[k]);
    return out;
}

inline bool def_dsafe(const ModuleTable& m, AttrSet H) {
    for (std::size_t a = 0; a < m.input_count(); ++a)
        for (std::size_t b = 0; b < m.input_count(); ++b)
            if (visible_part(m.inputs, m.input_at(a), H) == visible_part(m.inputs, m.input_at(b), H) &&
                visible_part(m.outputs, m.table[a], H) != visible_part(m.outputs, m.table[b], H))
                return false;
    return true;
}

inline bool def_usafe(const ModuleTable& m, AttrSet H) {
    for (std::size_t a = 0; a < m.input_count(); ++a)
        for (std::size_t b = 0; b < m.input_count(); ++b)
            if (visible_part(m.outputs, m.table[a], H) == visible_part(m.outputs, m.table[b], H) &&
                visible_part(m.inputs, m.input_at(a), H) != visible_part(m.inputs, m.input_at(b), H))
                return false;
    return true;
}

inline bool def_udsafe(const ModuleTable& m, AttrSet H) { return def_dsafe(m, H) && def_usafe(m, H); }

inline std::vector<AttrSet> all_subsets(AttrSet universe) {
    std::vector<AttrSet> out;
    for_each_subset(universe.members(), [&](AttrSet s) { out.push_back(s); });
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

inline std::vector<AttrSet> def_filter(const ModuleTable& m, const std::function<bool(const ModuleTable&, AttrSet)>& pred) {
    std::vector<AttrSet> out;
    for (AttrSet s : all_subsets(m.attr_set()))
        if (pred(m, s)) out.push_back(s);
    return out;
}

// ---------------------------------------------------------------- brute-force worlds

// Calls f(filled) for every assignment of domain values to the hidden cells of `rows`.
inline void for_each_filling(const std::vector<AttrIndex>& schema, const std::vector<int>& radix,
                             const std::vector<Row>& rows, AttrSet H,
                             const std::function<void(const std::vector<Row>&)>& f) {
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < schema.size(); ++c)
            if (H.contains(schema[c])) cells.emplace_back(r, c);
    std::vector<Row> cur = rows;
    for (auto [r, c] : cells) cur[r][c] = 0;
    while (true) {
        f(cur);
        std::size_t k = 0;
        for (; k < cells.size(); ++k) {
            auto [r, c] = cells[k];
            if (++cur[r][c] < radix[c]) break;
            cur[r][c] = 0;
        }
        if (k == cells.size()) return;
    }
}

inline bool rows_distinct(std::vector<Row> rows) {
    std::sort(rows.begin(), rows.end());
    return std::adjacent_find(rows.begin(), rows.end()) == rows.end();
}

// Worlds of a single module by exhaustive filling.  out[code] collects outputs seen with
// each input (conjunctive form).
inline std::size_t brute_standalone(const ModuleTable& m, AttrSet H, std::vector<std::set<Row>>* out = nullptr) {
    const auto schema = m.attrs();
    std::vector<int> radix = m.input_radix;
    radix.insert(radix.end(), m.output_radix.begin(), m.output_radix.end());
    const std::size_t ni = m.inputs.size();
    std::vector<Row> rows;
    for (std::size_t code = 0; code < m.input_count(); ++code) {
        Row r = m.input_at(code);
        r.insert(r.end(), m.table[code].begin(), m.table[code].end());
        rows.push_back(r);
    }
    if (out) out->assign(m.input_count(), {});
    std::size_t count = 0;
    for_each_filling(schema, radix, rows, H, [&](const std::vector<Row>& world) {
        if (!rows_distinct(world)) return;
        std::map<Row, Row> fd;
        for (const Row& r : world) {
            Row x(r.begin(), r.begin() + ni), y(r.begin() + ni, r.end());
            auto [it, fresh] = fd.emplace(x, y);
            if (!fresh && it->second != y) return;
        }
        ++count;
        if (out)
            for (const auto& [x, y] : fd) (*out)[m.encode_input(x)].insert(y);
    });
    return count;
}

// Every world of a workflow relation by exhaustive filling; returns the worlds.
inline std::vector<std::vector<Row>> brute_workflow_worlds(const Workflow& w, const Relation& R, AttrSet H) {
    std::vector<int> radix;
    for (AttrIndex a : R.schema) radix.push_back(w.domain_size(a));
    std::vector<std::vector<Row>> worlds;
    for_each_filling(R.schema, radix, R.rows, H, [&](const std::vector<Row>& world) {
        if (!rows_distinct(world)) return;
        Relation rel{R.schema, world};
        for (const ModuleTable& m : w.modules) {
            std::map<Row, Row> fd;
            for (const Row& r : world) {
                Row x = rel.pick(r, m.inputs), y = rel.pick(r, m.outputs);
                if (m.is_public() && m.apply(x) != y) return;
                auto [it, fresh] = fd.emplace(x, y);
                if (!fresh && it->second != y) return;
            }
        }
        worlds.push_back(world);
    });
    return worlds;
}

// Implication-form Out sets for every private module and input of R, from the worlds above.
inline std::map<std::pair<int, Row>, std::set<Row>> brute_workflow_out(const Workflow& w, const Relation& R, AttrSet H) {
    std::map<std::pair<int, Row>, std::set<Row>> out;
    const auto worlds = brute_workflow_worlds(w, R, H);
    for (int i : w.private_modules()) {
        const ModuleTable& m = w.modules[i];
        std::set<Row> xs;
        for (const Row& r : R.rows) xs.insert(R.pick(r, m.inputs));
        std::vector<Row> every_output;
        {
            std::vector<AttrIndex> outs = m.outputs;
            every_output = domain_product(w, outs);
        }
        for (const Row& x : xs) {
            auto& slot = out[{i, x}];
            for (const auto& world : worlds) {
                Relation rel{R.schema, world};
                std::optional<Row> y;
                bool single = true;
                for (const Row& r : world) {
                    if (rel.pick(r, m.inputs) != x) continue;
                    const Row yr = rel.pick(r, m.outputs);
                    if (y && *y != yr) single = false;
                    y = yr;
                }
                if (!y) slot.insert(every_output.begin(), every_output.end());
                else if (single) slot.insert(*y);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------- generators

struct Rng {
    std::mt19937 gen;
    explicit Rng(unsigned seed) : gen(seed) {}
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(gen); }
    template <class T>
    const T& pick(const std::vector<T>& v) { return v[uniform(0, static_cast<int>(v.size()) - 1)]; }
};

// A boolean function of `n_in` inputs with `n_out` outputs: each output either a random
// truth table or a small gate over the inputs.
inline std::function<Row(const Row&)> random_function(Rng& rng, int n_in, int n_out) {
    std::vector<std::function<int(const Row&)>> outs;
    for (int k = 0; k < n_out; ++k) {
        const int kind = rng.uniform(0, 6);
        const int a = rng.uniform(0, n_in - 1), b = rng.uniform(0, n_in - 1);
        switch (kind) {
            case 0: outs.push_back([a](const Row& x) { return x[a]; }); break;
            case 1: outs.push_back([a](const Row& x) { return 1 - x[a]; }); break;
            case 2: outs.push_back([a, b](const Row& x) { return x[a] | x[b]; }); break;
            case 3: outs.push_back([a, b](const Row& x) { return x[a] & x[b]; }); break;
            case 4: outs.push_back([a, b](const Row& x) { return x[a] ^ x[b]; }); break;
            default: {
                std::vector<int> table(std::size_t{1} << n_in);
                for (int& v : table) v = rng.uniform(0, 1);
                outs.push_back([table](const Row& x) {
                    std::size_t code = 0;
                    for (int v : x) code = code * 2 + v;
                    return table[code];
                });
            }
        }
    }
    return [outs](const Row& x) {
        Row y;
        for (const auto& f : outs) y.push_back(f(x));
        return y;
    };
}

inline std::string aname(int k) { return "a" + std::to_string(k); }

// One boolean module over 2..max_attrs attributes (a1..), in a workflow of its own.
inline Workflow random_module(Rng& rng, int max_attrs = 4, Visibility vis = Visibility::Public) {
    const int n = rng.uniform(2, max_attrs);
    const int n_in = rng.uniform(1, n - 1);
    WorkflowSpec spec;
    std::vector<std::string> ins, outs;
    for (int k = 1; k <= n; ++k) {
        spec.bool_attr(aname(k));
        (k <= n_in ? ins : outs).push_back(aname(k));
    }
    spec.module("m1", vis, ins, outs, random_function(rng, n_in, n - n_in));
    return build_workflow(spec);
}

struct WorkflowShape {
    int max_modules = 5;
    int max_attrs = 8;
    bool allow_sharing = false;  // an attribute may feed several modules
    double private_prob = 0.5;
};

// Random DAG: initial inputs, then modules reading available attributes and writing fresh ones.
inline Workflow random_workflow(Rng& rng, const WorkflowShape& shape) {
    while (true) {
        WorkflowSpec spec;
        int next = 1;
        std::vector<std::string> available;  // attributes that may still be read
        const int n_init = rng.uniform(1, 2);
        for (int k = 0; k < n_init; ++k) {
            spec.bool_attr(aname(next));
            available.push_back(aname(next++));
        }
        const int n_modules = rng.uniform(2, shape.max_modules);
        for (int m = 1; m <= n_modules && !available.empty(); ++m) {
            const int room = shape.max_attrs - (next - 1);
            if (room < 1) break;
            const int n_in = rng.uniform(1, std::min<int>(2, available.size()));
            std::vector<std::string> ins;
            std::vector<std::string> pool = available;
            std::shuffle(pool.begin(), pool.end(), rng.gen);
            ins.assign(pool.begin(), pool.begin() + n_in);
            std::sort(ins.begin(), ins.end(), [](const std::string& a, const std::string& b) {
                return std::stoi(a.substr(1)) < std::stoi(b.substr(1));
            });
            if (!shape.allow_sharing)
                for (const auto& a : ins) available.erase(std::find(available.begin(), available.end(), a));
            const int n_out = rng.uniform(1, std::min(2, room));
            std::vector<std::string> outs;
            for (int k = 0; k < n_out; ++k) {
                spec.bool_attr(aname(next));
                outs.push_back(aname(next));
                available.push_back(aname(next++));
            }
            const Visibility vis = rng.coin(shape.private_prob) ? Visibility::Private : Visibility::Public;
            spec.module("m" + std::to_string(m), vis, ins, outs, random_function(rng, n_in, n_out));
        }
        Workflow w = build_workflow(spec);
        if (w.modules.size() >= 2 && (shape.private_prob <= 0.0 || !w.private_modules().empty())) return w;
    }
}

// Random workflow that classifies as single-predecessor and has at least one public
// module inside some private module's closure (when `want_closure`).
inline Workflow random_single_pred(Rng& rng, bool want_closure = true) {
    WorkflowShape shape;
    while (true) {
        Workflow w = random_workflow(rng, shape);
        if (!classify_single_predecessor(w).is_single_predecessor) continue;
        if (!want_closure) return w;
        for (int i : w.private_modules())
            if (!public_closure(w, w.modules[i].output_set()).empty()) return w;
    }
}

struct ClosureInstance {
    Workflow w;
    int owner;
    AttrSet S;
    std::vector<int> closure;
};

// Private owner m0 feeding a chain of public modules m1..mk with O_{j-1} = I_j.
inline ClosureInstance random_chain_instance(Rng& rng) {
    while (true) {
        WorkflowSpec spec;
        spec.attr("x", {0, 1}, rng.uniform(1, 4));
        int next = 1;
        auto fresh = [&](int n) {
            std::vector<std::string> v;
            for (int k = 0; k < n; ++k) {
                spec.attr(aname(next), {0, 1}, rng.uniform(1, 4));
                v.push_back(aname(next++));
            }
            return v;
        };
        const auto fed = fresh(rng.uniform(1, 2));
        auto owner_out = fed;
        if (rng.coin(0.4)) owner_out.push_back(fresh(1)[0]);
        spec.module("m0", Visibility::Private, {"x"}, owner_out, random_function(rng, 1, owner_out.size()));
        const int k = rng.uniform(1, 3);
        std::vector<std::string> in = fed;
        for (int j = 1; j <= k; ++j) {
            auto out = fresh(rng.uniform(1, 2));
            spec.module("m" + std::to_string(j), Visibility::Public, in, out,
                        random_function(rng, in.size(), out.size()));
            in = out;
        }
        Workflow w = build_workflow(spec);
        const int owner = w.module_index("m0");
        AttrSet S;
        for (AttrIndex a : w.modules[owner].outputs)
            if (rng.coin()) S.insert(a);
        S.insert(w.attr_index(fed[rng.uniform(0, fed.size() - 1)]));
        auto closure = public_closure(w, S);
        if (closure.empty()) continue;
        return {std::move(w), owner, S, std::move(closure)};
    }
}

// Private owner m0 with public modules hanging off it as a forest: each reads a subset of
// one earlier module's unread outputs.
inline ClosureInstance random_tree_instance(Rng& rng) {
    while (true) {
        WorkflowSpec spec;
        spec.attr("x", {0, 1}, rng.uniform(1, 4));
        int next = 1;
        auto fresh = [&](int n) {
            std::vector<std::string> v;
            for (int k = 0; k < n; ++k) {
                spec.attr(aname(next), {0, 1}, rng.uniform(1, 4));
                v.push_back(aname(next++));
            }
            return v;
        };
        std::vector<std::vector<std::string>> unread;  // per module, outputs nobody reads yet
        const auto owner_out = fresh(rng.uniform(2, 3));
        spec.module("m0", Visibility::Private, {"x"}, owner_out, random_function(rng, 1, owner_out.size()));
        unread.push_back(owner_out);
        const int nodes = rng.uniform(2, 4);
        for (int j = 1; j <= nodes && next <= 9; ++j) {
            std::vector<int> parents;
            for (std::size_t p = 0; p < unread.size(); ++p)
                if (!unread[p].empty()) parents.push_back(p);
            if (parents.empty()) break;
            auto& src = unread[rng.pick(parents)];
            std::shuffle(src.begin(), src.end(), rng.gen);
            const int n_in = rng.uniform(1, std::min<int>(2, src.size()));
            std::vector<std::string> in(src.begin(), src.begin() + n_in);
            src.erase(src.begin(), src.begin() + n_in);
            std::sort(in.begin(), in.end(), [](const std::string& a, const std::string& b) {
                return std::stoi(a.substr(1)) < std::stoi(b.substr(1));
            });
            auto out = fresh(rng.uniform(1, 2));
            spec.module("m" + std::to_string(j), Visibility::Public, in, out,
                        random_function(rng, in.size(), out.size()));
            unread.push_back(out);
        }
        Workflow w = build_workflow(spec);
        const int owner = w.module_index("m0");
        AttrSet S;
        for (AttrIndex a : w.modules[owner].outputs)
            if (rng.coin()) S.insert(a);
        if (S.empty()) continue;
        auto closure = public_closure(w, S);
        if (closure.empty()) continue;
        return {std::move(w), owner, S, std::move(closure)};
    }
}

// ---------------------------------------------------------------- optimizer oracle

struct BruteOptimum {
    bool feasible = false;
    double cost = 0;
    AttrSet hidden;
};

// Minimum-cost H over every subset of O_owner ∪ closure attributes with H ⊇ S, whose
// owner part has the same closure and which is UD-safe (D-safe when general) on each
// closure module.
inline BruteOptimum brute_closure_optimum(const Workflow& w, int owner, AttrSet S, const std::vector<int>& closure,
                                          bool general = false) {
    AttrSet U = w.modules[owner].output_set();
    for (int j : closure) U |= w.modules[j].attr_set();
    BruteOptimum best;
    for (AttrSet H : all_subsets(U)) {
        if (!S.subset_of(H)) continue;
        const AttrSet h = H & w.modules[owner].output_set();
        if ((general ? downward_closure(w, h) : public_closure(w, h)) != closure) continue;
        bool ok = true;
        for (int j : closure) {
            const AttrSet u = H & w.modules[j].attr_set();
            ok = ok && (general ? def_dsafe(w.modules[j], u) : def_udsafe(w.modules[j], u));
        }
        if (!ok) continue;
        const double c = cost_of(w, H);
        if (!best.feasible || c < best.cost) best = {true, c, H};
    }
    return best;
}

// ---------------------------------------------------------------- plan enumeration

// Every combination of (safe h, closure picks) per private module, up to `cap` plans,
// keeping those the assembler accepts.  Closure picks come from the definitional
// UD-safe (or D-safe) filter.
inline std::vector<AssemblyPlan> valid_plans(const Workflow& w, int gamma, bool general, std::size_t cap,
                                             bool* truncated = nullptr) {
    std::map<int, std::vector<AttrSet>> catalogs;
    auto catalog = [&](int j) -> const std::vector<AttrSet>& {
        auto it = catalogs.find(j);
        if (it == catalogs.end())
            it = catalogs.emplace(j, def_filter(w.modules[j], general ? def_dsafe : def_udsafe)).first;
        return it->second;
    };
    std::vector<std::vector<ModuleChoice>> options;
    for (int i : w.private_modules()) {
        std::vector<ModuleChoice> opts;
        for (AttrSet h : enumerate_safe_subsets(w, i, gamma, true).subsets) {
            std::vector<int> cl;
            if (!h.empty()) cl = general ? downward_closure(w, h) : public_closure(w, h);
            std::vector<std::map<int, AttrSet>> partial{{}};
            for (int j : cl) {
                std::vector<std::map<int, AttrSet>> grown;
                for (const auto& p : partial)
                    for (AttrSet u : catalog(j)) {
                        // Keep only picks consistent with h and with earlier picks.
                        AttrSet fixed = h;
                        AttrSet decided = w.modules[i].output_set();
                        for (const auto& [k, v] : p) {
                            fixed |= v;
                            decided |= w.modules[k].attr_set();
                        }
                        const AttrSet A = w.modules[j].attr_set();
                        if ((u & decided & A) != (fixed & decided & A)) continue;
                        auto q = p;
                        q[j] = u;
                        grown.push_back(std::move(q));
                    }
                partial = std::move(grown);
            }
            for (auto& p : partial) opts.push_back({i, h, std::move(p)});
        }
        options.push_back(std::move(opts));
    }
    std::vector<AssemblyPlan> plans;
    std::vector<std::size_t> idx(options.size(), 0);
    for (const auto& o : options)
        if (o.empty()) return plans;
    std::size_t tried = 0;
    while (true) {
        if (tried++ >= cap) {
            if (truncated) *truncated = true;
            break;
        }
        std::vector<ModuleChoice> choice;
        for (std::size_t k = 0; k < options.size(); ++k) choice.push_back(options[k][idx[k]]);
        try {
            plans.push_back(general ? assemble_general(w, choice, gamma) : assemble_single_pred(w, choice, gamma));
        } catch (const ConditionViolated&) {
        }
        std::size_t k = 0;
        for (; k < idx.size(); ++k) {
            if (++idx[k] < options[k].size()) break;
            idx[k] = 0;
        }
        if (k == idx.size()) break;
    }
    return plans;
}

}  // namespace testsupport
