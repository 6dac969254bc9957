#include "provlock/optimizer.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "provlock/closures.hpp"
#include "provlock/parallel.hpp"
#include "provlock/public_safety.hpp"
#include "provlock/standalone.hpp"

namespace provlock {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<AttrSet>& catalog_of(const Catalogs& c, int module) {
    auto it = c.find(module);
    if (it == c.end()) throw Error("MissingCatalog", "no catalog for module #" + std::to_string(module));
    return it->second;
}

// Strictly better: cheaper, or as cheap and lexicographically smaller.
bool better(double cost, AttrSet h, const std::optional<ClosureSolution>& best) {
    if (!best) return true;
    if (cost < best->cost - 1e-9) return true;
    return cost <= best->cost + 1e-9 && lex_less(h, best->hidden);
}

}  // namespace

bool is_chain_closure(const Workflow& w, int owner, const std::vector<int>& closure) {
    if (closure.empty()) return false;
    if (!w.modules[closure[0]].input_set().subset_of(w.modules[owner].output_set())) return false;
    for (std::size_t j = 1; j < closure.size(); ++j)
        if (w.modules[closure[j - 1]].output_set() != w.modules[closure[j]].input_set()) return false;
    return true;
}

std::optional<ClosureSolution> optimize_chain_closure(const Workflow& w, int owner, AttrSet S,
                                                      const std::vector<int>& chain, const Catalogs& catalogs,
                                                      std::vector<DPCell>* table) {
    if (!is_chain_closure(w, owner, chain)) throw Error("NotAChain", "closure is not a chain fed by the owner");
    const std::size_t k = chain.size();
    std::vector<std::vector<double>> Q(k);
    std::vector<std::vector<int>> back(k);

    const ModuleTable& first = w.modules[chain[0]];
    const AttrSet s_in = S & first.attr_set();
    for (AttrSet u : catalog_of(catalogs, chain[0])) {
        Q[0].push_back(s_in.subset_of(u) ? cost_of(w, u) : kInf);
        back[0].push_back(-1);
    }
    for (std::size_t j = 1; j < k; ++j) {
        const ModuleTable& prev = w.modules[chain[j - 1]];
        const ModuleTable& cur = w.modules[chain[j]];
        const auto& prev_cat = catalog_of(catalogs, chain[j - 1]);
        for (AttrSet u : catalog_of(catalogs, chain[j])) {
            double best = kInf;
            int arg = -1;
            for (std::size_t q = 0; q < prev_cat.size(); ++q)
                if ((prev_cat[q] & prev.output_set()) == (u & cur.input_set()) && Q[j - 1][q] < best) {
                    best = Q[j - 1][q];
                    arg = static_cast<int>(q);
                }
            Q[j].push_back(arg < 0 ? kInf : cost_of(w, u & cur.output_set()) + best);
            back[j].push_back(arg);
        }
    }
    if (table)
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t l = 0; l < Q[j].size(); ++l)
                table->push_back({chain[j], catalog_of(catalogs, chain[j])[l], Q[j][l]});

    // Pick the best final entry; ties go to the lexicographically smaller hidden set.
    std::optional<ClosureSolution> best;
    for (std::size_t l = 0; l < Q[k - 1].size(); ++l) {
        if (Q[k - 1][l] == kInf) continue;
        ClosureSolution sol;
        int idx = static_cast<int>(l);
        for (std::size_t j = k; j-- > 0;) {
            const AttrSet u = catalog_of(catalogs, chain[j])[idx];
            sol.picks[chain[j]] = u;
            sol.hidden |= u;
            idx = back[j][idx];
        }
        sol.hidden |= S;
        sol.cost = Q[k - 1][l] + cost_of(w, S - first.attr_set());
        if (better(sol.cost, sol.hidden, best)) best = std::move(sol);
    }
    return best;
}

namespace {

// Parent of each closure module (the owner or another closure module), or nullopt when
// the closure is not a forest under the owner.
std::optional<std::map<int, int>> tree_parents(const Workflow& w, int owner, const std::vector<int>& closure) {
    std::set<int> members(closure.begin(), closure.end());
    std::map<int, int> parent;
    for (int j : closure) {
        int p = -1;
        for (AttrIndex a : w.modules[j].inputs) {
            const int prod = w.producer[a];
            if (prod != owner && !members.count(prod)) return std::nullopt;
            if (p >= 0 && p != prod) return std::nullopt;
            p = prod;
        }
        if (p < 0) return std::nullopt;
        parent[j] = p;
    }
    for (AttrIndex a : w.modules[owner].outputs)
        if (std::count_if(w.consumers[a].begin(), w.consumers[a].end(), [&](int c) { return members.count(c); }) > 1)
            return std::nullopt;
    for (int j : closure)
        for (AttrIndex a : w.modules[j].outputs)
            if (std::count_if(w.consumers[a].begin(), w.consumers[a].end(), [&](int c) { return members.count(c); }) > 1)
                return std::nullopt;
    return parent;
}

}  // namespace

bool is_tree_closure(const Workflow& w, int owner, const std::vector<int>& closure) {
    return !closure.empty() && tree_parents(w, owner, closure).has_value();
}

std::optional<ClosureSolution> optimize_tree_closure(const Workflow& w, int owner, AttrSet S,
                                                     const std::vector<int>& closure, const Catalogs& catalogs,
                                                     std::vector<DPCell>* table) {
    const auto parents = tree_parents(w, owner, closure);
    if (!parents || closure.empty()) throw Error("NotATree", "closure is not a tree rooted at the owner");
    std::map<int, std::vector<int>> children;
    for (const auto& [j, p] : *parents) children[p].push_back(j);

    // Q[j][l] and the chosen child entries, filled bottom-up (closure is in topological order).
    std::map<int, std::vector<double>> Q;
    std::map<int, std::vector<std::map<int, int>>> choice;
    for (auto it = closure.rbegin(); it != closure.rend(); ++it) {
        const int j = *it;
        const ModuleTable& m = w.modules[j];
        AttrSet consumed;
        for (int c : children[j]) consumed |= w.modules[c].input_set();
        for (AttrSet u : catalog_of(catalogs, j)) {
            // A node pays for its hidden inputs and for hidden outputs no child reads.
            double cost = cost_of(w, u & m.input_set()) + cost_of(w, (u & m.output_set()) - consumed);
            std::map<int, int> picked;
            for (int c : children[j]) {
                const auto& cat = catalog_of(catalogs, c);
                const AttrSet need = u & w.modules[c].input_set();
                double best = kInf;
                int arg = -1;
                for (std::size_t k = 0; k < cat.size(); ++k)
                    if ((cat[k] & w.modules[c].input_set()) == need && Q[c][k] < best) {
                        best = Q[c][k];
                        arg = static_cast<int>(k);
                    }
                cost += best;
                picked[c] = arg;
            }
            Q[j].push_back(cost);
            choice[j].push_back(std::move(picked));
        }
    }
    if (table)
        for (int j : closure)
            for (std::size_t l = 0; l < Q[j].size(); ++l)
                table->push_back({j, catalog_of(catalogs, j)[l], Q[j][l]});

    ClosureSolution sol;
    sol.hidden = S;
    sol.cost = 0;
    AttrSet fed;
    std::vector<std::pair<int, int>> stack;
    for (int c : children[owner]) {
        const auto& cat = catalog_of(catalogs, c);
        const AttrSet need = S & w.modules[c].input_set();
        double best = kInf;
        int arg = -1;
        for (std::size_t k = 0; k < cat.size(); ++k)
            if (need.subset_of(cat[k] & w.modules[c].input_set()) &&
                (Q[c][k] < best - 1e-9 || (Q[c][k] <= best + 1e-9 && arg >= 0 && lex_less(cat[k], cat[arg])))) {
                best = Q[c][k];
                arg = static_cast<int>(k);
            }
        if (arg < 0 || best == kInf) return std::nullopt;
        sol.cost += best;
        fed |= w.modules[c].input_set();
        stack.emplace_back(c, arg);
    }
    sol.cost += cost_of(w, S - fed);
    while (!stack.empty()) {
        auto [j, l] = stack.back();
        stack.pop_back();
        const AttrSet u = catalog_of(catalogs, j)[l];
        sol.picks[j] = u;
        sol.hidden |= u;
        for (const auto& [c, k] : choice[j][l]) stack.emplace_back(c, k);
    }
    return sol;
}

std::optional<ClosureSolution> optimize_dag_closure(const Workflow& w, int owner, AttrSet S,
                                                    const std::vector<int>& closure, const Catalogs& catalogs,
                                                    bool general) {
    const AttrSet owner_out = w.modules[owner].output_set();
    if (closure.empty()) return ClosureSolution{S, cost_of(w, S), {}};

    std::optional<ClosureSolution> best;
    std::map<int, AttrSet> picks;
    // `decided` attributes have a fixed hidden/visible status; `hidden` holds the hidden ones.
    auto rec = [&](auto&& self, std::size_t idx, AttrSet decided, AttrSet hidden) -> void {
        const double cost = cost_of(w, hidden);
        if (best && cost > best->cost + 1e-9) return;
        if (idx == closure.size()) {
            const AttrSet h = hidden & owner_out;
            const auto again = general ? downward_closure(w, h) : public_closure(w, h);
            if (again != closure) return;
            if (better(cost, hidden, best)) best = ClosureSolution{hidden, cost, picks};
            return;
        }
        const int j = closure[idx];
        const AttrSet A = w.modules[j].attr_set();
        for (AttrSet u : catalog_of(catalogs, j)) {
            if ((u & decided & A) != (hidden & decided & A)) continue;
            picks[j] = u;
            self(self, idx + 1, decided | A, hidden | u);
        }
        picks.erase(j);
    };
    // S is hidden; other owner outputs stay open so a pick may hide them as well.
    rec(rec, 0, S, S);
    return best;
}

const char* to_string(Route r) {
    switch (r) {
        case Route::SinglePred: return "single-pred";
        case Route::General: return "general";
        case Route::Both: return "both";
    }
    return "?";
}

namespace {

struct RouteOutcome {
    std::vector<ModuleOptimum> per_module;
    std::vector<ModuleChoice> choices;
};

RouteOutcome run_route(const Workflow& w, int gamma, const GammaTargets& targets, bool general, int jobs) {
    const auto priv = w.private_modules();

    // Catalogs for every module that can appear in some closure.
    std::set<int> needed;
    for (int i : priv) {
        const AttrSet out = w.modules[i].output_set();
        for (int j : general ? downward_closure(w, out) : public_closure(w, out)) needed.insert(j);
    }
    std::vector<int> needed_list(needed.begin(), needed.end());
    std::vector<std::vector<AttrSet>> computed(needed_list.size());
    parallel_for(needed_list.size(), jobs, [&](std::size_t k) {
        const IOTable t = io_table(w.modules[needed_list[k]]);
        computed[k] = general ? enumerate_dsafe(t) : enumerate_udsafe(t);
    });
    Catalogs catalogs;
    for (std::size_t k = 0; k < needed_list.size(); ++k) catalogs[needed_list[k]] = std::move(computed[k]);

    // Safe subsets and the cheapest closure choice per private module.
    RouteOutcome out;
    out.per_module.resize(priv.size());
    out.choices.resize(priv.size());
    std::vector<char> found(priv.size(), 0);
    parallel_for(priv.size(), jobs, [&](std::size_t k) {
        const int i = priv[k];
        const auto target = targets.find(i);
        const int g = target == targets.end() ? gamma : target->second;
        const SafeCatalog safe = enumerate_safe_subsets(w, i, g, true);
        std::optional<ClosureSolution> best;
        ModuleOptimum opt{i, g, {}, {}, 0, "none"};
        for (AttrSet S : safe.subsets) {
            std::vector<int> closure;
            if (!S.empty()) closure = general ? downward_closure(w, S) : public_closure(w, S);
            std::optional<ClosureSolution> sol;
            std::string method = "none";
            if (closure.empty()) {
                sol = ClosureSolution{S, cost_of(w, S), {}};
            } else if (!general && is_chain_closure(w, i, closure)) {
                sol = optimize_chain_closure(w, i, S, closure, catalogs);
                method = "chain";
            } else if (!general && is_tree_closure(w, i, closure)) {
                sol = optimize_tree_closure(w, i, S, closure, catalogs);
                method = "tree";
            } else {
                sol = optimize_dag_closure(w, i, S, closure, catalogs, general);
                method = "dag";
            }
            if (sol && better(sol->cost, sol->hidden, best)) {
                best = sol;
                opt = {i, g, S, sol->hidden, sol->cost, method};
            }
        }
        out.per_module[k] = opt;
        if (!best) return;
        found[k] = 1;
        out.choices[k] = {i, best->hidden & w.modules[i].output_set(), best->picks, g};
    });
    for (std::size_t k = 0; k < priv.size(); ++k)
        if (!found[k])
            throw Error("NoFeasiblePlan", "no plan for private module " + w.modules[priv[k]].name + " at gamma " +
                                              std::to_string(out.per_module[k].gamma));
    return out;
}

OptimizeResult finish(const Workflow& w, int gamma, bool general, RouteOutcome&& o) {
    OptimizeResult r;
    r.route = general ? Route::General : Route::SinglePred;
    r.plan = general ? assemble_general(w, o.choices, gamma) : assemble_single_pred(w, o.choices, gamma);
    r.hidden = r.plan.hidden;
    r.cost = cost_of(w, r.hidden);
    r.per_module = std::move(o.per_module);
    return r;
}

}  // namespace

OptimizeResult optimize_workflow(const Workflow& w, int gamma, Route route, int jobs, const GammaTargets& targets) {
    if (route == Route::SinglePred) {
        const auto cls = classify_single_predecessor(w);
        if (!cls.is_single_predecessor) {
            const auto& v = cls.violations.front();
            throw Error("NotSinglePredecessor", std::string(to_string(v.kind)) + " at " +
                                                    (v.module.empty() ? v.witness : v.module));
        }
        return finish(w, gamma, false, run_route(w, gamma, targets, false, jobs));
    }
    if (route == Route::General) return finish(w, gamma, true, run_route(w, gamma, targets, true, jobs));

    std::optional<OptimizeResult> single;
    if (classify_single_predecessor(w).is_single_predecessor) {
        try {
            single = finish(w, gamma, false, run_route(w, gamma, targets, false, jobs));
        } catch (const Error& e) {
            if (e.code() != "NoFeasiblePlan") throw;
        }
    }
    std::optional<OptimizeResult> gen;
    try {
        gen = finish(w, gamma, true, run_route(w, gamma, targets, true, jobs));
    } catch (const Error& e) {
        if (e.code() != "NoFeasiblePlan" || !single) throw;
    }
    if (!gen) return *single;
    if (!single) return *gen;
    if (gen->cost < single->cost - 1e-9 || (gen->cost <= single->cost + 1e-9 && lex_less(gen->hidden, single->hidden)))
        return *gen;
    return *single;
}

}  // namespace provlock
