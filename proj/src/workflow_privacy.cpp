#include "provlock/workflow_privacy.hpp"

#include <algorithm>
#include <map>

#include "provlock/closures.hpp"
#include "provlock/equiv.hpp"
#include "provlock/parallel.hpp"
#include "provlock/public_safety.hpp"
#include "provlock/standalone.hpp"

namespace provlock {

namespace {

void require_full_schema(const Workflow& w, const Relation& R) {
    if (R.schema != w.all_attr_list())
        throw Error("SchemaMismatch", "workflow relations must carry every attribute in declaration order");
}

// Row-by-row completion search.  Within a row, hidden initial inputs are chosen first,
// then modules run in topological order: public modules compute their outputs, private
// modules either reuse the output already fixed for the same input or try every output
// compatible with the visible cells.
class WorldSearch {
public:
    WorldSearch(const Workflow& w, const Relation& R, AttrSet H, const std::function<bool(const Relation&)>& visit,
                const std::optional<OutputPin>& pin)
        : w_(w), H_(H), visit_(visit), pin_(pin), world_(R) {
        require_full_schema(w, R);
        for (AttrIndex a : w.initial_inputs)
            if (H.contains(a)) steps_.push_back({a, -1});
        for (int m : w.topo_order) steps_.push_back({-1, m});
        fixed_out_.resize(w.modules.size());
        refs_.resize(w.modules.size());
        for (std::size_t m = 0; m < w.modules.size(); ++m) {
            fixed_out_[m].resize(w.modules[m].input_count());
            refs_[m].assign(w.modules[m].input_count(), 0);
        }
    }

    std::size_t run() {
        if (world_.rows.empty()) {
            ++count_;
            visit_(world_);
        } else {
            step(0, 0);
        }
        return count_;
    }

private:
    struct Step {
        AttrIndex attr;
        int module;
    };

    bool step(std::size_t r, std::size_t s) {
        Row& t = world_.rows[r];
        if (s == steps_.size()) {
            for (std::size_t k = 0; k < r; ++k)
                if (world_.rows[k] == t) return true;
            if (r + 1 == world_.rows.size()) {
                ++count_;
                return visit_(world_);
            }
            return step(r + 1, 0);
        }
        const Step& st = steps_[s];
        if (st.attr >= 0) {
            for (int v = 0; v < w_.domain_size(st.attr); ++v) {
                t[st.attr] = v;
                if (!step(r, s + 1)) return false;
            }
            return true;
        }

        const ModuleTable& m = w_.modules[st.module];
        Row x;
        x.reserve(m.inputs.size());
        for (AttrIndex a : m.inputs) x.push_back(t[a]);
        const std::size_t code = m.encode_input(x);
        const bool pinned = pin_ && pin_->module == st.module && pin_->x == x;

        auto try_output = [&](const Row& y) -> bool {
            for (std::size_t k = 0; k < m.outputs.size(); ++k) {
                const AttrIndex a = m.outputs[k];
                if (H_.contains(a))
                    t[a] = y[k];
                else if (t[a] != y[k])
                    return true;  // contradicts a visible cell: prune
            }
            return step(r, s + 1);
        };

        if (m.is_public()) {
            const Row& y = m.table[code];
            if (pinned && pin_->y != y) return true;
            return try_output(y);
        }
        if (refs_[st.module][code] > 0) {
            ++refs_[st.module][code];
            bool go = try_output(fixed_out_[st.module][code]);
            --refs_[st.module][code];
            return go;
        }
        auto claim = [&](const Row& y) -> bool {
            fixed_out_[st.module][code] = y;
            refs_[st.module][code] = 1;
            bool go = try_output(y);
            refs_[st.module][code] = 0;
            return go;
        };
        if (pinned) return claim(pin_->y);

        // Every output agreeing with the visible output cells of this row.
        Row y(m.outputs.size());
        std::vector<std::size_t> free;
        std::size_t total = 1;
        for (std::size_t k = 0; k < m.outputs.size(); ++k) {
            if (H_.contains(m.outputs[k])) {
                free.push_back(k);
                total *= static_cast<std::size_t>(m.output_radix[k]);
            } else {
                y[k] = t[m.outputs[k]];
            }
        }
        for (std::size_t code_y = 0; code_y < total; ++code_y) {
            std::size_t c = code_y;
            for (std::size_t i = free.size(); i-- > 0;) {
                y[free[i]] = static_cast<int>(c % m.output_radix[free[i]]);
                c /= m.output_radix[free[i]];
            }
            if (!claim(y)) return false;
        }
        return true;
    }

    const Workflow& w_;
    AttrSet H_;
    const std::function<bool(const Relation&)>& visit_;
    const std::optional<OutputPin>& pin_;
    Relation world_;
    std::vector<Step> steps_;
    std::vector<std::vector<Row>> fixed_out_;
    std::vector<std::vector<int>> refs_;
    std::size_t count_ = 0;
};

std::vector<Row> distinct_inputs(const Workflow& w, const Relation& R, int module) {
    Relation p = R.project(w.modules[module].inputs);
    return p.rows;
}

// Outputs that `world` admits for input x of module m under the implication reading.
void harvest(const Workflow& w, int module, const Row& x, const Relation& world, const std::vector<Row>& all_outputs,
             std::set<Row>& out) {
    const auto& m = w.modules[module];
    for (const Row& t : world.rows) {
        bool match = true;
        for (std::size_t i = 0; i < m.inputs.size() && match; ++i) match = t[m.inputs[i]] == x[i];
        if (!match) continue;
        Row y;
        for (AttrIndex a : m.outputs) y.push_back(t[a]);
        out.insert(std::move(y));
        return;  // all rows with input x share one output
    }
    out.insert(all_outputs.begin(), all_outputs.end());
}

std::set<Row> out_for(const Workflow& w, const Relation& R, AttrSet H, int module, const Row& x, int limit) {
    const auto& m = w.modules[module];
    const auto candidates = domain_product(w, m.outputs);
    std::set<Row> out;
    for (const Row& y : candidates) {
        if (limit > 0 && static_cast<int>(out.size()) >= limit) break;
        if (out.count(y)) continue;
        workflow_worlds(
            w, R, H,
            [&](const Relation& world) {
                harvest(w, module, x, world, candidates, out);
                return false;
            },
            OutputPin{module, x, y});
    }
    return out;
}

}  // namespace

std::size_t workflow_worlds(const Workflow& w, const Relation& R, AttrSet H,
                            const std::function<bool(const Relation&)>& visit, const std::optional<OutputPin>& pin) {
    return WorldSearch(w, R, H, visit, pin).run();
}

bool is_workflow_world(const Workflow& w, const Relation& R, AttrSet H, const Relation& c) {
    require_full_schema(w, R);
    if (c.schema != R.schema || c.rows.size() != R.rows.size()) return false;
    for (std::size_t i = 0; i < c.rows.size(); ++i)
        for (std::size_t j = i + 1; j < c.rows.size(); ++j)
            if (c.rows[i] == c.rows[j]) return false;

    const auto visible = (w.all_attrs() - H).members();
    std::vector<Row> a, b;
    for (const Row& t : R.rows) a.push_back(R.pick(t, visible));
    for (const Row& t : c.rows) b.push_back(c.pick(t, visible));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return false;

    for (const auto& m : w.modules) {
        if (!c.satisfies_fd(m.inputs, m.outputs)) return false;
        if (!m.is_public()) continue;
        for (const Row& t : c.rows)
            if (c.pick(t, m.outputs) != m.apply(c.pick(t, m.inputs))) return false;
    }
    return true;
}

std::set<Row> workflow_out(const Workflow& w, const Relation& R, AttrSet H, int module, const Row& x, int limit) {
    require_full_schema(w, R);
    const auto inputs = distinct_inputs(w, R, module);
    if (std::find(inputs.begin(), inputs.end(), x) == inputs.end())
        throw Error("InputNotInRelation", "input tuple does not occur in the relation for " + w.modules[module].name);
    return out_for(w, R, H, module, x, limit);
}

PrivacyReport gamma_achieved(const Workflow& w, const Relation& R, AttrSet H, int limit, int jobs) {
    require_full_schema(w, R);
    PrivacyReport rep;
    rep.limit = limit;
    const auto priv = w.private_modules();
    rep.modules.resize(priv.size());
    parallel_for(priv.size(), jobs, [&](std::size_t k) {
        ModulePrivacy mp{priv[k], {}, 0};
        for (const Row& x : distinct_inputs(w, R, priv[k])) {
            int n = static_cast<int>(out_for(w, R, H, priv[k], x, limit).size());
            mp.out_sizes.emplace_back(x, n);
            mp.gamma = mp.out_sizes.size() == 1 ? n : std::min(mp.gamma, n);
        }
        rep.modules[k] = std::move(mp);
    });
    for (std::size_t k = 0; k < rep.modules.size(); ++k)
        rep.gamma = k == 0 ? rep.modules[k].gamma : std::min(rep.gamma, rep.modules[k].gamma);
    return rep;
}

// ---------------------------------------------------------------- assembly

namespace {

AttrSet union_of(const std::map<int, AttrSet>& m) {
    AttrSet s;
    for (const auto& [_, v] : m) s |= v;
    return s;
}

PlanEntry check_choice(const Workflow& w, const ModuleChoice& c, int plan_gamma, bool general) {
    const int gamma = c.gamma > 0 ? c.gamma : plan_gamma;
    const std::string name = w.modules[c.module].name;
    const ModuleTable& m = w.modules[c.module];
    if (m.is_public()) throw ConditionViolated("i", name + " is public");
    if (!c.h.subset_of(m.output_set())) throw ConditionViolated("i", w.format(c.h) + " is not within the outputs of " + name);
    if (!is_standalone_safe(m, c.h, gamma))
        throw ConditionViolated("i", w.format(c.h) + " is not safe for " + name + " at gamma " + std::to_string(gamma));

    PlanEntry e{c.module, c.h, {}, c.closure, {}, gamma};
    if (!c.h.empty()) e.closure_modules = general ? downward_closure(w, c.h) : public_closure(w, c.h);

    AttrSet allowed = m.output_set();
    for (int j : e.closure_modules) {
        allowed |= w.modules[j].attr_set();
        if (!c.closure.count(j)) throw ConditionViolated("ii", "no subset chosen for " + w.modules[j].name);
    }
    for (const auto& [j, u] : c.closure) {
        if (std::find(e.closure_modules.begin(), e.closure_modules.end(), j) == e.closure_modules.end())
            throw ConditionViolated("iii", w.modules[j].name + " is outside the closure of " + w.format(c.h));
        if (!u.subset_of(w.modules[j].attr_set()))
            throw ConditionViolated("iii", w.format(u) + " is not within the attributes of " + w.modules[j].name);
    }
    e.hidden = c.h | union_of(c.closure);
    if (!e.hidden.subset_of(allowed)) throw ConditionViolated("iii", w.format(e.hidden) + " hides outside the closure");
    if ((e.hidden & m.output_set()) != c.h)
        throw ConditionViolated("i", "closure subsets hide " + w.format((e.hidden & m.output_set()) - c.h) +
                                         " of " + name + " beyond h");
    for (int j : e.closure_modules) {
        const AttrSet u = c.closure.at(j);
        if ((e.hidden & w.modules[j].attr_set()) != u)
            throw ConditionViolated("ii", "hidden set meets " + w.modules[j].name + " in " +
                                              w.format(e.hidden & w.modules[j].attr_set()) + ", not " + w.format(u));
        const bool ok = general ? is_dsafe(w.modules[j], u) : is_udsafe(w.modules[j], u);
        if (!ok)
            throw ConditionViolated("ii", w.modules[j].name + " is not " + (general ? "D-safe" : "UD-safe") +
                                              " w.r.t. " + w.format(u));
    }
    return e;
}

AssemblyPlan assemble(const Workflow& w, const std::vector<ModuleChoice>& choices, int gamma, bool general) {
    AssemblyPlan plan;
    plan.general = general;
    plan.gamma = gamma;
    for (int i : w.private_modules()) {
        auto it = std::find_if(choices.begin(), choices.end(), [&](const ModuleChoice& c) { return c.module == i; });
        if (it == choices.end()) throw ConditionViolated("i", "no choice for private module " + w.modules[i].name);
        plan.entries.push_back(check_choice(w, *it, gamma, general));
    }
    for (const auto& c : choices)
        if (w.modules[c.module].is_public()) throw ConditionViolated("i", w.modules[c.module].name + " is public");
    for (std::size_t a = 0; a < plan.entries.size(); ++a) {
        if (!general)
            for (std::size_t b = 0; b < a; ++b)
                if (plan.entries[a].hidden.intersects(plan.entries[b].hidden))
                    throw ConditionViolated("disjoint", w.modules[plan.entries[a].module].name + " and " +
                                                            w.modules[plan.entries[b].module].name + " share " +
                                                            w.format(plan.entries[a].hidden & plan.entries[b].hidden));
        plan.hidden |= plan.entries[a].hidden;
    }
    return plan;
}

}  // namespace

AssemblyPlan assemble_single_pred(const Workflow& w, const std::vector<ModuleChoice>& choices, int gamma) {
    const auto cls = classify_single_predecessor(w);
    if (!cls.is_single_predecessor) {
        const auto& v = cls.violations.front();
        throw Error("NotSinglePredecessor", std::string(to_string(v.kind)) + " at " +
                                                (v.module.empty() ? v.witness : v.module));
    }
    return assemble(w, choices, gamma, false);
}

AssemblyPlan assemble_general(const Workflow& w, const std::vector<ModuleChoice>& choices, int gamma) {
    return assemble(w, choices, gamma, true);
}

// ---------------------------------------------------------------- witness worlds

namespace {

// Redefines private modules with Flip/EFlip (or a value swap) and re-runs the workflow.
// nullopt when the closure shape is outside what the construction handles.
std::optional<Relation> flip_construction(const Workflow& w, const Relation& R, int module, AttrSet h, const Row& x,
                                          const Row& y, AttrSet H, WitnessRoute route) {
    const ModuleTable& mi = w.modules[module];
    const Row z = mi.apply(x);
    const Tuple ty{mi.outputs, y}, tz{mi.outputs, z};
    (void)H;
    std::vector<Row> initial;
    for (const Row& t : R.rows) initial.push_back(R.pick(t, w.initial_inputs));

    auto plain = [&](int j, const Row& u) { return w.modules[j].apply(u); };

    if (route == WitnessRoute::General) {
        return evaluate(w, initial, [&](int j, const Row& u) -> Row {
            if (j != module) return plain(j, u);
            return flip(ty, tz, Tuple{mi.outputs, mi.apply(u)}).values;
        });
    }

    const auto closure = h.empty() ? std::vector<int>{} : public_closure(w, h);
    std::optional<CompositeModule> M;
    bool private_successor = false;
    if (!closure.empty()) {
        M = compose_public(w, closure, false);
        for (AttrIndex a : M->outputs)
            for (int k : w.consumers[a])
                if (!w.modules[k].is_public()) private_successor = true;
        if (!AttrSet::of(M->inputs).subset_of(mi.output_set()))
            return std::nullopt;
    }

    if (!private_successor) {
        // Swap y and z value by value on each output where they differ.  A private reader
        // of only some of those outputs can then undo the swap on what it sees.
        std::map<AttrIndex, std::pair<int, int>> swap;
        for (std::size_t k = 0; k < y.size(); ++k)
            if (y[k] != z[k]) swap[mi.outputs[k]] = {y[k], z[k]};
        auto swapped = [&](const std::vector<AttrIndex>& schema, Row r) {
            for (std::size_t k = 0; k < r.size(); ++k) {
                const auto it = swap.find(schema[k]);
                if (it == swap.end()) continue;
                if (r[k] == it->second.first) r[k] = it->second.second;
                else if (r[k] == it->second.second) r[k] = it->second.first;
            }
            return r;
        };
        return evaluate(w, initial, [&](int j, const Row& u) -> Row {
            const ModuleTable& mj = w.modules[j];
            if (j == module) return swapped(mi.outputs, mi.apply(u));
            if (mj.is_public()) return plain(j, u);
            return mj.apply(swapped(mj.inputs, u));
        });
    }

    // The closure feeds private modules: extend y and z with the closure's boundary
    // outputs and switch the closure inputs on what the closure would emit.
    auto run_closure = [&](const Tuple& in) -> Tuple {
        const Row key = in.project(M->inputs).values;
        for (const auto& [bx, by] : M->boundary.rows)
            if (bx == key) return Tuple{M->outputs, by};
        throw Error("PreconditionViolated", "closure input not found");
    };
    const Tuple Y = concat(ty, run_closure(ty));
    const Tuple Z = concat(tz, run_closure(tz));
    // When the closure emits the same boundary values for y and z the key cannot tell
    // them apart; the plain flip is then enough and downstream modules see no change.
    const AttrSet Ik = run_closure(ty) == run_closure(tz) ? AttrSet{} : AttrSet::of(M->inputs);

    return evaluate(w, initial, [&](int j, const Row& u) -> Row {
        const ModuleTable& mj = w.modules[j];
        if (j == module) {
            const Tuple o{mi.outputs, mi.apply(u)};
            const Tuple outer = flip(Y, Z, o);
            Row out = outer.values;
            if (Ik.empty()) return out;
            const Tuple o_in = o.project(M->inputs);
            const Tuple inner = eflip(Y, Z, mi.outputs, run_closure(o_in), o_in);
            for (std::size_t k = 0; k < mi.outputs.size(); ++k)
                if (Ik.contains(mi.outputs[k])) out[k] = inner.get(mi.outputs[k]);
            return out;
        }
        if (mj.is_public()) return plain(j, u);
        return mj.apply(flip(Y, Z, Tuple{mj.inputs, u}).values);
    });
}

bool maps_to(const Workflow& w, const Relation& world, int module, const Row& x, const Row& y) {
    const ModuleTable& m = w.modules[module];
    for (const Row& r : world.rows)
        if (world.pick(r, m.inputs) == x && world.pick(r, m.outputs) != y) return false;
    return true;
}

}  // namespace

Relation construct_witness_world(const Workflow& w, const Relation& R, int module, AttrSet h, const Row& x,
                                 const Row& y, AttrSet H, WitnessRoute route) {
    require_full_schema(w, R);
    const ModuleTable& mi = w.modules[module];
    if (mi.is_public()) throw Error("PreconditionViolated", mi.name + " is public");
    if ((H & mi.output_set()) != h || !h.subset_of(mi.output_set()))
        throw Error("PreconditionViolated", "h must equal H restricted to the outputs of " + mi.name);
    if (x.size() != mi.inputs.size() || y.size() != mi.outputs.size())
        throw Error("PreconditionViolated", "x or y has the wrong arity");
    if (!equiv(Tuple{mi.outputs, y}, Tuple{mi.outputs, mi.apply(x)}, mi.outputs, h))
        throw Error("PreconditionViolated", "y differs from m(x) on a visible output");

    std::optional<Relation> built;
    try {
        built = flip_construction(w, R, module, h, x, y, H, route);
    } catch (const Error&) {
    }
    if (built && is_workflow_world(w, R, H, *built) && maps_to(w, *built, module, x, y)) return *built;
    // The direct construction only sees whole output tuples; private readers of part of
    // them can break it.  Fall back to searching the worlds with the output pinned.
    std::optional<Relation> found;
    workflow_worlds(w, R, H, [&](const Relation& world) {
        found = world;
        return false;
    }, OutputPin{module, x, y});
    if (!found) throw Error("NoWitness", "no world maps the input of " + mi.name + " to the requested output");
    return *found;
}

}  // namespace provlock
