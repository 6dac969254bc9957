// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "provlock/equiv.hpp"
#include "provlock/optimizer.hpp"
#include "support.hpp"

using namespace testsupport;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

std::map<int, bool> results;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.3fs", seconds_since(t0));
    results[id] = o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << title << ": " << o.detail << " [" << timing << "]"
              << std::endl;
}

std::string names(const Workflow& w, const std::vector<int>& ms) {
    std::string s = "{";
    for (std::size_t k = 0; k < ms.size(); ++k) s += (k ? "," : "") + w.modules[ms[k]].name;
    return s + "}";
}

std::vector<int> module_ids(const Workflow& w, const std::vector<std::string>& ns) {
    std::vector<int> out;
    for (const auto& n : ns) out.push_back(w.module_index(n));
    return out;
}

Outcome criterion1() {
    const Workflow w = fixture("fig1-m1");
    const ModuleTable& m1 = w.modules[w.module_index("m1")];
    const auto t0 = Clock::now();
    const std::size_t n = standalone_worlds(m1, attrs(w, {"a2", "a4"}), [](const Relation&) { return true; });
    const double secs = seconds_since(t0);
    return {n == 64 && secs < 0.1, "worlds=" + std::to_string(n) + " (expected 64)"};
}

Outcome criterion2() {
    const Workflow w = fixture("fig1-m1");
    const ModuleTable& m1 = w.modules[w.module_index("m1")];
    const bool safe24 = is_standalone_safe(m1, attrs(w, {"a2", "a4"}), 4);
    const bool safe12 = is_standalone_safe(m1, attrs(w, {"a1", "a2"}), 4);
    bool all3 = true;
    for (const auto& out : standalone_out_all(m1, attrs(w, {"a1", "a2"}))) all3 = all3 && out.size() == 3;
    std::ostringstream d;
    d << "safe{a2,a4}=" << safe24 << " safe{a1,a2}=" << safe12 << " |Out{a1,a2}|==3 for every x: " << all3;
    return {safe24 && !safe12 && all3, d.str()};
}

Outcome criterion3() {
    const Workflow r1 = fixture("fig3-r1"), r2 = fixture("fig3-r2"), f1 = fixture("fig1-m1");
    const auto c1 = enumerate_udsafe(r1, 0).subsets;
    auto has = [](const std::vector<AttrSet>& c, AttrSet s) { return std::find(c.begin(), c.end(), s) != c.end(); };
    const bool r1ok = has(c1, attrs(r1, {"a1", "a3"})) && has(c1, attrs(r1, {"a2", "a4"})) &&
                      !has(c1, attrs(r1, {"a1", "a4"}));
    bool r2ok = true;
    for (AttrSet s : enumerate_udsafe(r2, 0).subsets) r2ok = r2ok && s.contains(r2.attr_index("a2"));
    const int m1 = f1.module_index("m1");
    const auto cm = enumerate_udsafe(f1, m1).subsets;
    const bool m1ok = cm == std::vector<AttrSet>{f1.modules[m1].attr_set()};
    std::ostringstream d;
    d << "R1 " << r1ok << ", R2 all contain a2 " << r2ok << ", m1 only trivial " << m1ok;
    return {r1ok && r2ok && m1ok, d.str()};
}

Outcome criterion4() {
    Rng rng(4004);
    int mismatches = 0;
    for (int t = 0; t < 200; ++t) {
        const Workflow w = random_module(rng, 4);
        const ModuleTable& m = w.modules[0];
        if (enumerate_udsafe(io_table(m)) != def_filter(m, def_udsafe)) ++mismatches;
    }
    return {mismatches == 0, "200 random modules, mismatches=" + std::to_string(mismatches)};
}

Outcome criterion5() {
    const Workflow w = fixture("fig2-singlepred");
    const auto c2 = public_closure(w, attrs(w, {"a2"}));
    const auto c3 = public_closure(w, attrs(w, {"a3"}));
    const auto c4 = public_closure(w, attrs(w, {"a4"}));
    const bool ok = c2 == module_ids(w, {"m3", "m4", "m6", "m7"}) && c3 == c2 && c4 == module_ids(w, {"m5", "m8"});
    return {ok, "C({a2})=" + names(w, c2) + " C({a3})=" + names(w, c3) + " C({a4})=" + names(w, c4)};
}

Outcome criterion6() {
    struct Case {
        const char* id;
        std::vector<std::string> hidden;
    };
    const std::vector<Case> cases = {{"wa-nopred", {"a2", "a3", "a4", "a5"}},
                                     {"wb-chain", {"a3", "a5"}},
                                     {"app-multipred", {"a2", "a3", "a4", "a5"}},
                                     {"app-datashare", {"a3", "a4", "a5"}}};
    bool ok = true;
    std::ostringstream d;
    for (const auto& c : cases) {
        const Workflow w = fixture(c.id);
        const auto t0 = Clock::now();
        const PrivacyReport rep = gamma_achieved(w, workflow_relation(w), attrs(w, c.hidden));
        const double secs = seconds_since(t0);
        // For the data-sharing case the claim concerns m1 specifically.
        int g = rep.gamma;
        if (std::string(c.id) == "app-datashare")
            for (const auto& m : rep.modules)
                if (w.modules[m.module].name == "m1") g = m.gamma;
        ok = ok && g == 1 && secs < 1.0;
        d << c.id << " gamma=" << g << " ";
    }
    return {ok, d.str()};
}

Outcome criterion7() {
    const Workflow w = fixture("wb-chain");
    const Relation R = workflow_relation(w);
    const AttrSet H = attrs(w, {"a3", "a4", "a5"});
    const PrivacyReport rep = gamma_achieved(w, R, H);
    const int m1 = w.module_index("m1");
    const Relation world = construct_witness_world(w, R, m1, H & w.modules[m1].output_set(), {0, 0}, {1, 0}, H,
                                                   WitnessRoute::SinglePredecessor);
    // Rows over a1..a6, as printed in the witness table.
    const std::vector<Row> table4 = {{0, 0, 1, 0, 1, 0}, {0, 1, 0, 0, 0, 1}, {1, 0, 0, 0, 0, 1}, {1, 1, 0, 0, 0, 1}};
    const bool same = world.rows == table4;
    const bool member = is_workflow_world(w, R, H, world);
    std::ostringstream d;
    d << "gamma=" << rep.gamma << " witness equals table row-for-row: " << same << " is a world: " << member;
    return {rep.gamma == 2 && same && member, d.str()};
}

Outcome criterion8() {
    const auto t0 = Clock::now();
    Rng rng(8008);
    int workflows_sp = 0, plans_sp = 0, workflows_g = 0, plans_g = 0, violations = 0, truncated = 0;
    while (workflows_sp < 100) {
        const Workflow w = random_single_pred(rng);
        ++workflows_sp;
        bool trunc = false;
        std::set<std::uint64_t> seen;
        const Relation R = workflow_relation(w);
        for (const auto& plan : valid_plans(w, 2, false, 4000, &trunc)) {
            ++plans_sp;
            if (!seen.insert(plan.hidden.bits()).second) continue;
            if (gamma_achieved(w, R, plan.hidden, 2).gamma < 2) ++violations;
        }
        truncated += trunc;
    }
    WorkflowShape shape;
    shape.allow_sharing = true;
    while (workflows_g < 100) {
        const Workflow w = random_workflow(rng, shape);
        ++workflows_g;
        bool trunc = false;
        std::set<std::uint64_t> seen;
        const Relation R = workflow_relation(w);
        for (const auto& plan : valid_plans(w, 2, true, 4000, &trunc)) {
            ++plans_g;
            if (!seen.insert(plan.hidden.bits()).second) continue;
            if (gamma_achieved(w, R, plan.hidden, 2).gamma < 2) ++violations;
        }
        truncated += trunc;
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << workflows_sp << " single-pred workflows / " << plans_sp << " plans, " << workflows_g
      << " DAG workflows / " << plans_g << " plans, violations=" << violations << ", capped=" << truncated;
    return {violations == 0 && plans_sp >= 100 && plans_g >= 100 && secs < 30.0, d.str()};
}

Outcome criterion9() {
    Rng rng(9009);
    int ds_union = 0, ds_bad = 0;
    while (ds_union < 200) {
        const Workflow w = random_module(rng, 4);
        const ModuleTable& m = w.modules[0];
        const auto ds = def_filter(m, def_dsafe);
        const AttrSet h1 = rng.pick(ds), h2 = rng.pick(ds);
        ++ds_union;
        if (!def_dsafe(m, h1 | h2)) ++ds_bad;
    }

    int comp = 0, comp_bad = 0;
    WorkflowShape shape;
    shape.private_prob = 0.0;
    shape.max_modules = 3;
    shape.max_attrs = 7;
    while (comp < 200) {
        const Workflow w = random_workflow(rng, shape);
        std::vector<int> members;
        for (int j : w.public_modules()) members.push_back(j);
        CompositeModule cm;
        try {
            cm = compose_public(w, members);
        } catch (const Error&) {
            continue;
        }
        const AttrSet boundary = cm.boundary.attr_set();
        for (AttrSet H : all_subsets(w.all_attrs())) {
            bool members_ok = true;
            for (int j : members) members_ok = members_ok && def_udsafe(w.modules[j], H & w.modules[j].attr_set());
            if (!members_ok) continue;
            ++comp;
            if (!is_udsafe(cm.boundary, H & boundary)) ++comp_bad;
        }
    }

    int flips = 0, flip_bad = 0;
    while (flips < 200) {
        // P and Q drawn from six attributes with values in {0,1,2}.
        std::vector<AttrIndex> P, Q;
        for (int a = 0; a < 6; ++a) {
            if (rng.coin()) P.push_back(a);
            if (rng.coin()) Q.push_back(a);
        }
        if (P.empty() || Q.empty()) continue;
        auto random_on = [&](const std::vector<AttrIndex>& s) {
            Tuple t{s, {}};
            for (std::size_t k = 0; k < s.size(); ++k) t.values.push_back(rng.uniform(0, 2));
            return t;
        };
        const Tuple p = random_on(P), q = random_on(P), u = random_on(Q);
        ++flips;
        // Involution.
        if (!(flip(p, q, flip(p, q, u)) == u)) ++flip_bad;
        // Q ∩ P = ∅ leaves u alone; equal projections on Q ∩ P leave u alone.
        std::vector<AttrIndex> common;
        for (AttrIndex a : Q)
            if (std::find(P.begin(), P.end(), a) != P.end()) common.push_back(a);
        if (common.empty() && !(flip(p, q, u) == u)) ++flip_bad;
        if (p.agrees_on(q, common) && !(flip(p, q, u) == u)) ++flip_bad;
        // Flip of p is q and of q is p on the full schema.
        if (!(flip(p, q, p) == q) || !(flip(p, q, q) == p)) ++flip_bad;
        // Decomposition over a split of Q.
        std::vector<AttrIndex> q1, q2;
        for (AttrIndex a : Q) (rng.coin() ? q1 : q2).push_back(a);
        if (!q1.empty() && !q2.empty()) {
            const Tuple whole = flip(p, q, u);
            const Tuple left = flip(p, q, u.project(q1)), right = flip(p, q, u.project(q2));
            // The parts are flipped independently; the whole only when every part matches.
            const bool whole_changed = !(whole == u);
            if (whole_changed && !(concat(left, right).project(Q) == whole)) ++flip_bad;
        }
    }

    int uds = 0, uds_bad = 0;
    while (uds < 200) {
        const Workflow w = random_module(rng, 4);
        const ModuleTable& m = w.modules[0];
        const auto cat = enumerate_udsafe(io_table(m));
        for (std::size_t a = 0; a < cat.size(); ++a)
            for (std::size_t b = a + 1; b < cat.size(); ++b) {
                ++uds;
                if ((cat[a] & m.output_set()) == (cat[b] & m.output_set())) ++uds_bad;
            }
    }
    std::ostringstream d;
    d << "ds-union " << ds_union << "/" << ds_bad << " bad, composite " << comp << "/" << comp_bad << " bad, flip "
      << flips << "/" << flip_bad << " bad, uds-property " << uds << " pairs/" << uds_bad << " bad";
    return {ds_bad == 0 && comp_bad == 0 && flip_bad == 0 && uds_bad == 0, d.str()};
}

Outcome criterion10() {
    int checked = 0, bad = 0;
    std::ostringstream d;
    auto check = [&](const Workflow& w, int owner, AttrSet S, const std::vector<int>& closure) {
        Catalogs cats;
        for (int j : closure) cats[j] = enumerate_udsafe(io_table(w.modules[j]));
        const BruteOptimum brute = brute_closure_optimum(w, owner, S, closure);
        std::optional<ClosureSolution> sol;
        if (is_chain_closure(w, owner, closure)) {
            sol = optimize_chain_closure(w, owner, S, closure, cats);
            const auto tree = optimize_tree_closure(w, owner, S, closure, cats);
            if (sol.has_value() != tree.has_value() || (sol && tree->cost != sol->cost)) ++bad;
        } else if (is_tree_closure(w, owner, closure)) {
            sol = optimize_tree_closure(w, owner, S, closure, cats);
        } else {
            sol = optimize_dag_closure(w, owner, S, closure, cats);
        }
        ++checked;
        if (sol.has_value() != brute.feasible) {
            ++bad;
            return;
        }
        if (!sol) return;
        if (sol->cost != brute.cost || cost_of(w, sol->hidden) != sol->cost) ++bad;
        // Re-validate as a plan for the owner alone (other private modules hide their outputs).
        std::vector<ModuleChoice> choices{{owner, sol->hidden & w.modules[owner].output_set(), sol->picks}};
        for (int i : w.private_modules())
            if (i != owner) choices.push_back({i, w.modules[i].output_set(), {}, 1});
        try {
            const AssemblyPlan plan = assemble_single_pred(w, choices, 1);
            if (!plan.entries.empty() && plan.entries[0].module == owner && !(plan.entries[0].hidden == sol->hidden))
                ++bad;
        } catch (const Error&) {
            ++bad;
        }
    };
    // Fixture closures: the chain after m1 in W_b, and both closures of m2 in the branching fixture.
    const Workflow wb = fixture("wb-chain");
    const int wb1 = wb.module_index("m1");
    for (AttrSet S : {attrs(wb, {"a3"}), attrs(wb, {"a4"}), attrs(wb, {"a3", "a4"})})
        check(wb, wb1, S, public_closure(wb, S));
    const Workflow f2 = fixture("fig2-singlepred");
    const int f2m = f2.module_index("m2");
    for (AttrSet S : {attrs(f2, {"a4"}), attrs(f2, {"a2"}), attrs(f2, {"a3"})}) check(f2, f2m, S, public_closure(f2, S));
    const int fixtures_checked = checked;

    Rng rng(1010);
    for (int t = 0; t < 25; ++t) {
        const auto inst = random_chain_instance(rng);
        check(inst.w, inst.owner, inst.S, inst.closure);
    }
    for (int t = 0; t < 25; ++t) {
        const auto inst = random_tree_instance(rng);
        check(inst.w, inst.owner, inst.S, inst.closure);
    }
    d << fixtures_checked << " fixture closures + " << (checked - fixtures_checked)
      << " random chain/tree closures, mismatches=" << bad;
    return {bad == 0 && checked - fixtures_checked >= 50, d.str()};
}

}  // namespace

int main() {
    std::cout << "acceptance run, data directory " << data_dir() << std::endl;
    report(1, "standalone worlds count", criterion1);
    report(2, "standalone privacy", criterion2);
    report(3, "UD-safe catalogs", criterion3);
    report(4, "grouping enumeration equals definition", criterion4);
    report(5, "public closures", criterion5);
    report(6, "necessity counterexamples", criterion6);
    report(7, "composability resolution and witness", criterion7);
    report(8, "theorem soundness on random workflows", criterion8);
    report(9, "lemma properties", criterion9);
    report(10, "optimizer optimality", criterion10);
    report(11, "hardness results covered by exact procedures", [] {
        const bool ok = results[4] && results[10];
        return Outcome{ok, std::string("not reproducible as experiments; exponential procedures checked by criteria 4 and 10: ") +
                               (ok ? "both passed" : "one failed")};
    });
    int failed = 0;
    for (const auto& [id, ok] : results) failed += !ok;
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << results.size() - failed << "/" << results.size() << std::endl;
    return failed ? 1 : 0;
}
