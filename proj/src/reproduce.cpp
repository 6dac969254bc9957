#include "provlock/reproduce.hpp"

#include <algorithm>
#include <sstream>

#include "provlock/closures.hpp"
#include "provlock/json_io.hpp"
#include "provlock/optimizer.hpp"
#include "provlock/public_safety.hpp"
#include "provlock/standalone.hpp"
#include "provlock/workflow_privacy.hpp"

namespace provlock {

const std::vector<std::string>& fixture_ids() {
    static const std::vector<std::string> ids = {"fig1-m1",  "fig3-r1",       "fig3-r2",       "wb-chain",
                                                 "wa-nopred", "app-multipred", "app-datashare", "fig2-singlepred"};
    return ids;
}

bool is_fixture_id(const std::string& id) {
    const auto& ids = fixture_ids();
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::string fixture_path(const std::string& data_dir, const std::string& id) {
    return data_dir + "/fixtures/" + id + ".json";
}

std::string expected_path(const std::string& data_dir, const std::string& id) {
    return data_dir + "/expected/" + id + ".txt";
}

Workflow load_fixture(const std::string& data_dir, const std::string& id) {
    if (!is_fixture_id(id)) throw Error("UnknownFixture", id);
    return build_workflow(load_workflow_spec(fixture_path(data_dir, id)));
}

namespace {

std::string module_list(const Workflow& w, const std::vector<int>& ms) {
    std::string out = "{";
    for (std::size_t k = 0; k < ms.size(); ++k) out += (k ? "," : "") + w.modules[ms[k]].name;
    return out + "}";
}

std::string subsets_line(const Workflow& w, const std::vector<AttrSet>& subsets) {
    std::string out;
    for (std::size_t k = 0; k < subsets.size(); ++k) out += (k ? " " : "") + w.format(subsets[k]);
    return out;
}

std::string attr_list(const Workflow& w, const std::vector<AttrIndex>& attrs) {
    return w.format(AttrSet::of(attrs));
}

void privacy_lines(std::ostream& os, const Workflow& w, const Relation& R, AttrSet H, int jobs) {
    const PrivacyReport rep = gamma_achieved(w, R, H, 0, jobs);
    for (const auto& m : rep.modules) {
        os << "  " << w.modules[m.module].name << " Out sizes:";
        for (const auto& [x, n] : m.out_sizes) os << " (" << format_row(w, w.modules[m.module].inputs, x) << ")->" << n;
        os << "\n";
    }
    os << "achieved gamma " << rep.gamma << "\n";
}

void hidden_report(std::ostream& os, const Workflow& w, const Relation& R, AttrSet H, int jobs) {
    os << "relation, hidden " << w.format(H) << " marked *\n" << format_relation(w, R, H);
    privacy_lines(os, w, R, H, jobs);
}

void classification_lines(std::ostream& os, const Workflow& w) {
    const Classification c = classify_single_predecessor(w);
    os << "single-predecessor: " << (c.is_single_predecessor ? "yes" : "no") << "\n";
    for (const auto& v : c.violations)
        os << "  " << to_string(v.kind) << " module=" << (v.module.empty() ? "-" : v.module)
           << " witness=" << (v.witness.empty() ? "-" : v.witness) << " owner=" << (v.owner.empty() ? "-" : v.owner)
           << "\n";
}

void plan_lines(std::ostream& os, const Workflow& w, const OptimizeResult& r) {
    os << "  route " << to_string(r.route) << ", hidden " << w.format(r.hidden) << ", cost " << r.cost << "\n";
    for (const auto& m : r.per_module)
        os << "  " << w.modules[m.module].name << " (gamma " << m.gamma << "): S=" << w.format(m.safe_subset) << " H=" << w.format(m.hidden)
           << " cost " << m.cost << " (" << m.method << ")\n";
}

void catalog_lines(std::ostream& os, const Workflow& w, const ModuleTable& m) {
    const IOTable t = io_table(m);
    os << "UD-safe subsets of " << m.name << ": " << subsets_line(w, enumerate_udsafe(t)) << "\n";
    os << "D-safe subsets of " << m.name << ": " << subsets_line(w, enumerate_dsafe(t)) << "\n";
}

void fig1(std::ostream& os, const Workflow& w) {
    const int i1 = w.module_index("m1");
    const ModuleTable& m1 = w.modules[i1];
    os << "module m1\n" << format_relation(w, m1.relation());
    os << "workflow relation\n" << format_relation(w, workflow_relation(w));
    const AttrSet h24 = w.attrs_by_name({"a2", "a4"});
    os << "worlds of m1 with hidden {a2,a4}: "
       << standalone_worlds(m1, h24, [](const Relation&) { return true; }) << "\n";
    for (const auto& names : std::vector<std::vector<std::string>>{{"a2", "a4"}, {"a1", "a2"}}) {
        const AttrSet H = w.attrs_by_name(names);
        const auto outs = standalone_out_all(m1, H);
        os << "standalone Out sizes with hidden " << w.format(H) << ":";
        for (std::size_t code = 0; code < outs.size(); ++code)
            os << " (" << format_row(w, m1.inputs, m1.input_at(code)) << ")->" << outs[code].size();
        os << "\n";
    }
    for (int gamma : {4, 5})
        os << "safe subsets of m1 at gamma " << gamma << " (outputs only): "
           << subsets_line(w, enumerate_safe_subsets(w, i1, gamma, true).subsets) << "\n";
    os << "safe subsets of m1 at gamma 4 containing a2 (all attributes): ";
    std::vector<AttrSet> with_a2;
    for (AttrSet s : enumerate_safe_subsets(w, i1, 4, false).subsets)
        if (s.contains(w.attr_index("a2"))) with_a2.push_back(s);
    os << subsets_line(w, with_a2) << "\n";
    os << "UD-safe subsets of m1: " << subsets_line(w, enumerate_udsafe(io_table(m1))) << "\n";
}

void fig3(std::ostream& os, const Workflow& w) {
    const ModuleTable& m = w.modules[0];
    os << "module " << m.name << "\n" << format_relation(w, m.relation());
    catalog_lines(os, w, m);
}

void wb_chain(std::ostream& os, const Workflow& w, int jobs) {
    const Relation R = workflow_relation(w);
    hidden_report(os, w, R, w.attrs_by_name({"a3", "a5"}), jobs);
    const AttrSet H = w.attrs_by_name({"a3", "a4", "a5"});
    hidden_report(os, w, R, H, jobs);

    const int i1 = w.module_index("m1");
    const Relation witness = construct_witness_world(w, R, i1, H & w.modules[i1].output_set(), Row{0, 0}, Row{1, 0}, H,
                                                     WitnessRoute::SinglePredecessor);
    os << "witness world for m1: (0 0) -> (1 0)\n" << format_relation(w, witness, H);
    os << "is a world: " << (is_workflow_world(w, R, H, witness) ? "yes" : "no") << "\n";
    os << "classification\n";
    classification_lines(os, w);
    os << "optimal plan at gamma 2\n";
    plan_lines(os, w, optimize_workflow(w, 2, Route::SinglePred, jobs));
    os << "optimal plan with m1 at gamma 2 and m3 at gamma 1\n";
    plan_lines(os, w, optimize_workflow(w, 2, Route::SinglePred, jobs, {{w.module_index("m3"), 1}}));
}

void wa_nopred(std::ostream& os, const Workflow& w, int jobs) {
    const Relation R = workflow_relation(w);
    hidden_report(os, w, R, w.attrs_by_name({"a2", "a3", "a4", "a5"}), jobs);
    os << "public closure of {a3}: " << module_list(w, public_closure(w, w.attrs_by_name({"a3"}))) << "\n";
    os << "downward closure of {a3}: " << module_list(w, downward_closure(w, w.attrs_by_name({"a3"}))) << "\n";
    os << "classification\n";
    classification_lines(os, w);
    const int i1 = w.module_index("m1");
    const int i4 = w.module_index("m4");
    const AssemblyPlan plan = assemble_general(
        w,
        {{i1, w.attrs_by_name({"a3"}),
          {{w.module_index("m3"), w.attrs_by_name({"a3", "a5"})}, {i4, w.attrs_by_name({"a5", "a6"})}}},
         {i4, w.attrs_by_name({"a6"}), {}}},
        2);
    os << "general plan: hidden " << w.format(plan.hidden) << "\n";
    privacy_lines(os, w, R, plan.hidden, jobs);
}

void app_table(std::ostream& os, const Workflow& w, const std::vector<std::string>& hidden, int jobs) {
    const Relation R = workflow_relation(w);
    hidden_report(os, w, R, w.attrs_by_name(hidden), jobs);
    os << "classification\n";
    classification_lines(os, w);
}

void fig2(std::ostream& os, const Workflow& w, int jobs) {
    for (const auto& names : std::vector<std::vector<std::string>>{{"a2"}, {"a3"}, {"a2", "a3"}, {"a4"}, {"a5"}}) {
        const AttrSet h = w.attrs_by_name(names);
        const auto closure = public_closure(w, h);
        os << "public closure of " << w.format(h) << ": " << module_list(w, closure) << "\n";
    }
    const auto closure = public_closure(w, w.attrs_by_name({"a2"}));
    const CompositeModule comp = compose_public(w, closure);
    os << "composite " << module_list(w, comp.members) << ": inputs " << attr_list(w, comp.inputs) << " outputs "
       << attr_list(w, comp.outputs) << "\n";
    os << "downward closure of {a2}: " << module_list(w, downward_closure(w, w.attrs_by_name({"a2"}))) << "\n";
    os << "classification\n";
    classification_lines(os, w);
    for (Route r : {Route::SinglePred, Route::General}) {
        os << "optimal plan at gamma 2 via " << to_string(r) << "\n";
        plan_lines(os, w, optimize_workflow(w, 2, r, jobs));
    }
}

}  // namespace

std::string reproduce_fixture(const std::string& data_dir, const std::string& id, int jobs) {
    const Workflow w = load_fixture(data_dir, id);
    std::ostringstream os;
    os << "# " << id << "\n";
    if (id == "fig1-m1") fig1(os, w);
    else if (id == "fig3-r1" || id == "fig3-r2") fig3(os, w);
    else if (id == "wb-chain") wb_chain(os, w, jobs);
    else if (id == "wa-nopred") wa_nopred(os, w, jobs);
    else if (id == "app-multipred") app_table(os, w, {"a2", "a3", "a4", "a5"}, jobs);
    else if (id == "app-datashare") app_table(os, w, {"a3", "a4", "a5"}, jobs);
    else fig2(os, w, jobs);
    return os.str();
}

}  // namespace provlock
