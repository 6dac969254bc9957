// provlock: command-line front end over the provlock library.
//
// Exit codes: 0 ok, 1 usage or parse error, 2 model error, 3 privacy target not met,
// 4 no feasible plan.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "provlock/closures.hpp"
#include "provlock/json_io.hpp"
#include "provlock/optimizer.hpp"
#include "provlock/public_safety.hpp"
#include "provlock/reproduce.hpp"
#include "provlock/standalone.hpp"
#include "provlock/workflow_privacy.hpp"

#ifndef PROVLOCK_DATA_DIR
#define PROVLOCK_DATA_DIR "data"
#endif

using namespace provlock;

namespace {

enum Exit { kOk = 0, kUsage = 1, kModel = 2, kNotMet = 3, kInfeasible = 4 };

std::string data_dir_default() {
    if (const char* env = std::getenv("PROVLOCK_DATA")) return env;
    return PROVLOCK_DATA_DIR;
}

int jobs_default() {
    if (const char* env = std::getenv("PROVLOCK_JOBS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::exception&) {
        }
    }
    return 1;
}

// A spec argument is a path, or a bundled fixture id when no such file exists.
Workflow load(const std::string& spec, const std::string& data_dir) {
    if (!std::filesystem::exists(spec) && is_fixture_id(spec)) return load_fixture(data_dir, spec);
    return build_workflow(load_workflow_spec(spec));
}

int module_of(const Workflow& w, const std::string& name) {
    const int i = w.module_index(name);
    if (i < 0) throw Error("UnknownModule", name);
    return i;
}

AttrSet parse_hide(const Workflow& w, const std::string& csv) {
    AttrSet H;
    std::stringstream ss(csv);
    std::string name;
    while (std::getline(ss, name, ',')) {
        if (name.empty()) continue;
        const int a = w.attr_index(name);
        if (a < 0) throw Error("UnknownAttribute", name);
        H.insert(a);
    }
    return H;
}

// "m3=1" entries: per-module targets overriding --gamma.
GammaTargets parse_targets(const Workflow& w, const std::vector<std::string>& specs) {
    GammaTargets out;
    for (const auto& t : specs) {
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw Error("ParseError", "target must look like module=gamma: " + t);
        int g = 0;
        try {
            g = std::stoi(t.substr(eq + 1));
        } catch (const std::exception&) {
            throw Error("ParseError", "bad gamma in " + t);
        }
        if (g < 1) throw Error("ParseError", "gamma must be positive in " + t);
        out[module_of(w, t.substr(0, eq))] = g;
    }
    return out;
}

Route parse_route(const std::string& s) {
    if (s == "single-pred") return Route::SinglePred;
    if (s == "general") return Route::General;
    return Route::Both;
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

int exit_code_for(const Error& e) {
    const std::string& c = e.code();
    if (c == "ParseError" || c == "UnknownFixture") return kUsage;
    if (c == "NoFeasiblePlan" || c == "ConditionViolated") return kInfeasible;
    return kModel;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Module privacy analysis for provenance workflows"};
    app.require_subcommand(1);
    std::string data_dir = data_dir_default();
    int jobs = jobs_default();
    app.add_option("--data-dir", data_dir, "Directory holding fixtures/ and expected/");
    app.add_option("--jobs,-j", jobs, "Worker threads (default from PROVLOCK_JOBS)")->check(CLI::PositiveNumber);

    std::string spec, module, hide, route_name = "both", fixture;
    int gamma = 1, limit = 0;
    bool mixed = false, outputs_only = false, dsafe = false, check = false, debug_dp = false, downward = false;
    bool write_expected = false;
    std::vector<std::string> target_specs;

    auto* validate = app.add_subcommand("validate", "Check a workflow description");
    validate->add_option("spec", spec, "Workflow JSON or fixture id")->required();

    auto* safe = app.add_subcommand("safe", "List standalone-safe hidden subsets of a private module");
    safe->add_option("spec", spec)->required();
    safe->add_option("--module", module)->required();
    safe->add_option("--gamma", gamma)->required()->check(CLI::PositiveNumber);
    safe->add_flag("--outputs-only", outputs_only, "Only subsets of the outputs (the default)");
    safe->add_flag("--mixed", mixed, "Also consider input attributes");

    auto* udsafe = app.add_subcommand("udsafe", "List UD-safe (or D-safe) subsets of a module");
    udsafe->add_option("spec", spec)->required();
    udsafe->add_option("--module", module)->required();
    udsafe->add_flag("--dsafe", dsafe, "List D-safe subsets instead");

    auto* verify = app.add_subcommand("verify", "Compute the privacy achieved by a hidden set");
    verify->add_option("spec", spec)->required();
    verify->add_option("--hide", hide, "Comma-separated attribute names")->required();
    verify->add_option("--gamma", gamma, "Target")->required()->check(CLI::PositiveNumber);
    verify->add_option("--target", target_specs, "Per-module target, e.g. m3=1 (repeatable)");
    verify->add_option("--limit", limit, "Stop counting each Out set at this size (0: exact)");

    auto* optimize = app.add_subcommand("optimize", "Find a minimum-cost hidden set");
    optimize->add_option("spec", spec)->required();
    optimize->add_option("--gamma", gamma)->required()->check(CLI::PositiveNumber);
    optimize->add_option("--route", route_name)->check(CLI::IsMember({"single-pred", "general", "both"}));
    optimize->add_option("--target", target_specs, "Per-module target, e.g. m3=1 (repeatable)");
    optimize->add_flag("--check", check, "Confirm the plan with the possible-worlds oracle");
    optimize->add_flag("--debug-dp", debug_dp, "Include the DP tables");

    auto* closures = app.add_subcommand("closures", "Closure of a hidden output set");
    closures->add_option("spec", spec)->required();
    closures->add_option("--hide", hide)->required();
    closures->add_flag("--downward", downward, "Downward closure instead of public closure");

    auto* classify = app.add_subcommand("classify", "Single-predecessor classification");
    classify->add_option("spec", spec)->required();

    auto* reproduce = app.add_subcommand("reproduce", "Regenerate a fixture report and compare it");
    reproduce->add_option("fixture", fixture)->required();
    reproduce->add_flag("--write-expected", write_expected, "Overwrite the bundled expected output");

    CLI11_PARSE(app, argc, argv);
    (void)outputs_only;

    try {
        if (*validate) {
            const Workflow w = load(spec, data_dir);
            std::cout << "ok: " << w.attribute_count() << " attributes, " << w.modules.size() << " modules\n";
            return kOk;
        }
        if (*safe) {
            const Workflow w = load(spec, data_dir);
            print(to_json(w, enumerate_safe_subsets(w, module_of(w, module), gamma, !mixed, jobs)));
            return kOk;
        }
        if (*udsafe) {
            const Workflow w = load(spec, data_dir);
            const int m = module_of(w, module);
            if (dsafe) {
                Json doc = {{"module", module}, {"subsets", Json::array()}};
                for (AttrSet s : enumerate_dsafe(io_table(w.modules[m]), jobs)) doc["subsets"].push_back(names_json(w, s));
                print(doc);
            } else {
                print(to_json(w, enumerate_udsafe(w, m, jobs)));
            }
            return kOk;
        }
        if (*verify) {
            const Workflow w = load(spec, data_dir);
            const AttrSet H = parse_hide(w, hide);
            const GammaTargets targets = parse_targets(w, target_specs);
            const PrivacyReport rep = gamma_achieved(w, workflow_relation(w), H, limit, jobs);
            bool met = true;
            for (const auto& m : rep.modules) {
                const auto it = targets.find(m.module);
                met = met && m.gamma >= (it == targets.end() ? gamma : it->second);
            }
            Json doc = to_json(w, rep);
            doc["target"] = gamma;
            doc["hidden"] = names_json(w, H);
            doc["met"] = met;
            print(doc);
            return met ? kOk : kNotMet;
        }
        if (*optimize) {
            const Workflow w = load(spec, data_dir);
            const GammaTargets targets = parse_targets(w, target_specs);
            const OptimizeResult r = optimize_workflow(w, gamma, parse_route(route_name), jobs, targets);
            Json doc = to_json(w, r);
            if (debug_dp) {
                Json tables = Json::array();
                for (const auto& m : r.per_module) {
                    if (m.method != "chain" && m.method != "tree") continue;
                    const auto closure = public_closure(w, m.safe_subset);
                    Catalogs cats;
                    for (int j : closure) cats[j] = enumerate_udsafe(io_table(w.modules[j]));
                    std::vector<DPCell> cells;
                    if (m.method == "chain") optimize_chain_closure(w, m.module, m.safe_subset, closure, cats, &cells);
                    else optimize_tree_closure(w, m.module, m.safe_subset, closure, cats, &cells);
                    tables.push_back({{"module", w.modules[m.module].name}, {"cells", dp_table_json(w, cells)}});
                }
                doc["dp_tables"] = tables;
            }
            int code = kOk;
            if (check) {
                int highest = gamma;
                for (const auto& [_, g] : targets) highest = std::max(highest, g);
                const PrivacyReport rep = gamma_achieved(w, workflow_relation(w), r.hidden, highest, jobs);
                bool met = true;
                for (const auto& m : r.per_module) {
                    const auto it = std::find_if(rep.modules.begin(), rep.modules.end(),
                                                 [&](const ModulePrivacy& p) { return p.module == m.module; });
                    met = met && it != rep.modules.end() && it->gamma >= m.gamma;
                }
                doc["check"] = {{"report", to_json(w, rep)}, {"met", met}};
                if (!met) code = kNotMet;
            }
            print(doc);
            return code;
        }
        if (*closures) {
            const Workflow w = load(spec, data_dir);
            const AttrSet h = parse_hide(w, hide);
            const auto ms = downward ? downward_closure(w, h) : public_closure(w, h);
            Json doc = {{"hidden", names_json(w, h)},
                        {"kind", downward ? "downward" : "public"},
                        {"owner", w.modules[owner_of(w, h)].name},
                        {"modules", Json::array()}};
            for (int j : ms) doc["modules"].push_back(w.modules[j].name);
            print(doc);
            return kOk;
        }
        if (*classify) {
            const Workflow w = load(spec, data_dir);
            print(to_json(w, classify_single_predecessor(w)));
            return kOk;
        }
        if (*reproduce) {
            const std::string text = reproduce_fixture(data_dir, fixture, jobs);
            std::cout << text;
            const std::string path = expected_path(data_dir, fixture);
            if (write_expected) {
                std::ofstream(path) << text;
                return kOk;
            }
            std::ifstream in(path);
            if (!in) {
                std::cerr << "missing expected output " << path << "\n";
                return kUsage;
            }
            std::stringstream expected;
            expected << in.rdbuf();
            if (expected.str() != text) {
                std::cerr << "output differs from " << path << "\n";
                return kNotMet;
            }
            return kOk;
        }
    } catch (const ModelError& e) {
        std::cerr << "model error\n";
        for (const auto& v : e.violations()) std::cerr << "  " << to_string(v.kind) << ": " << v.detail << "\n";
        return kModel;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return exit_code_for(e);
    }
    return kUsage;
}
