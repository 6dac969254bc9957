#include "provlock/json_io.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace provlock {

namespace {

Value to_value(const Json& v, const std::string& where) {
    if (v.is_number_integer()) return Value(v.get<long long>());
    if (v.is_number()) return Value(v.get<double>());
    if (v.is_string()) return Value(v.get<std::string>());
    if (v.is_boolean()) return Value(v.get<bool>());
    throw Error("ParseError", where + ": domain values must be numbers, strings or booleans");
}

Json from_value(const Value& v) { return Json::parse(v.dump()); }

std::vector<std::string> string_list(const Json& v, const std::string& where) {
    if (!v.is_array()) throw Error("ParseError", where + " must be an array of names");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) throw Error("ParseError", where + " must be an array of names");
        out.push_back(e.get<std::string>());
    }
    return out;
}

std::vector<Value> value_list(const Json& v, const std::string& where) {
    if (!v.is_array()) throw Error("ParseError", where + " must be an array");
    std::vector<Value> out;
    for (const auto& e : v) out.push_back(to_value(e, where));
    return out;
}

std::string value_text(const Value& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

WorkflowSpec parse_workflow_spec(const Json& doc) {
    if (!doc.is_object()) throw Error("ParseError", "top level must be an object");
    if (!doc.contains("attributes") || !doc["attributes"].is_object())
        throw Error("ParseError", "\"attributes\" must be an object");
    if (!doc.contains("modules") || !doc["modules"].is_array())
        throw Error("ParseError", "\"modules\" must be an array");

    WorkflowSpec spec;
    for (const auto& [name, a] : doc["attributes"].items()) {
        if (!a.is_object()) throw Error("ParseError", "attribute " + name + " must be an object");
        if (!a.contains("domain")) continue;
        AttributeSpec s;
        s.name = name;
        s.domain = value_list(a["domain"], "domain of " + name);
        if (a.contains("cost")) {
            if (!a["cost"].is_number()) throw Error("ParseError", "cost of " + name + " must be a number");
            s.cost = a["cost"].get<double>();
        }
        spec.attributes.push_back(std::move(s));
    }
    for (const auto& m : doc["modules"]) {
        if (!m.is_object() || !m.contains("name") || !m["name"].is_string())
            throw Error("ParseError", "every module needs a string \"name\"");
        ModuleSpec s;
        s.name = m["name"].get<std::string>();
        const std::string where = "module " + s.name;
        const std::string vis = m.value("visibility", "");
        if (vis == "public") s.visibility = Visibility::Public;
        else if (vis == "private") s.visibility = Visibility::Private;
        else throw Error("ParseError", where + ": visibility must be \"public\" or \"private\"");
        s.inputs = string_list(m.value("inputs", Json::array()), where + " inputs");
        s.outputs = string_list(m.value("outputs", Json::array()), where + " outputs");
        const Json table = m.value("table", Json::array());
        if (!table.is_array()) throw Error("ParseError", where + ": table must be an array");
        for (const auto& row : table) {
            if (!row.is_array() || row.size() != 2)
                throw Error("ParseError", where + ": each table row is [[inputs...],[outputs...]]");
            s.table.emplace_back(value_list(row[0], where + " table"), value_list(row[1], where + " table"));
        }
        spec.modules.push_back(std::move(s));
    }
    return spec;
}

WorkflowSpec load_workflow_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("ParseError", "cannot open " + path);
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("ParseError", path + ": " + e.what());
    }
    return parse_workflow_spec(doc);
}

Json spec_to_json(const WorkflowSpec& spec) {
    Json doc;
    doc["attributes"] = Json::object();
    for (const auto& a : spec.attributes) {
        Json dom = Json::array();
        for (const auto& v : a.domain) dom.push_back(from_value(v));
        doc["attributes"][a.name] = {{"domain", dom}, {"cost", a.cost}};
    }
    doc["modules"] = Json::array();
    for (const auto& m : spec.modules) {
        Json table = Json::array();
        for (const auto& [x, y] : m.table) {
            Json xs = Json::array(), ys = Json::array();
            for (const auto& v : x) xs.push_back(from_value(v));
            for (const auto& v : y) ys.push_back(from_value(v));
            table.push_back(Json::array({xs, ys}));
        }
        doc["modules"].push_back({{"name", m.name},
                                  {"visibility", m.visibility == Visibility::Public ? "public" : "private"},
                                  {"inputs", m.inputs},
                                  {"outputs", m.outputs},
                                  {"table", table}});
    }
    return doc;
}

Json names_json(const Workflow& w, AttrSet s) { return Json(w.names(s)); }

namespace {

Json subset_list(const Workflow& w, const std::vector<AttrSet>& subsets) {
    Json out = Json::array();
    for (AttrSet s : subsets) out.push_back(names_json(w, s));
    return out;
}

Json row_json(const Workflow& w, const std::vector<AttrIndex>& attrs, const Row& r) {
    Json out = Json::array();
    for (std::size_t k = 0; k < attrs.size(); ++k) out.push_back(from_value(w.attributes[attrs[k]].domain[r[k]]));
    return out;
}

Json closure_names(const Workflow& w, const std::vector<int>& modules) {
    Json out = Json::array();
    for (int j : modules) out.push_back(w.modules[j].name);
    return out;
}

Json entries_json(const Workflow& w, const std::vector<PlanEntry>& entries) {
    Json out = Json::array();
    for (const auto& e : entries) {
        Json picks = Json::object();
        for (int j : e.closure_modules) {
            auto it = e.closure.find(j);
            if (it != e.closure.end()) picks[w.modules[j].name] = names_json(w, it->second);
        }
        out.push_back({{"module", w.modules[e.module].name},
                       {"h", names_json(w, e.h)},
                       {"closure", closure_names(w, e.closure_modules)},
                       {"picks", picks},
                       {"hidden", names_json(w, e.hidden)}});
    }
    return out;
}

}  // namespace

Json to_json(const Workflow& w, const SafeCatalog& c) {
    return {{"module", w.modules[c.module].name},
            {"gamma", c.gamma},
            {"outputs_only", c.outputs_only},
            {"subsets", subset_list(w, c.subsets)}};
}

Json to_json(const Workflow& w, const UDSafeCatalog& c) {
    return {{"module", w.modules[c.module].name}, {"subsets", subset_list(w, c.subsets)}};
}

Json to_json(const Workflow& w, const PrivacyReport& r) {
    Json mods = Json::array();
    for (const auto& m : r.modules) {
        Json sizes = Json::array();
        for (const auto& [x, n] : m.out_sizes)
            sizes.push_back({{"input", row_json(w, w.modules[m.module].inputs, x)}, {"out", n}});
        mods.push_back({{"module", w.modules[m.module].name}, {"gamma", m.gamma}, {"out_sizes", sizes}});
    }
    Json doc = {{"gamma", r.gamma}, {"modules", mods}};
    if (r.limit > 0) doc["limit"] = r.limit;
    return doc;
}

Json to_json(const Workflow& w, const AssemblyPlan& p) {
    return {{"route", p.general ? "general" : "single-pred"},
            {"gamma", p.gamma},
            {"hidden", names_json(w, p.hidden)},
            {"cost", cost_of(w, p.hidden)},
            {"entries", entries_json(w, p.entries)}};
}

Json to_json(const Workflow& w, const OptimizeResult& r) {
    Json per = Json::array();
    for (const auto& m : r.per_module)
        per.push_back({{"module", w.modules[m.module].name},
                       {"gamma", m.gamma},
                       {"safe_subset", names_json(w, m.safe_subset)},
                       {"hidden", names_json(w, m.hidden)},
                       {"cost", m.cost},
                       {"method", m.method}});
    return {{"route", to_string(r.route)},
            {"hidden", names_json(w, r.hidden)},
            {"cost", r.cost},
            {"per_module", per},
            {"plan", to_json(w, r.plan)}};
}

Json to_json(const Workflow& w, const Classification& c) {
    (void)w;
    Json v = Json::array();
    for (const auto& i : c.violations)
        v.push_back({{"kind", to_string(i.kind)}, {"module", i.module}, {"witness", i.witness}, {"owner", i.owner}});
    return {{"single_predecessor", c.is_single_predecessor}, {"violations", v}};
}

Json dp_table_json(const Workflow& w, const std::vector<DPCell>& cells) {
    Json out = Json::array();
    for (const auto& c : cells) {
        Json cost = c.cost == std::numeric_limits<double>::infinity() ? Json(nullptr) : Json(c.cost);
        out.push_back({{"module", w.modules[c.module].name}, {"subset", names_json(w, c.subset)}, {"cost", cost}});
    }
    return out;
}

std::string format_row(const Workflow& w, const std::vector<AttrIndex>& attrs, const Row& r) {
    std::string out;
    for (std::size_t k = 0; k < attrs.size(); ++k) {
        if (k) out += ' ';
        out += value_text(w.attributes[attrs[k]].domain[r[k]]);
    }
    return out;
}

std::string format_relation(const Workflow& w, const Relation& R, AttrSet H) {
    std::ostringstream os;
    for (std::size_t k = 0; k < R.schema.size(); ++k) {
        if (k) os << ' ';
        os << w.attributes[R.schema[k]].name;
        if (H.contains(R.schema[k])) os << '*';
    }
    os << '\n';
    for (const Row& r : R.rows) os << format_row(w, R.schema, r) << '\n';
    return os.str();
}

}  // namespace provlock
