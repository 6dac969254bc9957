#include "provlock/model.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace provlock {

const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::CycleDetected: return "CycleDetected";
        case ViolationKind::DuplicateOutputAttr: return "DuplicateOutputAttr";
        case ViolationKind::PartialTable: return "PartialTable";
        case ViolationKind::UnknownAttribute: return "UnknownAttribute";
    }
    return "?";
}

static std::string join_violations(const std::vector<Violation>& v) {
    std::string s;
    for (const auto& x : v) {
        if (!s.empty()) s += "; ";
        s += std::string(to_string(x.kind)) + " (" + x.detail + ")";
    }
    return s;
}

ModelError::ModelError(std::vector<Violation> v)
    : Error(v.empty() ? "ModelError" : to_string(v.front().kind), join_violations(v)),
      violations_(std::move(v)) {}

// ---------------------------------------------------------------- Relation

int Relation::column(AttrIndex a) const {
    auto it = std::find(schema.begin(), schema.end(), a);
    return it == schema.end() ? -1 : static_cast<int>(it - schema.begin());
}

bool Relation::insert(Row r) {
    if (std::find(rows.begin(), rows.end(), r) != rows.end()) return false;
    rows.push_back(std::move(r));
    return true;
}

Row Relation::pick(const Row& row, const std::vector<AttrIndex>& attrs) const {
    Row out;
    out.reserve(attrs.size());
    for (AttrIndex a : attrs) out.push_back(row[column(a)]);
    return out;
}

Relation Relation::project(const std::vector<AttrIndex>& attrs) const {
    Relation out;
    out.schema = attrs;
    for (const Row& r : rows) out.insert(pick(r, attrs));
    return out;
}

bool Relation::satisfies_fd(const std::vector<AttrIndex>& lhs, const std::vector<AttrIndex>& rhs) const {
    std::map<Row, Row> seen;
    for (const Row& r : rows) {
        auto [it, fresh] = seen.emplace(pick(r, lhs), pick(r, rhs));
        if (!fresh && it->second != pick(r, rhs)) return false;
    }
    return true;
}

std::vector<Row> Relation::sorted_rows() const {
    auto out = rows;
    std::sort(out.begin(), out.end());
    return out;
}

bool Relation::same_set(const Relation& o) const {
    return schema == o.schema && sorted_rows() == o.sorted_rows();
}

// ---------------------------------------------------------------- ModuleTable

std::vector<AttrIndex> ModuleTable::attrs() const {
    auto out = inputs;
    out.insert(out.end(), outputs.begin(), outputs.end());
    return out;
}

Row ModuleTable::input_at(std::size_t code) const {
    Row x(inputs.size());
    for (std::size_t i = inputs.size(); i-- > 0;) {
        x[i] = static_cast<int>(code % input_radix[i]);
        code /= input_radix[i];
    }
    return x;
}

std::size_t ModuleTable::encode_input(const Row& x) const {
    std::size_t code = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) code = code * input_radix[i] + x[i];
    return code;
}

Relation ModuleTable::relation() const {
    Relation r;
    r.schema = attrs();
    for (std::size_t c = 0; c < table.size(); ++c) {
        Row row = input_at(c);
        row.insert(row.end(), table[c].begin(), table[c].end());
        r.rows.push_back(std::move(row));
    }
    return r;
}

// ---------------------------------------------------------------- Workflow

int Workflow::attr_index(const std::string& name) const {
    for (std::size_t i = 0; i < attributes.size(); ++i)
        if (attributes[i].name == name) return static_cast<int>(i);
    return -1;
}

int Workflow::module_index(const std::string& name) const {
    for (std::size_t i = 0; i < modules.size(); ++i)
        if (modules[i].name == name) return static_cast<int>(i);
    return -1;
}

AttrSet Workflow::all_attrs() const {
    AttrSet s;
    for (std::size_t i = 0; i < attributes.size(); ++i) s.insert(static_cast<int>(i));
    return s;
}

std::vector<AttrIndex> Workflow::all_attr_list() const { return all_attrs().members(); }

std::vector<int> Workflow::private_modules() const {
    std::vector<int> out;
    for (int m : topo_order)
        if (!modules[m].is_public()) out.push_back(m);
    return out;
}

std::vector<int> Workflow::public_modules() const {
    std::vector<int> out;
    for (int m : topo_order)
        if (modules[m].is_public()) out.push_back(m);
    return out;
}

AttrSet Workflow::attrs_by_name(const std::vector<std::string>& names) const {
    AttrSet s;
    for (const auto& n : names) {
        int a = attr_index(n);
        if (a < 0) throw ModelError({{ViolationKind::UnknownAttribute, n}});
        s.insert(a);
    }
    return s;
}

std::vector<std::string> Workflow::names(AttrSet s) const {
    std::vector<std::string> out;
    for (AttrIndex a : s.members()) out.push_back(attributes[a].name);
    return out;
}

std::string Workflow::format(AttrSet s) const {
    std::string out = "{";
    bool first = true;
    for (const auto& n : names(s)) {
        if (!first) out += ",";
        out += n;
        first = false;
    }
    return out + "}";
}

// ---------------------------------------------------------------- WorkflowSpec builders

WorkflowSpec& WorkflowSpec::attr(const std::string& name, std::vector<Value> domain, double cost) {
    attributes.push_back({name, std::move(domain), cost});
    return *this;
}

WorkflowSpec& WorkflowSpec::bool_attr(const std::string& name, double cost) {
    return attr(name, {0, 1}, cost);
}

WorkflowSpec& WorkflowSpec::module(const std::string& name, Visibility vis, std::vector<std::string> inputs,
                                   std::vector<std::string> outputs,
                                   const std::function<Row(const Row&)>& fn) {
    auto domain_of = [&](const std::string& a) -> const std::vector<Value>& {
        for (const auto& s : attributes)
            if (s.name == a) return s.domain;
        throw ModelError({{ViolationKind::UnknownAttribute, a}});
    };
    std::vector<const std::vector<Value>*> in_dom, out_dom;
    for (const auto& a : inputs) in_dom.push_back(&domain_of(a));
    for (const auto& a : outputs) out_dom.push_back(&domain_of(a));

    ModuleSpec m{name, vis, inputs, outputs, {}};
    std::size_t total = 1;
    for (const auto* d : in_dom) total *= d->size();
    for (std::size_t code = 0; code < total; ++code) {
        Row x(inputs.size());
        std::size_t c = code;
        for (std::size_t i = x.size(); i-- > 0;) {
            x[i] = static_cast<int>(c % in_dom[i]->size());
            c /= in_dom[i]->size();
        }
        Row y = fn(x);
        std::vector<Value> xv, yv;
        for (std::size_t i = 0; i < x.size(); ++i) xv.push_back((*in_dom[i])[x[i]]);
        for (std::size_t i = 0; i < y.size(); ++i) yv.push_back((*out_dom[i])[y[i]]);
        m.table.emplace_back(std::move(xv), std::move(yv));
    }
    modules.push_back(std::move(m));
    return *this;
}

// ---------------------------------------------------------------- validation

static int value_index(const std::vector<Value>& domain, const Value& v) {
    for (std::size_t i = 0; i < domain.size(); ++i)
        if (domain[i] == v) return static_cast<int>(i);
    return -1;
}

Workflow build_workflow(const WorkflowSpec& spec) {
    std::vector<Violation> errs;
    Workflow w;

    std::set<std::string> seen_names;
    for (const auto& a : spec.attributes) {
        if (a.name.empty() || !seen_names.insert(a.name).second) {
            errs.push_back({ViolationKind::UnknownAttribute, "attribute name '" + a.name + "' is empty or repeated"});
            continue;
        }
        if (a.domain.empty()) {
            errs.push_back({ViolationKind::UnknownAttribute, "attribute '" + a.name + "' has an empty domain"});
            continue;
        }
        std::set<std::string> vals;
        for (const auto& v : a.domain) vals.insert(v.dump());
        if (vals.size() != a.domain.size())
            errs.push_back({ViolationKind::UnknownAttribute, "attribute '" + a.name + "' repeats a domain value"});
        if (a.cost < 0)
            errs.push_back({ViolationKind::UnknownAttribute, "attribute '" + a.name + "' has negative cost"});
        w.attributes.push_back({a.name, a.domain, a.cost});
    }
    if (w.attributes.size() > kMaxAttributes)
        errs.push_back({ViolationKind::UnknownAttribute,
                        "more than " + std::to_string(kMaxAttributes) + " attributes"});
    if (!errs.empty()) throw ModelError(errs);

    const int n_attr = static_cast<int>(w.attributes.size());
    w.producer.assign(n_attr, -1);
    w.consumers.assign(n_attr, {});
    std::set<std::string> module_names;

    for (const auto& ms : spec.modules) {
        ModuleTable m;
        m.name = ms.name;
        m.visibility = ms.visibility;
        const int mi = static_cast<int>(w.modules.size());
        if (!module_names.insert(ms.name).second)
            errs.push_back({ViolationKind::DuplicateOutputAttr, "module name '" + ms.name + "' repeated"});

        bool ok = true;
        auto resolve = [&](const std::vector<std::string>& names, std::vector<AttrIndex>& out) {
            for (const auto& n : names) {
                int a = w.attr_index(n);
                if (a < 0) {
                    errs.push_back({ViolationKind::UnknownAttribute, "module '" + ms.name + "' uses undeclared '" + n + "'"});
                    ok = false;
                } else if (std::find(out.begin(), out.end(), a) != out.end()) {
                    errs.push_back({ViolationKind::DuplicateOutputAttr, "module '" + ms.name + "' lists '" + n + "' twice"});
                    ok = false;
                } else {
                    out.push_back(a);
                }
            }
        };
        resolve(ms.inputs, m.inputs);
        resolve(ms.outputs, m.outputs);
        if (!ok) { w.modules.push_back(std::move(m)); continue; }

        if (m.outputs.empty()) {
            errs.push_back({ViolationKind::PartialTable, "module '" + ms.name + "' has no outputs"});
        }
        for (AttrIndex a : m.inputs)
            if (std::find(m.outputs.begin(), m.outputs.end(), a) != m.outputs.end())
                errs.push_back({ViolationKind::DuplicateOutputAttr,
                                "module '" + ms.name + "' has '" + w.attributes[a].name + "' as input and output"});
        for (AttrIndex a : m.outputs) {
            if (w.producer[a] >= 0)
                errs.push_back({ViolationKind::DuplicateOutputAttr,
                                "'" + w.attributes[a].name + "' produced by '" + w.modules[w.producer[a]].name +
                                    "' and '" + ms.name + "'"});
            else
                w.producer[a] = mi;
        }
        for (AttrIndex a : m.inputs) w.consumers[a].push_back(mi);
        for (AttrIndex a : m.inputs) m.input_radix.push_back(w.domain_size(a));
        for (AttrIndex a : m.outputs) m.output_radix.push_back(w.domain_size(a));

        std::size_t n_in = 1;
        for (int r : m.input_radix) n_in *= static_cast<std::size_t>(r);
        m.table.assign(n_in, Row{});
        std::vector<bool> filled(n_in, false);
        for (const auto& [xv, yv] : ms.table) {
            if (xv.size() != m.inputs.size() || yv.size() != m.outputs.size()) {
                errs.push_back({ViolationKind::PartialTable, "module '" + ms.name + "' has a row of the wrong arity"});
                ok = false;
                break;
            }
            Row x, y;
            for (std::size_t i = 0; i < xv.size(); ++i) x.push_back(value_index(w.attributes[m.inputs[i]].domain, xv[i]));
            for (std::size_t i = 0; i < yv.size(); ++i) y.push_back(value_index(w.attributes[m.outputs[i]].domain, yv[i]));
            if (std::count(x.begin(), x.end(), -1) || std::count(y.begin(), y.end(), -1)) {
                errs.push_back({ViolationKind::PartialTable, "module '" + ms.name + "' has a value outside its domain"});
                ok = false;
                break;
            }
            std::size_t code = m.encode_input(x);
            if (filled[code] && m.table[code] != y) {
                errs.push_back({ViolationKind::PartialTable, "module '" + ms.name + "' maps one input to two outputs"});
                ok = false;
                break;
            }
            filled[code] = true;
            m.table[code] = y;
        }
        if (ok && std::count(filled.begin(), filled.end(), false))
            errs.push_back({ViolationKind::PartialTable, "module '" + ms.name + "' does not cover every input tuple"});
        w.modules.push_back(std::move(m));
    }

    if (errs.empty()) {
        // Kahn's algorithm over the edge relation O_i ∩ I_j ≠ ∅, stable by declaration order.
        const int n = static_cast<int>(w.modules.size());
        std::vector<std::set<int>> succ(n);
        std::vector<int> indeg(n, 0);
        for (int j = 0; j < n; ++j)
            for (AttrIndex a : w.modules[j].inputs)
                if (int p = w.producer[a]; p >= 0 && succ[p].insert(j).second) ++indeg[j];
        std::priority_queue<int, std::vector<int>, std::greater<>> ready;
        for (int j = 0; j < n; ++j)
            if (indeg[j] == 0) ready.push(j);
        while (!ready.empty()) {
            int j = ready.top();
            ready.pop();
            w.topo_order.push_back(j);
            for (int k : succ[j])
                if (--indeg[k] == 0) ready.push(k);
        }
        if (static_cast<int>(w.topo_order.size()) != n) {
            std::string stuck;
            for (int j = 0; j < n; ++j)
                if (indeg[j] > 0) stuck += (stuck.empty() ? "" : ",") + w.modules[j].name;
            errs.push_back({ViolationKind::CycleDetected, "modules " + stuck});
        }
    }
    if (!errs.empty()) throw ModelError(errs);

    for (int a = 0; a < n_attr; ++a)
        if (w.producer[a] < 0) w.initial_inputs.push_back(a);
    return w;
}

WorkflowSpec to_spec(const Workflow& w) {
    WorkflowSpec s;
    for (const auto& a : w.attributes) s.attributes.push_back({a.name, a.domain, a.cost});
    for (const auto& m : w.modules) {
        ModuleSpec ms{m.name, m.visibility, {}, {}, {}};
        for (AttrIndex a : m.inputs) ms.inputs.push_back(w.attributes[a].name);
        for (AttrIndex a : m.outputs) ms.outputs.push_back(w.attributes[a].name);
        for (std::size_t c = 0; c < m.table.size(); ++c) {
            Row x = m.input_at(c);
            std::vector<Value> xv, yv;
            for (std::size_t i = 0; i < x.size(); ++i) xv.push_back(w.attributes[m.inputs[i]].domain[x[i]]);
            for (std::size_t i = 0; i < m.outputs.size(); ++i)
                yv.push_back(w.attributes[m.outputs[i]].domain[m.table[c][i]]);
            ms.table.emplace_back(std::move(xv), std::move(yv));
        }
        s.modules.push_back(std::move(ms));
    }
    return s;
}

std::vector<Row> domain_product(const Workflow& w, const std::vector<AttrIndex>& attrs) {
    std::size_t total = 1;
    for (AttrIndex a : attrs) total *= static_cast<std::size_t>(w.domain_size(a));
    std::vector<Row> out;
    out.reserve(total);
    for (std::size_t code = 0; code < total; ++code) {
        Row x(attrs.size());
        std::size_t c = code;
        for (std::size_t i = attrs.size(); i-- > 0;) {
            x[i] = static_cast<int>(c % w.domain_size(attrs[i]));
            c /= w.domain_size(attrs[i]);
        }
        out.push_back(std::move(x));
    }
    return out;
}

Relation evaluate(const Workflow& w, const std::vector<Row>& initial_rows, const ModuleFn& fn) {
    Relation r;
    r.schema = w.all_attr_list();
    for (const Row& init : initial_rows) {
        Row t(w.attributes.size(), 0);
        for (std::size_t i = 0; i < w.initial_inputs.size(); ++i) t[w.initial_inputs[i]] = init[i];
        for (int mi : w.topo_order) {
            const auto& m = w.modules[mi];
            Row x;
            for (AttrIndex a : m.inputs) x.push_back(t[a]);
            Row y = fn(mi, x);
            for (std::size_t k = 0; k < m.outputs.size(); ++k) t[m.outputs[k]] = y[k];
        }
        r.insert(std::move(t));
    }
    return r;
}

Relation workflow_relation(const Workflow& w, const std::optional<std::vector<Row>>& inputs) {
    const auto rows = inputs ? *inputs : domain_product(w, w.initial_inputs);
    return evaluate(w, rows, [&](int mi, const Row& x) { return w.modules[mi].apply(x); });
}

double cost_of(const Workflow& w, AttrSet h) {
    double c = 0;
    for (AttrIndex a : h.members()) c += w.attributes[a].cost;
    return c;
}

}  // namespace provlock
