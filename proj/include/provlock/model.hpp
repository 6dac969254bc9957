// Finite-domain modules, workflows and relations.
#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "provlock/attr_set.hpp"

namespace provlock {

using Value = nlohmann::json;  // a domain value as written in the workflow file (number or string)
using Row = std::vector<int>;  // domain-value indices aligned with some schema

// Base for every error the library reports; `code` is the stable error name.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

enum class ViolationKind { CycleDetected, DuplicateOutputAttr, PartialTable, UnknownAttribute };

const char* to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    std::string detail;
};

class ModelError : public Error {
public:
    explicit ModelError(std::vector<Violation> v);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

enum class Visibility { Public, Private };

struct Attribute {
    std::string name;
    std::vector<Value> domain;
    double cost = 1.0;
};

// A set of rows over an ordered schema.  Rows keep insertion order; duplicates are
// rejected on insert so the relation always has set semantics.
struct Relation {
    std::vector<AttrIndex> schema;
    std::vector<Row> rows;

    int column(AttrIndex a) const;  // -1 if absent
    bool insert(Row r);             // false if already present
    Relation project(const std::vector<AttrIndex>& attrs) const;
    bool satisfies_fd(const std::vector<AttrIndex>& lhs, const std::vector<AttrIndex>& rhs) const;
    Row pick(const Row& row, const std::vector<AttrIndex>& attrs) const;
    std::vector<Row> sorted_rows() const;
    // Same schema and same row set, ignoring row order.
    bool same_set(const Relation& o) const;
};

struct ModuleTable {
    std::string name;
    Visibility visibility = Visibility::Private;
    std::vector<AttrIndex> inputs;
    std::vector<AttrIndex> outputs;
    std::vector<int> input_radix;   // domain size per input
    std::vector<int> output_radix;  // domain size per output
    std::vector<Row> table;         // output row per input code (mixed radix, first input most significant)

    bool is_public() const { return visibility == Visibility::Public; }
    AttrSet input_set() const { return AttrSet::of(inputs); }
    AttrSet output_set() const { return AttrSet::of(outputs); }
    AttrSet attr_set() const { return input_set() | output_set(); }
    std::vector<AttrIndex> attrs() const;  // inputs followed by outputs

    std::size_t input_count() const { return table.size(); }
    Row input_at(std::size_t code) const;
    std::size_t encode_input(const Row& x) const;
    const Row& apply(const Row& x) const { return table[encode_input(x)]; }
    // The module viewed as a relation over inputs ++ outputs.
    Relation relation() const;
};

struct Workflow {
    std::vector<Attribute> attributes;
    std::vector<ModuleTable> modules;
    std::vector<int> topo_order;              // module indices
    std::vector<int> producer;                // per attribute; -1 for initial inputs
    std::vector<std::vector<int>> consumers;  // per attribute, module indices
    std::vector<AttrIndex> initial_inputs;    // declaration order

    int attr_index(const std::string& name) const;
    int module_index(const std::string& name) const;
    int domain_size(AttrIndex a) const { return static_cast<int>(attributes[a].domain.size()); }
    std::size_t attribute_count() const { return attributes.size(); }
    AttrSet all_attrs() const;
    std::vector<AttrIndex> all_attr_list() const;
    std::vector<int> private_modules() const;
    std::vector<int> public_modules() const;
    AttrSet attrs_by_name(const std::vector<std::string>& names) const;
    std::vector<std::string> names(AttrSet s) const;
    std::string format(AttrSet s) const;  // "{a1,a2}"
};

// ---- Unvalidated description, as read from JSON or built in code ----

struct AttributeSpec {
    std::string name;
    std::vector<Value> domain;
    double cost = 1.0;
};

struct ModuleSpec {
    std::string name;
    Visibility visibility = Visibility::Private;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<std::pair<std::vector<Value>, std::vector<Value>>> table;
};

struct WorkflowSpec {
    std::vector<AttributeSpec> attributes;
    std::vector<ModuleSpec> modules;

    WorkflowSpec& attr(const std::string& name, std::vector<Value> domain, double cost = 1.0);
    WorkflowSpec& bool_attr(const std::string& name, double cost = 1.0);
    // Adds a module whose table is produced by calling fn on every input tuple of
    // value indices.  All named attributes must already be declared.
    WorkflowSpec& module(const std::string& name, Visibility vis, std::vector<std::string> inputs,
                         std::vector<std::string> outputs,
                         const std::function<Row(const Row&)>& fn);
};

// Validates a description.  Throws ModelError listing every violation found.
Workflow build_workflow(const WorkflowSpec& spec);

// Back to a description; build_workflow(to_spec(w)) reproduces w.
WorkflowSpec to_spec(const Workflow& w);

// Every tuple over the product of the given attributes' domains, lexicographic order.
std::vector<Row> domain_product(const Workflow& w, const std::vector<AttrIndex>& attrs);

// Forward evaluation of every initial-input tuple (all of them when `inputs` is empty).
// The schema is every attribute in declaration order.
Relation workflow_relation(const Workflow& w, const std::optional<std::vector<Row>>& inputs = std::nullopt);

// Forward evaluation with caller-supplied module functions (used for redefined worlds).
using ModuleFn = std::function<Row(int module, const Row& input)>;
Relation evaluate(const Workflow& w, const std::vector<Row>& initial_rows, const ModuleFn& fn);

double cost_of(const Workflow& w, AttrSet h);

}  // namespace provlock
