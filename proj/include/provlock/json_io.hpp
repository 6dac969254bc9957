// Reading workflow descriptions and writing reports.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "provlock/closures.hpp"
#include "provlock/model.hpp"
#include "provlock/optimizer.hpp"
#include "provlock/public_safety.hpp"
#include "provlock/standalone.hpp"
#include "provlock/workflow_privacy.hpp"

namespace provlock {

// Key order matters (attributes are declared in document order), hence ordered_json.
using Json = nlohmann::ordered_json;

// Throws Error("ParseError") on malformed documents.  An attribute entry without a
// domain is not declared, so modules naming it are reported as UnknownAttribute.
WorkflowSpec parse_workflow_spec(const Json& doc);
WorkflowSpec load_workflow_spec(const std::string& path);

Json spec_to_json(const WorkflowSpec& spec);

Json names_json(const Workflow& w, AttrSet s);
Json to_json(const Workflow& w, const SafeCatalog& c);
Json to_json(const Workflow& w, const UDSafeCatalog& c);
Json to_json(const Workflow& w, const PrivacyReport& r);
Json to_json(const Workflow& w, const AssemblyPlan& p);
Json to_json(const Workflow& w, const OptimizeResult& r);
Json to_json(const Workflow& w, const Classification& c);
Json dp_table_json(const Workflow& w, const std::vector<DPCell>& cells);

// Value-index row rendered with the attribute domains.
std::string format_row(const Workflow& w, const std::vector<AttrIndex>& attrs, const Row& r);

// Plain table: header of attribute names (hidden ones marked with '*'), one line per row,
// cells separated by single spaces.
std::string format_relation(const Workflow& w, const Relation& R, AttrSet H = {});

}  // namespace provlock
