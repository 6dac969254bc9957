// Possible worlds and Γ-standalone-privacy of a single module.
//
// A world is a row-wise completion of the visible projection: each table row keeps its
// visible values, hidden cells take any domain value, the completed rows must be
// pairwise distinct and must satisfy the dependency I → O.
#pragma once

#include <functional>
#include <set>
#include <vector>

#include "provlock/model.hpp"

namespace provlock {

struct SafeCatalog {
    int module = -1;
    int gamma = 1;
    bool outputs_only = true;
    std::vector<AttrSet> subsets;  // lexicographic order
};

// Calls visit(world) for each world; stop early by returning false.  The world's schema
// is m.attrs().  Returns the number of worlds visited.
std::size_t standalone_worlds(const ModuleTable& m, AttrSet H, const std::function<bool(const Relation&)>& visit);

// Out_{x,m,H} for every input tuple x, indexed by input code.  Sets hold output rows
// aligned with m.outputs.
std::vector<std::set<Row>> standalone_out_all(const ModuleTable& m, AttrSet H);

// Out_{x,m,H} for one input tuple (value indices aligned with m.inputs).
std::set<Row> standalone_out(const ModuleTable& m, const Row& x, AttrSet H);

bool is_standalone_safe(const ModuleTable& m, AttrSet H, int gamma);

// All subsets of O_i (or of A_i when outputs_only is false) that are safe at gamma.
SafeCatalog enumerate_safe_subsets(const Workflow& w, int module, int gamma, bool outputs_only = true, int jobs = 1);

}  // namespace provlock
