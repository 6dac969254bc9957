// Downstream / upstream safety of modules with respect to hidden attributes.
#pragma once

#include <vector>

#include "provlock/model.hpp"

namespace provlock {

// Any function table given as explicit (input, output) pairs: a module, or the boundary
// behaviour of a composite module.
struct IOTable {
    std::vector<AttrIndex> inputs;
    std::vector<AttrIndex> outputs;
    std::vector<std::pair<Row, Row>> rows;

    AttrSet attr_set() const { return AttrSet::of(inputs) | AttrSet::of(outputs); }
    std::vector<AttrIndex> attrs() const;
};

IOTable io_table(const ModuleTable& m);

// x ≡_H x' implies m(x) ≡_H m(x').
bool is_dsafe(const IOTable& t, AttrSet H);
// m(x) ≡_H m(x') implies x ≡_H x'.
bool is_usafe(const IOTable& t, AttrSet H);
bool is_udsafe(const IOTable& t, AttrSet H);

inline bool is_dsafe(const ModuleTable& m, AttrSet H) { return is_dsafe(io_table(m), H); }
inline bool is_usafe(const ModuleTable& m, AttrSet H) { return is_usafe(io_table(m), H); }
inline bool is_udsafe(const ModuleTable& m, AttrSet H) { return is_udsafe(io_table(m), H); }

struct UDSafeCatalog {
    int module = -1;
    std::vector<AttrSet> subsets;  // lexicographic order; always holds A_j
};

// Grouping-and-counting enumeration: D-safe when the visible output is constant on each
// visible-input group, U-safe (given D-safe) when the group count equals the number of
// distinct visible outputs.
std::vector<AttrSet> enumerate_udsafe(const IOTable& t, int jobs = 1);
UDSafeCatalog enumerate_udsafe(const Workflow& w, int module, int jobs = 1);

// All D-safe subsets of A_j (used by the general-workflow route).
std::vector<AttrSet> enumerate_dsafe(const IOTable& t, int jobs = 1);

struct CompositeModule {
    std::vector<int> members;       // topological order
    std::vector<AttrIndex> inputs;  // attributes entering from outside
    std::vector<AttrIndex> outputs; // attributes consumed outside, or by nobody
    Relation joined;                // over every member attribute, one row per boundary input tuple
    IOTable boundary;
};

// Throws Error("NonPublicMember"), or Error("NotConnected") when require_connected is set
// and the members do not form one undirected component.
CompositeModule compose_public(const Workflow& w, const std::vector<int>& members, bool require_connected = true);

}  // namespace provlock
