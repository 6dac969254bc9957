// Public and directed paths, public closure, downward closure, single-predecessor shape.
#pragma once

#include <string>
#include <vector>

#include "provlock/model.hpp"

namespace provlock {

// Sequence from -> ... -> to, consecutive modules linked by O ∩ I ≠ ∅, every module
// after `from` public except possibly `to`.  A module always reaches itself.
bool directed_public_path(const Workflow& w, int from, int to);

// Same with undirected adjacency A_i ∩ A_j ≠ ∅, all intermediate modules public.
bool undirected_public_path(const Workflow& w, int from, int to);

// The private module whose outputs contain h.  Throws Error("NotOutputOfPrivate").
int owner_of(const Workflow& w, AttrSet h);

// C(h): public modules holding an attribute of h, closed under undirected public
// adjacency.  Topological order.
std::vector<int> public_closure(const Workflow& w, AttrSet h);

// D(h): every module consuming an attribute of h, plus everything reachable from those
// by directed edges.  Topological order.
std::vector<int> downward_closure(const Workflow& w, AttrSet h);

enum class ShapeViolation { DataSharing, NoDirectedPath, MultiplePrivatePredecessors, ExternalInput };

const char* to_string(ShapeViolation v);

struct ClassificationIssue {
    ShapeViolation kind;
    std::string module;     // offending module (empty for DataSharing)
    std::string witness;    // shared/external attribute, or the competing private module
    std::string owner;      // private module whose closure is involved
};

struct Classification {
    bool is_single_predecessor = true;
    std::vector<ClassificationIssue> violations;
};

// Checks: no attribute feeds two modules; in every private module's closure, each public
// module is reached by a directed public path from that module and from no other private
// module; no closure module reads an initial input.
Classification classify_single_predecessor(const Workflow& w);

}  // namespace provlock
