// Possible worlds of a workflow relation, Γ-workflow-privacy, theorem-based assembly of
// hidden sets and constructive witness worlds.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "provlock/model.hpp"

namespace provlock {

// ---------------------------------------------------------------- oracle

// A restriction on the worlds searched: every row whose input to `module` equals `x`
// must produce `y`.
struct OutputPin {
    int module;
    Row x;
    Row y;
};

// Visits every world of R w.r.t. H (row-wise completions of the visible projection that
// satisfy every module dependency, keep public modules exact and keep rows distinct).
// Return false from visit to stop.  Returns the number of worlds visited.
std::size_t workflow_worlds(const Workflow& w, const Relation& R, AttrSet H,
                            const std::function<bool(const Relation&)>& visit,
                            const std::optional<OutputPin>& pin = std::nullopt);

// Membership test matching the enumeration above.
bool is_workflow_world(const Workflow& w, const Relation& R, AttrSet H, const Relation& candidate);

// Out_{x,W,H} in implication form: outputs y such that some world maps every occurrence
// of input x (possibly none) to y.  Throws Error("InputNotInRelation").
std::set<Row> workflow_out(const Workflow& w, const Relation& R, AttrSet H, int module, const Row& x,
                           int limit = 0);

struct ModulePrivacy {
    int module;
    std::vector<std::pair<Row, int>> out_sizes;  // per distinct input in R, first-seen order
    int gamma;                                   // minimum of out_sizes
};

struct PrivacyReport {
    std::vector<ModulePrivacy> modules;  // private modules in topological order
    int gamma = 0;                       // minimum over modules; 0 when there is no private module
    int limit = 0;                       // non-zero: sizes were counted only up to this value
};

// With limit > 0 each Out set is explored only until it reaches `limit` elements.
PrivacyReport gamma_achieved(const Workflow& w, const Relation& R, AttrSet H, int limit = 0, int jobs = 1);

// ---------------------------------------------------------------- assembly

class ConditionViolated : public Error {
public:
    ConditionViolated(std::string condition, std::string witness)
        : Error("ConditionViolated", "condition " + condition + ": " + witness),
          condition_(std::move(condition)),
          witness_(std::move(witness)) {}
    const std::string& condition() const { return condition_; }
    const std::string& witness() const { return witness_; }

private:
    std::string condition_;
    std::string witness_;
};

// Choice for one private module: its hidden outputs and one subset per closure module.
// gamma > 0 overrides the plan-wide target for this module.
struct ModuleChoice {
    int module;
    AttrSet h;
    std::map<int, AttrSet> closure;
    int gamma = 0;
};

struct PlanEntry {
    int module;
    AttrSet h;
    std::vector<int> closure_modules;  // C(h) or D(h), topological order
    std::map<int, AttrSet> closure;
    AttrSet hidden;                    // H_i
    int gamma = 1;                     // target this entry was checked against
};

struct AssemblyPlan {
    bool general = false;
    int gamma = 1;
    std::vector<PlanEntry> entries;
    AttrSet hidden;  // H, the union of every H_i
};

// Validates the single-predecessor composability conditions and returns the plan.
// Throws Error("NotSinglePredecessor") or ConditionViolated.
AssemblyPlan assemble_single_pred(const Workflow& w, const std::vector<ModuleChoice>& choices, int gamma);

// Same with downward closures and D-safety; H_i may overlap.
AssemblyPlan assemble_general(const Workflow& w, const std::vector<ModuleChoice>& choices, int gamma);

// ---------------------------------------------------------------- witness worlds

enum class WitnessRoute { SinglePredecessor, General };

// Builds a world of R in which module `module` maps x to y, by redefining private
// modules with Flip/EFlip and re-running the workflow on R's initial inputs.  If the
// result is not a world (a private reader sees only part of the flipped outputs) the
// oracle is searched instead with the output pinned.  Requires h = H ∩ O_i and
// y ≡_h m(x).  Throws Error("PreconditionViolated"), or Error("NoWitness") when no
// such world exists.
Relation construct_witness_world(const Workflow& w, const Relation& R, int module, AttrSet h, const Row& x,
                                 const Row& y, AttrSet H, WitnessRoute route);

}  // namespace provlock
