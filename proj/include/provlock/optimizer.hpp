// Minimum-cost hidden sets: per private module over its closure, then for the workflow.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "provlock/model.hpp"
#include "provlock/workflow_privacy.hpp"

namespace provlock {

// Candidate subsets per closure module (UD-safe for the single-predecessor route,
// D-safe for the general route).
using Catalogs = std::map<int, std::vector<AttrSet>>;

struct ClosureSolution {
    AttrSet hidden;              // H_i
    double cost = 0;             // cost_of(hidden)
    std::map<int, AttrSet> picks;  // chosen subset per closure module
};

// One DP cell, kept for debugging output.
struct DPCell {
    int module;
    AttrSet subset;
    double cost;  // +inf when infeasible
};

// Closure modules m_1..m_k in order with O_{j-1} = I_j and I_1 ⊆ O_i.
// Throws Error("NotAChain").  nullopt when no consistent choice exists.
std::optional<ClosureSolution> optimize_chain_closure(const Workflow& w, int owner, AttrSet S,
                                                      const std::vector<int>& chain, const Catalogs& catalogs,
                                                      std::vector<DPCell>* table = nullptr);

// Closure forming trees hanging off the owner: every closure module reads from exactly
// one module among the owner and the closure.  Throws Error("NotATree").
std::optional<ClosureSolution> optimize_tree_closure(const Workflow& w, int owner, AttrSet S,
                                                     const std::vector<int>& closure, const Catalogs& catalogs,
                                                     std::vector<DPCell>* table = nullptr);

// Exhaustive search over catalog picks with boundary consistency and cost pruning.
// With `general` the closure is recomputed as a downward closure when validating.
std::optional<ClosureSolution> optimize_dag_closure(const Workflow& w, int owner, AttrSet S,
                                                    const std::vector<int>& closure, const Catalogs& catalogs,
                                                    bool general = false);

bool is_chain_closure(const Workflow& w, int owner, const std::vector<int>& closure);
bool is_tree_closure(const Workflow& w, int owner, const std::vector<int>& closure);

enum class Route { SinglePred, General, Both };

const char* to_string(Route r);

struct ModuleOptimum {
    int module;
    int gamma;
    AttrSet safe_subset;  // the S it was built from
    AttrSet hidden;       // H_i
    double cost;
    std::string method;   // "none", "chain", "tree" or "dag"
};

struct OptimizeResult {
    Route route;  // SinglePred or General: the route that produced the plan
    AttrSet hidden;
    double cost = 0;
    std::vector<ModuleOptimum> per_module;
    AssemblyPlan plan;
};

// Per-module privacy targets; modules not listed use the workflow-wide gamma.
using GammaTargets = std::map<int, int>;

// Safe subsets, closure catalogs, per-module optimum, then the union.  Throws
// Error("NotSinglePredecessor") for the single-predecessor route on other shapes and
// Error("NoFeasiblePlan") when some private module has no plan.
OptimizeResult optimize_workflow(const Workflow& w, int gamma, Route route, int jobs = 1,
                                 const GammaTargets& targets = {});

}  // namespace provlock
