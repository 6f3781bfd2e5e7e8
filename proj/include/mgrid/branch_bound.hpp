#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mgrid/milp_model.hpp"
#include "mgrid/simplex.hpp"

namespace mgrid {

enum class BranchingRule { most_fractional, pseudo_cost };
enum class NodeSelection { best_bound, depth_first };

struct SolverOptions {
    double opt_ca = 1e-2;  // absolute optimality gap
    double opt_cr = 1e-2;  // relative optimality gap
    double time_limit_sec = std::numeric_limits<double>::infinity();
    long node_limit = 1000000;
    BranchingRule branching = BranchingRule::most_fractional;
    NodeSelection node_selection = NodeSelection::best_bound;
    int threads = 1;        // reserved; node processing is sequential
    std::uint64_t seed = 0; // reserved for stochastic rules
    double int_tol = 1e-6;
    bool use_presolve = true;
    bool rounding_heuristic = true;
    bool collect_node_log = false;
    SimplexOptions lp;
};

enum class MilpStatus { optimal_within_gap, feasible, infeasible, limit_reached, unbounded };

const char* to_string(MilpStatus s);

struct MilpResult {
    MilpStatus status = MilpStatus::infeasible;
    std::vector<double> x;  // full-space incumbent; empty when none found
    double objective = std::numeric_limits<double>::infinity();
    double bound = -std::numeric_limits<double>::infinity();
    double gap_abs = std::numeric_limits<double>::infinity();
    double gap_rel = std::numeric_limits<double>::infinity();
    long nodes = 0;
    double wall_time_sec = 0.0;
    std::string node_log;  // "node,depth,bound,incumbent,gap_rel,time_sec" rows

    bool has_incumbent() const { return !x.empty(); }
};

// Branch-and-bound over LP relaxations: best-bound (or depth-first) node
// selection, branching on fractional binaries, warm-started bounded simplex
// per node, incumbent from integral relaxations and a fix-and-resolve
// rounding heuristic. Terminates on the optCA/optCR gap conditions, limits,
// or tree exhaustion. Deterministic for fixed options.
MilpResult solve_milp(const MilpModel& m, const SolverOptions& opts = {});

}  // namespace mgrid
