#pragma once

#include <string>
#include <vector>

#include "mgrid/milp_model.hpp"

namespace mgrid {

// Reduction of a MilpModel before the search: substitute fixed columns,
// tighten bounds through row activities (round binary bounds to integers),
// drop redundant and empty rows, and eliminate columns that no row touches.
// The mapping reconstructs full-space solutions exactly.
struct PresolveResult {
    MilpModel reduced;
    bool infeasible = false;
    std::string note;               // why presolve proved infeasibility
    std::vector<int> col_map;       // original column -> reduced column, or -1
    std::vector<double> fixed_value;  // value for columns mapped to -1

    std::vector<double> restore(const std::vector<double>& x_reduced) const;
};

PresolveResult presolve(const MilpModel& m);

}  // namespace mgrid
