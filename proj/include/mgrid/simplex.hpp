#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mgrid/milp_model.hpp"

namespace mgrid {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

// Nonbasic/basic state per extended column (structurals then one logical per
// row); the full vector identifies a basis.
enum class ColStatus : std::uint8_t { basic = 0, at_lower = 1, at_upper = 2, free_nb = 3 };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;      // structural values
    double objective = 0.0;
    std::vector<double> duals;  // one per row
    std::vector<ColStatus> basis;
    int iterations = 0;
    double primal_infeasibility = 0.0;  // max bound/row violation at return
    double dual_infeasibility = 0.0;    // max reduced-cost sign violation
};

struct SimplexOptions {
    double feas_tol = 1e-7;
    double opt_tol = 1e-9;
    double pivot_tol = 1e-9;
    int max_iterations = 500000;
    int refactor_every = 64;
    int bland_after = 1000;  // consecutive degenerate pivots before Bland's rule
    bool scale = true;
};

// Bounded-variable primal revised simplex over a MilpModel's continuous
// relaxation. Rows become equalities through one logical column each; the
// basis is kept as a sparse LU factorization plus product-form eta updates,
// refactorized periodically. Geometric row/column scaling is applied up
// front. Deterministic: Dantzig pricing with index tie-breaks, Bland's rule
// after a degenerate streak.
class BoundedSimplex {
  public:
    explicit BoundedSimplex(const MilpModel& m, const SimplexOptions& opts = {});
    ~BoundedSimplex();
    BoundedSimplex(BoundedSimplex&&) noexcept;
    BoundedSimplex& operator=(BoundedSimplex&&) noexcept;

    // Change a structural column's bounds (branching); reset restores the
    // model's bounds.
    void set_bounds(int col, double lb, double ub);
    void reset_bounds();
    double lower_bound(int col) const;
    double upper_bound(int col) const;

    void set_basis(const std::vector<ColStatus>& status);
    void reset_basis();

    LpSolution solve();

    int num_structural() const;
    int num_rows() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

LpSolution solve_lp(const MilpModel& m, const SimplexOptions& opts = {},
                    const std::vector<ColStatus>* warm_basis = nullptr);

}  // namespace mgrid
