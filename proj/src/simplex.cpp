#include "mgrid/simplex.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace mgrid {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

struct BoundedSimplex::Impl {
    SimplexOptions opts;
    int n = 0;  // structural columns
    int m = 0;  // rows
    int N = 0;  // n + m

    // Scaled instance, CSC over the extended columns (logical j = n + row).
    std::vector<int> col_ptr, row_idx;
    std::vector<double> val;
    std::vector<double> c;         // scaled objective (logicals 0)
    std::vector<double> b;         // scaled rhs
    std::vector<double> lb, ub;    // scaled bounds, mutable per node
    std::vector<double> lb0, ub0;  // model bounds (scaled)
    std::vector<double> row_scale, col_scale;

    // Simplex state.
    std::vector<ColStatus> status;
    std::vector<int> basis;     // basis[r] = column in basis position r
    std::vector<int> in_basis;  // column -> basis position or -1
    std::vector<double> x;      // all column values (scaled)

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    struct Eta {
        int r;
        double pivot;                            // w[r]
        std::vector<std::pair<int, double>> w;   // sparse w = B^-1 a_q, without r
    };
    std::vector<Eta> etas;

    // Scratch.
    Eigen::VectorXd work;

    explicit Impl(const MilpModel& model, const SimplexOptions& o) : opts(o) {
        n = model.num_vars();
        m = model.num_rows();
        N = n + m;

        // Row-major triplets of the structural matrix.
        std::vector<std::vector<std::pair<int, double>>> cols(N);
        for (int i = 0; i < m; ++i)
            for (const auto& [j, a] : model.rows[i].terms)
                if (a != 0.0) cols[j].emplace_back(i, a);
        for (int i = 0; i < m; ++i) cols[n + i].emplace_back(i, 1.0);

        row_scale.assign(m, 1.0);
        col_scale.assign(N, 1.0);
        if (opts.scale) geometric_scaling(cols);

        col_ptr.assign(N + 1, 0);
        for (int j = 0; j < N; ++j) col_ptr[j + 1] = col_ptr[j] + static_cast<int>(cols[j].size());
        row_idx.resize(col_ptr[N]);
        val.resize(col_ptr[N]);
        for (int j = 0; j < N; ++j) {
            auto sorted = cols[j];
            std::sort(sorted.begin(), sorted.end());
            int p = col_ptr[j];
            for (const auto& [i, a] : sorted) {
                row_idx[p] = i;
                val[p] = a * row_scale[i] * col_scale[j];
                ++p;
            }
        }

        c.assign(N, 0.0);
        for (const auto& [j, coef] : model.objective) c[j] += coef * col_scale[j];

        b.assign(m, 0.0);
        for (int i = 0; i < m; ++i) b[i] = model.rows[i].rhs * row_scale[i];

        lb0.assign(N, 0.0);
        ub0.assign(N, 0.0);
        for (int j = 0; j < n; ++j) {
            lb0[j] = model.vars[j].lb / col_scale[j];
            ub0[j] = model.vars[j].ub / col_scale[j];
        }
        for (int i = 0; i < m; ++i) {
            // Logical column: row + s = rhs with s >= 0 for <=, s <= 0 for >=,
            // s = 0 for equalities, in the scaled space s' = s / col_scale.
            double lo = 0, hi = 0;
            switch (model.rows[i].sense) {
                case RowSense::le: lo = 0, hi = kInf; break;
                case RowSense::ge: lo = -kInf, hi = 0; break;
                case RowSense::eq: lo = hi = 0; break;
            }
            lb0[n + i] = lo / col_scale[n + i];
            ub0[n + i] = hi / col_scale[n + i];
        }
        lb = lb0;
        ub = ub0;
        x.assign(N, 0.0);
        reset_basis();
        work.resize(m);
    }

    // A few passes of geometric-mean equilibration on the structural part.
    void geometric_scaling(const std::vector<std::vector<std::pair<int, double>>>& cols) {
        for (int pass = 0; pass < 3; ++pass) {
            std::vector<double> rmin(m, kInf), rmax(m, 0.0);
            for (int j = 0; j < n; ++j)
                for (const auto& [i, a] : cols[j]) {
                    double v = std::abs(a) * row_scale[i] * col_scale[j];
                    if (v > 0) {
                        rmin[i] = std::min(rmin[i], v);
                        rmax[i] = std::max(rmax[i], v);
                    }
                }
            for (int i = 0; i < m; ++i)
                if (rmax[i] > 0) row_scale[i] /= std::sqrt(rmin[i] * rmax[i]);
            std::vector<double> cmin(N, kInf), cmax(N, 0.0);
            for (int j = 0; j < n; ++j)
                for (const auto& [i, a] : cols[j]) {
                    double v = std::abs(a) * row_scale[i] * col_scale[j];
                    if (v > 0) {
                        cmin[j] = std::min(cmin[j], v);
                        cmax[j] = std::max(cmax[j], v);
                    }
                }
            for (int j = 0; j < n; ++j)
                if (cmax[j] > 0) col_scale[j] /= std::sqrt(cmin[j] * cmax[j]);
        }
        for (int i = 0; i < m; ++i) col_scale[n + i] = 1.0 / row_scale[i];
    }

    void reset_basis() {
        status.assign(N, ColStatus::at_lower);
        basis.resize(m);
        in_basis.assign(N, -1);
        for (int j = 0; j < n; ++j) status[j] = nonbasic_default(j);
        for (int i = 0; i < m; ++i) {
            basis[i] = n + i;
            status[n + i] = ColStatus::basic;
            in_basis[n + i] = i;
        }
    }

    ColStatus nonbasic_default(int j) const {
        if (std::isfinite(lb[j])) return ColStatus::at_lower;
        if (std::isfinite(ub[j])) return ColStatus::at_upper;
        return ColStatus::free_nb;
    }

    double nonbasic_value(int j) const {
        switch (status[j]) {
            case ColStatus::at_lower: return std::isfinite(lb[j]) ? lb[j] : 0.0;
            case ColStatus::at_upper: return std::isfinite(ub[j]) ? ub[j] : 0.0;
            default: return 0.0;
        }
    }

    bool factorize() {
        Eigen::SparseMatrix<double> B(m, m);
        std::vector<Eigen::Triplet<double>> tr;
        tr.reserve(static_cast<std::size_t>(m) * 4);
        for (int r = 0; r < m; ++r) {
            int j = basis[r];
            for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p)
                tr.emplace_back(row_idx[p], r, val[p]);
        }
        B.setFromTriplets(tr.begin(), tr.end());
        lu.compute(B);
        etas.clear();
        return lu.info() == Eigen::Success;
    }

    // z = B^-1 a  (a given as a sparse extended column index).
    void ftran_col(int j, Eigen::VectorXd& z) const {
        z.setZero(m);
        for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p) z(row_idx[p]) = val[p];
        ftran(z);
    }

    void ftran(Eigen::VectorXd& z) const {
        z = lu.solve(z).eval();
        for (const auto& e : etas) {
            double f = z(e.r) / e.pivot;
            if (f != 0.0) {
                for (const auto& [i, wi] : e.w) z(i) -= f * wi;
                z(e.r) = f;
            }
        }
    }

    void btran(Eigen::VectorXd& y) const {
        for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
            double dot = 0.0;
            for (const auto& [i, wi] : it->w) dot += wi * y(i);
            y(it->r) = (y(it->r) - dot) / it->pivot;
        }
        y = lu.adjoint().solve(y).eval();
    }

    // Basic values from scratch: x_B = B^-1 (b - N x_N).
    void compute_basics() {
        Eigen::VectorXd rhs(m);
        for (int i = 0; i < m; ++i) rhs(i) = b[i];
        for (int j = 0; j < N; ++j) {
            if (status[j] == ColStatus::basic) continue;
            double v = nonbasic_value(j);
            x[j] = v;
            if (v != 0.0)
                for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p)
                    rhs(row_idx[p]) -= val[p] * v;
        }
        ftran(rhs);
        for (int r = 0; r < m; ++r) x[basis[r]] = rhs(r);
    }

    double infeasibility() const {
        double s = 0.0;
        for (int r = 0; r < m; ++r) {
            double v = x[basis[r]];
            int j = basis[r];
            if (v < lb[j]) s += lb[j] - v;
            if (v > ub[j]) s += v - ub[j];
        }
        return s;
    }

    // Phase-1 gradient entry for basis position r.
    double phase1_cost(int r) const {
        int j = basis[r];
        if (x[j] < lb[j] - opts.feas_tol) return -1.0;
        if (x[j] > ub[j] + opts.feas_tol) return 1.0;
        return 0.0;
    }

    struct Pricing {
        int col = -1;
        double reduced = 0.0;
        int dir = 0;
    };

    Pricing price(const Eigen::VectorXd& y, bool phase1, bool bland) const {
        Pricing best;
        double best_score = opts.opt_tol;
        for (int j = 0; j < N; ++j) {
            if (status[j] == ColStatus::basic) continue;
            if (lb[j] == ub[j]) continue;  // fixed, never enters
            double d = (phase1 ? 0.0 : c[j]);
            for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p) d -= y(row_idx[p]) * val[p];
            int dir = 0;
            if (status[j] == ColStatus::at_lower && d < -opts.opt_tol) dir = 1;
            else if (status[j] == ColStatus::at_upper && d > opts.opt_tol) dir = -1;
            else if (status[j] == ColStatus::free_nb && std::abs(d) > opts.opt_tol)
                dir = d < 0 ? 1 : -1;
            if (dir == 0) continue;
            if (bland) return {j, d, dir};
            double score = std::abs(d);
            if (score > best_score) {
                best_score = score;
                best = {j, d, dir};
            }
        }
        return best;
    }

    struct Ratio {
        double theta = kInf;
        int blocker = -1;   // basis position, -1 = entering's own bound
        int hit_bound = 0;  // -1 lower, +1 upper (bound the blocker reaches)
    };

    Ratio ratio_test(int q, int dir, const Eigen::VectorXd& w, bool phase1, bool bland) const {
        Ratio best;
        double span = ub[q] - lb[q];
        if (std::isfinite(span)) best.theta = span;

        const double ptol = opts.pivot_tol;
        for (int r = 0; r < m; ++r) {
            double wr = w(r);
            if (std::abs(wr) <= ptol) continue;
            int j = basis[r];
            double rate = -dir * wr;  // d x_B[r] / d theta
            double v = x[j];
            double theta = kInf;
            int hit = 0;
            if (phase1 && v < lb[j] - opts.feas_tol) {
                // Infeasible below: blocks only when climbing back to lb.
                if (rate > 0) theta = (lb[j] - v) / rate, hit = -1;
            } else if (phase1 && v > ub[j] + opts.feas_tol) {
                if (rate < 0) theta = (v - ub[j]) / (-rate), hit = 1;
            } else if (rate > 0) {
                if (std::isfinite(ub[j])) theta = (ub[j] - v) / rate, hit = 1;
            } else {
                if (std::isfinite(lb[j])) theta = (v - lb[j]) / (-rate), hit = -1;
            }
            if (theta == kInf) continue;
            if (theta < 0) theta = 0;
            if (theta < best.theta - 1e-12 ||
                (theta <= best.theta + 1e-12 && best.blocker >= 0 &&
                 (bland ? j < basis[best.blocker]
                        : std::abs(wr) > std::abs(w(best.blocker))))) {
                best.theta = theta;
                best.blocker = r;
                best.hit_bound = hit;
            }
        }
        return best;
    }

    LpStatus run(int& iterations) {
        if (!factorize()) {
            reset_basis();
            if (!factorize()) return LpStatus::infeasible;  // cannot happen: identity basis
        }
        compute_basics();

        int degenerate_streak = 0;
        bool bland = false;
        Eigen::VectorXd y(m), w(m);

        for (int it = 0; it < opts.max_iterations; ++it) {
            ++iterations;
            bool phase1 = false;
            for (int r = 0; r < m; ++r) {
                int j = basis[r];
                if (x[j] < lb[j] - opts.feas_tol || x[j] > ub[j] + opts.feas_tol) {
                    phase1 = true;
                    break;
                }
            }

            // Reduced costs come from y = B^-T c_B.
            for (int r = 0; r < m; ++r) y(r) = phase1 ? phase1_cost(r) : c[basis[r]];
            btran(y);
            Pricing pr = price(y, phase1, bland);
            if (pr.col < 0) {
                if (phase1) return LpStatus::infeasible;
                return LpStatus::optimal;
            }

            ftran_col(pr.col, w);
            Ratio ra = ratio_test(pr.col, pr.dir, w, phase1, bland);
            if (ra.theta == kInf) {
                if (phase1) return LpStatus::infeasible;  // cannot happen: infeasibility >= 0
                return LpStatus::unbounded;
            }

            // Move.
            double theta = ra.theta;
            if (theta > 0) {
                for (int r = 0; r < m; ++r) {
                    double wr = w(r);
                    if (wr != 0.0) x[basis[r]] -= theta * pr.dir * wr;
                }
                x[pr.col] = nonbasic_value(pr.col) + theta * pr.dir;
                degenerate_streak = 0;
                if (bland) bland = false;
            } else {
                if (++degenerate_streak > opts.bland_after) bland = true;
            }

            if (ra.blocker < 0) {
                // Bound flip, no basis change.
                status[pr.col] =
                    status[pr.col] == ColStatus::at_lower ? ColStatus::at_upper : ColStatus::at_lower;
                x[pr.col] = nonbasic_value(pr.col);
                continue;
            }

            int rpos = ra.blocker;
            int leaving = basis[rpos];
            double wr = w(rpos);

            // Entering value when theta==0 must still be tracked through the
            // basis swap.
            if (theta == 0) x[pr.col] = nonbasic_value(pr.col);

            status[leaving] = ra.hit_bound > 0 ? ColStatus::at_upper : ColStatus::at_lower;
            x[leaving] = nonbasic_value(leaving);
            in_basis[leaving] = -1;
            basis[rpos] = pr.col;
            in_basis[pr.col] = rpos;
            status[pr.col] = ColStatus::basic;

            Eta e;
            e.r = rpos;
            e.pivot = wr;
            for (int i = 0; i < m; ++i)
                if (i != rpos && w(i) != 0.0) e.w.emplace_back(i, w(i));
            etas.push_back(std::move(e));

            if (static_cast<int>(etas.size()) >= opts.refactor_every ||
                std::abs(wr) < 1e-7 * (1.0 + w.cwiseAbs().maxCoeff())) {
                if (!factorize()) {
                    // Degenerate basis matrix; restart from scratch.
                    reset_basis();
                    if (!factorize()) return LpStatus::infeasible;
                }
                compute_basics();
            }
        }
        return LpStatus::iteration_limit;
    }

    // One round of residual polish on the basic values with a fresh
    // factorization, in the scaled space.
    void refine() {
        Eigen::VectorXd r(m);
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < m; ++i) r(i) = b[i];
            for (int j = 0; j < N; ++j) {
                double v = x[j];
                if (v != 0.0)
                    for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p)
                        r(row_idx[p]) -= val[p] * v;
            }
            ftran(r);
            for (int rr = 0; rr < m; ++rr) x[basis[rr]] += r(rr);
        }
    }

    LpSolution finish(LpStatus st, int iterations) {
        LpSolution out;
        out.status = st;
        out.iterations = iterations;
        out.basis = status;
        if (st != LpStatus::optimal) {
            if (st == LpStatus::infeasible) out.primal_infeasibility = infeasibility();
            return out;
        }
        if (!factorize()) {
            out.status = LpStatus::iteration_limit;
            return out;
        }
        compute_basics();
        refine();

        out.x.resize(n);
        for (int j = 0; j < n; ++j) out.x[j] = x[j] * col_scale[j];

        Eigen::VectorXd y(m);
        for (int r = 0; r < m; ++r) y(r) = c[basis[r]];
        btran(y);
        out.duals.resize(m);
        for (int i = 0; i < m; ++i) out.duals[i] = y(i) * row_scale[i];

        double obj = 0.0;
        for (int j = 0; j < N; ++j) obj += c[j] * x[j];
        out.objective = obj;

        // Primal infeasibility in the scaled space (bounds + residual after
        // refinement).
        double pinf = 0.0;
        for (int j = 0; j < N; ++j) {
            if (std::isfinite(lb[j])) pinf = std::max(pinf, lb[j] - x[j]);
            if (std::isfinite(ub[j])) pinf = std::max(pinf, x[j] - ub[j]);
        }
        Eigen::VectorXd res = Eigen::VectorXd::Zero(m);
        for (int i = 0; i < m; ++i) res(i) = b[i];
        for (int j = 0; j < N; ++j) {
            double v = x[j];
            if (v != 0.0)
                for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p) res(row_idx[p]) -= val[p] * v;
        }
        pinf = std::max(pinf, res.cwiseAbs().maxCoeff());
        out.primal_infeasibility = pinf;

        double dinf = 0.0;
        for (int j = 0; j < N; ++j) {
            if (status[j] == ColStatus::basic || lb[j] == ub[j]) continue;
            double d = c[j];
            for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p) d -= y(row_idx[p]) * val[p];
            if (status[j] == ColStatus::at_lower) dinf = std::max(dinf, -d);
            else if (status[j] == ColStatus::at_upper) dinf = std::max(dinf, d);
            else dinf = std::max(dinf, std::abs(d));
        }
        out.dual_infeasibility = dinf;
        return out;
    }
};

BoundedSimplex::BoundedSimplex(const MilpModel& model, const SimplexOptions& opts)
    : impl_(std::make_unique<Impl>(model, opts)) {
    if (model.num_vars() == 0) throw UsageError("solve_lp: model has no variables");
}

BoundedSimplex::~BoundedSimplex() = default;
BoundedSimplex::BoundedSimplex(BoundedSimplex&&) noexcept = default;
BoundedSimplex& BoundedSimplex::operator=(BoundedSimplex&&) noexcept = default;

void BoundedSimplex::set_bounds(int col, double lo, double hi) {
    if (col < 0 || col >= impl_->n) throw UsageError("set_bounds: column out of range");
    impl_->lb[col] = lo / impl_->col_scale[col];
    impl_->ub[col] = hi / impl_->col_scale[col];
}

void BoundedSimplex::reset_bounds() {
    impl_->lb = impl_->lb0;
    impl_->ub = impl_->ub0;
}

double BoundedSimplex::lower_bound(int col) const {
    return impl_->lb[col] * impl_->col_scale[col];
}

double BoundedSimplex::upper_bound(int col) const {
    return impl_->ub[col] * impl_->col_scale[col];
}

void BoundedSimplex::set_basis(const std::vector<ColStatus>& st) {
    Impl& im = *impl_;
    if (st.size() != static_cast<std::size_t>(im.N))
        throw UsageError("set_basis: wrong status vector length");
    std::vector<int> basics;
    for (int j = 0; j < im.N; ++j)
        if (st[j] == ColStatus::basic) basics.push_back(j);
    if (static_cast<int>(basics.size()) != im.m) {
        im.reset_basis();
        return;
    }
    im.status = st;
    im.in_basis.assign(im.N, -1);
    for (int r = 0; r < im.m; ++r) {
        im.basis[r] = basics[r];
        im.in_basis[basics[r]] = r;
    }
    // Nonbasic statuses must point at a finite bound.
    for (int j = 0; j < im.N; ++j) {
        if (im.status[j] == ColStatus::basic) continue;
        if (im.status[j] == ColStatus::at_lower && !std::isfinite(im.lb[j]))
            im.status[j] = im.nonbasic_default(j);
        if (im.status[j] == ColStatus::at_upper && !std::isfinite(im.ub[j]))
            im.status[j] = im.nonbasic_default(j);
    }
}

void BoundedSimplex::reset_basis() { impl_->reset_basis(); }

int BoundedSimplex::num_structural() const { return impl_->n; }
int BoundedSimplex::num_rows() const { return impl_->m; }

LpSolution BoundedSimplex::solve() {
    int iterations = 0;
    LpStatus st = impl_->run(iterations);
    return impl_->finish(st, iterations);
}

LpSolution solve_lp(const MilpModel& m, const SimplexOptions& opts,
                    const std::vector<ColStatus>* warm_basis) {
    BoundedSimplex s(m, opts);
    if (warm_basis) s.set_basis(*warm_basis);
    LpSolution sol = s.solve();
    if (sol.status == LpStatus::optimal) sol.objective += m.objective_offset;
    return sol;
}

}  // namespace mgrid
