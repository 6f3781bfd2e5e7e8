#include "mgrid/branch_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>
#include <sstream>

#include "mgrid/presolve.hpp"

namespace mgrid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BoundChange {
    int col;
    double lb, ub;
};

struct Node {
    long id = 0;
    int depth = 0;
    double bound = -kInf;              // inherited proven bound, full-space
    std::vector<BoundChange> changes;  // accumulated from the root
    std::vector<ColStatus> basis;
    int branch_var = -1;
    int branch_dir = 0;      // +1 up child, -1 down child
    double branch_frac = 0;  // fractional part at the parent
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
        return a.id > b.id;
    }
};

struct PseudoCost {
    std::vector<double> up_sum, down_sum;
    std::vector<int> up_cnt, down_cnt;

    void init(int n) {
        up_sum.assign(n, 0.0);
        down_sum.assign(n, 0.0);
        up_cnt.assign(n, 0);
        down_cnt.assign(n, 0);
    }
    void record(const Node& node, double child_obj) {
        if (node.branch_var < 0) return;
        double gain = std::max(0.0, child_obj - node.bound);
        if (node.branch_dir > 0) {
            up_sum[node.branch_var] += gain / std::max(1e-6, 1.0 - node.branch_frac);
            ++up_cnt[node.branch_var];
        } else {
            down_sum[node.branch_var] += gain / std::max(1e-6, node.branch_frac);
            ++down_cnt[node.branch_var];
        }
    }
    double score(int j, double frac) const {
        if (up_cnt[j] == 0 || down_cnt[j] == 0) return -1.0;  // unreliable
        double up = up_sum[j] / up_cnt[j] * (1.0 - frac);
        double down = down_sum[j] / down_cnt[j] * frac;
        return std::max(up, 1e-12) * std::max(down, 1e-12);
    }
};

class Search {
  public:
    Search(const MilpModel& model, const SolverOptions& opts)
        : opts_(opts), pre_(opts.use_presolve ? presolve(model) : passthrough(model)),
          red_(pre_.reduced) {
        for (int j = 0; j < red_.num_vars(); ++j)
            if (red_.vars[j].type == VarType::binary) binaries_.push_back(j);
        pc_.init(red_.num_vars());
    }

    MilpResult run() {
        auto t0 = std::chrono::steady_clock::now();
        auto elapsed = [&] {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        };
        MilpResult res;
        if (pre_.infeasible) {
            res.status = MilpStatus::infeasible;
            res.wall_time_sec = elapsed();
            return res;
        }
        if (red_.num_vars() == 0) {
            res.x = pre_.restore({});
            res.objective = res.bound = red_.objective_offset;
            res.status = MilpStatus::optimal_within_gap;
            res.gap_abs = res.gap_rel = 0.0;
            res.wall_time_sec = elapsed();
            return res;
        }

        lp_ = std::make_unique<BoundedSimplex>(red_, opts_.lp);
        push(Node{next_id_++, 0, -kInf, {}, {}, -1, 0, 0.0});

        bool limit_hit = false;
        bool root_infeasible = false;
        bool root_unbounded = false;
        while (!open_empty()) {
            if (res.nodes >= opts_.node_limit || elapsed() > opts_.time_limit_sec) {
                limit_hit = true;
                break;
            }
            if (incumbent_obj_ < kInf) {
                double lower = std::min(open_min_bound(), pruned_min_);
                double gap = incumbent_obj_ - lower;
                if (gap <= opts_.opt_ca ||
                    gap <= opts_.opt_cr * std::max(1e-9, std::abs(incumbent_obj_)))
                    break;
            }

            Node nd = pop();
            if (cutoff_prune(nd.bound)) {
                pruned_min_ = std::min(pruned_min_, nd.bound);
                continue;
            }

            ++res.nodes;
            LpSolution rel = solve_node(nd);
            if (opts_.collect_node_log) log_node(res, nd, elapsed());

            if (nd.id == 0 && rel.status == LpStatus::unbounded) {
                root_unbounded = true;
                break;
            }
            if (nd.id == 0 && rel.status == LpStatus::infeasible) {
                root_infeasible = true;
                break;
            }
            if (rel.status != LpStatus::optimal) continue;  // fathomed

            double obj = rel.objective + red_.objective_offset;
            double node_bound = std::max(obj, nd.bound);
            pc_.record(nd, obj);
            if (cutoff_prune(node_bound)) {
                pruned_min_ = std::min(pruned_min_, node_bound);
                continue;
            }

            int frac_var = pick_branching(rel.x);
            if (frac_var < 0) {
                offer_incumbent(rel.x, obj);
                continue;
            }

            if (opts_.rounding_heuristic && (nd.id == 0 || res.nodes % 128 == 0))
                rounding_heuristic(nd, rel);

            double frac = rel.x[frac_var] - std::floor(rel.x[frac_var]);
            Node up, down;
            up.id = next_id_++;
            down.id = next_id_++;
            up.depth = down.depth = nd.depth + 1;
            up.bound = down.bound = node_bound;
            up.changes = nd.changes;
            down.changes = std::move(nd.changes);
            up.changes.push_back({frac_var, 1.0, red_.vars[frac_var].ub});
            down.changes.push_back({frac_var, red_.vars[frac_var].lb, 0.0});
            up.basis = rel.basis;
            down.basis = std::move(rel.basis);
            up.branch_var = down.branch_var = frac_var;
            up.branch_dir = 1;
            down.branch_dir = -1;
            up.branch_frac = down.branch_frac = frac;
            if (opts_.node_selection == NodeSelection::depth_first && frac > 0.5) {
                push(std::move(down));
                push(std::move(up));
            } else {
                push(std::move(up));
                push(std::move(down));
            }
        }
        res.wall_time_sec = elapsed();

        if (root_unbounded) {
            res.status = MilpStatus::unbounded;
            res.bound = -kInf;
            return res;
        }
        if (root_infeasible) {
            res.status = MilpStatus::infeasible;
            return res;
        }

        // The proven lower bound covers every subtree not explored to the end:
        // still-open nodes and nodes fathomed by the incumbent cutoff.
        double lower = std::min(open_min_bound(), pruned_min_);
        if (incumbent_obj_ < kInf) {
            res.x = pre_.restore(incumbent_);
            res.objective = incumbent_obj_;
            res.bound = std::min(incumbent_obj_, lower);
            res.gap_abs = std::max(0.0, res.objective - res.bound);
            res.gap_rel = res.gap_abs / std::max(1e-9, std::abs(res.objective));
            bool within = res.gap_abs <= opts_.opt_ca || res.gap_rel <= opts_.opt_cr;
            res.status =
                within ? MilpStatus::optimal_within_gap : MilpStatus::feasible;
            if (!within && !limit_hit) {
                // Exhausted tree must close the gap; anything else is a logic
                // error we refuse to mask.
                res.status = MilpStatus::feasible;
            }
        } else {
            res.bound = lower == kInf ? -kInf : lower;
            res.status = limit_hit ? MilpStatus::limit_reached : MilpStatus::infeasible;
        }
        return res;
    }

  private:
    static PresolveResult passthrough(const MilpModel& m) {
        PresolveResult r;
        r.reduced = m;
        r.col_map.resize(m.num_vars());
        r.fixed_value.assign(m.num_vars(), 0.0);
        for (int j = 0; j < m.num_vars(); ++j) r.col_map[j] = j;
        return r;
    }

    void push(Node&& nd) {
        if (opts_.node_selection == NodeSelection::best_bound)
            heap_.push(std::move(nd));
        else
            stack_.push_back(std::move(nd));
    }
    Node pop() {
        if (opts_.node_selection == NodeSelection::best_bound) {
            Node nd = heap_.top();
            heap_.pop();
            return nd;
        }
        Node nd = std::move(stack_.back());
        stack_.pop_back();
        return nd;
    }
    bool open_empty() const { return heap_.empty() && stack_.empty(); }
    double open_min_bound() const {
        double b = kInf;
        if (!heap_.empty()) b = heap_.top().bound;
        for (const auto& nd : stack_) b = std::min(b, nd.bound);
        return b;
    }

    bool cutoff_prune(double bound) const {
        if (incumbent_obj_ == kInf) return false;
        double slack = std::max(opts_.opt_ca, opts_.opt_cr * std::abs(incumbent_obj_));
        return bound >= incumbent_obj_ - std::max(slack, 1e-12 * std::abs(incumbent_obj_));
    }

    LpSolution solve_node(const Node& nd) {
        lp_->reset_bounds();
        for (const auto& ch : nd.changes) lp_->set_bounds(ch.col, ch.lb, ch.ub);
        if (!nd.basis.empty())
            lp_->set_basis(nd.basis);
        else
            lp_->reset_basis();
        return lp_->solve();
    }

    int pick_branching(const std::vector<double>& x) {
        int best = -1;
        double best_score = -kInf;
        bool use_pc = opts_.branching == BranchingRule::pseudo_cost;
        for (int j : binaries_) {
            double f = x[j] - std::floor(x[j]);
            double dist = std::min(f, 1.0 - f);
            if (dist <= opts_.int_tol) continue;
            double score = dist;
            if (use_pc) {
                double pcs = pc_.score(j, f);
                score = pcs >= 0 ? pcs : dist;
            }
            if (score > best_score + 1e-15) {
                best_score = score;
                best = j;
            }
        }
        return best;
    }

    void offer_incumbent(const std::vector<double>& x, double obj) {
        if (obj >= incumbent_obj_) return;
        std::vector<double> snapped = x;
        for (int j : binaries_) snapped[j] = std::round(snapped[j]);
        if (red_.max_violation(snapped) > 1e-6) return;  // never accept a bad point
        incumbent_ = std::move(snapped);
        incumbent_obj_ = red_.objective_value(incumbent_) + red_.objective_offset -
                         red_.objective_offset;
        incumbent_obj_ = red_.objective_value(incumbent_) + red_.objective_offset;
        (void)obj;
    }

    void rounding_heuristic(const Node& nd, const LpSolution& rel) {
        lp_->reset_bounds();
        for (const auto& ch : nd.changes) lp_->set_bounds(ch.col, ch.lb, ch.ub);
        for (int j : binaries_) {
            double r = std::round(rel.x[j]);
            double lo = std::max(red_.vars[j].lb, r), hi = std::min(red_.vars[j].ub, r);
            if (lo > hi) {
                lo = red_.vars[j].lb;
                hi = red_.vars[j].ub;
            }
            lp_->set_bounds(j, lo, hi);
        }
        lp_->set_basis(rel.basis);
        LpSolution fixed = lp_->solve();
        if (fixed.status == LpStatus::optimal)
            offer_incumbent(fixed.x, fixed.objective + red_.objective_offset);
    }

    void log_node(MilpResult& res, const Node& nd, double t) {
        std::ostringstream line;
        double lower = std::min(open_min_bound(), std::min(pruned_min_, nd.bound));
        double inc = incumbent_obj_ == kInf ? std::nan("") : incumbent_obj_;
        double gap = incumbent_obj_ == kInf
                         ? std::nan("")
                         : (incumbent_obj_ - lower) / std::max(1e-9, std::abs(incumbent_obj_));
        line << nd.id << "," << nd.depth << "," << (lower == -kInf ? std::nan("") : lower) << ","
             << inc << "," << gap << "," << t << "\n";
        res.node_log += line.str();
    }

    SolverOptions opts_;
    PresolveResult pre_;
    MilpModel red_;
    std::unique_ptr<BoundedSimplex> lp_;
    std::vector<int> binaries_;
    PseudoCost pc_;
    std::priority_queue<Node, std::vector<Node>, NodeOrder> heap_;
    std::vector<Node> stack_;
    std::vector<double> incumbent_;
    double incumbent_obj_ = kInf;
    double pruned_min_ = kInf;
    long next_id_ = 0;
};

}  // namespace

const char* to_string(MilpStatus s) {
    switch (s) {
        case MilpStatus::optimal_within_gap: return "optimal_within_gap";
        case MilpStatus::feasible: return "feasible";
        case MilpStatus::infeasible: return "infeasible";
        case MilpStatus::limit_reached: return "limit_reached";
        case MilpStatus::unbounded: return "unbounded";
    }
    return "?";
}

MilpResult solve_milp(const MilpModel& m, const SolverOptions& opts) {
    m.validate();
    Search search(m, opts);
    return search.run();
}

}  // namespace mgrid
