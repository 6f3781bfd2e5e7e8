#include "mgrid/presolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mgrid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-9;

struct Work {
    std::vector<double> lb, ub;
    std::vector<bool> is_bin;
    bool changed = false;
    bool infeasible = false;
    std::string note;

    void tighten_lb(int j, double v, const std::string& who) {
        if (v > lb[j] + kTol) {
            lb[j] = v;
            changed = true;
            if (lb[j] > ub[j] + 1e-7) {
                infeasible = true;
                note = "conflicting bounds on column " + who;
            }
        }
    }
    void tighten_ub(int j, double v, const std::string& who) {
        if (v < ub[j] - kTol) {
            ub[j] = v;
            changed = true;
            if (lb[j] > ub[j] + 1e-7) {
                infeasible = true;
                note = "conflicting bounds on column " + who;
            }
        }
    }
};

// One tightening sweep over a row in <= orientation (terms, rhs).
void tighten_row(const MilpModel& m, Work& w,
                 const std::vector<std::pair<int, double>>& terms, double rhs) {
    // Minimum activity and whether it is finite without each term.
    double min_act = 0.0;
    int inf_count = 0;
    int inf_col = -1;
    for (const auto& [j, a] : terms) {
        double contrib = a > 0 ? a * w.lb[j] : a * w.ub[j];
        if (std::isinf(contrib)) {
            ++inf_count;
            inf_col = j;
        } else {
            min_act += contrib;
        }
    }
    if (inf_count > 1) return;
    for (const auto& [j, a] : terms) {
        double contrib = a > 0 ? a * w.lb[j] : a * w.ub[j];
        double rest;
        if (inf_count == 0) {
            rest = min_act - contrib;
        } else if (inf_col == j) {
            rest = min_act;
        } else {
            continue;
        }
        double limit = (rhs - rest) / a;
        if (a > 0)
            w.tighten_ub(j, limit, m.vars[j].name);
        else
            w.tighten_lb(j, limit, m.vars[j].name);
        if (w.infeasible) return;
    }
}

double max_activity(const Work& w, const std::vector<std::pair<int, double>>& terms) {
    double act = 0.0;
    for (const auto& [j, a] : terms) {
        double contrib = a > 0 ? a * w.ub[j] : a * w.lb[j];
        if (std::isinf(contrib)) return kInf;
        act += contrib;
    }
    return act;
}

double min_activity(const Work& w, const std::vector<std::pair<int, double>>& terms) {
    double act = 0.0;
    for (const auto& [j, a] : terms) {
        double contrib = a > 0 ? a * w.lb[j] : a * w.ub[j];
        if (std::isinf(contrib)) return -kInf;
        act += contrib;
    }
    return act;
}

}  // namespace

std::vector<double> PresolveResult::restore(const std::vector<double>& x_reduced) const {
    std::vector<double> full(col_map.size(), 0.0);
    for (std::size_t j = 0; j < col_map.size(); ++j)
        full[j] = col_map[j] < 0 ? fixed_value[j] : x_reduced[col_map[j]];
    return full;
}

PresolveResult presolve(const MilpModel& m) {
    const int n = m.num_vars();
    Work w;
    w.lb.resize(n);
    w.ub.resize(n);
    w.is_bin.resize(n);
    for (int j = 0; j < n; ++j) {
        w.lb[j] = m.vars[j].lb;
        w.ub[j] = m.vars[j].ub;
        w.is_bin[j] = m.vars[j].type == VarType::binary;
    }

    PresolveResult out;
    for (int pass = 0; pass < 4 && !w.infeasible; ++pass) {
        w.changed = false;
        for (const auto& r : m.rows) {
            if (r.sense == RowSense::le || r.sense == RowSense::eq)
                tighten_row(m, w, r.terms, r.rhs);
            if (w.infeasible) break;
            if (r.sense == RowSense::ge || r.sense == RowSense::eq) {
                std::vector<std::pair<int, double>> neg;
                neg.reserve(r.terms.size());
                for (const auto& [j, a] : r.terms) neg.emplace_back(j, -a);
                tighten_row(m, w, neg, -r.rhs);
            }
            if (w.infeasible) break;
        }
        for (int j = 0; j < n && !w.infeasible; ++j) {
            if (!w.is_bin[j]) continue;
            double lo = std::ceil(w.lb[j] - 1e-6), hi = std::floor(w.ub[j] + 1e-6);
            w.tighten_lb(j, lo, m.vars[j].name);
            w.tighten_ub(j, hi, m.vars[j].name);
        }
        if (!w.changed) break;
    }
    if (w.infeasible) {
        out.infeasible = true;
        out.note = w.note;
        out.col_map.assign(n, -1);
        out.fixed_value.assign(n, 0.0);
        return out;
    }

    // Snap near-fixed columns.
    std::vector<bool> fixed(n, false);
    std::vector<double> fixval(n, 0.0);
    for (int j = 0; j < n; ++j) {
        if (w.ub[j] - w.lb[j] <= kTol) {
            fixed[j] = true;
            fixval[j] = 0.5 * (w.lb[j] + w.ub[j]);
            if (w.is_bin[j]) fixval[j] = std::round(fixval[j]);
        }
    }

    // Keep rows that still constrain something after substitution.
    std::vector<char> keep_row(m.rows.size(), 1);
    std::vector<int> touch(n, 0);
    for (std::size_t ri = 0; ri < m.rows.size(); ++ri) {
        const Row& r = m.rows[ri];
        std::vector<std::pair<int, double>> live;
        double rhs = r.rhs;
        for (const auto& [j, a] : r.terms) {
            if (fixed[j])
                rhs -= a * fixval[j];
            else
                live.emplace_back(j, a);
        }
        if (live.empty()) {
            bool ok = true;
            switch (r.sense) {
                case RowSense::le: ok = rhs >= -1e-7; break;
                case RowSense::ge: ok = rhs <= 1e-7; break;
                case RowSense::eq: ok = std::abs(rhs) <= 1e-7; break;
            }
            if (!ok) {
                out.infeasible = true;
                out.note = "row " + r.name + " became inconsistent after substitution";
                out.col_map.assign(n, -1);
                out.fixed_value = fixval;
                return out;
            }
            keep_row[ri] = 0;
            continue;
        }
        // Redundancy by activity bounds.
        if (r.sense == RowSense::le && max_activity(w, live) <= rhs + 1e-9) keep_row[ri] = 0;
        if (r.sense == RowSense::ge && min_activity(w, live) >= rhs - 1e-9) keep_row[ri] = 0;
        if (keep_row[ri])
            for (const auto& [j, a] : live) {
                (void)a;
                ++touch[j];
            }
    }

    // Columns no row touches: fix at the cheaper finite bound.
    std::vector<double> obj(n, 0.0);
    for (const auto& [j, coef] : m.objective) obj[j] += coef;
    for (int j = 0; j < n; ++j) {
        if (fixed[j] || touch[j] > 0) continue;
        double pick;
        if (obj[j] > 0)
            pick = w.lb[j];
        else if (obj[j] < 0)
            pick = w.ub[j];
        else
            pick = std::isfinite(w.lb[j]) ? w.lb[j] : (std::isfinite(w.ub[j]) ? w.ub[j] : 0.0);
        if (!std::isfinite(pick)) continue;  // leave for the solver to certify unbounded
        fixed[j] = true;
        fixval[j] = pick;
    }

    MilpModel red;
    out.col_map.assign(n, -1);
    out.fixed_value = fixval;
    red.objective_offset = m.objective_offset;
    for (int j = 0; j < n; ++j) {
        if (fixed[j]) {
            red.objective_offset += obj[j] * fixval[j];
            continue;
        }
        out.col_map[j] = red.add_var(m.vars[j].name, w.lb[j], w.ub[j], m.vars[j].type);
        if (obj[j] != 0.0) red.set_objective(out.col_map[j], obj[j]);
    }
    for (std::size_t ri = 0; ri < m.rows.size(); ++ri) {
        if (!keep_row[ri]) continue;
        const Row& r = m.rows[ri];
        std::vector<std::pair<int, double>> terms;
        double rhs = r.rhs;
        for (const auto& [j, a] : r.terms) {
            if (fixed[j])
                rhs -= a * fixval[j];
            else
                terms.emplace_back(out.col_map[j], a);
        }
        red.add_row(r.name, r.sense, rhs, std::move(terms));
    }
    // Index map entries for surviving columns.
    for (const auto& [key, col] : m.index)
        if (out.col_map[col] >= 0) red.index.emplace(key, out.col_map[col]);

    out.reduced = std::move(red);
    return out;
}

}  // namespace mgrid
