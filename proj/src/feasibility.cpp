#include "mgrid/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mgrid {

namespace {

enum Family : int {
    f_install_count,
    f_rp_linking,
    f_capacity_linking,
    f_commitment,
    f_bilinear_semantics,
    f_storage_power,
    f_charge_exclusivity,
    f_soc_bounds,
    f_soc_cyclicity,
    f_soc_dynamics,
    f_nonnegativity,
    f_balance,
    f_spinning_reserve,
    f_peak_penalty,
    f_emission_cap,
    f_import_cap,
    f_surplus_cap,
    f_installed_zero,
    kFamilyCount,
};

const char* kFamilyNames[kFamilyCount] = {
    "install_count",   "rp_linking",      "capacity_linking", "commitment",
    "bilinear_semantics", "storage_power", "charge_exclusivity", "soc_bounds",
    "soc_cyclicity",   "soc_dynamics",    "nonnegativity",    "balance",
    "spinning_reserve", "peak_penalty",   "emission_cap",     "import_cap",
    "surplus_cap",     "installed_zero",
};

struct Accum {
    double max_violation[kFamilyCount] = {};
    int count[kFamilyCount] = {};
    std::string worst[kFamilyCount];
    double tol;

    explicit Accum(double t) : tol(t) {}

    void hit(int fam, double v, const std::string& subject) {
        if (v > max_violation[fam] ||
            (v == max_violation[fam] && v > 0 && subject < worst[fam])) {
            max_violation[fam] = v;
            worst[fam] = subject;
        }
        if (v > tol) ++count[fam];
    }

    // Order-independent merge: keep the larger violation, break ties toward
    // the lexicographically smaller subject.
    void merge(const Accum& o) {
        for (int f = 0; f < kFamilyCount; ++f) {
            count[f] += o.count[f];
            if (o.max_violation[f] > max_violation[f] ||
                (o.max_violation[f] == max_violation[f] && o.max_violation[f] > 0 &&
                 o.worst[f] < worst[f]))
                worst[f] = o.worst[f];
            max_violation[f] = std::max(max_violation[f], o.max_violation[f]);
        }
    }
};

std::string at(const std::string& id, int k, int d, int t) {
    std::ostringstream s;
    s << id << "@(" << k + 1 << "," << d + 1 << "," << t + 1 << ")";
    return s.str();
}

const std::vector<double>* find_series(const std::map<std::string, std::vector<double>>& m,
                                       const std::string& id) {
    auto it = m.find(id);
    return it == m.end() ? nullptr : &it->second;
}

// Everything indexed by one (year, day) block; global families are checked by
// the caller once.
void check_day(const PlanSolution& sol, const Catalog& cat, const ScenarioSet& scen,
               const PlanningConfig& cfg, int k, int d, Accum& acc) {
    const int T = cfg.intervals;
    const double dt = cfg.dt_hours;

    for (std::size_t e = 0; e < cat.equipment.size(); ++e) {
        const auto& eq = cat.equipment[e];
        const auto& plan = sol.equipment[e];
        double rp = plan.rated_power_kw;
        if (eq.klass == EquipmentClass::generator) {
            const auto& p = sol.power.at(eq.id);
            const auto& kc = sol.commit.at(eq.id);
            for (int t = 0; t < T; ++t) {
                std::size_t idx = scen.index(k, d, t);
                std::string where = at(eq.id, k, d, t);
                acc.hit(f_commitment, p[idx] - eq.p_frac_max * rp, where);
                acc.hit(f_commitment,
                        eq.p_frac_min * (rp - (1.0 - kc[idx]) * eq.rp_max) - p[idx], where);
                acc.hit(f_commitment, p[idx] - eq.p_frac_max * eq.rp_max * kc[idx], where);
                acc.hit(f_commitment, -p[idx], where);
                // Disaggregation semantics: off means zero, on means inside
                // the fractional band of the installed rating.
                if (kc[idx] < 0.5) {
                    acc.hit(f_bilinear_semantics, std::abs(p[idx]), where);
                } else {
                    acc.hit(f_bilinear_semantics, eq.p_frac_min * rp - p[idx], where);
                    acc.hit(f_bilinear_semantics, p[idx] - eq.p_frac_max * rp, where);
                }
                if (!plan.installed) acc.hit(f_installed_zero, std::abs(p[idx]), where);
            }
        } else if (eq.is_storage()) {
            const auto& pch = sol.charge.at(eq.id);
            const auto& pdch = sol.discharge.at(eq.id);
            const auto& ks = sol.mode.at(eq.id);
            const auto& soc = sol.soc.at(eq.id);
            double soc0 = sol.soc_initial.at(eq.id)[k * scen.grid.days.size() + d];
            double b = plan.capacity;
            double big = eq.p_frac_max * eq.rp_max;
            std::string where0 = at(eq.id, k, d, 0);
            acc.hit(f_soc_bounds, eq.q_frac_min * b - soc0, where0);
            acc.hit(f_soc_bounds, soc0 - eq.q_frac_max * b, where0);
            double prev = soc0;
            for (int t = 0; t < T; ++t) {
                std::size_t idx = scen.index(k, d, t);
                std::string where = at(eq.id, k, d, t);
                acc.hit(f_storage_power, pch[idx] - eq.p_frac_max * rp, where);
                acc.hit(f_storage_power, pdch[idx] - eq.p_frac_max * rp, where);
                acc.hit(f_storage_power, -pch[idx], where);
                acc.hit(f_storage_power, -pdch[idx], where);
                acc.hit(f_charge_exclusivity, pch[idx] - big * ks[idx], where);
                acc.hit(f_charge_exclusivity, pdch[idx] - big * (1.0 - ks[idx]), where);
                acc.hit(f_soc_bounds, eq.q_frac_min * b - soc[idx], where);
                acc.hit(f_soc_bounds, soc[idx] - eq.q_frac_max * b, where);
                acc.hit(f_soc_dynamics,
                        std::abs(soc[idx] - prev - dt * (pch[idx] - pdch[idx])), where);
                prev = soc[idx];
                if (!plan.installed) {
                    acc.hit(f_installed_zero, std::abs(pch[idx]), where);
                    acc.hit(f_installed_zero, std::abs(pdch[idx]), where);
                    acc.hit(f_installed_zero, std::abs(soc[idx]), where);
                }
            }
            acc.hit(f_soc_cyclicity, std::abs(prev - soc0), at(eq.id, k, d, T - 1));
        }
    }

    const double delta = cfg.peak_penalty_delta;
    for (std::size_t n = 0; n < cat.resources.size(); ++n) {
        const Resource& res = cat.resources[n];
        const auto& u = sol.import_in.at(res.id);
        const auto& yx = sol.surplus.at(res.id);
        double sp = sol.spin.at(res.id)[k];
        double peak_dem = 0.0;
        for (int t = 0; t < T; ++t)
            peak_dem = std::max(peak_dem, scen.demand_at(res.id, scen.index(k, d, t)));
        double import_cap = cfg.import_cap_for(res);
        double import_ub = res.purchasable
                               ? (std::isfinite(import_cap) ? import_cap * dt : kUnbounded)
                               : 0.0;
        double frac = cfg.surplus_fraction_for(res);

        for (int t = 0; t < T; ++t) {
            std::size_t idx = scen.index(k, d, t);
            std::string where = at(res.id, k, d, t);
            acc.hit(f_nonnegativity, -u[idx], where);
            acc.hit(f_nonnegativity, -yx[idx], where);
            if (std::isfinite(import_ub)) acc.hit(f_import_cap, u[idx] - import_ub, where);
            if (std::isfinite(frac)) acc.hit(f_surplus_cap, yx[idx] - frac * peak_dem, where);

            // Balance, recomputed from the catalog rates and scenario data.
            double lhs = u[idx];
            double rhs = sp + yx[idx] + scen.demand_at(res.id, idx);
            for (std::size_t e = 0; e < cat.equipment.size(); ++e) {
                const auto& eq = cat.equipment[e];
                double g = eq.gen_rate(res.id), c = eq.cons_rate(res.id);
                if (g == 0.0 && c == 0.0) continue;
                switch (eq.klass) {
                    case EquipmentClass::generator: {
                        double p = sol.power.at(eq.id)[idx];
                        lhs += g * p;
                        rhs += c * p;
                        break;
                    }
                    case EquipmentClass::storage:
                        lhs += g * sol.discharge.at(eq.id)[idx];
                        rhs += c * sol.charge.at(eq.id)[idx];
                        break;
                    case EquipmentClass::renewable: {
                        double pbar = scen.pbar.at(eq.id)[idx];
                        double flow = pbar * sol.equipment[e].rated_power_kw;
                        lhs += g * flow;
                        rhs += c * flow;
                        break;
                    }
                }
            }
            acc.hit(f_balance, std::abs(lhs - rhs), where);
        }
    }

    if (delta > 0) {
        for (std::size_t e = 0; e < cat.equipment.size(); ++e) {
            const auto& eq = cat.equipment[e];
            if (eq.klass != EquipmentClass::generator) continue;
            double g_el = eq.gen_rate(cfg.elect_resource);
            if (g_el <= 0) continue;
            const auto& p = sol.power.at(eq.id);
            for (int t = 0; t < T; ++t)
                acc.hit(f_peak_penalty, delta * g_el * p[scen.index(k, d, t)] - sol.peak_xi,
                        at(eq.id, k, d, t));
        }
    }

    if (std::isfinite(cfg.lco2_per_day)) {
        const auto* yx = find_series(sol.surplus, cfg.co2_resource);
        if (yx) {
            double total = 0.0;
            for (int t = 0; t < T; ++t) total += (*yx)[scen.index(k, d, t)];
            acc.hit(f_emission_cap, total - cfg.lco2_per_day, at(cfg.co2_resource, k, d, 0));
        }
    }
}

FeasibilityReport run_check(const PlanSolution& sol, const Catalog& cat, const ScenarioSet& scen,
                            const PlanningConfig& cfg0, double tol, bool parallel) {
    PlanningConfig cfg = cfg0;
    cfg.adopt_grid(scen.grid);
    cfg.check();
    const int K = cfg.years, D = static_cast<int>(cfg.days.size());

    Accum acc(tol);

    // Global families.
    int installed = 0;
    for (std::size_t e = 0; e < cat.equipment.size(); ++e) {
        const auto& eq = cat.equipment[e];
        const auto& plan = sol.equipment[e];
        double a = plan.installed ? 1.0 : 0.0;
        installed += plan.installed;
        acc.hit(f_rp_linking, plan.rated_power_kw - eq.rp_max * a, eq.id);
        acc.hit(f_rp_linking, eq.rp_min * a - plan.rated_power_kw, eq.id);
        if (eq.is_storage()) {
            acc.hit(f_capacity_linking, plan.capacity - eq.b_max * a, eq.id);
            acc.hit(f_capacity_linking, eq.b_min * a - plan.capacity, eq.id);
        }
        if (!plan.installed) {
            acc.hit(f_installed_zero, std::abs(plan.rated_power_kw), eq.id);
            acc.hit(f_installed_zero, std::abs(plan.capacity), eq.id);
        }
    }
    acc.hit(f_install_count, static_cast<double>(installed - cfg.max_installed), "pool");

    for (std::size_t n = 0; n < cat.resources.size(); ++n) {
        const Resource& res = cat.resources[n];
        double rho = cfg.reserve_for(res.id);
        for (int k = 0; k < K; ++k) {
            double peak = 0.0;
            for (int d = 0; d < D; ++d)
                for (int t = 0; t < cfg.intervals; ++t)
                    peak = std::max(peak, scen.demand_at(res.id, scen.index(k, d, t)));
            acc.hit(f_spinning_reserve, std::abs(sol.spin.at(res.id)[k] - rho * peak),
                    res.id + "@" + std::to_string(k + 1));
        }
    }

    const int blocks = K * D;
    if (parallel) {
#pragma omp parallel
        {
            Accum local(tol);
#pragma omp for schedule(static)
            for (int kd = 0; kd < blocks; ++kd)
                check_day(sol, cat, scen, cfg, kd / D, kd % D, local);
#pragma omp critical(mgrid_feas_merge)
            acc.merge(local);
        }
    } else {
        for (int kd = 0; kd < blocks; ++kd) check_day(sol, cat, scen, cfg, kd / D, kd % D, acc);
    }

    FeasibilityReport rep;
    rep.tolerance = tol;
    for (int f = 0; f < kFamilyCount; ++f) {
        FamilyCheck fc;
        fc.family = kFamilyNames[f];
        fc.max_violation = std::max(0.0, acc.max_violation[f]);
        fc.violations = acc.count[f];
        fc.worst = acc.worst[f];
        rep.families.push_back(std::move(fc));
    }
    return rep;
}

}  // namespace

bool FeasibilityReport::ok() const {
    for (const auto& f : families)
        if (f.max_violation > tolerance) return false;
    return true;
}

double FeasibilityReport::worst() const {
    double w = 0.0;
    for (const auto& f : families) w = std::max(w, f.max_violation);
    return w;
}

const FamilyCheck* FeasibilityReport::family(const std::string& name) const {
    for (const auto& f : families)
        if (f.family == name) return &f;
    return nullptr;
}

std::string FeasibilityReport::to_string() const {
    std::ostringstream out;
    for (const auto& f : families) {
        out << f.family << ": max " << f.max_violation << " (" << f.violations
            << " above tol)";
        if (f.violations > 0) out << " worst at " << f.worst;
        out << "\n";
    }
    return out.str();
}

FeasibilityReport check_feasibility(const PlanSolution& sol, const Catalog& cat,
                                    const ScenarioSet& scen, const PlanningConfig& cfg,
                                    double tol) {
    return run_check(sol, cat, scen, cfg, tol, true);
}

FeasibilityReport check_feasibility_serial(const PlanSolution& sol, const Catalog& cat,
                                           const ScenarioSet& scen, const PlanningConfig& cfg,
                                           double tol) {
    return run_check(sol, cat, scen, cfg, tol, false);
}

}  // namespace mgrid
