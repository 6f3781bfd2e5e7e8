#include "mgrid/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mgrid {

namespace {

std::string tag(const std::string& base, const std::string& id) {
    return base + "[" + id + "]";
}

std::string tag(const std::string& base, const std::string& id, int k, int d) {
    std::ostringstream s;
    s << base << "[" << id << "," << k + 1 << "," << d + 1 << "]";
    return s.str();
}

std::string tag(const std::string& base, const std::string& id, int k, int d, int t) {
    std::ostringstream s;
    s << base << "[" << id << "," << k + 1 << "," << d + 1 << "," << t + 1 << "]";
    return s.str();
}

}  // namespace

MilpModel build_model(const Catalog& cat, const ScenarioSet& scen, const PlanningConfig& cfg0) {
    PlanningConfig cfg = cfg0;
    cfg.adopt_grid(scen.grid);
    cfg.check();

    const GridSpec& grid = scen.grid;
    const int K = cfg.years, D = static_cast<int>(cfg.days.size()), T = cfg.intervals;
    const double dt = cfg.dt_hours;
    if (grid.years != K || static_cast<int>(grid.days.size()) != D || grid.intervals != T ||
        std::abs(grid.dt_hours - dt) > 1e-12)
        throw UsageError("build_model: scenario grid does not match the planning config");
    for (int d = 0; d < D; ++d) {
        if (std::abs(grid.days[d].weight - cfg.days[d].weight) > 1e-9 ||
            grid.days[d].day_of_year != cfg.days[d].day_of_year)
            throw UsageError("build_model: representative days differ between scenario and config");
    }
    {
        ValidationReport rep = validate_catalog(cat);
        if (!rep.ok()) throw UsageError("build_model: invalid catalog:\n" + rep.to_string());
    }
    for (const auto& eq : cat.equipment) {
        if (eq.klass == EquipmentClass::renewable && !scen.pbar.count(eq.id))
            throw UsageError("build_model: renewable unit '" + eq.id +
                             "' has no operating-coefficient series in the scenario");
    }

    const int nEq = static_cast<int>(cat.equipment.size());
    const int nRes = static_cast<int>(cat.resources.size());

    // Escalation factors (1+inf)^(k-1) with 1-based years.
    std::vector<double> esc(K);
    for (int k = 0; k < K; ++k) esc[k] = std::pow(1.0 + cfg.inflation, k);

    // Peak demand per (resource, year) for the spinning reserve, and per
    // (resource, year, day) for the surplus cap.
    std::vector<std::vector<double>> peak_demand_year(nRes, std::vector<double>(K, 0.0));
    std::vector<std::vector<double>> peak_demand_day(nRes, std::vector<double>(K * D, 0.0));
    for (int n = 0; n < nRes; ++n) {
        const std::string& res = cat.resources[n].id;
        for (int k = 0; k < K; ++k)
            for (int d = 0; d < D; ++d)
                for (int t = 0; t < T; ++t) {
                    double dem = scen.demand_at(res, scen.index(k, d, t));
                    peak_demand_year[n][k] = std::max(peak_demand_year[n][k], dem);
                    peak_demand_day[n][k * D + d] = std::max(peak_demand_day[n][k * D + d], dem);
                }
    }

    MilpModel m;

    // --- variables -----------------------------------------------------

    std::vector<int> v_a(nEq), v_rp(nEq), v_b(nEq, -1);
    for (int i = 0; i < nEq; ++i) {
        const auto& eq = cat.equipment[i];
        v_a[i] = m.add_var({VarKind::install, i}, tag("a", eq.id), 0, 1, VarType::binary);
    }
    for (int i = 0; i < nEq; ++i) {
        const auto& eq = cat.equipment[i];
        v_rp[i] = m.add_var({VarKind::rated_power, i}, tag("rp", eq.id), 0, eq.rp_max,
                            VarType::continuous);
    }
    for (int i = 0; i < nEq; ++i) {
        const auto& eq = cat.equipment[i];
        if (eq.is_storage())
            v_b[i] = m.add_var({VarKind::capacity, i}, tag("b", eq.id), 0, eq.b_max,
                               VarType::continuous);
    }

    auto grid_size = static_cast<std::size_t>(K) * D * T;
    auto flat = [&](int k, int d, int t) { return (static_cast<std::size_t>(k) * D + d) * T + t; };

    std::vector<std::vector<int>> v_p(nEq), v_kc(nEq), v_pch(nEq), v_pdch(nEq), v_ks(nEq),
        v_soc(nEq), v_soc0(nEq);
    for (int i = 0; i < nEq; ++i) {
        const auto& eq = cat.equipment[i];
        if (eq.klass == EquipmentClass::generator) {
            v_p[i].resize(grid_size);
            v_kc[i].resize(grid_size);
            for (int k = 0; k < K; ++k)
                for (int d = 0; d < D; ++d)
                    for (int t = 0; t < T; ++t) {
                        v_p[i][flat(k, d, t)] =
                            m.add_var({VarKind::power, i, k, d, t}, tag("p", eq.id, k, d, t), 0,
                                      eq.p_frac_max * eq.rp_max, VarType::continuous);
                        v_kc[i][flat(k, d, t)] =
                            m.add_var({VarKind::commit, i, k, d, t}, tag("kc", eq.id, k, d, t), 0,
                                      1, VarType::binary);
                    }
        } else if (eq.is_storage()) {
            v_pch[i].resize(grid_size);
            v_pdch[i].resize(grid_size);
            v_ks[i].resize(grid_size);
            v_soc[i].resize(grid_size);
            v_soc0[i].resize(static_cast<std::size_t>(K) * D);
            double p_cap = eq.p_frac_max * eq.rp_max;
            double q_cap = eq.q_frac_max * eq.b_max;
            for (int k = 0; k < K; ++k)
                for (int d = 0; d < D; ++d) {
                    v_soc0[i][k * D + d] = m.add_var({VarKind::soc0, i, k, d},
                                                     tag("soc0", eq.id, k, d), 0, q_cap,
                                                     VarType::continuous);
                    for (int t = 0; t < T; ++t) {
                        v_pch[i][flat(k, d, t)] =
                            m.add_var({VarKind::charge, i, k, d, t}, tag("pch", eq.id, k, d, t),
                                      0, p_cap, VarType::continuous);
                        v_pdch[i][flat(k, d, t)] =
                            m.add_var({VarKind::discharge, i, k, d, t},
                                      tag("pdch", eq.id, k, d, t), 0, p_cap, VarType::continuous);
                        v_ks[i][flat(k, d, t)] =
                            m.add_var({VarKind::storage_mode, i, k, d, t},
                                      tag("ks", eq.id, k, d, t), 0, 1, VarType::binary);
                        v_soc[i][flat(k, d, t)] =
                            m.add_var({VarKind::soc, i, k, d, t}, tag("soc", eq.id, k, d, t), 0,
                                      q_cap, VarType::continuous);
                    }
                }
        }
    }

    std::vector<std::vector<int>> v_u(nRes), v_yx(nRes);
    std::vector<std::vector<int>> v_sp(nRes);
    for (int n = 0; n < nRes; ++n) {
        const Resource& res = cat.resources[n];
        v_u[n].resize(grid_size);
        v_yx[n].resize(grid_size);
        double cap = cfg.import_cap_for(res);
        double import_ub = res.purchasable ? (std::isfinite(cap) ? cap * dt : kUnbounded) : 0.0;
        double frac = cfg.surplus_fraction_for(res);
        for (int k = 0; k < K; ++k)
            for (int d = 0; d < D; ++d) {
                double surplus_ub =
                    std::isfinite(frac) ? frac * peak_demand_day[n][k * D + d] : kUnbounded;
                for (int t = 0; t < T; ++t) {
                    v_u[n][flat(k, d, t)] =
                        m.add_var({VarKind::import_in, n, k, d, t}, tag("u", res.id, k, d, t), 0,
                                  import_ub, VarType::continuous);
                    v_yx[n][flat(k, d, t)] =
                        m.add_var({VarKind::surplus, n, k, d, t}, tag("yx", res.id, k, d, t), 0,
                                  surplus_ub, VarType::continuous);
                }
            }
    }
    for (int n = 0; n < nRes; ++n) {
        const Resource& res = cat.resources[n];
        v_sp[n].resize(K);
        double rho = cfg.reserve_for(res.id);
        for (int k = 0; k < K; ++k) {
            double sp = rho * peak_demand_year[n][k];
            v_sp[n][k] = m.add_var({VarKind::spin, n, k}, tag("sp", res.id, k, 0), sp, sp,
                                   VarType::continuous);
        }
    }
    int v_xi = m.add_var({VarKind::peak}, "xi", 0, kUnbounded, VarType::continuous);

    // --- constraints ----------------------------------------------------

    {
        std::vector<std::pair<int, double>> terms;
        for (int i = 0; i < nEq; ++i) terms.emplace_back(v_a[i], 1.0);
        m.add_row("install_count", RowSense::le, cfg.max_installed, std::move(terms));
    }
    for (int i = 0; i < nEq; ++i) {
        const auto& eq = cat.equipment[i];
        m.add_row(tag("rp_link_ub", eq.id), RowSense::le, 0,
                  {{v_rp[i], 1.0}, {v_a[i], -eq.rp_max}});
        m.add_row(tag("rp_link_lb", eq.id), RowSense::ge, 0,
                  {{v_rp[i], 1.0}, {v_a[i], -eq.rp_min}});
        if (eq.is_storage()) {
            m.add_row(tag("b_link_ub", eq.id), RowSense::le, 0,
                      {{v_b[i], 1.0}, {v_a[i], -eq.b_max}});
            m.add_row(tag("b_link_lb", eq.id), RowSense::ge, 0,
                      {{v_b[i], 1.0}, {v_a[i], -eq.b_min}});
        }
    }

    for (int i = 0; i < nEq; ++i) {
        const auto& eq = cat.equipment[i];
        if (eq.klass != EquipmentClass::generator) continue;
        for (int k = 0; k < K; ++k)
            for (int d = 0; d < D; ++d)
                for (int t = 0; t < T; ++t) {
                    int p = v_p[i][flat(k, d, t)], kc = v_kc[i][flat(k, d, t)];
                    m.add_row(tag("commit_ub", eq.id, k, d, t), RowSense::le, 0,
                              {{p, 1.0}, {v_rp[i], -eq.p_frac_max}});
                    if (eq.p_frac_min > 0) {
                        // p >= p_min*(rp - (1-kc)*rp_max)
                        m.add_row(tag("commit_lb", eq.id, k, d, t), RowSense::ge,
                                  -eq.p_frac_min * eq.rp_max,
                                  {{p, 1.0},
                                   {v_rp[i], -eq.p_frac_min},
                                   {kc, -eq.p_frac_min * eq.rp_max}});
                    }
                    m.add_row(tag("commit_cap", eq.id, k, d, t), RowSense::le, 0,
                              {{p, 1.0}, {kc, -eq.p_frac_max * eq.rp_max}});
                }
    }

    for (int i = 0; i < nEq; ++i) {
        const auto& eq = cat.equipment[i];
        if (!eq.is_storage()) continue;
        double big = eq.p_frac_max * eq.rp_max;
        for (int k = 0; k < K; ++k)
            for (int d = 0; d < D; ++d) {
                for (int t = 0; t < T; ++t) {
                    int pch = v_pch[i][flat(k, d, t)], pdch = v_pdch[i][flat(k, d, t)];
                    int ks = v_ks[i][flat(k, d, t)], soc = v_soc[i][flat(k, d, t)];
                    m.add_row(tag("sto_ch_ub", eq.id, k, d, t), RowSense::le, 0,
                              {{pch, 1.0}, {v_rp[i], -eq.p_frac_max}});
                    m.add_row(tag("sto_dch_ub", eq.id, k, d, t), RowSense::le, 0,
                              {{pdch, 1.0}, {v_rp[i], -eq.p_frac_max}});
                    m.add_row(tag("sto_ch_mode", eq.id, k, d, t), RowSense::le, 0,
                              {{pch, 1.0}, {ks, -big}});
                    m.add_row(tag("sto_dch_mode", eq.id, k, d, t), RowSense::le, big,
                              {{pdch, 1.0}, {ks, big}});
                    m.add_row(tag("soc_lb", eq.id, k, d, t), RowSense::ge, 0,
                              {{soc, 1.0}, {v_b[i], -eq.q_frac_min}});
                    m.add_row(tag("soc_ub", eq.id, k, d, t), RowSense::le, 0,
                              {{soc, 1.0}, {v_b[i], -eq.q_frac_max}});
                    int prev = t == 0 ? v_soc0[i][k * D + d] : v_soc[i][flat(k, d, t - 1)];
                    m.add_row(tag("soc_dyn", eq.id, k, d, t), RowSense::eq, 0,
                              {{soc, 1.0}, {prev, -1.0}, {pch, -dt}, {pdch, dt}});
                }
                int soc0 = v_soc0[i][k * D + d];
                m.add_row(tag("soc0_lb", eq.id, k, d), RowSense::ge, 0,
                          {{soc0, 1.0}, {v_b[i], -eq.q_frac_min}});
                m.add_row(tag("soc0_ub", eq.id, k, d), RowSense::le, 0,
                          {{soc0, 1.0}, {v_b[i], -eq.q_frac_max}});
                m.add_row(tag("soc_cyc", eq.id, k, d), RowSense::eq, 0,
                          {{v_soc[i][flat(k, d, T - 1)], 1.0}, {soc0, -1.0}});
            }
    }

    // Per-resource balance (generation + input = consumption + spin + surplus
    // + demand), with renewable output entering through rp.
    for (int k = 0; k < K; ++k)
        for (int d = 0; d < D; ++d)
            for (int t = 0; t < T; ++t) {
                std::size_t idx = scen.index(k, d, t);
                std::vector<std::vector<std::pair<int, double>>> terms(nRes);
                for (int n = 0; n < nRes; ++n) {
                    terms[n].emplace_back(v_u[n][flat(k, d, t)], 1.0);
                    terms[n].emplace_back(v_yx[n][flat(k, d, t)], -1.0);
                    terms[n].emplace_back(v_sp[n][k], -1.0);
                }
                for (int i = 0; i < nEq; ++i) {
                    const auto& eq = cat.equipment[i];
                    for (int n = 0; n < nRes; ++n) {
                        const std::string& res = cat.resources[n].id;
                        double g = eq.gen_rate(res), c = eq.cons_rate(res);
                        if (g == 0.0 && c == 0.0) continue;
                        switch (eq.klass) {
                            case EquipmentClass::generator:
                                terms[n].emplace_back(v_p[i][flat(k, d, t)], g - c);
                                break;
                            case EquipmentClass::storage:
                                if (g != 0.0)
                                    terms[n].emplace_back(v_pdch[i][flat(k, d, t)], g);
                                if (c != 0.0)
                                    terms[n].emplace_back(v_pch[i][flat(k, d, t)], -c);
                                break;
                            case EquipmentClass::renewable: {
                                double pbar = scen.pbar.at(eq.id)[idx];
                                if (pbar != 0.0)
                                    terms[n].emplace_back(v_rp[i], (g - c) * pbar);
                                break;
                            }
                        }
                    }
                }
                for (int n = 0; n < nRes; ++n) {
                    m.add_row(tag("balance", cat.resources[n].id, k, d, t), RowSense::eq,
                              scen.demand_at(cat.resources[n].id, idx), std::move(terms[n]));
                }
            }

    // Peak penalty: xi bounds each generator's electricity output.
    if (cfg.peak_penalty_delta > 0) {
        for (int i = 0; i < nEq; ++i) {
            const auto& eq = cat.equipment[i];
            if (eq.klass != EquipmentClass::generator) continue;
            double g_el = eq.gen_rate(cfg.elect_resource);
            if (g_el <= 0) continue;
            for (int k = 0; k < K; ++k)
                for (int d = 0; d < D; ++d)
                    for (int t = 0; t < T; ++t)
                        m.add_row(tag("peak", eq.id, k, d, t), RowSense::ge, 0,
                                  {{v_xi, 1.0},
                                   {v_p[i][flat(k, d, t)], -cfg.peak_penalty_delta * g_el}});
        }
    }

    if (std::isfinite(cfg.lco2_per_day)) {
        int n_co2 = -1;
        for (int n = 0; n < nRes; ++n)
            if (cat.resources[n].id == cfg.co2_resource) n_co2 = n;
        if (n_co2 >= 0) {
            for (int k = 0; k < K; ++k)
                for (int d = 0; d < D; ++d) {
                    std::vector<std::pair<int, double>> terms;
                    for (int t = 0; t < T; ++t)
                        terms.emplace_back(v_yx[n_co2][flat(k, d, t)], 1.0);
                    m.add_row(tag("emission_cap", cfg.co2_resource, k, d), RowSense::le,
                              cfg.lco2_per_day, std::move(terms));
                }
        }
    }

    // --- objective (net present cost) ------------------------------------

    double esc_sum = 0.0;
    for (int k = 0; k < K; ++k) esc_sum += esc[k];
    for (int i = 0; i < nEq; ++i) {
        const auto& eq = cat.equipment[i];
        m.set_objective(v_a[i], eq.gamma0 + esc_sum * eq.gamma_k);
        m.set_objective(v_rp[i], eq.alpha0 + esc_sum * eq.alpha_k);
        if (eq.is_storage()) m.set_objective(v_b[i], eq.beta0 + esc_sum * eq.beta_k);
    }
    for (int n = 0; n < nRes; ++n) {
        const std::string& res = cat.resources[n].id;
        for (int k = 0; k < K; ++k)
            for (int d = 0; d < D; ++d) {
                double w = cfg.days[d].weight;
                for (int t = 0; t < T; ++t) {
                    std::size_t idx = scen.index(k, d, t);
                    m.set_objective(v_yx[n][flat(k, d, t)],
                                    w * dt * esc[k] * scen.price_sell_at(res, idx));
                    m.set_objective(v_u[n][flat(k, d, t)],
                                    w * dt * esc[k] * scen.price_buy_at(res, idx));
                }
            }
    }
    m.set_objective(v_xi, 365.0 * K * T);

    m.validate();
    return m;
}

double CostBreakdown::total() const {
    double v = initial + peak_penalty;
    for (double x : operational) v += x;
    for (double x : maintenance) v += x;
    return v;
}

PlanSolution extract_solution(const MilpModel& m, const std::vector<double>& x,
                              const Catalog& cat, const ScenarioSet& scen,
                              const PlanningConfig& cfg0) {
    if (x.size() != static_cast<std::size_t>(m.num_vars()))
        throw UsageError("extract_solution: solution vector has wrong dimension");
    PlanningConfig cfg = cfg0;
    cfg.adopt_grid(scen.grid);
    cfg.check();
    const int K = cfg.years, D = static_cast<int>(cfg.days.size()), T = cfg.intervals;

    for (int j = 0; j < m.num_vars(); ++j) {
        if (m.vars[j].type != VarType::binary) continue;
        if (std::abs(x[j] - std::round(x[j])) > 1e-6)
            throw NumericalError("extract_solution: binary variable " + m.vars[j].name +
                                 " is fractional (" + std::to_string(x[j]) + ")");
    }

    PlanSolution sol;
    const std::size_t npts = static_cast<std::size_t>(K) * D * T;
    auto value = [&](const VarKey& key) { return x[m.column_required(key)]; };

    for (int i = 0; i < static_cast<int>(cat.equipment.size()); ++i) {
        const auto& eq = cat.equipment[i];
        EquipmentPlan p;
        p.id = eq.id;
        p.installed = std::round(value({VarKind::install, i})) > 0.5;
        p.rated_power_kw = value({VarKind::rated_power, i});
        p.capacity = eq.is_storage() ? value({VarKind::capacity, i}) : 0.0;
        if (!p.installed) {
            // Clear solver dust; anything larger is a real defect.
            if (std::abs(p.rated_power_kw) > 1e-6 || std::abs(p.capacity) > 1e-6)
                throw NumericalError("extract_solution: unit " + eq.id +
                                     " is not installed but has nonzero size");
            p.rated_power_kw = 0.0;
            p.capacity = 0.0;
        }
        sol.equipment.push_back(p);

        if (eq.klass == EquipmentClass::generator) {
            auto& pw = sol.power[eq.id];
            auto& cm = sol.commit[eq.id];
            pw.resize(npts);
            cm.resize(npts);
            for (int k = 0; k < K; ++k)
                for (int d = 0; d < D; ++d)
                    for (int t = 0; t < T; ++t) {
                        std::size_t idx = scen.index(k, d, t);
                        pw[idx] = value({VarKind::power, i, k, d, t});
                        cm[idx] = std::round(value({VarKind::commit, i, k, d, t}));
                    }
        } else if (eq.is_storage()) {
            auto& ch = sol.charge[eq.id];
            auto& dch = sol.discharge[eq.id];
            auto& md = sol.mode[eq.id];
            auto& sc = sol.soc[eq.id];
            auto& sc0 = sol.soc_initial[eq.id];
            ch.resize(npts);
            dch.resize(npts);
            md.resize(npts);
            sc.resize(npts);
            sc0.resize(static_cast<std::size_t>(K) * D);
            for (int k = 0; k < K; ++k)
                for (int d = 0; d < D; ++d) {
                    sc0[k * D + d] = value({VarKind::soc0, i, k, d});
                    for (int t = 0; t < T; ++t) {
                        std::size_t idx = scen.index(k, d, t);
                        ch[idx] = value({VarKind::charge, i, k, d, t});
                        dch[idx] = value({VarKind::discharge, i, k, d, t});
                        md[idx] = std::round(value({VarKind::storage_mode, i, k, d, t}));
                        sc[idx] = value({VarKind::soc, i, k, d, t});
                    }
                }
        }
    }

    for (int n = 0; n < static_cast<int>(cat.resources.size()); ++n) {
        const std::string& res = cat.resources[n].id;
        auto& u = sol.import_in[res];
        auto& yx = sol.surplus[res];
        auto& sp = sol.spin[res];
        u.resize(npts);
        yx.resize(npts);
        sp.resize(K);
        for (int k = 0; k < K; ++k) {
            sp[k] = value({VarKind::spin, n, k});
            for (int d = 0; d < D; ++d)
                for (int t = 0; t < T; ++t) {
                    std::size_t idx = scen.index(k, d, t);
                    u[idx] = value({VarKind::import_in, n, k, d, t});
                    yx[idx] = value({VarKind::surplus, n, k, d, t});
                }
        }
    }
    sol.peak_xi = value({VarKind::peak});

    // Independent cost ledger, recomputed from the cost equations rather than
    // the model's objective row.
    sol.costs.operational.assign(K, 0.0);
    sol.costs.maintenance.assign(K, 0.0);
    for (const auto& p : sol.equipment) {
        const EquipmentSpec* eq = cat.find_equipment(p.id);
        double a = p.installed ? 1.0 : 0.0;
        sol.costs.initial += eq->alpha0 * p.rated_power_kw + eq->gamma0 * a;
        if (eq->is_storage()) sol.costs.initial += eq->beta0 * p.capacity;
        for (int k = 0; k < K; ++k) {
            double e = std::pow(1.0 + cfg.inflation, k);
            sol.costs.maintenance[k] += e * (eq->alpha_k * p.rated_power_kw + eq->gamma_k * a);
            if (eq->is_storage()) sol.costs.maintenance[k] += e * eq->beta_k * p.capacity;
        }
    }
    for (const auto& res : cat.resources) {
        for (int k = 0; k < K; ++k) {
            double e = std::pow(1.0 + cfg.inflation, k);
            for (int d = 0; d < D; ++d) {
                double w = cfg.days[d].weight;
                for (int t = 0; t < T; ++t) {
                    std::size_t idx = scen.index(k, d, t);
                    sol.costs.operational[k] +=
                        w * cfg.dt_hours * e *
                        (scen.price_sell_at(res.id, idx) * sol.surplus[res.id][idx] +
                         scen.price_buy_at(res.id, idx) * sol.import_in[res.id][idx]);
                }
            }
        }
    }
    sol.costs.peak_penalty = 365.0 * K * T * sol.peak_xi;

    sol.daily_co2.assign(static_cast<std::size_t>(K) * D, 0.0);
    if (sol.surplus.count(cfg.co2_resource)) {
        const auto& yx = sol.surplus[cfg.co2_resource];
        for (int k = 0; k < K; ++k)
            for (int d = 0; d < D; ++d)
                for (int t = 0; t < T; ++t)
                    sol.daily_co2[k * D + d] += yx[scen.index(k, d, t)];
    }

    sol.objective = m.objective_value(x);
    sol.objective_recomputed = sol.costs.total();
    sol.objective_discrepancy = std::abs(sol.objective - sol.objective_recomputed);
    sol.bound = sol.objective;
    return sol;
}

}  // namespace mgrid
