#pragma once

#include <map>
#include <string>
#include <vector>

#include "mgrid/catalog.hpp"
#include "mgrid/milp_model.hpp"
#include "mgrid/plan_config.hpp"
#include "mgrid/scenario.hpp"

namespace mgrid {

// Translates catalog + scenario + config into the multi-period MILP:
// installation/sizing linking, unit commitment via disaggregated bilinear
// terms, storage dynamics with daily cyclicity, per-resource balances,
// import/surplus caps, the peak penalty and the daily CO2 cap, under the
// net-present-cost objective. The config's grid must match the scenario's.
MilpModel build_model(const Catalog& cat, const ScenarioSet& scen, const PlanningConfig& cfg);

struct EquipmentPlan {
    std::string id;
    bool installed = false;
    double rated_power_kw = 0.0;
    double capacity = 0.0;
};

struct CostBreakdown {
    double initial = 0.0;
    std::vector<double> operational;  // per year, including the escalation factor
    std::vector<double> maintenance;  // per year
    double peak_penalty = 0.0;
    double total() const;
};

struct PlanSolution {
    std::vector<EquipmentPlan> equipment;

    // Schedules indexed like ScenarioSet::index(k, d, t), keyed by equipment id.
    std::map<std::string, std::vector<double>> power;      // generators
    std::map<std::string, std::vector<double>> commit;     // generators (0/1)
    std::map<std::string, std::vector<double>> charge;     // storage
    std::map<std::string, std::vector<double>> discharge;  // storage
    std::map<std::string, std::vector<double>> mode;       // storage ks (0/1)
    std::map<std::string, std::vector<double>> soc;        // storage
    std::map<std::string, std::vector<double>> soc_initial;  // storage, per (k, day)

    // Per resource id.
    std::map<std::string, std::vector<double>> import_in;  // u, per grid point
    std::map<std::string, std::vector<double>> surplus;    // yx, per grid point
    std::map<std::string, std::vector<double>> spin;       // sp, per year

    double peak_xi = 0.0;
    CostBreakdown costs;
    std::vector<double> daily_co2;  // per (k, day)

    double objective = 0.0;        // solver objective
    double bound = 0.0;            // best proven bound
    double gap_abs = 0.0;
    double gap_rel = 0.0;
    double objective_recomputed = 0.0;  // independent cost-ledger evaluation
    double objective_discrepancy = 0.0;
};

// Populates a PlanSolution from a raw solver vector via the model's index
// maps; binaries are rounded after an integrality check (1e-6) and every cost
// component is recomputed from the cost equations independently of the
// model's objective row.
PlanSolution extract_solution(const MilpModel& m, const std::vector<double>& x,
                              const Catalog& cat, const ScenarioSet& scen,
                              const PlanningConfig& cfg);

struct FamilyCheck {
    std::string family;
    double max_violation = 0.0;
    int violations = 0;   // entries above tolerance
    std::string worst;    // subject of the largest violation
};

struct FeasibilityReport {
    std::vector<FamilyCheck> families;
    double tolerance = 1e-6;
    bool ok() const;
    double worst() const;
    const FamilyCheck* family(const std::string& name) const;
    std::string to_string() const;
};

// Re-evaluates every constraint family directly from catalog/scenario/config
// data (independently of the MilpModel rows), including the bilinear
// commitment semantics that the disaggregated constraints encode.
FeasibilityReport check_feasibility(const PlanSolution& sol, const Catalog& cat,
                                    const ScenarioSet& scen, const PlanningConfig& cfg,
                                    double tol = 1e-6);

// Single-threaded reference for the OpenMP checker above; results must match.
FeasibilityReport check_feasibility_serial(const PlanSolution& sol, const Catalog& cat,
                                           const ScenarioSet& scen, const PlanningConfig& cfg,
                                           double tol = 1e-6);

}  // namespace mgrid
