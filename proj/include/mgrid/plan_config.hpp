#pragma once

#include <map>
#include <string>
#include <vector>

#include "mgrid/catalog.hpp"
#include "mgrid/scenario.hpp"

namespace mgrid {

// Planning horizon, caps and penalty settings for one optimization run.
// Grid fields left empty/zero adopt the scenario's grid at build time.
struct PlanningConfig {
    int years = 0;
    std::vector<RepresentativeDay> days;
    int intervals = 0;
    double dt_hours = 0.0;

    int max_installed = 10;          // N_I
    double lco2_per_day = kUnbounded;  // daily CO2 cap [gCO2 per (year, day)]
    double peak_penalty_delta = 0.01;  // TRY/kW, implementation default
    double inflation = 0.12;

    // Spinning reserve fraction per resource (<= 0.03); default: elect only.
    std::map<std::string, double> reserve_fraction{{"elect", 0.03}};
    // Per-resource overrides of the catalog's caps.
    std::map<std::string, double> import_cap;
    std::map<std::string, double> surplus_cap_fraction;

    double opt_ca = 1e-2;
    double opt_cr = 1e-2;

    std::string co2_resource = "co2";
    std::string elect_resource = "elect";

    double reserve_for(const std::string& res) const;
    double import_cap_for(const Resource& r) const;
    double surplus_fraction_for(const Resource& r) const;

    // Fill grid fields from a scenario grid (only those left unset).
    void adopt_grid(const GridSpec& g);
    // Throws UsageError when an invariant is broken (weights must sum to 365
    // per year, 0 <= rho <= 0.03, positive sizes, ...).
    void check() const;
};

PlanningConfig read_plan_config(const std::string& path);
void write_plan_config(const PlanningConfig& cfg, const std::string& path);

}  // namespace mgrid
