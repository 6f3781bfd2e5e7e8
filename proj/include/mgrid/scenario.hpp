#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mgrid/catalog.hpp"
#include "mgrid/fit.hpp"
#include "mgrid/sampling.hpp"

namespace mgrid {

// Renewable operating-power coefficients.
// PV: eta * phi * (1 - kappa * (t_p - t_ref)), floored at 0; phi is irradiance
// as a fraction of rated irradiance.
double pv_coefficient(const RenewableParams& rp, double phi, double t_p);
// Wind: 0 outside [cut_in, cut_out], 1 on [rated, cut_out], linear ramp between
// cut-in and rated speed.
double wind_coefficient(const RenewableParams& rp, double v);

struct RepresentativeDay {
    int day_of_year = 1;   // 1..365
    double weight = 365.0; // days of the year this day stands for
};

struct PriceSeries {
    // Constant levels, or one value per interval when profiles are given.
    double buy = 0.0;   // phi^- : cost per unit of system input
    double sell = 0.0;  // phi^+ : cost per unit of surplus output
    std::vector<double> buy_profile;
    std::vector<double> sell_profile;

    double buy_at(int interval) const {
        return buy_profile.empty() ? buy : buy_profile[interval];
    }
    double sell_at(int interval) const {
        return sell_profile.empty() ? sell : sell_profile[interval];
    }
};

struct GridSpec {
    int years = 1;
    std::vector<RepresentativeDay> days;
    int intervals = 48;
    double dt_hours = 0.5;
    double t0_days = 0.0;           // model time of year 1, day-of-year 0
    double rated_irradiance = 1.0;  // irradiance value mapped to phi = 1 for PV
    std::string demand_resource = "elect";
    std::map<std::string, PriceSeries> prices;                 // by resource id
    std::map<std::string, std::vector<double>> fixed_demand;   // per-interval profile by resource

    int points() const { return years * static_cast<int>(days.size()) * intervals; }
};

GridSpec read_grid_spec(const std::string& path);
void write_grid_spec(const GridSpec& g, const std::string& path);

// The fitted-model bundle the generator runs on. Wind may be bucketed by
// (month, quarter-day block); bucket (0, -1) is the catch-all.
struct ModelSet {
    std::map<ModelKind, FittedModel> base;
    std::vector<FittedModel> wind_buckets;

    const FittedModel& require(ModelKind k) const;
    const FittedModel& wind_for(int month, double hour_of_day) const;
    std::vector<ModelKind> missing() const;
};

ModelSet read_models(const std::string& path);
void write_models(const ModelSet& models, const std::string& path);

int month_of_day_of_year(int day_of_year);  // 1..12, non-leap calendar

// One scenario: sampled weather/demand drivers and derived renewable
// coefficients on the full (year, representative day, interval) grid.
struct ScenarioSet {
    Likelihood likelihood = Likelihood::likely;
    std::uint64_t seed = 0;
    GridSpec grid;

    // Flattened arrays indexed by index(k, d, t).
    std::vector<double> t_days;
    std::vector<double> temperature_c;
    std::vector<double> wind_ms;
    std::vector<double> irradiance;
    std::map<std::string, std::vector<double>> demand;      // by resource id
    std::map<std::string, std::vector<double>> price_buy;   // by resource id
    std::map<std::string, std::vector<double>> price_sell;  // by resource id
    std::map<std::string, std::vector<double>> pbar;        // by renewable equipment id
    long clamp_events = 0;

    std::size_t index(int k, int d, int t) const {
        return (static_cast<std::size_t>(k) * grid.days.size() + d) * grid.intervals + t;
    }
    std::size_t points() const { return t_days.size(); }
    double demand_at(const std::string& res, std::size_t idx) const;
    double price_buy_at(const std::string& res, std::size_t idx) const;
    double price_sell_at(const std::string& res, std::size_t idx) const;
};

// Samples every grid point through the fitted-model chain, derives pbar for
// each renewable unit in the catalog, and stamps the seed. Deterministic for a
// fixed seed regardless of thread count.
ScenarioSet generate_scenario(const ModelSet& models, const Catalog& cat, const GridSpec& grid,
                              Likelihood likelihood, std::uint64_t seed, int threads = 0);

// Single-threaded reference implementation; generate_scenario must match it
// exactly.
ScenarioSet generate_scenario_serial(const ModelSet& models, const Catalog& cat,
                                     const GridSpec& grid, Likelihood likelihood,
                                     std::uint64_t seed);

void write_scenario_csv(const ScenarioSet& s, const std::string& path);
ScenarioSet read_scenario_csv(const std::string& path);

}  // namespace mgrid
