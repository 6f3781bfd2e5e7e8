#pragma once

#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "mgrid/errors.hpp"

namespace mgrid {

constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// A tradeable/balanced quantity (electricity, heat, CO2, ...). Each resource
// keeps its own native unit; balances never convert between units.
struct Resource {
    std::string id;
    std::string name;
    std::string unit;
    bool purchasable = false;
    // Hourly import allowance; the per-interval import bound is import_cap * dt.
    // Electricity defaults to 6000 kWh/h, i.e. 3 MWh per half-hour interval.
    double import_cap = kUnbounded;
    // Surplus bound as a fraction of the day's peak demand (unbounded if inf).
    double surplus_cap_fraction = kUnbounded;
};

enum class EquipmentClass { generator, storage, renewable };

const char* to_string(EquipmentClass c);
EquipmentClass equipment_class_from_string(const std::string& s);

// One candidate unit of the pool: sizing bounds, cost coefficients and
// per-resource generation/consumption rates at unit power for unit time.
struct EquipmentSpec {
    std::string id;
    EquipmentClass klass = EquipmentClass::generator;
    double rp_min = 0.0;  // [kW]
    double rp_max = 0.0;  // [kW]
    double b_min = 0.0;   // storage capacity bounds, in the unit's own energy unit
    double b_max = 0.0;
    double alpha0 = 0.0;  // initial cost per kW
    double beta0 = 0.0;   // initial cost per capacity unit (storage)
    double gamma0 = 0.0;  // fixed initial cost
    double alpha_k = 0.0; // first-year maintenance per kW
    double beta_k = 0.0;  // first-year maintenance per capacity unit
    double gamma_k = 0.0; // fixed yearly maintenance
    std::map<std::string, double> gen;   // resource id -> generation rate
    std::map<std::string, double> cons;  // resource id -> consumption rate
    double p_frac_min = 0.0;
    double p_frac_max = 1.0;
    double q_frac_min = 0.0;  // storage state-of-charge fraction bounds
    double q_frac_max = 0.0;

    bool is_storage() const { return klass == EquipmentClass::storage; }
    double gen_rate(const std::string& res) const;
    double cons_rate(const std::string& res) const;
};

enum class RenewableKind { pv, wind };

struct RenewableParams {
    RenewableKind kind = RenewableKind::pv;
    // PV (Eq-2.23 style curve)
    double eta = 0.18;    // cell efficiency
    double kappa = 0.004; // temperature correction [1/degC]
    double t_ref = 25.0;  // reference temperature [degC]
    // Wind (cut-in per the case study; rated/cut-out are implementation defaults)
    double v_cut_in = 2.5;
    double v_rated = 11.0;
    double v_cut_out = 25.0;
};

struct CatalogPaths {
    std::string equipment;
    std::string gen;
    std::string cons;
    std::string resources;
    std::string renewables;

    // Conventional file names under one directory.
    static CatalogPaths in_dir(const std::string& dir);
};

struct Violation {
    std::string subject;  // equipment or resource id, or file-level marker
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

struct Catalog {
    std::vector<Resource> resources;
    std::vector<EquipmentSpec> equipment;
    std::unordered_map<std::string, RenewableParams> renewable_params;  // by equipment id

    const Resource* find_resource(const std::string& id) const;
    const EquipmentSpec* find_equipment(const std::string& id) const;
    std::size_t resource_index(const std::string& id) const;  // throws if unknown
};

// Loads and cross-checks the five catalog files. Throws DataError on parse or
// schema problems and on any type-invariant violation.
Catalog load_catalog(const CatalogPaths& paths);

// Re-checks every type invariant; never throws, never mutates.
ValidationReport validate_catalog(const Catalog& c);

// Canonical writer; load_catalog(write_catalog(c)) round-trips.
void write_catalog(const Catalog& c, const CatalogPaths& paths);

}  // namespace mgrid
