#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "mgrid/errors.hpp"

namespace mgrid {

enum class VarType { continuous, binary };
enum class RowSense { le, eq, ge };

struct Variable {
    std::string name;
    double lb = 0.0;
    double ub = 0.0;
    VarType type = VarType::continuous;
};

struct Row {
    std::string name;
    RowSense sense = RowSense::le;
    double rhs = 0.0;
    std::vector<std::pair<int, double>> terms;  // (column, coefficient)
};

// Semantic identity of a decision variable; unused dimensions stay at -1.
enum class VarKind : std::uint8_t {
    install,       // a_i
    rated_power,   // rp_i
    capacity,      // b_i
    power,         // p_ikt (generators)
    commit,        // kc_ikt
    charge,        // pch_ikt
    discharge,     // pdch_ikt
    storage_mode,  // ks_ikt
    soc0,          // initial stored energy per (i, k, day)
    soc,           // state of charge per (i, k, day, t)
    import_in,     // u_nkt
    surplus,       // yx_nkt
    spin,          // sp_nk
    peak,          // xi
};

const char* to_string(VarKind k);

struct VarKey {
    VarKind kind = VarKind::peak;
    int i = -1;  // equipment or resource ordinal
    int k = -1;  // year (0-based)
    int d = -1;  // representative day (0-based)
    int t = -1;  // interval (0-based)

    bool operator==(const VarKey&) const = default;
};

struct VarKeyHash {
    std::size_t operator()(const VarKey& k) const {
        std::uint64_t h = static_cast<std::uint64_t>(k.kind);
        for (int v : {k.i, k.k, k.d, k.t}) {
            h ^= static_cast<std::uint64_t>(v + 2);
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

// A mixed-integer linear program in row form with a semantic index over the
// planning grids. Immutable once built by the formulation.
struct MilpModel {
    std::vector<Variable> vars;
    std::vector<Row> rows;
    std::vector<std::pair<int, double>> objective;  // sparse, sense = minimize
    double objective_offset = 0.0;
    std::unordered_map<VarKey, int, VarKeyHash> index;

    int add_var(const std::string& name, double lb, double ub, VarType type);
    int add_var(const VarKey& key, const std::string& name, double lb, double ub, VarType type);
    int add_row(const std::string& name, RowSense sense, double rhs,
                std::vector<std::pair<int, double>> terms);
    void set_objective(int col, double coef);

    int num_vars() const { return static_cast<int>(vars.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
    int num_binaries() const;

    // Column index for a semantic key; -1 when absent.
    int column(const VarKey& key) const;
    int column_required(const VarKey& key) const;

    // Structural self-checks (term columns in range, binary bounds within
    // [0,1], finite rhs). Throws UsageError on the first defect.
    void validate() const;

    double objective_value(const std::vector<double>& x) const;
    // Signed violation of one row at x (positive = violated).
    double row_violation(const Row& r, const std::vector<double>& x) const;
    double max_violation(const std::vector<double>& x) const;

    // Count of variables per kind and rows per name prefix (the text before
    // the first '['), for construction-time censuses.
    std::map<std::string, int> variable_census() const;
    std::map<std::string, int> row_census() const;
};

}  // namespace mgrid
