#include "mgrid/milp_model.hpp"

#include <cmath>

namespace mgrid {

const char* to_string(VarKind k) {
    switch (k) {
        case VarKind::install: return "a";
        case VarKind::rated_power: return "rp";
        case VarKind::capacity: return "b";
        case VarKind::power: return "p";
        case VarKind::commit: return "kc";
        case VarKind::charge: return "pch";
        case VarKind::discharge: return "pdch";
        case VarKind::storage_mode: return "ks";
        case VarKind::soc0: return "soc0";
        case VarKind::soc: return "soc";
        case VarKind::import_in: return "u";
        case VarKind::surplus: return "yx";
        case VarKind::spin: return "sp";
        case VarKind::peak: return "xi";
    }
    return "?";
}

int MilpModel::add_var(const std::string& name, double lb, double ub, VarType type) {
    vars.push_back({name, lb, ub, type});
    return static_cast<int>(vars.size()) - 1;
}

int MilpModel::add_var(const VarKey& key, const std::string& name, double lb, double ub,
                       VarType type) {
    int col = add_var(name, lb, ub, type);
    index.emplace(key, col);
    return col;
}

int MilpModel::add_row(const std::string& name, RowSense sense, double rhs,
                       std::vector<std::pair<int, double>> terms) {
    rows.push_back({name, sense, rhs, std::move(terms)});
    return static_cast<int>(rows.size()) - 1;
}

void MilpModel::set_objective(int col, double coef) {
    if (coef != 0.0) objective.emplace_back(col, coef);
}

int MilpModel::num_binaries() const {
    int n = 0;
    for (const auto& v : vars) n += v.type == VarType::binary;
    return n;
}

int MilpModel::column(const VarKey& key) const {
    auto it = index.find(key);
    return it == index.end() ? -1 : it->second;
}

int MilpModel::column_required(const VarKey& key) const {
    int c = column(key);
    if (c < 0)
        throw UsageError(std::string("no variable indexed for kind ") + to_string(key.kind));
    return c;
}

void MilpModel::validate() const {
    const int n = num_vars();
    for (const auto& v : vars) {
        if (!(v.lb <= v.ub))
            throw UsageError("variable " + v.name + " has crossing bounds");
        if (v.type == VarType::binary && (v.lb < 0.0 || v.ub > 1.0))
            throw UsageError("binary variable " + v.name + " has bounds outside [0,1]");
    }
    for (const auto& r : rows) {
        if (!std::isfinite(r.rhs)) throw UsageError("row " + r.name + " has non-finite rhs");
        for (const auto& [col, coef] : r.terms) {
            if (col < 0 || col >= n)
                throw UsageError("row " + r.name + " references unknown column");
            if (!std::isfinite(coef))
                throw UsageError("row " + r.name + " has non-finite coefficient");
        }
    }
    for (const auto& [col, coef] : objective) {
        if (col < 0 || col >= n) throw UsageError("objective references unknown column");
        if (!std::isfinite(coef)) throw UsageError("objective has non-finite coefficient");
    }
}

double MilpModel::objective_value(const std::vector<double>& x) const {
    double v = objective_offset;
    for (const auto& [col, coef] : objective) v += coef * x[col];
    return v;
}

double MilpModel::row_violation(const Row& r, const std::vector<double>& x) const {
    double lhs = 0.0;
    for (const auto& [col, coef] : r.terms) lhs += coef * x[col];
    switch (r.sense) {
        case RowSense::le: return lhs - r.rhs;
        case RowSense::ge: return r.rhs - lhs;
        case RowSense::eq: return std::abs(lhs - r.rhs);
    }
    return 0.0;
}

double MilpModel::max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, row_violation(r, x));
    for (int j = 0; j < num_vars(); ++j) {
        worst = std::max(worst, vars[j].lb - x[j]);
        worst = std::max(worst, x[j] - vars[j].ub);
    }
    return worst;
}

std::map<std::string, int> MilpModel::variable_census() const {
    std::map<std::string, int> out;
    for (const auto& [key, col] : index) {
        (void)col;
        ++out[to_string(key.kind)];
    }
    return out;
}

std::map<std::string, int> MilpModel::row_census() const {
    std::map<std::string, int> out;
    for (const auto& r : rows) {
        auto cut = r.name.find('[');
        ++out[r.name.substr(0, cut)];
    }
    return out;
}

}  // namespace mgrid
