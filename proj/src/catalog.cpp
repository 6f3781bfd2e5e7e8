#include "mgrid/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mgrid/csv.hpp"

namespace mgrid {

const char* to_string(EquipmentClass c) {
    switch (c) {
        case EquipmentClass::generator: return "generator";
        case EquipmentClass::storage: return "storage";
        case EquipmentClass::renewable: return "renewable";
    }
    return "?";
}

EquipmentClass equipment_class_from_string(const std::string& s) {
    if (s == "generator") return EquipmentClass::generator;
    if (s == "storage") return EquipmentClass::storage;
    if (s == "renewable") return EquipmentClass::renewable;
    throw DataError("unknown equipment class '" + s + "'");
}

double EquipmentSpec::gen_rate(const std::string& res) const {
    auto it = gen.find(res);
    return it == gen.end() ? 0.0 : it->second;
}

double EquipmentSpec::cons_rate(const std::string& res) const {
    auto it = cons.find(res);
    return it == cons.end() ? 0.0 : it->second;
}

CatalogPaths CatalogPaths::in_dir(const std::string& dir) {
    CatalogPaths p;
    p.equipment = dir + "/equipment.csv";
    p.gen = dir + "/gen.csv";
    p.cons = dir + "/cons.csv";
    p.resources = dir + "/resources.csv";
    p.renewables = dir + "/renewables.csv";
    return p;
}

const Resource* Catalog::find_resource(const std::string& id) const {
    for (const auto& r : resources)
        if (r.id == id) return &r;
    return nullptr;
}

const EquipmentSpec* Catalog::find_equipment(const std::string& id) const {
    for (const auto& e : equipment)
        if (e.id == id) return &e;
    return nullptr;
}

std::size_t Catalog::resource_index(const std::string& id) const {
    for (std::size_t i = 0; i < resources.size(); ++i)
        if (resources[i].id == id) return i;
    throw UsageError("unknown resource '" + id + "'");
}

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    for (const auto& v : violations) out << v.subject << ": " << v.message << "\n";
    return out.str();
}

namespace {

// Reads a gen.csv/cons.csv matrix: first column is the equipment id, remaining
// columns are resource ids.
void read_rate_matrix(const CsvTable& t, bool generation, Catalog& cat) {
    if (t.header().empty() || t.header()[0] != "id")
        throw DataError(t.name() + ": first column must be 'id'");
    std::vector<std::string> res_ids(t.header().begin() + 1, t.header().end());
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const std::string& eq_id = t.cell(r, 0);
        EquipmentSpec* eq = nullptr;
        for (auto& e : cat.equipment)
            if (e.id == eq_id) eq = &e;
        if (!eq) throw DataError(t.where(r) + ": unknown equipment '" + eq_id + "'");
        auto& dest = generation ? eq->gen : eq->cons;
        for (std::size_t c = 0; c < res_ids.size(); ++c) {
            double v = t.cell_number(r, c + 1).value_or(0.0);
            if (v != 0.0) dest[res_ids[c]] = v;
        }
    }
}

void check(ValidationReport& rep, const std::string& subject, bool ok, const std::string& msg) {
    if (!ok) rep.violations.push_back({subject, msg});
}

}  // namespace

Catalog load_catalog(const CatalogPaths& paths) {
    Catalog cat;

    CsvTable res = CsvTable::read_file(paths.resources);
    {
        auto c_id = res.column_required("id");
        auto c_name = res.column_required("name");
        auto c_unit = res.column_required("unit");
        auto c_buy = res.column_required("purchasable");
        auto c_cap = res.column_required("import_cap");
        auto c_sur = res.column_required("surplus_cap_fraction");
        for (std::size_t r = 0; r < res.rows(); ++r) {
            Resource x;
            x.id = res.cell(r, c_id);
            x.name = res.cell(r, c_name);
            x.unit = res.cell(r, c_unit);
            x.purchasable = res.cell_bool(r, c_buy);
            x.import_cap = res.cell_number(r, c_cap).value_or(kUnbounded);
            x.surplus_cap_fraction = res.cell_number(r, c_sur).value_or(kUnbounded);
            cat.resources.push_back(std::move(x));
        }
    }
    if (cat.resources.empty()) throw DataError(paths.resources + ": no resources declared");

    CsvTable eq = CsvTable::read_file(paths.equipment);
    {
        auto col = [&](const char* n) { return eq.column_required(n); };
        auto c_id = col("id"), c_class = col("class");
        auto c_rpmin = col("rp_min_kw"), c_rpmax = col("rp_max_kw");
        auto c_bmin = col("b_min"), c_bmax = col("b_max");
        auto c_a0 = col("alpha0"), c_b0 = col("beta0"), c_g0 = col("gamma0");
        auto c_ak = col("alpha_k"), c_bk = col("beta_k"), c_gk = col("gamma_k");
        auto c_pmin = col("p_frac_min"), c_pmax = col("p_frac_max");
        auto c_qmin = col("q_frac_min"), c_qmax = col("q_frac_max");
        for (std::size_t r = 0; r < eq.rows(); ++r) {
            EquipmentSpec e;
            e.id = eq.cell(r, c_id);
            try {
                e.klass = equipment_class_from_string(eq.cell(r, c_class));
            } catch (const DataError& err) {
                throw DataError(eq.where(r) + ": " + err.what());
            }
            e.rp_min = eq.cell_number_required(r, c_rpmin);
            e.rp_max = eq.cell_number_required(r, c_rpmax);
            e.b_min = eq.cell_number(r, c_bmin).value_or(0.0);
            e.b_max = eq.cell_number(r, c_bmax).value_or(0.0);
            e.alpha0 = eq.cell_number(r, c_a0).value_or(0.0);
            e.beta0 = eq.cell_number(r, c_b0).value_or(0.0);
            e.gamma0 = eq.cell_number(r, c_g0).value_or(0.0);
            e.alpha_k = eq.cell_number(r, c_ak).value_or(0.0);
            e.beta_k = eq.cell_number(r, c_bk).value_or(0.0);
            e.gamma_k = eq.cell_number(r, c_gk).value_or(0.0);
            e.p_frac_min = eq.cell_number(r, c_pmin).value_or(0.0);
            e.p_frac_max = eq.cell_number(r, c_pmax).value_or(1.0);
            e.q_frac_min = eq.cell_number(r, c_qmin).value_or(0.0);
            e.q_frac_max = eq.cell_number(r, c_qmax).value_or(0.0);
            cat.equipment.push_back(std::move(e));
        }
    }
    if (cat.equipment.empty()) throw DataError(paths.equipment + ": no equipment declared");

    read_rate_matrix(CsvTable::read_file(paths.gen), true, cat);
    read_rate_matrix(CsvTable::read_file(paths.cons), false, cat);

    CsvTable rnw = CsvTable::read_file(paths.renewables);
    {
        auto c_id = rnw.column_required("id");
        auto c_kind = rnw.column_required("kind");
        auto c_eta = rnw.column_required("eta");
        auto c_kappa = rnw.column_required("kappa");
        auto c_tref = rnw.column_required("t_ref");
        auto c_vin = rnw.column_required("v_cut_in");
        auto c_vr = rnw.column_required("v_rated");
        auto c_vout = rnw.column_required("v_cut_out");
        for (std::size_t r = 0; r < rnw.rows(); ++r) {
            RenewableParams p;
            const std::string& kind = rnw.cell(r, c_kind);
            if (kind == "pv") {
                p.kind = RenewableKind::pv;
                p.eta = rnw.cell_number(r, c_eta).value_or(p.eta);
                p.kappa = rnw.cell_number(r, c_kappa).value_or(p.kappa);
                p.t_ref = rnw.cell_number(r, c_tref).value_or(p.t_ref);
            } else if (kind == "wind") {
                p.kind = RenewableKind::wind;
                p.v_cut_in = rnw.cell_number(r, c_vin).value_or(p.v_cut_in);
                p.v_rated = rnw.cell_number(r, c_vr).value_or(p.v_rated);
                p.v_cut_out = rnw.cell_number(r, c_vout).value_or(p.v_cut_out);
            } else {
                throw DataError(rnw.where(r) + ": unknown renewable kind '" + kind + "'");
            }
            cat.renewable_params[rnw.cell(r, c_id)] = p;
        }
    }

    ValidationReport rep = validate_catalog(cat);
    if (!rep.ok()) throw DataError("catalog invariant violations:\n" + rep.to_string());
    return cat;
}

ValidationReport validate_catalog(const Catalog& c) {
    ValidationReport rep;

    std::set<std::string> res_ids;
    for (const auto& r : c.resources) {
        check(rep, r.id, res_ids.insert(r.id).second, "duplicate resource id");
        check(rep, r.id, !(std::isfinite(r.import_cap) && r.import_cap < 0),
              "import_cap must be nonnegative");
        check(rep, r.id, !(std::isfinite(r.surplus_cap_fraction) && r.surplus_cap_fraction < 0),
              "surplus_cap_fraction must be nonnegative");
    }

    std::set<std::string> eq_ids;
    for (const auto& e : c.equipment) {
        check(rep, e.id, eq_ids.insert(e.id).second, "duplicate equipment id");
        check(rep, e.id, 0 <= e.rp_min && e.rp_min <= e.rp_max,
              "rated power bounds must satisfy 0 <= rp_min <= rp_max");
        check(rep, e.id, 0 <= e.b_min && e.b_min <= e.b_max,
              "capacity bounds must satisfy 0 <= b_min <= b_max");
        if (e.is_storage()) {
            check(rep, e.id, e.b_max > 0, "storage must have positive b_max");
            check(rep, e.id,
                  0 <= e.q_frac_min && e.q_frac_min <= e.q_frac_max && e.q_frac_max <= 1,
                  "q_frac bounds must satisfy 0 <= min <= max <= 1");
        } else {
            check(rep, e.id, e.b_max == 0 && e.b_min == 0,
                  "non-storage equipment must have zero capacity bounds");
        }
        check(rep, e.id, 0 <= e.p_frac_min && e.p_frac_min <= e.p_frac_max && e.p_frac_max <= 1,
              "p_frac bounds must satisfy 0 <= min <= max <= 1");
        check(rep, e.id,
              e.alpha0 >= 0 && e.beta0 >= 0 && e.gamma0 >= 0 && e.alpha_k >= 0 &&
                  e.beta_k >= 0 && e.gamma_k >= 0,
              "cost coefficients must be nonnegative");
        for (const auto& [res, v] : e.gen) {
            check(rep, e.id, res_ids.count(res) > 0,
                  "gen entry references undeclared resource '" + res + "'");
            check(rep, e.id, v >= 0, "gen rate for '" + res + "' must be nonnegative");
        }
        for (const auto& [res, v] : e.cons) {
            check(rep, e.id, res_ids.count(res) > 0,
                  "cons entry references undeclared resource '" + res + "'");
            check(rep, e.id, v >= 0, "cons rate for '" + res + "' must be nonnegative");
        }
        if (e.klass == EquipmentClass::renewable) {
            check(rep, e.id, c.renewable_params.count(e.id) > 0,
                  "renewable unit lacks RenewableParams");
        }
    }

    for (const auto& [id, p] : c.renewable_params) {
        check(rep, id, eq_ids.count(id) > 0, "renewable params for undeclared equipment");
        if (p.kind == RenewableKind::pv) {
            check(rep, id, p.eta > 0 && p.eta <= 1, "eta must be in (0, 1]");
            check(rep, id, p.kappa >= 0, "kappa must be nonnegative");
        } else {
            check(rep, id, 0 <= p.v_cut_in && p.v_cut_in < p.v_rated && p.v_rated <= p.v_cut_out,
                  "wind speeds must satisfy 0 <= cut_in < rated <= cut_out");
        }
    }
    return rep;
}

void write_catalog(const Catalog& c, const CatalogPaths& paths) {
    auto num = [](double v) { return format_number(v); };
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : c.resources) {
            rows.push_back({r.id, r.name, r.unit, r.purchasable ? "true" : "false",
                            std::isinf(r.import_cap) ? "" : num(r.import_cap),
                            std::isinf(r.surplus_cap_fraction) ? ""
                                                               : num(r.surplus_cap_fraction)});
        }
        write_csv(paths.resources,
                  {"id", "name", "unit", "purchasable", "import_cap", "surplus_cap_fraction"},
                  rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& e : c.equipment) {
            rows.push_back({e.id, to_string(e.klass), num(e.rp_min), num(e.rp_max), num(e.b_min),
                            num(e.b_max), num(e.alpha0), num(e.beta0), num(e.gamma0),
                            num(e.alpha_k), num(e.beta_k), num(e.gamma_k), num(e.p_frac_min),
                            num(e.p_frac_max), num(e.q_frac_min), num(e.q_frac_max)});
        }
        write_csv(paths.equipment,
                  {"id", "class", "rp_min_kw", "rp_max_kw", "b_min", "b_max", "alpha0", "beta0",
                   "gamma0", "alpha_k", "beta_k", "gamma_k", "p_frac_min", "p_frac_max",
                   "q_frac_min", "q_frac_max"},
                  rows);
    }
    auto write_matrix = [&](const std::string& path, bool generation) {
        std::vector<std::string> header{"id"};
        for (const auto& r : c.resources) header.push_back(r.id);
        std::vector<std::vector<std::string>> rows;
        for (const auto& e : c.equipment) {
            std::vector<std::string> row{e.id};
            for (const auto& r : c.resources) {
                double v = generation ? e.gen_rate(r.id) : e.cons_rate(r.id);
                row.push_back(v == 0.0 ? "0" : num(v));
            }
            rows.push_back(std::move(row));
        }
        write_csv(path, header, rows);
    };
    write_matrix(paths.gen, true);
    write_matrix(paths.cons, false);
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& e : c.equipment) {
            auto it = c.renewable_params.find(e.id);
            if (it == c.renewable_params.end()) continue;
            const RenewableParams& p = it->second;
            if (p.kind == RenewableKind::pv) {
                rows.push_back({e.id, "pv", num(p.eta), num(p.kappa), num(p.t_ref), "", "", ""});
            } else {
                rows.push_back({e.id, "wind", "", "", "", num(p.v_cut_in), num(p.v_rated),
                                num(p.v_cut_out)});
            }
        }
        write_csv(paths.renewables,
                  {"id", "kind", "eta", "kappa", "t_ref", "v_cut_in", "v_rated", "v_cut_out"},
                  rows);
    }
}

}  // namespace mgrid
