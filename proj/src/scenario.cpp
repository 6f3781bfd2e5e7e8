#include "mgrid/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <nlohmann/json.hpp>

#include "mgrid/csv.hpp"

namespace mgrid {

using nlohmann::json;

double pv_coefficient(const RenewableParams& rp, double phi, double t_p) {
    double v = rp.eta * phi * (1.0 - rp.kappa * (t_p - rp.t_ref));
    return v > 0.0 ? v : 0.0;
}

double wind_coefficient(const RenewableParams& rp, double v) {
    if (v < rp.v_cut_in) return 0.0;
    if (v > rp.v_cut_out) return 0.0;
    if (v >= rp.v_rated) return 1.0;
    return (v - rp.v_cut_in) / (rp.v_rated - rp.v_cut_in);
}

int month_of_day_of_year(int day_of_year) {
    static const int days_in_month[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int d = day_of_year;
    for (int m = 0; m < 12; ++m) {
        if (d <= days_in_month[m]) return m + 1;
        d -= days_in_month[m];
    }
    return 12;
}

const FittedModel& ModelSet::require(ModelKind k) const {
    if (k == ModelKind::weibull_wind) {
        if (wind_buckets.empty()) throw UsageError("missing fitted model: weibull_wind");
        return wind_buckets.front();
    }
    auto it = base.find(k);
    if (it == base.end())
        throw UsageError(std::string("missing fitted model: ") + to_string(k));
    return it->second;
}

const FittedModel& ModelSet::wind_for(int month, double hour_of_day) const {
    if (wind_buckets.empty()) throw UsageError("missing fitted model: weibull_wind");
    int block = static_cast<int>(hour_of_day / 6.0);
    if (block < 0) block = 0;
    if (block > 3) block = 3;
    for (const auto& m : wind_buckets)
        if (m.bucket_month == month && m.bucket_block == block) return m;
    for (const auto& m : wind_buckets)
        if (m.bucket_month == 0 && m.bucket_block == -1) return m;
    return wind_buckets.front();
}

std::vector<ModelKind> ModelSet::missing() const {
    std::vector<ModelKind> out;
    for (ModelKind k : kAllModelKinds) {
        if (k == ModelKind::weibull_wind) {
            if (wind_buckets.empty()) out.push_back(k);
        } else if (!base.count(k)) {
            out.push_back(k);
        }
    }
    return out;
}

double ScenarioSet::demand_at(const std::string& res, std::size_t idx) const {
    auto it = demand.find(res);
    return it == demand.end() ? 0.0 : it->second[idx];
}

double ScenarioSet::price_buy_at(const std::string& res, std::size_t idx) const {
    auto it = price_buy.find(res);
    return it == price_buy.end() ? 0.0 : it->second[idx];
}

double ScenarioSet::price_sell_at(const std::string& res, std::size_t idx) const {
    auto it = price_sell.find(res);
    return it == price_sell.end() ? 0.0 : it->second[idx];
}

namespace {

struct DayDraws {
    double t_daily = 0.0;
    double population = 0.0;
    double e_daily = 0.0;
};

}  // namespace

static void generate_into(ScenarioSet& s, const ModelSet& models, const Catalog& cat,
                          const GridSpec& grid, Likelihood lik, std::uint64_t seed, int k, int d) {
    const RepresentativeDay& day = grid.days[d];
    const double t_day = grid.t0_days + static_cast<double>(k) * 365.0 + day.day_of_year;
    const int month = month_of_day_of_year(day.day_of_year);

    const FittedModel& m_tdaily = models.require(ModelKind::daily_temperature);
    const FittedModel& m_tair = models.require(ModelKind::hourly_temperature);
    const FittedModel& m_solar = models.require(ModelKind::solar_irradiance);
    const FittedModel& m_pop = models.require(ModelKind::population);
    const FittedModel& m_edaily = models.require(ModelKind::daily_demand);
    const FittedModel& m_eh = models.require(ModelKind::hourly_demand);

    long clamps = 0;

    // Day-level quantities are drawn once per (year, day) to stay coherent
    // across the day's intervals; substream interval index 0 is reserved for
    // them.
    DayDraws dd;
    {
        ModelInputs in;
        in.t = t_day;
        RngStream r1 = RngStream::at(seed, k, d, 0, static_cast<std::uint64_t>(DrawTag::daily_temperature));
        dd.t_daily = sample_band(m_tdaily, in, lik, r1);

        RngStream r2 = RngStream::at(seed, k, d, 0, static_cast<std::uint64_t>(DrawTag::population));
        dd.population = sample_band(m_pop, in, lik, r2);

        ModelInputs ind;
        ind.t = t_day;
        ind.p_t = dd.population;
        RngStream r3 = RngStream::at(seed, k, d, 0, static_cast<std::uint64_t>(DrawTag::daily_demand));
        dd.e_daily = sample_band(m_edaily, ind, lik, r3, {.clamp_nonnegative = true}, &clamps);
    }

    for (int t = 0; t < grid.intervals; ++t) {
        const std::size_t idx = s.index(k, d, t);
        const double t_h = (t + 0.5) * grid.dt_hours;  // interval midpoint
        s.t_days[idx] = t_day + t_h / 24.0;

        ModelInputs in_air;
        in_air.t_h = t_h;
        in_air.t_daily = dd.t_daily;
        RngStream r_air = RngStream::at(seed, k, d, t + 1, static_cast<std::uint64_t>(DrawTag::hourly_temperature));
        double t_air = sample_band(m_tair, in_air, lik, r_air);
        s.temperature_c[idx] = t_air;

        ModelInputs in_sol;
        in_sol.t = t_day;
        in_sol.t_h = t_h;
        in_sol.t_daily = dd.t_daily;
        RngStream r_sol = RngStream::at(seed, k, d, t + 1, static_cast<std::uint64_t>(DrawTag::irradiance));
        double irr = sample_band(m_solar, in_sol, lik, r_sol, {.clamp_nonnegative = true}, &clamps);
        s.irradiance[idx] = irr;

        // Wind: band-restricted quantile of the bucket's Weibull, reached by
        // pushing the banded normal deviate through the Gaussian CDF.
        const FittedModel& m_wind = models.wind_for(month, t_h);
        RngStream r_wind = RngStream::at(seed, k, d, t + 1, static_cast<std::uint64_t>(DrawTag::wind));
        double z = draw_band_z(lik, r_wind);
        double v = weibull_quantile(m_wind.params[0], m_wind.params[1], normal_cdf(z));
        s.wind_ms[idx] = v;

        ModelInputs in_eh;
        in_eh.t_h = t_h;
        in_eh.e_daily = dd.e_daily;
        RngStream r_eh = RngStream::at(seed, k, d, t + 1, static_cast<std::uint64_t>(DrawTag::hourly_demand));
        double e_h = sample_band(m_eh, in_eh, lik, r_eh, {.clamp_nonnegative = true}, &clamps);
        s.demand.at(grid.demand_resource)[idx] = e_h;

        for (const auto& [res, profile] : grid.fixed_demand)
            s.demand.at(res)[idx] = profile[t];
        for (const auto& [res, price] : grid.prices) {
            s.price_buy.at(res)[idx] = price.buy_at(t);
            s.price_sell.at(res)[idx] = price.sell_at(t);
        }

        for (const auto& eq : cat.equipment) {
            if (eq.klass != EquipmentClass::renewable) continue;
            const RenewableParams& rp = cat.renewable_params.at(eq.id);
            double pbar = rp.kind == RenewableKind::pv
                              ? pv_coefficient(rp, irr / grid.rated_irradiance, t_air)
                              : wind_coefficient(rp, v);
            s.pbar.at(eq.id)[idx] = std::clamp(pbar, 0.0, 1.0);
        }
    }

#pragma omp atomic
    s.clamp_events += clamps;
}

static ScenarioSet make_empty(const ModelSet& models, const Catalog& cat, const GridSpec& grid,
                              Likelihood lik, std::uint64_t seed) {
    auto missing = models.missing();
    if (!missing.empty())
        throw UsageError(std::string("missing fitted model: ") + to_string(missing.front()));
    if (grid.years < 1 || grid.days.empty() || grid.intervals < 1 || grid.dt_hours <= 0)
        throw UsageError("grid spec must declare years, days, intervals and a positive dt");
    for (const auto& [res, profile] : grid.fixed_demand) {
        if (profile.size() != static_cast<std::size_t>(grid.intervals))
            throw UsageError("fixed demand profile for '" + res + "' must have one value per interval");
    }

    ScenarioSet s;
    s.likelihood = lik;
    s.seed = seed;
    s.grid = grid;
    const std::size_t n = static_cast<std::size_t>(grid.points());
    s.t_days.assign(n, 0.0);
    s.temperature_c.assign(n, 0.0);
    s.wind_ms.assign(n, 0.0);
    s.irradiance.assign(n, 0.0);
    s.demand[grid.demand_resource].assign(n, 0.0);
    for (const auto& [res, profile] : grid.fixed_demand) s.demand[res].assign(n, 0.0);
    for (const auto& [res, price] : grid.prices) {
        s.price_buy[res].assign(n, 0.0);
        s.price_sell[res].assign(n, 0.0);
    }
    for (const auto& eq : cat.equipment)
        if (eq.klass == EquipmentClass::renewable) s.pbar[eq.id].assign(n, 0.0);
    return s;
}

ScenarioSet generate_scenario_serial(const ModelSet& models, const Catalog& cat,
                                     const GridSpec& grid, Likelihood lik, std::uint64_t seed) {
    ScenarioSet s = make_empty(models, cat, grid, lik, seed);
    for (int k = 0; k < grid.years; ++k)
        for (int d = 0; d < static_cast<int>(grid.days.size()); ++d)
            generate_into(s, models, cat, grid, lik, seed, k, d);
    return s;
}

ScenarioSet generate_scenario(const ModelSet& models, const Catalog& cat, const GridSpec& grid,
                              Likelihood lik, std::uint64_t seed, int threads) {
    ScenarioSet s = make_empty(models, cat, grid, lik, seed);
    const int ndays = grid.years * static_cast<int>(grid.days.size());
#ifdef _OPENMP
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#else
    const int nthreads = 1;
    (void)threads;
#endif
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
    for (int kd = 0; kd < ndays; ++kd) {
        int k = kd / static_cast<int>(grid.days.size());
        int d = kd % static_cast<int>(grid.days.size());
        generate_into(s, models, cat, grid, lik, seed, k, d);
    }
    return s;
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

GridSpec read_grid_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open file");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    GridSpec g;
    g.years = j.value("years", 1);
    g.intervals = j.value("intervals", 48);
    g.dt_hours = j.value("dt_hours", 0.5);
    g.t0_days = j.value("t0_days", 0.0);
    g.rated_irradiance = j.value("rated_irradiance", 1.0);
    g.demand_resource = j.value("demand_resource", "elect");
    if (!j.contains("days")) throw DataError(path + ": grid spec must list representative days");
    for (const auto& d : j.at("days")) {
        RepresentativeDay rd;
        rd.day_of_year = d.at("day_of_year").get<int>();
        rd.weight = d.at("weight").get<double>();
        g.days.push_back(rd);
    }
    if (j.contains("prices")) {
        for (auto& [res, p] : j.at("prices").items()) {
            PriceSeries ps;
            if (p.contains("buy")) {
                if (p["buy"].is_array())
                    ps.buy_profile = p["buy"].get<std::vector<double>>();
                else
                    ps.buy = p["buy"].get<double>();
            }
            if (p.contains("sell")) {
                if (p["sell"].is_array())
                    ps.sell_profile = p["sell"].get<std::vector<double>>();
                else
                    ps.sell = p["sell"].get<double>();
            }
            g.prices[res] = ps;
        }
    }
    if (j.contains("fixed_demand")) {
        for (auto& [res, p] : j.at("fixed_demand").items())
            g.fixed_demand[res] = p.get<std::vector<double>>();
    }
    return g;
}

void write_grid_spec(const GridSpec& g, const std::string& path) {
    json j;
    j["years"] = g.years;
    j["intervals"] = g.intervals;
    j["dt_hours"] = g.dt_hours;
    j["t0_days"] = g.t0_days;
    j["rated_irradiance"] = g.rated_irradiance;
    j["demand_resource"] = g.demand_resource;
    j["days"] = json::array();
    for (const auto& d : g.days)
        j["days"].push_back({{"day_of_year", d.day_of_year}, {"weight", d.weight}});
    for (const auto& [res, p] : g.prices) {
        json jp;
        if (p.buy_profile.empty())
            jp["buy"] = p.buy;
        else
            jp["buy"] = p.buy_profile;
        if (p.sell_profile.empty())
            jp["sell"] = p.sell;
        else
            jp["sell"] = p.sell_profile;
        j["prices"][res] = jp;
    }
    for (const auto& [res, p] : g.fixed_demand) j["fixed_demand"][res] = p;
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << j.dump(2) << "\n";
}

static json model_to_json(const FittedModel& m) {
    json j;
    j["kind"] = to_string(m.kind);
    j["params"] = m.params;
    j["cov_p"] = m.cov_p;
    j["mse"] = m.mse;
    j["n_samples"] = m.n_samples;
    j["converged"] = m.converged;
    j["rank_deficient"] = m.rank_deficient;
    j["iterations"] = m.iterations;
    j["grad_norm"] = m.grad_norm;
    j["grad_tol"] = m.grad_tol;
    if (m.kind == ModelKind::weibull_wind) {
        j["bucket_month"] = m.bucket_month;
        j["bucket_block"] = m.bucket_block;
    }
    return j;
}

static FittedModel model_from_json(const json& j) {
    FittedModel m;
    m.kind = model_kind_from_string(j.at("kind").get<std::string>());
    m.params = j.at("params").get<std::vector<double>>();
    m.cov_p = j.at("cov_p").get<std::vector<double>>();
    m.mse = j.at("mse").get<double>();
    m.n_samples = j.at("n_samples").get<std::size_t>();
    m.converged = j.value("converged", true);
    m.rank_deficient = j.value("rank_deficient", false);
    m.iterations = j.value("iterations", 0);
    m.grad_norm = j.value("grad_norm", 0.0);
    m.grad_tol = j.value("grad_tol", 0.0);
    m.bucket_month = j.value("bucket_month", 0);
    m.bucket_block = j.value("bucket_block", -1);
    if (m.params.size() != m.arity())
        throw DataError(std::string("model ") + to_string(m.kind) + ": wrong parameter count");
    if (m.cov_p.size() != m.arity() * m.arity())
        throw DataError(std::string("model ") + to_string(m.kind) + ": wrong cov_p size");
    return m;
}

ModelSet read_models(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open file");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    ModelSet ms;
    for (const auto& jm : j.at("models")) {
        FittedModel m = model_from_json(jm);
        if (m.kind == ModelKind::weibull_wind)
            ms.wind_buckets.push_back(std::move(m));
        else
            ms.base[m.kind] = std::move(m);
    }
    return ms;
}

void write_models(const ModelSet& models, const std::string& path) {
    json j;
    j["models"] = json::array();
    for (ModelKind k : kAllModelKinds) {
        if (k == ModelKind::weibull_wind) continue;
        auto it = models.base.find(k);
        if (it != models.base.end()) j["models"].push_back(model_to_json(it->second));
    }
    for (const auto& m : models.wind_buckets) j["models"].push_back(model_to_json(m));
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << j.dump(2) << "\n";
}

void write_scenario_csv(const ScenarioSet& s, const std::string& path) {
    std::vector<std::string> header{"year",      "day",  "day_of_year", "day_weight",
                                    "interval",  "t_days", "temperature_c", "wind_ms",
                                    "irradiance"};
    std::vector<std::string> demand_res, price_res, pbar_ids;
    for (const auto& [res, _] : s.demand) demand_res.push_back(res);
    for (const auto& [res, _] : s.price_buy) price_res.push_back(res);
    for (const auto& [id, _] : s.pbar) pbar_ids.push_back(id);
    for (const auto& r : demand_res) header.push_back("demand_" + r);
    for (const auto& r : price_res) header.push_back("price_buy_" + r);
    for (const auto& r : price_res) header.push_back("price_sell_" + r);
    for (const auto& id : pbar_ids) header.push_back("pbar_" + id);

    std::vector<std::vector<std::string>> rows;
    for (int k = 0; k < s.grid.years; ++k) {
        for (int d = 0; d < static_cast<int>(s.grid.days.size()); ++d) {
            for (int t = 0; t < s.grid.intervals; ++t) {
                std::size_t idx = s.index(k, d, t);
                std::vector<std::string> row{
                    std::to_string(k + 1),
                    std::to_string(d + 1),
                    std::to_string(s.grid.days[d].day_of_year),
                    format_number(s.grid.days[d].weight),
                    std::to_string(t + 1),
                    format_number(s.t_days[idx]),
                    format_number(s.temperature_c[idx]),
                    format_number(s.wind_ms[idx]),
                    format_number(s.irradiance[idx])};
                for (const auto& r : demand_res) row.push_back(format_number(s.demand.at(r)[idx]));
                for (const auto& r : price_res)
                    row.push_back(format_number(s.price_buy.at(r)[idx]));
                for (const auto& r : price_res)
                    row.push_back(format_number(s.price_sell.at(r)[idx]));
                for (const auto& id : pbar_ids) row.push_back(format_number(s.pbar.at(id)[idx]));
                rows.push_back(std::move(row));
            }
        }
    }
    write_csv(path, header, rows);
}

ScenarioSet read_scenario_csv(const std::string& path) {
    CsvTable t = CsvTable::read_file(path);
    auto c_year = t.column_required("year");
    auto c_day = t.column_required("day");
    auto c_doy = t.column_required("day_of_year");
    auto c_w = t.column_required("day_weight");
    auto c_int = t.column_required("interval");
    auto c_tdays = t.column_required("t_days");
    auto c_temp = t.column_required("temperature_c");
    auto c_wind = t.column_required("wind_ms");
    auto c_irr = t.column_required("irradiance");

    ScenarioSet s;
    GridSpec& g = s.grid;
    g.years = 0;
    g.intervals = 0;
    std::map<int, RepresentativeDay> day_map;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        g.years = std::max(g.years, static_cast<int>(t.cell_number_required(r, c_year)));
        g.intervals = std::max(g.intervals, static_cast<int>(t.cell_number_required(r, c_int)));
        int d = static_cast<int>(t.cell_number_required(r, c_day));
        day_map[d] = {static_cast<int>(t.cell_number_required(r, c_doy)),
                      t.cell_number_required(r, c_w)};
    }
    for (const auto& [d, rd] : day_map) g.days.push_back(rd);
    if (g.years < 1 || g.intervals < 1 || g.days.empty())
        throw DataError(path + ": empty scenario grid");

    const std::size_t n = static_cast<std::size_t>(g.points());
    if (t.rows() != n)
        throw DataError(path + ": expected " + std::to_string(n) + " grid rows, got " +
                        std::to_string(t.rows()));
    s.t_days.assign(n, 0.0);
    s.temperature_c.assign(n, 0.0);
    s.wind_ms.assign(n, 0.0);
    s.irradiance.assign(n, 0.0);

    struct ColBind {
        std::size_t col;
        std::vector<double>* dest;
    };
    std::vector<ColBind> binds;
    for (std::size_t c = 0; c < t.header().size(); ++c) {
        const std::string& h = t.header()[c];
        auto bind = [&](const std::string& prefix,
                        std::map<std::string, std::vector<double>>& m) {
            if (h.rfind(prefix, 0) == 0) {
                auto& v = m[h.substr(prefix.size())];
                v.assign(n, 0.0);
                binds.push_back({c, &v});
                return true;
            }
            return false;
        };
        if (bind("demand_", s.demand)) continue;
        if (bind("price_buy_", s.price_buy)) continue;
        if (bind("price_sell_", s.price_sell)) continue;
        bind("pbar_", s.pbar);
    }

    for (std::size_t r = 0; r < t.rows(); ++r) {
        int k = static_cast<int>(t.cell_number_required(r, c_year)) - 1;
        int d = static_cast<int>(t.cell_number_required(r, c_day)) - 1;
        int tt = static_cast<int>(t.cell_number_required(r, c_int)) - 1;
        if (k < 0 || d < 0 || tt < 0 || k >= g.years ||
            d >= static_cast<int>(g.days.size()) || tt >= g.intervals)
            throw DataError(t.where(r) + ": grid index out of range");
        std::size_t idx = s.index(k, d, tt);
        s.t_days[idx] = t.cell_number_required(r, c_tdays);
        s.temperature_c[idx] = t.cell_number_required(r, c_temp);
        s.wind_ms[idx] = t.cell_number_required(r, c_wind);
        s.irradiance[idx] = t.cell_number_required(r, c_irr);
        for (auto& b : binds) (*b.dest)[idx] = t.cell_number_required(r, b.col);
    }
    for (const auto& [res, v] : s.price_buy) {
        PriceSeries ps;
        ps.buy_profile.assign(v.begin(), v.begin() + g.intervals);
        auto it = s.price_sell.find(res);
        if (it != s.price_sell.end())
            ps.sell_profile.assign(it->second.begin(), it->second.begin() + g.intervals);
        g.prices[res] = ps;
    }
    return s;
}

}  // namespace mgrid
