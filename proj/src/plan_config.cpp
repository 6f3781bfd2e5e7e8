#include "mgrid/plan_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mgrid/csv.hpp"

namespace mgrid {

double PlanningConfig::reserve_for(const std::string& res) const {
    auto it = reserve_fraction.find(res);
    return it == reserve_fraction.end() ? 0.0 : it->second;
}

double PlanningConfig::import_cap_for(const Resource& r) const {
    auto it = import_cap.find(r.id);
    return it == import_cap.end() ? r.import_cap : it->second;
}

double PlanningConfig::surplus_fraction_for(const Resource& r) const {
    auto it = surplus_cap_fraction.find(r.id);
    return it == surplus_cap_fraction.end() ? r.surplus_cap_fraction : it->second;
}

void PlanningConfig::adopt_grid(const GridSpec& g) {
    if (years <= 0) years = g.years;
    if (days.empty()) days = g.days;
    if (intervals <= 0) intervals = g.intervals;
    if (dt_hours <= 0) dt_hours = g.dt_hours;
}

void PlanningConfig::check() const {
    if (years < 1 || intervals < 1 || days.empty())
        throw UsageError("plan config: years, days and intervals must be positive");
    if (dt_hours <= 0) throw UsageError("plan config: dt_hours must be positive");
    if (max_installed < 1) throw UsageError("plan config: max_installed must be positive");
    double wsum = 0.0;
    for (const auto& d : days) {
        if (d.weight <= 0) throw UsageError("plan config: day weights must be positive");
        if (d.day_of_year < 1 || d.day_of_year > 365)
            throw UsageError("plan config: day_of_year out of range");
        wsum += d.weight;
    }
    if (std::abs(wsum - 365.0) > 1e-6)
        throw UsageError("plan config: day weights must sum to 365 per year (got " +
                         std::to_string(wsum) + ")");
    for (const auto& [res, rho] : reserve_fraction) {
        if (rho < 0 || rho > 0.03)
            throw UsageError("plan config: reserve fraction for '" + res +
                             "' must lie in [0, 0.03]");
    }
    if (opt_ca < 0 || opt_cr < 0) throw UsageError("plan config: optca/optcr must be >= 0");
    if (peak_penalty_delta < 0) throw UsageError("plan config: peak penalty must be >= 0");
    if (std::isfinite(lco2_per_day) && lco2_per_day < 0)
        throw UsageError("plan config: lco2_per_day must be >= 0");
}

namespace {

std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_num(const std::string& path, int line, const std::string& v) {
    if (v == "inf") return kUnbounded;
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size())
        throw DataError(path + ":" + std::to_string(line) + ": malformed number '" + v + "'");
    return x;
}

// "91:183,274:182" -> representative days
std::vector<RepresentativeDay> parse_days(const std::string& path, int line,
                                          const std::string& v) {
    std::vector<RepresentativeDay> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw DataError(path + ":" + std::to_string(line) +
                            ": days entries must look like day_of_year:weight");
        RepresentativeDay d;
        d.day_of_year = static_cast<int>(parse_num(path, line, strip(item.substr(0, colon))));
        d.weight = parse_num(path, line, strip(item.substr(colon + 1)));
        out.push_back(d);
    }
    return out;
}

}  // namespace

PlanningConfig read_plan_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open file");
    PlanningConfig cfg;
    cfg.reserve_fraction.clear();
    bool reserve_seen = false;

    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = strip(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[' && s.back() == ']') {
            section = strip(s.substr(1, s.size() - 2));
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = strip(s.substr(0, eq));
        std::string val = strip(s.substr(eq + 1));

        if (section.empty()) {
            if (key == "years") cfg.years = static_cast<int>(parse_num(path, lineno, val));
            else if (key == "intervals") cfg.intervals = static_cast<int>(parse_num(path, lineno, val));
            else if (key == "dt_hours") cfg.dt_hours = parse_num(path, lineno, val);
            else if (key == "days") cfg.days = parse_days(path, lineno, val);
            else if (key == "max_installed") cfg.max_installed = static_cast<int>(parse_num(path, lineno, val));
            else if (key == "lco2_per_day") cfg.lco2_per_day = parse_num(path, lineno, val);
            else if (key == "peak_penalty") cfg.peak_penalty_delta = parse_num(path, lineno, val);
            else if (key == "inflation") cfg.inflation = parse_num(path, lineno, val);
            else if (key == "optca") cfg.opt_ca = parse_num(path, lineno, val);
            else if (key == "optcr") cfg.opt_cr = parse_num(path, lineno, val);
            else if (key == "co2_resource") cfg.co2_resource = val;
            else if (key == "elect_resource") cfg.elect_resource = val;
            else throw DataError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        } else if (section == "reserve_fraction") {
            reserve_seen = true;
            cfg.reserve_fraction[key] = parse_num(path, lineno, val);
        } else if (section == "import_cap") {
            cfg.import_cap[key] = parse_num(path, lineno, val);
        } else if (section == "surplus_cap_fraction") {
            cfg.surplus_cap_fraction[key] = parse_num(path, lineno, val);
        } else {
            throw DataError(path + ":" + std::to_string(lineno) + ": unknown section [" +
                            section + "]");
        }
    }
    if (!reserve_seen) cfg.reserve_fraction = {{cfg.elect_resource, 0.03}};
    return cfg;
}

void write_plan_config(const PlanningConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << "years = " << cfg.years << "\n";
    out << "intervals = " << cfg.intervals << "\n";
    out << "dt_hours = " << format_number(cfg.dt_hours) << "\n";
    out << "days = ";
    for (std::size_t i = 0; i < cfg.days.size(); ++i) {
        out << (i ? "," : "") << cfg.days[i].day_of_year << ":"
            << format_number(cfg.days[i].weight);
    }
    out << "\n";
    out << "max_installed = " << cfg.max_installed << "\n";
    out << "lco2_per_day = " << format_number(cfg.lco2_per_day) << "\n";
    out << "peak_penalty = " << format_number(cfg.peak_penalty_delta) << "\n";
    out << "inflation = " << format_number(cfg.inflation) << "\n";
    out << "optca = " << format_number(cfg.opt_ca) << "\n";
    out << "optcr = " << format_number(cfg.opt_cr) << "\n";
    out << "co2_resource = " << cfg.co2_resource << "\n";
    out << "elect_resource = " << cfg.elect_resource << "\n";
    out << "\n[reserve_fraction]\n";
    for (const auto& [res, v] : cfg.reserve_fraction)
        out << res << " = " << format_number(v) << "\n";
    if (!cfg.import_cap.empty()) {
        out << "\n[import_cap]\n";
        for (const auto& [res, v] : cfg.import_cap) out << res << " = " << format_number(v) << "\n";
    }
    if (!cfg.surplus_cap_fraction.empty()) {
        out << "\n[surplus_cap_fraction]\n";
        for (const auto& [res, v] : cfg.surplus_cap_fraction)
            out << res << " = " << format_number(v) << "\n";
    }
}

}  // namespace mgrid
