#include "mgrid/empirical.hpp"

#include <cmath>

namespace mgrid {

namespace {

constexpr double kYearPeriod = 2.0 * M_PI / 365.0;

double need(const std::optional<double>& v, const char* name) {
    if (!v) throw UsageError(std::string("missing input variable '") + name + "'");
    return *v;
}

void need_arity(ModelKind k, const std::vector<double>& p) {
    if (p.size() != model_arity(k)) {
        throw UsageError(std::string("model ") + to_string(k) + " expects " +
                         std::to_string(model_arity(k)) + " parameters, got " +
                         std::to_string(p.size()));
    }
}

}  // namespace

const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::daily_temperature: return "daily_temperature";
        case ModelKind::hourly_temperature: return "hourly_temperature";
        case ModelKind::solar_irradiance: return "solar_irradiance";
        case ModelKind::weibull_wind: return "weibull_wind";
        case ModelKind::population: return "population";
        case ModelKind::daily_demand: return "daily_demand";
        case ModelKind::hourly_demand: return "hourly_demand";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    for (ModelKind k : kAllModelKinds)
        if (s == to_string(k)) return k;
    throw DataError("unknown model kind '" + s + "'");
}

std::size_t model_arity(ModelKind k) {
    switch (k) {
        case ModelKind::daily_temperature: return 3;
        case ModelKind::hourly_temperature: return 5;
        case ModelKind::solar_irradiance: return 6;
        case ModelKind::weibull_wind: return 2;
        case ModelKind::population: return 3;
        case ModelKind::daily_demand: return 4;
        case ModelKind::hourly_demand: return 4;
    }
    return 0;
}

std::vector<std::string> model_param_names(ModelKind k) {
    switch (k) {
        case ModelKind::daily_temperature: return {"p_daily_1", "p_daily_2", "p_daily_3"};
        case ModelKind::hourly_temperature:
            return {"p_airT_1", "p_airT_2", "p_airT_3", "p_airT_4", "p_airT_5"};
        case ModelKind::solar_irradiance:
            return {"p_solar_mu1", "p_solar_mu2", "p_solar_mu3",
                    "p_solar_sigma1", "p_solar_sigma2", "p_solar_sigma3"};
        case ModelKind::weibull_wind: return {"shape", "scale"};
        case ModelKind::population: return {"P_0", "P_p1", "P_p2"};
        case ModelKind::daily_demand:
            return {"p_e_daily_1", "p_e_daily_2", "p_e_daily_3", "p_e_daily_4"};
        case ModelKind::hourly_demand: return {"p_E_h1", "p_E_h2", "p_E_h3", "p_E_h4"};
    }
    return {};
}

double eval_model(ModelKind kind, const std::vector<double>& p, const ModelInputs& in) {
    need_arity(kind, p);
    switch (kind) {
        case ModelKind::daily_temperature: {
            double t = need(in.t, "t");
            return p[0] * std::sin(kYearPeriod * (t + p[1])) + p[2];
        }
        case ModelKind::hourly_temperature: {
            double th = need(in.t_h, "t_h");
            double td = need(in.t_daily, "t_daily");
            double poly = ((((p[0] * th + p[1]) * th + p[2]) * th + p[3]) * th + p[4]);
            return poly * td;
        }
        case ModelKind::solar_irradiance: {
            double t = need(in.t, "t");
            double th = need(in.t_h, "t_h");
            double td = need(in.t_daily, "t_daily");
            double mu = p[0] * std::sin(kYearPeriod * (t + p[1])) + p[2];
            double sig = p[3] * std::sin(kYearPeriod * (t + p[4])) + p[5];
            if (sig <= 0) sig = 1e-9;  // keeps finite-difference probes out of NaN territory
            double z = (th - mu) / sig;
            return td / (sig * std::sqrt(2.0 * M_PI)) * std::exp(-0.5 * z * z);
        }
        case ModelKind::weibull_wind:
            return weibull_quantile(p[0], p[1], need(in.prob, "prob"));
        case ModelKind::population: {
            double t = need(in.t, "t");
            return p[0] + p[1] * t + p[2] * t * t;
        }
        case ModelKind::daily_demand: {
            double t = need(in.t, "t");
            double pop = need(in.p_t, "p_t");
            return p[0] * std::sin(kYearPeriod * (t + p[1])) + p[2] + p[3] * pop;
        }
        case ModelKind::hourly_demand: {
            double th = need(in.t_h, "t_h");
            double ed = need(in.e_daily, "e_daily");
            double poly = (((p[0] * th + p[1]) * th + p[2]) * th + p[3]) * th;
            return poly * ed;
        }
    }
    throw UsageError("unreachable model kind");
}

double weibull_cdf(double shape, double scale, double v) {
    if (shape <= 0 || scale <= 0) throw UsageError("Weibull shape and scale must be positive");
    if (v <= 0) return 0.0;
    return -std::expm1(-std::pow(v / scale, shape));
}

double weibull_quantile(double shape, double scale, double prob) {
    if (shape <= 0 || scale <= 0) throw UsageError("Weibull shape and scale must be positive");
    if (prob < 0 || prob >= 1) throw UsageError("Weibull quantile needs prob in [0, 1)");
    return scale * std::pow(-std::log1p(-prob), 1.0 / shape);
}

}  // namespace mgrid
