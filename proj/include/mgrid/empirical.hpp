#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mgrid/errors.hpp"

namespace mgrid {

// The seven empirical model forms. Time t is measured in days, t_h is the
// hour of the day in [0, 24); all trigonometric arguments are radians with a
// 2*pi/365 yearly period.
enum class ModelKind {
    daily_temperature,   // a*sin(2pi/365*(t+b)) + c
    hourly_temperature,  // quartic(t_h) * T_daily
    solar_irradiance,    // seasonal Gaussian bell in t_h, scaled by T_daily
    weibull_wind,        // Weibull quantile of prob
    population,          // quadratic in t
    daily_demand,        // seasonal sine + population term
    hourly_demand,       // quartic(t_h) * E_daily, no constant term
};

constexpr ModelKind kAllModelKinds[] = {
    ModelKind::daily_temperature, ModelKind::hourly_temperature, ModelKind::solar_irradiance,
    ModelKind::weibull_wind,      ModelKind::population,         ModelKind::daily_demand,
    ModelKind::hourly_demand,
};

const char* to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);
std::size_t model_arity(ModelKind k);
std::vector<std::string> model_param_names(ModelKind k);

// Named inputs; eval_model throws UsageError when a required one is missing.
struct ModelInputs {
    std::optional<double> t;        // days
    std::optional<double> t_h;      // hour of day
    std::optional<double> t_daily;  // daily mean temperature feed-through
    std::optional<double> e_daily;  // daily demand feed-through
    std::optional<double> p_t;      // population feed-through
    std::optional<double> prob;     // CDF probability (Weibull quantile input)
};

double eval_model(ModelKind kind, const std::vector<double>& params, const ModelInputs& in);

// Weibull helpers shared by the wind model and its tests.
double weibull_cdf(double shape, double scale, double v);
double weibull_quantile(double shape, double scale, double prob);

}  // namespace mgrid
