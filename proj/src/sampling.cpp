#include "mgrid/sampling.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <string>

namespace mgrid {

const char* to_string(Likelihood l) {
    switch (l) {
        case Likelihood::likely: return "likely";
        case Likelihood::mid_likely: return "mid_likely";
        case Likelihood::unlikely: return "unlikely";
    }
    return "?";
}

Likelihood likelihood_from_string(const std::string& s) {
    if (s == "likely") return Likelihood::likely;
    if (s == "mid_likely" || s == "mid") return Likelihood::mid_likely;
    if (s == "unlikely") return Likelihood::unlikely;
    throw UsageError("unknown likelihood '" + s + "' (expected likely|mid|unlikely)");
}

BandBounds band_bounds(Likelihood l) {
    switch (l) {
        case Likelihood::likely: return {0.0, 1.0};
        case Likelihood::mid_likely: return {1.0, 2.0};
        case Likelihood::unlikely: return {2.0, 3.0};
    }
    return {0.0, 1.0};
}

double normal_cdf(double z) {
    static const boost::math::normal_distribution<double> n(0.0, 1.0);
    return boost::math::cdf(n, z);
}

double normal_quantile(double p) {
    static const boost::math::normal_distribution<double> n(0.0, 1.0);
    return boost::math::quantile(n, p);
}

double draw_band_z(Likelihood l, RngStream& rng) {
    BandBounds b = band_bounds(l);
    // Half-normal CDF F(z) = 2*Phi(z) - 1; invert a uniform restricted to the
    // band's image.
    double f_lo = 2.0 * normal_cdf(b.z_lo) - 1.0;
    double f_hi = 2.0 * normal_cdf(b.z_hi) - 1.0;
    double u = rng.next_unit();
    double f = f_lo + u * (f_hi - f_lo);
    double magnitude = normal_quantile((1.0 + f) / 2.0);
    return rng.next_sign() * magnitude;
}

double sample_band(const FittedModel& m, const ModelInputs& inputs, Likelihood l, RngStream& rng,
                   const SampleOptions& opts, long* clamp_count) {
    double mean = m.predict(inputs);
    double var = propagate_uncertainty(m, inputs) + m.mse;
    double z = draw_band_z(l, rng);
    double v = mean + z * std::sqrt(var);
    if (opts.clamp_nonnegative && v < 0.0) {
        if (clamp_count) ++*clamp_count;
        return 0.0;
    }
    return v;
}

}  // namespace mgrid
