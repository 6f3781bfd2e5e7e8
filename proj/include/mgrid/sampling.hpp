#pragma once

#include <cstdint>

#include "mgrid/fit.hpp"
#include "mgrid/rng.hpp"

namespace mgrid {

// Scenario likelihood bands: the 0-1, 1-2 and 2-3 standard-deviation annuli
// around the mean prediction (roughly 68.2% / 27.2% / 4.2% of the mass).
enum class Likelihood { likely, mid_likely, unlikely };

const char* to_string(Likelihood l);
Likelihood likelihood_from_string(const std::string& s);

struct BandBounds {
    double z_lo;
    double z_hi;
};
BandBounds band_bounds(Likelihood l);

// Standard normal CDF and inverse CDF.
double normal_cdf(double z);
double normal_quantile(double p);

// Inverse-transform draw of a signed standard-normal deviate restricted to
// |z| in the band: a uniform sign times the half-normal quantile conditioned
// on the band.
double draw_band_z(Likelihood l, RngStream& rng);

struct SampleOptions {
    bool clamp_nonnegative = false;
};

// mean + z * sqrt(cov_y + mse) with z from draw_band_z. When clamping is on,
// negative results are set to 0 and counted through *clamp_count.
double sample_band(const FittedModel& m, const ModelInputs& inputs, Likelihood l, RngStream& rng,
                   const SampleOptions& opts = {}, long* clamp_count = nullptr);

}  // namespace mgrid
