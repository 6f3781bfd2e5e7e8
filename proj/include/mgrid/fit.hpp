#pragma once

#include <vector>

#include "mgrid/empirical.hpp"

namespace mgrid {

struct Observation {
    ModelInputs inputs;
    double y = 0.0;
};

// Least-squares fit of one empirical model, with the parameter covariance and
// residual mean squared error needed for prediction intervals.
struct FittedModel {
    ModelKind kind = ModelKind::daily_temperature;
    std::vector<double> params;
    std::vector<double> cov_p;  // arity x arity, row-major, symmetric PSD
    double mse = 0.0;
    std::size_t n_samples = 0;

    // Fit diagnostics.
    bool converged = true;
    bool rank_deficient = false;
    int iterations = 0;
    double grad_norm = 0.0;  // max-norm of J^T r at the returned iterate
    double grad_tol = 0.0;   // threshold grad_norm was compared against

    // Wind bucket key (month 1-12 and quarter-day block 0-3); 0/-1 = catch-all.
    int bucket_month = 0;
    int bucket_block = -1;

    std::size_t arity() const { return model_arity(kind); }
    double cov(std::size_t i, std::size_t j) const { return cov_p[i * arity() + j]; }
    std::size_t dof() const { return n_samples > arity() ? n_samples - arity() : 0; }
    double predict(const ModelInputs& in) const { return eval_model(kind, params, in); }
};

struct FitOptions {
    int max_iterations = 200;
    double grad_tolerance = 1e-8;  // scaled by max(1, SSR)
    double fd_step_rel = 1e-6;     // step = fd_step_rel * max(1, |param|)
};

// Damped Gauss-Newton on the sum of squared residuals; central-difference
// Jacobians. Throws UsageError when data.size() <= arity. Non-convergence is
// reported through the `converged` flag, not an exception.
FittedModel fit_model(ModelKind kind, const std::vector<Observation>& data,
                      const std::vector<double>& init, const FitOptions& opts = {});

// First-order propagation of parameter uncertainty to the prediction at
// `inputs`: J cov_p J^T with J the 1 x arity prediction Jacobian.
double propagate_uncertainty(const FittedModel& m, const ModelInputs& inputs);

struct PredictionBand {
    double mean = 0.0;
    double variance = 0.0;  // cov_y + mse
    double lambda = 0.0;    // two-sided Student-t quantile coefficient
    double lo = 0.0;
    double hi = 0.0;
};

// Two-sided prediction interval at the given confidence, with n - arity
// degrees of freedom. Throws UsageError when dof <= 0 or confidence is not in
// (0, 1).
PredictionBand prediction_band(const FittedModel& m, const ModelInputs& inputs,
                               double confidence);

}  // namespace mgrid
