#include "mgrid/fit.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

namespace mgrid {

namespace {

Eigen::VectorXd residuals(ModelKind kind, const std::vector<Observation>& data,
                          const std::vector<double>& p) {
    Eigen::VectorXd r(data.size());
    for (std::size_t m = 0; m < data.size(); ++m)
        r(m) = eval_model(kind, p, data[m].inputs) - data[m].y;
    return r;
}

// Central-difference Jacobian of the residual vector.
Eigen::MatrixXd jacobian(ModelKind kind, const std::vector<Observation>& data,
                         const std::vector<double>& p, double step_rel) {
    const std::size_t n = data.size(), q = p.size();
    Eigen::MatrixXd J(n, q);
    std::vector<double> probe = p;
    for (std::size_t j = 0; j < q; ++j) {
        double h = step_rel * std::max(1.0, std::abs(p[j]));
        probe[j] = p[j] + h;
        Eigen::VectorXd rp = residuals(kind, data, probe);
        probe[j] = p[j] - h;
        Eigen::VectorXd rm = residuals(kind, data, probe);
        probe[j] = p[j];
        J.col(j) = (rp - rm) / (2.0 * h);
    }
    return J;
}

Eigen::RowVectorXd prediction_jacobian(const FittedModel& m, const ModelInputs& in,
                                       double step_rel) {
    const std::size_t q = m.arity();
    Eigen::RowVectorXd J(q);
    std::vector<double> probe = m.params;
    for (std::size_t j = 0; j < q; ++j) {
        double h = step_rel * std::max(1.0, std::abs(m.params[j]));
        probe[j] = m.params[j] + h;
        double fp = eval_model(m.kind, probe, in);
        probe[j] = m.params[j] - h;
        double fm = eval_model(m.kind, probe, in);
        probe[j] = m.params[j];
        J(j) = (fp - fm) / (2.0 * h);
    }
    return J;
}

}  // namespace

FittedModel fit_model(ModelKind kind, const std::vector<Observation>& data,
                      const std::vector<double>& init, const FitOptions& opts) {
    const std::size_t q = model_arity(kind);
    if (init.size() != q)
        throw UsageError("fit_model: init has wrong arity for " + std::string(to_string(kind)));
    if (data.size() <= q)
        throw UsageError("fit_model: insufficient data (" + std::to_string(data.size()) +
                         " samples for " + std::to_string(q) + " parameters)");

    std::vector<double> p = init;
    Eigen::VectorXd r = residuals(kind, data, p);
    double ssr = r.squaredNorm();

    FittedModel out;
    out.kind = kind;
    out.n_samples = data.size();
    out.converged = false;

    Eigen::MatrixXd J;
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        J = jacobian(kind, data, p, opts.fd_step_rel);
        Eigen::VectorXd g = J.transpose() * r;
        out.grad_norm = g.lpNorm<Eigen::Infinity>();
        out.grad_tol = opts.grad_tolerance * std::max(1.0, ssr);
        if (out.grad_norm <= out.grad_tol) {
            out.converged = true;
            break;
        }

        Eigen::MatrixXd JtJ = J.transpose() * J;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(JtJ);
        Eigen::VectorXd delta;
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
            delta = ldlt.solve(-g);
        } else {
            delta = JtJ.completeOrthogonalDecomposition().solve(-g);
        }

        // Backtracking damping on the Gauss-Newton step.
        double alpha = 1.0;
        bool improved = false;
        for (int half = 0; half < 40; ++half) {
            std::vector<double> cand = p;
            for (std::size_t j = 0; j < q; ++j) cand[j] += alpha * delta(j);
            Eigen::VectorXd rc = residuals(kind, data, cand);
            double ssr_c = rc.squaredNorm();
            if (std::isfinite(ssr_c) && ssr_c < ssr) {
                p = std::move(cand);
                r = std::move(rc);
                ssr = ssr_c;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) break;  // stalled; grad_norm already records the state
    }
    if (!out.converged) {
        J = jacobian(kind, data, p, opts.fd_step_rel);
        Eigen::VectorXd g = J.transpose() * r;
        out.grad_norm = g.lpNorm<Eigen::Infinity>();
        out.grad_tol = opts.grad_tolerance * std::max(1.0, ssr);
        out.converged = out.grad_norm <= out.grad_tol;
    }
    out.iterations = it;
    out.params = p;
    out.mse = ssr / static_cast<double>(data.size() - q);

    // cov_p = mse * (J^T J)^-1, pseudo-inverse on rank deficiency.
    Eigen::MatrixXd JtJ = J.transpose() * J;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(JtJ);
    if (cod.rank() < static_cast<Eigen::Index>(q)) out.rank_deficient = true;
    Eigen::MatrixXd inv = cod.pseudoInverse();
    Eigen::MatrixXd cov = out.mse * 0.5 * (inv + inv.transpose());
    out.cov_p.resize(q * q);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) out.cov_p[i * q + j] = cov(i, j);
    return out;
}

double propagate_uncertainty(const FittedModel& m, const ModelInputs& inputs) {
    const std::size_t q = m.arity();
    if (m.cov_p.size() != q * q) throw UsageError("propagate_uncertainty: model not fitted");
    Eigen::RowVectorXd J = prediction_jacobian(m, inputs, 1e-6);
    Eigen::MatrixXd cov(q, q);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) cov(i, j) = m.cov(i, j);
    double v = (J * cov * J.transpose())(0, 0);
    return v > 0 ? v : 0.0;
}

PredictionBand prediction_band(const FittedModel& m, const ModelInputs& inputs,
                               double confidence) {
    if (!(confidence > 0 && confidence < 1))
        throw UsageError("prediction_band: confidence must lie in (0, 1)");
    if (m.dof() == 0) throw UsageError("prediction_band: nonpositive degrees of freedom");
    PredictionBand b;
    b.mean = m.predict(inputs);
    b.variance = propagate_uncertainty(m, inputs) + m.mse;
    boost::math::students_t_distribution<double> t(static_cast<double>(m.dof()));
    b.lambda = boost::math::quantile(t, 0.5 + confidence / 2.0);
    double half = b.lambda * std::sqrt(b.variance);
    b.lo = b.mean - half;
    b.hi = b.mean + half;
    return b;
}

}  // namespace mgrid
