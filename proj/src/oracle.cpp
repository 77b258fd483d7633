#include "diffpair/oracle.hpp"

#include <cmath>

namespace diffpair {

namespace {

// Log weights + per-component log densities of a time-t mixture at x.
Vec component_log_terms(const MixtureParams& p, const Vec& x) {
    Vec logs(p.weights.size());
    double d = static_cast<double>(x.size());
    for (std::size_t k = 0; k < p.weights.size(); ++k) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double diff = x[i] - p.means[k][i];
            d2 += diff * diff;
        }
        logs[k] = std::log(p.weights[k]) - 0.5 * d2 / p.variances[k] -
                  0.5 * d * std::log(2.0 * M_PI * p.variances[k]);
    }
    return logs;
}

}  // namespace

double NoisePredictorOracle::log_density(const Vec& x, int t, std::optional<int> cond) const {
    require(static_cast<int>(x.size()) == world_.dims, "oracle: dimension mismatch");
    MixtureParams p = time_marginal(world_, cond, sched_, t);
    return log_sum_exp(component_log_terms(p, x));
}

Vec NoisePredictorOracle::score_of(const MixtureParams& p, const Vec& x) const {
    // Responsibilities in log space with max subtraction; deep-t densities
    // underflow otherwise.
    Vec logs = component_log_terms(p, x);
    double lz = log_sum_exp(logs);
    Vec score(x.size(), 0.0);
    for (std::size_t k = 0; k < p.weights.size(); ++k) {
        double r = std::exp(logs[k] - lz);
        for (std::size_t i = 0; i < x.size(); ++i)
            score[i] -= r * (x[i] - p.means[k][i]) / p.variances[k];
    }
    return score;
}

Vec NoisePredictorOracle::score_uncond(const Vec& x, int t) const {
    require(static_cast<int>(x.size()) == world_.dims, "oracle: dimension mismatch");
    return score_of(time_marginal(world_, std::nullopt, sched_, t), x);
}

Vec NoisePredictorOracle::score_cond(const Vec& x, int t, int y) const {
    require(static_cast<int>(x.size()) == world_.dims, "oracle: dimension mismatch");
    return score_of(time_marginal(world_, y, sched_, t), x);
}

Vec NoisePredictorOracle::eps_uncond(const Vec& x, int t) const {
    double c = -std::sqrt(1.0 - sched_.alpha(t));
    return c * score_uncond(x, t);
}

Vec NoisePredictorOracle::eps_cond(const Vec& x, int t, int y) const {
    double c = -std::sqrt(1.0 - sched_.alpha(t));
    return c * score_cond(x, t, y);
}

Vec NoisePredictorOracle::eps_guided(const Vec& x, int t, int y, double gamma) const {
    require(gamma >= 0.0, "eps_guided: gamma must be >= 0");
    Vec eu = eps_uncond(x, t);
    Vec ec = eps_cond(x, t, y);
    Vec out = eu;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += gamma * (ec[i] - eu[i]);
    return out;
}

Vec NoisePredictorOracle::grad_log_class_posterior(const Vec& x, int t, int y) const {
    return score_cond(x, t, y) - score_uncond(x, t);
}

}  // namespace diffpair
