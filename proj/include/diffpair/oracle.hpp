#pragma once

#include <optional>

#include "diffpair/schedule.hpp"
#include "diffpair/world.hpp"

namespace diffpair {

/// Exact noise predictor over a mixture world: eps(x, t) and eps(x, t, y)
/// are defined through the score relation eps = -sqrt(1 - alpha_t) * grad
/// log p_t(x), with p_t the time-t marginal of the world (optionally
/// restricted to one class). Stateless; identical inputs give identical
/// outputs.
class NoisePredictorOracle {
public:
    NoisePredictorOracle(const MixtureWorld& world, const NoiseSchedule& sched)
        : world_(world), sched_(sched) {}

    double log_density(const Vec& x, int t, std::optional<int> cond = std::nullopt) const;

    Vec score_uncond(const Vec& x, int t) const;
    Vec score_cond(const Vec& x, int t, int y) const;

    Vec eps_uncond(const Vec& x, int t) const;
    Vec eps_cond(const Vec& x, int t, int y) const;

    /// Classifier-free guidance: eps_u + gamma * (eps_c - eps_u).
    Vec eps_guided(const Vec& x, int t, int y, double gamma) const;

    /// grad log p_t(y|x) = score_cond - score_uncond.
    Vec grad_log_class_posterior(const Vec& x, int t, int y) const;

    const MixtureWorld& world() const { return world_; }
    const NoiseSchedule& schedule() const { return sched_; }

private:
    Vec score_of(const MixtureParams& p, const Vec& x) const;

    const MixtureWorld& world_;
    const NoiseSchedule& sched_;
};

}  // namespace diffpair
