#pragma once

#include <vector>

#include "diffpair/common.hpp"

namespace diffpair {

/// Variance schedule and every coefficient derived from it.
/// alphas_cum[t] = prod_{i<=t} (1 - beta_i), with alphas_cum[0] = 1.
struct NoiseSchedule {
    int T = 0;
    Vec betas;       // size T, each in [0, 1); index i holds beta_{i+1}
    Vec alphas_cum;  // size T + 1

    double alpha(int t) const {
        require(t >= 0 && t <= T, "schedule: step out of range");
        return alphas_cum[static_cast<std::size_t>(t)];
    }
};

enum class PathDirection { forward, reverse };

/// Strided DDIM anchor sequence. Stored ascending; `direction` says how
/// the anchors are traversed (forward = inversion, reverse = generation).
struct TimestepPath {
    std::vector<int> timesteps;  // strictly increasing, first is 0
    PathDirection direction = PathDirection::forward;

    int deepest() const { return timesteps.back(); }
    std::size_t n_segments() const { return timesteps.size() - 1; }
};

// Construct from explicit per-step variances. Betas may be zero (degenerate
// flat segments used by a couple of edge-case checks); build_linear_schedule
// enforces the strictly positive range.
NoiseSchedule schedule_from_betas(const Vec& betas);

NoiseSchedule build_linear_schedule(int T, double beta_start, double beta_end);

/// psi(a_t, a_prev, sigma) = sqrt(1/a_t - 1) - sqrt((1 - a_prev - sigma^2)/a_prev).
double psi(double alpha_t, double alpha_prev, double sigma);

/// Maps a noise-strength multiplier eta to the per-step sigma_t:
///   sigma = eta * sqrt((1-a_prev)/(1-a_t)) * sqrt(1 - a_t/a_prev).
/// For eta <= 1 the result always satisfies sigma^2 <= 1 - a_prev.
double sigma_from_strength(double eta, const NoiseSchedule& sched, int t, int t_prev);

/// Gradient-step magnitude s_i = sqrt(a_t (1-a_{i+1})) * psi(a_{i+1}, a_i, 0)
/// for consecutive schedule steps i, i+1 under anchor t.
double step_size_s(const NoiseSchedule& sched, int t, int i);

/// Same step size over an arbitrary anchor pair lo < hi of a strided path.
double step_size_anchors(const NoiseSchedule& sched, int t, int lo, int hi);

TimestepPath make_path(const NoiseSchedule& sched, int n_steps, PathDirection direction);

}  // namespace diffpair
