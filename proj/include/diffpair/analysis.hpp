#pragma once

#include <optional>

#include "diffpair/diffusion.hpp"

namespace diffpair {

/// States, noise estimates and per-step discrepancies along one traversal.
/// anchors/states are in traversal order; step k joins states[k] -> states[k+1].
/// deltas[k] is the noise-estimate gap between the two endpoints of step k,
/// both evaluated at the step's deeper timestep:
///   delta_k = eps(x_at_deeper, t_deep, .) - eps(x_at_shallower, t_deep, .).
struct TrajectoryRecord {
    std::vector<int> anchors;
    std::vector<Vec> states;
    std::vector<Vec> eps_values;  // estimate actually used by each step
    std::vector<Vec> deltas;
    bool deep_to_shallow = false;  // true for reverse traversals

    std::size_t n_steps() const { return states.empty() ? 0 : states.size() - 1; }
};

/// Deterministic conditional (or unconditional, when y is absent) inversion
/// of x0 through the first `depth` segments of the path, with full recording.
TrajectoryRecord record_inversion(const Vec& x0, std::optional<int> y, const TimestepPath& path,
                                  std::size_t depth, const NoisePredictorOracle& oracle);

/// Deterministic unconditional reverse from x_deep at the path's depth-th
/// anchor back to step 0, with full recording.
TrajectoryRecord record_reverse_uncond(const Vec& x_deep, const TimestepPath& path,
                                       std::size_t depth, const NoisePredictorOracle& oracle);

/// Relative residual of the progressive-movement identity: the inverted noise
/// vector x_t must equal
///   sqrt(a_t) x0 - sum_k s_k [grad log p(x) + grad log p(y|x)]
///                - sum_k s_k / sqrt(1 - a_{hi(k)}) * delta_k,
/// with the gradients of the step's deeper-time marginal taken at the step's
/// deeper state (the point the delta term shifts the estimate onto).
double verify_theorem1(const Vec& x0, int y, std::size_t depth, const TimestepPath& path,
                       const NoisePredictorOracle& oracle);

/// Relative residual of the recovery identity for the full negative pipeline
/// (conditional inversion then unconditional reverse, eta = 0): the output
/// x~0 must equal
///   x0 - (1/sqrt(a_t)) sum_k s_k grad log p(y|x_k)
///      - sum_k s_k / sqrt(a_t (1 - a_{hi(k)})) * [eps(x~_{hi}, hi) - eps(x_lo, hi)],
/// the correction term being the unconditional estimate gap between the
/// reverse and inversion trajectories at matched timesteps.
double verify_theorem2(const Vec& x0, int y, std::size_t depth, const TimestepPath& path,
                       const NoisePredictorOracle& oracle);

/// Per-step 1 - cosine similarity between the two endpoint estimates of each
/// step. Steps whose estimates have zero norm are reported as nullopt.
std::vector<std::optional<double>> delta_stats(const TrajectoryRecord& traj);

/// Mean per-step (1 - cos) profile over n_probes conditional inversions, each
/// of a random known-class sample inverted with its own class as the prompt
/// (the class-erasing case the discrepancy study is about).
Vec mean_delta_profile(const NoisePredictorOracle& oracle, const TimestepPath& path, int n_probes,
                       std::uint64_t seed);

}  // namespace diffpair
