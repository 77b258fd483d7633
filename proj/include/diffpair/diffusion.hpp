#pragma once

#include <optional>

#include "diffpair/oracle.hpp"
#include "diffpair/rng.hpp"

namespace diffpair {

struct GenerationConfig {
    int n_steps = 20;
    double guidance_gamma = 7.5;  // positive pipeline only
    double eta_positive = 1.0;
    double eta_negative = 0.2;
    std::uint64_t rng_seed = 1;

    void validate() const {
        require(n_steps >= 1, "generation: n_steps must be >= 1");
        require(guidance_gamma >= 0.0, "generation: gamma must be >= 0");
        require(eta_positive >= 0.0 && eta_positive <= 1.0 && eta_negative >= 0.0 &&
                    eta_negative <= 1.0,
                "generation: noise strengths must be in [0,1]");
    }
};

enum class Polarity { positive, negative };

struct GeneratedInstance {
    Vec features;
    int prompt_class = 0;
    Polarity polarity = Polarity::positive;
    int seed_id = 0;
};

/// Generated positive set D_P and negative set D_N, every instance linked to
/// its seed sample and prompt class.
struct PairBank {
    std::vector<GeneratedInstance> positives;
    std::vector<GeneratedInstance> negatives;

    const GeneratedInstance* find(Polarity pol, int seed_id, int prompt_class) const;
};

/// x_t = sqrt(alpha_t) x_0 + sqrt(1 - alpha_t) eps.
Vec forward_noise(const Vec& x0, int t, const Vec& epsilon, const NoiseSchedule& sched);

/// One reverse update from t to t_prev:
///   x_prev = sqrt(a_prev/a_t) x_t - sqrt(a_prev) psi(a_t, a_prev, sigma) eps_hat + sigma xi
/// with sigma from sigma_from_strength(eta) and eps_hat guided when a
/// condition is present (unconditional otherwise). Deterministic when eta=0.
Vec reverse_step(const Vec& x_t, int t, int t_prev, std::optional<int> condition, double gamma,
                 double eta, const NoisePredictorOracle& oracle, Rng& rng);

/// One inversion update from t_prev to t (forward Euler: the noise estimate
/// is taken at x_prev with the time-t scale):
///   x_t = sqrt(a_t/a_prev) x_prev + sqrt(a_t) psi(a_t, a_prev, 0) eps(x_prev, t[, y]).
/// Conditional when y is present, unconditional otherwise.
Vec cond_inversion_step(const Vec& x_prev, int t, int t_prev, std::optional<int> y,
                        const NoisePredictorOracle& oracle);

/// Noise the seed to the deepest path anchor (random eps), then run the
/// conditioned reverse with classifier-free guidance and eta_positive.
GeneratedInstance generate_positive(const LabeledSample& seed, int y, const GenerationConfig& cfg,
                                    const TimestepPath& path, const NoisePredictorOracle& oracle,
                                    Rng& rng);

/// Conditional inversion of the seed along the forward path (class-erasing),
/// then the unconditional reverse with eta_negative.
GeneratedInstance generate_negative(const LabeledSample& seed, int y, const GenerationConfig& cfg,
                                    const TimestepPath& path, const NoisePredictorOracle& oracle,
                                    Rng& rng);

/// One positive and one negative per (training sample, known class). Every
/// instance runs under its own derived RNG stream, so the bank is identical
/// regardless of worker count.
PairBank generate_pair_bank(const Dataset& dataset, const MixtureWorld& world,
                            const GenerationConfig& cfg, const NoisePredictorOracle& oracle,
                            int workers = 1);

}  // namespace diffpair
