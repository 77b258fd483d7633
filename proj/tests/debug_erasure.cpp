// Dev scratch: per-seed erasure diagnostics.
#include <cmath>
#include <cstdio>

#include "diffpair/analysis.hpp"

using namespace diffpair;

int main() {
    MixtureWorld world = default_desk_world();
    for (double beta_end : {0.06, 0.10}) {
        NoiseSchedule sched = build_linear_schedule(100, 1e-4, beta_end);
        NoisePredictorOracle oracle(world, sched);
        TimestepPath fwd = make_path(sched, 20, PathDirection::forward);
        GenerationConfig gen;

        Rng rng(42);
        int eroded = 0, saturated = 0, increased = 0;
        std::printf("==== beta_end %.2f\n", beta_end);
        for (int i = 0; i < 40; ++i) {
            int y = 1 + static_cast<int>(rng.below(2));
            Vec mu;
            for (const auto& c : world.components)
                if (c.class_id == y) mu = c.mean;
            Vec u = {rng.gaussian(), rng.gaussian()};
            LabeledSample seed{i, {mu[0] + u[0], mu[1] + u[1]}, y, ClassRole::known};
            Rng stream(derive_stream(9, i, y, 1));
            GeneratedInstance g = generate_negative(seed, y, gen, fwd, oracle, stream);
            double before = bayes_class_posterior(world, seed.features)[y];
            double after = bayes_class_posterior(world, g.features)[y];
            eroded += after < before;
            saturated += (after == before);
            increased += after > before;
            if (i < 15)
                std::printf(
                    "  y=%d u=(%+.2f,%+.2f) before=%.12f after=%.12f disp=%.2f %s\n", y, u[0],
                    u[1], before, after, norm2(g.features - seed.features),
                    after < before ? "ERODED" : (after == before ? "TIE" : "UP"));
        }
        std::printf("  eroded %d, exactly-equal %d, increased %d of 40\n", eroded, saturated,
                    increased);
    }
    return 0;
}
