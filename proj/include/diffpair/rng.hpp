#pragma once

#include <cstdint>

#include "diffpair/common.hpp"

namespace diffpair {

// Deterministic 64-bit stream (splitmix64). Used everywhere instead of
// std distributions so that draw sequences are identical across platforms
// and independent of how work is scheduled.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1], safe as a log argument.
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // One Gaussian per call (Box-Muller, cosine branch); no cached spare,
    // so the draw count per sample is fixed.
    double gaussian() {
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    Vec gaussian_vec(std::size_t n) {
        Vec v(n);
        for (auto& x : v) x = gaussian();
        return v;
    }

    // Unbiased enough for shuffles/selection; deterministic by construction.
    std::uint64_t below(std::uint64_t bound) { return next_u64() % bound; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Stream derivation for independent per-task generators: hash of the task
// identity mixed into the run seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    Rng r(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)));
    r.next_u64();
    return r.next_u64() ^ b;
}

inline std::uint64_t derive_stream(std::uint64_t global_seed, std::uint64_t seed_id,
                                   std::uint64_t prompt_class, std::uint64_t polarity) {
    std::uint64_t h = mix_seed(global_seed, 0x706169724247ULL);
    h = mix_seed(h, seed_id);
    h = mix_seed(h, prompt_class);
    h = mix_seed(h, polarity);
    return h;
}

}  // namespace diffpair
