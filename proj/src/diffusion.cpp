#include "diffpair/diffusion.hpp"

#include <cmath>
#include <thread>

namespace diffpair {

const GeneratedInstance* PairBank::find(Polarity pol, int seed_id, int prompt_class) const {
    const auto& side = (pol == Polarity::positive) ? positives : negatives;
    for (const auto& g : side)
        if (g.seed_id == seed_id && g.prompt_class == prompt_class) return &g;
    return nullptr;
}

Vec forward_noise(const Vec& x0, int t, const Vec& epsilon, const NoiseSchedule& sched) {
    require(epsilon.size() == x0.size(), "forward_noise: dimension mismatch");
    double a = sched.alpha(t);
    Vec out = std::sqrt(a) * x0;
    axpy(std::sqrt(1.0 - a), epsilon, out);
    return out;
}

Vec reverse_step(const Vec& x_t, int t, int t_prev, std::optional<int> condition, double gamma,
                 double eta, const NoisePredictorOracle& oracle, Rng& rng) {
    require(t > t_prev, "reverse_step: need t > t_prev");
    const NoiseSchedule& sched = oracle.schedule();
    double a_t = sched.alpha(t);
    double a_p = sched.alpha(t_prev);
    double sigma = sigma_from_strength(eta, sched, t, t_prev);

    Vec eps_hat = condition ? oracle.eps_guided(x_t, t, *condition, gamma)
                            : oracle.eps_uncond(x_t, t);

    Vec out = std::sqrt(a_p / a_t) * x_t;
    axpy(-std::sqrt(a_p) * psi(a_t, a_p, sigma), eps_hat, out);
    if (sigma > 0.0) {
        for (auto& xi : out) xi += sigma * rng.gaussian();
    }
    return out;
}

Vec cond_inversion_step(const Vec& x_prev, int t, int t_prev, std::optional<int> y,
                        const NoisePredictorOracle& oracle) {
    require(t > t_prev, "cond_inversion_step: need t > t_prev");
    const NoiseSchedule& sched = oracle.schedule();
    double a_t = sched.alpha(t);
    double a_p = sched.alpha(t_prev);

    Vec eps = y ? oracle.eps_cond(x_prev, t, *y) : oracle.eps_uncond(x_prev, t);
    Vec out = std::sqrt(a_t / a_p) * x_prev;
    axpy(std::sqrt(a_t) * psi(a_t, a_p, 0.0), eps, out);
    return out;
}

namespace {

void require_known(const NoisePredictorOracle& oracle, int y) {
    auto it = oracle.world().class_roles.find(y);
    require(it != oracle.world().class_roles.end() && it->second == ClassRole::known,
            "generation: prompt class must be known-role");
}

}  // namespace

GeneratedInstance generate_positive(const LabeledSample& seed, int y, const GenerationConfig& cfg,
                                    const TimestepPath& path, const NoisePredictorOracle& oracle,
                                    Rng& rng) {
    require_known(oracle, y);
    Vec eps = rng.gaussian_vec(seed.features.size());
    Vec x = forward_noise(seed.features, path.deepest(), eps, oracle.schedule());
    const auto& ts = path.timesteps;
    for (std::size_t k = ts.size(); k-- > 1;)
        x = reverse_step(x, ts[k], ts[k - 1], y, cfg.guidance_gamma, cfg.eta_positive, oracle, rng);
    return {x, y, Polarity::positive, seed.id};
}

GeneratedInstance generate_negative(const LabeledSample& seed, int y, const GenerationConfig& cfg,
                                    const TimestepPath& path, const NoisePredictorOracle& oracle,
                                    Rng& rng) {
    require_known(oracle, y);
    const auto& ts = path.timesteps;
    Vec x = seed.features;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k)
        x = cond_inversion_step(x, ts[k + 1], ts[k], y, oracle);
    for (std::size_t k = ts.size(); k-- > 1;)
        x = reverse_step(x, ts[k], ts[k - 1], std::nullopt, 0.0, cfg.eta_negative, oracle, rng);
    return {x, y, Polarity::negative, seed.id};
}

PairBank generate_pair_bank(const Dataset& dataset, const MixtureWorld& world,
                            const GenerationConfig& cfg, const NoisePredictorOracle& oracle,
                            int workers) {
    cfg.validate();
    require(!dataset.train.empty(), "generate_pair_bank: dataset is empty");
    require(workers >= 1, "generate_pair_bank: workers must be >= 1");
    auto known = world.classes_with_role(ClassRole::known);
    TimestepPath fwd = make_path(oracle.schedule(), cfg.n_steps, PathDirection::forward);
    TimestepPath rev = make_path(oracle.schedule(), cfg.n_steps, PathDirection::reverse);

    std::size_t n_tasks = dataset.train.size() * known.size();
    PairBank bank;
    bank.positives.resize(n_tasks);
    bank.negatives.resize(n_tasks);

    auto run_task = [&](std::size_t task) {
        const LabeledSample& seed = dataset.train[task / known.size()];
        int y = known[task % known.size()];
        Rng rp(derive_stream(cfg.rng_seed, static_cast<std::uint64_t>(seed.id),
                             static_cast<std::uint64_t>(y), 0));
        Rng rn(derive_stream(cfg.rng_seed, static_cast<std::uint64_t>(seed.id),
                             static_cast<std::uint64_t>(y), 1));
        bank.positives[task] = generate_positive(seed, y, cfg, rev, oracle, rp);
        bank.negatives[task] = generate_negative(seed, y, cfg, fwd, oracle, rn);
    };

    if (workers == 1) {
        for (std::size_t task = 0; task < n_tasks; ++task) run_task(task);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (std::size_t task = static_cast<std::size_t>(w); task < n_tasks;
                     task += static_cast<std::size_t>(workers))
                    run_task(task);
            });
        }
        for (auto& th : pool) th.join();
    }
    return bank;
}

}  // namespace diffpair
