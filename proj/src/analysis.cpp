#include "diffpair/analysis.hpp"

#include <cmath>

namespace diffpair {

TrajectoryRecord record_inversion(const Vec& x0, std::optional<int> y, const TimestepPath& path,
                                  std::size_t depth, const NoisePredictorOracle& oracle) {
    require(depth <= path.n_segments(), "record_inversion: depth exceeds path length");
    TrajectoryRecord rec;
    rec.anchors.push_back(path.timesteps[0]);
    rec.states.push_back(x0);
    for (std::size_t k = 0; k < depth; ++k) {
        int lo = path.timesteps[k];
        int hi = path.timesteps[k + 1];
        const Vec& x = rec.states.back();
        Vec eps_used = y ? oracle.eps_cond(x, hi, *y) : oracle.eps_uncond(x, hi);
        double a_hi = oracle.schedule().alpha(hi);
        double a_lo = oracle.schedule().alpha(lo);
        Vec next = std::sqrt(a_hi / a_lo) * x;
        axpy(std::sqrt(a_hi) * psi(a_hi, a_lo, 0.0), eps_used, next);

        Vec eps_dest = y ? oracle.eps_cond(next, hi, *y) : oracle.eps_uncond(next, hi);
        rec.deltas.push_back(eps_dest - eps_used);
        rec.eps_values.push_back(std::move(eps_used));
        rec.anchors.push_back(hi);
        rec.states.push_back(std::move(next));
    }
    return rec;
}

TrajectoryRecord record_reverse_uncond(const Vec& x_deep, const TimestepPath& path,
                                       std::size_t depth, const NoisePredictorOracle& oracle) {
    require(depth <= path.n_segments(), "record_reverse_uncond: depth exceeds path length");
    TrajectoryRecord rec;
    rec.deep_to_shallow = true;
    rec.anchors.push_back(path.timesteps[depth]);
    rec.states.push_back(x_deep);
    for (std::size_t k = depth; k-- > 0;) {
        int hi = path.timesteps[k + 1];
        int lo = path.timesteps[k];
        const Vec& x = rec.states.back();
        Vec eps_used = oracle.eps_uncond(x, hi);
        double a_hi = oracle.schedule().alpha(hi);
        double a_lo = oracle.schedule().alpha(lo);
        Vec next = std::sqrt(a_lo / a_hi) * x;
        axpy(-std::sqrt(a_lo) * psi(a_hi, a_lo, 0.0), eps_used, next);

        Vec eps_shallow = oracle.eps_uncond(next, hi);
        rec.deltas.push_back(eps_used - eps_shallow);
        rec.eps_values.push_back(std::move(eps_used));
        rec.anchors.push_back(lo);
        rec.states.push_back(std::move(next));
    }
    return rec;
}

double verify_theorem1(const Vec& x0, int y, std::size_t depth, const TimestepPath& path,
                       const NoisePredictorOracle& oracle) {
    TrajectoryRecord inv = record_inversion(x0, y, path, depth, oracle);
    const NoiseSchedule& sched = oracle.schedule();
    int t = path.timesteps[depth];
    double a_t = sched.alpha(t);

    Vec recon = std::sqrt(a_t) * x0;
    for (std::size_t k = 0; k < depth; ++k) {
        int lo = path.timesteps[k];
        int hi = path.timesteps[k + 1];
        double s = step_size_anchors(sched, t, lo, hi);
        const Vec& x_hi = inv.states[k + 1];
        Vec grad = oracle.score_uncond(x_hi, hi) + oracle.grad_log_class_posterior(x_hi, hi, y);
        axpy(-s, grad, recon);
        axpy(-s / std::sqrt(1.0 - sched.alpha(hi)), inv.deltas[k], recon);
    }
    const Vec& x_t = inv.states[depth];
    double denom = std::max(norm2(x_t), 1e-300);
    return norm2(recon - x_t) / denom;
}

double verify_theorem2(const Vec& x0, int y, std::size_t depth, const TimestepPath& path,
                       const NoisePredictorOracle& oracle) {
    TrajectoryRecord inv = record_inversion(x0, y, path, depth, oracle);
    TrajectoryRecord rev = record_reverse_uncond(inv.states[depth], path, depth, oracle);
    const NoiseSchedule& sched = oracle.schedule();
    int t = path.timesteps[depth];
    double a_t = sched.alpha(t);

    Vec recon = x0;
    for (std::size_t k = 0; k < depth; ++k) {
        int lo = path.timesteps[k];
        int hi = path.timesteps[k + 1];
        double s = step_size_anchors(sched, t, lo, hi);
        axpy(-s / std::sqrt(a_t), oracle.grad_log_class_posterior(inv.states[k], hi, y), recon);
        // rev.states is in traversal order (deepest first): the state at
        // anchor hi = timesteps[k+1] sits at index depth - (k+1).
        Vec gap = oracle.eps_uncond(rev.states[depth - k - 1], hi) -
                  oracle.eps_uncond(inv.states[k], hi);
        axpy(-s / std::sqrt(a_t * (1.0 - sched.alpha(hi))), gap, recon);
    }
    const Vec& x_out = rev.states[depth];
    double denom = std::max(norm2(x_out), 1e-300);
    return norm2(recon - x_out) / denom;
}

Vec mean_delta_profile(const NoisePredictorOracle& oracle, const TimestepPath& path, int n_probes,
                       std::uint64_t seed) {
    require(n_probes >= 1, "mean_delta_profile: need at least one probe");
    const MixtureWorld& world = oracle.world();
    auto known = world.classes_with_role(ClassRole::known);
    require(!known.empty(), "mean_delta_profile: world has no known classes");
    Rng rng(mix_seed(seed, 0x64656c7461ULL));
    Vec mean(path.n_segments(), 0.0);
    for (int probe = 0; probe < n_probes; ++probe) {
        int y = known[static_cast<std::size_t>(rng.below(known.size()))];
        Vec x0;
        for (const auto& c : world.components)
            if (c.class_id == y) {
                x0 = c.mean;
                double sd = std::sqrt(c.variance);
                for (auto& v : x0) v += sd * rng.gaussian();
                break;
            }
        auto stats = delta_stats(record_inversion(x0, y, path, path.n_segments(), oracle));
        for (std::size_t k = 0; k < mean.size(); ++k)
            if (stats[k]) mean[k] += *stats[k] / n_probes;
    }
    return mean;
}

std::vector<std::optional<double>> delta_stats(const TrajectoryRecord& traj) {
    require(traj.states.size() >= 2, "delta_stats: trajectory needs at least two states");
    std::vector<std::optional<double>> out;
    out.reserve(traj.n_steps());
    for (std::size_t k = 0; k < traj.n_steps(); ++k) {
        // deltas are (deeper - shallower); recover the step's other endpoint
        // from the one that was actually used.
        const Vec& used = traj.eps_values[k];
        Vec other = used;
        axpy(traj.deep_to_shallow ? -1.0 : 1.0, traj.deltas[k], other);
        double nu = norm2(used);
        double no = norm2(other);
        if (nu == 0.0 || no == 0.0) {
            out.push_back(std::nullopt);
        } else {
            out.push_back(1.0 - dot(used, other) / (nu * no));
        }
    }
    return out;
}

}  // namespace diffpair
