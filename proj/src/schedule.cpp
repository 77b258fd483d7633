#include "diffpair/schedule.hpp"

#include <cmath>

namespace diffpair {

NoiseSchedule schedule_from_betas(const Vec& betas) {
    require(!betas.empty(), "schedule: needs at least one step");
    NoiseSchedule s;
    s.T = static_cast<int>(betas.size());
    s.betas = betas;
    s.alphas_cum.assign(betas.size() + 1, 1.0);
    double prod = 1.0;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        require(betas[i] >= 0.0 && betas[i] < 1.0, "schedule: beta outside [0,1)");
        prod *= 1.0 - betas[i];
        s.alphas_cum[i + 1] = prod;
    }
    return s;
}

NoiseSchedule build_linear_schedule(int T, double beta_start, double beta_end) {
    require(T >= 1, "build_linear_schedule: T must be positive");
    require(beta_start > 0.0 && beta_end < 1.0 && beta_start <= beta_end,
            "build_linear_schedule: need 0 < beta_start <= beta_end < 1");
    Vec betas(static_cast<std::size_t>(T));
    for (int i = 0; i < T; ++i) {
        double frac = (T == 1) ? 0.0 : static_cast<double>(i) / (T - 1);
        betas[static_cast<std::size_t>(i)] = beta_start + (beta_end - beta_start) * frac;
    }
    return schedule_from_betas(betas);
}

double psi(double alpha_t, double alpha_prev, double sigma) {
    require(alpha_t > 0.0 && alpha_t <= alpha_prev && alpha_prev <= 1.0,
            "psi: need 0 < alpha_t <= alpha_prev <= 1");
    double rad = 1.0 - alpha_prev - sigma * sigma;
    if (rad < 0.0) throw std::domain_error("psi: sigma^2 exceeds 1 - alpha_prev");
    // same algebraic form for both terms so equal alphas cancel exactly
    return std::sqrt((1.0 - alpha_t) / alpha_t) - std::sqrt(rad / alpha_prev);
}

double sigma_from_strength(double eta, const NoiseSchedule& sched, int t, int t_prev) {
    require(eta >= 0.0, "sigma_from_strength: eta must be >= 0");
    require(t > t_prev && t_prev >= 0, "sigma_from_strength: need t > t_prev >= 0");
    double a_t = sched.alpha(t);
    double a_p = sched.alpha(t_prev);
    if (a_t == a_p) return 0.0;  // flat segment, no noise budget
    return eta * std::sqrt((1.0 - a_p) / (1.0 - a_t)) * std::sqrt(1.0 - a_t / a_p);
}

double step_size_anchors(const NoiseSchedule& sched, int t, int lo, int hi) {
    require(0 <= lo && lo < hi && hi <= t && t <= sched.T,
            "step_size: need 0 <= lo < hi <= t <= T");
    double a_t = sched.alpha(t);
    double a_hi = sched.alpha(hi);
    double a_lo = sched.alpha(lo);
    return std::sqrt(a_t * (1.0 - a_hi)) * psi(a_hi, a_lo, 0.0);
}

double step_size_s(const NoiseSchedule& sched, int t, int i) {
    require(i >= 0 && i < t, "step_size_s: need 0 <= i < t");
    return step_size_anchors(sched, t, i, i + 1);
}

TimestepPath make_path(const NoiseSchedule& sched, int n_steps, PathDirection direction) {
    require(n_steps >= 1 && n_steps <= sched.T, "make_path: need 1 <= n_steps <= T");
    TimestepPath path;
    path.direction = direction;
    path.timesteps.reserve(static_cast<std::size_t>(n_steps) + 1);
    for (int i = 0; i <= n_steps; ++i) {
        int t = static_cast<int>(std::llround(static_cast<double>(i) * sched.T / n_steps));
        if (path.timesteps.empty() || path.timesteps.back() != t) path.timesteps.push_back(t);
    }
    return path;
}

}  // namespace diffpair
