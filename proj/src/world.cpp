#include "diffpair/world.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace diffpair {

std::string role_name(ClassRole r) {
    switch (r) {
        case ClassRole::known: return "known";
        case ClassRole::unknown: return "unknown";
        case ClassRole::fresh: return "new";
    }
    return "?";
}

ClassRole role_from_name(const std::string& s) {
    if (s == "known") return ClassRole::known;
    if (s == "unknown") return ClassRole::unknown;
    if (s == "new") return ClassRole::fresh;
    throw std::invalid_argument("unknown class role '" + s + "'");
}

std::vector<int> MixtureWorld::classes_with_role(ClassRole r) const {
    std::vector<int> out;
    for (const auto& [id, role] : class_roles)
        if (role == r) out.push_back(id);
    return out;
}

std::vector<int> MixtureWorld::class_ids() const {
    std::vector<int> out;
    for (const auto& [id, role] : class_roles) out.push_back(id);
    return out;
}

void MixtureWorld::validate() const {
    require(dims >= 1, "world: dims must be >= 1");
    require(!components.empty(), "world: no components");
    std::map<int, double> weight_sum;
    for (const auto& c : components) {
        require(class_roles.count(c.class_id) != 0, "world: component references undeclared class");
        require(c.variance > 0.0, "world: variance must be strictly positive");
        require(static_cast<int>(c.mean.size()) == dims, "world: component mean has wrong dims");
        weight_sum[c.class_id] += c.weight;
    }
    for (const auto& [id, w] : weight_sum)
        require(std::abs(w - 1.0) <= 1e-12, "world: class weights must sum to 1");
    for (const auto& [id, role] : class_roles)
        require(weight_sum.count(id) != 0, "world: class declared without components");
    // Known classes must be exactly the ids 1..K.
    auto known = classes_with_role(ClassRole::known);
    require(static_cast<int>(known.size()) == known_count, "world: known_count mismatch");
    for (int i = 0; i < known_count; ++i)
        require(known[static_cast<std::size_t>(i)] == i + 1, "world: known classes must be ids 1..K");
}

std::vector<TrainView> Dataset::train_views() const {
    std::vector<TrainView> v;
    v.reserve(train.size());
    for (const auto& s : train) v.push_back({s.id, &s.features});
    return v;
}

namespace {

Vec draw_from_class(const MixtureWorld& world, int class_id, Rng& rng) {
    // Pick a component by weight, then draw from its Gaussian.
    double u = rng.uniform();
    const MixtureComponent* chosen = nullptr;
    double acc = 0.0;
    for (const auto& c : world.components) {
        if (c.class_id != class_id) continue;
        acc += c.weight;
        chosen = &c;
        if (u < acc) break;
    }
    require(chosen != nullptr, "draw_from_class: class has no components");
    Vec x = chosen->mean;
    double sd = std::sqrt(chosen->variance);
    for (auto& xi : x) xi += sd * rng.gaussian();
    return x;
}

void append_samples(const MixtureWorld& world, const std::vector<int>& classes, ClassRole role,
                    int count, int& next_id, Rng& rng, std::vector<LabeledSample>& out) {
    for (int i = 0; i < count; ++i) {
        int cls = classes[static_cast<std::size_t>(rng.below(classes.size()))];
        out.push_back({next_id++, draw_from_class(world, cls, rng), cls, role});
    }
}

}  // namespace

Dataset sample_dataset(const MixtureWorld& world, const DatasetSpec& spec) {
    world.validate();
    require(spec.mismatch_rho >= 0.0 && spec.mismatch_rho < 1.0, "dataset: rho must be in [0,1)");
    auto known = world.classes_with_role(ClassRole::known);
    auto unknown = world.classes_with_role(ClassRole::unknown);
    auto fresh = world.classes_with_role(ClassRole::fresh);
    require(!known.empty(), "dataset: world declares no known classes");

    int n_unknown = static_cast<int>(
        std::llround(spec.n_known_train * spec.mismatch_rho / (1.0 - spec.mismatch_rho)));
    if (n_unknown > 0)
        require(!unknown.empty(), "dataset: rho > 0 but world declares no unknown classes");

    Dataset ds;
    int next_id = 0;
    Rng rng(mix_seed(spec.rng_seed, 0x647261772dULL));
    append_samples(world, known, ClassRole::known, spec.n_known_train, next_id, rng, ds.train);
    if (n_unknown > 0)
        append_samples(world, unknown, ClassRole::unknown, n_unknown, next_id, rng, ds.train);
    rng.shuffle(ds.train);

    append_samples(world, known, ClassRole::known, spec.n_test_per_role, next_id, rng, ds.test);
    if (!unknown.empty())
        append_samples(world, unknown, ClassRole::unknown, spec.n_test_per_role, next_id, rng, ds.test);
    if (!fresh.empty())
        append_samples(world, fresh, ClassRole::fresh, spec.n_test_per_role, next_id, rng, ds.test);
    return ds;
}

std::map<int, double> bayes_class_posterior(const MixtureWorld& world, const Vec& x) {
    require(static_cast<int>(x.size()) == world.dims, "posterior: dimension mismatch");
    auto ids = world.class_ids();
    Vec logp(ids.size(), 0.0);
    for (std::size_t k = 0; k < ids.size(); ++k) {
        Vec terms;
        for (const auto& c : world.components) {
            if (c.class_id != ids[k]) continue;
            double d2 = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                double diff = x[i] - c.mean[i];
                d2 += diff * diff;
            }
            terms.push_back(std::log(c.weight) - 0.5 * d2 / c.variance -
                            0.5 * world.dims * std::log(2.0 * M_PI * c.variance));
        }
        logp[k] = log_sum_exp(terms);
    }
    double lz = log_sum_exp(logp);
    std::map<int, double> post;
    for (std::size_t k = 0; k < ids.size(); ++k) post[ids[k]] = std::exp(logp[k] - lz);
    return post;
}

MixtureParams time_marginal(const MixtureWorld& world, std::optional<int> class_filter,
                            const NoiseSchedule& sched, int t) {
    if (class_filter) require(world.class_roles.count(*class_filter) != 0, "time_marginal: unknown class id");
    double a = sched.alpha(t);
    double sq = std::sqrt(a);
    double n_classes = static_cast<double>(world.class_roles.size());

    MixtureParams p;
    double total = 0.0;
    for (const auto& c : world.components) {
        if (class_filter && c.class_id != *class_filter) continue;
        double w = class_filter ? c.weight : c.weight / n_classes;
        p.weights.push_back(w);
        p.means.push_back(sq * c.mean);
        p.variances.push_back(a * c.variance + (1.0 - a));
        total += w;
    }
    for (auto& w : p.weights) w /= total;
    return p;
}

MixtureWorld default_desk_world() {
    MixtureWorld w;
    w.dims = 2;
    w.known_count = 2;
    const double radius = 6.0;
    const Vec center = {55.0, 55.0};
    // Slot order around the circle: known classes face the origin and new
    // classes sit between unknown ones, so every test sector is flanked by
    // training material. First slot at 225 degrees (pointing at the origin).
    const int slot_class[7] = {1, 2, 3, 6, 4, 7, 5};
    for (int slot = 0; slot < 7; ++slot) {
        int k = slot_class[slot];
        double ang = M_PI * 1.25 + 2.0 * M_PI * slot / 7.0;
        MixtureComponent c;
        c.class_id = k;
        c.weight = 1.0;
        c.mean = {center[0] + radius * std::cos(ang), center[1] + radius * std::sin(ang)};
        c.variance = 1.0;
        w.components.push_back(c);
        w.class_roles[k] = (k <= 2) ? ClassRole::known
                         : (k <= 5) ? ClassRole::unknown
                                    : ClassRole::fresh;
    }
    w.validate();
    return w;
}

MixtureWorld single_gaussian_world(const Vec& mean, double variance) {
    MixtureWorld w;
    w.dims = static_cast<int>(mean.size());
    w.known_count = 1;
    w.components.push_back({1, 1.0, mean, variance});
    w.class_roles[1] = ClassRole::known;
    w.validate();
    return w;
}

}  // namespace diffpair
