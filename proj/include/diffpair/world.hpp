#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diffpair/common.hpp"
#include "diffpair/rng.hpp"
#include "diffpair/schedule.hpp"

namespace diffpair {

enum class ClassRole { known, unknown, fresh };  // "fresh" = test-only new classes

std::string role_name(ClassRole r);
ClassRole role_from_name(const std::string& s);

struct MixtureComponent {
    int class_id = 0;
    double weight = 1.0;  // within-class weight; sums to 1 per class
    Vec mean;
    double variance = 1.0;  // isotropic
};

/// Labeled Gaussian-mixture universe. Classes carry known/unknown/new roles;
/// known classes are exactly ids 1..K. The class prior is uniform over all
/// declared classes.
struct MixtureWorld {
    int dims = 0;
    std::vector<MixtureComponent> components;
    std::map<int, ClassRole> class_roles;
    int known_count = 0;

    std::vector<int> classes_with_role(ClassRole r) const;
    std::vector<int> class_ids() const;
    void validate() const;
};

struct LabeledSample {
    int id = 0;
    Vec features;
    int true_class = 0;  // evaluation only; trainers see TrainView instead
    ClassRole role = ClassRole::known;
};

/// The unlabeled face of a training sample: what trainers and the labeling
/// machinery are allowed to see.
struct TrainView {
    int id = 0;
    const Vec* features = nullptr;
};

struct DatasetSpec {
    int n_known_train = 400;
    double mismatch_rho = 0.6;  // fraction of unknown-class instances in the pool
    int n_test_per_role = 500;
    std::uint64_t rng_seed = 1;
};

struct Dataset {
    std::vector<LabeledSample> train;  // known + unknown roles only
    std::vector<LabeledSample> test;   // all three roles

    std::vector<TrainView> train_views() const;
};

/// Per-component parameters of the time-t marginal: means scaled by
/// sqrt(alpha_t), variances alpha_t*v + (1 - alpha_t).
struct MixtureParams {
    Vec weights;
    std::vector<Vec> means;
    Vec variances;
};

Dataset sample_dataset(const MixtureWorld& world, const DatasetSpec& spec);

/// Ground-truth p(y|x) over all declared classes at t = 0 (uniform prior).
std::map<int, double> bayes_class_posterior(const MixtureWorld& world, const Vec& x);

MixtureParams time_marginal(const MixtureWorld& world, std::optional<int> class_filter,
                            const NoiseSchedule& sched, int t);

/// The default desk-scale world: 7 unit-variance classes (2 known, 3 unknown,
/// 2 new) equally spaced on a circle of radius 6 centered at (55, 55).
MixtureWorld default_desk_world();

/// One isotropic Gaussian class; used by round-trip and identity checks.
MixtureWorld single_gaussian_world(const Vec& mean, double variance);

}  // namespace diffpair
