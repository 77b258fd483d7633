#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "diffpair/analysis.hpp"
#include "diffpair/cli.hpp"

namespace py = pybind11;
using namespace diffpair;

namespace {

// RNG-consuming pipelines are exposed with explicit integer seeds.
GeneratedInstance py_generate(const MixtureWorld& world, const NoiseSchedule& sched,
                              const LabeledSample& seed, int y, const GenerationConfig& cfg,
                              bool positive, std::uint64_t stream_seed) {
    NoisePredictorOracle oracle(world, sched);
    TimestepPath path = make_path(sched, cfg.n_steps,
                                  positive ? PathDirection::reverse : PathDirection::forward);
    Rng rng(stream_seed);
    return positive ? generate_positive(seed, y, cfg, path, oracle, rng)
                    : generate_negative(seed, y, cfg, path, oracle, rng);
}

}  // namespace

PYBIND11_MODULE(_diffpair, m) {
    m.doc() = "analytic Gaussian-mixture diffusion testbed: pair synthesis and "
              "open-set classifier training";

    py::class_<NoiseSchedule>(m, "NoiseSchedule")
        .def_readonly("T", &NoiseSchedule::T)
        .def_readonly("betas", &NoiseSchedule::betas)
        .def_readonly("alphas_cum", &NoiseSchedule::alphas_cum)
        .def("alpha", &NoiseSchedule::alpha);

    py::enum_<PathDirection>(m, "PathDirection")
        .value("forward", PathDirection::forward)
        .value("reverse", PathDirection::reverse);

    py::class_<TimestepPath>(m, "TimestepPath")
        .def_readonly("timesteps", &TimestepPath::timesteps)
        .def("deepest", &TimestepPath::deepest);

    m.def("build_linear_schedule", &build_linear_schedule, py::arg("T"), py::arg("beta_start"),
          py::arg("beta_end"));
    m.def("schedule_from_betas", &schedule_from_betas);
    m.def("psi", &psi, py::arg("alpha_t"), py::arg("alpha_prev"), py::arg("sigma"));
    m.def("sigma_from_strength", &sigma_from_strength);
    m.def("step_size_s", &step_size_s);
    m.def("make_path", &make_path, py::arg("schedule"), py::arg("n_steps"),
          py::arg("direction") = PathDirection::forward);

    py::enum_<ClassRole>(m, "ClassRole")
        .value("known", ClassRole::known)
        .value("unknown", ClassRole::unknown)
        .value("new_class", ClassRole::fresh);

    py::class_<MixtureComponent>(m, "MixtureComponent")
        .def(py::init<>())
        .def_readwrite("class_id", &MixtureComponent::class_id)
        .def_readwrite("weight", &MixtureComponent::weight)
        .def_readwrite("mean", &MixtureComponent::mean)
        .def_readwrite("variance", &MixtureComponent::variance);

    py::class_<MixtureWorld>(m, "MixtureWorld")
        .def(py::init<>())
        .def_readwrite("dims", &MixtureWorld::dims)
        .def_readwrite("components", &MixtureWorld::components)
        .def_readwrite("class_roles", &MixtureWorld::class_roles)
        .def_readwrite("known_count", &MixtureWorld::known_count)
        .def("validate", &MixtureWorld::validate);

    m.def("default_desk_world", &default_desk_world);
    m.def("single_gaussian_world", &single_gaussian_world);
    m.def("bayes_class_posterior", &bayes_class_posterior);

    py::class_<LabeledSample>(m, "LabeledSample")
        .def(py::init<>())
        .def_readwrite("id", &LabeledSample::id)
        .def_readwrite("features", &LabeledSample::features)
        .def_readwrite("true_class", &LabeledSample::true_class)
        .def_readwrite("role", &LabeledSample::role);

    py::class_<DatasetSpec>(m, "DatasetSpec")
        .def(py::init<>())
        .def_readwrite("n_known_train", &DatasetSpec::n_known_train)
        .def_readwrite("mismatch_rho", &DatasetSpec::mismatch_rho)
        .def_readwrite("n_test_per_role", &DatasetSpec::n_test_per_role)
        .def_readwrite("rng_seed", &DatasetSpec::rng_seed);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("train", &Dataset::train)
        .def_readonly("test", &Dataset::test);

    m.def("sample_dataset", &sample_dataset);

    py::class_<NoisePredictorOracle>(m, "NoisePredictorOracle")
        .def(py::init<const MixtureWorld&, const NoiseSchedule&>(), py::keep_alive<1, 2>(),
             py::keep_alive<1, 3>())
        .def("log_density", &NoisePredictorOracle::log_density, py::arg("x"), py::arg("t"),
             py::arg("cond") = std::nullopt)
        .def("score_uncond", &NoisePredictorOracle::score_uncond)
        .def("eps_uncond", &NoisePredictorOracle::eps_uncond)
        .def("eps_cond", &NoisePredictorOracle::eps_cond)
        .def("eps_guided", &NoisePredictorOracle::eps_guided)
        .def("grad_log_class_posterior", &NoisePredictorOracle::grad_log_class_posterior);

    py::class_<GenerationConfig>(m, "GenerationConfig")
        .def(py::init<>())
        .def_readwrite("n_steps", &GenerationConfig::n_steps)
        .def_readwrite("guidance_gamma", &GenerationConfig::guidance_gamma)
        .def_readwrite("eta_positive", &GenerationConfig::eta_positive)
        .def_readwrite("eta_negative", &GenerationConfig::eta_negative)
        .def_readwrite("rng_seed", &GenerationConfig::rng_seed);

    py::class_<GeneratedInstance>(m, "GeneratedInstance")
        .def_readonly("features", &GeneratedInstance::features)
        .def_readonly("prompt_class", &GeneratedInstance::prompt_class)
        .def_readonly("seed_id", &GeneratedInstance::seed_id);

    m.def("forward_noise", &forward_noise);
    m.def("generate_positive", [](const MixtureWorld& w, const NoiseSchedule& s,
                                  const LabeledSample& seed, int y, const GenerationConfig& cfg,
                                  std::uint64_t stream_seed) {
        return py_generate(w, s, seed, y, cfg, true, stream_seed);
    });
    m.def("generate_negative", [](const MixtureWorld& w, const NoiseSchedule& s,
                                  const LabeledSample& seed, int y, const GenerationConfig& cfg,
                                  std::uint64_t stream_seed) {
        return py_generate(w, s, seed, y, cfg, false, stream_seed);
    });

    m.def("verify_theorem1",
          [](const MixtureWorld& w, const NoiseSchedule& s, const Vec& x0, int y, int n_steps,
             std::size_t depth) {
              NoisePredictorOracle oracle(w, s);
              TimestepPath path = make_path(s, n_steps, PathDirection::forward);
              return verify_theorem1(x0, y, depth, path, oracle);
          });
    m.def("verify_theorem2",
          [](const MixtureWorld& w, const NoiseSchedule& s, const Vec& x0, int y, int n_steps,
             std::size_t depth) {
              NoisePredictorOracle oracle(w, s);
              TimestepPath path = make_path(s, n_steps, PathDirection::forward);
              return verify_theorem2(x0, y, depth, path, oracle);
          });

    py::class_<ProbOutputs>(m, "ProbOutputs")
        .def_readonly("p_binary", &ProbOutputs::p_binary)
        .def_readonly("p_bar", &ProbOutputs::p_bar)
        .def_readonly("p_closed", &ProbOutputs::p_closed);

    py::class_<ClassifierModel>(m, "ClassifierModel")
        .def_readonly("dims", &ClassifierModel::dims)
        .def_readonly("hidden", &ClassifierModel::hidden)
        .def_readonly("known", &ClassifierModel::known);

    m.def("init_model", &init_model, py::arg("dims"), py::arg("hidden"), py::arg("known"),
          py::arg("seed"), py::arg("mode") = BinaryHeadMode::pair_softmax);
    m.def("forward", &forward);
    m.def("open_set_distribution", &open_set_distribution);
    m.def("hybrid_distribution", &hybrid_distribution);
    m.def("balance_score", &balance_score);

    py::enum_<BinaryHeadMode>(m, "BinaryHeadMode")
        .value("pair_softmax", BinaryHeadMode::pair_softmax)
        .value("single_sigmoid", BinaryHeadMode::single_sigmoid);

    py::class_<LabelingConfig>(m, "LabelingConfig")
        .def(py::init<>())
        .def_readwrite("threshold", &LabelingConfig::threshold)
        .def_readwrite("interval", &LabelingConfig::interval)
        .def_readwrite("rounds", &LabelingConfig::rounds);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("lr", &TrainConfig::lr)
        .def_readwrite("lambda1", &TrainConfig::lambda1)
        .def_readwrite("lambda2", &TrainConfig::lambda2)
        .def_readwrite("hidden", &TrainConfig::hidden)
        .def_readwrite("labeling", &TrainConfig::labeling)
        .def_readwrite("rng_seed", &TrainConfig::rng_seed);

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("closed_known_acc", &EvalReport::closed_known_acc)
        .def_readonly("open_known_acc", &EvalReport::open_known_acc)
        .def_readonly("open_unknown_acc", &EvalReport::open_unknown_acc)
        .def_readonly("open_new_acc", &EvalReport::open_new_acc)
        .def_readonly("balance", &EvalReport::balance);

    m.def("run_experiment",
          [](const MixtureWorld& world, const NoiseSchedule& sched, const DatasetSpec& dspec,
             const GenerationConfig& gen, const TrainConfig& tcfg, int workers) {
              NoisePredictorOracle oracle(world, sched);
              Dataset ds = sample_dataset(world, dspec);
              PairBank bank = generate_pair_bank(ds, world, gen, oracle, workers);
              TrainResult result = train(world, ds, bank, tcfg);
              return evaluate(result.model, ds.test);
          },
          py::arg("world"), py::arg("schedule"), py::arg("dataset_spec"), py::arg("generation"),
          py::arg("train"), py::arg("workers") = 1,
          "Full pipeline: sample, generate the pair bank, train, evaluate.");
}
