// Acceptance harness: one check per numbered criterion, each printing a
// single PASS/FAIL line. Run with --criterion N to select one.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "diffpair/analysis.hpp"
#include "diffpair/cli.hpp"

using namespace diffpair;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << name << " ("
              << detail << ")\n";
    if (!ok) ++g_failures;
}

struct DeskContext {
    MixtureWorld world = default_desk_world();
    NoiseSchedule sched = RunConfig{}.make_schedule();
    NoisePredictorOracle oracle{world, sched};
    TimestepPath fwd = make_path(sched, GenerationConfig{}.n_steps, PathDirection::forward);
    TimestepPath rev = make_path(sched, GenerationConfig{}.n_steps, PathDirection::reverse);
    GenerationConfig gen;
};

LabeledSample draw_sample(const MixtureWorld& w, int cls, int id, Rng& rng) {
    for (const auto& c : w.components)
        if (c.class_id == cls) {
            Vec x = c.mean;
            for (auto& v : x) v += std::sqrt(c.variance) * rng.gaussian();
            return {id, x, cls, w.class_roles.at(cls)};
        }
    throw std::runtime_error("no such class");
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- c1 / c2

void criterion_theorems(int which) {
    DeskContext ctx;
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(101);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        int cls = 1 + static_cast<int>(rng.below(7));
        LabeledSample s = draw_sample(ctx.world, cls, i, rng);
        int y = 1 + static_cast<int>(rng.below(2));
        double r = (which == 1)
                       ? verify_theorem1(s.features, y, ctx.fwd.n_segments(), ctx.fwd, ctx.oracle)
                       : verify_theorem2(s.features, y, ctx.fwd.n_segments(), ctx.fwd, ctx.oracle);
        worst = std::max(worst, r);
    }
    double elapsed = ms_since(t0);
    std::ostringstream ss;
    ss << "max residual " << worst << " over 10 pairs at depth 20, " << elapsed << " ms";
    report(which, which == 1 ? "inversion identity" : "recovery identity",
           worst < 1e-6 && elapsed < 10000.0, ss.str());
}

// --------------------------------------------------------------------- c3

void criterion_round_trip() {
    MixtureWorld w = single_gaussian_world({0.0, 0.0}, 1.0);
    NoiseSchedule sched = RunConfig{}.make_schedule();
    NoisePredictorOracle oracle(w, sched);
    Vec x0 = {1.9, -2.4};

    auto round_trip = [&](int n_steps) {
        TimestepPath path = make_path(sched, n_steps, PathDirection::forward);
        Vec x = x0;
        for (std::size_t k = 0; k + 1 < path.timesteps.size(); ++k)
            x = cond_inversion_step(x, path.timesteps[k + 1], path.timesteps[k], std::nullopt,
                                    oracle);
        Rng rng(0);
        for (std::size_t k = path.timesteps.size(); k-- > 1;)
            x = reverse_step(x, path.timesteps[k], path.timesteps[k - 1], std::nullopt, 0.0, 0.0,
                             oracle, rng);
        return norm2(x - x0) / norm2(x0);
    };

    double e10 = round_trip(10), e25 = round_trip(25), e50 = round_trip(50),
           e100 = round_trip(100);
    bool ok = e100 < 1e-3 && e25 < e10 && e50 < e25 && e100 < e50;
    std::ostringstream ss;
    ss << "errors " << e10 << " > " << e25 << " > " << e50 << " > " << e100;
    report(3, "round trip", ok, ss.str());
}

// --------------------------------------------------------------------- c4

void criterion_erasure() {
    DeskContext ctx;
    Rng rng(104);

    int eroded = 0, n_in = 0;
    while (n_in < 200) {
        int y = 1 + static_cast<int>(rng.below(2));
        LabeledSample seed = draw_sample(ctx.world, y, n_in, rng);
        double before = bayes_class_posterior(ctx.world, seed.features)[y];
        if (before <= 0.9) continue;
        ++n_in;
        Rng stream(derive_stream(401, static_cast<std::uint64_t>(n_in),
                                 static_cast<std::uint64_t>(y), 1));
        GeneratedInstance g = generate_negative(seed, y, ctx.gen, ctx.fwd, ctx.oracle, stream);
        double after = bayes_class_posterior(ctx.world, g.features)[y];
        if (after < before) ++eroded;
    }

    GenerationConfig quiet = ctx.gen;
    quiet.eta_negative = 0.0;
    double rel_sum = 0.0;
    int n_out = 0;
    while (n_out < 200) {
        int cls = 1 + static_cast<int>(rng.below(5));
        int y = 1 + static_cast<int>(rng.below(2));
        LabeledSample seed = draw_sample(ctx.world, cls, n_out, rng);
        if (bayes_class_posterior(ctx.world, seed.features)[y] >= 0.01) continue;
        ++n_out;
        Rng stream(derive_stream(402, static_cast<std::uint64_t>(n_out),
                                 static_cast<std::uint64_t>(y), 1));
        GeneratedInstance g = generate_negative(seed, y, quiet, ctx.fwd, ctx.oracle, stream);
        rel_sum += norm2(g.features - seed.features) / norm2(seed.features);
    }
    double rel = rel_sum / 200.0;
    bool ok = eroded >= 190 && rel < 0.2;
    std::ostringstream ss;
    ss << "posterior dropped for " << eroded << "/200 in-class seeds; mean off-class relative "
       << "displacement " << rel;
    report(4, "class erasure", ok, ss.str());
}

// --------------------------------------------------------------------- c5

void criterion_positive_fidelity() {
    DeskContext ctx;
    Rng rng(105);
    int hits = 0;
    for (int i = 0; i < 200; ++i) {
        int cls = 1 + static_cast<int>(rng.below(5));  // any train-role seed
        LabeledSample seed = draw_sample(ctx.world, cls, i, rng);
        int y = 1 + static_cast<int>(rng.below(2));
        Rng stream(derive_stream(501, static_cast<std::uint64_t>(i),
                                 static_cast<std::uint64_t>(y), 0));
        GeneratedInstance g = generate_positive(seed, y, ctx.gen, ctx.rev, ctx.oracle, stream);
        if (bayes_class_posterior(ctx.world, g.features)[y] > 0.9) ++hits;
    }
    std::ostringstream ss;
    ss << hits << "/200 positives with prompt-class posterior > 0.9 (gamma 7.5, eta 1)";
    report(5, "positive fidelity", hits >= 180, ss.str());
}

// --------------------------------------------------------------------- c6

void criterion_balance_rows() {
    struct Row {
        double k, u, n, target;
    };
    const Row rows[] = {{92.4, 100.0, 97.9, 92.9},
                        {90.4, 100.0, 99.8, 91.2},
                        {94.0, 100.0, 100.0, 94.6}};
    bool ok = true;
    std::ostringstream ss;
    for (const Row& r : rows) {
        double b = balance_score(r.k, r.u, r.n);
        double delta = std::abs(b - r.target);
        ok = ok && delta <= 0.05;
        ss << "(" << r.k << "," << r.u << "," << r.n << ") -> " << b << " vs " << r.target
           << " [|d|=" << delta << "] ";
    }
    report(6, "balance-score reproduction", ok, ss.str());
}

// --------------------------------------------------------------------- c7

void criterion_distribution_identities() {
    Rng rng(107);
    double worst_q = 0.0, worst_qt = 0.0;
    bool range_ok = true;
    for (int trial = 0; trial < 10000; ++trial) {
        std::size_t K = 1 + rng.below(6);
        ProbOutputs p;
        p.p_binary.resize(K);
        p.p_closed.resize(K);
        for (auto& v : p.p_binary) v = rng.uniform();
        double sum = 0.0;
        for (auto& v : p.p_closed) sum += (v = -std::log(rng.uniform_pos()));
        for (auto& v : p.p_closed) v /= sum;

        Vec q = open_set_distribution(p);
        Vec qt = hybrid_distribution(p);
        double sq = 0.0, st = 0.0;
        for (double v : q) sq += v;
        for (double v : qt) st += v;
        worst_q = std::max(worst_q, std::abs(sq - 1.0));
        worst_qt = std::max(worst_qt, std::abs(st - 1.0));
        if (qt.back() < -1e-12 || qt.back() > 1.0 + 1e-12) range_ok = false;
    }
    bool ok = worst_q <= 1e-12 && worst_qt <= 1e-12 && range_ok;
    std::ostringstream ss;
    ss << "max |sum q - 1| = " << worst_q << ", max |sum q~ - 1| = " << worst_qt
       << ", tail in range: " << (range_ok ? "yes" : "no");
    report(7, "distribution identities", ok, ss.str());
}

// --------------------------------------------------------------------- c8

void criterion_gradients() {
    Rng rng(108);
    const double h = 1e-5;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        int K = 2 + static_cast<int>(rng.below(3));
        ClassifierModel m = init_model(2, 4 + static_cast<int>(rng.below(4)), K, rng.next_u64());
        Vec xa = {rng.gaussian(), rng.gaussian()};
        Vec xb = {rng.gaussian(), rng.gaussian()};
        Vec xc = {rng.gaussian(), rng.gaussian()};
        ExampleSet pos = {{&xa, 1}, {&xb, K}};
        ExampleSet neg = {{&xc, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(K)))}};

        // lambda isolation checks every term on its own and combined
        for (auto [l1, l2] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {1.0, 2.0}}) {
            Gradients g = loss_generated_gradients(m, pos, neg, l1, l2);
            auto params = m.tensors();
            auto grads = g.tensors();
            double num = 0.0, den = 0.0;
            for (std::size_t t = 0; t < params.size(); ++t)
                for (std::size_t i = 0; i < params[t]->size(); ++i) {
                    double keep = (*params[t])[i];
                    (*params[t])[i] = keep + h;
                    double up = loss_generated(m, pos, neg, l1, l2);
                    (*params[t])[i] = keep - h;
                    double dn = loss_generated(m, pos, neg, l1, l2);
                    (*params[t])[i] = keep;
                    double fd = (up - dn) / (2 * h);
                    num += (fd - (*grads[t])[i]) * (fd - (*grads[t])[i]);
                    den += fd * fd;
                }
            worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1.0));
        }
    }
    std::ostringstream ss;
    ss << "worst relative gradient error " << worst << " over 20 models x 3 weightings";
    report(8, "gradient correctness", worst < 1e-4, ss.str());
}

// --------------------------------------------------------------------- c9

void criterion_delta_decay() {
    DeskContext ctx;
    Vec profile = mean_delta_profile(ctx.oracle, ctx.fwd, 32, 109);
    bool ok = profile.back() < profile.front();
    std::ostringstream ss;
    ss << "mean 1-cos over 32 class-erasing inversions: first step " << profile.front()
       << ", last step " << profile.back();
    report(9, "step-discrepancy decay", ok, ss.str());
}

// --------------------------------------------------------------- c10 / c11

struct EndToEnd {
    EvalReport eval;
    RunLog log;
    Dataset ds;
    int known_count = 0;
    double seconds = 0.0;
};

EndToEnd run_end_to_end() {
    auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg;  // library defaults: 400 known seeds, rho 0.6, 400 epochs...
    MixtureWorld world = cfg.make_world();
    NoiseSchedule sched = cfg.make_schedule();
    NoisePredictorOracle oracle(world, sched);

    EndToEnd out;
    out.ds = sample_dataset(world, cfg.dataset);
    PairBank bank = generate_pair_bank(out.ds, world, cfg.generation, oracle, 1);
    TrainResult result = train(world, out.ds, bank, cfg.train);
    out.eval = evaluate(result.model, out.ds.test);
    out.log = std::move(result.log);
    out.known_count = world.known_count;
    out.seconds = ms_since(t0) / 1000.0;
    return out;
}

void criterion_end_to_end(const EndToEnd& r) {
    bool ok = r.eval.closed_known_acc >= 0.90 && r.eval.open_known_acc >= 0.90 &&
              r.eval.open_unknown_acc >= 0.90 && r.eval.open_new_acc >= 0.90 &&
              r.eval.balance >= 0.85 && r.seconds < 300.0;
    std::ostringstream ss;
    ss << "closed " << r.eval.closed_known_acc << ", open " << r.eval.open_known_acc << "/"
       << r.eval.open_unknown_acc << "/" << r.eval.open_new_acc << ", balance " << r.eval.balance
       << ", " << r.seconds << " s";
    report(10, "end-to-end desk experiment", ok, ss.str());
}

void criterion_pseudo_labels(const EndToEnd& r) {
    std::map<int, const LabeledSample*> by_id;
    for (const auto& s : r.ds.train) by_id[s.id] = &s;

    bool ok = true;
    std::size_t pool = r.ds.train.size();
    double worst_precision = 1.0;
    for (const auto& round : r.log.rounds) {
        int correct = 0;
        for (const auto& sel : round.report.selected) {
            const LabeledSample* s = by_id.at(sel.id);
            if (sel.label <= r.known_count)
                correct += s->role == ClassRole::known && s->true_class == sel.label;
            else
                correct += s->role != ClassRole::known;
        }
        double precision = round.report.selected.empty()
                               ? 1.0
                               : static_cast<double>(correct) / round.report.selected.size();
        worst_precision = std::min(worst_precision, precision);
        ok = ok && precision >= 0.95;
        ok = ok && static_cast<std::size_t>(round.report.pool_after) <= pool;
        pool = static_cast<std::size_t>(round.report.pool_after);
    }
    std::ostringstream ss;
    ss << r.log.rounds.size() << " rounds, worst precision " << worst_precision
       << ", final pool " << pool;
    report(11, "pseudo-label precision", ok && !r.log.rounds.empty(), ss.str());
}

// -------------------------------------------------------------------- c12

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void criterion_reproducibility() {
    fs::path tmp = fs::temp_directory_path() / "diffpair_acceptance_c12";
    fs::remove_all(tmp);
    auto run = [&](const std::string& name, int workers) {
        RunConfig cfg;
        cfg.out_dir = (tmp / name).string();
        cfg.seed = 77;
        cfg.workers = workers;
        cfg.dataset.n_known_train = 40;
        cfg.dataset.mismatch_rho = 0.6;
        cfg.dataset.n_test_per_role = 20;
        cfg.train.epochs = 30;
        cfg.train.labeling.interval = 10;
        cfg.train.labeling.rounds = 2;
        cmd_generate(cfg);
        cmd_train(cfg);
        return cfg;
    };
    RunConfig a = run("a", 1);
    RunConfig b = run("b", 3);
    bool banks = slurp(a.bank_path()) == slurp(b.bank_path());
    bool ckpts = slurp(a.checkpoint_path()) == slurp(b.checkpoint_path());
    fs::remove_all(tmp);
    std::ostringstream ss;
    ss << "bank bytes " << (banks ? "identical" : "DIFFER") << ", checkpoint bytes "
       << (ckpts ? "identical" : "DIFFER") << " across worker counts 1 and 3";
    report(12, "reproducibility", banks && ckpts, ss.str());
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

    auto want = [&](int c) { return only == 0 || only == c; };

    if (want(1)) criterion_theorems(1);
    if (want(2)) criterion_theorems(2);
    if (want(3)) criterion_round_trip();
    if (want(4)) criterion_erasure();
    if (want(5)) criterion_positive_fidelity();
    if (want(6)) criterion_balance_rows();
    if (want(7)) criterion_distribution_identities();
    if (want(8)) criterion_gradients();
    if (want(9)) criterion_delta_decay();
    if (want(10) || want(11)) {
        EndToEnd r = run_end_to_end();
        if (want(10)) criterion_end_to_end(r);
        if (want(11)) criterion_pseudo_labels(r);
    }
    if (want(12)) criterion_reproducibility();

    return g_failures;
}
