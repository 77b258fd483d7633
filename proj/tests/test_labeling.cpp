#include <doctest.h>

#include <set>

#include "diffpair/labeling.hpp"

using namespace diffpair;

TEST_CASE("open-set distribution on hand-checked cases") {
    ProbOutputs p;
    p.p_binary = {0.0, 0.0};
    p.p_closed = {0.7, 0.3};
    p.p_bar = {0.5, 0.5};
    Vec q = open_set_distribution(p);
    CHECK(q[0] == doctest::Approx(0.0));
    CHECK(q[1] == doctest::Approx(0.0));
    CHECK(q[2] == doctest::Approx(1.0));

    p.p_binary = {1.0, 0.0};
    q = open_set_distribution(p);
    CHECK(q[0] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(q[2] == doctest::Approx(0.0));

    p.p_binary = {0.9, 0.2};
    q = open_set_distribution(p);
    CHECK(q[0] == doctest::Approx(0.644).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(0.276).epsilon(1e-12));
    CHECK(q[2] == doctest::Approx(0.08).epsilon(1e-12));
}

TEST_CASE("hybrid distribution on hand-checked cases") {
    ProbOutputs p;
    p.p_binary = {1.0, 0.0};
    p.p_closed = {1.0, 0.0};
    p.p_bar = {0.5, 0.5};
    Vec q = hybrid_distribution(p);
    CHECK(q[0] == doctest::Approx(1.0));
    CHECK(q[2] == doctest::Approx(0.0));

    p.p_binary = {0.0, 0.0};
    p.p_closed = {0.7, 0.3};
    q = hybrid_distribution(p);
    CHECK(q[2] == doctest::Approx(1.0));

    p.p_binary = {0.9, 0.2};
    q = hybrid_distribution(p);
    CHECK(q[0] == doctest::Approx(0.63).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(0.06).epsilon(1e-12));
    CHECK(q[2] == doctest::Approx(0.31).epsilon(1e-12));
}

TEST_CASE("both distributions sum to one for random probabilities") {
    Rng rng(31);
    for (int trial = 0; trial < 10000; ++trial) {
        std::size_t K = 1 + rng.below(5);
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
        CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(st == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(qt.back() >= -1e-15);
        CHECK(qt.back() <= 1.0 + 1e-15);
    }
}

namespace {

// A tiny bank over three seeds and K=2.
struct LedgerFixture {
    std::vector<Vec> feats = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}};
    std::vector<TrainView> views;
    PairBank bank;

    LedgerFixture() {
        for (int id = 0; id < 3; ++id) {
            views.push_back({id, &feats[static_cast<std::size_t>(id)]});
            for (int y = 1; y <= 2; ++y) {
                bank.positives.push_back({{0.1 * id, 0.2 * y}, y, Polarity::positive, id});
                bank.negatives.push_back({{-0.1 * id, -0.2 * y}, y, Polarity::negative, id});
            }
        }
    }
};

void check_invariants(const PseudoLabelLedger& led, const PairBank& bank, std::size_t n_ids) {
    std::set<int> all;
    for (int id : led.pool) all.insert(id);
    for (const auto& e : led.d_known) all.insert(e.id);
    for (const auto& e : led.d_unknown) all.insert(e.id);
    CHECK(all.size() == n_ids);
    CHECK(led.pool.size() + led.d_known.size() + led.d_unknown.size() == n_ids);

    std::set<int> labeled;
    for (const auto& e : led.d_known) {
        labeled.insert(e.id);
        const auto& neg = bank.negatives[e.neg_index];
        CHECK(neg.seed_id == e.id);
        CHECK(neg.prompt_class == e.label);
    }
    for (const auto& e : led.d_unknown) {
        labeled.insert(e.id);
        const auto& pos = bank.positives[e.pos_index];
        CHECK(pos.seed_id == e.id);
    }
    for (std::size_t idx : led.dp) CHECK(labeled.count(bank.positives[idx].seed_id) == 0);
    for (std::size_t idx : led.dn) CHECK(labeled.count(bank.negatives[idx].seed_id) == 0);
}

}  // namespace

TEST_CASE("pseudo-labeling routes confident agreeing samples") {
    LedgerFixture f;
    PseudoLabelLedger led = init_ledger(f.views, f.bank, 7);
    CHECK(led.dp.size() == 6);
    CHECK(led.dn.size() == 6);

    // A saturated model: p(1|x) ~ 1, p(2|x) ~ 0, closed head one-hot on 1.
    ClassifierModel m = init_model(2, 1, 2, 1);
    for (Vec* t : m.tensors())
        for (auto& v : *t) v = 0.0;
    m.open_b = {40.0, -40.0, -40.0, 40.0};
    m.closed_b = {40.0, -40.0};

    LabelingConfig cfg;
    cfg.threshold = 0.98;
    SelectionReport rep = assign_pseudo_labels(m, led, f.bank, f.views, cfg);
    CHECK(rep.selected.size() == 3);
    for (const auto& s : rep.selected) {
        CHECK(s.label == 1);
        CHECK(s.max_q >= 0.98);
        CHECK(s.max_q_tilde >= 0.98);
    }
    CHECK(led.pool.empty());
    CHECK(led.d_known.size() == 3);
    CHECK(led.dp.empty());  // all seeds labeled: every generated instance retired
    CHECK(led.dn.empty());
    CHECK(led.dn_prime().size() == 3);
    check_invariants(led, f.bank, 3);
}

TEST_CASE("pseudo-labeling routes confident 'other' samples with a random positive") {
    LedgerFixture f;
    PseudoLabelLedger led = init_ledger(f.views, f.bank, 7);

    ClassifierModel m = init_model(2, 1, 2, 1);
    for (Vec* t : m.tensors())
        for (auto& v : *t) v = 0.0;
    m.open_b = {-40.0, 40.0, -40.0, 40.0};  // p(j|x) ~ 0 for both classes

    LabelingConfig cfg;
    SelectionReport rep = assign_pseudo_labels(m, led, f.bank, f.views, cfg);
    CHECK(rep.selected.size() == 3);
    for (const auto& s : rep.selected) CHECK(s.label == 3);  // K+1
    CHECK(led.d_unknown.size() == 3);
    CHECK(led.dp_prime().size() == 3);
    for (const auto& e : led.d_unknown) {
        int prompt = f.bank.positives[e.pos_index].prompt_class;
        CHECK(prompt >= 1);
        CHECK(prompt <= 2);
    }
    check_invariants(led, f.bank, 3);

    // reruns with the same ledger seed pick the same random prompts
    PseudoLabelLedger led2 = init_ledger(f.views, f.bank, 7);
    SelectionReport rep2 = assign_pseudo_labels(m, led2, f.bank, f.views, cfg);
    for (std::size_t i = 0; i < led.d_unknown.size(); ++i)
        CHECK(led.d_unknown[i].pos_index == led2.d_unknown[i].pos_index);
}

TEST_CASE("no labels without agreement or above-threshold confidence") {
    LedgerFixture f;
    PseudoLabelLedger led = init_ledger(f.views, f.bank, 7);
    ClassifierModel m = init_model(2, 1, 2, 1);
    for (Vec* t : m.tensors())
        for (auto& v : *t) v = 0.0;
    // q argmax is class 1 but weakly (p ~ 0.5 everywhere)
    LabelingConfig cfg;
    SelectionReport rep = assign_pseudo_labels(m, led, f.bank, f.views, cfg);
    CHECK(rep.selected.empty());
    CHECK(led.pool.size() == 3);
    check_invariants(led, f.bank, 3);

    // confident q vs disagreeing q~: open head votes class 1 strongly while
    // the closed head votes class 2, so argmax q = 1 and argmax q~ = 2.
    m.open_b = {40.0, -40.0, -40.0, 40.0};
    m.closed_b = {-40.0, 40.0};
    SelectionReport rep2 = assign_pseudo_labels(m, led, f.bank, f.views, cfg);
    CHECK(rep2.selected.empty());
}

TEST_CASE("total loss composes the three source pairs") {
    LedgerFixture f;
    PseudoLabelLedger led = init_ledger(f.views, f.bank, 7);
    ClassifierModel m = init_model(2, 4, 2, 9);

    // round-zero state: only the generated term is active
    ExampleSet p1, n1;
    for (std::size_t i = 0; i < f.bank.positives.size(); ++i) {
        p1.push_back({&f.bank.positives[i].features, f.bank.positives[i].prompt_class});
        n1.push_back({&f.bank.negatives[i].features, f.bank.negatives[i].prompt_class});
    }
    double expect = loss_generated(m, p1, n1, 1.0, 2.0);
    CHECK(total_loss(m, led, f.bank, f.views, 1.0, 2.0) == doctest::Approx(expect).epsilon(1e-12));

    // move seed 0 into d_known manually and check the independent sum
    led.pool.erase(led.pool.begin());
    led.d_known.push_back({0, 1, 0});  // bank.negatives[0] is (seed 0, class 1)
    for (std::size_t idx : led.seed_pos.at(0)) led.dp.erase(std::remove(led.dp.begin(), led.dp.end(), idx), led.dp.end());
    for (std::size_t idx : led.seed_neg.at(0)) led.dn.erase(std::remove(led.dn.begin(), led.dn.end(), idx), led.dn.end());
    led.seed_pos.erase(0);
    led.seed_neg.erase(0);

    ExampleSet p1b, n1b, p2, n2;
    for (std::size_t idx : led.dp)
        p1b.push_back({&f.bank.positives[idx].features, f.bank.positives[idx].prompt_class});
    for (std::size_t idx : led.dn)
        n1b.push_back({&f.bank.negatives[idx].features, f.bank.negatives[idx].prompt_class});
    p2.push_back({f.views[0].features, 1});
    n2.push_back({&f.bank.negatives[0].features, 1});
    double expect2 = loss_generated(m, p1b, n1b, 1.0, 2.0) + loss_generated(m, p2, n2, 1.0, 2.0);
    CHECK(total_loss(m, led, f.bank, f.views, 1.0, 2.0) == doctest::Approx(expect2).epsilon(1e-12));
}
