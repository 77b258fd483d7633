#include "diffpair/classifier.hpp"

#include <cmath>

#include "diffpair/rng.hpp"

namespace diffpair {

namespace {

constexpr double kClampLo = 1e-7;
constexpr double kClampHi = 1.0 - 1e-7;

double clamped_log(double p) { return std::log(std::min(std::max(p, kClampLo), kClampHi)); }
bool inside_clamp(double p) { return p > kClampLo && p < kClampHi; }

Vec softmax(const Vec& z) {
    double m = z[0];
    for (double v : z) m = std::max(m, v);
    Vec p(z.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        p[i] = std::exp(z[i] - m);
        sum += p[i];
    }
    for (auto& v : p) v /= sum;
    return p;
}

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

struct ForwardCache {
    Vec xs;        // standardized input
    Vec h;         // tanh activations
    Vec z_open;    // 2K
    Vec z_closed;  // K
    ProbOutputs probs;
};

void matvec(const Vec& w, const Vec& x, const Vec& b, Vec& out) {
    std::size_t rows = b.size();
    std::size_t cols = x.size();
    out.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double s = b[r];
        const double* row = &w[r * cols];
        for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
        out[r] = s;
    }
}

ForwardCache run_forward(const ClassifierModel& model, const Vec& x) {
    require(static_cast<int>(x.size()) == model.dims, "forward: dimension mismatch");
    ForwardCache fc;
    fc.xs.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        fc.xs[i] = (x[i] - model.input_mean[i]) / model.input_scale[i];

    matvec(model.enc_w, fc.xs, model.enc_b, fc.h);
    for (auto& v : fc.h) v = std::tanh(v);
    matvec(model.open_w, fc.h, model.open_b, fc.z_open);
    matvec(model.closed_w, fc.h, model.closed_b, fc.z_closed);

    int K = model.known;
    fc.probs.p_binary.resize(static_cast<std::size_t>(K));
    Vec pos_logits(static_cast<std::size_t>(K));
    for (int j = 0; j < K; ++j) {
        double zp = fc.z_open[static_cast<std::size_t>(2 * j)];
        double zn = fc.z_open[static_cast<std::size_t>(2 * j + 1)];
        pos_logits[static_cast<std::size_t>(j)] = zp;
        fc.probs.p_binary[static_cast<std::size_t>(j)] =
            (model.head_mode == BinaryHeadMode::pair_softmax) ? sigmoid(zp - zn) : sigmoid(zp);
    }
    fc.probs.p_bar = softmax(pos_logits);
    fc.probs.p_closed = softmax(fc.z_closed);

    if (!all_finite(fc.probs.p_binary) || !all_finite(fc.probs.p_bar) ||
        !all_finite(fc.probs.p_closed))
        throw std::runtime_error("forward: non-finite activations");
    return fc;
}

}  // namespace

std::vector<Vec*> ClassifierModel::tensors() {
    return {&enc_w, &enc_b, &open_w, &open_b, &closed_w, &closed_b};
}

std::vector<const Vec*> ClassifierModel::tensors() const {
    return {&enc_w, &enc_b, &open_w, &open_b, &closed_w, &closed_b};
}

const char* ClassifierModel::tensor_name(std::size_t index) {
    static const char* names[] = {"enc_w", "enc_b", "open_w", "open_b", "closed_w", "closed_b"};
    return names[index];
}

std::vector<Vec*> Gradients::tensors() {
    return {&enc_w, &enc_b, &open_w, &open_b, &closed_w, &closed_b};
}

std::vector<const Vec*> Gradients::tensors() const {
    return {&enc_w, &enc_b, &open_w, &open_b, &closed_w, &closed_b};
}

ClassifierModel init_model(int dims, int hidden, int known, std::uint64_t seed,
                           BinaryHeadMode mode) {
    require(dims >= 1 && hidden >= 1 && known >= 1, "init_model: bad sizes");
    ClassifierModel m;
    m.dims = dims;
    m.hidden = hidden;
    m.known = known;
    m.head_mode = mode;
    m.input_mean.assign(static_cast<std::size_t>(dims), 0.0);
    m.input_scale.assign(static_cast<std::size_t>(dims), 1.0);

    Rng rng(mix_seed(seed, 0x696e6974ULL));
    auto uniform_layer = [&rng](Vec& w, std::size_t rows, std::size_t cols) {
        double bound = 1.0 / std::sqrt(static_cast<double>(cols));
        w.resize(rows * cols);
        for (auto& v : w) v = rng.uniform(-bound, bound);
    };
    uniform_layer(m.enc_w, static_cast<std::size_t>(hidden), static_cast<std::size_t>(dims));
    m.enc_b.assign(static_cast<std::size_t>(hidden), 0.0);
    uniform_layer(m.open_w, static_cast<std::size_t>(2 * known), static_cast<std::size_t>(hidden));
    m.open_b.assign(static_cast<std::size_t>(2 * known), 0.0);
    uniform_layer(m.closed_w, static_cast<std::size_t>(known), static_cast<std::size_t>(hidden));
    m.closed_b.assign(static_cast<std::size_t>(known), 0.0);
    return m;
}

ProbOutputs forward(const ClassifierModel& model, const Vec& x) {
    return run_forward(model, x).probs;
}

double loss_open_pairs(const ClassifierModel& model, const ExampleSet& positives,
                       const ExampleSet& negatives) {
    double lp = 0.0, ln = 0.0;
    for (const auto& [x, y] : positives)
        lp -= clamped_log(forward(model, *x).p_binary[static_cast<std::size_t>(y - 1)]);
    for (const auto& [x, y] : negatives)
        ln -= clamped_log(1.0 - forward(model, *x).p_binary[static_cast<std::size_t>(y - 1)]);
    double out = 0.0;
    if (!positives.empty()) out += lp / static_cast<double>(positives.size());
    if (!negatives.empty()) out += ln / static_cast<double>(negatives.size());
    return out;
}

double loss_open_pos(const ClassifierModel& model, const ExampleSet& positives) {
    if (positives.empty()) return 0.0;
    double l = 0.0;
    for (const auto& [x, y] : positives)
        l -= clamped_log(forward(model, *x).p_bar[static_cast<std::size_t>(y - 1)]);
    return l / static_cast<double>(positives.size());
}

double loss_closed(const ClassifierModel& model, const ExampleSet& positives) {
    if (positives.empty()) return 0.0;
    double l = 0.0;
    for (const auto& [x, y] : positives)
        l -= clamped_log(forward(model, *x).p_closed[static_cast<std::size_t>(y - 1)]);
    return l / static_cast<double>(positives.size());
}

double loss_generated(const ClassifierModel& model, const ExampleSet& positives,
                      const ExampleSet& negatives, double lambda1, double lambda2) {
    require(lambda1 >= 0.0 && lambda2 >= 0.0, "loss_generated: lambdas must be >= 0");
    return lambda1 * loss_open_pairs(model, positives, negatives) +
           lambda2 * (loss_open_pos(model, positives) + loss_closed(model, positives));
}

Gradients loss_generated_gradients(const ClassifierModel& model, const ExampleSet& positives,
                                   const ExampleSet& negatives, double lambda1, double lambda2) {
    require(lambda1 >= 0.0 && lambda2 >= 0.0, "gradients: lambdas must be >= 0");
    int K = model.known;
    std::size_t H = static_cast<std::size_t>(model.hidden);
    std::size_t D = static_cast<std::size_t>(model.dims);

    Gradients g;
    g.enc_w.assign(H * D, 0.0);
    g.enc_b.assign(H, 0.0);
    g.open_w.assign(static_cast<std::size_t>(2 * K) * H, 0.0);
    g.open_b.assign(static_cast<std::size_t>(2 * K), 0.0);
    g.closed_w.assign(static_cast<std::size_t>(K) * H, 0.0);
    g.closed_b.assign(static_cast<std::size_t>(K), 0.0);

    double wp = positives.empty() ? 0.0 : 1.0 / static_cast<double>(positives.size());
    double wn = negatives.empty() ? 0.0 : 1.0 / static_cast<double>(negatives.size());

    auto backprop = [&](const ForwardCache& fc, const Vec& dz_open, const Vec& dz_closed) {
        Vec dh(H, 0.0);
        for (std::size_t r = 0; r < dz_open.size(); ++r) {
            if (dz_open[r] == 0.0) continue;
            const double* row = &model.open_w[r * H];
            for (std::size_t c = 0; c < H; ++c) dh[c] += dz_open[r] * row[c];
            g.open_b[r] += dz_open[r];
            double* grow = &g.open_w[r * H];
            for (std::size_t c = 0; c < H; ++c) grow[c] += dz_open[r] * fc.h[c];
        }
        for (std::size_t r = 0; r < dz_closed.size(); ++r) {
            if (dz_closed[r] == 0.0) continue;
            const double* row = &model.closed_w[r * H];
            for (std::size_t c = 0; c < H; ++c) dh[c] += dz_closed[r] * row[c];
            g.closed_b[r] += dz_closed[r];
            double* grow = &g.closed_w[r * H];
            for (std::size_t c = 0; c < H; ++c) grow[c] += dz_closed[r] * fc.h[c];
        }
        for (std::size_t c = 0; c < H; ++c) {
            double da = dh[c] * (1.0 - fc.h[c] * fc.h[c]);
            if (da == 0.0) continue;
            g.enc_b[c] += da;
            double* grow = &g.enc_w[c * D];
            for (std::size_t i = 0; i < D; ++i) grow[i] += da * fc.xs[i];
        }
    };

    for (const auto& [x, y] : positives) {
        ForwardCache fc = run_forward(model, *x);
        std::size_t j = static_cast<std::size_t>(y - 1);
        Vec dz_open(static_cast<std::size_t>(2 * K), 0.0);
        Vec dz_closed(static_cast<std::size_t>(K), 0.0);

        double py = fc.probs.p_binary[j];
        g.loss -= lambda1 * wp * clamped_log(py);
        if (lambda1 > 0.0 && inside_clamp(py)) {
            double du = lambda1 * wp * (py - 1.0);
            dz_open[2 * j] += du;
            if (model.head_mode == BinaryHeadMode::pair_softmax) dz_open[2 * j + 1] -= du;
        }

        double pbar = fc.probs.p_bar[j];
        g.loss -= lambda2 * wp * clamped_log(pbar);
        if (lambda2 > 0.0 && inside_clamp(pbar)) {
            for (int i = 0; i < K; ++i) {
                double d = fc.probs.p_bar[static_cast<std::size_t>(i)] - (i == y - 1 ? 1.0 : 0.0);
                dz_open[static_cast<std::size_t>(2 * i)] += lambda2 * wp * d;
            }
        }

        double pc = fc.probs.p_closed[j];
        g.loss -= lambda2 * wp * clamped_log(pc);
        if (lambda2 > 0.0 && inside_clamp(pc)) {
            for (int i = 0; i < K; ++i)
                dz_closed[static_cast<std::size_t>(i)] +=
                    lambda2 * wp *
                    (fc.probs.p_closed[static_cast<std::size_t>(i)] - (i == y - 1 ? 1.0 : 0.0));
        }
        backprop(fc, dz_open, dz_closed);
    }

    for (const auto& [x, y] : negatives) {
        ForwardCache fc = run_forward(model, *x);
        std::size_t j = static_cast<std::size_t>(y - 1);
        double py = fc.probs.p_binary[j];
        g.loss -= lambda1 * wn * clamped_log(1.0 - py);
        if (lambda1 > 0.0 && inside_clamp(1.0 - py)) {
            Vec dz_open(static_cast<std::size_t>(2 * K), 0.0);
            Vec dz_closed(static_cast<std::size_t>(K), 0.0);
            double du = lambda1 * wn * py;
            dz_open[2 * j] += du;
            if (model.head_mode == BinaryHeadMode::pair_softmax) dz_open[2 * j + 1] -= du;
            backprop(fc, dz_open, dz_closed);
        }
    }
    return g;
}

AdamState make_adam_state(const ClassifierModel& model) {
    AdamState st;
    for (const Vec* t : model.tensors()) {
        st.m.emplace_back(t->size(), 0.0);
        st.v.emplace_back(t->size(), 0.0);
    }
    return st;
}

void adam_step(ClassifierModel& model, const Gradients& grads, double lr, AdamState& state) {
    auto params = model.tensors();
    auto gts = grads.tensors();
    state.step += 1;
    double b1c = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    double b2c = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t t = 0; t < params.size(); ++t) {
        Vec& p = *params[t];
        const Vec& gr = *gts[t];
        require(p.size() == gr.size(), "adam_step: gradient shape mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!std::isfinite(gr[i])) throw std::runtime_error("adam_step: non-finite gradient");
            state.m[t][i] = state.beta1 * state.m[t][i] + (1.0 - state.beta1) * gr[i];
            state.v[t][i] = state.beta2 * state.v[t][i] + (1.0 - state.beta2) * gr[i] * gr[i];
            double mhat = state.m[t][i] / b1c;
            double vhat = state.v[t][i] / b2c;
            p[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

}  // namespace diffpair
