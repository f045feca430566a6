#include "asbs/mlp.hpp"

#include <Eigen/Dense>

#include "asbs/parallel.hpp"

namespace asbs {

namespace {

using EMat = Eigen::MatrixXd;
using EVec = Eigen::VectorXd;
using MapM = Eigen::Map<EMat>;
using CMapM = Eigen::Map<const EMat>;

constexpr double kSqrt2Inv = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kTwoPi = 6.28318530717958647693;
constexpr double kPeriodMin = 1e-3;
constexpr double kPeriodMax = 1.0;
constexpr std::size_t kChunk = 256;

double act_f(Activation a, double z) {
    if (a == Activation::GELU) return 0.5 * z * (1.0 + std::erf(z * kSqrt2Inv));
    const double s = 1.0 / (1.0 + std::exp(-z));
    return z * s;
}

double act_df(Activation a, double z) {
    if (a == Activation::GELU)
        return 0.5 * (1.0 + std::erf(z * kSqrt2Inv)) + z * kInvSqrt2Pi * std::exp(-0.5 * z * z);
    const double s = 1.0 / (1.0 + std::exp(-z));
    return s * (1.0 + z * (1.0 - s));
}

// Sinusoidal features of t: sin/cos pairs over geometrically spaced periods.
void t_features(const MlpSpec& spec, double t, double* out) {
    const int F = spec.t_embed_dim;
    for (int j = 0; j < F; ++j) {
        const double frac = F > 1 ? static_cast<double>(j) / (F - 1) : 0.0;
        const double period = kPeriodMin * std::pow(kPeriodMax / kPeriodMin, frac);
        const double w = kTwoPi / period;
        out[2 * j] = std::sin(w * t);
        out[2 * j + 1] = std::cos(w * t);
    }
}

struct Blocks {
    CMapM wx, wt, wo;
    CMapM bx, bo;
    std::vector<CMapM> wl, bl;
};

CMapM map_block(const MlpParams& p, const LayoutEntry& e) {
    return CMapM(p.values.data() + e.offset, e.rows, e.cols);
}

MapM map_block(Vec& v, const LayoutEntry& e) {
    return MapM(v.data() + e.offset, e.rows, e.cols);
}

Blocks map_all(const MlpSpec& spec, const MlpParams& p) {
    Blocks b{map_block(p, p.find("x_embed.W")), map_block(p, p.find("t_embed.W")),
             map_block(p, p.find("out.W")),     map_block(p, p.find("x_embed.b")),
             map_block(p, p.find("out.b")),     {},
             {}};
    for (int l = 1; l < spec.n_layers; ++l) {
        b.wl.push_back(map_block(p, p.find("layer" + std::to_string(l) + ".W")));
        b.bl.push_back(map_block(p, p.find("layer" + std::to_string(l) + ".b")));
    }
    return b;
}

// Forward pass over a column-major batch; optionally keeps pre-activations
// and activations for the backward pass.
struct FwdState {
    EMat feats;            // 2F x B
    EMat h0;               // H x B (embed sum)
    std::vector<EMat> zs;  // pre-activations per hidden layer
    std::vector<EMat> as;  // activations per hidden layer
    EMat out;              // d x B
};

void forward_cols(const MlpSpec& spec, const Blocks& b, const EMat& X, const Vec& ts,
                  FwdState& st, bool keep) {
    const auto B = X.cols();
    st.feats.resize(2 * spec.t_embed_dim, B);
    for (Eigen::Index c = 0; c < B; ++c) t_features(spec, ts[c], st.feats.col(c).data());
    st.h0.noalias() = b.wx * X;
    st.h0.noalias() += b.wt * st.feats;
    st.h0.colwise() += b.bx.col(0);

    const int n_hidden = spec.n_layers - 1;
    if (keep) {
        st.zs.resize(n_hidden);
        st.as.resize(n_hidden);
    }
    EMat cur = st.h0;
    for (int l = 0; l < n_hidden; ++l) {
        EMat z = b.wl[l] * cur;
        z.colwise() += b.bl[l].col(0);
        EMat a = z.unaryExpr([&](double v) { return act_f(spec.activation, v); });
        if (keep) {
            st.zs[l] = z;
            st.as[l] = a;
        }
        cur = std::move(a);
    }
    st.out.noalias() = b.wo * cur;
    st.out.colwise() += b.bo.col(0);
}

struct GradMaps {
    MapM wx, wt, wo, bx, bo;
    std::vector<MapM> wl, bl;
};

GradMaps map_grads(const MlpSpec& spec, const MlpParams& p, Vec& g) {
    GradMaps m{map_block(g, p.find("x_embed.W")), map_block(g, p.find("t_embed.W")),
               map_block(g, p.find("out.W")),     map_block(g, p.find("x_embed.b")),
               map_block(g, p.find("out.b")),     {},
               {}};
    for (int l = 1; l < spec.n_layers; ++l) {
        m.wl.push_back(map_block(g, p.find("layer" + std::to_string(l) + ".W")));
        m.bl.push_back(map_block(g, p.find("layer" + std::to_string(l) + ".b")));
    }
    return m;
}

}  // namespace

std::string activation_name(Activation a) { return a == Activation::GELU ? "gelu" : "silu"; }

void MlpSpec::validate() const {
    if (n_layers < 2) throw std::invalid_argument("MlpSpec: n_layers must be >= 2");
    if (input_dim <= 0 || hidden_dim <= 0 || t_embed_dim <= 0)
        throw std::invalid_argument("MlpSpec: all dims must be positive");
}

std::size_t MlpSpec::param_count() const {
    const std::size_t H = hidden_dim, d = input_dim, F2 = 2 * t_embed_dim;
    std::size_t n = H * d + H + H * F2;               // embeds
    n += static_cast<std::size_t>(n_layers - 1) * (H * H + H);  // hidden stack
    n += d * H + d;                                   // output layer
    return n;
}

MlpParams MlpParams::zeros(const MlpSpec& spec) {
    spec.validate();
    MlpParams p;
    const std::size_t H = spec.hidden_dim, d = spec.input_dim, F2 = 2 * spec.t_embed_dim;
    std::size_t off = 0;
    auto add = [&](const std::string& name, std::size_t r, std::size_t c) {
        p.layout.push_back({name, off, r, c});
        off += r * c;
    };
    add("x_embed.W", H, d);
    add("x_embed.b", H, 1);
    add("t_embed.W", H, F2);
    for (int l = 1; l < spec.n_layers; ++l) {
        add("layer" + std::to_string(l) + ".W", H, H);
        add("layer" + std::to_string(l) + ".b", H, 1);
    }
    add("out.W", d, H);
    add("out.b", d, 1);
    p.values.assign(off, 0.0);
    return p;
}

MlpParams MlpParams::random_init(const MlpSpec& spec, Rng& rng, double scale) {
    MlpParams p = zeros(spec);
    for (const auto& e : p.layout) {
        if (e.name.ends_with(".b")) continue;
        const double sd = scale / std::sqrt(static_cast<double>(e.cols));
        for (std::size_t i = 0; i < e.rows * e.cols; ++i)
            p.values[e.offset + i] = sd * rng.normal();
    }
    return p;
}

const LayoutEntry& MlpParams::find(const std::string& name) const {
    for (const auto& e : layout)
        if (e.name == name) return e;
    throw std::invalid_argument("MlpParams: no block named " + name);
}

void MlpParams::zero_final_layer() {
    for (const char* name : {"out.W", "out.b"}) {
        const auto& e = find(name);
        std::fill_n(values.begin() + e.offset, e.rows * e.cols, 0.0);
    }
}

AdamState AdamState::init(std::size_t n_params, double lr) {
    AdamState s;
    s.m.assign(n_params, 0.0);
    s.v.assign(n_params, 0.0);
    s.lr = lr;
    return s;
}

Vec mlp_forward(const MlpSpec& spec, const MlpParams& params, double t, const Vec& x) {
    Mat X(1, x.size());
    std::copy(x.begin(), x.end(), X.row(0));
    const Mat out = mlp_forward_batch(spec, params, Vec{t}, X);
    return out.row_vec(0);
}

Mat mlp_forward_batch(const MlpSpec& spec, const MlpParams& params, const Vec& ts, const Mat& X) {
    spec.validate();
    if (X.cols != static_cast<std::size_t>(spec.input_dim) || ts.size() != X.rows)
        throw SizeMismatchError("mlp_forward_batch: bad batch shapes");
    const auto b = map_all(spec, params);
    const std::size_t B = X.rows;
    EMat Xc(spec.input_dim, B);
    for (std::size_t i = 0; i < B; ++i)
        for (int j = 0; j < spec.input_dim; ++j) Xc(j, i) = X(i, j);
    FwdState st;
    forward_cols(spec, b, Xc, ts, st, false);
    Mat out(B, spec.input_dim);
    for (std::size_t i = 0; i < B; ++i)
        for (int j = 0; j < spec.input_dim; ++j) out(i, j) = st.out(j, i);
    return out;
}

std::pair<double, Vec> mlp_loss_and_grad(const MlpSpec& spec, const MlpParams& params,
                                         const LossBatch& batch) {
    spec.validate();
    const std::size_t B = batch.ts.size();
    if (B == 0) throw std::invalid_argument("mlp_loss_and_grad: empty batch");
    if (batch.xs.rows != B || batch.targets.rows != B || batch.weights.size() != B)
        throw SizeMismatchError("mlp_loss_and_grad: inconsistent batch");
    const auto blocks = map_all(spec, params);
    const int d = spec.input_dim;

    const std::size_t n_chunks = (B + kChunk - 1) / kChunk;
    std::vector<Vec> chunk_grads(n_chunks);
    Vec chunk_losses(n_chunks, 0.0);

    parallel_for(n_chunks, [&](std::size_t ci) {
        const std::size_t lo = ci * kChunk;
        const std::size_t hi = std::min(B, lo + kChunk);
        const std::size_t n = hi - lo;
        EMat Xc(d, n), Tc(d, n);
        Vec ts(n);
        for (std::size_t i = 0; i < n; ++i) {
            ts[i] = batch.ts[lo + i];
            for (int j = 0; j < d; ++j) {
                Xc(j, i) = batch.xs(lo + i, j);
                Tc(j, i) = batch.targets(lo + i, j);
            }
        }
        FwdState st;
        forward_cols(spec, blocks, Xc, ts, st, true);

        // dLoss/dOut for loss_chunk = sum_b w_b |out_b - t_b|^2 (normalized later)
        EMat dout = 2.0 * (st.out - Tc);
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = batch.weights[lo + i];
            loss += w * 0.25 * dout.col(i).squaredNorm();
            dout.col(i) *= w;
        }
        chunk_losses[ci] = loss;

        Vec g(params.values.size(), 0.0);
        auto gm = map_grads(spec, params, g);
        const int n_hidden = spec.n_layers - 1;
        const EMat& a_last = n_hidden > 0 ? st.as[n_hidden - 1] : st.h0;
        gm.wo.noalias() += dout * a_last.transpose();
        gm.bo.col(0) += dout.rowwise().sum();
        EMat da = blocks.wo.transpose() * dout;
        for (int l = n_hidden - 1; l >= 0; --l) {
            EMat dz = da.cwiseProduct(
                st.zs[l].unaryExpr([&](double v) { return act_df(spec.activation, v); }));
            const EMat& a_prev = l > 0 ? st.as[l - 1] : st.h0;
            gm.wl[l].noalias() += dz * a_prev.transpose();
            gm.bl[l].col(0) += dz.rowwise().sum();
            da.noalias() = blocks.wl[l].transpose() * dz;
        }
        gm.wx.noalias() += da * Xc.transpose();
        gm.bx.col(0) += da.rowwise().sum();
        gm.wt.noalias() += da * st.feats.transpose();
        chunk_grads[ci] = std::move(g);
    });

    Vec grad(params.values.size(), 0.0);
    double loss = 0.0;
    for (std::size_t ci = 0; ci < n_chunks; ++ci) {  // fixed reduction order
        loss += chunk_losses[ci];
        const Vec& g = chunk_grads[ci];
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
    }
    const double inv_b = 1.0 / static_cast<double>(B);
    loss *= inv_b;
    for (double& v : grad) v *= inv_b;
    return {loss, grad};
}

std::pair<double, Vec> mlp_loss_and_grad(const MlpSpec& spec, const MlpParams& params,
                                         const std::vector<LossSample>& batch) {
    LossBatch b;
    const std::size_t B = batch.size();
    b.ts.resize(B);
    b.weights.resize(B);
    b.xs = Mat(B, spec.input_dim);
    b.targets = Mat(B, spec.input_dim);
    for (std::size_t i = 0; i < B; ++i) {
        b.ts[i] = batch[i].t;
        b.weights[i] = batch[i].weight;
        if (batch[i].x.size() != static_cast<std::size_t>(spec.input_dim) ||
            batch[i].target.size() != static_cast<std::size_t>(spec.input_dim))
            throw SizeMismatchError("mlp_loss_and_grad: sample dim mismatch");
        std::copy(batch[i].x.begin(), batch[i].x.end(), b.xs.row(i));
        std::copy(batch[i].target.begin(), batch[i].target.end(), b.targets.row(i));
    }
    return mlp_loss_and_grad(spec, params, b);
}

void adam_step(AdamState& state, MlpParams& params, const Vec& grad) {
    if (grad.size() != params.values.size() || state.m.size() != grad.size())
        throw SizeMismatchError("adam_step: length mismatch");
    state.step += 1;
    const double b1 = state.beta1, b2 = state.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double g = grad[i];
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params.values[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

}  // namespace asbs
