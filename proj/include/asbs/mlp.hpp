#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asbs/common.hpp"
#include "asbs/rng.hpp"

namespace asbs {

enum class Activation { GELU, SiLU };

std::string activation_name(Activation a);

// v(t, x): x_embed(x) + t_embed(t) fed through a GELU/SiLU layer stack.
// n_layers counts all layers including the final linear one.
struct MlpSpec {
    int input_dim = 1;
    int hidden_dim = 64;
    int n_layers = 4;
    int t_embed_dim = 64;  // number of sinusoidal frequencies (features are sin+cos pairs)
    Activation activation = Activation::GELU;

    void validate() const;
    std::size_t param_count() const;
};

struct LayoutEntry {
    std::string name;
    std::size_t offset = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
};

struct MlpParams {
    Vec values;
    std::vector<LayoutEntry> layout;

    static MlpParams zeros(const MlpSpec& spec);
    // Fan-in scaled Gaussian weights, zero biases.
    static MlpParams random_init(const MlpSpec& spec, Rng& rng, double scale = 1.0);

    const LayoutEntry& find(const std::string& name) const;
    // Zeroes the final linear layer, making the network the exact zero function
    // while keeping internal features trainable.
    void zero_final_layer();
};

struct AdamState {
    std::int64_t step = 0;
    Vec m, v;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double lr = 1e-3;

    static AdamState init(std::size_t n_params, double lr);
};

struct LossSample {
    double t = 0.0;
    Vec x;
    Vec target;
    double weight = 1.0;
};

Vec mlp_forward(const MlpSpec& spec, const MlpParams& params, double t, const Vec& x);

// ts: batch_size entries; X: batch_size x input_dim; returns batch_size x input_dim.
Mat mlp_forward_batch(const MlpSpec& spec, const MlpParams& params, const Vec& ts, const Mat& X);

// loss = mean_b weight_b * |v(t_b, x_b) - target_b|^2, with its exact
// reverse-mode parameter gradient. Batch is chunked; chunk results reduce in a
// fixed order, so values do not depend on the thread count.
std::pair<double, Vec> mlp_loss_and_grad(const MlpSpec& spec, const MlpParams& params,
                                         const std::vector<LossSample>& batch);

// Struct-of-arrays variant used by the training loops.
struct LossBatch {
    Vec ts;       // B
    Mat xs;       // B x d
    Mat targets;  // B x d
    Vec weights;  // B
};
std::pair<double, Vec> mlp_loss_and_grad(const MlpSpec& spec, const MlpParams& params,
                                         const LossBatch& batch);

void adam_step(AdamState& state, MlpParams& params, const Vec& grad);

}  // namespace asbs
