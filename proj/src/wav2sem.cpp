#include "w2s/wav2sem.hpp"

#include <cmath>
#include <utility>

#include "json.hpp"
#include "w2s/errors.hpp"
#include "w2s/rng.hpp"

namespace w2s {

namespace {

using nlohmann::json;

Tensor seeded_normal(Rng& rng, Tensor::Shape shape, double std) {
    Tensor t(std::move(shape), /*requires_grad=*/true);
    for (double& v : t.values()) v = rng.next_normal() * std;
    return t;
}

}  // namespace

Wav2SemConfig Wav2SemConfig::canonical(std::uint64_t seed) {
    Wav2SemConfig cfg;
    cfg.tcn_layers = {{512, 10, 5}, {512, 3, 2}, {512, 3, 2}, {512, 3, 2},
                      {512, 3, 2},  {512, 2, 2}, {512, 2, 2}};
    cfg.model_dim = 512;
    cfg.transformer_layers = 12;
    cfg.heads = 8;
    cfg.mlp_dim = 3072;
    cfg.seed = seed;
    return cfg;
}

Wav2SemConfig Wav2SemConfig::tiny(std::uint64_t seed) {
    Wav2SemConfig cfg;
    cfg.tcn_layers = {{32, 10, 5}, {32, 3, 2}, {32, 2, 2}};
    cfg.model_dim = 32;
    cfg.transformer_layers = 2;
    cfg.heads = 2;
    cfg.mlp_dim = 64;
    cfg.seed = seed;
    return cfg;
}

void Wav2SemConfig::validate() const {
    if (tcn_layers.empty()) throw ConfigError("config: tcn_layers is empty");
    for (std::size_t i = 0; i < tcn_layers.size(); ++i) {
        const TcnLayerSpec& layer = tcn_layers[i];
        if (layer.channels < 1 || layer.kernel < 1 || layer.stride < 1) {
            throw ConfigError("config: tcn layer " + std::to_string(i) +
                              " has a zero channel count, kernel, or stride");
        }
    }
    if (model_dim < 1) throw ConfigError("config: model_dim must be positive");
    if (tcn_layers.back().channels != model_dim) {
        throw ConfigError("config: last tcn layer has " + std::to_string(tcn_layers.back().channels) +
                          " channels but model_dim is " + std::to_string(model_dim));
    }
    if (transformer_layers < 1) throw ConfigError("config: transformer_layers must be positive");
    if (heads < 1) throw ConfigError("config: heads must be positive");
    if (model_dim % heads != 0) {
        throw ConfigError("config: model_dim " + std::to_string(model_dim) + " is not divisible by " +
                          std::to_string(heads) + " heads");
    }
    if (mlp_dim < model_dim) {
        throw ConfigError("config: mlp_dim " + std::to_string(mlp_dim) + " is smaller than model_dim " +
                          std::to_string(model_dim));
    }
}

std::size_t Wav2SemConfig::min_samples() const {
    // Walk the schedule backwards: the smallest input producing one output
    // frame at every layer.
    std::size_t need = 1;
    for (auto it = tcn_layers.rbegin(); it != tcn_layers.rend(); ++it) {
        need = (need - 1) * it->stride + it->kernel;
    }
    return need;
}

std::size_t Wav2SemConfig::frame_count(std::size_t samples) const {
    const std::size_t minimum = min_samples();
    if (samples < minimum) throw InputTooShortError(samples, minimum);
    std::size_t length = samples;
    for (const TcnLayerSpec& layer : tcn_layers) {
        length = conv1d_output_length(length, layer.kernel, layer.stride);
    }
    return length;
}

std::size_t Wav2SemConfig::parameter_count() const {
    std::size_t total = 0;
    std::size_t in_channels = 1;
    for (const TcnLayerSpec& layer : tcn_layers) {
        total += layer.channels * in_channels * layer.kernel;
        in_channels = layer.channels;
    }
    const std::size_t c = model_dim;
    const std::size_t per_block = 2 * c                    // first norm
                                  + 4 * c * c + 4 * c      // attention projections
                                  + 2 * c                  // second norm
                                  + c * mlp_dim + mlp_dim  // mlp in
                                  + mlp_dim * c + c;       // mlp out
    return total + transformer_layers * per_block;
}

std::string Wav2SemConfig::to_json() const {
    json j;
    j["model"] = "wav2sem";
    json layers = json::array();
    for (const TcnLayerSpec& layer : tcn_layers) {
        layers.push_back({layer.channels, layer.kernel, layer.stride});
    }
    j["tcn_layers"] = layers;
    j["model_dim"] = model_dim;
    j["transformer_layers"] = transformer_layers;
    j["heads"] = heads;
    j["mlp_dim"] = mlp_dim;
    j["seed"] = seed;
    j["target_kind"] = target_kind == EmbeddingKind::cls ? "cls" : "mean";
    return j.dump();
}

Wav2SemConfig Wav2SemConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config record is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || j.value("model", "") != "wav2sem") {
        throw ConfigError("config record is not a wav2sem record");
    }
    Wav2SemConfig cfg;
    try {
        for (const json& layer : j.at("tcn_layers")) {
            cfg.tcn_layers.push_back({layer.at(0).get<std::size_t>(), layer.at(1).get<std::size_t>(),
                                      layer.at(2).get<std::size_t>()});
        }
        cfg.model_dim = j.at("model_dim").get<std::size_t>();
        cfg.transformer_layers = j.at("transformer_layers").get<std::size_t>();
        cfg.heads = j.at("heads").get<std::size_t>();
        cfg.mlp_dim = j.at("mlp_dim").get<std::size_t>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        const std::string kind = j.at("target_kind").get<std::string>();
        if (kind != "cls" && kind != "mean") throw ConfigError("config: unknown target_kind '" + kind + "'");
        cfg.target_kind = kind == "cls" ? EmbeddingKind::cls : EmbeddingKind::mean;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config record is missing or mistypes a field: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

Tensor sinusoidal_positions(std::size_t n, std::size_t c) {
    Tensor pe(Tensor::Shape{n, c});
    auto& v = pe.values();
    for (std::size_t pos = 0; pos < n; ++pos) {
        for (std::size_t i = 0; 2 * i < c; ++i) {
            const double rate = std::pow(10000.0, (2.0 * static_cast<double>(i)) / static_cast<double>(c));
            const double angle = static_cast<double>(pos) / rate;
            v[pos * c + 2 * i] = std::sin(angle);
            if (2 * i + 1 < c) v[pos * c + 2 * i + 1] = std::cos(angle);
        }
    }
    return pe;
}

Tensor semantic_pool(const Tensor& frames) { return mean_rows(frames); }

Wav2SemModel::Wav2SemModel(Wav2SemConfig config) : config_(std::move(config)) {
    config_.validate();
    Rng rng(config_.seed);

    auto track = [this](std::string name, Tensor t) {
        params_.push_back({std::move(name), t});
        return t;
    };

    std::size_t in_channels = 1;
    for (std::size_t i = 0; i < config_.tcn_layers.size(); ++i) {
        const TcnLayerSpec& layer = config_.tcn_layers[i];
        const double std = 1.0 / std::sqrt(static_cast<double>(in_channels * layer.kernel));
        tcn_weights_.push_back(track("tcn." + std::to_string(i) + ".weight",
                                     seeded_normal(rng, {layer.channels, in_channels, layer.kernel}, std)));
        in_channels = layer.channels;
    }

    const std::size_t c = config_.model_dim;
    const double attn_std = 1.0 / std::sqrt(static_cast<double>(c));
    const double mlp_out_std = 1.0 / std::sqrt(static_cast<double>(config_.mlp_dim));
    for (std::size_t l = 0; l < config_.transformer_layers; ++l) {
        const std::string prefix = "transformer." + std::to_string(l) + ".";
        TransformerBlockParams block;
        block.ln1_gain = track(prefix + "ln1.gain", Tensor::full({c}, 1.0, true));
        block.ln1_shift = track(prefix + "ln1.shift", Tensor::zeros({c}, true));
        block.attn.wq = track(prefix + "attn.wq", seeded_normal(rng, {c, c}, attn_std));
        block.attn.bq = track(prefix + "attn.bq", Tensor::zeros({c}, true));
        block.attn.wk = track(prefix + "attn.wk", seeded_normal(rng, {c, c}, attn_std));
        block.attn.bk = track(prefix + "attn.bk", Tensor::zeros({c}, true));
        block.attn.wv = track(prefix + "attn.wv", seeded_normal(rng, {c, c}, attn_std));
        block.attn.bv = track(prefix + "attn.bv", Tensor::zeros({c}, true));
        block.attn.wo = track(prefix + "attn.wo", seeded_normal(rng, {c, c}, attn_std));
        block.attn.bo = track(prefix + "attn.bo", Tensor::zeros({c}, true));
        block.ln2_gain = track(prefix + "ln2.gain", Tensor::full({c}, 1.0, true));
        block.ln2_shift = track(prefix + "ln2.shift", Tensor::zeros({c}, true));
        block.fc1_weight = track(prefix + "mlp.fc1.weight", seeded_normal(rng, {c, config_.mlp_dim}, attn_std));
        block.fc1_bias = track(prefix + "mlp.fc1.bias", Tensor::zeros({config_.mlp_dim}, true));
        block.fc2_weight =
            track(prefix + "mlp.fc2.weight", seeded_normal(rng, {config_.mlp_dim, c}, mlp_out_std));
        block.fc2_bias = track(prefix + "mlp.fc2.bias", Tensor::zeros({c}, true));
        blocks_.push_back(block);
    }
}

Tensor Wav2SemModel::parameter(const std::string& name) const {
    for (const NamedTensor& p : params_) {
        if (p.name == name) return p.tensor;
    }
    throw ConfigError("no parameter named '" + name + "'");
}

Tensor Wav2SemModel::tcn_forward(const AudioClip& clip) const {
    config_.frame_count(clip.samples.size());  // validates the minimum length
    Tensor x(Tensor::Shape{1, clip.samples.size()}, clip.samples);
    for (std::size_t i = 0; i < tcn_weights_.size(); ++i) {
        x = gelu(conv1d(x, tcn_weights_[i], config_.tcn_layers[i].stride));
    }
    return transpose2d(x);  // [C, N] -> [N, C]
}

Tensor Wav2SemModel::transformer_forward(const Tensor& z) const {
    if (z.rank() != 2 || z.dim(1) != config_.model_dim) {
        throw ShapeError("transformer input " + z.shape_str() + " does not match width " +
                         std::to_string(config_.model_dim));
    }
    constexpr double kLnEps = 1e-5;
    Tensor h = add(z, sinusoidal_positions(z.dim(0), config_.model_dim));
    for (const TransformerBlockParams& block : blocks_) {
        Tensor attended = multi_head_self_attention(
            layer_norm(h, block.ln1_gain, block.ln1_shift, kLnEps), config_.heads, block.attn);
        Tensor mid = add(h, attended);
        Tensor expanded = linear(layer_norm(mid, block.ln2_gain, block.ln2_shift, kLnEps),
                                 block.fc1_weight, block.fc1_bias);
        Tensor projected = linear(gelu(expanded), block.fc2_weight, block.fc2_bias);
        h = add(mid, projected);
    }
    return h;
}

Tensor Wav2SemModel::forward(const AudioClip& clip) const {
    return semantic_pool(transformer_forward(tcn_forward(clip)));
}

SemanticEmbedding Wav2SemModel::encode(const AudioClip& clip) const {
    NoGradGuard inference_only;
    Tensor pooled = forward(clip);
    SemanticEmbedding out;
    out.values = pooled.values();
    out.kind = config_.target_kind;
    return out;
}

void Wav2SemModel::freeze() {
    frozen_ = true;
    for (NamedTensor& p : params_) p.tensor.set_requires_grad(false);
}

std::size_t Wav2SemModel::parameter_count() const {
    std::size_t total = 0;
    for (const NamedTensor& p : params_) total += p.tensor.size();
    return total;
}

}  // namespace w2s
