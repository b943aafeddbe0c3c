#include "w2s/fusion.hpp"

#include <cmath>
#include <utility>

#include "json.hpp"
#include "w2s/binio.hpp"
#include "w2s/checkpoint.hpp"
#include "w2s/errors.hpp"
#include "w2s/ops.hpp"
#include "w2s/rng.hpp"

namespace w2s {

namespace {

using nlohmann::json;

Tensor frozen_normal(Rng& rng, Tensor::Shape shape, double std) {
    Tensor t(std::move(shape), /*requires_grad=*/false);
    for (double& v : t.values()) v = rng.next_normal() * std;
    return t;
}

Tensor trainable_normal(Rng& rng, Tensor::Shape shape, double std) {
    Tensor t(std::move(shape), /*requires_grad=*/true);
    for (double& v : t.values()) v = rng.next_normal() * std;
    return t;
}

}  // namespace

PhonemeEncoder::PhonemeEncoder(const Wav2SemConfig& geometry, std::uint64_t seed)
    : geometry_(geometry), seed_(seed) {
    geometry_.validate();
    Rng rng(seed_);
    std::size_t in_channels = 1;
    for (const TcnLayerSpec& layer : geometry_.tcn_layers) {
        const double std = 1.0 / std::sqrt(static_cast<double>(in_channels * layer.kernel));
        conv_weights_.push_back(frozen_normal(rng, {layer.channels, in_channels, layer.kernel}, std));
        in_channels = layer.channels;
    }
    const std::size_t c = geometry_.model_dim;
    const double proj_std = 1.0 / std::sqrt(static_cast<double>(c));
    proj_weight_ = frozen_normal(rng, {c, c}, proj_std);
    proj_bias_ = Tensor::zeros({c});
}

Tensor PhonemeEncoder::encode(const AudioClip& clip) const {
    geometry_.frame_count(clip.samples.size());  // validates the minimum length
    NoGradGuard frozen;
    Tensor x(Tensor::Shape{1, clip.samples.size()}, clip.samples);
    for (std::size_t i = 0; i < conv_weights_.size(); ++i) {
        x = gelu(conv1d(x, conv_weights_[i], geometry_.tcn_layers[i].stride));
    }
    return linear(transpose2d(x), proj_weight_, proj_bias_);
}

FusionHead::FusionHead(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim_ < 1) throw ConfigError("fusion head dimension must be positive");
    Rng rng(seed_);
    const double std = 1.0 / std::sqrt(static_cast<double>(dim_));
    fc1_weight_ = trainable_normal(rng, {dim_, dim_}, std);
    fc1_bias_ = Tensor::zeros({dim_}, true);
    fc2_weight_ = trainable_normal(rng, {dim_, dim_}, std);
    fc2_bias_ = Tensor::zeros({dim_}, true);
    params_ = {{"fc1.weight", fc1_weight_},
               {"fc1.bias", fc1_bias_},
               {"fc2.weight", fc2_weight_},
               {"fc2.bias", fc2_bias_}};
}

Tensor FusionHead::parameter(const std::string& name) const {
    for (const NamedTensor& p : params_) {
        if (p.name == name) return p.tensor;
    }
    throw ConfigError("no parameter named '" + name + "'");
}

Tensor FusionHead::fuse(const SemanticEmbedding& semantic, const Tensor& frames) const {
    if (semantic.dim() != dim_) {
        throw ConfigError("semantic vector has dimension " + std::to_string(semantic.dim()) +
                          ", fusion head expects " + std::to_string(dim_));
    }
    if (frames.rank() != 2 || frames.dim(1) != dim_) {
        throw ConfigError("frame features " + frames.shape_str() + " do not match fusion width " +
                          std::to_string(dim_));
    }
    Tensor semantic_row(Tensor::Shape{1, dim_}, semantic.values);
    Tensor projected = linear(semantic_row, fc1_weight_, fc1_bias_);
    Tensor mixed = add_broadcast_row(frames, projected);
    return linear(mixed, fc2_weight_, fc2_bias_);
}

void save_fusion_head(const std::string& path, const FusionHead& head) {
    json j;
    j["model"] = "fusion_head";
    j["dim"] = head.dim();
    j["seed"] = head.seed();
    save_checkpoint_payload(path, CheckpointPayload{j.dump(), head.parameters()});
}

FusionHead load_fusion_head(const std::string& path) {
    CheckpointPayload payload = load_checkpoint_payload(path);
    json j;
    try {
        j = json::parse(payload.config_json);
    } catch (const json::parse_error& e) {
        throw CheckpointError(std::string("fusion head config record is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || j.value("model", "") != "fusion_head") {
        throw CheckpointError("checkpoint does not hold a fusion head");
    }
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    try {
        dim = j.at("dim").get<std::size_t>();
        seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw CheckpointError(std::string("fusion head config record is incomplete: ") + e.what());
    }

    FusionHead head(dim, seed);
    if (payload.params.size() != head.parameters().size()) {
        throw CheckpointError("checkpoint holds " + std::to_string(payload.params.size()) +
                              " parameters, fusion head expects " +
                              std::to_string(head.parameters().size()));
    }
    for (std::size_t i = 0; i < payload.params.size(); ++i) {
        const NamedTensor& stored = payload.params[i];
        const NamedTensor& slot = head.parameters()[i];
        if (stored.name != slot.name) {
            throw CheckpointError("checkpoint parameter " + std::to_string(i) + " is named '" +
                                  stored.name + "', expected '" + slot.name + "'");
        }
        if (stored.tensor.shape() != slot.tensor.shape()) {
            throw CheckpointError("checkpoint parameter '" + stored.name + "' has shape " +
                                  stored.tensor.shape_str() + ", expected " + slot.tensor.shape_str());
        }
        Tensor target = slot.tensor;
        target.values() = stored.tensor.values();
    }
    return head;
}

std::vector<double> word_feature(const Tensor& features, double start_s, double end_s,
                                 double frame_rate) {
    if (features.rank() != 2) {
        throw ShapeError("word features expect a [frames, width] tensor, got " + features.shape_str());
    }
    if (frame_rate <= 0.0) throw RangeError("frame rate must be positive");
    const std::size_t n = features.dim(0);
    const std::size_t c = features.dim(1);

    std::vector<double> sum(c, 0.0);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double center = (static_cast<double>(i) + 0.5) / frame_rate;
        if (center < start_s || center >= end_s) continue;
        for (std::size_t j = 0; j < c; ++j) sum[j] += features.values()[i * c + j];
        ++covered;
    }
    if (covered == 0) {
        throw RangeError("span [" + std::to_string(start_s) + ", " + std::to_string(end_s) +
                         ") covers no frame at rate " + std::to_string(frame_rate));
    }
    for (double& v : sum) v /= static_cast<double>(covered);
    return sum;
}

void write_frames(const std::string& path, const Tensor& frames) {
    if (frames.rank() != 2) {
        throw ShapeError("frame file expects a [frames, width] tensor, got " + frames.shape_str());
    }
    if (!frames.all_finite()) throw NonFiniteError("frame features contain a non-finite value");
    ByteWriter w;
    w.magic("W2SFRM1");
    w.u32le(static_cast<std::uint32_t>(frames.dim(0)));
    w.u32le(static_cast<std::uint32_t>(frames.dim(1)));
    for (double v : frames.values()) w.f64le(v);
    write_file_bytes(path, w.bytes());
}

Tensor read_frames(const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    ByteReader r(bytes, path);
    r.magic("W2SFRM1");
    const std::uint32_t n = r.u32le("frame count");
    const std::uint32_t c = r.u32le("frame width");
    if (n == 0 || c == 0) throw FormatError(path + ": frame file has a zero dimension");
    Tensor frames(Tensor::Shape{n, c});
    for (double& v : frames.values()) v = r.f64le("frame value");
    r.require_done();
    if (!frames.all_finite()) throw FormatError(path + ": frame file contains a non-finite value");
    return frames;
}

}  // namespace w2s
