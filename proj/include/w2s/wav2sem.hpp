#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "w2s/audio.hpp"
#include "w2s/embedding.hpp"
#include "w2s/ops.hpp"
#include "w2s/tensor.hpp"

namespace w2s {

struct TcnLayerSpec {
    std::size_t channels = 0;
    std::size_t kernel = 0;
    std::size_t stride = 0;
};

// Architecture and initialization parameters for the audio encoder. A config
// plus its seed fully determines every model weight.
struct Wav2SemConfig {
    std::vector<TcnLayerSpec> tcn_layers;
    std::size_t model_dim = 0;          // width C shared by TCN output and transformer
    std::size_t transformer_layers = 0;
    std::size_t heads = 0;
    std::size_t mlp_dim = 0;
    std::uint64_t seed = 0;
    EmbeddingKind target_kind = EmbeddingKind::cls;

    // Full-size preset: 7 conv layers at 512 channels with kernels
    // (10,3,3,3,3,2,2) and strides (5,2,2,2,2,2,2), 12 transformer layers,
    // 8 heads, MLP width 3072. At 16 kHz this produces 49 frames per second.
    static Wav2SemConfig canonical(std::uint64_t seed);

    // Small preset for tests and experiments: 3 conv layers at 32 channels
    // with kernels (10,3,2) and strides (5,2,2), 2 transformer layers,
    // 2 heads, MLP width 64. Accepts inputs from 30 samples up.
    static Wav2SemConfig tiny(std::uint64_t seed);

    void validate() const;

    // Smallest sample count for which every conv layer sees at least one
    // full kernel window.
    std::size_t min_samples() const;

    // Frame count produced for the given input length; throws an
    // input-too-short error carrying min_samples() when below the minimum.
    std::size_t frame_count(std::size_t samples) const;

    // Total scalar parameter count, computed from shapes alone.
    std::size_t parameter_count() const;

    std::string to_json() const;
    static Wav2SemConfig from_json(const std::string& text);
};

struct NamedTensor {
    std::string name;
    Tensor tensor;
};

// One transformer block's parameters. Tensors are shared with the model's
// flat named list; the struct only provides structured access.
struct TransformerBlockParams {
    Tensor ln1_gain, ln1_shift;
    AttentionParams attn;
    Tensor ln2_gain, ln2_shift;
    Tensor fc1_weight, fc1_bias;
    Tensor fc2_weight, fc2_bias;
};

// Sinusoidal position table of shape [n, c]: even columns sin, odd columns
// cos, wavelengths geometric from 2π to 10000·2π.
Tensor sinusoidal_positions(std::size_t n, std::size_t c);

// Mean over the frame axis: [N, C] -> [C].
Tensor semantic_pool(const Tensor& frames);

// The audio-to-sentence-embedding encoder: strided conv stack for local
// features, pre-LN transformer for context, mean pool for the sentence
// vector.
class Wav2SemModel {
  public:
    explicit Wav2SemModel(Wav2SemConfig config);

    const Wav2SemConfig& config() const { return config_; }

    // Parameters in construction order; names are stable across runs and
    // releases since checkpoints key on them.
    const std::vector<NamedTensor>& parameters() const { return params_; }
    Tensor parameter(const std::string& name) const;

    // Frame features [N, C] from raw audio. The clip's sample values feed
    // the conv stack directly; the graph is recorded when grad is enabled.
    Tensor tcn_forward(const AudioClip& clip) const;

    // Adds the position table, then applies the residual blocks
    //   Z^ = Z + attention(norm(Z));  Z' = Z^ + mlp(norm(Z^))
    // for each layer. Shape-preserving on [N, C].
    Tensor transformer_forward(const Tensor& z) const;

    // Full differentiable pipeline: audio -> frames -> context -> pooled [C].
    Tensor forward(const AudioClip& clip) const;

    // Inference-only encode; no graph is recorded.
    SemanticEmbedding encode(const AudioClip& clip) const;

    // Marks the model read-only for optimizers and drops gradient buffers.
    void freeze();
    bool frozen() const { return frozen_; }

    std::size_t parameter_count() const;

  private:
    Wav2SemConfig config_;
    std::vector<NamedTensor> params_;
    std::vector<Tensor> tcn_weights_;
    std::vector<TransformerBlockParams> blocks_;
    bool frozen_ = false;
};

}  // namespace w2s
