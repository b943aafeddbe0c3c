#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "w2s/audio.hpp"
#include "w2s/embedding.hpp"
#include "w2s/tensor.hpp"
#include "w2s/wav2sem.hpp"

namespace w2s {

// Frozen frame-feature provider. Stands in for a large pretrained acoustic
// encoder: a conv frontend borrowing the paired model's layer geometry, so
// both produce the same frame count for any clip, followed by one linear
// projection at width C. Weights come from the encoder's own seed and are
// never trainable; two encoders with different seeds produce different
// features. Immutable after construction, safe to share across threads.
class PhonemeEncoder {
  public:
    PhonemeEncoder(const Wav2SemConfig& geometry, std::uint64_t seed);

    // Frame features [N', C] for the clip; deterministic, records no graph.
    // Throws an input-too-short error below the frontend's minimum length.
    Tensor encode(const AudioClip& clip) const;

    std::size_t frame_count(std::size_t samples) const { return geometry_.frame_count(samples); }
    std::size_t min_samples() const { return geometry_.min_samples(); }
    std::size_t dim() const { return geometry_.model_dim; }
    std::uint64_t seed() const { return seed_; }

  private:
    Wav2SemConfig geometry_;
    std::uint64_t seed_;
    std::vector<Tensor> conv_weights_;
    Tensor proj_weight_;
    Tensor proj_bias_;
};

// Trainable fusion operator blending one semantic vector into every frame:
//
//   fused[i] = fc2(fc1(semantic) + frames[i])
//
// Both maps are square affine transforms in C. The semantic vector is
// broadcast across frames, so sentence-level meaning reaches each frame
// feature without disturbing the frame count.
class FusionHead {
  public:
    FusionHead(std::size_t dim, std::uint64_t seed);

    // Differentiable when grad is enabled; gradients reach the four
    // parameter tensors and flow back into `frames` if it carries a graph.
    // Dimension mismatches throw a configuration error.
    Tensor fuse(const SemanticEmbedding& semantic, const Tensor& frames) const;

    const std::vector<NamedTensor>& parameters() const { return params_; }
    Tensor parameter(const std::string& name) const;
    std::size_t dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }

  private:
    std::size_t dim_;
    std::uint64_t seed_;
    Tensor fc1_weight_, fc1_bias_;
    Tensor fc2_weight_, fc2_bias_;
    std::vector<NamedTensor> params_;
};

void save_fusion_head(const std::string& path, const FusionHead& head);
FusionHead load_fusion_head(const std::string& path);

// Mean of the frames whose centers fall inside [start_s, end_s), where
// frame i has center (i + 0.5) / frame_rate. Callers usually pass
// frame_count / clip duration as the rate. Throws a range error when the
// span covers no frame.
std::vector<double> word_feature(const Tensor& features, double start_s, double end_s,
                                 double frame_rate);

// Frame-feature file, the ingestion path for features computed elsewhere:
// magic "W2SFRM1\0", u32 LE frame count, u32 LE width, then frame-major
// 64-bit LE values.
void write_frames(const std::string& path, const Tensor& frames);
Tensor read_frames(const std::string& path);

}  // namespace w2s
