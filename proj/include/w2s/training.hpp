#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "w2s/adam.hpp"
#include "w2s/embedding.hpp"
#include "w2s/fusion.hpp"
#include "w2s/manifest.hpp"
#include "w2s/tensor.hpp"
#include "w2s/wav2sem.hpp"

namespace w2s {

// Run settings. The defaults are the full-scale recipe; tests shrink
// epochs and raise the rate for quick overfit runs.
struct TrainConfig {
    std::size_t epochs = 200;
    double learning_rate = 1e-4;
    std::size_t batch_size = 1;  // only 1 is supported; clips vary in length
    std::uint64_t seed = 0;
    bool shuffle = false;  // per-epoch seeded shuffle when set

    // Every checkpoint_every steps a numbered checkpoint lands in
    // checkpoint_dir (0 disables the cadence). The directory, when set,
    // also receives best.ckpt (lowest per-step loss) and final.ckpt, the
    // latter paired with final.state for resuming.
    std::filesystem::path checkpoint_dir;
    std::size_t checkpoint_every = 0;

    // One text line per optimizer step when set.
    std::filesystem::path log_path;

    // A .state file from an earlier run; continues its trajectory.
    std::filesystem::path resume_state;

    void validate() const;
};

struct TrainRecord {
    std::size_t step = 0;   // 1-based, monotone across epochs
    std::size_t epoch = 0;  // 0-based
    std::string sample_id;
    double loss = 0.0;
};

struct TrainLog {
    std::vector<TrainRecord> records;
};

// One training example, paired with the id used in logs and errors.
struct TrainSample {
    std::string id;
    AudioClip clip;
    SemanticEmbedding target;
};
using TrainDataset = std::vector<TrainSample>;

// Reads every referenced audio and embedding file; ids are the manifest's
// audio paths.
TrainDataset dataset_from_manifest(const std::vector<ManifestEntry>& entries);

// Sum of absolute component differences. Mismatched widths throw a
// configuration error. The gradient at a zero difference is 0.
Tensor l1_loss(const Tensor& prediction, const Tensor& target);
Tensor l1_loss(const Tensor& prediction, const SemanticEmbedding& target);
double l1_distance(const SemanticEmbedding& a, const SemanticEmbedding& b);

// Dataset-mean alignment loss of the current parameters; builds no graph.
double mean_loss(const Wav2SemModel& model, const TrainDataset& dataset);

// Optimizes the model's alignment loss sample by sample. Deterministic for
// a fixed (dataset order, config); a non-finite loss aborts with the step
// and sample id; a frozen model is refused.
TrainLog train_model(Wav2SemModel& model, const TrainDataset& dataset, const TrainConfig& cfg);

// Downstream head phase: the audio encoder must already be frozen, the
// frame provider supplies per-frame features, and each sample's target is
// its own frame features shifted by the target embedding, so the head is
// pushed to reproduce exactly the semantic offset. Checkpoints land in
// checkpoint_dir as head_final.ckpt; cadence and resume do not apply.
TrainLog train_fusion_head(FusionHead& head, const Wav2SemModel& model, const PhonemeEncoder& encoder,
                           const TrainDataset& dataset, const TrainConfig& cfg);

// Moment buffers and step counter, stored alongside a model checkpoint.
void save_train_state(const std::filesystem::path& path, const AdamState& state,
                      const std::vector<NamedTensor>& params, double best_loss);
struct LoadedTrainState {
    AdamState state;
    double best_loss = 0.0;
};
LoadedTrainState load_train_state(const std::filesystem::path& path,
                                  const std::vector<NamedTensor>& params);

void write_train_log(const std::filesystem::path& path, const TrainLog& log);

}  // namespace w2s
