#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "w2s/tensor.hpp"
#include "w2s/wav2sem.hpp"

namespace w2s {

// On-disk model container, little-endian:
//   bytes 0-7  magic "W2SEMCK1"
//   u32 length + JSON config record (identifies the model family)
//   u32 parameter count, then per parameter:
//     u32 length + name, u32 rank, rank u32 dims, 64-bit values
// Values round-trip bit-for-bit.
struct CheckpointPayload {
    std::string config_json;
    std::vector<NamedTensor> params;
};

void save_checkpoint_payload(const std::filesystem::path& path, const CheckpointPayload& payload);
CheckpointPayload load_checkpoint_payload(const std::filesystem::path& path);

// Writes the model's config and parameters.
void save_model(const std::filesystem::path& path, const Wav2SemModel& model);

// Rebuilds the model from its stored config, then overwrites every
// parameter from the stored blobs. Name or shape mismatches against the
// config-derived layout fail the load.
Wav2SemModel load_model(const std::filesystem::path& path);

}  // namespace w2s
