#include "w2s/checkpoint.hpp"

#include <utility>

#include "w2s/binio.hpp"
#include "w2s/errors.hpp"

namespace w2s {

void save_checkpoint_payload(const std::filesystem::path& path, const CheckpointPayload& payload) {
    ByteWriter w;
    w.magic("W2SEMCK1");
    w.u32le(static_cast<std::uint32_t>(payload.config_json.size()));
    w.chars(payload.config_json);
    w.u32le(static_cast<std::uint32_t>(payload.params.size()));
    for (const NamedTensor& p : payload.params) {
        w.u32le(static_cast<std::uint32_t>(p.name.size()));
        w.chars(p.name);
        w.u32le(static_cast<std::uint32_t>(p.tensor.rank()));
        for (std::size_t d : p.tensor.shape()) w.u32le(static_cast<std::uint32_t>(d));
        for (double v : p.tensor.values()) w.f64le(v);
    }
    write_file_bytes(path, w.bytes());
}

CheckpointPayload load_checkpoint_payload(const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes;
    try {
        bytes = read_file_bytes(path);
    } catch (const FileError& e) {
        throw CheckpointError(e.what());
    }
    try {
        ByteReader r(bytes, "checkpoint '" + path.string() + "'");
        r.magic("W2SEMCK1");

        CheckpointPayload payload;
        const std::uint32_t config_len = r.u32le("config length");
        payload.config_json = r.chars(config_len, "config record");

        const std::uint32_t count = r.u32le("parameter count");
        payload.params.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) {
            const std::uint32_t name_len = r.u32le("name length");
            std::string name = r.chars(name_len, "parameter name");
            const std::uint32_t rank = r.u32le("rank");
            Tensor::Shape shape;
            for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(r.u32le("dimension"));
            Tensor t(shape);
            for (double& v : t.values()) v = r.f64le("parameter value");
            payload.params.push_back({std::move(name), std::move(t)});
        }
        r.require_done();
        return payload;
    } catch (const FormatError& e) {
        // Corrupt checkpoints are runtime failures, not usage errors.
        throw CheckpointError(e.what());
    } catch (const ShapeError& e) {
        throw CheckpointError(e.what());
    }
}

void save_model(const std::filesystem::path& path, const Wav2SemModel& model) {
    CheckpointPayload payload;
    payload.config_json = model.config().to_json();
    payload.params = model.parameters();
    save_checkpoint_payload(path, payload);
}

Wav2SemModel load_model(const std::filesystem::path& path) {
    CheckpointPayload payload = load_checkpoint_payload(path);

    Wav2SemConfig config;
    try {
        config = Wav2SemConfig::from_json(payload.config_json);
    } catch (const ConfigError& e) {
        throw CheckpointError("checkpoint '" + path.string() + "': " + e.what());
    }

    Wav2SemModel model(config);
    const std::vector<NamedTensor>& expected = model.parameters();
    if (expected.size() != payload.params.size()) {
        throw CheckpointError("checkpoint '" + path.string() + "' holds " +
                              std::to_string(payload.params.size()) + " parameters, config implies " +
                              std::to_string(expected.size()));
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const NamedTensor& stored = payload.params[i];
        const NamedTensor& slot = expected[i];
        if (stored.name != slot.name) {
            throw CheckpointError("checkpoint '" + path.string() + "': parameter " + std::to_string(i) +
                                  " is named '" + stored.name + "', expected '" + slot.name + "'");
        }
        if (stored.tensor.shape() != slot.tensor.shape()) {
            throw CheckpointError("checkpoint '" + path.string() + "': parameter '" + stored.name +
                                  "' has shape " + stored.tensor.shape_str() + ", expected " +
                                  slot.tensor.shape_str());
        }
        Tensor target = slot.tensor;
        target.values() = stored.tensor.values();
    }
    return model;
}

}  // namespace w2s
