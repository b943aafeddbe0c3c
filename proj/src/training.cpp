#include "w2s/training.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "w2s/checkpoint.hpp"
#include "w2s/errors.hpp"
#include "w2s/ops.hpp"
#include "w2s/rng.hpp"

namespace w2s {

namespace {

using nlohmann::json;

std::string train_record_line(const TrainRecord& r) {
    char loss[40];
    std::snprintf(loss, sizeof(loss), "%.17g", r.loss);
    return std::to_string(r.step) + "\t" + std::to_string(r.epoch) + "\t" + r.sample_id + "\t" + loss;
}

std::vector<std::size_t> epoch_order(std::size_t n, bool shuffle, std::uint64_t seed,
                                     std::size_t epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (shuffle) {
        Rng rng(Rng::derive_seed(seed, epoch));
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = rng.next_index(i);
            std::swap(order[i - 1], order[j]);
        }
    }
    return order;
}

std::ofstream open_log(const std::filesystem::path& path, bool append) {
    if (path.empty()) return std::ofstream();
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw FileError("cannot write training log '" + path.string() + "'");
    return out;
}

[[noreturn]] void abort_non_finite(std::size_t step, const std::string& sample_id) {
    throw NonFiniteError("training aborted at step " + std::to_string(step) + " on sample '" +
                         sample_id + "': loss is not finite");
}

}  // namespace

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw ConfigError("training: learning rate must be positive");
    if (batch_size != 1) {
        throw ConfigError("training: only batch size 1 is supported, got " +
                          std::to_string(batch_size));
    }
    if (checkpoint_every > 0 && checkpoint_dir.empty()) {
        throw ConfigError("training: checkpoint cadence needs a checkpoint directory");
    }
}

TrainDataset dataset_from_manifest(const std::vector<ManifestEntry>& entries) {
    TrainDataset dataset;
    for (const ManifestEntry& entry : entries) {
        TrainSample sample;
        sample.id = entry.audio_path;
        sample.clip = read_wav(entry.audio_path);
        sample.target = read_embedding(entry.embedding_path);
        dataset.push_back(std::move(sample));
    }
    return dataset;
}

Tensor l1_loss(const Tensor& prediction, const Tensor& target) {
    if (prediction.shape() != target.shape()) {
        throw ConfigError("l1 loss over mismatched shapes " + prediction.shape_str() + " and " +
                          target.shape_str());
    }
    return sum_all(abs(sub(prediction, target)));
}

Tensor l1_loss(const Tensor& prediction, const SemanticEmbedding& target) {
    if (prediction.rank() != 1 || prediction.dim(0) != target.dim()) {
        throw ConfigError("l1 loss: prediction " + prediction.shape_str() +
                          " does not match target dimension " + std::to_string(target.dim()));
    }
    return l1_loss(prediction, Tensor(Tensor::Shape{target.dim()}, target.values));
}

double l1_distance(const SemanticEmbedding& a, const SemanticEmbedding& b) {
    if (a.dim() != b.dim()) {
        throw ConfigError("l1 distance over dimensions " + std::to_string(a.dim()) + " and " +
                          std::to_string(b.dim()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) total += std::fabs(a.values[i] - b.values[i]);
    return total;
}

double mean_loss(const Wav2SemModel& model, const TrainDataset& dataset) {
    if (dataset.empty()) throw ConfigError("mean loss over an empty dataset");
    NoGradGuard inference_only;
    double total = 0.0;
    for (const TrainSample& sample : dataset) {
        total += l1_loss(model.forward(sample.clip), sample.target).item();
    }
    return total / static_cast<double>(dataset.size());
}

TrainLog train_model(Wav2SemModel& model, const TrainDataset& dataset, const TrainConfig& cfg) {
    cfg.validate();
    if (model.frozen()) throw FrozenModelError("cannot train a frozen model");
    if (dataset.empty()) throw ConfigError("training dataset is empty");
    for (const TrainSample& sample : dataset) {
        model.config().frame_count(sample.clip.samples.size());
        if (sample.target.dim() != model.config().model_dim) {
            throw ConfigError("sample '" + sample.id + "': target has dimension " +
                              std::to_string(sample.target.dim()) + ", model expects " +
                              std::to_string(model.config().model_dim));
        }
    }

    std::vector<Tensor> params;
    for (const NamedTensor& p : model.parameters()) params.push_back(p.tensor);
    Adam opt(params, cfg.learning_rate);

    double best = std::numeric_limits<double>::infinity();
    std::size_t step = 0;
    if (!cfg.resume_state.empty()) {
        LoadedTrainState resumed = load_train_state(cfg.resume_state, model.parameters());
        opt.set_state(resumed.state);
        best = resumed.best_loss;
        step = resumed.state.steps;
    }

    const bool checkpoints = !cfg.checkpoint_dir.empty();
    if (checkpoints) std::filesystem::create_directories(cfg.checkpoint_dir);
    std::ofstream log_file = open_log(cfg.log_path, /*append=*/!cfg.resume_state.empty());

    TrainLog log;
    const std::size_t total = cfg.epochs * dataset.size();
    while (step < total) {
        const std::size_t epoch = step / dataset.size();
        const std::vector<std::size_t> order =
            epoch_order(dataset.size(), cfg.shuffle, cfg.seed, epoch);
        for (std::size_t pos = step % dataset.size(); pos < dataset.size() && step < total; ++pos) {
            const TrainSample& sample = dataset[order[pos]];
            ++step;

            opt.zero_grad();
            Tensor loss = l1_loss(model.forward(sample.clip), sample.target);
            const double value = loss.item();
            if (!std::isfinite(value)) abort_non_finite(step, sample.id);
            loss.backward();
            opt.step();

            TrainRecord record{step, epoch, sample.id, value};
            if (log_file.is_open()) log_file << train_record_line(record) << "\n";
            log.records.push_back(std::move(record));

            if (value < best) {
                best = value;
                if (checkpoints) save_model(cfg.checkpoint_dir / "best.ckpt", model);
            }
            if (checkpoints && cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0) {
                const std::string stem = "step_" + std::to_string(step);
                save_model(cfg.checkpoint_dir / (stem + ".ckpt"), model);
                save_train_state(cfg.checkpoint_dir / (stem + ".state"), opt.state(),
                                 model.parameters(), best);
            }
        }
    }

    if (checkpoints) {
        save_model(cfg.checkpoint_dir / "final.ckpt", model);
        save_train_state(cfg.checkpoint_dir / "final.state", opt.state(), model.parameters(), best);
    }
    return log;
}

TrainLog train_fusion_head(FusionHead& head, const Wav2SemModel& model, const PhonemeEncoder& encoder,
                           const TrainDataset& dataset, const TrainConfig& cfg) {
    cfg.validate();
    if (!model.frozen()) throw ConfigError("fusion training expects a frozen audio encoder");
    if (dataset.empty()) throw ConfigError("training dataset is empty");
    if (head.dim() != model.config().model_dim || head.dim() != encoder.dim()) {
        throw ConfigError("fusion training widths disagree: head " + std::to_string(head.dim()) +
                          ", model " + std::to_string(model.config().model_dim) + ", frame provider " +
                          std::to_string(encoder.dim()));
    }

    // Both feature extractors are frozen, so each sample's inputs and its
    // synthetic target are fixed for the whole run and computed once.
    struct Prepared {
        const TrainSample* sample;
        SemanticEmbedding semantic;
        Tensor frames;
        Tensor target;
    };
    std::vector<Prepared> prepared;
    for (const TrainSample& sample : dataset) {
        encoder.frame_count(sample.clip.samples.size());
        if (sample.target.dim() != head.dim()) {
            throw ConfigError("sample '" + sample.id + "': target has dimension " +
                              std::to_string(sample.target.dim()) + ", fusion head expects " +
                              std::to_string(head.dim()));
        }
        Prepared p;
        p.sample = &sample;
        p.semantic = model.encode(sample.clip);
        p.frames = encoder.encode(sample.clip);
        p.target = Tensor(p.frames.shape());
        const std::size_t c = head.dim();
        for (std::size_t i = 0; i < p.frames.dim(0); ++i) {
            for (std::size_t j = 0; j < c; ++j) {
                p.target.values()[i * c + j] = p.frames.values()[i * c + j] + sample.target.values[j];
            }
        }
        prepared.push_back(std::move(p));
    }

    std::vector<Tensor> params;
    for (const NamedTensor& p : head.parameters()) params.push_back(p.tensor);
    Adam opt(params, cfg.learning_rate);
    std::ofstream log_file = open_log(cfg.log_path, /*append=*/false);

    TrainLog log;
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::vector<std::size_t> order =
            epoch_order(prepared.size(), cfg.shuffle, cfg.seed, epoch);
        for (std::size_t pos = 0; pos < prepared.size(); ++pos) {
            const Prepared& p = prepared[order[pos]];
            ++step;

            opt.zero_grad();
            Tensor loss = l1_loss(head.fuse(p.semantic, p.frames), p.target);
            const double value = loss.item();
            if (!std::isfinite(value)) abort_non_finite(step, p.sample->id);
            loss.backward();
            opt.step();

            TrainRecord record{step, epoch, p.sample->id, value};
            if (log_file.is_open()) log_file << train_record_line(record) << "\n";
            log.records.push_back(std::move(record));
        }
    }

    if (!cfg.checkpoint_dir.empty()) {
        std::filesystem::create_directories(cfg.checkpoint_dir);
        save_fusion_head((cfg.checkpoint_dir / "head_final.ckpt").string(), head);
    }
    return log;
}

void save_train_state(const std::filesystem::path& path, const AdamState& state,
                      const std::vector<NamedTensor>& params, double best_loss) {
    if (state.m.size() != params.size() || state.v.size() != params.size()) {
        throw ConfigError("train state holds " + std::to_string(state.m.size()) +
                          " moment buffers for " + std::to_string(params.size()) + " parameters");
    }
    json j;
    j["model"] = "train_state";
    j["steps"] = state.steps;
    if (std::isfinite(best_loss)) j["best_loss"] = best_loss;

    CheckpointPayload payload;
    payload.config_json = j.dump();
    for (std::size_t i = 0; i < params.size(); ++i) {
        payload.params.push_back({"m." + params[i].name, Tensor(params[i].tensor.shape(), state.m[i])});
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        payload.params.push_back({"v." + params[i].name, Tensor(params[i].tensor.shape(), state.v[i])});
    }
    save_checkpoint_payload(path, payload);
}

LoadedTrainState load_train_state(const std::filesystem::path& path,
                                  const std::vector<NamedTensor>& params) {
    CheckpointPayload payload = load_checkpoint_payload(path);
    json j;
    try {
        j = json::parse(payload.config_json);
    } catch (const json::parse_error& e) {
        throw CheckpointError(std::string("train state record is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || j.value("model", "") != "train_state") {
        throw CheckpointError("checkpoint does not hold training state");
    }

    LoadedTrainState out;
    try {
        out.state.steps = j.at("steps").get<std::size_t>();
    } catch (const json::exception& e) {
        throw CheckpointError(std::string("train state record is incomplete: ") + e.what());
    }
    out.best_loss = j.contains("best_loss") && j["best_loss"].is_number()
                        ? j["best_loss"].get<double>()
                        : std::numeric_limits<double>::infinity();

    if (payload.params.size() != 2 * params.size()) {
        throw CheckpointError("train state holds " + std::to_string(payload.params.size()) +
                              " buffers, expected " + std::to_string(2 * params.size()));
    }
    for (std::size_t half = 0; half < 2; ++half) {
        const std::string prefix = half == 0 ? "m." : "v.";
        auto& dest = half == 0 ? out.state.m : out.state.v;
        for (std::size_t i = 0; i < params.size(); ++i) {
            const NamedTensor& stored = payload.params[half * params.size() + i];
            const std::string expected = prefix + params[i].name;
            if (stored.name != expected) {
                throw CheckpointError("train state buffer " + std::to_string(i) + " is named '" +
                                      stored.name + "', expected '" + expected + "'");
            }
            if (stored.tensor.shape() != params[i].tensor.shape()) {
                throw CheckpointError("train state buffer '" + stored.name + "' has shape " +
                                      stored.tensor.shape_str() + ", expected " +
                                      params[i].tensor.shape_str());
            }
            dest.push_back(stored.tensor.values());
        }
    }
    return out;
}

void write_train_log(const std::filesystem::path& path, const TrainLog& log) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FileError("cannot write training log '" + path.string() + "'");
    for (const TrainRecord& r : log.records) out << train_record_line(r) << "\n";
}

}  // namespace w2s
