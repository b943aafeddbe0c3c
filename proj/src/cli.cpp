#include "w2s/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "w2s/analysis.hpp"
#include "w2s/audio.hpp"
#include "w2s/checkpoint.hpp"
#include "w2s/cmudict.hpp"
#include "w2s/embedding.hpp"
#include "w2s/errors.hpp"
#include "w2s/fixtures.hpp"
#include "w2s/fusion.hpp"
#include "w2s/homophone.hpp"
#include "w2s/manifest.hpp"
#include "w2s/metrics.hpp"
#include "w2s/tensor.hpp"
#include "w2s/training.hpp"
#include "w2s/wav2sem.hpp"

namespace w2s {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string upper(std::string word) {
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return word;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FileError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw FileError("failed writing '" + path.string() + "'");
}

// The resolved-config record every command leaves next to its outputs.
// Key order comes from the JSON library's sorted storage, so a rerun with
// the same arguments rewrites the file byte for byte.
void write_run_record(const fs::path& path, const json& record) {
    write_text_file(path, record.dump(2) + "\n");
}

// ---------------------------------------------------------------- train ----

struct TrainArgs {
    std::string manifest;
    std::string out_dir;
    std::string config_path;
    std::string preset;
    std::string resume;
    std::size_t epochs = 0;
    double learning_rate = 0.0;
    std::size_t checkpoint_every = 0;
    std::uint64_t seed = 0;
    bool shuffle = false;
};

// Merges the optional JSON config file into the two config structs. The
// file holds a "model" section (a full model config record) and/or a
// "train" section with run settings; anything else is refused so typos
// cannot silently fall back to defaults.
void apply_config_file(const std::string& path, Wav2SemConfig& model_cfg, TrainConfig& tcfg) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open config file '" + path + "'");
    json parsed;
    try {
        parsed = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!parsed.is_object()) throw ConfigError("config file '" + path + "' must hold a JSON object");
    for (const auto& [key, value] : parsed.items()) {
        if (key == "model") {
            model_cfg = Wav2SemConfig::from_json(value.dump());
        } else if (key == "train") {
            if (!value.is_object()) throw ConfigError("config file: \"train\" must be an object");
            for (const auto& [name, setting] : value.items()) {
                try {
                    if (name == "epochs") {
                        tcfg.epochs = setting.get<std::size_t>();
                    } else if (name == "learning_rate") {
                        tcfg.learning_rate = setting.get<double>();
                    } else if (name == "seed") {
                        tcfg.seed = setting.get<std::uint64_t>();
                    } else if (name == "shuffle") {
                        tcfg.shuffle = setting.get<bool>();
                    } else if (name == "checkpoint_every") {
                        tcfg.checkpoint_every = setting.get<std::size_t>();
                    } else {
                        throw ConfigError("config file: unknown train setting \"" + name + "\"");
                    }
                } catch (const json::exception&) {
                    throw ConfigError("config file: train setting \"" + name + "\" has the wrong type");
                }
            }
        } else {
            throw ConfigError("config file: unknown section \"" + key + "\"");
        }
    }
}

Wav2SemConfig make_preset(const std::string& name, std::uint64_t seed) {
    if (name == "tiny") return Wav2SemConfig::tiny(seed);
    if (name == "canonical") return Wav2SemConfig::canonical(seed);
    throw ConfigError("unknown preset '" + name + "'");
}

int run_train(const CLI::App& cmd, const TrainArgs& a, std::ostream& out) {
    // Precedence: built-in defaults, then the config file, then flags.
    // --seed is the master seed and lands in both the weight init and the
    // shuffle stream.
    Wav2SemConfig model_cfg = Wav2SemConfig::canonical(0);
    TrainConfig tcfg;
    if (!a.config_path.empty()) apply_config_file(a.config_path, model_cfg, tcfg);
    if (cmd.count("--preset") > 0) model_cfg = make_preset(a.preset, model_cfg.seed);
    if (cmd.count("--epochs") > 0) tcfg.epochs = a.epochs;
    if (cmd.count("--learning-rate") > 0) tcfg.learning_rate = a.learning_rate;
    if (cmd.count("--checkpoint-every") > 0) tcfg.checkpoint_every = a.checkpoint_every;
    if (cmd.count("--shuffle") > 0) tcfg.shuffle = a.shuffle;
    if (cmd.count("--seed") > 0) {
        tcfg.seed = a.seed;
        model_cfg.seed = a.seed;
    }

    const fs::path out_dir = a.out_dir;
    fs::create_directories(out_dir);
    tcfg.checkpoint_dir = out_dir;
    tcfg.log_path = out_dir / "train_log.txt";
    if (!a.resume.empty()) tcfg.resume_state = a.resume;
    model_cfg.validate();
    tcfg.validate();

    const TrainDataset dataset = dataset_from_manifest(load_manifest(a.manifest));
    Wav2SemModel model(model_cfg);
    const double initial = mean_loss(model, dataset);
    const TrainLog log = train_model(model, dataset, tcfg);
    const double final_loss = mean_loss(model, dataset);

    json record;
    record["command"] = "train";
    record["manifest"] = a.manifest;
    record["out"] = a.out_dir;
    record["model"] = json::parse(model_cfg.to_json());
    record["train"] = {{"epochs", tcfg.epochs},         {"learning_rate", tcfg.learning_rate},
                       {"batch_size", tcfg.batch_size}, {"seed", tcfg.seed},
                       {"shuffle", tcfg.shuffle},       {"checkpoint_every", tcfg.checkpoint_every}};
    if (!a.resume.empty()) record["resume"] = a.resume;
    write_run_record(out_dir / "resolved_config.json", record);

    out << "samples: " << dataset.size() << "\n";
    out << "parameters: " << model.parameter_count() << "\n";
    out << "steps: " << log.records.size() << "\n";
    out << "initial loss: " << sci(initial) << "\n";
    out << "final loss: " << sci(final_loss) << "\n";
    out << "checkpoint: " << (out_dir / "final.ckpt").string() << "\n";
    return 0;
}

// --------------------------------------------------------------- encode ----

struct EncodeArgs {
    std::string checkpoint;
    std::string audio;
    std::string out_path;
    std::string features = "semantic";
    std::uint64_t phoneme_seed = 7101;
};

int run_encode(const EncodeArgs& a, std::ostream& out) {
    const Wav2SemModel model = load_model(a.checkpoint);
    const AudioClip clip = read_wav(a.audio);

    json record;
    record["command"] = "encode";
    record["checkpoint"] = a.checkpoint;
    record["audio"] = a.audio;
    record["out"] = a.out_path;
    record["features"] = a.features;

    if (a.features == "semantic") {
        const SemanticEmbedding embedding = model.encode(clip);
        write_embedding(a.out_path, embedding);
        out << "dim: " << embedding.dim() << "\n";
        out << "kind: " << (embedding.kind == EmbeddingKind::cls ? "cls" : "mean") << "\n";
    } else {
        const PhonemeEncoder encoder(model.config(), a.phoneme_seed);
        const Tensor frames = encoder.encode(clip);
        write_frames(a.out_path, frames);
        record["phoneme_seed"] = a.phoneme_seed;
        out << "frames: " << frames.shape()[0] << "\n";
        out << "dim: " << frames.shape()[1] << "\n";
    }
    out << "wrote: " << a.out_path << "\n";
    write_run_record(fs::path(a.out_path + ".run.json"), record);
    return 0;
}

// ----------------------------------------------------------------- fuse ----

struct FuseArgs {
    std::string embedding;
    std::string frames;
    std::string out_path;
    std::string head_path;
    std::string save_head;
    std::uint64_t seed = 0;
};

int run_fuse(const FuseArgs& a, std::ostream& out) {
    const SemanticEmbedding embedding = read_embedding(a.embedding);
    const Tensor frames = read_frames(a.frames);
    const FusionHead head =
        a.head_path.empty() ? FusionHead(embedding.dim(), a.seed) : load_fusion_head(a.head_path);

    NoGradGuard guard;
    const Tensor fused = head.fuse(embedding, frames);
    write_frames(a.out_path, fused);
    if (!a.save_head.empty()) save_fusion_head(a.save_head, head);

    json record;
    record["command"] = "fuse";
    record["embedding"] = a.embedding;
    record["frames"] = a.frames;
    record["out"] = a.out_path;
    if (a.head_path.empty()) {
        record["seed"] = a.seed;
    } else {
        record["head"] = a.head_path;
    }
    if (!a.save_head.empty()) record["save_head"] = a.save_head;
    write_run_record(fs::path(a.out_path + ".run.json"), record);

    out << "frames: " << fused.shape()[0] << "\n";
    out << "dim: " << fused.shape()[1] << "\n";
    out << "wrote: " << a.out_path << "\n";
    return 0;
}

// ----------------------------------------------------------------- eval ----

struct EvalArgs {
    std::string gt;
    std::string pred;
    std::string lip_mask;
    std::string upper_mask;
    std::string out_dir;
};

int run_eval(const EvalArgs& a, std::ostream& out) {
    const VertexSequence gt = read_vertex_sequence(a.gt);
    const VertexSequence pred = read_vertex_sequence(a.pred);
    const RegionMask lip = read_region_mask(a.lip_mask, "lip");
    const RegionMask upper = read_region_mask(a.upper_mask, "upper");

    const double lip_error = lve(gt, pred, lip);
    const double vertex_error = mve(gt, pred);
    const double dynamics_deviation = fdd(gt, pred, upper);

    out << "lve " << sci(lip_error) << "\n";
    out << "mve " << sci(vertex_error) << "\n";
    out << "fdd " << sci(dynamics_deviation) << "\n";

    if (!a.out_dir.empty()) {
        const fs::path out_dir = a.out_dir;
        fs::create_directories(out_dir);
        const json metrics = {
            {"lve", lip_error}, {"mve", vertex_error}, {"fdd", dynamics_deviation}};
        write_text_file(out_dir / "metrics.json", metrics.dump(2) + "\n");
        json record;
        record["command"] = "eval";
        record["gt"] = a.gt;
        record["pred"] = a.pred;
        record["lip_mask"] = a.lip_mask;
        record["upper_mask"] = a.upper_mask;
        record["out"] = a.out_dir;
        write_run_record(out_dir / "resolved_config.json", record);
    }
    return 0;
}

// -------------------------------------------------------------- analyze ----

struct AnalyzeArgs {
    std::string cmudict;
    std::string vocab;
    std::string manifest;
    std::string checkpoint;
    std::string out_dir;
    std::string head_path;
    std::string table_path;
    std::string include_path;
    std::string exclude_path;
    std::uint64_t fusion_seed = 0;
    std::uint64_t phoneme_seed = 7101;
};

// One word per whitespace-separated token, uppercased; '#' starts a
// comment. Duplicates collapse to the first occurrence.
std::vector<std::string> read_word_list(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open word list '" + path.string() + "'");
    std::vector<std::string> words;
    std::set<std::string> seen;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string word;
        while (fields >> word) {
            word = upper(word);
            if (seen.insert(word).second) words.push_back(word);
        }
    }
    return words;
}

std::string join_or_none(const std::vector<std::string>& items) {
    if (items.empty()) return "none";
    std::string joined;
    for (const std::string& item : items) {
        if (!joined.empty()) joined += " ";
        joined += item;
    }
    return joined;
}

int run_analyze(const AnalyzeArgs& a, std::ostream& out) {
    const std::vector<WordPronunciation> dict = parse_cmudict(a.cmudict);
    const std::vector<std::string> vocab = read_word_list(a.vocab);
    const std::set<std::string> vocab_set(vocab.begin(), vocab.end());

    // Vocabulary words without a dictionary entry cannot be mined; they are
    // reported and skipped rather than failing the run.
    std::vector<WordPronunciation> entries;
    std::set<std::string> covered;
    for (const WordPronunciation& entry : dict) {
        if (vocab_set.count(entry.word) > 0) {
            entries.push_back(entry);
            covered.insert(entry.word);
        }
    }
    std::vector<std::string> missing_words;
    for (const std::string& word : vocab) {
        if (covered.count(word) == 0) missing_words.push_back(word);
    }

    const SimilarityTable table =
        a.table_path.empty() ? default_similarity_table() : parse_similarity_table(a.table_path);
    std::vector<NearHomophonePair> pairs = mine_pairs(entries, table);
    if (!a.include_path.empty() || !a.exclude_path.empty()) {
        using PairList = std::vector<std::pair<std::string, std::string>>;
        const PairList include = a.include_path.empty() ? PairList{} : parse_pair_list(a.include_path);
        const PairList exclude = a.exclude_path.empty() ? PairList{} : parse_pair_list(a.exclude_path);
        pairs = apply_pair_overrides(std::move(pairs), include, exclude);
    }

    const Wav2SemModel model = load_model(a.checkpoint);
    const PhonemeEncoder phoneme(model.config(), a.phoneme_seed);
    const FusionHead head = a.head_path.empty()
                                ? FusionHead(model.config().model_dim, a.fusion_seed)
                                : load_fusion_head(a.head_path);

    // Per-word features, averaged over every occurrence in the corpus. The
    // plain space comes straight from the frame encoder; the fused space
    // blends in the sentence embedding first.
    std::map<std::string, std::vector<double>> raw_sum;
    std::map<std::string, std::vector<double>> fused_sum;
    std::map<std::string, std::size_t> occurrences;
    if (!vocab_set.empty()) {
        NoGradGuard guard;
        for (const ManifestEntry& entry : load_manifest(a.manifest)) {
            const AudioClip clip = read_wav(entry.audio_path);
            const Tensor frames = phoneme.encode(clip);
            const SemanticEmbedding semantic = model.encode(clip);
            const Tensor fused = head.fuse(semantic, frames);
            const double rate = static_cast<double>(frames.shape()[0]) / clip.duration();
            for (const WordSpan& span : entry.words) {
                const std::string word = upper(span.word);
                if (vocab_set.count(word) == 0) continue;
                std::vector<double> raw_feature;
                std::vector<double> fused_feature;
                try {
                    raw_feature = word_feature(frames, span.start_s, span.end_s, rate);
                    fused_feature = word_feature(fused, span.start_s, span.end_s, rate);
                } catch (const RangeError&) {
                    continue;  // span narrower than one frame
                }
                std::vector<double>& r = raw_sum[word];
                std::vector<double>& f = fused_sum[word];
                r.resize(raw_feature.size(), 0.0);
                f.resize(fused_feature.size(), 0.0);
                for (std::size_t i = 0; i < raw_feature.size(); ++i) r[i] += raw_feature[i];
                for (std::size_t i = 0; i < fused_feature.size(); ++i) f[i] += fused_feature[i];
                ++occurrences[word];
            }
        }
    }
    WordFeatures raw_features;
    WordFeatures fused_features;
    for (const auto& [word, n] : occurrences) {
        std::vector<double> r = raw_sum[word];
        std::vector<double> f = fused_sum[word];
        for (double& v : r) v /= static_cast<double>(n);
        for (double& v : f) v /= static_cast<double>(n);
        raw_features[word] = std::move(r);
        fused_features[word] = std::move(f);
    }

    // A mined pair is only measurable when both words appeared in the audio.
    std::vector<NearHomophonePair> measurable;
    std::vector<std::string> skipped_pairs;
    for (const NearHomophonePair& pair : pairs) {
        if (raw_features.count(pair.word_a) > 0 && raw_features.count(pair.word_b) > 0) {
            measurable.push_back(pair);
        } else {
            skipped_pairs.push_back(pair.word_a + "/" + pair.word_b);
        }
    }

    const std::string encoder_name = fs::path(a.checkpoint).stem().string();
    DecouplingReport report;
    if (measurable.empty()) {
        report.encoder = encoder_name;
    } else {
        report = decoupling_report(measurable, raw_features, fused_features, encoder_name);
    }

    const fs::path out_dir = a.out_dir;
    fs::create_directories(out_dir);
    write_decoupling_records(out_dir / "pairs.jsonl", report);

    std::string text = format_decoupling_table(report);
    text += "\nskipped words (not in dictionary): " + join_or_none(missing_words) + "\n";
    text += "skipped pairs (no audio features): " + join_or_none(skipped_pairs) + "\n";

    const auto project_into = [&text](const WordFeatures& features, const fs::path& csv,
                                      const std::string& tag) {
        std::vector<LabeledVector> vectors;
        for (const auto& [word, values] : features) vectors.push_back({word, values});
        std::vector<ProjectedPoint> points;
        try {
            points = project_2d(vectors);
        } catch (const ConfigError& e) {
            text += tag + " projection skipped: " + e.what() + "\n";
        } catch (const RangeError& e) {
            text += tag + " projection skipped: " + e.what() + "\n";
        }
        write_projection_csv(csv, points);
    };
    project_into(raw_features, out_dir / "projection_raw.csv", "plain");
    project_into(fused_features, out_dir / "projection_fused.csv", "fused");

    write_text_file(out_dir / "report.txt", text);

    json record;
    record["command"] = "analyze";
    record["cmudict"] = a.cmudict;
    record["vocab"] = a.vocab;
    record["manifest"] = a.manifest;
    record["checkpoint"] = a.checkpoint;
    record["out"] = a.out_dir;
    record["phoneme_seed"] = a.phoneme_seed;
    if (a.head_path.empty()) {
        record["fusion_seed"] = a.fusion_seed;
    } else {
        record["head"] = a.head_path;
    }
    if (!a.table_path.empty()) record["similarity_table"] = a.table_path;
    if (!a.include_path.empty()) record["include"] = a.include_path;
    if (!a.exclude_path.empty()) record["exclude"] = a.exclude_path;
    write_run_record(out_dir / "resolved_config.json", record);

    out << "vocabulary: " << vocab.size() << " words (" << missing_words.size()
        << " missing from dictionary)\n";
    out << "pairs: " << report.pairs.size() << " (" << skipped_pairs.size()
        << " without audio features)\n";
    out << "plain mean: " << sci(report.raw_mean) << "\n";
    out << "fused mean: " << sci(report.fused_mean) << "\n";
    out << "report: " << (out_dir / "report.txt").string() << "\n";
    return 0;
}

// ------------------------------------------------------ export-fixtures ----

int run_export_fixtures(const std::string& out_dir_arg, std::ostream& out) {
    const fs::path out_dir = out_dir_arg;
    fs::create_directories(out_dir);

    const fs::path manifest = write_fixture_corpus(out_dir / "corpus");
    const fs::path dict = write_fixture_cmudict(out_dir);

    std::vector<std::string> vocab;
    std::set<std::string> seen;
    for (const FixtureUtterance& utterance : fixture_utterances()) {
        for (const WordSpan& span : utterance.words) {
            const std::string word = upper(span.word);
            if (seen.insert(word).second) vocab.push_back(word);
        }
    }
    std::string vocab_text;
    for (const std::string& word : vocab) vocab_text += word + "\n";
    write_text_file(out_dir / "vocab.txt", vocab_text);
    write_text_file(out_dir / "similarity_classes.txt",
                    format_similarity_table(default_similarity_table()));
    write_fixture_animation(out_dir / "animation");

    json record;
    record["command"] = "export-fixtures";
    record["out"] = out_dir_arg;
    write_run_record(out_dir / "resolved_config.json", record);

    out << "wrote: " << manifest.string() << "\n";
    out << "wrote: " << dict.string() << "\n";
    out << "wrote: " << (out_dir / "vocab.txt").string() << "\n";
    out << "wrote: " << (out_dir / "similarity_classes.txt").string() << "\n";
    out << "wrote: " << (out_dir / "animation").string() << "\n";
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"audio-to-semantics toolkit: train, encode, fuse, evaluate, analyze"};
    app.require_subcommand(1);

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "Train the audio encoder on a manifest corpus");
    train_cmd->add_option("--manifest", train_args.manifest, "Dataset manifest (JSON lines)")
        ->required();
    train_cmd->add_option("--out", train_args.out_dir, "Directory for checkpoints, log, and config")
        ->required();
    train_cmd->add_option("--config", train_args.config_path,
                          "JSON file with model and/or train sections");
    train_cmd->add_option("--preset", train_args.preset, "Model size preset")
        ->check(CLI::IsMember({"tiny", "canonical"}));
    train_cmd->add_option("--epochs", train_args.epochs, "Pass count over the dataset");
    train_cmd->add_option("--learning-rate", train_args.learning_rate, "Adam step size");
    train_cmd->add_option("--checkpoint-every", train_args.checkpoint_every,
                          "Steps between numbered checkpoints (0 disables)");
    train_cmd->add_option("--seed", train_args.seed, "Master seed for weights and shuffling");
    train_cmd->add_flag("--shuffle,!--no-shuffle", train_args.shuffle,
                        "Reshuffle the sample order every epoch");
    train_cmd->add_option("--resume", train_args.resume, "Optimizer state file from an earlier run");

    EncodeArgs encode_args;
    CLI::App* encode_cmd = app.add_subcommand("encode", "Run a trained encoder over one clip");
    encode_cmd->add_option("--checkpoint", encode_args.checkpoint, "Model checkpoint")->required();
    encode_cmd->add_option("--audio", encode_args.audio, "Input WAV file")->required();
    encode_cmd->add_option("--out", encode_args.out_path, "Output file")->required();
    encode_cmd
        ->add_option("--features", encode_args.features,
                     "semantic: one sentence embedding; phoneme: per-frame features")
        ->check(CLI::IsMember({"semantic", "phoneme"}));
    encode_cmd->add_option("--phoneme-seed", encode_args.phoneme_seed,
                           "Weight seed for the frozen frame encoder");

    FuseArgs fuse_args;
    CLI::App* fuse_cmd =
        app.add_subcommand("fuse", "Blend a sentence embedding into per-frame features");
    fuse_cmd->add_option("--embedding", fuse_args.embedding, "Sentence embedding file")->required();
    fuse_cmd->add_option("--frames", fuse_args.frames, "Frame-feature file")->required();
    fuse_cmd->add_option("--out", fuse_args.out_path, "Output frame-feature file")->required();
    fuse_cmd->add_option("--head", fuse_args.head_path, "Saved fusion head (default: fresh weights)");
    fuse_cmd->add_option("--seed", fuse_args.seed, "Weight seed for a fresh fusion head");
    fuse_cmd->add_option("--save-head", fuse_args.save_head, "Also save the head used");

    EvalArgs eval_args;
    CLI::App* eval_cmd =
        app.add_subcommand("eval", "Facial-animation error metrics between two vertex sequences");
    eval_cmd->add_option("--gt", eval_args.gt, "Reference vertex sequence")->required();
    eval_cmd->add_option("--pred", eval_args.pred, "Predicted vertex sequence")->required();
    eval_cmd->add_option("--lip-mask", eval_args.lip_mask, "Lip-region vertex indices")->required();
    eval_cmd->add_option("--upper-mask", eval_args.upper_mask, "Upper-face vertex indices")
        ->required();
    eval_cmd->add_option("--out", eval_args.out_dir, "Also write metrics.json into this directory");

    AnalyzeArgs analyze_args;
    CLI::App* analyze_cmd = app.add_subcommand(
        "analyze", "Near-homophone feature-space report for a trained encoder");
    analyze_cmd->add_option("--cmudict", analyze_args.cmudict, "Pronunciation dictionary")
        ->required();
    analyze_cmd->add_option("--vocab", analyze_args.vocab, "Word list to mine over")->required();
    analyze_cmd->add_option("--manifest", analyze_args.manifest, "Corpus with word timings")
        ->required();
    analyze_cmd->add_option("--checkpoint", analyze_args.checkpoint, "Model checkpoint")->required();
    analyze_cmd->add_option("--out", analyze_args.out_dir, "Directory for the report files")
        ->required();
    analyze_cmd->add_option("--head", analyze_args.head_path,
                            "Saved fusion head (default: fresh weights)");
    analyze_cmd->add_option("--fusion-seed", analyze_args.fusion_seed,
                            "Weight seed for a fresh fusion head");
    analyze_cmd->add_option("--phoneme-seed", analyze_args.phoneme_seed,
                            "Weight seed for the frozen frame encoder");
    analyze_cmd->add_option("--similarity-table", analyze_args.table_path,
                            "Phoneme similarity classes (default: built-in table)");
    analyze_cmd->add_option("--include", analyze_args.include_path, "Word pairs to force in");
    analyze_cmd->add_option("--exclude", analyze_args.exclude_path, "Word pairs to drop");

    std::string export_out;
    CLI::App* export_cmd =
        app.add_subcommand("export-fixtures", "Write the synthetic test corpus and dictionaries");
    export_cmd->add_option("--out", export_out, "Target directory")->required();

    try {
        // The parser consumes its argument vector from the back.
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (train_cmd->parsed()) return run_train(*train_cmd, train_args, out);
        if (encode_cmd->parsed()) return run_encode(encode_args, out);
        if (fuse_cmd->parsed()) return run_fuse(fuse_args, out);
        if (eval_cmd->parsed()) return run_eval(eval_args, out);
        if (analyze_cmd->parsed()) return run_analyze(analyze_args, out);
        if (export_cmd->parsed()) return run_export_fixtures(export_out, out);
        return 0;
    } catch (const CLI::CallForHelp&) {
        const CLI::App* target = &app;
        while (!target->get_subcommands().empty()) target = target->get_subcommands().front();
        out << target->help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace w2s
