// Exercises the pipeline's hard guarantees end to end: gradient
// correctness, the conv frame-rate contract, transformer structure,
// convergence and determinism of training, metric oracles, the semantic
// separation property of fusion, dictionary mining, the CLI round trip,
// and file-format round trips. Prints one pass/fail line per check and
// exits with the number of failures.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "test_util.hpp"
#include "w2s/analysis.hpp"
#include "w2s/audio.hpp"
#include "w2s/checkpoint.hpp"
#include "w2s/cli.hpp"
#include "w2s/cmudict.hpp"
#include "w2s/embedding.hpp"
#include "w2s/fixtures.hpp"
#include "w2s/fusion.hpp"
#include "w2s/gradcheck.hpp"
#include "w2s/homophone.hpp"
#include "w2s/manifest.hpp"
#include "w2s/metrics.hpp"
#include "w2s/ops.hpp"
#include "w2s/rng.hpp"
#include "w2s/tensor.hpp"
#include "w2s/training.hpp"
#include "w2s/wav2sem.hpp"

using namespace w2s;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

Tensor randn(Tensor::Shape shape, std::uint64_t seed) {
    Rng rng(seed);
    Tensor t(std::move(shape));
    for (double& v : t.values()) v = rng.next_normal();
    return t;
}

AudioClip noise_clip(std::size_t samples, std::uint64_t seed) {
    AudioClip clip;
    clip.sample_rate = 16000;
    Rng rng(seed);
    for (std::size_t i = 0; i < samples; ++i) clip.samples.push_back(rng.uniform(-0.5, 0.5));
    return clip;
}

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        files[fs::relative(entry.path(), root).string()] = read_bytes(entry.path());
    }
    return files;
}

bool bits_equal(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

// ------------------------------------------------- 1: gradient checks ----

bool gradient_suite(std::string& detail) {
    const double op_tol = 1e-4;
    const double full_tol = 1e-3;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        bool ok = true;
        auto op = [&](const char* name, const LossBuilder& fn,
                      std::vector<Tensor::Shape> shapes) {
            const GradCheckReport r = check_gradients(name, fn, std::move(shapes), seed);
            if (!r.passed(op_tol)) {
                detail += r.describe() + " (seed " + std::to_string(seed) + "); ";
                ok = false;
            }
        };

        op("add", [](std::vector<Tensor>& in) { return sum_all(add(in[0], in[1])); },
           {{3, 4}, {3, 4}});
        op("sub", [](std::vector<Tensor>& in) { return sum_all(mul(sub(in[0], in[1]), in[1])); },
           {{3, 4}, {3, 4}});
        op("mul", [](std::vector<Tensor>& in) { return sum_all(mul(in[0], in[1])); }, {{5}, {5}});
        op("scale", [](std::vector<Tensor>& in) { return sum_all(scale(in[0], -1.7)); }, {{4, 2}});
        op("gelu", [](std::vector<Tensor>& in) { return sum_all(gelu(in[0])); }, {{3, 5}});
        op("linear",
           [](std::vector<Tensor>& in) { return sum_all(gelu(linear(in[0], in[1], in[2]))); },
           {{4, 3}, {3, 5}, {5}});
        op("conv1d",
           [](std::vector<Tensor>& in) { return sum_all(gelu(conv1d(in[0], in[1], 2))); },
           {{2, 11}, {3, 2, 4}});
        op("layer_norm",
           [](std::vector<Tensor>& in) {
               return sum_all(gelu(layer_norm(in[0], in[1], in[2], 1e-5)));
           },
           {{4, 6}, {6}, {6}});
        op("matmul", [](std::vector<Tensor>& in) { return sum_all(gelu(matmul(in[0], in[1]))); },
           {{3, 4}, {4, 5}});
        op("matmul_nt",
           [](std::vector<Tensor>& in) { return sum_all(gelu(matmul_nt(in[0], in[1]))); },
           {{3, 4}, {5, 4}});
        op("transpose2d", [](std::vector<Tensor>& in) { return sum_all(gelu(transpose2d(in[0]))); },
           {{3, 4}});
        op("mean_rows", [](std::vector<Tensor>& in) { return sum_all(gelu(mean_rows(in[0]))); },
           {{6, 3}});
        op("add_row_bias",
           [](std::vector<Tensor>& in) { return sum_all(gelu(add_row_bias(in[0], in[1]))); },
           {{4, 3}, {4}});
        op("add_broadcast_row",
           [](std::vector<Tensor>& in) { return sum_all(gelu(add_broadcast_row(in[0], in[1]))); },
           {{4, 3}, {1, 3}});

        const Tensor mix = randn({4, 6}, Rng::derive_seed(seed, 99));
        op("softmax_rows",
           [mix](std::vector<Tensor>& in) { return sum_all(mul(softmax_rows(in[0]), mix)); },
           {{4, 6}});
        const Tensor slice_mix = randn({4, 3}, Rng::derive_seed(seed, 98));
        op("slice_cols",
           [slice_mix](std::vector<Tensor>& in) {
               return sum_all(mul(slice_cols(in[0], 2, 3), slice_mix));
           },
           {{4, 7}});
        op("concat_cols",
           [](std::vector<Tensor>& in) { return sum_all(gelu(concat_cols({in[0], in[1]}))); },
           {{3, 2}, {3, 4}});
        op("multi_head_self_attention",
           [](std::vector<Tensor>& in) {
               AttentionParams p{in[1], in[2], in[3], in[4], in[5], in[6], in[7], in[8]};
               return sum_all(gelu(multi_head_self_attention(in[0], 2, p)));
           },
           {{4, 6}, {6, 6}, {6}, {6, 6}, {6}, {6, 6}, {6}, {6, 6}, {6}});

        // abs, checked away from its kink.
        {
            Tensor x = randn({4, 4}, seed);
            x.set_requires_grad(true);
            for (double& v : x.values()) v += v >= 0.0 ? 0.5 : -0.5;
            const GradCheckReport r = check_gradients_at(
                "abs", [](std::vector<Tensor>& in) { return sum_all(abs(in[0])); }, {x});
            if (!r.passed(op_tol)) {
                detail += r.describe() + "; ";
                ok = false;
            }
        }
        if (!ok) return false;

        // Full pipeline: audio through the model into an alignment loss,
        // with every parameter as a leaf. The target sits far from the
        // initial output so no difference straddles the L1 kink.
        Wav2SemModel model(Wav2SemConfig::tiny(seed));
        const AudioClip clip = noise_clip(100, seed + 50);
        const Tensor target = Tensor::full({32}, 2.0);
        std::vector<Tensor> leaves;
        for (const NamedTensor& p : model.parameters()) leaves.push_back(p.tensor);
        const GradCheckReport full = check_gradients_at(
            "model_l1",
            [&model, &clip, &target](std::vector<Tensor>&) {
                return sum_all(abs(sub(model.forward(clip), target)));
            },
            std::move(leaves));
        if (!full.passed(full_tol)) {
            detail += full.describe() + " (seed " + std::to_string(seed) + ")";
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------- 2: frame counts ----

bool frame_counts(std::string& detail) {
    const Wav2SemConfig cfg = Wav2SemConfig::canonical(1);
    const std::size_t at_16k = cfg.frame_count(16000);
    const std::size_t at_32k = cfg.frame_count(32000);
    if (at_16k != 49 || at_32k != 99) {
        detail = "got " + std::to_string(at_16k) + " and " + std::to_string(at_32k);
        return false;
    }
    return true;
}

// ----------------------------------------------- 3: residual identity ----

void zero_param(const Wav2SemModel& model, const std::string& name) {
    Tensor t = model.parameter(name);
    std::fill(t.values().begin(), t.values().end(), 0.0);
}

bool residual_identity(std::string& detail) {
    // With both residual-branch output projections zeroed, every block
    // adds nothing, so the transformer reduces to the position offset.
    Wav2SemModel model(Wav2SemConfig::tiny(19));
    for (std::size_t layer = 0; layer < 2; ++layer) {
        const std::string prefix = "transformer." + std::to_string(layer) + ".";
        zero_param(model, prefix + "attn.wo");
        zero_param(model, prefix + "attn.bo");
        zero_param(model, prefix + "mlp.fc2.weight");
        zero_param(model, prefix + "mlp.fc2.bias");
    }
    NoGradGuard inference_only;
    const Tensor z = randn({6, 32}, 3);
    const Tensor out = model.transformer_forward(z);
    const Tensor expected = add(z, sinusoidal_positions(6, 32));
    double worst = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        worst = std::max(worst, std::abs(out.values()[i] - expected.values()[i]));
    }
    if (worst > 1e-12) {
        detail = "max deviation " + std::to_string(worst);
        return false;
    }
    return true;
}

// ------------------------------------------------ 4: overfit + determinism ----

bool overfit_and_determinism(std::string& detail) {
    TempDir tmp;
    const fs::path manifest = write_fixture_corpus(tmp.file("corpus"));
    const TrainDataset dataset = dataset_from_manifest(load_manifest(manifest));

    // 62 epochs over 8 samples = 496 optimizer steps.
    const auto run = [&dataset](const fs::path& dir) {
        Wav2SemModel model(Wav2SemConfig::tiny(11));
        const double initial = mean_loss(model, dataset);
        TrainConfig cfg;
        cfg.epochs = 62;
        cfg.learning_rate = 3e-3;
        cfg.seed = 11;
        cfg.checkpoint_dir = dir;
        fs::create_directories(dir);
        train_model(model, dataset, cfg);
        return std::make_pair(initial, mean_loss(model, dataset));
    };

    const auto [initial, final_loss] = run(tmp.file("a"));
    if (!(final_loss <= 0.1 * initial)) {
        detail = "loss only fell from " + std::to_string(initial) + " to " +
                 std::to_string(final_loss);
        return false;
    }
    run(tmp.file("b"));
    if (read_bytes(tmp.file("a") / "final.ckpt") != read_bytes(tmp.file("b") / "final.ckpt")) {
        detail = "identically seeded runs produced different checkpoints";
        return false;
    }
    return true;
}

// --------------------------------------------------- 5: metric oracles ----

// References written straight from the metric definitions, independent of
// the library implementations.
double reference_frame_norm_mean(const VertexSequence& gt, const VertexSequence& pred,
                                 const std::vector<std::size_t>& indices) {
    double total = 0.0;
    for (std::size_t t = 0; t < gt.frames; ++t) {
        double sq = 0.0;
        for (std::size_t v : indices) {
            for (std::size_t axis = 0; axis < 3; ++axis) {
                const double d = gt.at(t, v, axis) - pred.at(t, v, axis);
                sq += d * d;
            }
        }
        total += std::sqrt(sq);
    }
    return total / static_cast<double>(gt.frames);
}

double reference_vertex_std(const VertexSequence& seq, std::size_t vertex) {
    std::vector<double> norms;
    for (std::size_t t = 0; t < seq.frames; ++t) {
        norms.push_back(
            std::hypot(seq.at(t, vertex, 0), seq.at(t, vertex, 1), seq.at(t, vertex, 2)));
    }
    const double mean =
        std::accumulate(norms.begin(), norms.end(), 0.0) / static_cast<double>(norms.size());
    double var = 0.0;
    for (double n : norms) var += (n - mean) * (n - mean);
    return std::sqrt(var / static_cast<double>(norms.size()));
}

double reference_dynamics_gap(const VertexSequence& gt, const VertexSequence& pred,
                              const std::vector<std::size_t>& indices) {
    double total = 0.0;
    for (std::size_t v : indices) {
        total += reference_vertex_std(gt, v) - reference_vertex_std(pred, v);
    }
    return total / static_cast<double>(indices.size());
}

bool metric_oracles(std::string& detail) {
    for (int instance = 0; instance < 100; ++instance) {
        Rng rng(1000 + static_cast<std::uint64_t>(instance));
        const std::size_t frames = 2 + rng.next_index(9);
        const std::size_t vertices = 1 + rng.next_index(20);

        VertexSequence gt;
        gt.frames = frames;
        gt.vertices = vertices;
        gt.positions.resize(frames * vertices * 3);
        VertexSequence pred = gt;
        for (double& p : gt.positions) p = rng.uniform(-2.0, 2.0);
        for (double& p : pred.positions) p = rng.uniform(-2.0, 2.0);

        RegionMask mask;
        mask.name = "subset";
        for (std::size_t v = 0; v < vertices; ++v) {
            if (rng.next_double() < 0.5) mask.indices.push_back(v);
        }
        if (mask.indices.empty()) mask.indices.push_back(rng.next_index(vertices));
        std::vector<std::size_t> all(vertices);
        std::iota(all.begin(), all.end(), std::size_t{0});
        const RegionMask full{"all", all};

        if (!close_rel(lve(gt, pred, mask), reference_frame_norm_mean(gt, pred, mask.indices),
                       1e-12) ||
            !close_rel(mve(gt, pred), reference_frame_norm_mean(gt, pred, all), 1e-12) ||
            !close_rel(fdd(gt, pred, mask), reference_dynamics_gap(gt, pred, mask.indices),
                       1e-12)) {
            detail = "instance " + std::to_string(instance) + " diverged from its reference";
            return false;
        }
        if (lve(gt, gt, mask) != 0.0 || mve(gt, gt) != 0.0 || fdd(gt, gt, mask) != 0.0) {
            detail = "identity input did not score exactly zero";
            return false;
        }
        if (!bits_equal(fdd(gt, pred, mask), -fdd(pred, gt, mask))) {
            detail = "swapping the arguments did not negate the dynamics gap";
            return false;
        }
    }
    return true;
}

// ------------------------------------------------ 6: fusion separation ----

bool fusion_separation(std::string& detail) {
    // Four words sharing one frame-feature block, so every plain pairwise
    // distance is exactly zero; only the sentence embeddings differ.
    const std::size_t frames_n = 6;
    const std::size_t dim = 32;
    NoGradGuard inference_only;
    const Tensor frames = randn({frames_n, dim}, 77);
    const FusionHead head(dim, 5);

    WordFeatures plain;
    WordFeatures fused;
    std::vector<NearHomophonePair> pairs;
    const std::vector<std::string> words = {"ALPHA", "BRAVO", "CHARLIE", "DELTA"};
    for (std::size_t k = 0; k < words.size(); ++k) {
        SemanticEmbedding semantic;
        const Tensor draw = randn({dim}, 100 + k);
        semantic.values = draw.values();
        const Tensor mixed = head.fuse(semantic, frames);
        const double rate = static_cast<double>(frames_n);
        plain[words[k]] = word_feature(frames, 0.0, 1.0, rate);
        fused[words[k]] = word_feature(mixed, 0.0, 1.0, rate);
    }
    for (std::size_t i = 0; i < words.size(); ++i) {
        for (std::size_t j = i + 1; j < words.size(); ++j) {
            pairs.push_back({words[i], words[j], "", "constructed"});
        }
    }

    const DecouplingReport report = decoupling_report(pairs, plain, fused, "constructed");
    if (report.raw_mean != 0.0) {
        detail = "plain distances were not exactly zero";
        return false;
    }
    for (const PairDistance& pair : report.pairs) {
        if (!(pair.fused_distance > 0.0)) {
            detail = pair.word_a + "/" + pair.word_b + " stayed together after fusion";
            return false;
        }
    }
    if (!(report.fused_mean > report.raw_mean)) {
        detail = "mean fused distance did not exceed the plain mean";
        return false;
    }
    detail =
        "published reference (plain -> fused): wav2vec2 0.0397 -> 0.0701, "
        "hubert 0.2689 -> 0.2909";
    return true;
}

// ------------------------------------------- 7: dictionary and mining ----

std::size_t sequence_edit_distance(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                            std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
        }
    }
    return d[a.size()][b.size()];
}

bool oracle_qualifies(const std::vector<std::string>& prons_a,
                      const std::vector<std::string>& prons_b, const SimilarityTable& table) {
    const std::vector<std::string> a = strip_stress(prons_a);
    const std::vector<std::string> b = strip_stress(prons_b);
    const std::size_t dist = sequence_edit_distance(a, b);
    if (dist == 0) return true;
    if (dist != 1 || a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return table.shared_class(a[i], b[i]) != nullptr;
    }
    return false;
}

bool dictionary_mining(std::string& detail) {
    TempDir tmp;
    const fs::path dict_path = write_fixture_cmudict(tmp.path);
    const std::string raw = read_bytes(dict_path);
    const auto line_count = std::count(raw.begin(), raw.end(), '\n');
    if (line_count != 50) {
        detail = "dictionary has " + std::to_string(line_count) + " lines";
        return false;
    }
    const std::vector<WordPronunciation> entries = parse_cmudict(dict_path);
    if (entries.size() != 46) {
        detail = "parsed " + std::to_string(entries.size()) + " entries";
        return false;
    }

    // The 12-word corpus vocabulary, mined against the brute-force oracle.
    std::set<std::string> vocab;
    for (const FixtureUtterance& u : fixture_utterances()) {
        std::istringstream words(u.transcript);
        std::string word;
        while (words >> word) {
            std::transform(word.begin(), word.end(), word.begin(),
                           [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
            vocab.insert(word);
        }
    }
    if (vocab.size() != 12) {
        detail = "vocabulary has " + std::to_string(vocab.size()) + " words";
        return false;
    }
    std::vector<WordPronunciation> kept;
    for (const WordPronunciation& e : entries) {
        if (vocab.count(e.word) != 0) kept.push_back(e);
    }

    const SimilarityTable& table = default_similarity_table();
    std::map<std::string, std::vector<std::vector<std::string>>> by_word;
    for (const WordPronunciation& e : kept) by_word[e.word].push_back(e.phonemes);
    std::set<std::pair<std::string, std::string>> expected;
    for (const auto& [word_a, prons_a] : by_word) {
        for (const auto& [word_b, prons_b] : by_word) {
            if (word_a >= word_b) continue;
            for (const auto& pa : prons_a) {
                for (const auto& pb : prons_b) {
                    if (oracle_qualifies(pa, pb, table)) expected.insert({word_a, word_b});
                }
            }
        }
    }

    std::set<std::pair<std::string, std::string>> mined;
    for (const NearHomophonePair& p : mine_pairs(kept, table)) {
        mined.insert({p.word_a, p.word_b});
    }
    if (mined != expected) {
        detail = "mined " + std::to_string(mined.size()) + " pairs, oracle found " +
                 std::to_string(expected.size());
        return false;
    }
    if (mined.count({"SHEEP", "SHIP"}) == 0) {
        detail = "SHEEP/SHIP pair missing";
        return false;
    }
    return true;
}

// ------------------------------------------------- 8: cli end to end ----

int cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    return cli_main(args, out, err);
}

bool cli_end_to_end(std::string& detail) {
    TempDir tmp;
    const fs::path fx = tmp.file("fx");
    const fs::path run = tmp.file("run");
    const fs::path rep = tmp.file("rep");
    const fs::path met = tmp.file("met");

    const std::vector<std::vector<std::string>> commands = {
        {"export-fixtures", "--out", fx.string()},
        {"train", "--manifest", (fx / "corpus" / "manifest.jsonl").string(), "--out", run.string(),
         "--preset", "tiny", "--epochs", "40", "--learning-rate", "0.003", "--seed", "11"},
        {"analyze", "--cmudict", (fx / "cmudict_fixture.dict").string(), "--vocab",
         (fx / "vocab.txt").string(), "--manifest", (fx / "corpus" / "manifest.jsonl").string(),
         "--checkpoint", (run / "final.ckpt").string(), "--out", rep.string()},
        {"eval", "--gt", (fx / "animation" / "gt.vtx").string(), "--pred",
         (fx / "animation" / "pred.vtx").string(), "--lip-mask",
         (fx / "animation" / "lip.mask").string(), "--upper-mask",
         (fx / "animation" / "upper.mask").string(), "--out", met.string()},
    };

    for (const auto& command : commands) {
        const int code = cli(command);
        if (code != 0) {
            detail = command.front() + " exited with " + std::to_string(code);
            return false;
        }
    }
    const auto snapshot_run = tree_bytes(run);
    const auto snapshot_rep = tree_bytes(rep);
    const auto snapshot_met = tree_bytes(met);

    for (const auto& command : commands) {
        const int code = cli(command);
        if (code != 0) {
            detail = "rerun of " + command.front() + " exited with " + std::to_string(code);
            return false;
        }
    }
    if (tree_bytes(run) != snapshot_run || tree_bytes(rep) != snapshot_rep ||
        tree_bytes(met) != snapshot_met) {
        detail = "rerun changed at least one output file";
        return false;
    }
    return true;
}

// ------------------------------------------------------ 9: round trips ----

bool file_round_trips(std::string& detail) {
    TempDir tmp;

    const Wav2SemModel model(Wav2SemConfig::tiny(5));
    const fs::path first = tmp.file("model.ckpt");
    save_model(first, model);
    const Wav2SemModel loaded = load_model(first);
    if (loaded.config().to_json() != model.config().to_json()) {
        detail = "checkpoint changed the config";
        return false;
    }
    for (std::size_t p = 0; p < model.parameters().size(); ++p) {
        const auto& a = model.parameters()[p].tensor.values();
        const auto& b = loaded.parameters()[p].tensor.values();
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!bits_equal(a[i], b[i])) {
                detail = "parameter " + model.parameters()[p].name + " changed";
                return false;
            }
        }
    }
    const fs::path second = tmp.file("model_again.ckpt");
    save_model(second, loaded);
    if (read_bytes(first) != read_bytes(second)) {
        detail = "second save produced different bytes";
        return false;
    }

    SemanticEmbedding embedding;
    embedding.kind = EmbeddingKind::mean;
    embedding.values = {0.0, -0.0, 1e-300, -1e300, 3.25, -2.0 / 3.0};
    const fs::path emb_first = tmp.file("e.emb");
    write_embedding(emb_first, embedding);
    const SemanticEmbedding back = read_embedding(emb_first);
    if (back.kind != embedding.kind || back.values.size() != embedding.values.size()) {
        detail = "embedding header changed";
        return false;
    }
    for (std::size_t i = 0; i < back.values.size(); ++i) {
        if (!bits_equal(back.values[i], embedding.values[i])) {
            detail = "embedding value " + std::to_string(i) + " changed";
            return false;
        }
    }
    const fs::path emb_second = tmp.file("e2.emb");
    write_embedding(emb_second, back);
    if (read_bytes(emb_first) != read_bytes(emb_second)) {
        detail = "embedding rewrite produced different bytes";
        return false;
    }
    return true;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_s;
        std::function<bool(std::string&)> body;
    };
    const std::vector<Criterion> criteria = {
        {"per-op and end-to-end gradient checks across 3 seeds", 60.0, gradient_suite},
        {"conv schedule maps 16000 samples to 49 frames, 32000 to 99", 1.0, frame_counts},
        {"zeroed residual projections reduce each block to the identity", 5.0, residual_identity},
        {"tiny model overfits the fixture corpus; reruns match bitwise", 300.0,
         overfit_and_determinism},
        {"metric oracles, identity zeros, swapped-argument antisymmetry", 30.0, metric_oracles},
        {"semantic fusion separates identical plain word features", 30.0, fusion_separation},
        {"dictionary fixture parses; mined pairs match brute force", 5.0, dictionary_mining},
        {"cli train -> analyze -> eval completes; rerun is byte-identical", 600.0, cli_end_to_end},
        {"checkpoint and embedding round-trips are bit-exact", 5.0, file_round_trips},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const Criterion& criterion = criteria[i];
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.body(detail);
        } catch (const std::exception& e) {
            detail = std::string("threw: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = elapsed < criterion.limit_s;
        const bool passed = ok && in_time;
        std::printf("%zu. %-63s %s  (%5.1fs, limit %.0fs)\n", i + 1, criterion.name,
                    passed ? "pass" : "FAIL", elapsed, criterion.limit_s);
        if (!detail.empty()) std::printf("   %s\n", detail.c_str());
        if (ok && !in_time) std::printf("   finished correctly but over the time limit\n");
        if (!passed) ++failures;
    }
    if (failures == 0) {
        std::printf("all %zu checks passed\n", criteria.size());
    } else {
        std::printf("%d of %zu checks FAILED\n", failures, criteria.size());
    }
    return failures;
}
