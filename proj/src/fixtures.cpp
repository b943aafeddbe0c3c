#include "w2s/fixtures.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "w2s/errors.hpp"
#include "w2s/metrics.hpp"
#include "w2s/rng.hpp"

namespace w2s {

namespace {

using nlohmann::json;

constexpr std::size_t kClipSamples = 800;
constexpr std::size_t kSampleRate = 16000;
constexpr std::size_t kEmbeddingDim = 32;

std::vector<FixtureUtterance> build_utterances() {
    // Drawn from a vocabulary of near-homophone pairs so the same corpus
    // also feeds the pronunciation analysis fixtures.
    struct Line {
        const char* name;
        const char* transcript;
    };
    const Line lines[] = {
        {"clip_000", "sheep seat"},   {"clip_001", "ship seed"},
        {"clip_002", "plot mix"},     {"clip_003", "blot mitts"},
        {"clip_004", "bare look"},    {"clip_005", "bear luke"},
        {"clip_006", "sheep plot look"}, {"clip_007", "ship blot luke"},
    };

    std::vector<FixtureUtterance> out;
    const double duration = static_cast<double>(kClipSamples) / static_cast<double>(kSampleRate);
    for (const Line& line : lines) {
        FixtureUtterance u;
        u.name = line.name;
        u.transcript = line.transcript;

        std::vector<std::string> tokens;
        std::string word;
        for (const char* p = line.transcript;; ++p) {
            if (*p == ' ' || *p == '\0') {
                tokens.push_back(word);
                word.clear();
                if (*p == '\0') break;
            } else {
                word.push_back(*p);
            }
        }
        const double step = duration / static_cast<double>(tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            u.words.push_back({tokens[i], step * static_cast<double>(i),
                               i + 1 == tokens.size() ? duration : step * static_cast<double>(i + 1)});
        }
        out.push_back(std::move(u));
    }
    return out;
}

}  // namespace

const std::vector<FixtureUtterance>& fixture_utterances() {
    static const std::vector<FixtureUtterance> utterances = build_utterances();
    return utterances;
}

AudioClip fixture_clip(const FixtureUtterance& utterance) {
    AudioClip clip;
    clip.sample_rate = kSampleRate;
    clip.samples.assign(kClipSamples, 0.0);

    for (const WordSpan& span : utterance.words) {
        const std::uint64_t h = fnv1a64(span.word);
        const double f1 = 150.0 + static_cast<double>(h & 0xff) * 6.0;
        const double f2 = 600.0 + static_cast<double>((h >> 8) & 0xff) * 10.0;
        const double f3 = 1800.0 + static_cast<double>((h >> 16) & 0xff) * 14.0;
        const std::size_t begin = static_cast<std::size_t>(span.start_s * kSampleRate);
        const std::size_t end = static_cast<std::size_t>(span.end_s * kSampleRate);
        for (std::size_t i = begin; i < end && i < kClipSamples; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(kSampleRate);
            clip.samples[i] = 0.3 * std::sin(2.0 * M_PI * f1 * t) +
                              0.2 * std::sin(2.0 * M_PI * f2 * t) +
                              0.1 * std::sin(2.0 * M_PI * f3 * t);
        }
    }

    Rng noise(Rng::derive_seed(fnv1a64(utterance.transcript), 0xA0D10));
    for (double& s : clip.samples) {
        s += noise.uniform(-0.01, 0.01);
        s = std::max(-1.0, std::min(1.0, s));
    }
    return clip;
}

SemanticEmbedding fixture_embedding(const std::string& transcript) {
    Rng rng(Rng::derive_seed(fnv1a64(transcript), 0xE3B));
    SemanticEmbedding e;
    e.kind = EmbeddingKind::cls;
    for (std::size_t i = 0; i < kEmbeddingDim; ++i) e.values.push_back(0.5 * rng.next_normal());
    return e;
}

std::filesystem::path write_fixture_corpus(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path manifest_path = dir / "manifest.jsonl";
    std::ofstream manifest(manifest_path);
    if (!manifest) throw FileError("cannot write manifest '" + manifest_path.string() + "'");

    for (const FixtureUtterance& u : fixture_utterances()) {
        const std::string wav_name = u.name + ".wav";
        const std::string emb_name = u.name + ".emb";
        write_wav(dir / wav_name, fixture_clip(u));
        write_embedding((dir / emb_name).string(), fixture_embedding(u.transcript));

        json words = json::array();
        for (const WordSpan& span : u.words) {
            words.push_back({span.word, span.start_s, span.end_s});
        }
        json record;
        record["audio_path"] = wav_name;
        record["embedding_path"] = emb_name;
        record["transcript"] = u.transcript;
        record["words"] = words;
        manifest << record.dump() << "\n";
    }
    return manifest_path;
}

std::filesystem::path write_fixture_cmudict(const std::filesystem::path& dir) {
    // Real pronunciations so dictionary-driven tests exercise honest data.
    // The corpus vocabulary sits among fillers that add variant markers
    // and a few extra near-homophone pairs.
    static const char* kDictText =
        ";;; fixture pronunciation dictionary\n"
        ";;; subset of the CMU inventory, uppercase entries\n"
        "ABOUT  AH0 B AW1 T\n"
        "AUDIO  AO1 D IY0 OW0\n"
        "BARE  B EH1 R\n"
        "BAT  B AE1 T\n"
        "BEAR  B EH1 R\n"
        "BET  B EH1 T\n"
        "BLOT  B L AA1 T\n"
        "CAB  K AE1 B\n"
        "CAP  K AE1 P\n"
        ";;; COAT pairs with both CODE and GOAT\n"
        "COAT  K OW1 T\n"
        "CODE  K OW1 D\n"
        "DOG  D AO1 G\n"
        "EITHER  IY1 DH ER0\n"
        "EITHER(2)  AY1 DH ER0\n"
        "FACE  F EY1 S\n"
        "FACES  F EY1 S IH0 Z\n"
        "GOAT  G OW1 T\n"
        "HELLO  HH AH0 L OW1\n"
        "HELLO(2)  HH EH0 L OW1\n"
        "JUDGE  JH AH1 JH\n"
        "LOOK  L UH1 K\n"
        "LUKE  L UW1 K\n"
        "MITTS  M IH1 T S\n"
        "MIX  M IH1 K S\n"
        "MODEL  M AA1 D AH0 L\n"
        "MOUTH  M AW1 TH\n"
        "NOISE  N OY1 Z\n"
        "PHONE  F OW1 N\n"
        "PLOT  P L AA1 T\n"
        ";;; READ keeps both tenses\n"
        "READ  R IY1 D\n"
        "READ(2)  R EH1 D\n"
        "SEAT  S IY1 T\n"
        "SEED  S IY1 D\n"
        "SHEEP  SH IY1 P\n"
        "SHIP  SH IH1 P\n"
        "SIGNAL  S IH1 G N AH0 L\n"
        "SOUND  S AW1 N D\n"
        "SPEECH  S P IY1 CH\n"
        "TALK  T AO1 K\n"
        "THEN  DH EH1 N\n"
        "THIN  TH IH1 N\n"
        "TONE  T OW1 N\n"
        "VOICE  V OY1 S\n"
        "WAVE  W EY1 V\n"
        "YES  Y EH1 S\n"
        "ZOO  Z UW1\n";

    std::filesystem::create_directories(dir);
    const std::filesystem::path path = dir / "cmudict_fixture.dict";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FileError("cannot write dictionary '" + path.string() + "'");
    out << kDictText;
    return path;
}

void write_fixture_animation(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    VertexSequence gt;
    gt.frames = 5;
    gt.vertices = 6;
    gt.fps = 25.0f;
    gt.positions.resize(gt.frames * gt.vertices * 3);
    Rng gt_rng(Rng::derive_seed(fnv1a64("animation"), 0x6F1));
    for (double& p : gt.positions) p = gt_rng.uniform(-1.0, 1.0);

    // The prediction drifts from the reference by small seeded offsets, so
    // every metric lands on a nonzero, reproducible value.
    VertexSequence pred = gt;
    Rng pred_rng(Rng::derive_seed(fnv1a64("animation"), 0x6F2));
    for (double& p : pred.positions) p += 0.1 * pred_rng.next_normal();

    write_vertex_sequence(dir / "gt.vtx", gt);
    write_vertex_sequence(dir / "pred.vtx", pred);
    write_region_mask(dir / "lip.mask", RegionMask{"lip", {0, 1}});
    write_region_mask(dir / "upper.mask", RegionMask{"upper", {4, 5}});
}

}  // namespace w2s
