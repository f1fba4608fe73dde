#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "orpheus/abc.hpp"
#include "orpheus/errors.hpp"
#include "orpheus/manifest.hpp"
#include "orpheus/pipeline.hpp"
#include "orpheus/rng.hpp"
#include "orpheus/synth.hpp"
#include "orpheus/tokenize.hpp"

namespace fs = std::filesystem;

namespace orpheus {

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::vector<fs::path> list_abc_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("input directory does not exist: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".abc") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());  // directory order is not deterministic
    return files;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, std::ostream& log) {
    PipelineResult result;
    if (cfg.count < 0) throw std::invalid_argument("pipeline: count must be >= 0");
    if (cfg.sections_per_score < 1) {
        throw std::invalid_argument("pipeline: sections-per-score must be >= 1");
    }

    const std::vector<fs::path> files = list_abc_files(cfg.input_dir);
    if (files.empty()) {
        throw std::runtime_error("no .abc files in " + cfg.input_dir);
    }

    // Ingest: clean, parse, normalize. Failures skip the file.
    std::vector<Score> normalized;
    long input_index = 0;
    for (const fs::path& file : files) {
        const long idx = input_index++;
        try {
            const std::string cleaned = abc::strip_metadata(read_text(file));
            Score parsed = abc::parse_abc(cleaned);
            parsed.source_id = file.filename().string();
            NormalizeResult norm = normalize(parsed);
            result.repairs.merge(norm.report);
            for (const ClampEvent& c : norm.clamps) {
                log << "note: " << file.filename().string() << " measure " << c.measure
                    << ": pitch " << c.old_midi << " folded to " << c.new_midi << "\n";
            }
            if (norm.score.measures.empty()) {
                log << "skip: " << file.string() << ": no usable measures\n";
                ++result.inputs_skipped;
                continue;
            }
            if (cfg.apply_mutation) {
                aug::MutationParams mp = cfg.mutation;
                mp.seed = Rng::derive_seed(cfg.seed, 0x100000 + static_cast<std::uint64_t>(idx));
                auto [pitched, pitch_log] = aug::mutate_pitches(norm.score, mp);
                auto [extended, extend_log] = aug::extend_durations(pitched, mp);
                log << "mutate: " << file.filename().string() << ": "
                    << pitch_log.entries.size() << " pitch shifts, " << extend_log.entries.size()
                    << " extensions\n";
                norm.score = std::move(extended);
            }
            normalized.push_back(std::move(norm.score));
            ++result.inputs_parsed;
        } catch (const std::exception& e) {
            log << "skip: " << file.string() << ": " << e.what() << "\n";
            ++result.inputs_skipped;
        }
    }
    if (normalized.empty()) {
        throw std::runtime_error("no usable scores after cleaning and normalization");
    }

    const aug::SectionPool pool = aug::build_section_pool(normalized);
    log << "pool: " << pool.sections.size() << " distinct sections from " << result.inputs_parsed
        << " scores\n";

    const fs::path out_dir(cfg.output_dir);
    fs::create_directories(out_dir / "abc");
    fs::create_directories(out_dir / "wav");
    write_text(out_dir / "vocab.json", tok::Vocabulary::instance().to_json());
    write_text(out_dir / "normalize_report.json", result.repairs.to_json() + "\n");

    // Fan out per score index; manifest assembled in index order.
    std::vector<ManifestRecord> records(static_cast<size_t>(cfg.count));
    std::atomic<long> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (;;) {
            const long k = next.fetch_add(1);
            if (k >= cfg.count) return;
            try {
                Score score = aug::generate_score(pool, cfg.seed, k, cfg.sections_per_score,
                                                  cfg.strategy, cfg.gaussian);
                const std::vector<tok::TokenId> tokens = tok::encode(score);

                // Verify the manifest invariant before writing anything.
                auto [decoded, recovery] = tok::decode(tokens);
                if (!recovery.clean() || tok::encode(decoded) != tokens) {
                    throw std::logic_error("token round-trip failed for " + score.source_id);
                }

                const synth::MidiSequence midi = synth::score_to_midi(score, cfg.tempo_bpm);
                const synth::AudioBuffer audio = synth::render_wav(midi, cfg.sample_rate);

                const std::string abc_rel = "abc/" + score.source_id + ".abc";
                const std::string wav_rel = "wav/" + score.source_id + ".wav";
                write_text(out_dir / abc_rel, abc::write_abc(score));
                synth::save_bytes((out_dir / wav_rel).string(), synth::write_wav(audio));

                ManifestRecord rec;
                rec.id = score.source_id;
                rec.wav_path = wav_rel;
                rec.abc_path = abc_rel;
                rec.token_text = tok::render_token_text(tokens);
                rec.duration_s = audio.duration_s();
                rec.seed = Rng::derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
                records[static_cast<size_t>(k)] = std::move(rec);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(cfg.count);  // stop other workers
                return;
            }
        }
    };

    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1 || cfg.count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<size_t>(jobs));
        for (int i = 0; i < jobs; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    const fs::path manifest_path = out_dir / "manifest.jsonl";
    write_manifest(manifest_path.string(), records);
    result.records_written = cfg.count;
    result.manifest_path = manifest_path.string();
    result.exit_code = result.inputs_skipped > 0 ? 2 : 0;
    log << "wrote " << cfg.count << " records to " << manifest_path.string() << "\n";
    return result;
}

}  // namespace orpheus
