// Command-line front end for the audio-to-score data pipeline: cleaning and
// normalizing ABC corpora, augmenting them, tokenizing, rendering audio,
// extracting features, scoring hypotheses, and running the whole pipeline.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "orpheus/abc.hpp"
#include "orpheus/augment.hpp"
#include "orpheus/errors.hpp"
#include "orpheus/manifest.hpp"
#include "orpheus/metrics.hpp"
#include "orpheus/normalize.hpp"
#include "orpheus/pipeline.hpp"
#include "orpheus/rng.hpp"
#include "orpheus/signal.hpp"
#include "orpheus/synth.hpp"
#include "orpheus/tokenize.hpp"

namespace fs = std::filesystem;
using namespace orpheus;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitPartial = 2;

std::string read_text(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs,
                                    const std::string& extension) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::directory_iterator(p)) {
                if (entry.is_regular_file() && entry.path().extension() == extension) {
                    files.push_back(entry.path());
                }
            }
        } else {
            files.push_back(p);
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

// Applies `fn` to every input file; failures are reported and skipped.
template <typename Fn>
int for_each_input(const std::vector<std::string>& inputs, const std::string& ext, Fn&& fn) {
    const auto files = expand_inputs(inputs, ext);
    if (files.empty()) {
        std::cerr << "error: no " << ext << " inputs found\n";
        return kExitFatal;
    }
    long failures = 0;
    for (const auto& file : files) {
        try {
            fn(file);
        } catch (const std::exception& e) {
            std::cerr << "skip: " << file.string() << ": " << e.what() << "\n";
            ++failures;
        }
    }
    if (failures == static_cast<long>(files.size())) return kExitFatal;
    return failures > 0 ? kExitPartial : kExitOk;
}

Score load_normalized_score(const fs::path& file) {
    Score s = abc::parse_abc(abc::strip_metadata(read_text(file)));
    s.source_id = file.stem().string();
    NormalizeResult norm = normalize(s);
    norm.score.source_id = s.source_id;
    return std::move(norm.score);
}

struct MutateFlags {
    aug::MutationParams params;
    bool no_snap = false;
};

void add_mutation_options(CLI::App* cmd, MutateFlags& flags) {
    cmd->add_option("--pitch-prob", flags.params.pitch_prob,
                    "Per-note pitch mutation probability")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--pitch-sigma", flags.params.pitch_sigma,
                    "Std-dev of the Gaussian pitch shift in semitones")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--extend-prob", flags.params.extend_prob,
                    "Per-note duration extension probability")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_flag("--no-snap", flags.no_snap, "Do not snap mutated pitches to the C-major scale");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orpheus audio-to-score dataset toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "TOML config file with one section per subcommand, e.g. [pipeline]; "
                   "command-line flags win over file values");

    int exit_code = kExitOk;

    // ---- clean ----
    std::vector<std::string> clean_inputs;
    std::string clean_out;
    auto* clean = app.add_subcommand("clean", "Strip metadata and decorations from ABC files");
    clean->add_option("inputs", clean_inputs, "ABC files or directories")->required();
    clean->add_option("-o,--out-dir", clean_out, "Output directory (default: stdout)");
    clean->callback([&] {
        exit_code = for_each_input(clean_inputs, ".abc", [&](const fs::path& file) {
            const std::string cleaned = abc::strip_metadata(read_text(file));
            if (clean_out.empty()) {
                std::cout << cleaned;
            } else {
                write_text(fs::path(clean_out) / file.filename(), cleaned);
            }
        });
    });

    // ---- normalize ----
    std::vector<std::string> norm_inputs;
    std::string norm_out, norm_report;
    auto* norm_cmd = app.add_subcommand(
        "normalize", "Transpose to C major, re-grid to 1/192, repair 192-tick measures");
    norm_cmd->add_option("inputs", norm_inputs, "ABC files or directories")->required();
    norm_cmd->add_option("-o,--out-dir", norm_out, "Output directory")->required();
    norm_cmd->add_option("--report", norm_report, "Write the aggregate repair report JSON here");
    norm_cmd->callback([&] {
        RepairReport total;
        exit_code = for_each_input(norm_inputs, ".abc", [&](const fs::path& file) {
            Score s = abc::parse_abc(abc::strip_metadata(read_text(file)));
            NormalizeResult norm = normalize(s);
            total.merge(norm.report);
            for (const ClampEvent& c : norm.clamps) {
                std::cerr << "note: " << file.filename().string() << " measure " << c.measure
                          << ": pitch " << c.old_midi << " folded to " << c.new_midi << "\n";
            }
            write_text(fs::path(norm_out) / file.filename(), abc::write_abc(norm.score));
        });
        if (!norm_report.empty()) write_text(norm_report, total.to_json() + "\n");
        std::cerr << "repair report: " << total.to_json() << "\n";
    });

    // ---- mutate ----
    std::vector<std::string> mut_inputs;
    std::string mut_out, mut_log;
    MutateFlags mut_flags;
    std::uint64_t mut_seed = kDefaultSeed;
    auto* mutate = app.add_subcommand("mutate", "Gaussian pitch mutation and beat extension");
    mutate->add_option("inputs", mut_inputs, "Normalized ABC files or directories")->required();
    mutate->add_option("-o,--out-dir", mut_out, "Output directory")->required();
    mutate->add_option("--log", mut_log, "Append mutation entries as JSON lines here");
    mutate->add_option("--seed", mut_seed, "RNG seed")->envname("ORPHEUS_SEED");
    add_mutation_options(mutate, mut_flags);
    mutate->callback([&] {
        std::string log_lines;
        long file_index = 0;
        exit_code = for_each_input(mut_inputs, ".abc", [&](const fs::path& file) {
            Score s = load_normalized_score(file);
            aug::MutationParams mp = mut_flags.params;
            mp.snap_to_scale = !mut_flags.no_snap;
            mp.seed = Rng::derive_seed(mut_seed, static_cast<std::uint64_t>(file_index++));
            auto [pitched, pitch_log] = aug::mutate_pitches(s, mp);
            auto [extended, extend_log] = aug::extend_durations(pitched, mp);
            write_text(fs::path(mut_out) / file.filename(), abc::write_abc(extended));
            log_lines += pitch_log.to_jsonl();
            log_lines += extend_log.to_jsonl();
        });
        if (!mut_log.empty()) write_text(mut_log, log_lines);
    });

    // ---- gen-dataset ----
    std::string gen_in, gen_out, gen_strategy = "gaussian";
    long gen_count = 1000;
    int gen_sections = 8;
    std::uint64_t gen_seed = kDefaultSeed;
    double gen_sigma_div = 7.0;
    auto* gen = app.add_subcommand("gen-dataset",
                                   "Recombine pooled sections into synthetic scores");
    gen->add_option("-i,--input", gen_in, "Directory of ABC files to pool")->required();
    gen->add_option("-o,--out-dir", gen_out, "Output directory")->required();
    gen->add_option("-n,--count", gen_count, "Number of scores to generate")
        ->check(CLI::NonNegativeNumber);
    gen->add_option("--sections", gen_sections, "Sections per generated score")
        ->check(CLI::PositiveNumber);
    gen->add_option("--strategy", gen_strategy, "uniform | gaussian")
        ->check(CLI::IsMember({"uniform", "gaussian"}));
    gen->add_option("--sigma-divisor", gen_sigma_div, "Gaussian sigma = pool size / divisor")
        ->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "RNG seed")->envname("ORPHEUS_SEED");
    gen->callback([&] {
        std::vector<Score> scores;
        const int load_code = for_each_input({gen_in}, ".abc", [&](const fs::path& file) {
            scores.push_back(load_normalized_score(file));
        });
        if (load_code == kExitFatal || scores.empty()) {
            throw std::runtime_error("no usable input scores");
        }
        const aug::SectionPool pool = aug::build_section_pool(scores);
        std::cerr << "pool: " << pool.sections.size() << " distinct sections\n";
        const fs::path out_dir(gen_out);
        fs::create_directories(out_dir / "abc");
        std::string manifest;
        aug::generate_dataset(
            pool, gen_count, gen_sections, aug::strategy_from_string(gen_strategy), gen_seed,
            [&](long k, Score&& score) {
                const std::string rel = "abc/" + score.source_id + ".abc";
                write_text(out_dir / rel, abc::write_abc(score));
                manifest += "{\"id\":\"" + score.source_id + "\",\"abc_path\":\"" + rel +
                            "\",\"token_text\":\"" + tok::render_token_text(tok::encode(score)) +
                            "\",\"seed\":" +
                            std::to_string(Rng::derive_seed(gen_seed,
                                                            static_cast<std::uint64_t>(k))) +
                            "}\n";
            },
            aug::GaussianParams{0.5, gen_sigma_div});
        write_text(out_dir / "manifest.jsonl", manifest);
        exit_code = load_code;
    });

    // ---- tokenize ----
    std::vector<std::string> tokz_inputs;
    std::string tokz_out, tokz_vocab;
    bool tokz_binary = false;
    auto* tokz = app.add_subcommand("tokenize", "Encode normalized ABC into token sequences");
    tokz->add_option("inputs", tokz_inputs, "Normalized ABC files or directories")->required();
    tokz->add_option("-o,--out-dir", tokz_out, "Output directory")->required();
    tokz->add_flag("--binary", tokz_binary, "Write little-endian 16-bit ids (.bin) "
                                            "instead of symbol text (.tokens)");
    tokz->add_option("--vocab-out", tokz_vocab, "Also export the vocabulary JSON here");
    tokz->callback([&] {
        if (!tokz_vocab.empty()) {
            write_text(tokz_vocab, tok::Vocabulary::instance().to_json());
        }
        exit_code = for_each_input(tokz_inputs, ".abc", [&](const fs::path& file) {
            const Score s = load_normalized_score(file);
            const auto tokens = tok::encode(s);
            if (tokz_binary) {
                const auto bytes = tok::tokens_to_bytes(tokens);
                synth::save_bytes((fs::path(tokz_out) / file.stem()).string() + ".bin", bytes);
            } else {
                write_text((fs::path(tokz_out) / file.stem()).string() + ".tokens",
                           tok::render_token_text(tokens) + "\n");
            }
        });
    });

    // ---- detokenize ----
    std::vector<std::string> detok_inputs;
    std::string detok_out;
    bool detok_binary = false;
    auto* detok = app.add_subcommand("detokenize", "Decode token sequences back to ABC");
    detok->add_option("inputs", detok_inputs, "Token files (.tokens or .bin) or directories")
        ->required();
    detok->add_option("-o,--out-dir", detok_out, "Output directory")->required();
    detok->add_flag("--binary", detok_binary, "Inputs are little-endian 16-bit ids");
    detok->callback([&] {
        bool any_recovery = false;
        exit_code = for_each_input(
            detok_inputs, detok_binary ? ".bin" : ".tokens", [&](const fs::path& file) {
                const auto tokens =
                    detok_binary ? tok::tokens_from_bytes(synth::load_bytes(file.string()))
                                 : tok::parse_token_text(read_text(file));
                auto [score, recovery] = tok::decode(tokens);
                for (const auto& note : recovery.notes) {
                    std::cerr << file.filename().string() << ": " << note << "\n";
                }
                any_recovery |= !recovery.clean();
                write_text((fs::path(detok_out) / file.stem()).string() + ".abc",
                           abc::write_abc(score));
            });
        if (exit_code == kExitOk && any_recovery) exit_code = kExitPartial;
    });

    // ---- render ----
    std::vector<std::string> render_inputs;
    std::string render_out;
    double render_tempo = synth::kDefaultTempoBpm;
    int render_rate = 16000;
    bool render_midi = false;
    auto* render = app.add_subcommand("render", "Synthesize normalized ABC to WAV (and SMF)");
    render->add_option("inputs", render_inputs, "Normalized ABC files or directories")->required();
    render->add_option("-o,--out-dir", render_out, "Output directory")->required();
    render->add_option("--tempo", render_tempo, "Tempo in BPM")->check(CLI::PositiveNumber);
    render->add_option("--sample-rate", render_rate, "Output sample rate in Hz")
        ->check(CLI::PositiveNumber);
    render->add_flag("--midi", render_midi, "Also write a format-0 SMF next to each WAV");
    render->callback([&] {
        exit_code = for_each_input(render_inputs, ".abc", [&](const fs::path& file) {
            const Score s = load_normalized_score(file);
            const synth::MidiSequence midi = synth::score_to_midi(s, render_tempo);
            const synth::AudioBuffer audio = synth::render_wav(midi, render_rate);
            const fs::path base = fs::path(render_out) / file.stem();
            fs::create_directories(base.parent_path());
            synth::save_bytes(base.string() + ".wav", synth::write_wav(audio));
            if (render_midi) synth::save_bytes(base.string() + ".mid", synth::write_smf(midi));
        });
    });

    // ---- features ----
    std::vector<std::string> feat_inputs;
    std::string feat_out;
    signal::MelParams mel_params;
    auto* feat = app.add_subcommand("features", "Log-mel spectrograms from 16 kHz WAV files");
    feat->add_option("inputs", feat_inputs, "WAV files or directories")->required();
    feat->add_option("-o,--out-dir", feat_out, "Output directory")->required();
    feat->add_option("--n-fft", mel_params.n_fft)->check(CLI::PositiveNumber);
    feat->add_option("--hop", mel_params.hop)->check(CLI::PositiveNumber);
    feat->add_option("--n-mels", mel_params.n_mels)->check(CLI::PositiveNumber);
    feat->add_option("--fmin", mel_params.fmin)->check(CLI::NonNegativeNumber);
    feat->add_option("--fmax", mel_params.fmax)->check(CLI::PositiveNumber);
    feat->callback([&] {
        exit_code = for_each_input(feat_inputs, ".wav", [&](const fs::path& file) {
            const synth::AudioBuffer audio = synth::read_wav(synth::load_bytes(file.string()));
            const signal::MelMatrix mel = signal::log_mel_spectrogram(audio, mel_params);
            fs::create_directories(feat_out);
            signal::write_mel((fs::path(feat_out) / file.stem()).string() + ".mel", mel);
            std::cerr << file.filename().string() << ": " << mel.rows() << " mels x "
                      << mel.cols() << " frames\n";
        });
    });

    // ---- wer ----
    std::string wer_ref, wer_hyp, wer_manifest, wer_ref_field = "token_text",
                                                wer_hyp_field = "hyp_text";
    auto* wer_cmd = app.add_subcommand("wer", "Word error rate between token sequences");
    wer_cmd->add_option("reference", wer_ref, "Reference token-text file");
    wer_cmd->add_option("hypothesis", wer_hyp, "Hypothesis token-text file");
    wer_cmd->add_option("--manifest", wer_manifest,
                        "Score two JSONL manifest columns instead of files");
    wer_cmd->add_option("--ref-field", wer_ref_field, "Manifest column with references");
    wer_cmd->add_option("--hyp-field", wer_hyp_field, "Manifest column with hypotheses");
    wer_cmd->callback([&] {
        metrics::WerResult result;
        if (!wer_manifest.empty()) {
            std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> pairs;
            std::ifstream f(wer_manifest);
            if (!f) throw std::runtime_error("cannot open: " + wer_manifest);
            std::string line;
            while (std::getline(f, line)) {
                if (line.empty()) continue;
                const auto j = nlohmann::json::parse(line);
                pairs.emplace_back(
                    metrics::split_tokens(j.at(wer_ref_field).get<std::string>()),
                    metrics::split_tokens(j.at(wer_hyp_field).get<std::string>()));
            }
            result = metrics::wer_corpus(pairs);
        } else {
            if (wer_ref.empty() || wer_hyp.empty()) {
                throw std::runtime_error("wer needs REFERENCE and HYPOTHESIS files or --manifest");
            }
            result = metrics::wer(metrics::split_tokens(read_text(wer_ref)),
                                  metrics::split_tokens(read_text(wer_hyp)));
        }
        if (auto note = metrics::band_note(result.rate)) std::cerr << "note: " << *note << "\n";
        std::cout << result.to_json() << "\n";
    });

    // ---- pipeline ----
    PipelineConfig cfg;
    std::string pipe_strategy = "gaussian";
    MutateFlags pipe_mut;
    auto* pipe = app.add_subcommand("pipeline", "Full corpus -> training-manifest run");
    pipe->add_option("-i,--input", cfg.input_dir, "Directory of source ABC files")->required();
    pipe->add_option("-o,--out-dir", cfg.output_dir, "Output directory")->required();
    pipe->add_option("-n,--count", cfg.count, "Number of scores to generate")
        ->check(CLI::NonNegativeNumber);
    pipe->add_option("--sections", cfg.sections_per_score, "Sections per generated score")
        ->check(CLI::PositiveNumber);
    pipe->add_option("--strategy", pipe_strategy, "uniform | gaussian")
        ->check(CLI::IsMember({"uniform", "gaussian"}));
    pipe->add_option("--sigma-divisor", cfg.gaussian.sigma_divisor,
                     "Gaussian sigma = pool size / divisor")
        ->check(CLI::PositiveNumber);
    pipe->add_option("--seed", cfg.seed, "RNG seed")->envname("ORPHEUS_SEED");
    pipe->add_option("--tempo", cfg.tempo_bpm, "Render tempo in BPM")->check(CLI::PositiveNumber);
    pipe->add_option("--sample-rate", cfg.sample_rate, "Render sample rate in Hz")
        ->check(CLI::PositiveNumber);
    pipe->add_option("-j,--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
    pipe->add_flag("--mutate", cfg.apply_mutation, "Mutate normalized inputs before pooling");
    add_mutation_options(pipe, pipe_mut);
    pipe->callback([&] {
        cfg.strategy = aug::strategy_from_string(pipe_strategy);
        cfg.mutation = pipe_mut.params;
        cfg.mutation.snap_to_scale = !pipe_mut.no_snap;
        const PipelineResult result = run_pipeline(cfg, std::cerr);
        exit_code = result.exit_code;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFatal;
    }
    return exit_code;
}
