#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "orpheus/augment.hpp"
#include "orpheus/normalize.hpp"

namespace orpheus {

inline constexpr std::uint64_t kDefaultSeed = 0x6F727068;  // arbitrary fixed default

struct PipelineConfig {
    std::string input_dir;
    std::string output_dir;
    long count = 1000;
    int sections_per_score = 8;
    aug::SampleStrategy strategy = aug::SampleStrategy::Gaussian;
    aug::GaussianParams gaussian{};
    std::uint64_t seed = kDefaultSeed;
    double tempo_bpm = 213.0;
    int sample_rate = 16000;
    int jobs = 1;
    bool apply_mutation = false;
    aug::MutationParams mutation{};
};

struct PipelineResult {
    int exit_code = 0;  // 0 ok, 1 fatal (thrown instead), 2 partial (inputs skipped)
    long inputs_parsed = 0;
    long inputs_skipped = 0;
    long records_written = 0;
    RepairReport repairs;
    std::string manifest_path;
};

// clean -> parse -> normalize -> (mutate) -> pool -> generate -> tokenize ->
// render -> manifest. Every record is reproducible from (config, seed, index)
// and verified (tokens decode cleanly and re-encode identically) before the
// manifest is written. Per-file parse failures are logged and skipped.
PipelineResult run_pipeline(const PipelineConfig& cfg, std::ostream& log);

}  // namespace orpheus
