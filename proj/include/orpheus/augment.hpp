#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "orpheus/score.hpp"

namespace orpheus::aug {

struct MutationParams {
    double pitch_prob = 0.1;    // per-note selection probability
    double pitch_sigma = 2.0;   // semitone std-dev of the Gaussian shift
    double extend_prob = 0.05;  // per-note rest-absorption probability
    bool snap_to_scale = true;  // move shifted pitches onto the C-major scale
    std::uint64_t seed = 0;
};

struct MutationEntry {
    int measure = 0;
    int event = 0;
    int old_pitch = 0;
    int new_pitch = 0;
    int old_ticks = 0;
    int new_ticks = 0;
};

struct MutationLog {
    std::vector<MutationEntry> entries;  // only actually-changed events
    std::string to_jsonl() const;
};

// Gaussian pitch mutation: each note is selected with pitch_prob; selected
// notes shift by round(N(0, pitch_sigma)) semitones, optionally snapped to
// the nearest C-major scale member (ties resolve downward), then clamped to
// 48..107. Rests and chords are untouched. Deterministic given params.seed.
std::pair<Score, MutationLog> mutate_pitches(const Score& s, const MutationParams& p);

// Duration extension: selected notes absorb an immediately following rest in
// the same measure (full rest duration; the rest is removed). Measure tick
// sums are conserved. A rest that carries a chord onset is never absorbed,
// so chord onsets stay on event starts.
std::pair<Score, MutationLog> extend_durations(const Score& s, const MutationParams& p);

// Nearest C-major scale member of a midi pitch, ties toward the lower pitch.
int snap_to_c_major(int midi);

struct SectionPool {
    std::vector<Measure> sections;       // deduplicated, first-occurrence order
    std::vector<double> weights;         // uniform, sums to 1
    std::vector<std::size_t> rank_order; // section indices sorted by mean pitch
};

// Pools every measure of the input scores, deduplicated by exact event and
// chord equality. Throws std::invalid_argument on empty or non-normalized
// input.
SectionPool build_section_pool(const std::vector<Score>& scores);

enum class SampleStrategy { Uniform, Gaussian };

SampleStrategy strategy_from_string(const std::string& name);  // "uniform" | "gaussian"

struct GaussianParams {
    // Index is drawn as round(N(mean_fraction*(P-1), P/sigma_divisor)),
    // clamped to [0, P-1], over sections ranked by mean pitch.
    double mean_fraction = 0.5;
    double sigma_divisor = 7.0;
};

// One synthetic score of n sections drawn with replacement.
Score sample_sections(const SectionPool& pool, int n, SampleStrategy strategy,
                      std::uint64_t seed, const GaussianParams& gp = {});

// Score k of a dataset; independently reproducible from (seed, k).
Score generate_score(const SectionPool& pool, std::uint64_t seed, long index,
                     int sections_per_score, SampleStrategy strategy,
                     const GaussianParams& gp = {});

// Streams `count` scores through the sink in index order.
void generate_dataset(const SectionPool& pool, long count, int sections_per_score,
                      SampleStrategy strategy, std::uint64_t seed,
                      const std::function<void(long, Score&&)>& sink,
                      const GaussianParams& gp = {});

}  // namespace orpheus::aug
