#pragma once

#include <string>
#include <utility>
#include <vector>

#include "orpheus/abc.hpp"
#include "orpheus/score.hpp"

namespace orpheus {

struct RepairReport {
    long padded = 0;
    long discarded = 0;
    long untouched = 0;
    long snapped = 0;

    void merge(const RepairReport& other) {
        padded += other.padded;
        discarded += other.discarded;
        untouched += other.untouched;
        snapped += other.snapped;
    }
    std::string to_json() const;
};

// A pitch that had to be octave-folded back into 48..107 during transposition.
struct ClampEvent {
    int measure = 0;
    int event = 0;
    int old_midi = 0;
    int new_midi = 0;
};

// Shifts every pitch and chord root so the tonic lands on C (major) or A
// (relative minor), using the minimal-absolute-value semitone offset with
// downward tie-break. The result key is always C major. Pitches leaving
// 48..107 are folded by octaves and reported through `clamps`.
Score transpose_to_c(const Score& s, std::vector<ClampEvent>* clamps = nullptr);

// Semitone shift transpose_to_c will apply for a key (exposed for tests).
int transpose_shift(const KeySignature& key);

// Re-expresses durations given in `source_unit` note-length units on the
// 1/192 tick grid, snapping anything off the 4-tick sub-grid to the nearest
// multiple of 4 (minimum 4). Returns the score and the snap count.
std::pair<Score, long> regrid_durations(const Score& s, abc::Fraction source_unit);

// Pads short measures with a trailing rest, discards overfull ones.
std::pair<Score, RepairReport> repair_measures(const Score& s);

struct NormalizeResult {
    Score score;
    RepairReport report;
    std::vector<ClampEvent> clamps;
};

// regrid -> transpose_to_c -> repair_measures. Output satisfies every
// normalized-score invariant and the composition is idempotent.
NormalizeResult normalize(const Score& s);

}  // namespace orpheus
