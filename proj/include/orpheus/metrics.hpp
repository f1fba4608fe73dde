#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace orpheus::metrics {

struct WerResult {
    double rate = 0.0;
    long substitutions = 0;
    long deletions = 0;
    long insertions = 0;
    long ref_len = 0;

    long distance() const { return substitutions + deletions + insertions; }
    std::string to_json() const;  // {"wer":..,"S":..,"D":..,"I":..,"N":..}
};

// Minimum-edit-distance WER with unit costs. Among minimal alignments the
// traceback prefers substitutions over insert+delete pairs. Throws
// std::invalid_argument on an empty reference (N = 0 leaves WER undefined).
WerResult wer(const std::vector<std::string>& reference,
              const std::vector<std::string>& hypothesis);

// Pooled corpus rate: sum(S+D+I) / sum(N) over all pairs.
WerResult wer_corpus(
    const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& pairs);

// Informational note when a corpus rate falls outside the 30-50% band that is
// typical for this task; nullopt inside the band.
std::optional<std::string> band_note(double rate);

std::vector<std::string> split_tokens(const std::string& text);

}  // namespace orpheus::metrics
