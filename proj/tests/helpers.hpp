#pragma once

// Test-only helpers: a random normalized-score generator and independent
// oracles (memoized-recursion Levenshtein, a minimal WAV parser, a naive DFT
// probe). The oracles deliberately share no code with the library paths they
// check.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "orpheus/rng.hpp"
#include "orpheus/score.hpp"

namespace testutil {

inline orpheus::Measure random_measure(orpheus::Rng& rng, bool with_chords = true) {
    using namespace orpheus;
    Measure m;
    int remaining = kTicksPerMeasure;
    while (remaining > 0) {
        const int max_units = remaining / kTickGrid;
        int units = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(max_units)));
        // Bias toward shorter values so measures carry a few events.
        if (units > 12 && rng.next_double() < 0.7) units = 1 + static_cast<int>(rng.next_below(12));
        const int ticks = units * kTickGrid;
        if (rng.next_double() < 0.8) {
            const int midi = kMinPitch + static_cast<int>(rng.next_below(60));
            const bool tied = rng.next_double() < 0.15;
            m.events.push_back(NoteEvent::note(midi, ticks, tied));
        } else {
            m.events.push_back(NoteEvent::rest(ticks));
        }
        remaining -= ticks;
    }
    if (with_chords && rng.next_double() < 0.6) {
        std::vector<int> starts;
        int tick = 0;
        for (const auto& ev : m.events) {
            starts.push_back(tick);
            tick += ev.duration.ticks;
        }
        const int n_chords = 1 + static_cast<int>(rng.next_below(2));
        int prev = -1;
        for (int c = 0; c < n_chords && c < static_cast<int>(starts.size()); ++c) {
            // Walk forward through starts so onsets stay strictly increasing.
            const int lo = prev + 1;
            if (lo >= static_cast<int>(starts.size())) break;
            const int pick =
                lo + static_cast<int>(rng.next_below(static_cast<uint64_t>(starts.size() - lo)));
            m.chords.push_back(orpheus::ChordSymbol{
                static_cast<int>(rng.next_below(12)),
                static_cast<orpheus::ChordQuality>(rng.next_below(8)), starts[pick]});
            prev = pick;
        }
    }
    return m;
}

inline orpheus::Score random_normalized_score(orpheus::Rng& rng, int max_measures = 8,
                                              bool with_chords = true) {
    orpheus::Score s;
    s.key = orpheus::KeySignature{0, orpheus::Mode::Major};
    const int n = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(max_measures)));
    for (int i = 0; i < n; ++i) s.measures.push_back(random_measure(rng, with_chords));
    return s;
}

// Independent Levenshtein oracle: top-down memoized recursion.
class LevenshteinOracle {
  public:
    int distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
        memo_.clear();
        a_ = &a;
        b_ = &b;
        return go(a.size(), b.size());
    }

  private:
    int go(size_t i, size_t j) {
        if (i == 0) return static_cast<int>(j);
        if (j == 0) return static_cast<int>(i);
        const auto key = std::make_pair(i, j);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        int best = go(i - 1, j - 1) + ((*a_)[i - 1] == (*b_)[j - 1] ? 0 : 1);
        const int del = go(i - 1, j) + 1;
        const int ins = go(i, j - 1) + 1;
        if (del < best) best = del;
        if (ins < best) best = ins;
        memo_[key] = best;
        return best;
    }

    std::map<std::pair<size_t, size_t>, int> memo_;
    const std::vector<std::string>* a_ = nullptr;
    const std::vector<std::string>* b_ = nullptr;
};

// Minimal WAV header/sample parser, independent of synth::read_wav.
struct ParsedWav {
    unsigned sample_rate = 0;
    unsigned channels = 0;
    unsigned bits = 0;
    std::vector<std::int16_t> samples;
};

inline ParsedWav parse_wav_independent(const std::vector<std::uint8_t>& b) {
    auto u16 = [&](size_t at) { return static_cast<unsigned>(b[at] | (b[at + 1] << 8)); };
    auto u32 = [&](size_t at) {
        return static_cast<unsigned long>(b[at]) | (static_cast<unsigned long>(b[at + 1]) << 8) |
               (static_cast<unsigned long>(b[at + 2]) << 16) |
               (static_cast<unsigned long>(b[at + 3]) << 24);
    };
    ParsedWav out;
    if (b.size() < 44) return out;
    if (std::string(b.begin(), b.begin() + 4) != "RIFF") return out;
    size_t pos = 12;
    while (pos + 8 <= b.size()) {
        const std::string id(b.begin() + pos, b.begin() + pos + 4);
        const size_t size = u32(pos + 4);
        if (id == "fmt ") {
            out.channels = u16(pos + 8 + 2);
            out.sample_rate = static_cast<unsigned>(u32(pos + 8 + 4));
            out.bits = u16(pos + 8 + 14);
        } else if (id == "data") {
            for (size_t i = 0; i + 1 < size; i += 2) {
                out.samples.push_back(static_cast<std::int16_t>(u16(pos + 8 + i)));
            }
            return out;
        }
        pos += 8 + size + (size & 1);
    }
    return out;
}

// Naive DFT magnitude probe at bin resolution sample_rate / n.
inline double dominant_frequency(const std::vector<float>& samples, size_t start, size_t n,
                                 double sample_rate) {
    double best_mag = -1.0;
    size_t best_k = 0;
    for (size_t k = 1; k < n / 2; ++k) {
        double re = 0.0, im = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double phase = 2.0 * 3.14159265358979323846 * static_cast<double>(k * i) / n;
            re += samples[start + i] * std::cos(phase);
            im -= samples[start + i] * std::sin(phase);
        }
        const double mag = re * re + im * im;
        if (mag > best_mag) {
            best_mag = mag;
            best_k = k;
        }
    }
    return static_cast<double>(best_k) * sample_rate / static_cast<double>(n);
}

}  // namespace testutil
