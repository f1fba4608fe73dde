#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace orpheus {

// One tick is 1/192 of a whole note; a 4/4 measure is exactly kTicksPerMeasure
// ticks after normalization. The 1/192 grid admits triplets down to triplet
// thirty-seconds (4 ticks).
inline constexpr int kTicksPerMeasure = 192;
inline constexpr int kTickGrid = 4;

// Melody range representable by the token vocabulary.
inline constexpr int kMinPitch = 48;
inline constexpr int kMaxPitch = 107;

struct Pitch {
    int midi = 60;  // MIDI convention, 60 = middle C = ABC "C"

    bool operator==(const Pitch&) const = default;
};

struct Duration {
    int ticks = 0;  // > 0; multiple of kTickGrid after normalization

    bool operator==(const Duration&) const = default;
};

enum class EventKind { Note, Rest };

struct NoteEvent {
    EventKind kind = EventKind::Note;
    Pitch pitch{};  // meaningful only for Note
    Duration duration{};
    bool tied_to_next = false;  // always false for rests

    static NoteEvent note(int midi, int ticks, bool tied = false) {
        return NoteEvent{EventKind::Note, Pitch{midi}, Duration{ticks}, tied};
    }
    static NoteEvent rest(int ticks) {
        return NoteEvent{EventKind::Rest, Pitch{0}, Duration{ticks}, false};
    }
    bool is_note() const { return kind == EventKind::Note; }
    bool is_rest() const { return kind == EventKind::Rest; }

    bool operator==(const NoteEvent&) const = default;
};

enum class ChordQuality { Maj, Min, Dom7, Min7, Maj7, Dim, Aug, Sus4 };
inline constexpr int kNumChordQualities = 8;

struct ChordSymbol {
    int root_pc = 0;  // pitch class 0..11, 0 = C
    ChordQuality quality = ChordQuality::Maj;
    int onset = 0;  // tick offset within the measure, 0 <= onset < 192

    bool operator==(const ChordSymbol&) const = default;
};

struct Measure {
    std::vector<NoteEvent> events;  // ordered; durations sum to 192 when normalized
    std::vector<ChordSymbol> chords;  // onsets strictly increasing

    bool operator==(const Measure&) const = default;
};

enum class Mode { Major, Minor };

struct KeySignature {
    int tonic_pc = 0;  // 0 = C
    Mode mode = Mode::Major;

    bool operator==(const KeySignature&) const = default;
};

struct Score {
    KeySignature key{};
    std::vector<Measure> measures;
    std::string source_id;

    bool operator==(const Score&) const = default;
};

// Shifts a pitch by a signed number of semitones. Throws std::range_error if
// the result leaves MIDI 0..127; callers that need clamping do it themselves.
inline Pitch transpose_pitch(Pitch p, int shift) {
    const int midi = p.midi + shift;
    if (midi < 0 || midi > 127) {
        throw std::range_error("transpose_pitch: result " + std::to_string(midi) +
                               " outside MIDI 0..127");
    }
    return Pitch{midi};
}

inline int measure_tick_sum(const Measure& m) {
    int sum = 0;
    for (const auto& ev : m.events) sum += ev.duration.ticks;
    return sum;
}

inline int total_ticks(const Score& s) {
    int sum = 0;
    for (const auto& m : s.measures) sum += measure_tick_sum(m);
    return sum;
}

inline bool in_pitch_range(int midi) { return midi >= kMinPitch && midi <= kMaxPitch; }

}  // namespace orpheus
