#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orpheus/score.hpp"

namespace orpheus::synth {

inline constexpr int kMelodyChannel = 0;
inline constexpr int kChordChannel = 1;
inline constexpr int kMelodyVelocity = 90;
inline constexpr int kChordVelocity = 60;
inline constexpr int kTicksPerQuarter = 48;  // score ticks map 1:1 to MIDI ticks
inline constexpr double kDefaultTempoBpm = 213.0;  // 8 measures ~ 9.0 s

struct MidiEvent {
    int tick = 0;
    std::uint8_t channel = 0;
    bool note_on = true;
    std::uint8_t key = 60;
    std::uint8_t velocity = 0;

    bool operator==(const MidiEvent&) const = default;
};

struct MidiSequence {
    int ticks_per_quarter = kTicksPerQuarter;
    int tempo_us_per_quarter = 500000;
    int length_ticks = 0;             // full score span, including trailing rests
    std::vector<MidiEvent> events;    // sorted by (tick, off-before-on, channel, key)
};

struct AudioBuffer {
    int sample_rate = 16000;
    std::vector<float> samples;  // mono, in [-1, 1]

    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

// Root-position voicing in octave 3 (root at MIDI 48 + pitch class).
std::vector<int> chord_to_pitches(const ChordSymbol& c);

// Melody on channel 0 (velocity 90), chords on channel 1 (velocity 60), held
// from onset to the next chord or bar end. Tied notes merge into one span.
MidiSequence score_to_midi(const Score& s, double tempo_bpm = kDefaultTempoBpm);

// Deterministic additive synth: band-limited sawtooth melody, sine chords,
// 10 ms linear attack, exponential decay, short release tail. The master gain
// normalizes the peak to 0.9.
AudioBuffer render_wav(const MidiSequence& m, int sample_rate = 16000);

// Standard MIDI File, format 0.
std::vector<std::uint8_t> write_smf(const MidiSequence& m);

// RIFF/WAVE, PCM 16-bit little-endian mono.
std::vector<std::uint8_t> write_wav(const AudioBuffer& a);
AudioBuffer read_wav(const std::vector<std::uint8_t>& bytes);

void save_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> load_bytes(const std::string& path);

}  // namespace orpheus::synth
