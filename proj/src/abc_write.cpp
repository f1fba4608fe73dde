#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "orpheus/abc.hpp"
#include "orpheus/errors.hpp"

namespace orpheus::abc {

namespace {

constexpr const char* kRootNames[12] = {"C",  "C#", "D",  "D#", "E",  "F",
                                        "F#", "G",  "G#", "A",  "A#", "B"};

const char* quality_suffix(ChordQuality q) {
    switch (q) {
        case ChordQuality::Maj: return "";
        case ChordQuality::Min: return "m";
        case ChordQuality::Dom7: return "7";
        case ChordQuality::Min7: return "m7";
        case ChordQuality::Maj7: return "maj7";
        case ChordQuality::Dim: return "dim";
        case ChordQuality::Aug: return "aug";
        case ChordQuality::Sus4: return "sus4";
    }
    return "";
}

// Sharp spelling of a pitch class: letter + whether it carries a sharp.
struct Spelling {
    char letter;
    int alteration;  // 0 or +1
};

Spelling spell(int pc) {
    static constexpr Spelling table[12] = {{'C', 0}, {'C', 1}, {'D', 0}, {'D', 1},
                                           {'E', 0}, {'F', 0}, {'F', 1}, {'G', 0},
                                           {'G', 1}, {'A', 0}, {'A', 1}, {'B', 0}};
    return table[((pc % 12) + 12) % 12];
}

void validate(const Score& s) {
    if (s.key != KeySignature{0, Mode::Major}) {
        throw SerializeError("write_abc requires a normalized (C major) score");
    }
    for (size_t mi = 0; mi < s.measures.size(); ++mi) {
        const Measure& m = s.measures[mi];
        if (measure_tick_sum(m) != kTicksPerMeasure) {
            throw SerializeError("measure " + std::to_string(mi) + " sums to " +
                                 std::to_string(measure_tick_sum(m)) + " ticks, expected 192");
        }
        for (const auto& ev : m.events) {
            if (ev.duration.ticks <= 0 || ev.duration.ticks % kTickGrid != 0) {
                throw SerializeError("measure " + std::to_string(mi) +
                                     ": duration off the 4-tick grid");
            }
            if (ev.is_note() && !in_pitch_range(ev.pitch.midi)) {
                throw SerializeError("measure " + std::to_string(mi) + ": pitch " +
                                     std::to_string(ev.pitch.midi) + " outside 48..107");
            }
            if (ev.is_rest() && ev.tied_to_next) {
                throw SerializeError("measure " + std::to_string(mi) + ": tied rest");
            }
        }
        // Chords must sit on event starts: that is where the text format can
        // place a quoted symbol, and it is what parse/decode produce.
        std::vector<int> starts;
        int tick = 0;
        for (const auto& ev : m.events) {
            starts.push_back(tick);
            tick += ev.duration.ticks;
        }
        int prev_onset = -1;
        for (const auto& c : m.chords) {
            if (c.onset <= prev_onset || c.onset >= kTicksPerMeasure) {
                throw SerializeError("measure " + std::to_string(mi) + ": bad chord onsets");
            }
            if (std::find(starts.begin(), starts.end(), c.onset) == starts.end()) {
                throw SerializeError("measure " + std::to_string(mi) + ": chord onset " +
                                     std::to_string(c.onset) + " is not an event start");
            }
            prev_onset = c.onset;
        }
    }
}

}  // namespace

std::string write_abc(const Score& s) {
    validate(s);
    std::string out = "K:C\nM:4/4\nL:1/192\n";

    std::string line;
    int measures_on_line = 0;
    for (const Measure& m : s.measures) {
        // Measure-scoped accidental state, mirroring the parser's rules.
        std::map<int, int> accidentals;
        size_t ci = 0;
        int tick = 0;
        for (const auto& ev : m.events) {
            while (ci < m.chords.size() && m.chords[ci].onset <= tick) {
                line += '"';
                line += kRootNames[m.chords[ci].root_pc];
                line += quality_suffix(m.chords[ci].quality);
                line += '"';
                ++ci;
            }
            if (ev.is_rest()) {
                line += 'z';
                line += std::to_string(ev.duration.ticks);
            } else {
                const int midi = ev.pitch.midi;
                const Spelling sp = spell(midi % 12);
                const int octave = midi / 12 - 1;  // MIDI 60 -> octave 4
                const int state_key = (sp.letter - 'A') * 16 + midi / 12;

                int current = 0;
                if (auto it = accidentals.find(state_key); it != accidentals.end()) {
                    current = it->second;
                }
                if (sp.alteration != current) {
                    line += sp.alteration == 1 ? '^' : '=';
                    accidentals[state_key] = sp.alteration;
                }
                const char letter = octave >= 5
                                        ? static_cast<char>(sp.letter - 'A' + 'a')
                                        : sp.letter;
                line += letter;
                for (int o = octave; o > 5; --o) line += '\'';
                for (int o = octave; o < 4; ++o) line += ',';
                line += std::to_string(ev.duration.ticks);
                if (ev.tied_to_next) line += '-';
            }
            tick += ev.duration.ticks;
            line += ' ';
        }
        if (!line.empty() && line.back() == ' ') line.pop_back();
        line += '|';
        if (++measures_on_line == 4) {
            out += line;
            out += '\n';
            line.clear();
            measures_on_line = 0;
        }
    }
    if (!line.empty()) {
        out += line;
        out += '\n';
    }
    return out;
}

}  // namespace orpheus::abc
