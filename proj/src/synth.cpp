#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <stdexcept>

#include "orpheus/synth.hpp"

namespace orpheus::synth {

namespace {

constexpr double kAttackSeconds = 0.010;
constexpr double kDecayTau = 0.5;
constexpr double kReleaseTau = 0.04;
constexpr double kReleaseSeconds = 0.25;  // hard cap on the ringing tail
constexpr int kMaxHarmonics = 24;
constexpr double kTwoPi = 6.283185307179586476925287;

double midi_to_hz(int key) { return 440.0 * std::pow(2.0, (key - 69) / 12.0); }

struct NoteSpan {
    int on_tick = 0;
    int off_tick = 0;
    std::uint8_t channel = 0;
    std::uint8_t key = 60;
    std::uint8_t velocity = 0;
};

std::vector<NoteSpan> pair_spans(const MidiSequence& m) {
    std::vector<NoteSpan> spans;
    std::map<int, std::vector<size_t>> open;  // (channel<<8|key) -> span indices
    for (const MidiEvent& ev : m.events) {
        const int slot = (ev.channel << 8) | ev.key;
        if (ev.note_on) {
            open[slot].push_back(spans.size());
            spans.push_back(NoteSpan{ev.tick, -1, ev.channel, ev.key, ev.velocity});
        } else {
            auto it = open.find(slot);
            if (it == open.end() || it->second.empty()) {
                throw std::invalid_argument("render_wav: note-off without matching note-on");
            }
            spans[it->second.front()].off_tick = ev.tick;
            it->second.erase(it->second.begin());
        }
    }
    for (const NoteSpan& s : spans) {
        if (s.off_tick < 0) {
            throw std::invalid_argument("render_wav: note-on without matching note-off");
        }
    }
    return spans;
}

}  // namespace

std::vector<int> chord_to_pitches(const ChordSymbol& c) {
    static constexpr int kIntervals[kNumChordQualities][4] = {
        {0, 4, 7, -1},  // maj
        {0, 3, 7, -1},  // min
        {0, 4, 7, 10},  // dom7
        {0, 3, 7, 10},  // min7
        {0, 4, 7, 11},  // maj7
        {0, 3, 6, -1},  // dim
        {0, 4, 8, -1},  // aug
        {0, 5, 7, -1},  // sus4
    };
    const int root = 48 + ((c.root_pc % 12) + 12) % 12;
    std::vector<int> out;
    for (int iv : kIntervals[static_cast<int>(c.quality)]) {
        if (iv >= 0) out.push_back(root + iv);
    }
    return out;
}

MidiSequence score_to_midi(const Score& s, double tempo_bpm) {
    if (tempo_bpm <= 0.0) throw std::invalid_argument("score_to_midi: tempo must be positive");
    MidiSequence seq;
    seq.ticks_per_quarter = kTicksPerQuarter;
    seq.tempo_us_per_quarter = static_cast<int>(std::llround(60.0e6 / tempo_bpm));
    seq.length_ticks = static_cast<int>(s.measures.size()) * kTicksPerMeasure;

    // Flatten melody events with global start ticks for tie-chain merging.
    struct Flat {
        int start;
        const NoteEvent* ev;
    };
    std::vector<Flat> flat;
    int global = 0;
    for (const Measure& m : s.measures) {
        for (const NoteEvent& ev : m.events) {
            flat.push_back(Flat{global, &ev});
            global += ev.duration.ticks;
        }
    }

    auto push_note = [&seq](int on, int off, int channel, int key, int velocity) {
        seq.events.push_back(MidiEvent{on, static_cast<std::uint8_t>(channel), true,
                                       static_cast<std::uint8_t>(key),
                                       static_cast<std::uint8_t>(velocity)});
        seq.events.push_back(MidiEvent{off, static_cast<std::uint8_t>(channel), false,
                                       static_cast<std::uint8_t>(key), 0});
    };

    for (size_t i = 0; i < flat.size();) {
        const NoteEvent& ev = *flat[i].ev;
        if (ev.is_rest()) {
            ++i;
            continue;
        }
        size_t j = i;
        int end = flat[i].start + ev.duration.ticks;
        while (flat[j].ev->tied_to_next && j + 1 < flat.size() && flat[j + 1].ev->is_note() &&
               flat[j + 1].ev->pitch.midi == ev.pitch.midi) {
            ++j;
            end = flat[j].start + flat[j].ev->duration.ticks;
        }
        push_note(flat[i].start, end, kMelodyChannel, ev.pitch.midi, kMelodyVelocity);
        i = j + 1;
    }

    for (size_t mi = 0; mi < s.measures.size(); ++mi) {
        const Measure& m = s.measures[mi];
        const int base = static_cast<int>(mi) * kTicksPerMeasure;
        for (size_t ci = 0; ci < m.chords.size(); ++ci) {
            const int on = base + m.chords[ci].onset;
            const int off =
                base + (ci + 1 < m.chords.size() ? m.chords[ci + 1].onset : kTicksPerMeasure);
            for (int key : chord_to_pitches(m.chords[ci])) {
                push_note(on, off, kChordChannel, key, kChordVelocity);
            }
        }
    }

    std::stable_sort(seq.events.begin(), seq.events.end(),
                     [](const MidiEvent& a, const MidiEvent& b) {
                         if (a.tick != b.tick) return a.tick < b.tick;
                         if (a.note_on != b.note_on) return !a.note_on;  // offs first
                         if (a.channel != b.channel) return a.channel < b.channel;
                         return a.key < b.key;
                     });
    return seq;
}

AudioBuffer render_wav(const MidiSequence& m, int sample_rate) {
    if (sample_rate <= 0) throw std::invalid_argument("render_wav: bad sample rate");
    AudioBuffer out;
    out.sample_rate = sample_rate;

    const double sec_per_tick =
        static_cast<double>(m.tempo_us_per_quarter) / 1.0e6 / m.ticks_per_quarter;
    const std::vector<NoteSpan> spans = pair_spans(m);

    double end_s = m.length_ticks * sec_per_tick;
    for (const NoteSpan& s : spans) {
        end_s = std::max(end_s, s.off_tick * sec_per_tick + kReleaseSeconds);
    }
    const auto n = static_cast<size_t>(std::ceil(end_s * sample_rate));
    if (n == 0) return out;

    std::vector<double> mix(n, 0.0);
    const double decay_step = std::exp(-1.0 / (kDecayTau * sample_rate));
    const double release_step = std::exp(-1.0 / (kReleaseTau * sample_rate));

    for (const NoteSpan& span : spans) {
        const double on_s = span.on_tick * sec_per_tick;
        const double dur_s = (span.off_tick - span.on_tick) * sec_per_tick;
        if (dur_s <= 0.0) continue;
        const auto i0 = static_cast<size_t>(std::ceil(on_s * sample_rate));
        const auto i_end =
            std::min(n, static_cast<size_t>(std::ceil((on_s + dur_s + kReleaseSeconds) *
                                                      sample_rate)));
        if (i0 >= i_end) continue;
        const size_t len = i_end - i0;

        // Envelope: linear attack into multiplicative exponential decay, then
        // a faster release after note-off.
        std::vector<double> env(len);
        {
            double decay = 1.0;
            for (size_t j = 0; j < len; ++j) {
                const double t = (static_cast<double>(i0 + j) / sample_rate) - on_s;
                const double attack = t < kAttackSeconds ? t / kAttackSeconds : 1.0;
                env[j] = attack * decay;
                decay *= t < dur_s ? decay_step : release_step;
            }
        }

        const double f = midi_to_hz(span.key);
        const double gain = static_cast<double>(span.velocity) / 127.0;
        const int harmonics =
            span.channel == kChordChannel
                ? 1
                : std::max(1, std::min(kMaxHarmonics,
                                       static_cast<int>(0.45 * sample_rate / f)));
        // Sawtooth partial weights 2/(pi*k); plain sine for chords.
        for (int k = 1; k <= harmonics; ++k) {
            const double omega = kTwoPi * f * k / sample_rate;
            const double amp = span.channel == kChordChannel
                                   ? 0.8 * gain
                                   : gain * (2.0 / (kTwoPi / 2.0)) / k;
            const double t0 = (static_cast<double>(i0) / sample_rate) - on_s;
            std::complex<double> z = std::polar(1.0, kTwoPi * f * k * t0);
            const std::complex<double> step = std::polar(1.0, omega);
            for (size_t j = 0; j < len; ++j) {
                mix[i0 + j] += amp * env[j] * z.imag();
                z *= step;
            }
        }
    }

    double peak = 0.0;
    for (double v : mix) peak = std::max(peak, std::abs(v));
    const double scale = peak > 0.0 ? 0.9 / peak : 1.0;
    out.samples.resize(n);
    for (size_t i = 0; i < n; ++i) out.samples[i] = static_cast<float>(mix[i] * scale);
    return out;
}

void save_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<std::uint8_t> load_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    if (!f) throw std::runtime_error("cannot open: " + path);
    const std::streamsize size = f.tellg();
    f.seekg(0);
    std::vector<std::uint8_t> bytes(static_cast<size_t>(size));
    f.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!f) throw std::runtime_error("read failed: " + path);
    return bytes;
}

}  // namespace orpheus::synth
