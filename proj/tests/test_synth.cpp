#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "orpheus/synth.hpp"

using namespace orpheus;
using namespace orpheus::synth;

namespace {

Score simple_score(int measures, int pitch = 69) {
    Score s;
    s.key = KeySignature{0, Mode::Major};
    for (int i = 0; i < measures; ++i) {
        Measure m;
        m.events = {NoteEvent::note(pitch, 192)};
        s.measures.push_back(m);
    }
    return s;
}

}  // namespace

TEST_CASE("chord_to_pitches voices in octave 3") {
    CHECK(chord_to_pitches({0, ChordQuality::Maj, 0}) == std::vector<int>{48, 52, 55});
    CHECK(chord_to_pitches({9, ChordQuality::Min, 0}) == std::vector<int>{57, 60, 64});
    CHECK(chord_to_pitches({0, ChordQuality::Dom7, 0}) == std::vector<int>{48, 52, 55, 58});
    CHECK(chord_to_pitches({0, ChordQuality::Min7, 0}) == std::vector<int>{48, 51, 55, 58});
    CHECK(chord_to_pitches({0, ChordQuality::Maj7, 0}) == std::vector<int>{48, 52, 55, 59});
    CHECK(chord_to_pitches({0, ChordQuality::Dim, 0}) == std::vector<int>{48, 51, 54});
    CHECK(chord_to_pitches({0, ChordQuality::Aug, 0}) == std::vector<int>{48, 52, 56});
    CHECK(chord_to_pitches({0, ChordQuality::Sus4, 0}) == std::vector<int>{48, 53, 55});
}

TEST_CASE("score_to_midi timing and tempo") {
    Score s;
    s.key = KeySignature{0, Mode::Major};
    Measure m;
    m.events = {NoteEvent::note(60, 48), NoteEvent::rest(144)};
    s.measures.push_back(m);

    const MidiSequence seq = score_to_midi(s, 120.0);
    CHECK(seq.ticks_per_quarter == 48);
    CHECK(seq.tempo_us_per_quarter == 500000);
    CHECK(seq.length_ticks == 192);
    REQUIRE(seq.events.size() == 2);
    CHECK(seq.events[0] == MidiEvent{0, 0, true, 60, 90});
    CHECK(seq.events[1] == MidiEvent{48, 0, false, 60, 0});
    // 48 ticks at 120 BPM is one quarter = 0.5 s.
    const double sec = 48 * (500000.0 / 1e6 / 48);
    CHECK(sec == doctest::Approx(0.5));

    CHECK(score_to_midi(s, 213.0).tempo_us_per_quarter == 281690);
    CHECK_THROWS_AS(score_to_midi(s, 0.0), std::invalid_argument);
}

TEST_CASE("score_to_midi realizes chords on channel 1 and merges ties") {
    Score s;
    s.key = KeySignature{0, Mode::Major};
    Measure m1;
    m1.chords = {ChordSymbol{9, ChordQuality::Min, 0}};
    m1.events = {NoteEvent::note(72, 96, true), NoteEvent::note(72, 96, true)};
    Measure m2;
    m2.events = {NoteEvent::note(72, 192)};
    s.measures = {m1, m2};

    const MidiSequence seq = score_to_midi(s, 120.0);
    // Tied chain 96 + 96 + 192 merges into one melody span.
    int melody_ons = 0, melody_offs = 0, chord_ons = 0;
    int melody_off_tick = -1;
    for (const auto& ev : seq.events) {
        if (ev.channel == kMelodyChannel && ev.note_on) ++melody_ons;
        if (ev.channel == kMelodyChannel && !ev.note_on) {
            ++melody_offs;
            melody_off_tick = ev.tick;
        }
        if (ev.channel == kChordChannel && ev.note_on) {
            ++chord_ons;
            CHECK(ev.velocity == kChordVelocity);
        }
    }
    CHECK(melody_ons == 1);
    CHECK(melody_offs == 1);
    CHECK(melody_off_tick == 384);
    CHECK(chord_ons == 3);  // Am triad {57, 60, 64}
}

TEST_CASE("render_wav duration tracks the score length") {
    SUBCASE("empty sequence renders zero samples") {
        MidiSequence empty;
        empty.length_ticks = 0;
        CHECK(render_wav(empty).samples.empty());
    }
    SUBCASE("one 4/4 measure at 120 BPM is 2.0 s plus a bounded tail") {
        const Score s = simple_score(1);
        const AudioBuffer a = render_wav(score_to_midi(s, 120.0));
        CHECK(a.sample_rate == 16000);
        CHECK(a.samples.size() >= 32000);
        CHECK(a.samples.size() <= 32000 + 4000);  // release tail <= 0.25 s
    }
    SUBCASE("8 measures at 213 BPM last about 9 seconds") {
        const Score s = simple_score(8);
        const AudioBuffer a = render_wav(score_to_midi(s, 213.0));
        const double expected = 32.0 * 60.0 / 213.0;  // 9.014 s
        CHECK(a.duration_s() >= expected - 0.001);
        CHECK(a.duration_s() <= expected + 0.26);
        CHECK(std::llround(expected * 16000) == 144225);
    }
}

TEST_CASE("render_wav peak is normalized to 0.9 and spectra sit on pitch") {
    const Score s = simple_score(2);  // A4 = 440 Hz
    const AudioBuffer a = render_wav(score_to_midi(s, 120.0));
    float peak = 0.0f;
    for (float v : a.samples) peak = std::max(peak, std::abs(v));
    CHECK(peak == doctest::Approx(0.9f).epsilon(1e-4));

    // Steady-state window well inside the first note.
    const double dominant = testutil::dominant_frequency(a.samples, 8000, 4096, 16000.0);
    CHECK(std::abs(dominant - 440.0) / 440.0 < 0.01);

    SUBCASE("byte-identical across renders") {
        const AudioBuffer b = render_wav(score_to_midi(s, 120.0));
        CHECK(write_wav(a) == write_wav(b));
    }
}

TEST_CASE("write_wav emits a valid RIFF PCM16 mono file") {
    AudioBuffer a;
    a.sample_rate = 16000;
    a.samples.assign(16000, 0.25f);
    const auto bytes = write_wav(a);
    CHECK(bytes.size() == 44 + 32000);

    const testutil::ParsedWav parsed = testutil::parse_wav_independent(bytes);
    CHECK(parsed.sample_rate == 16000);
    CHECK(parsed.channels == 1);
    CHECK(parsed.bits == 16);
    CHECK(parsed.samples.size() == 16000);
    CHECK(parsed.samples[0] == std::lround(0.25 * 32767));

    SUBCASE("empty buffer still writes a valid 44-byte header") {
        AudioBuffer empty;
        const auto hdr = write_wav(empty);
        CHECK(hdr.size() == 44);
        CHECK(testutil::parse_wav_independent(hdr).samples.empty());
    }
}

TEST_CASE("wav write/read round trip") {
    Rng rng(77);
    AudioBuffer a;
    a.sample_rate = 16000;
    for (int i = 0; i < 5000; ++i) {
        a.samples.push_back(static_cast<float>(rng.next_double() * 2.0 - 1.0));
    }
    const AudioBuffer back = read_wav(write_wav(a));
    CHECK(back.sample_rate == a.sample_rate);
    REQUIRE(back.samples.size() == a.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(std::abs(back.samples[i] - a.samples[i]) <= 1.0f / 32767.0f);
    }
    // Quantization is idempotent: a second trip is exact.
    CHECK(write_wav(back) == write_wav(read_wav(write_wav(back))));

    CHECK_THROWS_AS(read_wav({1, 2, 3}), std::runtime_error);
}

TEST_CASE("write_smf emits a parseable format-0 file") {
    const Score s = simple_score(1, 60);
    const MidiSequence seq = score_to_midi(s, 120.0);
    const auto bytes = write_smf(seq);

    REQUIRE(bytes.size() > 22);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "MThd");
    CHECK(bytes[9] == 0);   // format 0
    CHECK(bytes[11] == 1);  // one track
    CHECK((bytes[12] << 8 | bytes[13]) == 48);
    CHECK(std::string(bytes.begin() + 14, bytes.begin() + 18) == "MTrk");
    const size_t track_len = (static_cast<size_t>(bytes[18]) << 24) | (bytes[19] << 16) |
                             (bytes[20] << 8) | bytes[21];
    CHECK(22 + track_len == bytes.size());
    // Tempo meta encodes 500000 us per quarter.
    bool tempo_found = false;
    for (size_t i = 22; i + 5 < bytes.size(); ++i) {
        if (bytes[i] == 0xFF && bytes[i + 1] == 0x51 && bytes[i + 2] == 0x03) {
            const unsigned tempo = (bytes[i + 3] << 16) | (bytes[i + 4] << 8) | bytes[i + 5];
            CHECK(tempo == 500000);
            tempo_found = true;
        }
    }
    CHECK(tempo_found);
    // Last three bytes are end-of-track.
    CHECK(bytes[bytes.size() - 3] == 0xFF);
    CHECK(bytes[bytes.size() - 2] == 0x2F);
    CHECK(bytes[bytes.size() - 1] == 0x00);
}
