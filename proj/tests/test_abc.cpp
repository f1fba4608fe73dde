#include <doctest.h>

#include "helpers.hpp"
#include "orpheus/abc.hpp"
#include "orpheus/errors.hpp"

using namespace orpheus;
using abc::parse_abc;
using abc::strip_metadata;
using abc::write_abc;

TEST_CASE("strip_metadata removes metadata headers and decorations") {
    CHECK(strip_metadata("X:1\nT:Song\nK:C\nCDEF|") == "X:1\nK:C\nCDEF|\n");
    CHECK(strip_metadata("C:Composer\nK:G\n~G2 {A}B2|") == "K:G\nG2 B2|\n");
    CHECK(strip_metadata("K:C\n!trill!C2 D2|") == "K:C\nC2 D2|\n");
}

TEST_CASE("strip_metadata leaves clean input unchanged and is idempotent") {
    const std::string clean = "X:1\nM:4/4\nL:1/8\nK:C\nCDEF GABc|\n";
    CHECK(strip_metadata(clean) == clean);
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        std::string text;
        for (int j = 0; j < 6; ++j) {
            const char* pieces[] = {"T:title\n", "K:D\n",  "~A2 B2|\n", "{gA}c4|\n",
                                    "W:words\n", "X:42\n", "!fff!G2|\n"};
            text += pieces[rng.next_below(7)];
        }
        CHECK(strip_metadata(strip_metadata(text)) == strip_metadata(text));
    }
}

TEST_CASE("parse_abc resolves pitches and durations") {
    const Score s = parse_abc("X:1\nM:4/4\nL:1/4\nK:C\nCDEF|");
    REQUIRE(s.measures.size() == 1);
    REQUIRE(s.measures[0].events.size() == 4);
    const int expected[] = {60, 62, 64, 65};
    for (int i = 0; i < 4; ++i) {
        CHECK(s.measures[0].events[i].pitch.midi == expected[i]);
        CHECK(s.measures[0].events[i].duration.ticks == 48);
    }
    CHECK(s.key == KeySignature{0, Mode::Major});
}

TEST_CASE("parse_abc accidentals and default meter") {
    const Score s = parse_abc("L:1/8\nK:C\n^F G|");
    REQUIRE(s.measures.size() == 1);
    REQUIRE(s.measures[0].events.size() == 2);
    CHECK(s.measures[0].events[0].pitch.midi == 66);
    CHECK(s.measures[0].events[0].duration.ticks == 24);
    CHECK(s.measures[0].events[1].pitch.midi == 67);
    CHECK(measure_tick_sum(s.measures[0]) == 48);  // pre-repair
}

TEST_CASE("parse_abc accidental propagates to end of measure") {
    const Score s = parse_abc("L:1/8\nK:C\n^F F =F|F|");
    const auto& m = s.measures[0];
    CHECK(m.events[0].pitch.midi == 66);
    CHECK(m.events[1].pitch.midi == 66);  // carried
    CHECK(m.events[2].pitch.midi == 65);  // explicit natural
    CHECK(s.measures[1].events[0].pitch.midi == 65);  // reset at bar
}

TEST_CASE("parse_abc key signature applies to notes") {
    const Score s = parse_abc("L:1/8\nK:G\nF C|");
    CHECK(s.measures[0].events[0].pitch.midi == 66);  // F# from one-sharp signature
    CHECK(s.measures[0].events[1].pitch.midi == 60);
    CHECK(s.key == KeySignature{7, Mode::Major});

    const Score minor = parse_abc("L:1/8\nK:Em\nF|");
    CHECK(minor.measures[0].events[0].pitch.midi == 66);  // relative G major: one sharp
    CHECK(minor.key == KeySignature{4, Mode::Minor});
}

TEST_CASE("parse_abc duration multipliers and fractions") {
    const Score s = parse_abc("L:1/4\nK:C\nA/2 A3/2 A/ A// A3|");
    const auto& ev = s.measures[0].events;
    REQUIRE(ev.size() == 5);
    CHECK(ev[0].duration.ticks == 24);   // half of a 48-tick unit
    CHECK(ev[1].duration.ticks == 72);   // 3/2 units
    CHECK(ev[2].duration.ticks == 24);   // bare slash halves
    CHECK(ev[3].duration.ticks == 12);   // double slash quarters
    CHECK(ev[4].duration.ticks == 144);
}

TEST_CASE("parse_abc chords, triplets, rests") {
    const Score s = parse_abc("L:1/8\nK:C\n\"Am\" (3ABc z |");
    REQUIRE(s.measures.size() == 1);
    const auto& m = s.measures[0];
    REQUIRE(m.chords.size() == 1);
    CHECK(m.chords[0].root_pc == 9);
    CHECK(m.chords[0].quality == ChordQuality::Min);
    CHECK(m.chords[0].onset == 0);
    REQUIRE(m.events.size() == 4);
    CHECK(m.events[0].pitch.midi == 69);
    CHECK(m.events[1].pitch.midi == 71);
    CHECK(m.events[2].pitch.midi == 72);
    for (int i = 0; i < 3; ++i) CHECK(m.events[i].duration.ticks == 16);
    CHECK(m.events[3].is_rest());
    CHECK(m.events[3].duration.ticks == 24);
}

TEST_CASE("parse_abc octave marks and ties") {
    const Score s = parse_abc("L:1/8\nK:C\nC,2 c'2 B,,2 b2-|b2|");
    const auto& m = s.measures[0];
    CHECK(m.events[0].pitch.midi == 48);
    CHECK(m.events[1].pitch.midi == 84);
    CHECK(m.events[2].pitch.midi == 47);
    CHECK(m.events[3].pitch.midi == 83);
    CHECK(m.events[3].tied_to_next);
}

TEST_CASE("parse_abc errors carry position") {
    // unknown header
    CHECK_THROWS_AS(parse_abc("P:part\nK:C\nC|"), ParseError);
    // unresolvable note letter
    CHECK_THROWS_AS(parse_abc("K:C\nCDHq|"), ParseError);
    // malformed triplet
    CHECK_THROWS_AS(parse_abc("K:C\n(3AB|c|"), ParseError);
    CHECK_THROWS_AS(parse_abc("K:C\n(4ABcd|"), ParseError);
    // unknown chord quality
    CHECK_THROWS_AS(parse_abc("K:C\n\"Cmin13\"C4|"), ParseError);
    // missing key
    CHECK_THROWS_AS(parse_abc("L:1/8\nCDEF|"), ParseError);
    // non-4/4 meter is rejected
    CHECK_THROWS_AS(parse_abc("M:3/4\nK:C\nC2 D2 E2|"), ParseError);
    try {
        parse_abc("K:C\nC2 D2 $|");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.col() == 7);
    }
}

TEST_CASE("parse_abc never yields an empty measure from non-empty source") {
    const Score s = parse_abc("K:C\n|C4 D4|E4|");
    REQUIRE(s.measures.size() == 2);  // leading bar is decorative
    for (const auto& m : s.measures) CHECK(!m.events.empty());
}

TEST_CASE("write_abc emits the normalized header block") {
    Score s;
    s.key = KeySignature{0, Mode::Major};
    Measure m;
    m.events.push_back(NoteEvent::note(60, 192));
    s.measures.push_back(m);
    CHECK(write_abc(s) == "K:C\nM:4/4\nL:1/192\nC192|\n");

    const Score empty{KeySignature{0, Mode::Major}, {}, ""};
    CHECK(write_abc(empty) == "K:C\nM:4/4\nL:1/192\n");
}

TEST_CASE("write_abc rejects non-normalized scores") {
    Score s;
    s.key = KeySignature{7, Mode::Major};
    CHECK_THROWS_AS(write_abc(s), SerializeError);

    Score short_measure{KeySignature{0, Mode::Major}, {Measure{}}, ""};
    short_measure.measures[0].events.push_back(NoteEvent::note(60, 100));
    CHECK_THROWS_AS(write_abc(short_measure), SerializeError);

    Score off_grid{KeySignature{0, Mode::Major}, {Measure{}}, ""};
    off_grid.measures[0].events.push_back(NoteEvent::note(60, 190));
    off_grid.measures[0].events.push_back(NoteEvent::note(60, 2));
    CHECK_THROWS_AS(write_abc(off_grid), SerializeError);
}

TEST_CASE("split_document separates headers from music lines") {
    const auto doc = abc::split_document("X:1\nT:A Song\nM:4/4\nL:1/8\nK:C\nCDEF|\nGABc|\n");
    CHECK(doc.headers.at('X') == "1");
    CHECK(doc.headers.at('T') == "A Song");
    CHECK(doc.headers.at('M') == "4/4");
    CHECK(doc.headers.at('K') == "C");
    REQUIRE(doc.body_lines.size() == 2);
    CHECK(doc.body_lines[0] == "CDEF|");

    CHECK_THROWS_AS(abc::split_document("Y:strange\nK:C\nC|"), ParseError);
    CHECK_THROWS_AS(abc::split_document("K:C\nCDEF|\nT:late header\n"), ParseError);
}

TEST_CASE("parse_abc . write_abc round-trips 50 random normalized scores") {
    Rng rng(0xABC);
    for (int i = 0; i < 50; ++i) {
        const Score s = testutil::random_normalized_score(rng);
        const std::string text = write_abc(s);
        const Score back = parse_abc(text);
        CHECK(back == s);
    }
}
