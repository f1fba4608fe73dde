#pragma once

#include <map>
#include <string>
#include <vector>

#include "orpheus/score.hpp"

namespace orpheus::abc {

// Exact unit-note-length fraction from an L: header (e.g. 1/8).
struct Fraction {
    long num = 1;
    long den = 8;

    bool operator==(const Fraction&) const = default;
};

struct AbcDocument {
    std::map<char, std::string> headers;  // X, T, C, M, L, K, Q
    std::vector<std::string> body_lines;
};

// Splits ABC text into understood headers and music lines. Header letters
// outside X/T/C/M/L/K/Q raise ParseError; K must be present.
AbcDocument split_document(const std::string& text);

// Text-level cleaning pass: drops metadata header lines (T, C, Z, N, O, R, S,
// W, w) and deletes inline decoration (~, !...!, {...} grace groups).
// Idempotent; music content is otherwise untouched.
std::string strip_metadata(const std::string& text);

// Parses the supported ABC subset into a Score. Durations come out in 1/192
// ticks resolved against the L: header; pitches are resolved against the key
// signature with measure-scoped accidental overrides. Throws ParseError with
// line/column on anything outside the subset, and rejects meters other than
// 4/4 (the normalized grid has nowhere to record a different meter).
Score parse_abc(const std::string& text);

// Serializes a normalized score (C major, 192-tick measures, grid durations)
// back to ABC with K:C / M:4/4 / L:1/192 headers. parse_abc inverts it
// exactly. Throws SerializeError on non-normalized input.
std::string write_abc(const Score& s);

}  // namespace orpheus::abc
