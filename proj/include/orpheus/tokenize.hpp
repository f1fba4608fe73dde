#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "orpheus/score.hpp"

namespace orpheus::tok {

using TokenId = std::uint16_t;

// Fixed 135-symbol vocabulary layout.
inline constexpr TokenId kPad = 0;
inline constexpr TokenId kBos = 1;
inline constexpr TokenId kEos = 2;
inline constexpr TokenId kUnk = 3;
inline constexpr TokenId kBar = 4;
inline constexpr TokenId kRestTok = 5;
inline constexpr TokenId kTie = 6;
inline constexpr TokenId kPitchBase = 7;   // PITCH_48 .. PITCH_107
inline constexpr TokenId kRootBase = 67;   // ROOT_C .. ROOT_B
inline constexpr TokenId kQualBase = 79;   // QUAL_MAJ .. QUAL_SUS4
inline constexpr TokenId kDurBase = 87;    // DUR_4 .. DUR_192 (step 4)
inline constexpr int kVocabSize = 135;

inline TokenId pitch_token(int midi) { return static_cast<TokenId>(kPitchBase + midi - kMinPitch); }
inline TokenId root_token(int pc) { return static_cast<TokenId>(kRootBase + pc); }
inline TokenId quality_token(ChordQuality q) {
    return static_cast<TokenId>(kQualBase + static_cast<int>(q));
}
inline TokenId duration_token(int ticks) {
    return static_cast<TokenId>(kDurBase + ticks / kTickGrid - 1);
}

// Bidirectional symbol-name <-> id table. Immutable singleton.
class Vocabulary {
  public:
    static const Vocabulary& instance();

    int size() const { return kVocabSize; }
    const std::string& symbol_of(TokenId id) const;  // throws std::out_of_range
    TokenId id_of(const std::string& symbol) const;  // throws std::out_of_range
    bool contains(const std::string& symbol) const;
    std::string to_json() const;  // [{"id":0,"symbol":"PAD"}, ...]

  private:
    Vocabulary();
    std::vector<std::string> symbols_;
};

// Serializes a normalized score: BOS, then per measure chords as ROOT QUAL in
// onset order interleaved before the events they precede, notes as PITCH DUR
// (TIE after tied notes), rests as REST DUR, BAR closing each measure, EOS.
// Throws EncodeError on non-normalized input.
std::vector<TokenId> encode(const Score& s);

struct RecoveryReport {
    long dropped = 0;
    long padded = 0;
    long truncated = 0;
    bool missing_bos = false;
    bool missing_eos = false;
    std::vector<std::string> notes;

    bool clean() const {
        return dropped == 0 && padded == 0 && truncated == 0 && !missing_bos && !missing_eos;
    }
};

// Inverse of encode on well-formed sequences. Malformed model output is
// repaired instead of rejected: dangling PITCH/REST without DUR and QUAL
// without ROOT are dropped, measures are closed at each BAR with rest-padding
// or truncation to exactly 192 ticks, and every action lands in the report.
std::pair<Score, RecoveryReport> decode(const std::vector<TokenId>& tokens);

// Space-separated symbol names, and its inverse. Out-of-range ids / unknown
// symbols throw std::out_of_range.
std::string render_token_text(const std::vector<TokenId>& tokens);
std::vector<TokenId> parse_token_text(const std::string& text);

// Little-endian 16-bit binary form used by the CLI's --binary flag.
std::vector<std::uint8_t> tokens_to_bytes(const std::vector<TokenId>& tokens);
std::vector<TokenId> tokens_from_bytes(const std::vector<std::uint8_t>& bytes);

}  // namespace orpheus::tok
