#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "orpheus/errors.hpp"
#include "orpheus/tokenize.hpp"

namespace orpheus::tok {

namespace {

constexpr const char* kRootNames[12] = {"C",  "CS", "D",  "DS", "E",  "F",
                                        "FS", "G",  "GS", "A",  "AS", "B"};
constexpr const char* kQualNames[8] = {"MAJ", "MIN", "DOM7", "MIN7", "MAJ7", "DIM", "AUG", "SUS4"};

const std::unordered_map<std::string, TokenId>& symbol_index() {
    static const auto* index = [] {
        auto* map = new std::unordered_map<std::string, TokenId>;
        const auto& v = Vocabulary::instance();
        for (int id = 0; id < kVocabSize; ++id) {
            (*map)[v.symbol_of(static_cast<TokenId>(id))] = static_cast<TokenId>(id);
        }
        return map;
    }();
    return *index;
}

}  // namespace

Vocabulary::Vocabulary() {
    symbols_ = {"PAD", "BOS", "EOS", "UNK", "BAR", "REST", "TIE"};
    for (int midi = kMinPitch; midi <= kMaxPitch; ++midi) {
        symbols_.push_back("PITCH_" + std::to_string(midi));
    }
    for (const char* r : kRootNames) symbols_.push_back(std::string("ROOT_") + r);
    for (const char* q : kQualNames) symbols_.push_back(std::string("QUAL_") + q);
    for (int ticks = kTickGrid; ticks <= kTicksPerMeasure; ticks += kTickGrid) {
        symbols_.push_back("DUR_" + std::to_string(ticks));
    }
}

const Vocabulary& Vocabulary::instance() {
    static const Vocabulary vocab;
    return vocab;
}

const std::string& Vocabulary::symbol_of(TokenId id) const {
    if (id >= symbols_.size()) {
        throw std::out_of_range("token id " + std::to_string(id) + " outside vocabulary");
    }
    return symbols_[id];
}

TokenId Vocabulary::id_of(const std::string& symbol) const {
    const auto& index = symbol_index();
    auto it = index.find(symbol);
    if (it == index.end()) throw std::out_of_range("unknown symbol '" + symbol + "'");
    return it->second;
}

bool Vocabulary::contains(const std::string& symbol) const {
    return symbol_index().count(symbol) > 0;
}

std::string Vocabulary::to_json() const {
    std::string out = "[";
    for (int id = 0; id < kVocabSize; ++id) {
        if (id) out += ",";
        out += "{\"id\":" + std::to_string(id) + ",\"symbol\":\"" + symbols_[id] + "\"}";
    }
    out += "]";
    return out;
}

std::vector<TokenId> encode(const Score& s) {
    if (s.key != KeySignature{0, Mode::Major}) {
        throw EncodeError("encode requires a C-major normalized score");
    }
    std::vector<TokenId> out;
    out.push_back(kBos);
    for (size_t mi = 0; mi < s.measures.size(); ++mi) {
        const Measure& m = s.measures[mi];
        const std::string where = "measure " + std::to_string(mi);
        if (measure_tick_sum(m) != kTicksPerMeasure) {
            throw EncodeError(where + " sums to " + std::to_string(measure_tick_sum(m)) +
                              " ticks, expected 192");
        }
        std::vector<int> starts;
        {
            int tick = 0;
            for (const NoteEvent& ev : m.events) {
                starts.push_back(tick);
                tick += ev.duration.ticks;
            }
        }
        int prev_onset = -1;
        for (const ChordSymbol& c : m.chords) {
            if (c.root_pc < 0 || c.root_pc > 11 || c.onset <= prev_onset ||
                c.onset >= kTicksPerMeasure) {
                throw EncodeError(where + ": invalid chord symbol");
            }
            if (std::find(starts.begin(), starts.end(), c.onset) == starts.end()) {
                throw EncodeError(where + ": chord onset " + std::to_string(c.onset) +
                                  " is not an event start");
            }
            prev_onset = c.onset;
        }
        size_t ci = 0;
        int tick = 0;
        for (size_t ei = 0; ei < m.events.size(); ++ei) {
            const NoteEvent& ev = m.events[ei];
            const std::string at = where + ", event " + std::to_string(ei);
            while (ci < m.chords.size() && m.chords[ci].onset <= tick) {
                out.push_back(root_token(m.chords[ci].root_pc));
                out.push_back(quality_token(m.chords[ci].quality));
                ++ci;
            }
            const int ticks = ev.duration.ticks;
            if (ticks < kTickGrid || ticks > kTicksPerMeasure || ticks % kTickGrid != 0) {
                throw EncodeError(at + ": duration " + std::to_string(ticks) +
                                  " off the 4-tick grid");
            }
            if (ev.is_rest()) {
                if (ev.tied_to_next) throw EncodeError(at + ": tied rest");
                out.push_back(kRestTok);
                out.push_back(duration_token(ticks));
            } else {
                if (!in_pitch_range(ev.pitch.midi)) {
                    throw EncodeError(at + ": pitch " + std::to_string(ev.pitch.midi) +
                                      " outside 48..107");
                }
                out.push_back(pitch_token(ev.pitch.midi));
                out.push_back(duration_token(ticks));
                if (ev.tied_to_next) out.push_back(kTie);
            }
            tick += ticks;
        }
        if (ci < m.chords.size()) {
            throw EncodeError(where + ": chord onset beyond the last event start");
        }
        out.push_back(kBar);
    }
    out.push_back(kEos);
    return out;
}

namespace {

// Decoder state machine with recovery. Pending slots are dropped (and
// reported) when a token arrives that cannot complete them.
class Decoder {
  public:
    std::pair<Score, RecoveryReport> run(const std::vector<TokenId>& tokens) {
        size_t start = 0;
        if (!tokens.empty() && tokens[0] == kBos) {
            start = 1;
        } else {
            report_.missing_bos = true;
            report_.notes.push_back("sequence does not start with BOS");
        }
        bool saw_eos = false;
        size_t i = start;
        for (; i < tokens.size(); ++i) {
            const TokenId t = tokens[i];
            if (t == kEos) {
                saw_eos = true;
                ++i;
                break;
            }
            step(t);
        }
        if (i < tokens.size()) {
            report_.notes.push_back(std::to_string(tokens.size() - i) + " tokens after EOS ignored");
        }
        if (!saw_eos) {
            report_.missing_eos = true;
            report_.notes.push_back("sequence does not end with EOS");
        }
        drop_pending("at end of sequence");
        if (!events_.empty() || !chords_.empty()) {
            report_.notes.push_back("unterminated final measure closed");
            close_measure();
        }
        Score s;
        s.key = KeySignature{0, Mode::Major};
        s.measures = std::move(measures_);
        return {std::move(s), std::move(report_)};
    }

  private:
    void step(TokenId t) {
        if (t == kPad) return;
        if (t == kUnk) {
            drop("UNK token");
            return;
        }
        if (t == kBos) {
            drop("BOS in mid-sequence");
            return;
        }
        if (t == kBar) {
            drop_pending("before BAR");
            close_measure();
            return;
        }
        if (t == kTie) {
            if (last_complete_note_ >= 0 && !pending_pitch_ && !pending_rest_) {
                events_[last_complete_note_].tied_to_next = true;
            } else {
                drop("TIE without a completed note");
            }
            return;
        }
        if (t == kRestTok) {
            drop_pending("before REST");
            pending_rest_ = true;
            return;
        }
        if (t >= kPitchBase && t < kRootBase) {
            drop_pending("before PITCH");
            pending_pitch_ = kMinPitch + (t - kPitchBase);
            return;
        }
        if (t >= kRootBase && t < kQualBase) {
            if (pending_root_ >= 0) drop("ROOT without QUAL");
            pending_root_ = t - kRootBase;
            return;
        }
        if (t >= kQualBase && t < kDurBase) {
            if (pending_root_ < 0) {
                drop("QUAL without ROOT");
                return;
            }
            const int onset = tick_;
            if (onset >= kTicksPerMeasure) {
                drop("chord at or beyond measure end");
            } else if (!chords_.empty() && onset <= chords_.back().onset) {
                drop("chord onset not increasing");
            } else {
                chords_.push_back(ChordSymbol{pending_root_,
                                              static_cast<ChordQuality>(t - kQualBase), onset});
            }
            pending_root_ = -1;
            return;
        }
        // DUR token
        const int ticks = (t - kDurBase + 1) * kTickGrid;
        if (pending_pitch_) {
            events_.push_back(NoteEvent::note(*pending_pitch_, ticks));
            last_complete_note_ = static_cast<int>(events_.size()) - 1;
            pending_pitch_.reset();
            tick_ += ticks;
        } else if (pending_rest_) {
            events_.push_back(NoteEvent::rest(ticks));
            last_complete_note_ = -1;
            pending_rest_ = false;
            tick_ += ticks;
        } else {
            drop("DUR without PITCH or REST");
        }
    }

    void drop(const std::string& what) {
        ++report_.dropped;
        report_.notes.push_back("dropped: " + what);
    }

    void drop_pending(const std::string& when) {
        if (pending_pitch_) {
            drop("dangling PITCH " + when);
            pending_pitch_.reset();
        }
        if (pending_rest_) {
            drop("dangling REST " + when);
            pending_rest_ = false;
        }
        if (pending_root_ >= 0) {
            drop("dangling ROOT " + when);
            pending_root_ = -1;
        }
    }

    void close_measure() {
        Measure m;
        m.events = std::move(events_);
        m.chords = std::move(chords_);
        events_.clear();
        chords_.clear();

        int sum = measure_tick_sum(m);
        if (sum > kTicksPerMeasure) {
            ++report_.truncated;
            std::vector<NoteEvent> kept;
            int acc = 0;
            for (NoteEvent& ev : m.events) {
                if (acc >= kTicksPerMeasure) break;
                if (acc + ev.duration.ticks > kTicksPerMeasure) {
                    ev.duration.ticks = kTicksPerMeasure - acc;  // grid-aligned remainder
                    ev.tied_to_next = ev.is_note() && ev.tied_to_next;
                }
                acc += ev.duration.ticks;
                kept.push_back(ev);
            }
            m.events = std::move(kept);
            sum = kTicksPerMeasure;
        }
        if (sum < kTicksPerMeasure) {
            ++report_.padded;
            if (!m.events.empty() && m.events.back().tied_to_next) {
                m.events.back().tied_to_next = false;
            }
            m.events.push_back(NoteEvent::rest(kTicksPerMeasure - sum));
        }
        measures_.push_back(std::move(m));
        tick_ = 0;
        last_complete_note_ = -1;
    }

    RecoveryReport report_;
    std::vector<Measure> measures_;
    std::vector<NoteEvent> events_;
    std::vector<ChordSymbol> chords_;
    std::optional<int> pending_pitch_;
    bool pending_rest_ = false;
    int pending_root_ = -1;
    int tick_ = 0;
    int last_complete_note_ = -1;
};

}  // namespace

std::pair<Score, RecoveryReport> decode(const std::vector<TokenId>& tokens) {
    return Decoder().run(tokens);
}

std::string render_token_text(const std::vector<TokenId>& tokens) {
    const auto& v = Vocabulary::instance();
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += v.symbol_of(tokens[i]);
    }
    return out;
}

std::vector<TokenId> parse_token_text(const std::string& text) {
    const auto& v = Vocabulary::instance();
    std::vector<TokenId> out;
    std::istringstream in(text);
    std::string symbol;
    while (in >> symbol) out.push_back(v.id_of(symbol));
    return out;
}

std::vector<std::uint8_t> tokens_to_bytes(const std::vector<TokenId>& tokens) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(tokens.size() * 2);
    for (TokenId t : tokens) {
        bytes.push_back(static_cast<std::uint8_t>(t & 0xFF));
        bytes.push_back(static_cast<std::uint8_t>(t >> 8));
    }
    return bytes;
}

std::vector<TokenId> tokens_from_bytes(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() % 2 != 0) {
        throw std::invalid_argument("binary token stream has odd byte length");
    }
    std::vector<TokenId> out;
    out.reserve(bytes.size() / 2);
    for (size_t i = 0; i < bytes.size(); i += 2) {
        out.push_back(static_cast<TokenId>(bytes[i] | (bytes[i + 1] << 8)));
    }
    return out;
}

}  // namespace orpheus::tok
