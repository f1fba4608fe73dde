#include <array>
#include <cctype>
#include <optional>
#include <regex>
#include <sstream>
#include <string>

#include "orpheus/abc.hpp"
#include "orpheus/errors.hpp"

namespace orpheus::abc {

namespace {

constexpr char kStrippedHeaders[] = {'T', 'C', 'Z', 'N', 'O', 'R', 'S', 'W', 'w'};
constexpr char kKnownHeaders[] = {'X', 'T', 'C', 'M', 'L', 'K', 'Q'};

bool is_header_line(const std::string& line) {
    return line.size() >= 2 && std::isalpha(static_cast<unsigned char>(line[0])) &&
           line[1] == ':';
}

bool contains(const char* begin, const char* end, char c) {
    for (const char* p = begin; p != end; ++p) {
        if (*p == c) return true;
    }
    return false;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) {
        if (cur.back() == '\r') cur.pop_back();
        lines.push_back(cur);
    }
    return lines;
}

// Semitone offset of each natural letter from C.
int letter_pc(char upper) {
    switch (upper) {
        case 'C': return 0;
        case 'D': return 2;
        case 'E': return 4;
        case 'F': return 5;
        case 'G': return 7;
        case 'A': return 9;
        case 'B': return 11;
        default: return -1;
    }
}

// Circle-of-fifths position of a major key spelled letter (+ optional #/b):
// positive = sharps, negative = flats.
std::optional<int> major_fifths(char letter, int accidental) {
    static constexpr std::array<std::pair<char, int>, 7> base{
        {{'C', 0}, {'D', 2}, {'E', 4}, {'F', -1}, {'G', 1}, {'A', 3}, {'B', 5}}};
    for (auto [l, f] : base) {
        if (l == letter) {
            const int fifths = f + 7 * accidental;
            if (fifths < -7 || fifths > 7) return std::nullopt;
            return fifths;
        }
    }
    return std::nullopt;
}

struct ParsedKey {
    KeySignature key;
    // Per-letter alteration implied by the key signature, indexed by letter 'A'..'G'.
    std::array<int, 7> sig_alteration{};
};

ParsedKey parse_key_header(const std::string& value, int line_no) {
    std::string v;
    for (char c : value) {
        if (!std::isspace(static_cast<unsigned char>(c))) v.push_back(c);
    }
    if (v.empty()) throw ParseError("empty K: header", line_no, 1);

    const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(v[0])));
    if (letter_pc(letter) < 0) throw ParseError("invalid key tonic '" + v + "'", line_no, 1);
    size_t i = 1;
    int accidental = 0;
    if (i < v.size() && (v[i] == '#' || v[i] == 'b')) {
        accidental = v[i] == '#' ? 1 : -1;
        ++i;
    }
    std::string mode_str = v.substr(i);
    for (char& c : mode_str) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    Mode mode;
    if (mode_str.empty() || mode_str == "maj" || mode_str == "major") {
        mode = Mode::Major;
    } else if (mode_str == "m" || mode_str == "min" || mode_str == "minor") {
        mode = Mode::Minor;
    } else {
        throw ParseError("unknown key mode '" + mode_str + "'", line_no, 1);
    }

    auto fifths = major_fifths(letter, accidental);
    if (fifths) {
        if (mode == Mode::Minor) *fifths -= 3;
        if (*fifths < -7 || *fifths > 7) fifths = std::nullopt;
    }
    if (!fifths) throw ParseError("key '" + v + "' has no valid signature", line_no, 1);

    ParsedKey out;
    out.key.tonic_pc = ((letter_pc(letter) + accidental) % 12 + 12) % 12;
    out.key.mode = mode;

    static constexpr char kSharpOrder[] = {'F', 'C', 'G', 'D', 'A', 'E', 'B'};
    static constexpr char kFlatOrder[] = {'B', 'E', 'A', 'D', 'G', 'C', 'F'};
    if (*fifths > 0) {
        for (int k = 0; k < *fifths; ++k) out.sig_alteration[kSharpOrder[k] - 'A'] = 1;
    } else {
        for (int k = 0; k < -*fifths; ++k) out.sig_alteration[kFlatOrder[k] - 'A'] = -1;
    }
    return out;
}

Fraction parse_fraction(const std::string& value, int line_no, const char* what) {
    static const std::regex re(R"(^\s*(\d+)\s*/\s*(\d+)\s*$)");
    std::smatch m;
    if (!std::regex_match(value, m, re)) {
        throw ParseError(std::string("malformed ") + what + " header '" + value + "'", line_no, 1);
    }
    Fraction f{std::stol(m[1]), std::stol(m[2])};
    if (f.num <= 0 || f.den <= 0) {
        throw ParseError(std::string("invalid ") + what + " fraction", line_no, 1);
    }
    return f;
}

ChordQuality chord_quality_from_suffix(const std::string& suffix, int line_no, int col) {
    if (suffix.empty() || suffix == "maj") return ChordQuality::Maj;
    if (suffix == "m" || suffix == "min") return ChordQuality::Min;
    if (suffix == "7") return ChordQuality::Dom7;
    if (suffix == "m7" || suffix == "min7") return ChordQuality::Min7;
    if (suffix == "maj7" || suffix == "M7") return ChordQuality::Maj7;
    if (suffix == "dim") return ChordQuality::Dim;
    if (suffix == "aug" || suffix == "+") return ChordQuality::Aug;
    if (suffix == "sus4") return ChordQuality::Sus4;
    throw ParseError("unknown chord quality '" + suffix + "'", line_no, col);
}

// Body scanner with measure-scoped accidental state.
class BodyParser {
  public:
    BodyParser(const ParsedKey& key, Fraction unit) : key_(key), unit_(unit) {}

    void parse_line(const std::string& line, int line_no) {
        line_ = line_no;
        col_ = 1;
        size_t i = 0;
        while (i < line.size()) {
            col_ = static_cast<int>(i) + 1;
            const char c = line[i];
            if (c == ' ' || c == '\t') {
                ++i;
            } else if (c == '|' || c == ':' || c == '[' || c == ']') {
                size_t j = i;
                bool has_bar = false;
                while (j < line.size() &&
                       (line[j] == '|' || line[j] == ':' || line[j] == '[' || line[j] == ']')) {
                    has_bar |= line[j] == '|';
                    ++j;
                }
                if (!has_bar) fail(std::string("unsupported symbol '") + c + "'");
                close_measure();
                i = j;
            } else if (c == '"') {
                i = parse_chord(line, i);
            } else if (c == '(') {
                i = parse_triplet_open(line, i);
            } else if (c == 'z') {
                i = parse_rest(line, i);
            } else if (c == '^' || c == '_' || c == '=' ||
                       (letter_pc(static_cast<char>(
                            std::toupper(static_cast<unsigned char>(c)))) >= 0 &&
                        std::isalpha(static_cast<unsigned char>(c)))) {
                i = parse_note(line, i);
            } else if (c == '-') {
                apply_tie();
                ++i;
            } else {
                fail(std::string("unsupported symbol '") + c + "'");
            }
        }
    }

    std::vector<Measure> finish() {
        if (triplet_left_ > 0) fail("malformed triplet: unterminated at end of tune");
        if (!current_.events.empty() || !current_.chords.empty()) {
            measures_.push_back(std::move(current_));
            current_ = Measure{};
        }
        return std::move(measures_);
    }

  private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

    void close_measure() {
        if (triplet_left_ > 0) fail("malformed triplet: crosses bar line");
        const bool empty = current_.events.empty() && current_.chords.empty();
        if (empty && measures_.empty() && !any_content_) {
            return;  // decorative bar before the first note
        }
        measures_.push_back(std::move(current_));
        current_ = Measure{};
        accidentals_.clear();
        tick_ = 0;
        last_was_note_ = false;
    }

    void apply_tie() {
        if (!last_was_note_) fail("tie '-' must follow a note");
        if (current_.events.back().tied_to_next) fail("duplicate tie");
        current_.events.back().tied_to_next = true;
        last_was_note_ = false;
    }

    size_t parse_chord(const std::string& line, size_t i) {
        const int start_col = static_cast<int>(i) + 1;
        size_t j = i + 1;
        std::string name;
        while (j < line.size() && line[j] != '"') name.push_back(line[j++]);
        if (j == line.size()) throw ParseError("unterminated chord quote", line_, start_col);
        if (name.empty()) throw ParseError("empty chord symbol", line_, start_col);

        const char letter = name[0];
        if (letter < 'A' || letter > 'G') {
            throw ParseError("invalid chord root '" + name + "'", line_, start_col);
        }
        size_t k = 1;
        int acc = 0;
        if (k < name.size() && (name[k] == '#' || name[k] == 'b')) {
            acc = name[k] == '#' ? 1 : -1;
            ++k;
        }
        const int root = ((letter_pc(letter) + acc) % 12 + 12) % 12;
        const ChordQuality qual = chord_quality_from_suffix(name.substr(k), line_, start_col);

        if (!current_.chords.empty() && tick_ <= current_.chords.back().onset) {
            throw ParseError("chord onsets must be strictly increasing", line_, start_col);
        }
        if (tick_ >= kTicksPerMeasure && measure_tick_sum(current_) == kTicksPerMeasure) {
            throw ParseError("chord symbol at measure end", line_, start_col);
        }
        current_.chords.push_back(ChordSymbol{root, qual, tick_});
        any_content_ = true;
        last_was_note_ = false;
        return j + 1;
    }

    size_t parse_triplet_open(const std::string& line, size_t i) {
        if (i + 1 >= line.size() || !std::isdigit(static_cast<unsigned char>(line[i + 1]))) {
            fail("unsupported slur '('");
        }
        if (line[i + 1] != '3') fail("malformed triplet: only (3 is supported");
        if (triplet_left_ > 0) fail("malformed triplet: nested (3");
        triplet_left_ = 3;
        return i + 2;
    }

    // duration multiplier: "", "3", "/2", "3/2", "/", "//"
    size_t parse_multiplier(const std::string& line, size_t i, long& num, long& den) {
        num = 1;
        den = 1;
        if (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
            num = 0;
            while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
                num = num * 10 + (line[i] - '0');
                if (num > 100000) fail("duration multiplier too large");
                ++i;
            }
        }
        while (i < line.size() && line[i] == '/') {
            ++i;
            if (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
                long d = 0;
                while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
                    d = d * 10 + (line[i] - '0');
                    if (d > 100000) fail("duration divisor too large");
                    ++i;
                }
                den *= d;
            } else {
                den *= 2;
            }
            if (den <= 0) fail("invalid duration divisor");
        }
        return i;
    }

    int resolve_ticks(long mult_num, long mult_den) {
        long num = 192L * unit_.num * mult_num;
        long den = unit_.den * mult_den;
        if (triplet_left_ > 0) {
            num *= 2;
            den *= 3;
            --triplet_left_;
        }
        const long exact = num / den;
        const int ticks = (num % den == 0)
                              ? static_cast<int>(exact)
                              : static_cast<int>((2 * num + den) / (2 * den));  // round half up
        if (ticks <= 0) fail("note duration resolves to zero ticks");
        return ticks;
    }

    size_t parse_rest(const std::string& line, size_t i) {
        long num, den;
        i = parse_multiplier(line, i + 1, num, den);
        const int ticks = resolve_ticks(num, den);
        current_.events.push_back(NoteEvent::rest(ticks));
        tick_ += ticks;
        any_content_ = true;
        last_was_note_ = false;
        return i;
    }

    size_t parse_note(const std::string& line, size_t i) {
        bool explicit_acc = false;
        int acc = 0;
        while (i < line.size() && (line[i] == '^' || line[i] == '_' || line[i] == '=')) {
            explicit_acc = true;
            if (line[i] == '^') ++acc;
            if (line[i] == '_') --acc;
            ++i;
        }
        if (i >= line.size()) fail("accidental without note letter");
        const char c = line[i];
        const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (letter_pc(upper) < 0 || !std::isalpha(static_cast<unsigned char>(c))) {
            fail(std::string("unresolvable note letter '") + c + "'");
        }
        ++i;
        int natural = 60 + letter_pc(upper) + (std::islower(static_cast<unsigned char>(c)) ? 12 : 0);
        while (i < line.size() && (line[i] == '\'' || line[i] == ',')) {
            natural += line[i] == '\'' ? 12 : -12;
            ++i;
        }
        long num, den;
        i = parse_multiplier(line, i, num, den);
        const int ticks = resolve_ticks(num, den);

        const int state_key = (upper - 'A') * 16 + (natural / 12);
        int alteration;
        if (explicit_acc) {
            alteration = acc;
            accidentals_[state_key] = acc;
        } else if (auto it = accidentals_.find(state_key); it != accidentals_.end()) {
            alteration = it->second;
        } else {
            alteration = key_.sig_alteration[upper - 'A'];
        }
        const int midi = natural + alteration;
        if (midi < 0 || midi > 127) fail("note outside MIDI range");

        current_.events.push_back(NoteEvent::note(midi, ticks));
        tick_ += ticks;
        any_content_ = true;
        last_was_note_ = true;
        return i;
    }

    ParsedKey key_;
    Fraction unit_;
    std::vector<Measure> measures_;
    Measure current_;
    std::map<int, int> accidentals_;  // (letter, octave) -> measure-scoped alteration
    int tick_ = 0;
    int triplet_left_ = 0;
    bool last_was_note_ = false;
    bool any_content_ = false;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

AbcDocument split_document(const std::string& text) {
    AbcDocument doc;
    bool in_body = false;
    int line_no = 0;
    for (const auto& line : split_lines(text)) {
        ++line_no;
        if (line.empty()) continue;
        if (is_header_line(line)) {
            if (in_body) throw ParseError("header line inside tune body", line_no, 1);
            const char letter = line[0];
            if (!contains(std::begin(kKnownHeaders), std::end(kKnownHeaders), letter)) {
                throw ParseError(std::string("unknown header '") + letter + ":'", line_no, 1);
            }
            doc.headers[letter] = line.substr(2);
        } else {
            in_body = true;
            doc.body_lines.push_back(line);
        }
    }
    return doc;
}

std::string strip_metadata(const std::string& text) {
    static const std::regex bang_group("![^!\n]*!");
    static const std::regex grace_group(R"(\{[^}\n]*\})");
    std::string out;
    for (const auto& line : split_lines(text)) {
        if (is_header_line(line) &&
            contains(std::begin(kStrippedHeaders), std::end(kStrippedHeaders), line[0])) {
            continue;
        }
        std::string cleaned = std::regex_replace(line, bang_group, "");
        cleaned = std::regex_replace(cleaned, grace_group, "");
        std::erase(cleaned, '~');
        out += cleaned;
        out += '\n';
    }
    return out;
}

Score parse_abc(const std::string& text) {
    const auto lines = split_lines(text);

    // Header pass, tracking line numbers for error reporting.
    std::map<char, std::pair<std::string, int>> headers;
    size_t body_start = lines.size();
    for (size_t li = 0; li < lines.size(); ++li) {
        const auto& line = lines[li];
        if (line.empty()) continue;
        if (!is_header_line(line)) {
            body_start = li;
            break;
        }
        const char letter = line[0];
        if (!contains(std::begin(kKnownHeaders), std::end(kKnownHeaders), letter)) {
            throw ParseError(std::string("unknown header '") + letter + ":'",
                             static_cast<int>(li) + 1, 1);
        }
        headers[letter] = {line.substr(2), static_cast<int>(li) + 1};
    }

    auto key_it = headers.find('K');
    if (key_it == headers.end()) {
        throw ParseError("missing K: header", static_cast<int>(lines.size()), 1);
    }
    const ParsedKey key = parse_key_header(key_it->second.first, key_it->second.second);

    if (auto it = headers.find('M'); it != headers.end()) {
        std::string v = it->second.first;
        std::erase_if(v, [](unsigned char c) { return std::isspace(c); });
        if (v != "C") {
            const Fraction meter = parse_fraction(v, it->second.second, "M:");
            if (meter.num != 4 || meter.den != 4) {
                throw ParseError("unsupported meter " + std::to_string(meter.num) + "/" +
                                     std::to_string(meter.den) + " (only 4/4)",
                                 it->second.second, 1);
            }
        }
    }

    Fraction unit{1, 8};
    if (auto it = headers.find('L'); it != headers.end()) {
        unit = parse_fraction(it->second.first, it->second.second, "L:");
    }

    BodyParser body(key, unit);
    bool saw_music = false;
    for (size_t li = body_start; li < lines.size(); ++li) {
        const auto& line = lines[li];
        if (line.empty()) continue;
        if (is_header_line(line)) throw ParseError("header line inside tune body",
                                                   static_cast<int>(li) + 1, 1);
        body.parse_line(line, static_cast<int>(li) + 1);
        saw_music = true;
    }
    if (!saw_music) throw ParseError("no music lines", static_cast<int>(lines.size()), 1);

    Score score;
    score.key = key.key;
    score.measures = body.finish();
    return score;
}

}  // namespace orpheus::abc
