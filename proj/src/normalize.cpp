#include <cstdlib>
#include <stdexcept>

#include "orpheus/normalize.hpp"

namespace orpheus {

std::string RepairReport::to_json() const {
    return "{\"padded\":" + std::to_string(padded) + ",\"discarded\":" + std::to_string(discarded) +
           ",\"untouched\":" + std::to_string(untouched) + ",\"snapped\":" + std::to_string(snapped) +
           "}";
}

int transpose_shift(const KeySignature& key) {
    const int target = key.mode == Mode::Major ? 0 : 9;  // C, or A for relative minor
    const int up = ((target - key.tonic_pc) % 12 + 12) % 12;  // 0..11
    if (up == 0) return 0;
    if (up < 6) return up;
    return up - 12;  // |down| <= 6; ties (up == 6) break downward
}

Score transpose_to_c(const Score& s, std::vector<ClampEvent>* clamps) {
    const int shift = transpose_shift(s.key);
    Score out = s;
    out.key = KeySignature{0, Mode::Major};
    for (size_t mi = 0; mi < out.measures.size(); ++mi) {
        Measure& m = out.measures[mi];
        for (size_t ei = 0; ei < m.events.size(); ++ei) {
            NoteEvent& ev = m.events[ei];
            if (!ev.is_note()) continue;
            const int shifted = ev.pitch.midi + shift;
            int folded = shifted;
            while (folded < kMinPitch) folded += 12;
            while (folded > kMaxPitch) folded -= 12;
            if (folded != shifted && clamps) {
                clamps->push_back(ClampEvent{static_cast<int>(mi), static_cast<int>(ei),
                                             ev.pitch.midi, folded});
            }
            ev.pitch.midi = folded;
        }
        for (ChordSymbol& c : m.chords) {
            c.root_pc = ((c.root_pc + shift) % 12 + 12) % 12;
        }
    }
    return out;
}

std::pair<Score, long> regrid_durations(const Score& s, abc::Fraction source_unit) {
    if (source_unit.num <= 0 || source_unit.den <= 0) {
        throw std::invalid_argument("regrid_durations: invalid source unit");
    }
    long snapped = 0;
    Score out = s;
    for (Measure& m : out.measures) {
        for (NoteEvent& ev : m.events) {
            const long v = ev.duration.ticks;
            if (v <= 0) throw std::invalid_argument("regrid_durations: non-positive duration");
            const long num = v * 192L * source_unit.num;
            const long den = source_unit.den;
            long ticks = (num % den == 0) ? num / den : (2 * num + den) / (2 * den);
            const long exact_before_snap = ticks;
            if (ticks % kTickGrid != 0) {
                ticks = ((ticks + kTickGrid / 2) / kTickGrid) * kTickGrid;  // half up
            }
            if (ticks < kTickGrid) ticks = kTickGrid;
            if (ticks != exact_before_snap || num % den != 0) ++snapped;
            ev.duration.ticks = static_cast<int>(ticks);
        }
    }
    return {std::move(out), snapped};
}

std::pair<Score, RepairReport> repair_measures(const Score& s) {
    Score out = s;
    out.measures.clear();
    RepairReport report;
    for (const Measure& m : s.measures) {
        const int sum = measure_tick_sum(m);
        if (sum > kTicksPerMeasure) {
            ++report.discarded;
            continue;
        }
        if (sum < kTicksPerMeasure) {
            Measure padded = m;
            if (!padded.events.empty() && padded.events.back().tied_to_next) {
                padded.events.back().tied_to_next = false;  // tie into padding is meaningless
            }
            padded.events.push_back(NoteEvent::rest(kTicksPerMeasure - sum));
            out.measures.push_back(std::move(padded));
            ++report.padded;
        } else {
            out.measures.push_back(m);
            ++report.untouched;
        }
    }
    return {std::move(out), report};
}

NormalizeResult normalize(const Score& s) {
    NormalizeResult result;
    auto [regridded, snapped] = regrid_durations(s, abc::Fraction{1, 192});
    Score transposed = transpose_to_c(regridded, &result.clamps);
    auto [repaired, report] = repair_measures(transposed);
    result.score = std::move(repaired);
    result.report = report;
    result.report.snapped = snapped;
    return result;
}

}  // namespace orpheus
