#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "orpheus/augment.hpp"
#include "orpheus/rng.hpp"

namespace orpheus::aug {

namespace {

// Sub-stream indices for the two mutation passes (see Rng::derive_seed).
constexpr std::uint64_t kPitchStream = 1;
constexpr std::uint64_t kExtendStream = 2;

constexpr bool in_c_major(int pc) {
    return pc == 0 || pc == 2 || pc == 4 || pc == 5 || pc == 7 || pc == 9 || pc == 11;
}

std::string event_key(const Measure& m) {
    // Exact-equality dedup key: a compact byte serialization of the measure.
    std::string key;
    key.reserve(m.events.size() * 6 + m.chords.size() * 4);
    for (const NoteEvent& ev : m.events) {
        key.push_back(ev.is_rest() ? 'r' : 'n');
        key.push_back(static_cast<char>(ev.is_rest() ? 0 : ev.pitch.midi));
        key.push_back(static_cast<char>(ev.duration.ticks & 0xFF));
        key.push_back(static_cast<char>(ev.duration.ticks >> 8));
        key.push_back(ev.tied_to_next ? 't' : '.');
    }
    for (const ChordSymbol& c : m.chords) {
        key.push_back('c');
        key.push_back(static_cast<char>(c.root_pc));
        key.push_back(static_cast<char>(static_cast<int>(c.quality)));
        key.push_back(static_cast<char>(c.onset));
    }
    return key;
}

double mean_pitch(const Measure& m) {
    long sum = 0;
    int count = 0;
    for (const NoteEvent& ev : m.events) {
        if (ev.is_note()) {
            sum += ev.pitch.midi;
            ++count;
        }
    }
    return count == 0 ? 0.0 : static_cast<double>(sum) / count;
}

std::size_t draw_index(const SectionPool& pool, SampleStrategy strategy,
                       const GaussianParams& gp, Rng& rng) {
    const std::size_t p = pool.sections.size();
    if (strategy == SampleStrategy::Uniform) {
        return static_cast<std::size_t>(rng.next_below(p));
    }
    const double mean = gp.mean_fraction * static_cast<double>(p - 1);
    const double sigma = static_cast<double>(p) / gp.sigma_divisor;
    long rank = std::llround(mean + sigma * rng.next_gaussian());
    rank = std::clamp<long>(rank, 0, static_cast<long>(p) - 1);
    return pool.rank_order[static_cast<std::size_t>(rank)];
}

}  // namespace

std::string MutationLog::to_jsonl() const {
    std::string out;
    for (const MutationEntry& e : entries) {
        out += "{\"measure\":" + std::to_string(e.measure) + ",\"event\":" + std::to_string(e.event) +
               ",\"old_pitch\":" + std::to_string(e.old_pitch) +
               ",\"new_pitch\":" + std::to_string(e.new_pitch) +
               ",\"old_ticks\":" + std::to_string(e.old_ticks) +
               ",\"new_ticks\":" + std::to_string(e.new_ticks) + "}\n";
    }
    return out;
}

int snap_to_c_major(int midi) {
    for (int d = 0; d <= 11; ++d) {
        const int down = midi - d;
        if (down >= 0 && in_c_major(((down % 12) + 12) % 12)) return down;
        const int up = midi + d;
        if (up <= 127 && in_c_major(up % 12)) return up;
    }
    return midi;  // unreachable: any chromatic neighborhood contains scale tones
}

std::pair<Score, MutationLog> mutate_pitches(const Score& s, const MutationParams& p) {
    if (p.pitch_prob < 0.0 || p.pitch_prob > 1.0 || p.pitch_sigma < 0.0) {
        throw std::invalid_argument("mutate_pitches: invalid parameters");
    }
    Rng rng(Rng::derive_seed(p.seed, kPitchStream));
    Score out = s;
    MutationLog log;
    for (size_t mi = 0; mi < out.measures.size(); ++mi) {
        Measure& m = out.measures[mi];
        for (size_t ei = 0; ei < m.events.size(); ++ei) {
            NoteEvent& ev = m.events[ei];
            if (!ev.is_note()) continue;
            const double u = rng.next_double();
            if (u >= p.pitch_prob) continue;
            const int shift = static_cast<int>(std::llround(p.pitch_sigma * rng.next_gaussian()));
            int candidate = ev.pitch.midi + shift;
            if (p.snap_to_scale) candidate = snap_to_c_major(candidate);
            candidate = std::clamp(candidate, kMinPitch, kMaxPitch);
            if (candidate == ev.pitch.midi) continue;
            log.entries.push_back(MutationEntry{static_cast<int>(mi), static_cast<int>(ei),
                                                ev.pitch.midi, candidate, ev.duration.ticks,
                                                ev.duration.ticks});
            ev.pitch.midi = candidate;
        }
    }
    return {std::move(out), std::move(log)};
}

std::pair<Score, MutationLog> extend_durations(const Score& s, const MutationParams& p) {
    if (p.extend_prob < 0.0 || p.extend_prob > 1.0) {
        throw std::invalid_argument("extend_durations: invalid parameters");
    }
    Rng rng(Rng::derive_seed(p.seed, kExtendStream));
    Score out = s;
    MutationLog log;
    for (size_t mi = 0; mi < out.measures.size(); ++mi) {
        Measure& m = out.measures[mi];
        int tick = 0;
        for (size_t ei = 0; ei < m.events.size(); ++ei) {
            tick += m.events[ei].duration.ticks;
            if (!m.events[ei].is_note()) continue;
            const double u = rng.next_double();
            if (u >= p.extend_prob) continue;
            if (ei + 1 >= m.events.size() || !m.events[ei + 1].is_rest()) continue;
            const int rest_start = tick;
            const bool chord_on_rest =
                std::any_of(m.chords.begin(), m.chords.end(),
                            [rest_start](const ChordSymbol& c) { return c.onset == rest_start; });
            if (chord_on_rest) continue;
            const int old_ticks = m.events[ei].duration.ticks;
            const int absorbed = m.events[ei + 1].duration.ticks;
            m.events[ei].duration.ticks += absorbed;
            m.events.erase(m.events.begin() + static_cast<long>(ei) + 1);
            tick += absorbed;
            log.entries.push_back(MutationEntry{static_cast<int>(mi), static_cast<int>(ei),
                                                m.events[ei].pitch.midi, m.events[ei].pitch.midi,
                                                old_ticks, old_ticks + absorbed});
        }
    }
    return {std::move(out), std::move(log)};
}

SectionPool build_section_pool(const std::vector<Score>& scores) {
    if (scores.empty()) throw std::invalid_argument("build_section_pool: no input scores");
    SectionPool pool;
    std::unordered_map<std::string, std::size_t> seen;
    for (const Score& s : scores) {
        for (const Measure& m : s.measures) {
            if (measure_tick_sum(m) != kTicksPerMeasure) {
                throw std::invalid_argument("build_section_pool: input is not normalized");
            }
            const std::string key = event_key(m);
            if (seen.emplace(key, pool.sections.size()).second) {
                pool.sections.push_back(m);
            }
        }
    }
    if (pool.sections.empty()) {
        throw std::invalid_argument("build_section_pool: no measures in input");
    }
    const double w = 1.0 / static_cast<double>(pool.sections.size());
    pool.weights.assign(pool.sections.size(), w);

    // Rank by mean pitch, ties by first occurrence (stable sort on index).
    pool.rank_order.resize(pool.sections.size());
    std::iota(pool.rank_order.begin(), pool.rank_order.end(), std::size_t{0});
    std::stable_sort(pool.rank_order.begin(), pool.rank_order.end(),
                     [&pool](std::size_t a, std::size_t b) {
                         return mean_pitch(pool.sections[a]) < mean_pitch(pool.sections[b]);
                     });
    return pool;
}

SampleStrategy strategy_from_string(const std::string& name) {
    if (name == "uniform") return SampleStrategy::Uniform;
    if (name == "gaussian") return SampleStrategy::Gaussian;
    throw std::invalid_argument("unknown sampling strategy '" + name + "'");
}

Score sample_sections(const SectionPool& pool, int n, SampleStrategy strategy,
                      std::uint64_t seed, const GaussianParams& gp) {
    if (pool.sections.empty()) throw std::invalid_argument("sample_sections: empty pool");
    if (n < 1) throw std::invalid_argument("sample_sections: n must be >= 1");
    if (strategy == SampleStrategy::Gaussian &&
        pool.rank_order.size() != pool.sections.size()) {
        throw std::invalid_argument("sample_sections: pool missing rank order");
    }
    Rng rng(seed);
    Score out;
    out.key = KeySignature{0, Mode::Major};
    out.measures.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.measures.push_back(pool.sections[draw_index(pool, strategy, gp, rng)]);
    }
    return out;
}

Score generate_score(const SectionPool& pool, std::uint64_t seed, long index,
                     int sections_per_score, SampleStrategy strategy, const GaussianParams& gp) {
    Score s = sample_sections(pool, sections_per_score, strategy,
                              Rng::derive_seed(seed, static_cast<std::uint64_t>(index)), gp);
    char buf[32];
    std::snprintf(buf, sizeof buf, "gen-%06ld", index);
    s.source_id = buf;
    return s;
}

void generate_dataset(const SectionPool& pool, long count, int sections_per_score,
                      SampleStrategy strategy, std::uint64_t seed,
                      const std::function<void(long, Score&&)>& sink, const GaussianParams& gp) {
    for (long k = 0; k < count; ++k) {
        sink(k, generate_score(pool, seed, k, sections_per_score, strategy, gp));
    }
}

}  // namespace orpheus::aug
