#include <stdexcept>

#include "orpheus/synth.hpp"

namespace orpheus::synth {

namespace {

void put_u16be(std::vector<std::uint8_t>& out, unsigned v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put_u32be(std::vector<std::uint8_t>& out, unsigned long v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put_varlen(std::vector<std::uint8_t>& out, unsigned long v) {
    std::uint8_t stack[5];
    int n = 0;
    stack[n++] = static_cast<std::uint8_t>(v & 0x7F);
    while ((v >>= 7) != 0) stack[n++] = static_cast<std::uint8_t>((v & 0x7F) | 0x80);
    while (n > 0) out.push_back(stack[--n]);
}

}  // namespace

std::vector<std::uint8_t> write_smf(const MidiSequence& m) {
    if (m.ticks_per_quarter <= 0 || m.ticks_per_quarter > 0x7FFF) {
        throw std::invalid_argument("write_smf: bad division");
    }
    std::vector<std::uint8_t> track;

    // Time signature 4/4 and tempo at t=0.
    put_varlen(track, 0);
    for (std::uint8_t b : {0xFF, 0x58, 0x04, 0x04, 0x02, 0x18, 0x08}) track.push_back(b);
    put_varlen(track, 0);
    track.push_back(0xFF);
    track.push_back(0x51);
    track.push_back(0x03);
    const unsigned tempo = static_cast<unsigned>(m.tempo_us_per_quarter);
    track.push_back(static_cast<std::uint8_t>(tempo >> 16));
    track.push_back(static_cast<std::uint8_t>(tempo >> 8));
    track.push_back(static_cast<std::uint8_t>(tempo & 0xFF));

    int last_tick = 0;
    for (const MidiEvent& ev : m.events) {
        if (ev.tick < last_tick) throw std::invalid_argument("write_smf: events not sorted");
        put_varlen(track, static_cast<unsigned long>(ev.tick - last_tick));
        last_tick = ev.tick;
        track.push_back(static_cast<std::uint8_t>((ev.note_on ? 0x90 : 0x80) | (ev.channel & 0x0F)));
        track.push_back(ev.key & 0x7F);
        track.push_back(ev.note_on ? (ev.velocity & 0x7F) : 0x40);
    }

    // End of track at the full score length so trailing rests survive.
    put_varlen(track, static_cast<unsigned long>(std::max(0, m.length_ticks - last_tick)));
    track.push_back(0xFF);
    track.push_back(0x2F);
    track.push_back(0x00);

    std::vector<std::uint8_t> out = {'M', 'T', 'h', 'd'};
    put_u32be(out, 6);
    put_u16be(out, 0);  // format 0
    put_u16be(out, 1);  // one track
    put_u16be(out, static_cast<unsigned>(m.ticks_per_quarter));
    out.push_back('M');
    out.push_back('T');
    out.push_back('r');
    out.push_back('k');
    put_u32be(out, track.size());
    out.insert(out.end(), track.begin(), track.end());
    return out;
}

}  // namespace orpheus::synth
