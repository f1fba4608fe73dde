#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "orpheus/synth.hpp"

namespace orpheus::synth {

namespace {

void put_u16le(std::vector<std::uint8_t>& out, unsigned v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

void put_u32le(std::vector<std::uint8_t>& out, unsigned long v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

std::uint32_t get_u32le(const std::vector<std::uint8_t>& b, size_t at) {
    return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
           (static_cast<std::uint32_t>(b[at + 2]) << 16) |
           (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t get_u16le(const std::vector<std::uint8_t>& b, size_t at) {
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

}  // namespace

std::vector<std::uint8_t> write_wav(const AudioBuffer& a) {
    const unsigned long data_bytes = a.samples.size() * 2;
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    for (char c : {'R', 'I', 'F', 'F'}) out.push_back(static_cast<std::uint8_t>(c));
    put_u32le(out, 36 + data_bytes);
    for (char c : {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '}) {
        out.push_back(static_cast<std::uint8_t>(c));
    }
    put_u32le(out, 16);                       // fmt chunk size
    put_u16le(out, 1);                        // PCM
    put_u16le(out, 1);                        // mono
    put_u32le(out, static_cast<unsigned long>(a.sample_rate));
    put_u32le(out, static_cast<unsigned long>(a.sample_rate) * 2);  // byte rate
    put_u16le(out, 2);                        // block align
    put_u16le(out, 16);                       // bits per sample
    for (char c : {'d', 'a', 't', 'a'}) out.push_back(static_cast<std::uint8_t>(c));
    put_u32le(out, data_bytes);
    for (float s : a.samples) {
        const double clamped = std::clamp(static_cast<double>(s), -1.0, 1.0);
        const int v = static_cast<int>(std::lround(clamped * 32767.0));
        put_u16le(out, static_cast<unsigned>(static_cast<std::int16_t>(v)) & 0xFFFF);
    }
    return out;
}

AudioBuffer read_wav(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw std::runtime_error("read_wav: not a RIFF/WAVE file");
    }
    AudioBuffer out;
    bool have_fmt = false;
    size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        char id[5] = {0};
        std::memcpy(id, bytes.data() + pos, 4);
        const std::uint32_t size = get_u32le(bytes, pos + 4);
        const size_t body = pos + 8;
        if (body + size > bytes.size()) throw std::runtime_error("read_wav: truncated chunk");
        if (std::strcmp(id, "fmt ") == 0) {
            if (size < 16) throw std::runtime_error("read_wav: short fmt chunk");
            const unsigned format = get_u16le(bytes, body);
            const unsigned channels = get_u16le(bytes, body + 2);
            const unsigned bits = get_u16le(bytes, body + 14);
            if (format != 1 || channels != 1 || bits != 16) {
                throw std::runtime_error("read_wav: only PCM16 mono is supported");
            }
            out.sample_rate = static_cast<int>(get_u32le(bytes, body + 4));
            have_fmt = true;
        } else if (std::strcmp(id, "data") == 0) {
            if (!have_fmt) throw std::runtime_error("read_wav: data before fmt");
            out.samples.reserve(size / 2);
            for (size_t i = 0; i + 1 < size; i += 2) {
                const auto v = static_cast<std::int16_t>(get_u16le(bytes, body + i));
                out.samples.push_back(static_cast<float>(v) / 32767.0f);
            }
            return out;
        }
        pos = body + size + (size & 1);  // chunks are word-aligned
    }
    throw std::runtime_error("read_wav: no data chunk");
}

}  // namespace orpheus::synth
