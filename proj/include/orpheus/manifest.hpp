#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace orpheus {

// One training pair: a rendered WAV and its token sequence, with provenance.
struct ManifestRecord {
    std::string id;
    std::string wav_path;    // relative to the manifest's directory
    std::string token_text;  // space-separated symbol names
    std::string abc_path;
    double duration_s = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const ManifestRecord&) const = default;
};

std::string to_json_line(const ManifestRecord& r);
ManifestRecord record_from_json(const std::string& line);

void write_manifest(const std::string& path, const std::vector<ManifestRecord>& records);
std::vector<ManifestRecord> read_manifest(const std::string& path);

}  // namespace orpheus
