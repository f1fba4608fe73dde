#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "orpheus/manifest.hpp"

namespace orpheus {

std::string to_json_line(const ManifestRecord& r) {
    nlohmann::json j;
    j["id"] = r.id;
    j["wav_path"] = r.wav_path;
    j["token_text"] = r.token_text;
    j["abc_path"] = r.abc_path;
    j["duration_s"] = r.duration_s;
    j["seed"] = r.seed;
    return j.dump();
}

ManifestRecord record_from_json(const std::string& line) {
    const nlohmann::json j = nlohmann::json::parse(line);
    ManifestRecord r;
    r.id = j.at("id").get<std::string>();
    r.wav_path = j.at("wav_path").get<std::string>();
    r.token_text = j.at("token_text").get<std::string>();
    r.abc_path = j.at("abc_path").get<std::string>();
    r.duration_s = j.at("duration_s").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

void write_manifest(const std::string& path, const std::vector<ManifestRecord>& records) {
    std::ofstream f(path, std::ios::binary);  // binary: no newline translation
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& r : records) {
        f << to_json_line(r) << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<ManifestRecord> read_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::vector<ManifestRecord> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        out.push_back(record_from_json(line));
    }
    return out;
}

}  // namespace orpheus
