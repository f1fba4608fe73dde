#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "orpheus/abc.hpp"
#include "orpheus/manifest.hpp"
#include "orpheus/pipeline.hpp"
#include "orpheus/synth.hpp"
#include "orpheus/tokenize.hpp"

namespace fs = std::filesystem;
using namespace orpheus;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void put(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream f(p);
    f << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("run_pipeline produces a verified manifest and reports skips") {
    TempDir dir("orpheus_test_pipeline");
    put(dir.path / "in" / "a.abc", "X:1\nM:4/4\nL:1/8\nK:G\nG2 B2 d2 B2|c2 e2 d2 B2|\n");
    put(dir.path / "in" / "b.abc", "X:2\nM:4/4\nL:1/4\nK:Am\n\"Am\"A2 c2|e2 a2|\n");
    put(dir.path / "in" / "broken.abc", "K:C\nthis is not abc at all ###\n");

    PipelineConfig cfg;
    cfg.input_dir = (dir.path / "in").string();
    cfg.output_dir = (dir.path / "out").string();
    cfg.count = 6;
    cfg.seed = 99;
    cfg.jobs = 2;

    std::ostringstream log;
    const PipelineResult result = run_pipeline(cfg, log);
    CHECK(result.exit_code == 2);  // the broken file was skipped
    CHECK(result.inputs_parsed == 2);
    CHECK(result.inputs_skipped == 1);
    CHECK(result.records_written == 6);
    CHECK(log.str().find("broken.abc") != std::string::npos);

    const auto records = read_manifest(result.manifest_path);
    REQUIRE(records.size() == 6);
    for (size_t k = 0; k < records.size(); ++k) {
        const auto& rec = records[k];
        char expected_id[16];
        std::snprintf(expected_id, sizeof expected_id, "gen-%06zu", k);
        CHECK(rec.id == expected_id);
        CHECK(fs::exists(dir.path / "out" / rec.wav_path));
        CHECK(fs::exists(dir.path / "out" / rec.abc_path));
        const auto tokens = tok::parse_token_text(rec.token_text);
        auto [score, recovery] = tok::decode(tokens);
        CHECK(recovery.clean());
        CHECK(tok::encode(score) == tokens);
        // The serialized ABC parses back to the same token stream.
        const Score reparsed = abc::parse_abc(slurp(dir.path / "out" / rec.abc_path));
        CHECK(tok::encode(reparsed) == tokens);
    }

    CHECK(fs::exists(dir.path / "out" / "vocab.json"));
    CHECK(fs::exists(dir.path / "out" / "normalize_report.json"));
}

TEST_CASE("run_pipeline fails fast on an empty corpus") {
    TempDir dir("orpheus_test_pipeline_empty");
    fs::create_directories(dir.path / "in");
    PipelineConfig cfg;
    cfg.input_dir = (dir.path / "in").string();
    cfg.output_dir = (dir.path / "out").string();
    std::ostringstream log;
    CHECK_THROWS_AS(run_pipeline(cfg, log), std::runtime_error);
}

TEST_CASE("manifest records round-trip through JSONL") {
    ManifestRecord r;
    r.id = "gen-000042";
    r.wav_path = "wav/gen-000042.wav";
    r.token_text = "BOS PITCH_60 DUR_192 BAR EOS";
    r.abc_path = "abc/gen-000042.abc";
    r.duration_s = 9.264125;
    r.seed = 0xDEADBEEFCAFEull;
    CHECK(record_from_json(to_json_line(r)) == r);
}
