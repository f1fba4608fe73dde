#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "orpheus/metrics.hpp"

namespace orpheus::metrics {

namespace {

struct EditCounts {
    long s = 0, d = 0, i = 0;
};

EditCounts align(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
    const size_t m = ref.size();
    const size_t n = hyp.size();
    std::vector<std::vector<int>> dist(m + 1, std::vector<int>(n + 1, 0));
    for (size_t i = 0; i <= m; ++i) dist[i][0] = static_cast<int>(i);
    for (size_t j = 0; j <= n; ++j) dist[0][j] = static_cast<int>(j);
    for (size_t i = 1; i <= m; ++i) {
        for (size_t j = 1; j <= n; ++j) {
            if (ref[i - 1] == hyp[j - 1]) {
                dist[i][j] = dist[i - 1][j - 1];
            } else {
                dist[i][j] = 1 + std::min({dist[i - 1][j - 1], dist[i - 1][j], dist[i][j - 1]});
            }
        }
    }

    // Traceback, matches first, then substitutions (so no minimal alignment
    // trades one substitution for an insert+delete pair).
    EditCounts counts;
    size_t i = m, j = n;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && dist[i][j] == dist[i - 1][j - 1]) {
            --i;
            --j;
        } else if (i > 0 && j > 0 && dist[i][j] == dist[i - 1][j - 1] + 1) {
            ++counts.s;
            --i;
            --j;
        } else if (i > 0 && dist[i][j] == dist[i - 1][j] + 1) {
            ++counts.d;
            --i;
        } else {
            ++counts.i;
            --j;
        }
    }
    return counts;
}

}  // namespace

std::string WerResult::to_json() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "{\"wer\":%.6f,\"S\":%ld,\"D\":%ld,\"I\":%ld,\"N\":%ld}", rate,
                  substitutions, deletions, insertions, ref_len);
    return buf;
}

WerResult wer(const std::vector<std::string>& reference,
              const std::vector<std::string>& hypothesis) {
    if (reference.empty()) {
        throw std::invalid_argument("wer: empty reference leaves the rate undefined");
    }
    const EditCounts c = align(reference, hypothesis);
    WerResult r;
    r.substitutions = c.s;
    r.deletions = c.d;
    r.insertions = c.i;
    r.ref_len = static_cast<long>(reference.size());
    r.rate = static_cast<double>(r.distance()) / static_cast<double>(r.ref_len);
    return r;
}

WerResult wer_corpus(
    const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& pairs) {
    if (pairs.empty()) throw std::invalid_argument("wer_corpus: no pairs");
    WerResult total;
    for (const auto& [ref, hyp] : pairs) {
        const EditCounts c = align(ref, hyp);
        total.substitutions += c.s;
        total.deletions += c.d;
        total.insertions += c.i;
        total.ref_len += static_cast<long>(ref.size());
    }
    if (total.ref_len == 0) {
        throw std::invalid_argument("wer_corpus: all references are empty");
    }
    total.rate = static_cast<double>(total.distance()) / static_cast<double>(total.ref_len);
    return total;
}

std::optional<std::string> band_note(double rate) {
    if (rate >= 0.30 && rate <= 0.50) return std::nullopt;
    char buf[96];
    std::snprintf(buf, sizeof buf, "corpus WER %.4f is outside the typical 0.30-0.50 band", rate);
    return std::string(buf);
}

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

}  // namespace orpheus::metrics
