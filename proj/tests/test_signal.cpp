#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "orpheus/signal.hpp"

using namespace orpheus;
using namespace orpheus::signal;

namespace {

synth::AudioBuffer tone(double hz, double seconds, double amp = 0.5) {
    synth::AudioBuffer a;
    a.sample_rate = 16000;
    const auto n = static_cast<size_t>(seconds * 16000);
    a.samples.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        a.samples.push_back(static_cast<float>(amp * std::sin(2.0 * M_PI * hz * i / 16000.0)));
    }
    return a;
}

}  // namespace

TEST_CASE("frame count is floor(samples / hop)") {
    CHECK(log_mel_spectrogram(tone(440.0, 9.0)).cols() == 900);
    CHECK(log_mel_spectrogram(tone(440.0, 9.0)).rows() == 80);

    synth::AudioBuffer a = tone(100.0, 1.0);
    a.samples.resize(16000 + 159);  // partial hop is dropped
    CHECK(log_mel_spectrogram(a).cols() == 100);

    a.samples.resize(42);
    CHECK(log_mel_spectrogram(a).cols() == 0);
}

TEST_CASE("wrong sample rate is rejected") {
    synth::AudioBuffer a;
    a.sample_rate = 22050;
    a.samples.assign(22050, 0.0f);
    CHECK_THROWS_AS(log_mel_spectrogram(a), std::invalid_argument);
}

TEST_CASE("all-zero input yields identical finite frames") {
    synth::AudioBuffer a;
    a.sample_rate = 16000;
    a.samples.assign(16000, 0.0f);
    const MelMatrix m = log_mel_spectrogram(a);
    REQUIRE(m.cols() == 100);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            CHECK(std::isfinite(m(r, c)));
            CHECK(m(r, c) == doctest::Approx(m(r, 0)));
        }
    }
}

TEST_CASE("output is finite for loud and quiet input") {
    Rng rng(4);
    synth::AudioBuffer a;
    a.sample_rate = 16000;
    for (int i = 0; i < 32000; ++i) {
        a.samples.push_back(static_cast<float>(rng.next_double() * 2.0 - 1.0));
    }
    const MelMatrix m = log_mel_spectrogram(a);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) CHECK(std::isfinite(m(r, c)));
    }
}

TEST_CASE("a 440 Hz tone peaks in the mel bin whose center is nearest 440") {
    const MelParams p;
    const Eigen::MatrixXd fb = mel_filterbank(p, 16000);
    REQUIRE(fb.rows() == 80);
    REQUIRE(fb.cols() == 201);

    // Independent center computation from the HTK formulas.
    const double mel_lo = hz_to_mel(p.fmin);
    const double mel_hi = hz_to_mel(p.fmax);
    int expected = -1;
    double best = 1e9;
    for (int j = 0; j < p.n_mels; ++j) {
        const double center = mel_to_hz(mel_lo + (mel_hi - mel_lo) * (j + 1) / (p.n_mels + 1));
        if (std::abs(center - 440.0) < best) {
            best = std::abs(center - 440.0);
            expected = j;
        }
    }

    const MelMatrix m = log_mel_spectrogram(tone(440.0, 1.0));
    const Eigen::Index mid = m.cols() / 2;
    Eigen::Index argmax = 0;
    m.col(mid).maxCoeff(&argmax);
    CHECK(argmax == expected);
}

TEST_CASE("mel filterbank triangles are unit peak and partition the band") {
    const MelParams p;
    const Eigen::MatrixXd fb = mel_filterbank(p, 16000);
    for (int j = 0; j < p.n_mels; ++j) {
        CHECK(fb.row(j).maxCoeff() <= 1.0 + 1e-9);
        CHECK(fb.row(j).maxCoeff() > 0.0);  // every filter covers some bin
    }
}

TEST_CASE("time shift by one hop shifts interior columns by one") {
    // Loud full-length tone so the per-utterance max matches between the two.
    const synth::AudioBuffer x = tone(523.25, 1.0, 0.8);
    synth::AudioBuffer shifted;
    shifted.sample_rate = 16000;
    shifted.samples.assign(160, 0.0f);
    shifted.samples.insert(shifted.samples.end(), x.samples.begin(), x.samples.end());

    const MelMatrix mx = log_mel_spectrogram(x);
    const MelMatrix my = log_mel_spectrogram(shifted);
    REQUIRE(my.cols() == mx.cols() + 1);
    // Compare interior frames (skip the reflective-padding boundary zone).
    for (Eigen::Index c = 3; c + 3 < mx.cols(); ++c) {
        for (Eigen::Index r = 0; r < mx.rows(); ++r) {
            CHECK(my(r, c + 1) == doctest::Approx(mx(r, c)).epsilon(1e-4));
        }
    }
}

TEST_CASE("mel matrix file round trip") {
    const MelMatrix m = log_mel_spectrogram(tone(440.0, 0.5));
    const std::string path = "/tmp/orpheus_test_mel.mel";
    write_mel(path, m);
    const MelMatrix back = read_mel(path);
    REQUIRE(back.rows() == m.rows());
    REQUIRE(back.cols() == m.cols());
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0f);
}
