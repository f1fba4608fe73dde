#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "orpheus/signal.hpp"

namespace orpheus::signal {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;
constexpr std::uint32_t kMelMagic = 0x4C454D4F;  // "OMEL"

void check_params(const MelParams& p, int sample_rate) {
    if (p.n_fft <= 1 || p.hop <= 0 || p.hop > p.n_fft || p.n_mels <= 0) {
        throw std::invalid_argument("mel: invalid framing parameters");
    }
    if (p.fmin < 0.0 || p.fmax <= p.fmin || p.fmax > sample_rate / 2.0) {
        throw std::invalid_argument("mel: fmax must lie in (fmin, sample_rate/2]");
    }
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Eigen::MatrixXd mel_filterbank(const MelParams& p, int sample_rate) {
    check_params(p, sample_rate);
    const int bins = p.n_fft / 2 + 1;
    Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(p.n_mels, bins);

    const double mel_lo = hz_to_mel(p.fmin);
    const double mel_hi = hz_to_mel(p.fmax);
    std::vector<double> edges(static_cast<size_t>(p.n_mels) + 2);
    for (int i = 0; i < p.n_mels + 2; ++i) {
        edges[static_cast<size_t>(i)] =
            mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (p.n_mels + 1));
    }
    for (int j = 0; j < p.n_mels; ++j) {
        const double lower = edges[static_cast<size_t>(j)];
        const double center = edges[static_cast<size_t>(j) + 1];
        const double upper = edges[static_cast<size_t>(j) + 2];
        for (int k = 0; k < bins; ++k) {
            const double f = static_cast<double>(k) * sample_rate / p.n_fft;
            double w = 0.0;
            if (f >= lower && f <= center && center > lower) {
                w = (f - lower) / (center - lower);
            } else if (f > center && f <= upper && upper > center) {
                w = (upper - f) / (upper - center);
            }
            fb(j, k) = w;
        }
    }
    return fb;
}

MelMatrix log_mel_spectrogram(const synth::AudioBuffer& a, const MelParams& p) {
    if (a.sample_rate != 16000) {
        throw std::invalid_argument("log_mel_spectrogram: expected 16 kHz input, got " +
                                    std::to_string(a.sample_rate) + " Hz");
    }
    check_params(p, a.sample_rate);

    const long len = static_cast<long>(a.samples.size());
    const long frames = len / p.hop;
    if (frames == 0) return MelMatrix(p.n_mels, 0);

    const int bins = p.n_fft / 2 + 1;

    // Windowed frames with reflective padding of n_fft/2 around each center.
    Eigen::MatrixXd framed(p.n_fft, frames);
    std::vector<double> window(static_cast<size_t>(p.n_fft));
    for (int j = 0; j < p.n_fft; ++j) {
        window[static_cast<size_t>(j)] = 0.5 - 0.5 * std::cos(kTwoPi * j / p.n_fft);
    }
    for (long t = 0; t < frames; ++t) {
        const long center = t * p.hop;
        for (int j = 0; j < p.n_fft; ++j) {
            long idx = center - p.n_fft / 2 + j;
            while (idx < 0 || idx >= len) {
                idx = idx < 0 ? -idx : 2 * (len - 1) - idx;
            }
            framed(j, t) = static_cast<double>(a.samples[static_cast<size_t>(idx)]) *
                           window[static_cast<size_t>(j)];
        }
    }

    // One-sided DFT as two dense products.
    Eigen::MatrixXd dft_cos(bins, p.n_fft);
    Eigen::MatrixXd dft_sin(bins, p.n_fft);
    for (int k = 0; k < bins; ++k) {
        for (int j = 0; j < p.n_fft; ++j) {
            const double phase = kTwoPi * k * j / p.n_fft;
            dft_cos(k, j) = std::cos(phase);
            dft_sin(k, j) = -std::sin(phase);
        }
    }
    const Eigen::MatrixXd re = dft_cos * framed;
    const Eigen::MatrixXd im = dft_sin * framed;
    const Eigen::MatrixXd power = re.array().square() + im.array().square();

    Eigen::MatrixXd mel = mel_filterbank(p, a.sample_rate) * power;
    Eigen::ArrayXXd logmel =
        mel.array().max(p.log_floor).log10();
    const double peak = logmel.maxCoeff();
    logmel = (logmel - peak + 8.0) / 4.0;
    return logmel.cast<float>().matrix();
}

void write_mel(const std::string& path, const MelMatrix& m) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    const std::uint32_t header[3] = {kMelMagic, static_cast<std::uint32_t>(m.rows()),
                                     static_cast<std::uint32_t>(m.cols())};
    f.write(reinterpret_cast<const char*>(header), sizeof header);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const float v = m(r, c);
            f.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

MelMatrix read_mel(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::uint32_t header[3];
    f.read(reinterpret_cast<char*>(header), sizeof header);
    if (!f || header[0] != kMelMagic) throw std::runtime_error("not a mel matrix file: " + path);
    MelMatrix m(header[1], header[2]);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            float v;
            f.read(reinterpret_cast<char*>(&v), sizeof v);
            m(r, c) = v;
        }
    }
    if (!f) throw std::runtime_error("truncated mel matrix file: " + path);
    return m;
}

}  // namespace orpheus::signal
