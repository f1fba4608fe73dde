#pragma once

#include <Eigen/Dense>
#include <string>

#include "orpheus/synth.hpp"

namespace orpheus::signal {

struct MelParams {
    int n_fft = 400;          // 25 ms at 16 kHz
    int hop = 160;            // 10 ms
    int n_mels = 80;
    double fmin = 0.0;
    double fmax = 8000.0;
    double log_floor = 1e-10;
};

// Rows are mel bins, columns are frames.
using MelMatrix = Eigen::MatrixXf;

double hz_to_mel(double hz);   // HTK scale: 2595 log10(1 + f/700)
double mel_to_hz(double mel);

// Unit-peak triangular filterbank, n_mels x (n_fft/2 + 1).
Eigen::MatrixXd mel_filterbank(const MelParams& p, int sample_rate);

// Log-mel spectrogram with speech-frontend framing: reflective padding of
// n_fft/2 on both ends, periodic Hann window, magnitude-squared spectrum, mel
// projection, log10 with floor, then per-utterance (x - max + 8) / 4 without
// hard clipping. frames = floor(samples / hop). Requires 16 kHz input.
MelMatrix log_mel_spectrogram(const synth::AudioBuffer& a, const MelParams& p = {});

// Binary matrix file: magic "OMEL", u32 n_mels, u32 frames (little-endian),
// then row-major float32 data.
void write_mel(const std::string& path, const MelMatrix& m);
MelMatrix read_mel(const std::string& path);

}  // namespace orpheus::signal
