#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pace/rng.hpp"
#include "pace/wav.hpp"

namespace pace {

// Synthetic harmonic corpus: a deterministic desk-scale stand-in for a speech
// dataset. Each clip is an additive-harmonic tone following a piecewise-linear
// f0 contour, with optional unvoiced gaps and a white-noise floor.

struct SyntheticSpec {
    std::string name;
    // (time_s, hz) control points, nondecreasing in time. Empty = unvoiced clip.
    std::vector<std::pair<double, double>> f0_points;
    // Timbre fingerprint: amplitude of harmonics 1..8 before normalization.
    std::array<double, 8> harmonic_amplitudes{};
    double duration = 2.0;
    double noise_floor = 0.0;
    // Half-open [start_s, end_s) spans where harmonics are muted (unvoiced).
    std::vector<std::pair<double, double>> gaps;
    int timbre = -1;
    int contour = -1;
};

struct SyntheticClip {
    AudioClip clip;
    std::vector<double> true_f0;  // per frame at hop 40, 0 where unvoiced
    std::vector<int> true_uv;     // 1 = voiced
    std::string name;
    int timbre = -1;
    int contour = -1;
};

// Piecewise-linear interpolation of the contour; clamps outside the first and
// last control point. Returns 0 for an empty contour.
double contour_hz_at(const SyntheticSpec& spec, double t);

// Phase-accumulation synthesis. Harmonic part is normalized to peak 0.9, then
// noise_floor * N(0,1) is added per sample. Deterministic in (spec, seed).
// Throws ConfigError if a control point leaves [50, 1000] Hz or an amplitude
// is negative.
SyntheticClip synthesize_clip(const SyntheticSpec& spec, std::uint64_t seed);

// Per-clip seeds are derived from the clip name, so the result is independent
// of spec order.
std::vector<SyntheticClip> generate_synthetic_dataset(const std::vector<SyntheticSpec>& specs,
                                                      std::uint64_t seed);

struct Corpus {
    std::vector<SyntheticClip> train;
    std::vector<SyntheticClip> test;
    // (target, prompt) index pairs into test; the two clips always carry
    // distinct contours.
    std::vector<std::pair<int, int>> heldout_pairs;
};

// Deterministic timbre fingerprints and contour shapes; valid for
// timbre in [0, 12) and contour in [0, 20).
std::array<double, 8> timbre_fingerprint(int timbre);
std::vector<std::pair<double, double>> contour_points(int contour);
SyntheticSpec corpus_spec(int timbre, int contour);

// Grid corpus: the last sixth of the timbres crossed with the last two fifths
// of the contours form the test split; the remaining timbres crossed with the
// remaining contours form the train split. For the standard 12 x 20 grid this
// yields 120 train clips (timbres 0..9 x contours 0..11) and 16 test clips
// (timbres 10..11 x contours 12..19) plus n_pairs held-out pairs.
Corpus build_corpus(int n_timbres, int n_contours, int n_pairs, std::uint64_t seed);

}  // namespace pace
