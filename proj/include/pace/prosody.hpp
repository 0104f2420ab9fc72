#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pace/nn.hpp"
#include "pace/tensor.hpp"
#include "pace/wav.hpp"

namespace pace {

inline constexpr std::int64_t kHop = 40;           // frame shift at 24 kHz
inline constexpr std::int64_t kFrameRatio = 320;   // clip length granularity
inline constexpr std::int64_t kF0Bins = 256;
inline constexpr std::int64_t kProsodyDim = 256;
inline constexpr double kF0Floor = 50.0;
inline constexpr double kF0Ceil = 1000.0;

// Per-frame pitch and voicing at hop 40; bins quantize f0 per utterance.
struct ProsodyFeatures {
    std::vector<double> raw_f0_hz;  // 0 on unvoiced frames
    std::vector<int> uv;            // 1 voiced, 0 unvoiced
    std::vector<int> f0_bins;       // 0..255, 0 on unvoiced frames

    std::int64_t frames() const { return static_cast<std::int64_t>(uv.size()); }
};

// YIN-style tracker: cumulative-mean-normalized difference over a 1024-sample
// window centered on each hop (edges zero-padded), voicing threshold 0.2,
// parabolic interpolation of the lag minimum. Returns (raw_f0_hz, uv).
std::pair<std::vector<double>, std::vector<int>> extract_f0(const AudioClip& clip);

// Per-utterance min-max over voiced frames; bin = min(floor(norm * 256), 255).
// Unvoiced frames and zero-range utterances land on bin 0.
std::vector<int> quantize_f0(const std::vector<double>& raw_f0_hz, const std::vector<int>& uv);

ProsodyFeatures extract_prosody(const AudioClip& clip);

// CSV rows: frame_index, raw_f0_hz, f0_bin, uv.
std::string prosody_csv(const ProsodyFeatures& f);

// e_f0 = f0_table[f0_bins], e_uv = uv_table[uv]; both (frames, 256).
template <typename S>
std::pair<Tensor<S>, Tensor<S>> embed_prosody(const EmbeddingTable<S>& f0_table,
                                              const EmbeddingTable<S>& uv_table,
                                              const ProsodyFeatures& f) {
    std::vector<std::int64_t> f0_idx(f.f0_bins.begin(), f.f0_bins.end());
    std::vector<std::int64_t> uv_idx(f.uv.begin(), f.uv.end());
    return {f0_table.forward(f0_idx), uv_table.forward(uv_idx)};
}

}  // namespace pace
