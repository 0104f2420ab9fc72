#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pace/rng.hpp"

namespace pace {

inline constexpr int kSampleRate = 24000;
inline constexpr std::int64_t kSegmentLen = 48000;  // 2 s at 24 kHz

// Mono waveform; the unit of every encode/decode operation.
struct AudioClip {
    std::vector<float> samples;
    int sample_rate = kSampleRate;
};

// AudioClip plus where it came from.
struct IngestedClip {
    AudioClip clip;
    std::string source;
    int original_rate = 0;
    std::int64_t crop_offset = 0;
};

// RIFF PCM reader: 8/16/24-bit integer or 32-bit float, mono or multichannel
// (channels averaged). Throws FormatError on anything else.
AudioClip read_wav(const std::string& path);

// 16-bit PCM mono writer; samples clamped to [-1, 1] at export only.
void write_wav(const std::string& path, const std::vector<float>& samples, int sample_rate);

// Windowed-sinc (Kaiser, 64 taps) arbitrary-ratio resampler.
std::vector<float> resample(const std::vector<float>& x, int sr_in, int sr_out);

// Full ingestion: read, average to mono, resample to 24 kHz, random 2 s crop
// (seeded) or zero-pad to 2 s, peak-normalize to 0.95.
IngestedClip ingest_wav(const std::string& path, Rng& rng, std::int64_t segment_len = kSegmentLen);

// Same pipeline applied to an in-memory waveform (used by the synthetic corpus).
AudioClip ingest_samples(std::vector<float> samples, int sr_in, Rng& rng,
                         std::int64_t segment_len = kSegmentLen);

}  // namespace pace
