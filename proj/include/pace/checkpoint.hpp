#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pace/error.hpp"
#include "pace/tensor.hpp"

namespace pace {

// One named parameter blob: a shape plus row-major doubles.
struct Blob {
    std::vector<std::int64_t> shape;
    std::vector<double> data;

    std::int64_t size() const {
        std::int64_t n = 1;
        for (auto d : shape) n *= d;
        return n;
    }
};

// Versioned binary container: magic "PACK", version, stage tag, step count,
// the generator state as text, a fingerprint of the reference encoder the run
// depends on, and named parameter blobs. A trailing hash guards truncation.
struct Checkpoint {
    std::uint32_t version = 1;
    std::int32_t stage = 0;  // 0 reference codec, 1..3 training stages
    std::int64_t step = 0;
    std::uint64_t ref_fingerprint = 0;
    std::string rng_state;
    std::map<std::string, Blob> blobs;

    template <typename S>
    void put(const std::string& name, const Tensor<S>& t) {
        Blob b;
        b.shape = t.shape();
        b.data.resize(static_cast<std::size_t>(t.size()));
        for (std::int64_t i = 0; i < t.size(); ++i)
            b.data[static_cast<std::size_t>(i)] = static_cast<double>(t.values()[i]);
        blobs[name] = std::move(b);
    }

    template <typename S>
    void get(const std::string& name, Tensor<S>& t) const {
        auto it = blobs.find(name);
        if (it == blobs.end()) throw FormatError("checkpoint is missing blob '" + name + "'");
        const Blob& b = it->second;
        if (b.shape != t.shape())
            throw FormatError("blob '" + name + "' has shape " + shape_str(b.shape) +
                              ", expected " + shape_str(t.shape()));
        for (std::int64_t i = 0; i < t.size(); ++i)
            t.values()[i] = static_cast<S>(b.data[static_cast<std::size_t>(i)]);
    }

    void put_raw(const std::string& name, std::vector<std::int64_t> shape, std::vector<double> data);
    const Blob& get_raw(const std::string& name) const;
    bool has(const std::string& name) const { return blobs.count(name) != 0; }
};

// Order- and content-sensitive hash over every blob (names, shapes, values);
// used for the reference-encoder fingerprint and immutability checks.
std::uint64_t params_fingerprint(const Checkpoint& c);

void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);

// Discrete code stream: little-endian "PACE" header (version, frames, stages)
// followed by frames x stages u16 entries, frame-major.
struct CodesFile {
    std::int64_t frames = 0;
    std::int64_t stages = 0;
    std::vector<std::int64_t> codes;  // frame-major, frames * stages
};

void save_codes(const std::string& path, const std::vector<std::int64_t>& codes,
                std::int64_t stages);
CodesFile load_codes(const std::string& path);

}  // namespace pace
