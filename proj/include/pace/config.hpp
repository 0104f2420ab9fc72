#pragma once

#include <cstdint>
#include <string>

#include "pace/codec.hpp"
#include "pace/losses.hpp"

namespace pace {

struct DataConfig {
    std::string wav_dir;  // empty: synthesize the harmonic corpus instead
    int n_timbres = 12;
    int n_contours = 20;
    int n_pairs = 20;
};

struct ModelConfig {
    std::string size = "toy";  // "toy" or "full"
    bool use_scale_layer = true;
};

struct TrainConfig {
    int batch_size = 1;
    int reference_steps = 2000;
    int stage1_steps = 3000;
    int stage2_steps = 1000;
    int stage3_steps = 2000;
    double lr_stage12 = 3e-4;
    double lr_stage3 = 1e-4;
    double lr_estimator = 1e-4;
    int estimator_updates = 5;  // q-head fits per encoder step
    int mi_frames = 64;         // frames sampled per clip for the MI batch
    double lambda_mi = 0.01;
    double lambda_recon_e = 10.0;
    double lambda_adv = 1.0;
    double lambda_feat = 2.0;
    double lambda_rec = 1.0;
    double commit_weight = 0.25;  // commitment term inside the audio loss
    double time_weight = 25.0;    // time-domain MSE term inside the audio loss
    int log_every = 10;
};

struct EvalConfig {
    bool dump_contours = false;
};

struct Config {
    std::uint64_t seed = 1234;
    std::string out_dir = "out";
    DataConfig data;
    ModelConfig model;
    TrainConfig train;
    EvalConfig eval;

    CodecDims dims() const;
    template <typename S>
    LossWeights<S> weights() const {
        LossWeights<S> w;
        w.lambda_mi = static_cast<S>(train.lambda_mi);
        w.lambda_recon_e = static_cast<S>(train.lambda_recon_e);
        w.lambda_adv = static_cast<S>(train.lambda_adv);
        w.lambda_feat = static_cast<S>(train.lambda_feat);
        w.lambda_rec = static_cast<S>(train.lambda_rec);
        return w;
    }
    void validate() const;
};

// Strict parse: unknown keys anywhere in the document are rejected, so typos
// cannot silently fall back to defaults.
Config parse_config(const std::string& text);
Config load_config_file(const std::string& path);

// Resolution order: explicit path, then $PACE_CONFIG, then built-in defaults.
Config resolve_config(const std::string& cli_path);

}  // namespace pace
