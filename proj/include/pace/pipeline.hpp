#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pace/checkpoint.hpp"
#include "pace/club.hpp"
#include "pace/codec.hpp"
#include "pace/config.hpp"
#include "pace/dataset.hpp"
#include "pace/losses.hpp"
#include "pace/prosody.hpp"
#include "pace/wav.hpp"

namespace pace {

// Training runs in single precision; gradient verification elsewhere uses
// doubles.
using TrainScalar = float;

enum class Variant { full, no_mi, no_scale, no_recon_e };

Variant parse_variant(const std::string& name);
const char* variant_name(Variant v);
std::vector<Variant> all_variants();

// Everything derived from one 2 s clip, computed once and reused every epoch
// (clips are exactly one segment long, so features never depend on the crop).
struct TrainItem {
    AudioClip clip;
    ProsodyFeatures prosody;
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> e_ref;  // (L/320, D)
    std::string name;
    int timbre = -1;
    int contour = -1;
    std::vector<double> true_f0;
    std::vector<int> true_uv;
};

struct Dataset {
    std::vector<TrainItem> train, test;
    std::vector<std::pair<int, int>> pairs;  // (target, prompt) indices into test
    bool targets_filled = false;
};

// Synthetic corpus by default; a non-empty data.wav_dir ingests real WAVs.
Dataset build_dataset(const Config& cfg);

// Locations of every artifact a run produces.
struct OutPaths {
    std::string dir;

    explicit OutPaths(std::string d) : dir(std::move(d)) {}
    std::string reference() const { return dir + "/reference.pack"; }
    std::string reference_log() const { return dir + "/logs/reference.csv"; }
    std::string stage(Variant v, int s) const {
        return dir + "/" + variant_name(v) + "_stage" + std::to_string(s) + ".pack";
    }
    std::string stage_log(Variant v, int s) const {
        return dir + "/logs/" + std::string(variant_name(v)) + "_stage" + std::to_string(s) + ".csv";
    }
    std::string report() const { return dir + "/report.csv"; }
    std::string corpus_dir() const { return dir + "/corpus"; }
    std::string lock() const { return dir + "/.lock"; }
};

void ensure_dirs(const OutPaths& paths);

// Quantizer state lives outside the autodiff graph, so it gets its own glue.
void rvq_to_checkpoint(const Rvq<TrainScalar>& q, const std::string& prefix, Checkpoint& c);
void rvq_from_checkpoint(Rvq<TrainScalar>& q, const std::string& prefix, const Checkpoint& c);

// ---- reference codec ----

struct ReferenceState {
    CodecDims dims;
    ReferenceCodec<TrainScalar> codec;
    Rng rng;
    std::int64_t step = 0;

    ReferenceState() = default;
    ReferenceState(const Config& cfg, Rng rng_) : dims(cfg.dims()), codec(dims, rng_), rng(rng_) {}
};

Checkpoint reference_checkpoint(const ReferenceState& st);
ReferenceState reference_from_checkpoint(const Checkpoint& c, const Config& cfg);

// Trains the plain codec, writes its checkpoint and per-step CSV log, and
// returns the frozen result.
ReferenceState train_reference(const Config& cfg, Dataset& ds);

// Computes the frozen e^c target for every item (train and test).
void fill_reference_targets(Dataset& ds, const ReferenceState& ref);

// Loads the frozen reference or raises a dependency error naming it.
ReferenceState load_reference(const Config& cfg);

// ---- the prosody-aware model ----

struct PaceState {
    CodecDims dims;
    Variant variant = Variant::full;
    PaceModel<TrainScalar> model;
    ClubEstimator<TrainScalar> f0_est, uv_est;
    Discriminator<TrainScalar> disc;
    Rng rng;
    std::int32_t stage = 0;  // highest completed stage
    std::int64_t step = 0;
    std::uint64_t ref_fingerprint = 0;
};

PaceState init_pace(const Config& cfg, Variant v, std::uint64_t ref_fingerprint);
Checkpoint pace_checkpoint(const PaceState& st);
PaceState pace_from_checkpoint(const Checkpoint& c, const Config& cfg, Variant v);

// Runs one training stage: loads the prerequisite checkpoint from disk (a
// dependency error names the missing piece), trains, writes the stage
// checkpoint and CSV log. Stage plans per variant:
//   full, no_scale: 1 -> 2 -> 3
//   no_mi:          1 -> 3 (stage 2 is the disentanglement stage)
//   no_recon_e:     3 only (stages 1-2 have no objective without the
//                   embedding reconstruction)
void train_stage(const Config& cfg, Dataset& ds, Variant v, int stage);

// Refits fresh estimator heads on a held-out batch drawn with `seed` and
// returns the two bounds; used to compare checkpoints on equal footing.
struct MiProbe {
    double f0_bound = 0.0;
    double uv_bound = 0.0;
    double total() const { return f0_bound + uv_bound; }
};
MiProbe measure_mi(const PaceModel<TrainScalar>& model, const std::vector<TrainItem>& items,
                   const Config& cfg, std::uint64_t seed, int fit_passes = 60);

// Re-encodes the target with prosody features taken from the prompt, then
// decodes the resulting codes. Features are trimmed or padded (as unvoiced
// frames) to the target's frame count. Requires a stage-3 state.
AudioClip prosody_swap_inference(const PaceState& st, const AudioClip& target,
                                 const AudioClip& prosody_prompt);

// Codes path used by the codes subcommand: encode with the clip's own
// prosody, or decode an arbitrary code sequence.
std::vector<std::int64_t> encode_codes(const PaceState& st, const AudioClip& clip);
AudioClip decode_codes(const PaceState& st, const std::vector<std::int64_t>& codes);

}  // namespace pace
