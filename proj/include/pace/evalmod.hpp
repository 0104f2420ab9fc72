#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pace/pipeline.hpp"

namespace pace {

// Normalized pitch-contour distance. Each contour is restricted to its voiced
// frames and z-scored against its own voiced mean and population std. Two
// contours of equal frame count are compared on the frames voiced in both;
// otherwise the shorter voiced sequence is linearly resampled to the longer
// one's length. Returns the root-mean-square difference. A contour with no
// voiced frames (or an empty voicing intersection) has no defined distance and
// raises a contract error.
double f0_scaled_distance(const std::vector<double>& f0_a, const std::vector<int>& uv_a,
                          const std::vector<double>& f0_b, const std::vector<int>& uv_b);

inline double f0_scaled_distance(const ProsodyFeatures& a, const ProsodyFeatures& b) {
    return f0_scaled_distance(a.raw_f0_hz, a.uv, b.raw_f0_hz, b.uv);
}

// The two evaluation scenarios: prosody carried over from the clip being
// converted, or taken from the paired prompt.
enum class Scenario { source, target_prompt };
const char* scenario_name(Scenario s);

struct ReportRow {
    std::string variant;
    std::string prosody_source;  // "source" or "target-prompt"
    double mean_distance = 0.0;
    int pair_count = 0;
};

struct ProsodyReport {
    std::vector<ReportRow> rows;
};

// Converts every pair under every given model and measures the distance
// between each output's contour and the contour it was asked to follow.
ProsodyReport prosody_transfer_report(
    const std::vector<std::pair<Variant, const PaceState*>>& models,
    const std::vector<TrainItem>& testset, const std::vector<std::pair<int, int>>& pairs,
    const std::vector<Scenario>& scenarios = {Scenario::source, Scenario::target_prompt});

// CSV with a leading comment block quoting the published full-scale numbers;
// those are annotations only and are never reproduced at this scale.
std::string report_csv(const ProsodyReport& r);
void write_report(const std::string& path, const ProsodyReport& r);

// Two-column gnuplot dumps (frame index, z-scored f0 on voiced frames) for
// overlaying an output contour against its prompt.
void dump_contour(const std::string& path, const ProsodyFeatures& f);

}  // namespace pace
