#pragma once

#include "powerloc/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace powerloc {

/// Signal conditioning applied before any distance computation. The stages
/// run in a fixed order: moving average, downsample, peak truncation,
/// z-normalization, percentile threshold. Disabled stages are skipped.
struct PreprocessConfig {
    double ma_window_s = 5.0;
    int downsample_factor = 10;
    bool truncate_peaks = false;
    double peak_z_cutoff = 3.0;
    bool znormalize = true;
    std::optional<double> percentile;

    void validate() const;
};

/// Centered moving average over round(window / period) samples, truncated at
/// the trace ends. A zero window is the identity.
[[nodiscard]] PowerTrace moving_average(const PowerTrace& trace, double window_s);

/// Block means of `factor` samples; the last block may be short. Ground truth
/// keeps each block's last coordinate.
[[nodiscard]] PowerTrace downsample(const PowerTrace& trace, int factor);

/// Zero mean, unit population standard deviation. A constant input maps to
/// all zeros and gets meta["warning"] = "constant_input".
[[nodiscard]] PowerTrace znormalize(const PowerTrace& trace);

/// Zeroes samples strictly below the pct-quantile. The quantile is the
/// element of rank floor(pct * n) (0-based, clamped) in the sorted sample.
[[nodiscard]] PowerTrace percentile_threshold(const PowerTrace& trace, double pct);

/// Clips samples whose |z-score| exceeds z_cutoff to mean +/- z_cutoff * std.
[[nodiscard]] PowerTrace truncate_peaks(const PowerTrace& trace, double z_cutoff);

/// Runs the configured stages in order.
[[nodiscard]] PowerTrace preprocess(const PowerTrace& trace, const PreprocessConfig& cfg);

// In-place kernels used by the hot loops (trace slices in the particle filter).
struct Moments {
    double mean = 0.0;
    double stddev = 0.0;  // population
};
[[nodiscard]] Moments moments(std::span<const double> values);
/// Returns false when the input was constant (and has been zeroed).
bool znormalize_in_place(std::span<double> values);
void percentile_threshold_in_place(std::span<double> values, double pct);
[[nodiscard]] double nearest_rank_quantile(std::span<const double> values, double pct);

}  // namespace powerloc
