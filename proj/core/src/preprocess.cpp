#include "powerloc/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace powerloc {

void PreprocessConfig::validate() const {
    if (!(ma_window_s >= 0.0)) {
        throw std::invalid_argument("preprocess: ma_window_s must be >= 0");
    }
    if (downsample_factor < 1) {
        throw std::invalid_argument("preprocess: downsample_factor must be >= 1");
    }
    if (percentile && !(*percentile >= 0.0 && *percentile <= 1.0)) {
        throw std::invalid_argument("preprocess: percentile must be in [0, 1]");
    }
    if (truncate_peaks && !(peak_z_cutoff > 0.0)) {
        throw std::invalid_argument("preprocess: peak_z_cutoff must be > 0");
    }
}

PowerTrace moving_average(const PowerTrace& trace, double window_s) {
    if (!(window_s >= 0.0)) {
        throw std::invalid_argument("moving_average: negative window");
    }
    const auto width = static_cast<std::size_t>(std::llround(window_s / trace.sample_period));
    const std::size_t half = width / 2;
    if (half == 0) {
        return trace;
    }
    const auto& x = trace.samples;
    const std::size_t n = x.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + x[i];
    }
    PowerTrace out = trace;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        out.samples[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    }
    return out;
}

PowerTrace downsample(const PowerTrace& trace, int factor) {
    if (factor < 1) {
        throw std::invalid_argument("downsample: factor must be >= 1");
    }
    if (factor == 1) {
        return trace;
    }
    const auto f = static_cast<std::size_t>(factor);
    const std::size_t n = trace.samples.size();
    const std::size_t m = (n + f - 1) / f;
    PowerTrace out;
    out.sample_period = trace.sample_period * factor;
    out.meta = trace.meta;
    out.samples.resize(m);
    if (trace.ground_truth) {
        out.ground_truth.emplace(m);
    }
    for (std::size_t b = 0; b < m; ++b) {
        const std::size_t lo = b * f;
        const std::size_t hi = std::min(n, lo + f);
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            sum += trace.samples[i];
        }
        out.samples[b] = sum / static_cast<double>(hi - lo);
        if (trace.ground_truth) {
            (*out.ground_truth)[b] = (*trace.ground_truth)[hi - 1];
        }
    }
    return out;
}

Moments moments(std::span<const double> values) {
    Moments m;
    if (values.empty()) {
        return m;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    m.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - m.mean) * (v - m.mean);
    }
    m.stddev = std::sqrt(ss / static_cast<double>(values.size()));
    return m;
}

bool znormalize_in_place(std::span<double> values) {
    const auto m = moments(values);
    // Relative guard so that float noise on a constant input still counts as constant.
    if (!(m.stddev > 1e-12 * std::max(1.0, std::abs(m.mean)))) {
        std::fill(values.begin(), values.end(), 0.0);
        return false;
    }
    for (double& v : values) {
        v = (v - m.mean) / m.stddev;
    }
    return true;
}

double nearest_rank_quantile(std::span<const double> values, double pct) {
    if (values.empty()) {
        throw std::invalid_argument("quantile of an empty sample");
    }
    std::vector<double> sorted(values.begin(), values.end());
    const auto n = sorted.size();
    auto rank = static_cast<std::size_t>(std::floor(pct * static_cast<double>(n) + 1e-9));
    rank = std::min(rank, n - 1);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank), sorted.end());
    return sorted[rank];
}

void percentile_threshold_in_place(std::span<double> values, double pct) {
    if (!(pct >= 0.0 && pct <= 1.0)) {
        throw std::invalid_argument("percentile_threshold: pct must be in [0, 1]");
    }
    if (values.empty() || pct == 0.0) {
        return;
    }
    const double q = nearest_rank_quantile(values, pct);
    for (double& v : values) {
        if (v < q) {
            v = 0.0;
        }
    }
}

PowerTrace znormalize(const PowerTrace& trace) {
    if (trace.samples.empty()) {
        throw std::invalid_argument("znormalize: empty trace");
    }
    PowerTrace out = trace;
    if (!znormalize_in_place(out.samples)) {
        out.meta["warning"] = "constant_input";
    }
    return out;
}

PowerTrace percentile_threshold(const PowerTrace& trace, double pct) {
    PowerTrace out = trace;
    percentile_threshold_in_place(out.samples, pct);
    return out;
}

PowerTrace truncate_peaks(const PowerTrace& trace, double z_cutoff) {
    if (!(z_cutoff > 0.0)) {
        throw std::invalid_argument("truncate_peaks: z_cutoff must be > 0");
    }
    const auto m = moments(trace.samples);
    if (!(m.stddev > 0.0)) {
        return trace;
    }
    const double lo = m.mean - z_cutoff * m.stddev;
    const double hi = m.mean + z_cutoff * m.stddev;
    PowerTrace out = trace;
    for (double& v : out.samples) {
        v = std::clamp(v, lo, hi);
    }
    return out;
}

PowerTrace preprocess(const PowerTrace& trace, const PreprocessConfig& cfg) {
    cfg.validate();
    PowerTrace out = moving_average(trace, cfg.ma_window_s);
    out = downsample(out, cfg.downsample_factor);
    if (cfg.truncate_peaks) {
        out = truncate_peaks(out, cfg.peak_z_cutoff);
    }
    if (cfg.znormalize) {
        out = znormalize(out);
    }
    if (cfg.percentile) {
        out = percentile_threshold(out, *cfg.percentile);
    }
    return out;
}

}  // namespace powerloc
