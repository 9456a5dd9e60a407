#include "twinbeam/analysis.hpp"

#include "twinbeam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace twinbeam {

std::vector<double> Histogram::frequencies() const {
    std::vector<double> f(counts.size(), 0.0);
    if (total_samples == 0)
        return f;
    for (std::size_t i = 0; i < counts.size(); ++i)
        f[i] = static_cast<double>(counts[i]) / static_cast<double>(total_samples);
    return f;
}

Histogram build_histogram(std::span<const double> samples, std::size_t bins, double lo, double hi) {
    if (samples.empty())
        throw InsufficientDataError("histogram of an empty sample set");
    if (bins < 2)
        throw DomainError("histogram needs at least 2 bins, got " + std::to_string(bins));
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
        throw DomainError("histogram range must be finite with hi > lo");

    Histogram h;
    h.bin_width = (hi - lo) / static_cast<double>(bins);
    h.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        h.bin_edges[i] = lo + static_cast<double>(i) * h.bin_width;
    h.bin_edges[bins] = hi;
    h.counts.assign(bins, 0);
    h.total_samples = samples.size();

    for (const double x : samples) {
        if (x < lo) {
            ++h.underflow;
        } else if (x > hi) {
            ++h.overflow;
        } else {
            auto idx = static_cast<std::size_t>((x - lo) / h.bin_width);
            ++h.counts[std::min(idx, bins - 1)];
        }
    }
    return h;
}

Histogram build_histogram(std::span<const double> samples, std::size_t bins) {
    if (samples.empty())
        throw InsufficientDataError("histogram of an empty sample set");
    const auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
    double lo = *min_it;
    double hi = *max_it;
    if (!(hi > lo)) {
        lo -= 1.0;
        hi += 1.0;
    }
    return build_histogram(samples, bins, lo, hi);
}

MomentEstimate fit_gaussian(std::span<const double> samples) {
    if (samples.size() < 2)
        throw InsufficientDataError("need at least 2 samples, got " + std::to_string(samples.size()));
    double sum = 0.0;
    for (const double x : samples)
        sum += x;
    const double n = static_cast<double>(samples.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (const double x : samples)
        ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0)), samples.size()};
}

namespace {

// E|n| / sqrt(E n^2) for the symmetric mixture with t = <n>/delta.
double folded_ratio(double t) {
    const double m1 = std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * t * t) +
                      t * (1.0 - erfc(t / std::numbers::sqrt2));
    return m1 / std::sqrt(1.0 + t * t);
}

constexpr double kMaxSeparation = 30.0;

} // namespace

FitResult fit_scale(const Histogram& hist, const GaussianModel& model) {
    const auto freq = hist.frequencies();
    std::vector<double> pdf(hist.bins());
    double fp = 0.0;
    double pp = 0.0;
    for (std::size_t i = 0; i < hist.bins(); ++i) {
        pdf[i] = mixture_pdf(hist.center(i), model);
        fp += freq[i] * pdf[i];
        pp += pdf[i] * pdf[i];
    }
    FitResult fit;
    fit.mean_hat = model.mean_diff;
    fit.sigma_hat = model.sigma;
    fit.scale_coefficient = pp > 0.0 ? fp / pp : 0.0;
    double rss = 0.0;
    for (std::size_t i = 0; i < hist.bins(); ++i) {
        const double r = freq[i] - fit.scale_coefficient * pdf[i];
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / static_cast<double>(hist.bins()));
    return fit;
}

FitResult fit_gaussian_mixture(std::span<const double> samples, std::size_t bins) {
    if (samples.size() < kMinFitSamples)
        throw InsufficientDataError("mixture fit needs at least " + std::to_string(kMinFitSamples) +
                                    " samples, got " + std::to_string(samples.size()));
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (const double x : samples) {
        abs_sum += std::abs(x);
        sq_sum += x * x;
    }
    const double n = static_cast<double>(samples.size());
    const double m1 = abs_sum / n;
    const double m2 = sq_sum / n;
    if (!(m2 > 0.0))
        throw InsufficientDataError("samples have no spread");

    const double ratio = m1 / std::sqrt(m2);
    double t = 0.0;
    if (ratio >= folded_ratio(kMaxSeparation))
        throw InsufficientDataError("sample spread too small to separate the mixture");
    if (ratio > folded_ratio(0.0)) {
        double lo = 0.0;
        double hi = kMaxSeparation;
        for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
            const double mid = 0.5 * (lo + hi);
            (folded_ratio(mid) < ratio ? lo : hi) = mid;
        }
        t = 0.5 * (lo + hi);
    }
    const double sigma = std::sqrt(m2 / (1.0 + t * t));
    const GaussianModel model{t * sigma, sigma};
    return fit_scale(build_histogram(samples, bins), model);
}

SweepTable sweep(std::vector<double> thresholds, std::vector<double> mean_diffs, double sigma) {
    if (thresholds.empty() || mean_diffs.empty())
        throw DomainError("sweep grids must be non-empty");
    for (const double n : mean_diffs)
        if (!std::isfinite(n) || n < 0.0)
            throw DomainError("sweep mean differences must be non-negative");
    std::sort(thresholds.begin(), thresholds.end());
    std::sort(mean_diffs.begin(), mean_diffs.end());

    SweepTable table;
    table.rows.reserve(thresholds.size() * mean_diffs.size());
    for (const double n0 : thresholds) {
        const DecisionPolicy policy{n0};
        for (const double n : mean_diffs) {
            const GaussianModel model{n, sigma};
            table.rows.push_back({n0, n, sigma, postselection_efficiency(policy, model), ber(policy, model), false});
        }
    }

    for (auto& row : table.rows) {
        row.pareto = std::none_of(table.rows.begin(), table.rows.end(), [&](const SweepRow& other) {
            return other.efficiency >= row.efficiency && other.ber <= row.ber &&
                   (other.efficiency > row.efficiency || other.ber < row.ber);
        });
    }
    return table;
}

std::vector<Table1Row> reproduce_table1(const SourceModel& twin, const EncodingParams& enc,
                                        const DetectionParams& det, std::uint64_t seed, std::size_t samples) {
    twin.validate();
    const SourceModel coherent{SourceKind::Coherent, twin.mean_photons_per_mode, 0.0};

    std::vector<Table1Row> rows;
    std::uint64_t condition = 0;
    for (const SourceModel* source : {&twin, &coherent}) {
        for (const bool match : {true, false}) {
            for (const int key : {1, 0}) {
                RandomStream rng(derive_seed(seed, condition++));
                const PulseRecord pulse = encode_pulse(key, Basis::VH, enc, *source);
                const Basis bob = match ? Basis::VH : Basis::Diag45;
                std::vector<double> draws(samples);
                for (auto& x : draws)
                    x = measure_difference(pulse, bob, *source, det, rng);
                const MomentEstimate est = fit_gaussian(draws);
                rows.push_back({source->kind, match, key, est.mean, est.sigma, samples});
            }
        }
    }
    return rows;
}

} // namespace twinbeam
