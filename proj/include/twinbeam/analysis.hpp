#pragma once

#include "twinbeam/channel.hpp"
#include "twinbeam/protocol.hpp"
#include "twinbeam/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace twinbeam {

/// Equal-width histogram. Samples outside [lo, hi] land in underflow or
/// overflow; the last bin is closed on the right.
struct Histogram {
    std::vector<double> bin_edges; ///< bins + 1 entries
    std::vector<std::uint64_t> counts;
    double bin_width = 0.0;
    std::uint64_t total_samples = 0;
    std::uint64_t underflow = 0;
    std::uint64_t overflow = 0;

    std::size_t bins() const noexcept { return counts.size(); }
    double center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
    /// counts[i] / total_samples
    std::vector<double> frequencies() const;
};

struct FitResult {
    double mean_hat = 0.0;          ///< |<n>| of the symmetric mixture
    double sigma_hat = 0.0;         ///< delta
    double scale_coefficient = 0.0; ///< histogram frequency ~ scale * p(bin center)
    double residual = 0.0;          ///< RMS of frequency - scale * p
};

/// Single-Gaussian moment estimate (mean, sample standard deviation).
struct MomentEstimate {
    double mean = 0.0;
    double sigma = 0.0;
    std::size_t count = 0;
};

struct SweepRow {
    double threshold = 0.0; ///< N0
    double mean_diff = 0.0; ///< N
    double sigma = 0.0;
    double efficiency = 0.0;
    double ber = 0.0;
    bool pareto = false; ///< no other row has both higher efficiency and lower BER
};

struct SweepTable {
    std::vector<SweepRow> rows;
};

struct Table1Row {
    SourceKind source = SourceKind::TwinBeam;
    bool basis_match = true;
    int key = 1;
    double mean = 0.0;
    double sigma = 0.0;
    std::size_t samples = 0;
};

inline constexpr std::size_t kDefaultBins = 100;
inline constexpr std::size_t kTable1Samples = 100000;
inline constexpr std::size_t kMinFitSamples = 100;

/// Bins span [min, max] of the samples; a zero range is widened to +-1.
Histogram build_histogram(std::span<const double> samples, std::size_t bins);

/// Bins span the given range; samples outside it are counted separately.
Histogram build_histogram(std::span<const double> samples, std::size_t bins, double lo, double hi);

MomentEstimate fit_gaussian(std::span<const double> samples);

/// Moment fit of the symmetric equal-weight mixture.
///
/// With m1 = E|n| and m2 = E[n^2], the folded-normal identity
///   m1 = delta sqrt(2/pi) exp(-t^2/2) + <n> erf(t/sqrt 2),  t = <n>/delta
/// together with m2 = <n>^2 + delta^2 fixes t through the ratio
/// m1/sqrt(m2), which is monotone in t. A ratio below the t = 0 value
/// collapses the fit to a single centered Gaussian.
///
/// The scale coefficient is the least-squares factor between the binned
/// frequencies and mixture_pdf at the bin centers.
FitResult fit_gaussian_mixture(std::span<const double> samples, std::size_t bins = kDefaultBins);

/// Least-squares scale between a histogram and a model density.
FitResult fit_scale(const Histogram& hist, const GaussianModel& model);

/// Analytic efficiency and BER over the (N0, N) grid, sorted by (N0, N).
SweepTable sweep(std::vector<double> thresholds, std::vector<double> mean_diffs, double sigma);

/// Per-condition statistics table: every (source, basis match, key) condition, `samples` draws
/// each. The twin rows use `twin`, the coherent rows a coherent source at
/// the same power. Condition c draws from derive_seed(seed, c).
std::vector<Table1Row> reproduce_table1(const SourceModel& twin, const EncodingParams& enc,
                                        const DetectionParams& det, std::uint64_t seed,
                                        std::size_t samples = kTable1Samples);

} // namespace twinbeam
