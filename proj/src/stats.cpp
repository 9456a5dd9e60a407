#include "twinbeam/stats.hpp"

#include "twinbeam/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace twinbeam {

namespace {

constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;
constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Switch point between the series and the continued fraction. The series
// loses about log10(exp(z^2)) digits to cancellation, ~4 at z = 3.
constexpr double kSeriesLimit = 3.0;

double erf_series(double z) {
    const double z2 = z * z;
    double term = z; // z^(2k+1) (-1)^k / k!
    double sum = z;
    for (int k = 1; k < 200; ++k) {
        term *= -z2 / k;
        const double contrib = term / (2 * k + 1);
        sum += contrib;
        if (std::abs(contrib) < 1e-17 * std::abs(sum))
            break;
    }
    return 2.0 * kInvSqrtPi * sum;
}

// erfc(z) = exp(-z^2)/sqrt(pi) / (z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))), z > 0.
double erfc_continued_fraction(double z) {
    constexpr double tiny = 1e-300;
    double f = z;
    double c = f;
    double d = 0.0;
    for (int k = 1; k < 500; ++k) {
        const double a = 0.5 * k;
        d = z + a * d;
        if (d == 0.0)
            d = tiny;
        d = 1.0 / d;
        c = z + a / c;
        if (c == 0.0)
            c = tiny;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16)
            break;
    }
    return std::exp(-z * z) * kInvSqrtPi / f;
}

double erfc_nonnegative(double z) {
    if (z < kSeriesLimit)
        return 1.0 - erf_series(z);
    return erfc_continued_fraction(z);
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw DomainError(std::string(what) + " must be finite");
}

} // namespace

void GaussianModel::validate() const {
    require_finite(mean_diff, "mean_diff");
    require_finite(sigma, "sigma");
    if (!(sigma > 0.0))
        throw DomainError("sigma must be positive, got " + std::to_string(sigma));
}

void DecisionPolicy::validate() const {
    require_finite(threshold, "threshold");
    if (threshold < 0.0)
        throw DomainError("threshold must be non-negative, got " + std::to_string(threshold));
}

double erfc(double z) {
    require_finite(z, "erfc argument");
    if (z >= 0.0)
        return erfc_nonnegative(z);
    return 2.0 - erfc_nonnegative(-z);
}

double normal_pdf(double x, double mean, double sigma) {
    const double u = (x - mean) / sigma;
    return kInvSqrtPi * kInvSqrt2 / sigma * std::exp(-0.5 * u * u);
}

double mixture_pdf(double n, const GaussianModel& model) {
    model.validate();
    return 0.5 * (normal_pdf(n, model.mean_diff, model.sigma) +
                  normal_pdf(n, -model.mean_diff, model.sigma));
}

double postselection_efficiency(const DecisionPolicy& policy, const GaussianModel& model) {
    policy.validate();
    model.validate();
    const double scale = kInvSqrt2 / model.sigma;
    const double n0 = policy.threshold;
    const double mu = model.mean_diff;
    return 0.5 * (erfc(scale * (n0 - mu)) + erfc(scale * (n0 + mu)));
}

double ber(const DecisionPolicy& policy, const GaussianModel& model) {
    const double efficiency = postselection_efficiency(policy, model);
    if (!(efficiency > 0.0))
        throw DegeneratePolicyError("postselection efficiency is zero at threshold " +
                                    std::to_string(policy.threshold));
    const double tail = erfc(kInvSqrt2 / model.sigma * (policy.threshold + model.mean_diff));
    return tail / (2.0 * efficiency);
}

double db_from_sigma_ratio(double sigma_a, double sigma_b) {
    require_finite(sigma_a, "sigma_a");
    require_finite(sigma_b, "sigma_b");
    if (!(sigma_a > 0.0) || !(sigma_b > 0.0))
        throw DomainError("sigma ratio requires positive standard deviations");
    const double ratio = sigma_a / sigma_b;
    return 10.0 * std::log10(ratio * ratio);
}

double variance_ratio_from_db(double db) {
    require_finite(db, "decibel value");
    return std::pow(10.0, db / 10.0);
}

} // namespace twinbeam
