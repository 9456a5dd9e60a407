#pragma once

// Closed-form statistics of the photoelectron-difference channel.
//
// A measurement n in the correct basis is modeled as a symmetric,
// equal-weight mixture of two Gaussians centered on +<n> and -<n>:
//
//   p(n) = 1/2 N(n; +<n>, delta) + 1/2 N(n; -<n>, delta)
//
// Bob keeps only samples with |n| > N0. The fraction kept is the
// postselection efficiency, and the fraction of kept samples whose sign
// disagrees with the encoded bit is the bit error rate.

namespace twinbeam {

/// Photoelectron-difference distribution for one (source, basis) condition.
struct GaussianModel {
    double mean_diff = 0.0; ///< encoded mean difference <n>, photoelectrons
    double sigma = 1.0;     ///< standard deviation delta, photoelectrons

    /// Throws DomainError unless sigma > 0 and both fields are finite.
    void validate() const;
};

/// Bob's postselection threshold N0 >= 0.
struct DecisionPolicy {
    double threshold = 0.0;

    void validate() const;
};

/// Complementary error function, absolute error well below 1e-7.
///
/// Power series for |z| < 3, Lentz continued fraction beyond. Negative
/// arguments use erfc(z) = 2 - erfc(-z). Throws DomainError for NaN/inf.
double erfc(double z);

/// Standard normal density scaled to N(x; mean, sigma).
double normal_pdf(double x, double mean, double sigma);

/// Equal-weight two-component mixture density, integrates to 1.
double mixture_pdf(double n, const GaussianModel& model);

/// Probability that a correct-basis sample satisfies |n| > N0.
double postselection_efficiency(const DecisionPolicy& policy, const GaussianModel& model);

/// Error probability among conclusive correct-basis decisions.
/// Throws DegeneratePolicyError when the efficiency underflows to zero.
double ber(const DecisionPolicy& policy, const GaussianModel& model);

/// Noise level of `sigma_a` relative to `sigma_b` in dB: 10 log10(a^2 / b^2).
double db_from_sigma_ratio(double sigma_a, double sigma_b);

/// Variance ratio corresponding to a dB figure: 10^(db / 10).
double variance_ratio_from_db(double db);

} // namespace twinbeam
