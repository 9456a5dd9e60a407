#pragma once

#include "twinbeam/random.hpp"

#include <string_view>

namespace twinbeam {

enum class SourceKind { TwinBeam, Coherent };

enum class Basis { VH, Diag45 };

std::string_view to_string(SourceKind kind) noexcept;
std::string_view to_string(Basis basis) noexcept;

/// Statistical description of the light source.
///
/// `correlation_db` is the photon-number-difference noise of the source
/// relative to the shot-noise limit. It is negative for twin beams and
/// exactly zero for coherent light.
struct SourceModel {
    SourceKind kind = SourceKind::TwinBeam;
    double mean_photons_per_mode = 4.0e4;
    double correlation_db = -5.5;

    void validate() const;
};

/// Single-arm attenuator that writes the bit. N = fraction * <n1>.
struct EncodingParams {
    double attenuation_fraction = 0.005;

    void validate() const;
    double mean_diff(const SourceModel& source) const { return attenuation_fraction * source.mean_photons_per_mode; }
};

/// Detector side. `calibration_factor` scales every measured standard
/// deviation to account for the unpublished gain calibration of the
/// balanced detector (270/283 reproduces the measured coherent noise).
struct DetectionParams {
    double quantum_efficiency = 1.0;
    double calibration_factor = 1.0;

    void validate() const;
};

/// One transmitted symbol.
struct PulseRecord {
    int alice_bit = 0;
    Basis alice_basis = Basis::VH;
    double mean_diff = 0.0; ///< +N for bit 1, -N for bit 0
};

/// What Bob's detector sees for one pulse: a mean difference prepared in
/// `prepared_basis`, plus the noise in a matching or mismatching basis.
/// Measuring in the other basis mixes the modes at 45 degrees, which
/// erases the mean.
struct PulseStatistics {
    Basis prepared_basis = Basis::VH;
    double mean_diff = 0.0;
    double sigma_match = 1.0;
    double sigma_mismatch = 1.0;
};

/// Coherent-state standard deviation of the photoelectron difference,
/// sqrt(2 <n1>), before detector calibration.
double shot_noise_sigma(const SourceModel& source);

/// Standard deviation seen by Bob.
///
/// A twin-beam source measured in the correct basis keeps the variance
/// ratio r_meas = 1 - eta (1 - r_source), r_source = 10^(dB/10); any other
/// case sits at the (calibrated) shot-noise level.
double effective_sigma(const SourceModel& source, bool basis_match, const DetectionParams& det);

/// Same as effective_sigma on raw values, allowing zero power and zero
/// efficiency. Used by attack models that drain the channel.
double difference_sigma(SourceKind kind, double mean_photons_per_mode, double correlation_db,
                        double efficiency, double calibration_factor, bool basis_match);

PulseRecord encode_pulse(int bit, Basis basis, const EncodingParams& enc, const SourceModel& source);

/// Statistics of an undisturbed pulse.
PulseStatistics channel_statistics(const PulseRecord& pulse, const SourceModel& source,
                                   const DetectionParams& det);

/// Draws n ~ Normal(mu, sigma). sigma = 0 returns mu exactly.
double sample_difference(double mu, double sigma, RandomStream& rng);

/// Draws Bob's measurement of `stats` in `bob_basis`.
double sample_difference(const PulseStatistics& stats, Basis bob_basis, RandomStream& rng);

/// Bob's measurement of an undisturbed pulse.
double measure_difference(const PulseRecord& pulse, Basis bob_basis, const SourceModel& source,
                          const DetectionParams& det, RandomStream& rng);

} // namespace twinbeam
