#include "twinbeam/channel.hpp"

#include "twinbeam/errors.hpp"
#include "twinbeam/stats.hpp"

#include <cmath>
#include <string>

namespace twinbeam {

std::string_view to_string(SourceKind kind) noexcept {
    return kind == SourceKind::TwinBeam ? "twin_beam" : "coherent";
}

std::string_view to_string(Basis basis) noexcept {
    return basis == Basis::VH ? "vh" : "diag45";
}

void SourceModel::validate() const {
    if (!std::isfinite(mean_photons_per_mode) || !(mean_photons_per_mode > 0.0))
        throw DomainError("mean_photons_per_mode must be positive");
    if (!std::isfinite(correlation_db))
        throw DomainError("correlation_db must be finite");
    if (kind == SourceKind::Coherent && correlation_db != 0.0)
        throw DomainError("coherent source requires correlation_db = 0");
    if (kind == SourceKind::TwinBeam && !(correlation_db < 0.0))
        throw DomainError("twin-beam source requires correlation_db < 0");
}

void EncodingParams::validate() const {
    if (!(attenuation_fraction >= 0.0 && attenuation_fraction <= 0.01))
        throw DomainError("attenuation_fraction must lie in [0, 0.01]");
}

void DetectionParams::validate() const {
    if (!(quantum_efficiency > 0.0 && quantum_efficiency <= 1.0))
        throw DomainError("quantum_efficiency must lie in (0, 1]");
    if (!std::isfinite(calibration_factor) || !(calibration_factor > 0.0))
        throw DomainError("calibration_factor must be positive");
}

double shot_noise_sigma(const SourceModel& source) {
    source.validate();
    return std::sqrt(2.0 * source.mean_photons_per_mode);
}

double difference_sigma(SourceKind kind, double mean_photons_per_mode, double correlation_db,
                        double efficiency, double calibration_factor, bool basis_match) {
    const double snl = std::sqrt(2.0 * mean_photons_per_mode) * calibration_factor;
    if (kind == SourceKind::Coherent || !basis_match)
        return snl;
    const double r_source = variance_ratio_from_db(correlation_db);
    const double r_meas = 1.0 - efficiency * (1.0 - r_source);
    return snl * std::sqrt(r_meas);
}

double effective_sigma(const SourceModel& source, bool basis_match, const DetectionParams& det) {
    source.validate();
    det.validate();
    return difference_sigma(source.kind, source.mean_photons_per_mode, source.correlation_db,
                            det.quantum_efficiency, det.calibration_factor, basis_match);
}

PulseRecord encode_pulse(int bit, Basis basis, const EncodingParams& enc, const SourceModel& source) {
    if (bit != 0 && bit != 1)
        throw DomainError("bit must be 0 or 1, got " + std::to_string(bit));
    enc.validate();
    source.validate();
    const double n = enc.mean_diff(source);
    return PulseRecord{bit, basis, bit == 1 ? n : -n};
}

PulseStatistics channel_statistics(const PulseRecord& pulse, const SourceModel& source,
                                   const DetectionParams& det) {
    return PulseStatistics{pulse.alice_basis, pulse.mean_diff, effective_sigma(source, true, det),
                           effective_sigma(source, false, det)};
}

double sample_difference(double mu, double sigma, RandomStream& rng) {
    if (sigma == 0.0)
        return mu;
    return mu + sigma * rng.normal();
}

double sample_difference(const PulseStatistics& stats, Basis bob_basis, RandomStream& rng) {
    const bool match = bob_basis == stats.prepared_basis;
    return sample_difference(match ? stats.mean_diff : 0.0, match ? stats.sigma_match : stats.sigma_mismatch,
                             rng);
}

double measure_difference(const PulseRecord& pulse, Basis bob_basis, const SourceModel& source,
                          const DetectionParams& det, RandomStream& rng) {
    return sample_difference(channel_statistics(pulse, source, det), bob_basis, rng);
}

} // namespace twinbeam
