#include "twinbeam/protocol.hpp"

#include "twinbeam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace twinbeam {

std::string_view to_string(Decision d) noexcept {
    switch (d) {
    case Decision::Zero: return "0";
    case Decision::One: return "1";
    case Decision::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::string_view to_string(AttackKind kind) noexcept {
    switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::InterceptResend: return "intercept_resend";
    case AttackKind::BeamSplitterTap: return "beam_splitter_tap";
    }
    return "?";
}

void AttackModel::validate() const {
    if (kind == AttackKind::BeamSplitterTap) {
        if (!tap_fraction)
            throw DomainError("beam_splitter_tap requires tap_fraction");
        if (!(*tap_fraction >= 0.0 && *tap_fraction <= 1.0))
            throw DomainError("tap_fraction must lie in [0, 1]");
    } else if (tap_fraction) {
        throw DomainError("tap_fraction is only valid for beam_splitter_tap");
    }
}

void TimingConfig::validate() const {
    if (mode == TimingMode::ContinuousIntervals) {
        if (!interval_duration)
            throw DomainError("continuous_intervals requires interval_duration");
        if (!std::isfinite(*interval_duration) || !(*interval_duration > 0.0))
            throw DomainError("interval_duration must be positive");
    } else if (interval_duration) {
        throw DomainError("interval_duration is only valid for continuous_intervals");
    }
}

void SessionConfig::validate() const {
    source.validate();
    encoding.validate();
    detection.validate();
    policy.validate();
    attack.validate();
    timing.validate();
}

std::vector<AliceChoice> alice_generate(std::size_t length, RandomStream& rng) {
    if (length == 0)
        throw ProtocolError("session length must be positive");
    std::vector<AliceChoice> out(length);
    for (auto& choice : out) {
        choice.bit = rng.bit() ? 1 : 0;
        choice.basis = rng.bit() ? Basis::Diag45 : Basis::VH;
    }
    return out;
}

Decision decide(double n_sample, const DecisionPolicy& policy) {
    if (n_sample > policy.threshold)
        return Decision::One;
    if (n_sample < -policy.threshold)
        return Decision::Zero;
    return Decision::Inconclusive;
}

namespace {

Basis random_basis(RandomStream& rng) { return rng.bit() ? Basis::Diag45 : Basis::VH; }

PulseStatistics intercept_resend(const PulseRecord& pulse, const SourceModel& source, const DetectionParams& det,
                                 RandomStream& rng) {
    const Basis eve_basis = random_basis(rng);
    const double eve_sample = measure_difference(pulse, eve_basis, source, det, rng);
    const double n = std::abs(pulse.mean_diff);
    const double resent_mean = eve_sample > 0.0 ? n : -n;
    const double coherent_sigma = difference_sigma(SourceKind::Coherent, source.mean_photons_per_mode, 0.0,
                                                   det.quantum_efficiency, det.calibration_factor, true);
    return PulseStatistics{eve_basis, resent_mean, coherent_sigma, coherent_sigma};
}

PulseStatistics beam_splitter_tap(const PulseRecord& pulse, double tap, const SourceModel& source,
                                  const DetectionParams& det) {
    const double keep = 1.0 - tap;
    const double photons = source.mean_photons_per_mode * keep;
    const double eta = det.quantum_efficiency * keep;
    return PulseStatistics{
        pulse.alice_basis, pulse.mean_diff * keep,
        difference_sigma(source.kind, photons, source.correlation_db, eta, det.calibration_factor, true),
        difference_sigma(source.kind, photons, source.correlation_db, eta, det.calibration_factor, false)};
}

} // namespace

PulseStatistics apply_attack(const PulseRecord& pulse, const AttackModel& attack, const SourceModel& source,
                             const DetectionParams& det, RandomStream& rng) {
    attack.validate();
    switch (attack.kind) {
    case AttackKind::None: return channel_statistics(pulse, source, det);
    case AttackKind::InterceptResend: return intercept_resend(pulse, source, det, rng);
    case AttackKind::BeamSplitterTap: return beam_splitter_tap(pulse, *attack.tap_fraction, source, det);
    }
    throw DomainError("unknown attack kind");
}

namespace {

void run_block(std::size_t block, std::size_t length, std::uint64_t master, const SessionConfig& config,
               SessionTranscript& out) {
    const std::size_t begin = block * kSessionBlockSize;
    const std::size_t end = std::min(length, begin + kSessionBlockSize);
    RandomStream rng(derive_seed(master, block));
    const auto choices = alice_generate(end - begin, rng);
    for (std::size_t i = begin; i < end; ++i) {
        const auto& choice = choices[i - begin];
        const PulseRecord pulse = encode_pulse(choice.bit, choice.basis, config.encoding, config.source);
        const PulseStatistics stats = apply_attack(pulse, config.attack, config.source, config.detection, rng);
        const Basis bob_basis = random_basis(rng);
        const double n = sample_difference(stats, bob_basis, rng);

        MeasurementRecord m;
        m.index = i;
        m.bob_basis = bob_basis;
        m.n_sample = n;
        m.decision = decide(n, config.policy);
        if (config.timing.mode == TimingMode::ContinuousIntervals)
            m.interval_start = static_cast<double>(i) * *config.timing.interval_duration;

        out.pulses[i] = pulse;
        out.measurements[i] = m;
    }
}

} // namespace

SessionTranscript run_session(std::size_t length, const SessionConfig& config, RandomStream& rng,
                              unsigned threads) {
    if (length == 0)
        throw ProtocolError("session length must be positive");
    config.validate();

    const std::uint64_t master = rng.next_u64();
    SessionTranscript out;
    out.pulses.resize(length);
    out.measurements.resize(length);

    const std::size_t blocks = (length + kSessionBlockSize - 1) / kSessionBlockSize;
    const std::size_t lanes = std::clamp<std::size_t>(threads, 1, blocks);
    if (lanes == 1) {
        for (std::size_t b = 0; b < blocks; ++b)
            run_block(b, length, master, config, out);
        return out;
    }

    // Lanes write disjoint index ranges of the preallocated transcript.
    std::vector<std::jthread> workers;
    workers.reserve(lanes);
    for (std::size_t lane = 0; lane < lanes; ++lane) {
        workers.emplace_back([&, lane] {
            for (std::size_t b = lane; b < blocks; b += lanes)
                run_block(b, length, master, config, out);
        });
    }
    return out;
}

namespace {

template <class AliceSeq, class BasisOf, class BitOf>
SiftedKey sift_impl(const AliceSeq& alice, const std::vector<MeasurementRecord>& bob, BasisOf basis_of,
                    BitOf bit_of) {
    if (alice.size() != bob.size())
        throw ProtocolError("transcript length mismatch: alice " + std::to_string(alice.size()) + ", bob " +
                            std::to_string(bob.size()));
    SiftedKey key;
    for (std::size_t i = 0; i < alice.size(); ++i) {
        if (basis_of(alice[i]) != bob[i].bob_basis)
            continue;
        key.positions.push_back(i);
        key.alice_bits.push_back(bit_of(alice[i]));
        key.bob_decisions.push_back(bob[i].decision);
        if (bob[i].decision == Decision::Inconclusive)
            ++key.inconclusive_count;
    }
    return key;
}

} // namespace

SiftedKey sift(const std::vector<AliceChoice>& alice, const std::vector<MeasurementRecord>& bob) {
    return sift_impl(alice, bob, [](const AliceChoice& c) { return c.basis; },
                     [](const AliceChoice& c) { return c.bit; });
}

SiftedKey sift(const std::vector<PulseRecord>& alice, const std::vector<MeasurementRecord>& bob) {
    return sift_impl(alice, bob, [](const PulseRecord& p) { return p.alice_basis; },
                     [](const PulseRecord& p) { return p.alice_bit; });
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z) {
    if (n == 0)
        return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

BerEstimate estimate_ber(const SiftedKey& sifted) {
    BerEstimate est;
    est.sifted = sifted.positions.size();
    for (std::size_t i = 0; i < sifted.bob_decisions.size(); ++i) {
        const Decision d = sifted.bob_decisions[i];
        if (d == Decision::Inconclusive)
            continue;
        ++est.conclusive;
        const int bob_bit = d == Decision::One ? 1 : 0;
        if (bob_bit != sifted.alice_bits[i])
            ++est.errors;
    }
    if (est.conclusive == 0)
        throw InsufficientDataError("no conclusive decisions among " + std::to_string(est.sifted) +
                                    " sifted symbols");
    est.ber = static_cast<double>(est.errors) / static_cast<double>(est.conclusive);
    est.postselection_rate = static_cast<double>(est.conclusive) / static_cast<double>(est.sifted);
    est.wilson_interval = wilson_interval(est.errors, est.conclusive);
    return est;
}

} // namespace twinbeam
