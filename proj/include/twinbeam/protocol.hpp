#pragma once

#include "twinbeam/channel.hpp"
#include "twinbeam/random.hpp"
#include "twinbeam/stats.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace twinbeam {

enum class Decision { Zero, One, Inconclusive };

std::string_view to_string(Decision d) noexcept;

struct AliceChoice {
    int bit = 0;
    Basis basis = Basis::VH;
};

struct MeasurementRecord {
    std::size_t index = 0;
    Basis bob_basis = Basis::VH;
    double n_sample = 0.0;
    Decision decision = Decision::Inconclusive;
    /// Start of the agreed time interval t_k (continuous mode only).
    std::optional<double> interval_start;
};

struct SiftedKey {
    std::vector<std::size_t> positions;
    std::vector<int> alice_bits;
    std::vector<Decision> bob_decisions;
    std::size_t inconclusive_count = 0;
};

enum class AttackKind { None, InterceptResend, BeamSplitterTap };

std::string_view to_string(AttackKind kind) noexcept;

struct AttackModel {
    AttackKind kind = AttackKind::None;
    std::optional<double> tap_fraction; ///< BeamSplitterTap only, in [0, 1]

    void validate() const;
};

enum class TimingMode { Pulse, ContinuousIntervals };

struct TimingConfig {
    TimingMode mode = TimingMode::Pulse;
    std::optional<double> interval_duration; ///< seconds, ContinuousIntervals only

    void validate() const;
};

/// Everything a session needs besides the random stream.
struct SessionConfig {
    SourceModel source;
    EncodingParams encoding;
    DetectionParams detection;
    DecisionPolicy policy;
    AttackModel attack;
    TimingConfig timing;

    void validate() const;
};

struct SessionTranscript {
    std::vector<PulseRecord> pulses;
    std::vector<MeasurementRecord> measurements;
};

struct BerEstimate {
    double ber = 0.0;
    double postselection_rate = 0.0;
    std::pair<double, double> wilson_interval; ///< 95% interval on ber
    std::size_t errors = 0;
    std::size_t conclusive = 0;
    std::size_t sifted = 0;
};

/// Pulses per work unit of a sharded session. Each unit draws from its own
/// stream, derive_seed(master, unit index).
inline constexpr std::size_t kSessionBlockSize = 4096;

/// Uniform random bits and bases. Throws ProtocolError for length 0.
std::vector<AliceChoice> alice_generate(std::size_t length, RandomStream& rng);

/// One if n > N0, Zero if n < -N0, otherwise Inconclusive.
Decision decide(double n_sample, const DecisionPolicy& policy);

/// What reaches Bob after Eve acts on `pulse`.
///
/// InterceptResend: Eve guesses a basis, measures, and re-sends a coherent
/// pulse carrying her inferred bit in her basis. BeamSplitterTap: Eve
/// removes a fraction t of the light; the power, the encoded difference and
/// the effective detection efficiency all scale by (1 - t).
PulseStatistics apply_attack(const PulseRecord& pulse, const AttackModel& attack, const SourceModel& source,
                             const DetectionParams& det, RandomStream& rng);

/// Runs `length` symbols. The master seed is one draw from `rng`; the index
/// range is cut into kSessionBlockSize units executed over `threads` lanes.
/// Output is identical for any thread count.
SessionTranscript run_session(std::size_t length, const SessionConfig& config, RandomStream& rng,
                              unsigned threads = 1);

/// Keeps the indices where Bob's basis equals Alice's.
SiftedKey sift(const std::vector<AliceChoice>& alice, const std::vector<MeasurementRecord>& bob);
SiftedKey sift(const std::vector<PulseRecord>& alice, const std::vector<MeasurementRecord>& bob);

/// 95% Wilson score interval for k successes in n trials.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

/// Empirical BER over conclusive sifted decisions.
/// Throws InsufficientDataError when nothing is conclusive.
BerEstimate estimate_ber(const SiftedKey& sifted);

} // namespace twinbeam
