#pragma once

#include <cstdint>
#include <random>

namespace twinbeam {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of sub-stream `lane` under `master`.
///
/// Split rule: seed = splitmix64(master + (lane + 1) * 0x9E3779B97F4A7C15).
/// Sub-streams are keyed by a fixed work-unit index (not by thread), so a
/// result never depends on how many threads processed it.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t lane) noexcept;

/// Seeded deterministic random stream owned by one execution lane.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard.
/// Uniform and normal variates are built from raw 64-bit draws here rather
/// than through <random> distributions so that the values are identical
/// across standard library implementations.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Fair coin.
    bool bit() { return (engine_() >> 63) != 0; }

    /// Standard normal variate (Box-Muller, one output per call).
    double normal();

    /// Independent child stream for work unit `lane`.
    RandomStream split(std::uint64_t lane) { return RandomStream(derive_seed(engine_(), lane)); }

  private:
    std::mt19937_64 engine_;
};

} // namespace twinbeam
