#pragma once

#include "ct2bc/bit.hpp"

#include <cstdint>
#include <random>
#include <span>

namespace ct2bc {

// splitmix64 finaliser over (seed, stream); used to give every party, role and
// harness trial its own independent generator from a single seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Session-owned randomness. Deterministic generators wrap mt19937_64 (whose
/// output sequence is fixed by the standard); from_os_entropy() draws from the
/// OpenSSL CSPRNG instead. Never shared between sessions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng from_os_entropy();

    std::uint64_t next_u64();
    Bit bit() { return static_cast<Bit>(next_u64() >> 63); }

    // Uniform in [0, bound) by rejection sampling; bound must be positive.
    std::uint64_t uniform(std::uint64_t bound);

    void fill(std::span<std::uint8_t> out);

    bool deterministic() const noexcept { return !os_entropy_; }

private:
    struct OsTag {};
    explicit Rng(OsTag) : os_entropy_(true) {}

    std::mt19937_64 engine_;
    bool os_entropy_ = false;
};

} // namespace ct2bc
