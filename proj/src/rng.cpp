#include "ct2bc/rng.hpp"

#include "ct2bc/errors.hpp"

#include <openssl/rand.h>

#include <limits>

namespace ct2bc {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Rng Rng::from_os_entropy() { return Rng(OsTag{}); }

std::uint64_t Rng::next_u64() {
    if (!os_entropy_) {
        return engine_();
    }
    std::uint64_t v = 0;
    if (RAND_bytes(reinterpret_cast<unsigned char*>(&v), sizeof v) != 1) {
        throw Error("OS entropy source failed");
    }
    return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
    if (bound == 0) {
        throw ParameterError("uniform bound must be positive");
    }
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
        const std::uint64_t v = next_u64();
        if (v < limit) {
            return v % bound;
        }
    }
}

void Rng::fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t v = next_u64();
        for (int k = 0; k < 8 && i < out.size(); ++k, ++i) {
            out[i] = static_cast<std::uint8_t>(v >> (56 - 8 * k));
        }
    }
}

} // namespace ct2bc
