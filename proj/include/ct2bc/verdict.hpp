#pragma once

#include "ct2bc/bit.hpp"

#include <cstdint>
#include <string_view>

namespace ct2bc {

enum class RejectReason : std::uint8_t {
    witness_malformed = 1,
    association_fails = 2,
    scheme_mismatch = 3,
    // UNVEIL re-sent a payload that differs from the COMMITMENT frame.
    payload_mismatch = 4,
};

std::string_view to_string(RejectReason reason) noexcept;

struct Verdict {
    bool accepted = false;
    Bit bit = Bit::zero;                                  // meaningful when accepted
    RejectReason reason = RejectReason::association_fails; // meaningful when rejected

    static constexpr Verdict accept(Bit b) noexcept { return {true, b, RejectReason::association_fails}; }
    static constexpr Verdict reject(RejectReason r) noexcept { return {false, Bit::zero, r}; }

    friend bool operator==(const Verdict& a, const Verdict& b) noexcept {
        return a.accepted == b.accepted && (a.accepted ? a.bit == b.bit : a.reason == b.reason);
    }
};

} // namespace ct2bc
