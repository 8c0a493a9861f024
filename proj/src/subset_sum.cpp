#include "ct2bc/subset_sum.hpp"

#include "ct2bc/attack.hpp"
#include "ct2bc/errors.hpp"
#include "ct2bc/rng.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <utility>

namespace ct2bc {

KnapsackInstance::KnapsackInstance(std::uint32_t m, std::vector<std::uint64_t> elements)
    : m_(m), elements_(std::move(elements)) {
    if (m < 1 || m > kMaxSubsetSumM) {
        throw ParameterError("knapsack size m must lie in [1, " + std::to_string(kMaxSubsetSumM) + "]");
    }
    if (elements_.size() != m) {
        throw ParameterError("knapsack of size " + std::to_string(m) + " given " + std::to_string(elements_.size()) +
                             " elements");
    }
    const std::uint64_t limit = std::uint64_t{1} << m;
    for (std::uint64_t e : elements_) {
        if (e < 1 || e >= limit) {
            throw ParameterError("knapsack element " + std::to_string(e) + " outside [1, 2^" + std::to_string(m) +
                                 ")");
        }
    }
}

double KnapsackInstance::density() const {
    int widest = 0;
    for (std::uint64_t e : elements_) {
        widest = std::max(widest, static_cast<int>(std::bit_width(e)));
    }
    return widest == 0 ? 0.0 : static_cast<double>(m_) / widest;
}

namespace subset_sum {

std::uint64_t payload_bound(std::uint32_t m) {
    if (m < 1 || m > kMaxSubsetSumM) {
        throw ParameterError("knapsack size out of range");
    }
    return static_cast<std::uint64_t>(m) << m;
}

std::uint64_t decode_element(std::span<const Bit> bits) {
    std::uint64_t v = 0;
    for (Bit b : bits) {
        v = (v << 1) | to_uint(b);
    }
    return v;
}

bool is_well_formed(const SelectionBits& x, std::uint32_t m) {
    return x.x.size() == m && std::any_of(x.x.begin(), x.x.end(), [](Bit b) { return b == Bit::one; });
}

std::uint64_t selected_sum(const KnapsackInstance& c, const SelectionBits& x) {
    std::uint64_t d = 0;
    for (std::size_t i = 0; i < x.x.size() && i < c.size(); ++i) {
        if (x.x[i] == Bit::one) {
            d += c[i];
        }
    }
    return d;
}

CommitOutput commit(const KnapsackInstance& c_a, Rng& rng) {
    SelectionBits x;
    x.x.resize(c_a.size());
    do {
        for (Bit& b : x.x) {
            b = rng.bit();
        }
    } while (!is_well_formed(x, c_a.size()));
    const SumPayload payload{selected_sum(c_a, x)};
    return {payload, std::move(x)};
}

Verdict verify(const KnapsackInstance& c_claimed, const SumPayload& payload, const SelectionBits& witness,
               Bit claimed) {
    if (!is_well_formed(witness, c_claimed.size())) {
        return Verdict::reject(RejectReason::witness_malformed);
    }
    if (selected_sum(c_claimed, witness) != payload.value) {
        return Verdict::reject(RejectReason::association_fails);
    }
    return Verdict::accept(claimed);
}

SelectionBits from_mask(std::uint64_t mask, std::uint32_t m) {
    SelectionBits x;
    x.x.resize(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        x.x[i] = static_cast<Bit>((mask >> i) & 1u);
    }
    return x;
}

std::uint64_t to_mask(const SelectionBits& x) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < x.x.size(); ++i) {
        if (x.x[i] == Bit::one) {
            mask |= std::uint64_t{1} << i;
        }
    }
    return mask;
}

// Each entry extends the mask without its lowest set bit.
std::vector<std::uint64_t> all_subset_sums(std::span<const std::uint64_t> elements) {
    std::vector<std::uint64_t> sums(std::size_t{1} << elements.size(), 0);
    for (std::size_t mask = 1; mask < sums.size(); ++mask) {
        sums[mask] = sums[mask & (mask - 1)] + elements[std::countr_zero(mask)];
    }
    return sums;
}

namespace {

std::vector<SelectionBits> to_sorted_selections(const std::vector<std::uint64_t>& masks, std::uint32_t m) {
    std::vector<SelectionBits> out;
    out.reserve(masks.size());
    for (std::uint64_t mask : masks) {
        out.push_back(from_mask(mask, m));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

std::vector<SelectionBits> find_all_representations_plain(std::uint64_t d, const KnapsackInstance& c) {
    if (c.size() > attack::kMaxPlainSubsetSumM) {
        throw ResourceGuardError("plain subset-sum enumeration is capped at m = " +
                                 std::to_string(attack::kMaxPlainSubsetSumM));
    }
    const std::vector<std::uint64_t> sums = all_subset_sums(c.elements());
    std::vector<std::uint64_t> masks;
    for (std::size_t mask = 1; mask < sums.size(); ++mask) {
        if (sums[mask] == d) {
            masks.push_back(mask);
        }
    }
    return to_sorted_selections(masks, c.size());
}

std::vector<SelectionBits> find_all_representations_mitm(std::uint64_t d, const KnapsackInstance& c) {
    if (c.size() > attack::kMaxMitmSubsetSumM) {
        throw ResourceGuardError("meet-in-the-middle subset-sum search is capped at m = " +
                                 std::to_string(attack::kMaxMitmSubsetSumM));
    }
    const std::uint32_t half = c.size() / 2;
    const auto elements = c.elements();
    const std::vector<std::uint64_t> left = all_subset_sums(elements.subspan(0, half));
    const std::vector<std::uint64_t> right_sums = all_subset_sums(elements.subspan(half));

    std::vector<std::pair<std::uint64_t, std::uint64_t>> right; // (sum, mask), sorted
    right.reserve(right_sums.size());
    for (std::size_t mask = 0; mask < right_sums.size(); ++mask) {
        right.emplace_back(right_sums[mask], mask);
    }
    std::sort(right.begin(), right.end());

    std::vector<std::uint64_t> masks;
    for (std::size_t lmask = 0; lmask < left.size(); ++lmask) {
        if (left[lmask] > d) {
            continue;
        }
        const std::uint64_t residual = d - left[lmask];
        auto it = std::lower_bound(right.begin(), right.end(), std::make_pair(residual, std::uint64_t{0}));
        for (; it != right.end() && it->first == residual; ++it) {
            const std::uint64_t full = lmask | (it->second << half);
            if (full != 0) {
                masks.push_back(full);
            }
        }
    }
    return to_sorted_selections(masks, c.size());
}

std::vector<SelectionBits> find_all_representations(std::uint64_t d, const KnapsackInstance& c) {
    return find_all_representations_mitm(d, c);
}

} // namespace subset_sum
} // namespace ct2bc
