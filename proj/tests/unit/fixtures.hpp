#pragma once

// Values recorded once from fixed seeds. They pin behaviour down across
// refactors; correctness is checked separately by the oracles.

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace fixture {

// toss_stream(SeededTossEngine(42), 12)
inline constexpr std::string_view kSeeded42 = "100000101111";

// subgraph::commit on c1 of seeded_instance_pair({subgraph, 5, 3}, 5), Rng(55)
inline const std::vector<std::uint32_t> kSubgraphWitness{4, 3, 1};
inline const std::vector<std::pair<std::uint32_t, std::uint32_t>> kSubgraphEdges{}; // induced on {4, 3, 1}: no edges

// subset_sum::commit on c0 of seeded_instance_pair({subset-sum, 16, 16}, 16), Rng(1616)
inline constexpr std::string_view kSubsetSumX = "1011000011010000";
inline constexpr std::uint64_t kSubsetSumD = 245568;

// Committer transcript of the honest m=6 n=3 seeded:42 session, bit 1
inline constexpr std::size_t kSessionSize = 352;
inline constexpr std::uint64_t kSessionFnv = 219892193773686189ull;

} // namespace fixture
