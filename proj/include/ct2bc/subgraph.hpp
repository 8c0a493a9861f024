#pragma once

#include "ct2bc/bit.hpp"
#include "ct2bc/verdict.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace ct2bc {

class Rng;

// Unordered vertex pairs on m vertices: m(m-1)/2.
constexpr std::size_t pair_count(std::uint32_t m) noexcept {
    return static_cast<std::size_t>(m) * (m == 0 ? 0 : m - 1) / 2;
}

/// Simple undirected graph on vertices 1..m, stored as a bitmap over the
/// unordered pairs in lexicographic order (1,2),(1,3),...,(1,m),(2,3),...
class GraphInstance {
public:
    GraphInstance() = default;
    explicit GraphInstance(std::uint32_t vertex_count);

    // Canonical decoding: pair k is an edge iff bits[k] == 1.
    static GraphInstance from_pair_bits(std::uint32_t vertex_count, std::span<const Bit> bits);
    static GraphInstance from_edges(std::uint32_t vertex_count,
                                    std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);

    std::uint32_t vertex_count() const noexcept { return vertex_count_; }

    // 1-based; order of i and j is irrelevant. i == j is never an edge.
    bool has_edge(std::uint32_t i, std::uint32_t j) const;
    void set_edge(std::uint32_t i, std::uint32_t j, bool present);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const;
    std::size_t edge_count() const;
    std::vector<Bit> pair_bits() const;

    friend bool operator==(const GraphInstance&, const GraphInstance&) = default;

private:
    std::size_t index_of(std::uint32_t i, std::uint32_t j) const;

    std::uint32_t vertex_count_ = 0;
    std::vector<std::uint8_t> adjacency_;
};

/// (i_1, ..., i_n): distinct vertices, order significant.
struct OrderedSubset {
    std::vector<std::uint32_t> indices;
    friend bool operator==(const OrderedSubset&, const OrderedSubset&) = default;
};

// The commitment payload for this scheme is itself a graph on n vertices.
using SubgraphPayload = GraphInstance;

namespace subgraph {

// Distinct, within 1..m, and of the expected length.
bool is_well_formed(const OrderedSubset& subset, std::uint32_t m, std::uint32_t n);

/// Graph on 1..n with (k,l) an edge iff (i_k, i_l) is an edge of c.
SubgraphPayload induced_subgraph(const GraphInstance& c, const OrderedSubset& subset);

/// Uniform ordered n-subset of 1..m (partial Fisher-Yates).
OrderedSubset random_ordered_subset(std::uint32_t m, std::uint32_t n, Rng& rng);

struct CommitOutput {
    SubgraphPayload payload;
    OrderedSubset witness;
};

CommitOutput commit(const GraphInstance& c_a, std::uint32_t n, Rng& rng);

/// Accepts `claimed` iff the payload equals the subgraph of c_claimed induced
/// by the witness, edge-for-edge in both directions.
Verdict verify(const GraphInstance& c_claimed, const SubgraphPayload& payload, const OrderedSubset& witness,
               Bit claimed);

/// Exhaustive search for an ordered subset inducing `payload` in `c`. Returns
/// the lexicographically first witness. Throws ParameterError when the payload
/// has more vertices than c.
std::optional<OrderedSubset> find_witness(const SubgraphPayload& payload, const GraphInstance& c);

inline bool is_associated(const SubgraphPayload& payload, const GraphInstance& c) {
    return find_witness(payload, c).has_value();
}

/// Number of ordered subsets of c inducing exactly `payload`.
std::uint64_t count_witnesses(const SubgraphPayload& payload, const GraphInstance& c);

// m! / (m - n)!
std::uint64_t ordered_subset_count(std::uint32_t m, std::uint32_t n);

} // namespace subgraph
} // namespace ct2bc
