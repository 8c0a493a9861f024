#include "ct2bc/subgraph.hpp"

#include "ct2bc/errors.hpp"
#include "ct2bc/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ct2bc {

GraphInstance::GraphInstance(std::uint32_t vertex_count)
    : vertex_count_(vertex_count), adjacency_(pair_count(vertex_count), 0) {}

GraphInstance GraphInstance::from_pair_bits(std::uint32_t vertex_count, std::span<const Bit> bits) {
    if (bits.size() != pair_count(vertex_count)) {
        throw ParameterError("graph on " + std::to_string(vertex_count) + " vertices needs " +
                             std::to_string(pair_count(vertex_count)) + " pair bits, got " +
                             std::to_string(bits.size()));
    }
    GraphInstance g(vertex_count);
    for (std::size_t k = 0; k < bits.size(); ++k) {
        g.adjacency_[k] = static_cast<std::uint8_t>(bits[k]);
    }
    return g;
}

GraphInstance GraphInstance::from_edges(std::uint32_t vertex_count,
                                        std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
    GraphInstance g(vertex_count);
    for (const auto& [i, j] : edges) {
        if (g.has_edge(i, j)) {
            throw ParameterError("duplicate edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
        g.set_edge(i, j, true);
    }
    return g;
}

std::size_t GraphInstance::index_of(std::uint32_t i, std::uint32_t j) const {
    if (i == j || i < 1 || j < 1 || i > vertex_count_ || j > vertex_count_) {
        throw ParameterError("invalid vertex pair (" + std::to_string(i) + "," + std::to_string(j) + ") for " +
                             std::to_string(vertex_count_) + " vertices");
    }
    if (i > j) {
        std::swap(i, j);
    }
    const std::size_t m = vertex_count_;
    return (i - 1) * (2 * m - i) / 2 + (j - i - 1);
}

bool GraphInstance::has_edge(std::uint32_t i, std::uint32_t j) const {
    if (i == j) {
        return false;
    }
    return adjacency_[index_of(i, j)] != 0;
}

void GraphInstance::set_edge(std::uint32_t i, std::uint32_t j, bool present) {
    adjacency_[index_of(i, j)] = present ? 1 : 0;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> GraphInstance::edges() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    std::size_t k = 0;
    for (std::uint32_t i = 1; i <= vertex_count_; ++i) {
        for (std::uint32_t j = i + 1; j <= vertex_count_; ++j, ++k) {
            if (adjacency_[k] != 0) {
                out.emplace_back(i, j);
            }
        }
    }
    return out;
}

std::size_t GraphInstance::edge_count() const {
    return static_cast<std::size_t>(std::count(adjacency_.begin(), adjacency_.end(), std::uint8_t{1}));
}

std::vector<Bit> GraphInstance::pair_bits() const {
    std::vector<Bit> out(adjacency_.size());
    for (std::size_t k = 0; k < adjacency_.size(); ++k) {
        out[k] = static_cast<Bit>(adjacency_[k]);
    }
    return out;
}

namespace subgraph {

bool is_well_formed(const OrderedSubset& subset, std::uint32_t m, std::uint32_t n) {
    if (subset.indices.size() != n || n == 0) {
        return false;
    }
    std::vector<bool> seen(static_cast<std::size_t>(m) + 1, false);
    for (std::uint32_t v : subset.indices) {
        if (v < 1 || v > m || seen[v]) {
            return false;
        }
        seen[v] = true;
    }
    return true;
}

SubgraphPayload induced_subgraph(const GraphInstance& c, const OrderedSubset& subset) {
    const auto n = static_cast<std::uint32_t>(subset.indices.size());
    if (!is_well_formed(subset, c.vertex_count(), n)) {
        throw ParameterError("ordered subset is not a set of distinct vertices of the graph");
    }
    GraphInstance d(n);
    for (std::uint32_t k = 0; k < n; ++k) {
        for (std::uint32_t l = k + 1; l < n; ++l) {
            if (c.has_edge(subset.indices[k], subset.indices[l])) {
                d.set_edge(k + 1, l + 1, true);
            }
        }
    }
    return d;
}

OrderedSubset random_ordered_subset(std::uint32_t m, std::uint32_t n, Rng& rng) {
    if (n > m) {
        throw ParameterError("cannot choose " + std::to_string(n) + " of " + std::to_string(m) + " vertices");
    }
    std::vector<std::uint32_t> pool(m);
    std::iota(pool.begin(), pool.end(), 1u);
    for (std::uint32_t j = 0; j < n; ++j) {
        const auto r = j + static_cast<std::uint32_t>(rng.uniform(m - j));
        std::swap(pool[j], pool[r]);
    }
    pool.resize(n);
    return {std::move(pool)};
}

CommitOutput commit(const GraphInstance& c_a, std::uint32_t n, Rng& rng) {
    if (n < 1 || n >= c_a.vertex_count()) {
        throw ParameterError("subgraph commitment needs 1 <= n < m");
    }
    OrderedSubset witness = random_ordered_subset(c_a.vertex_count(), n, rng);
    SubgraphPayload payload = induced_subgraph(c_a, witness);
    return {std::move(payload), std::move(witness)};
}

Verdict verify(const GraphInstance& c_claimed, const SubgraphPayload& payload, const OrderedSubset& witness,
               Bit claimed) {
    const std::uint32_t n = payload.vertex_count();
    if (!is_well_formed(witness, c_claimed.vertex_count(), n)) {
        return Verdict::reject(RejectReason::witness_malformed);
    }
    for (std::uint32_t k = 0; k < n; ++k) {
        for (std::uint32_t l = k + 1; l < n; ++l) {
            if (payload.has_edge(k + 1, l + 1) != c_claimed.has_edge(witness.indices[k], witness.indices[l])) {
                return Verdict::reject(RejectReason::association_fails);
            }
        }
    }
    return Verdict::accept(claimed);
}

namespace {

// Depth-first extension of a partial ordered injection 1..k -> V(c) that
// agrees with the payload on every pair placed so far.
class WitnessSearch {
public:
    WitnessSearch(const SubgraphPayload& payload, const GraphInstance& c)
        : payload_(payload), c_(c), used_(static_cast<std::size_t>(c.vertex_count()) + 1, false) {
        if (payload.vertex_count() > c.vertex_count()) {
            throw ParameterError("payload has more vertices than the instance");
        }
        chosen_.reserve(payload.vertex_count());
    }

    template <typename OnComplete>
    bool run(OnComplete&& on_complete) {
        return extend(on_complete);
    }

    const std::vector<std::uint32_t>& chosen() const { return chosen_; }

private:
    template <typename OnComplete>
    bool extend(OnComplete& on_complete) {
        const auto k = static_cast<std::uint32_t>(chosen_.size());
        if (k == payload_.vertex_count()) {
            return on_complete(chosen_);
        }
        for (std::uint32_t v = 1; v <= c_.vertex_count(); ++v) {
            if (used_[v] || !consistent(k, v)) {
                continue;
            }
            used_[v] = true;
            chosen_.push_back(v);
            const bool stop = extend(on_complete);
            chosen_.pop_back();
            used_[v] = false;
            if (stop) {
                return true;
            }
        }
        return false;
    }

    bool consistent(std::uint32_t k, std::uint32_t v) const {
        for (std::uint32_t l = 0; l < k; ++l) {
            if (payload_.has_edge(l + 1, k + 1) != c_.has_edge(chosen_[l], v)) {
                return false;
            }
        }
        return true;
    }

    const SubgraphPayload& payload_;
    const GraphInstance& c_;
    std::vector<bool> used_;
    std::vector<std::uint32_t> chosen_;
};

} // namespace

std::optional<OrderedSubset> find_witness(const SubgraphPayload& payload, const GraphInstance& c) {
    WitnessSearch search(payload, c);
    std::optional<OrderedSubset> found;
    search.run([&found](const std::vector<std::uint32_t>& chosen) {
        found = OrderedSubset{chosen};
        return true;
    });
    return found;
}

std::uint64_t count_witnesses(const SubgraphPayload& payload, const GraphInstance& c) {
    WitnessSearch search(payload, c);
    std::uint64_t count = 0;
    search.run([&count](const std::vector<std::uint32_t>&) {
        ++count;
        return false;
    });
    return count;
}

std::uint64_t ordered_subset_count(std::uint32_t m, std::uint32_t n) {
    if (n > m) {
        return 0;
    }
    std::uint64_t total = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (__builtin_mul_overflow(total, static_cast<std::uint64_t>(m - i), &total)) {
            throw std::overflow_error("ordered subset count overflows 64 bits");
        }
    }
    return total;
}

} // namespace subgraph
} // namespace ct2bc
