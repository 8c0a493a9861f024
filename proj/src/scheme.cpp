#include "ct2bc/scheme.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace ct2bc {

std::string_view to_string(RejectReason reason) noexcept {
    switch (reason) {
    case RejectReason::witness_malformed: return "witness-malformed";
    case RejectReason::association_fails: return "association-fails";
    case RejectReason::scheme_mismatch: return "scheme-mismatch";
    case RejectReason::payload_mismatch: return "payload-mismatch";
    }
    return "unknown";
}

std::string_view to_string(SchemeId id) noexcept {
    return id == SchemeId::subgraph ? "subgraph" : "subset-sum";
}

SchemeId parse_scheme(std::string_view text) {
    if (text == "subgraph") {
        return SchemeId::subgraph;
    }
    if (text == "subset-sum") {
        return SchemeId::subset_sum;
    }
    throw ParameterError("unknown scheme '" + std::string(text) + "' (expected subgraph or subset-sum)");
}

void SchemeParams::validate() const {
    switch (scheme) {
    case SchemeId::subgraph:
        if (m > kMaxGraphVertices) {
            throw ParameterError("subgraph scheme supports m <= " + std::to_string(kMaxGraphVertices));
        }
        if (n < 1 || n >= m) {
            throw ParameterError("subgraph scheme needs 1 <= n < m (got m=" + std::to_string(m) +
                                 ", n=" + std::to_string(n) + ")");
        }
        return;
    case SchemeId::subset_sum:
        if (m < 1 || m > kMaxSubsetSumM) {
            throw ParameterError("subset-sum scheme needs 1 <= m <= " + std::to_string(kMaxSubsetSumM));
        }
        if (n != m) {
            throw ParameterError("subset-sum scheme needs n == m (got m=" + std::to_string(m) +
                                 ", n=" + std::to_string(n) + ")");
        }
        return;
    }
    throw ParameterError("unknown scheme id");
}

std::size_t instance_bits(const SchemeParams& params) {
    if (params.scheme == SchemeId::subgraph) {
        return pair_count(params.m);
    }
    return static_cast<std::size_t>(params.m) * params.m;
}

std::size_t bits_required(const SchemeParams& params) { return 2 * instance_bits(params); }

SchemeId InstancePair::scheme() const noexcept {
    return std::holds_alternative<GraphPair>(instances) ? SchemeId::subgraph : SchemeId::subset_sum;
}

const GraphInstance& InstancePair::graph(Bit which) const {
    return std::get<GraphPair>(instances)[to_uint(which)];
}

const KnapsackInstance& InstancePair::knapsack(Bit which) const {
    return std::get<KnapsackPair>(instances)[to_uint(which)];
}

InstanceDecoder::InstanceDecoder(const SchemeParams& params, BitStream stream)
    : params_(params), stream_(std::move(stream)) {
    params_.validate();
    if (stream_.bits.size() != bits_required(params_)) {
        throw ParameterError("parameter mismatch: instance generation needs " +
                             std::to_string(bits_required(params_)) + " tosses, stream has " +
                             std::to_string(stream_.bits.size()));
    }
    if (params_.scheme == SchemeId::subset_sum) {
        const std::size_t m = params_.m;
        const std::span<const Bit> bits = stream_.bits;
        for (std::size_t inst = 0; inst < 2; ++inst) {
            elements_[inst].resize(m);
            for (std::size_t e = 0; e < m; ++e) {
                const std::uint64_t v = subset_sum::decode_element(bits.subspan(inst * m * m + e * m, m));
                elements_[inst][e] = v;
                if (v == 0) {
                    pending_.push_back({inst, e});
                }
            }
        }
    }
}

void InstanceDecoder::supply(std::span<const Bit> bits) {
    if (bits.size() != pending_bits()) {
        throw ParameterError("regeneration needs exactly " + std::to_string(pending_bits()) + " tosses, got " +
                             std::to_string(bits.size()));
    }
    const std::size_t m = params_.m;
    std::vector<Slot> still_zero;
    for (std::size_t k = 0; k < pending_.size(); ++k) {
        const Slot slot = pending_[k];
        const std::uint64_t v = subset_sum::decode_element(bits.subspan(k * m, m));
        elements_[slot.instance][slot.element] = v;
        if (v == 0) {
            still_zero.push_back(slot);
        }
    }
    regeneration_tosses_ += bits.size();
    pending_ = std::move(still_zero);
}

InstancePair InstanceDecoder::finish() const {
    if (!ready()) {
        throw ParameterError("instance pair still has zero elements awaiting regeneration");
    }
    InstancePair pair;
    pair.generation = stream_;
    pair.regeneration_tosses = regeneration_tosses_;
    const std::span<const Bit> bits = stream_.bits;
    const std::size_t f = instance_bits(params_);
    if (params_.scheme == SchemeId::subgraph) {
        pair.instances = GraphPair{GraphInstance::from_pair_bits(params_.m, bits.subspan(0, f)),
                                   GraphInstance::from_pair_bits(params_.m, bits.subspan(f, f))};
    } else {
        pair.instances = KnapsackPair{KnapsackInstance(params_.m, elements_[0]),
                                      KnapsackInstance(params_.m, elements_[1])};
    }
    return pair;
}

InstancePair generate_instance_pair(const SchemeParams& params, const BitStream& stream,
                                    const RegenerationSource& regenerate) {
    InstanceDecoder decoder(params, stream);
    while (!decoder.ready()) {
        if (!regenerate) {
            throw ParameterError("a knapsack element decoded to zero and no regeneration tosses are available");
        }
        const std::vector<Bit> fresh = regenerate(decoder.pending_bits());
        decoder.supply(fresh);
    }
    return decoder.finish();
}

SchemeId Commitment::scheme() const noexcept {
    return std::holds_alternative<SubgraphPayload>(payload) ? SchemeId::subgraph : SchemeId::subset_sum;
}

SchemeId Opening::scheme() const noexcept {
    return std::holds_alternative<OrderedSubset>(witness) ? SchemeId::subgraph : SchemeId::subset_sum;
}

CommitResult commit(const SchemeParams& params, const InstancePair& pair, Bit a, Rng& rng) {
    params.validate();
    if (pair.scheme() != params.scheme) {
        throw ParameterError("instance pair does not belong to the agreed scheme");
    }
    if (params.scheme == SchemeId::subgraph) {
        auto out = subgraph::commit(pair.graph(a), params.n, rng);
        return {Commitment{std::move(out.payload)}, Opening{a, std::move(out.witness)}};
    }
    auto out = subset_sum::commit(pair.knapsack(a), rng);
    return {Commitment{out.payload}, Opening{a, std::move(out.witness)}};
}

bool commitment_well_formed(const SchemeParams& params, const Commitment& commitment) {
    if (commitment.scheme() != params.scheme) {
        return false;
    }
    if (const auto* graph = std::get_if<SubgraphPayload>(&commitment.payload)) {
        return graph->vertex_count() == params.n;
    }
    const std::uint64_t value = std::get<SumPayload>(commitment.payload).value;
    return value >= 1 && value < subset_sum::payload_bound(params.m);
}

Verdict verify_opening(const SchemeParams& params, const InstancePair& pair, const Commitment& commitment,
                       const Opening& opening) {
    if (commitment.scheme() != params.scheme || opening.scheme() != params.scheme || pair.scheme() != params.scheme) {
        return Verdict::reject(RejectReason::scheme_mismatch);
    }
    const Bit claimed = opening.claimed_bit;
    if (params.scheme == SchemeId::subgraph) {
        const auto& witness = std::get<OrderedSubset>(opening.witness);
        if (witness.indices.size() != params.n) {
            return Verdict::reject(RejectReason::witness_malformed);
        }
        return subgraph::verify(pair.graph(claimed), std::get<SubgraphPayload>(commitment.payload), witness, claimed);
    }
    return subset_sum::verify(pair.knapsack(claimed), std::get<SumPayload>(commitment.payload),
                              std::get<SelectionBits>(opening.witness), claimed);
}

InstancePair seeded_instance_pair(const SchemeParams& params, std::uint64_t seed) {
    SeededTossEngine engine(seed);
    const TossSecurityParams toss{};
    const BitStream stream = toss_stream(engine, bits_required(params), toss);
    return generate_instance_pair(params, stream,
                                  [&](std::size_t count) { return toss_stream(engine, count, toss).bits; });
}

} // namespace ct2bc
