// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include "ct2bc/attack.hpp"
#include "ct2bc/errors.hpp"
#include "ct2bc/report.hpp"
#include "ct2bc/session.hpp"
#include "ct2bc/wire.hpp"

#include "oracles.hpp"
#include "wire_gen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace ct2bc;
using namespace ct2bc::session;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    // Records a failure; the first few reasons end up in the summary line.
    void fail(const std::string& why) {
        if (failures_++ < 3) {
            detail << " [" << why << "]";
        }
        pass = false;
    }

private:
    int failures_ = 0;
};

SessionConfig config(Role role, SchemeParams scheme, std::string engine, std::uint64_t test_seed, Bit bit = Bit::zero) {
    SessionConfig c;
    c.role = role;
    c.scheme = scheme;
    c.engine = EngineSpec::parse(engine);
    c.test_seed = test_seed;
    c.committed_bit = bit;
    return c;
}

PairResult honest(SchemeParams p, const std::string& engine, Bit bit, std::uint64_t seed,
                  const Interceptor& ic = {}) {
    return run_local_pair(config(Role::committer, p, engine, derive_seed(seed, 1), bit),
                          config(Role::verifier, p, engine, derive_seed(seed, 2)), ic);
}

std::string seeded(std::uint64_t s) { return "seeded:" + std::to_string(s); }

std::vector<std::uint64_t> as_vec(const KnapsackInstance& c) { return {c.elements().begin(), c.elements().end()}; }

GraphInstance random_graph(std::uint32_t m, Rng& rng) {
    std::vector<Bit> bits(pair_count(m));
    for (auto& b : bits) {
        b = rng.bit();
    }
    return GraphInstance::from_pair_bits(m, bits);
}

KnapsackInstance random_knapsack(std::uint32_t m, Rng& rng) {
    std::vector<std::uint64_t> e(m);
    for (auto& v : e) {
        v = 1 + rng.uniform(subset_sum::payload_bound(m) / m - 1);
    }
    return KnapsackInstance(m, e);
}

// 1 -------------------------------------------------------------------------

Outcome honest_completeness() {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    std::vector<SchemeParams> graphs;
    for (const std::uint32_t m : {4u, 6u, 8u}) {
        for (const std::uint32_t n : {2u, 3u}) {
            graphs.push_back({SchemeId::subgraph, m, n});
        }
    }
    std::vector<SchemeParams> sums{{SchemeId::subset_sum, 8, 8}, {SchemeId::subset_sum, 16, 16},
                                   {SchemeId::subset_sum, 24, 24}};
    std::uint64_t seed = 0;
    for (const std::vector<SchemeParams>* grid : {&graphs, &sums}) {
        const std::size_t cells = grid->size() * 2;
        const std::size_t per_cell = (1000 + cells - 1) / cells;
        std::size_t accepted = 0;
        std::size_t total = 0;
        for (const SchemeParams& p : *grid) {
            for (const Bit bit : {Bit::zero, Bit::one}) {
                for (std::size_t i = 0; i < per_cell; ++i, ++seed) {
                    const auto r = honest(p, seeded(seed), bit, seed);
                    ++total;
                    const bool ok = r.verifier.phase == Phase::accepted && r.committer.phase == Phase::accepted &&
                                    r.verifier.verdict && *r.verifier.verdict == Verdict::accept(bit);
                    accepted += ok;
                    if (!ok) {
                        out.fail(std::string(to_string(p.scheme)) + " m=" + std::to_string(p.m) + " seed " +
                                 std::to_string(seed) + " ended " + std::string(to_string(r.verifier.phase)));
                    }
                }
            }
        }
        out.detail << to_string(grid->front().scheme) << " " << accepted << "/" << total << "; ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.detail << "runtime " << secs << " s";
    if (secs >= 60.0) {
        out.fail("over the 60 s budget");
    }
    return out;
}

// 2 -------------------------------------------------------------------------

Outcome toss_fairness() {
    Outcome out;
    const std::size_t n = 10000;
    const auto engines = [](std::uint64_t seed, std::shared_ptr<TossAdversary> adv) {
        std::vector<std::unique_ptr<TossEngine>> e;
        e.push_back(std::make_unique<SeededTossEngine>(seed, adv));
        e.push_back(std::make_unique<RelativisticSimEngine>(SpacetimeConfig{}, Rng(derive_seed(seed, 1)),
                                                            Rng(derive_seed(seed, 2)), adv));
        e.push_back(std::make_unique<HashBootstrapEngine>(Rng(derive_seed(seed, 3)), Rng(derive_seed(seed, 4)), adv));
        return e;
    };
    double worst = 0.0;
    const auto check = [&](TossEngine& e, const std::string& label) {
        const auto s = toss_stream(e, n, {});
        const auto ones = std::count(s.bits.begin(), s.bits.end(), Bit::one);
        const double dev = std::abs(static_cast<double>(ones) / n - 0.5);
        worst = std::max(worst, dev);
        if (s.bits.size() != n || dev > 0.02) {
            out.fail(label + " " + e.id() + " deviation " + std::to_string(dev));
        }
    };
    for (auto& e : engines(2020, nullptr)) {
        check(*e, "honest");
    }
    for (const Bit fixed : {Bit::zero, Bit::one}) {
        for (auto& e : engines(3030 + to_uint(fixed), std::make_shared<FixedBitAdversary>(fixed))) {
            check(*e, "fixed " + std::to_string(to_uint(fixed)));
        }
    }
    out.detail << "3 engines x (honest, fixed 0, fixed 1) x " << n << " tosses, worst |f1-0.5| = " << worst;
    return out;
}

// 3 -------------------------------------------------------------------------

Outcome lightcone_rule() {
    Outcome out;
    std::size_t boundary_cases = 0;
    const auto run = [&](const SpacetimeConfig& cfg, const Rational& ra, const Rational& rb) {
        const SiteLayout s = standard_sites(cfg);
        const Rational t = cfg.agreed_time_t;
        const TossEvent a{Bit::one, t, s.a1, ra, s.b1};
        const TossEvent b{Bit::zero, t, s.b2, rb, s.a2};
        // Written out from the rule itself: both legs in by t + 2*delta.
        const Rational limit = t + Rational(2) * cfg.site_radius_delta;
        const bool expect = ra <= limit && rb <= limit;
        const auto got = validate_relativistic_toss(cfg, a, b);
        if (got.valid != expect || (!got.valid && got.abort_reason != AbortReason::late_arrival)) {
            out.fail("disagreement at ra=" + ra.to_string() + " rb=" + rb.to_string());
        }
        if (got.valid && got.bit != (Bit::one ^ Bit::zero)) {
            out.fail("outcome is not the XOR");
        }
    };
    for (const std::int64_t t : {-50, 0, 3, 1000}) {
        for (const Rational delta : {Rational(1), Rational(1, 7), Rational(9, 4), Rational(1000)}) {
            SpacetimeConfig cfg;
            cfg.agreed_time_t = t;
            cfg.site_radius_delta = delta;
            cfg.point_p2 = cfg.point_p1 + Rational(100) * delta;
            cfg.separation = Rational(100) * delta;
            const Rational limit = Rational(t) + Rational(2) * delta;
            const Rational inside = Rational(t) + delta; // causal for both legs
            for (const Rational tiny : {Rational(1, 1'000'000'007), delta / Rational(1000), delta / Rational(2)}) {
                for (const Rational r : {limit - tiny, limit, limit + tiny}) {
                    run(cfg, r, inside);
                    run(cfg, inside, r);
                    run(cfg, r, r);
                    boundary_cases += 3;
                }
            }
        }
    }
    Rng rng(3);
    SpacetimeConfig cfg;
    for (int i = 0; i < 1000; ++i) {
        // Causal receive times in [t + delta/2, t + 4*delta] on random denominators.
        const auto den = static_cast<std::int64_t>(1 + rng.uniform(64));
        const auto lo = den / 2 + (den % 2);
        const auto draw = [&] { return Rational(lo + static_cast<std::int64_t>(rng.uniform(4 * den - lo + 1)), den); };
        run(cfg, draw(), draw());
    }
    out.detail << boundary_cases << " boundary cases, 1000 randomized cases";
    return out;
}

// 4 -------------------------------------------------------------------------

Outcome degenerate_n1() {
    Outcome out;
    const SchemeParams p{SchemeId::subgraph, 6, 1};
    const std::uint64_t trials = 1000;
    const auto binding = attack::estimate_binding(p, trials, 41);
    const auto conceal = attack::estimate_concealment(p, trials, 42);
    const double sigma = std::sqrt(0.25 / static_cast<double>(trials));
    out.detail << "equivocable_fraction " << binding.equivocable_fraction << ", guess_advantage "
               << conceal.guess_advantage << " (3 sigma = " << 3 * sigma << ") over " << trials << " trials";
    if (binding.equivocable_fraction != 1.0) {
        out.fail("n=1 not always equivocable");
    }
    if (std::abs(conceal.guess_advantage) > 3 * sigma) {
        out.fail("advantage outside 3 sigma");
    }
    if (conceal.forced != 0) {
        out.fail("n=1 guesses should never be forced");
    }
    return out;
}

// 5 -------------------------------------------------------------------------

Outcome oracle_equivalence() {
    Outcome out;
    Rng rng(5);
    std::size_t graph_cases = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const auto m = static_cast<std::uint32_t>(2 + rng.uniform(5));
        const auto n = static_cast<std::uint32_t>(1 + rng.uniform(std::min(4u, m - 1)));
        const auto c0 = random_graph(m, rng);
        const auto c1 = random_graph(m, rng);
        // Half the payloads are induced (witness exists), half arbitrary.
        const auto payload = rep % 2 == 0 ? subgraph::induced_subgraph(c0, subgraph::random_ordered_subset(m, n, rng))
                                          : random_graph(n, rng);
        const auto expected = oracle::all_witnesses(payload, c0);
        const auto found = subgraph::find_witness(payload, c0);
        if (found.has_value() != !expected.empty() || (found && found->indices != expected.front()) ||
            subgraph::count_witnesses(payload, c0) != expected.size()) {
            out.fail("witness search m=" + std::to_string(m) + " n=" + std::to_string(n));
        }
        const auto eq = attack::find_equivocation_subgraph({c0, c1}, n);
        if (eq.has_value() != oracle::subgraph_equivocable(c0, c1, n)) {
            out.fail("equivocation m=" + std::to_string(m) + " n=" + std::to_string(n));
        }
        if (eq && !(oracle::induces(c0, eq->witness0.indices, eq->payload) &&
                    oracle::induces(c1, eq->witness1.indices, eq->payload))) {
            out.fail("equivocation witness does not verify");
        }
        ++graph_cases;
    }
    std::size_t sum_cases = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const auto m = static_cast<std::uint32_t>(1 + rng.uniform(16));
        const auto c0 = random_knapsack(m, rng);
        const auto c1 = random_knapsack(m, rng);
        std::uint64_t d = 0;
        if (rep % 2 == 0) {
            for (const auto e : c0.elements()) {
                d += rng.bit() == Bit::one ? e : 0;
            }
        } else {
            d = rng.uniform(subset_sum::payload_bound(m));
        }
        const auto lib = subset_sum::find_all_representations(d, c0);
        const auto ref = oracle::representations(d, as_vec(c0));
        std::vector<std::vector<Bit>> lib_bits;
        for (const auto& s : lib) {
            lib_bits.push_back(s.x);
        }
        if (lib_bits != ref || subset_sum::find_all_representations_plain(d, c0) != lib) {
            out.fail("representations m=" + std::to_string(m) + " d=" + std::to_string(d));
        }
        const auto eq = attack::find_equivocation_subset_sum({c0, c1});
        const auto smallest = oracle::smallest_common_sum(as_vec(c0), as_vec(c1));
        if ((eq ? eq->d : 0) != smallest) {
            out.fail("common sum m=" + std::to_string(m));
        }
        ++sum_cases;
    }
    out.detail << graph_cases << " subgraph instances (m<=6, n<=4), " << sum_cases << " subset-sum instances (m<=16)";
    return out;
}

// 6 -------------------------------------------------------------------------

Outcome bit_budget() {
    Outcome out;
    std::size_t checked = 0;
    const auto account = [&](const SchemeParams& p, std::size_t expected) {
        if (bits_required(p) != expected) {
            out.fail("bits_required m=" + std::to_string(p.m));
        }
        Rng rng(derive_seed(p.m, static_cast<std::uint64_t>(p.scheme)));
        std::size_t drawn = 0;
        const auto stream_of = [&](std::size_t k) {
            BitStream s;
            for (std::size_t i = 0; i < k; ++i) {
                s.bits.push_back(rng.bit());
            }
            s.toss_count = k;
            return s;
        };
        const RegenerationSource regen = [&](std::size_t k) {
            drawn += k;
            return stream_of(k).bits;
        };
        const auto pair = generate_instance_pair(p, stream_of(expected), regen);
        if (pair.generation.bits.size() != expected || pair.regeneration_tosses != drawn) {
            out.fail("stream accounting m=" + std::to_string(p.m));
        }
        for (const std::size_t wrong : {expected - 1, expected + 1}) {
            try {
                generate_instance_pair(p, stream_of(wrong), regen);
                out.fail("accepted a stream of " + std::to_string(wrong));
            } catch (const ParameterError&) {
            }
        }
        ++checked;
    };
    for (std::uint32_t m = 2; m <= 64; ++m) {
        account({SchemeId::subgraph, m, 1}, static_cast<std::size_t>(m) * (m - 1));
    }
    for (std::uint32_t m = 1; m <= kMaxSubsetSumM; ++m) {
        account({SchemeId::subset_sum, m, m}, 2 * static_cast<std::size_t>(m) * m);
    }
    // The same count, observed on the wire: bits the committer contributed in TOSS_A.
    std::size_t sessions = 0;
    for (const SchemeParams& p : {SchemeParams{SchemeId::subgraph, 5, 2}, SchemeParams{SchemeId::subgraph, 12, 4},
                                  SchemeParams{SchemeId::subset_sum, 2, 2}, SchemeParams{SchemeId::subset_sum, 9, 9},
                                  SchemeParams{SchemeId::subset_sum, 20, 20}}) {
        for (std::uint64_t seed = 0; seed < 20; ++seed, ++sessions) {
            const auto r = honest(p, seeded(seed), Bit::one, seed);
            std::size_t tossed = 0;
            for (const auto& e : r.committer.transcript.entries) {
                if (e.direction == Direction::sent && e.frame.at(0) == static_cast<std::uint8_t>(wire::MessageType::toss_a)) {
                    tossed += std::get<wire::TossContributionMsg>(wire::from_wire(wire::decode(e.frame))).bits.size();
                }
            }
            if (!r.committer.instances || tossed != bits_required(p) + r.committer.instances->regeneration_tosses) {
                out.fail("session toss count " + std::string(to_string(p.scheme)) + " m=" + std::to_string(p.m));
            }
        }
    }
    out.detail << checked << " parameter points, " << sessions << " sessions counted on the wire";
    return out;
}

// 7 -------------------------------------------------------------------------

Outcome serialization() {
    Outcome out;
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const wire::Message m = wire_gen::message(rng);
        const auto frame = wire::encode(wire::to_wire(m));
        const wire::Message back = wire::from_wire(wire::decode(frame));
        if (!(back == m) || wire::encode(wire::to_wire(back)) != frame) {
            out.fail("round trip " + std::to_string(i));
        }
    }
    std::size_t decoded = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<std::uint8_t> bytes(rng.uniform(80));
        rng.fill(bytes);
        if (i % 2 == 0 && bytes.size() >= wire::kHeaderSize) {
            bytes[0] = std::array<std::uint8_t, 9>{1, 2, 3, 4, 5, 0x10, 0x11, 0x20, 0x7F}[rng.uniform(9)];
            bytes[1] = bytes[2] = bytes[3] = 0;
            bytes[4] = static_cast<std::uint8_t>(bytes.size() - wire::kHeaderSize);
        } else if (i % 4 == 1) {
            // A valid frame with one byte changed.
            bytes = wire::encode(wire::to_wire(wire_gen::message(rng)));
            bytes[rng.uniform(bytes.size())] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
        }
        try {
            const wire::Message m = wire::from_wire(wire::decode(bytes));
            decoded += 1;
            if (wire::encode(wire::to_wire(m)) != bytes) {
                out.fail("non-canonical decode accepted");
            }
        } catch (const FrameError&) {
        } catch (const std::exception& e) {
            out.fail(std::string("decoder threw ") + e.what());
        }
    }
    // Corrupt one frame of a live session; the session must end ABORTED.
    std::size_t corrupted = 0;
    std::size_t aborted = 0;
    for (int i = 0; i < 1000; ++i) {
        const SchemeParams p = i % 2 ? SchemeParams{SchemeId::subgraph, 6, 3} : SchemeParams{SchemeId::subset_sum, 8, 8};
        const auto target = rng.uniform(6);
        const auto how = rng.uniform(4);
        std::uint64_t seen = 0;
        bool hit = false;
        const Interceptor corrupt = [&](Role, wire::WireMessage& m) {
            if (seen++ != target) {
                return true;
            }
            hit = true;
            switch (how) {
            case 0: m.body.resize(m.body.size() / 2); break;
            case 1: m.body.insert(m.body.end(), {0xFF, 0xFF, 0xFF}); break;
            case 2: m.body.assign(1, 0xEE); break;
            default: m.type = static_cast<wire::MessageType>(0x7F); break;
            }
            return true;
        };
        const auto r = honest(p, seeded(i), Bit::zero, i, corrupt);
        if (!hit) {
            continue;
        }
        ++corrupted;
        const bool ok = r.committer.phase == Phase::aborted || r.verifier.phase == Phase::aborted;
        aborted += ok;
        if (!ok) {
            out.fail("corrupted session " + std::to_string(i) + " did not abort");
        }
    }
    out.detail << "10000 round trips, 1000 random strings (" << decoded << " decoded canonically), " << aborted << "/"
               << corrupted << " corrupted sessions aborted";
    return out;
}

// 8 -------------------------------------------------------------------------

Outcome determinism() {
    Outcome out;
    std::size_t transcripts = 0;
    for (const std::string engine : {"seeded:8", "relativistic-sim", "hash-bootstrap"}) {
        for (const SchemeParams& p : {SchemeParams{SchemeId::subgraph, 7, 3}, SchemeParams{SchemeId::subset_sum, 12, 12}}) {
            const auto a = honest(p, engine, Bit::one, 88);
            const auto b = honest(p, engine, Bit::one, 88);
            if (a.committer.transcript.serialize() != b.committer.transcript.serialize() ||
                a.verifier.transcript.serialize() != b.verifier.transcript.serialize()) {
                out.fail("transcripts differ for " + engine);
            }
            transcripts += 2;
        }
    }
    std::size_t reports = 0;
    for (const SchemeParams& p : {SchemeParams{SchemeId::subgraph, 6, 3}, SchemeParams{SchemeId::subset_sum, 12, 12}}) {
        const std::function<std::string(unsigned)> runs[] = {
            [&](unsigned t) { return to_json_line(attack::estimate_binding(p, 300, 8, {t, true})); },
            [&](unsigned t) { return to_json_line(attack::estimate_concealment(p, 300, 8, {t, true})); },
        };
        for (const auto& run : runs) {
            const auto first = run(1);
            if (run(1) != first || run(4) != first) {
                out.fail("report differs for " + std::string(to_string(p.scheme)));
            }
            ++reports;
        }
    }
    if (to_json_line(attack::measure_abort_bias(2000, 8, 3)) != to_json_line(attack::measure_abort_bias(2000, 8, 3))) {
        out.fail("abort-bias report differs");
    }
    ++reports;
    out.detail << transcripts << " transcript pairs and " << reports << " reports identical (1 vs 4 threads)";
    return out;
}

// 9 -------------------------------------------------------------------------

enum class Mutation { flip_claim, permute_witness, change_witness_entry, alter_payload };

const char* name(Mutation m) {
    switch (m) {
    case Mutation::flip_claim: return "flip claimed bit";
    case Mutation::permute_witness: return "permute I";
    case Mutation::change_witness_entry: return "change one entry";
    default: return "alter payload";
    }
}

void mutate(wire::UnveilMsg& u, Mutation kind, Rng& rng) {
    switch (kind) {
    case Mutation::flip_claim: u.opening.claimed_bit = u.opening.claimed_bit ^ Bit::one; return;
    case Mutation::permute_witness: {
        auto& s = std::get<OrderedSubset>(u.opening.witness).indices;
        const auto before = s;
        while (s == before) {
            for (std::size_t i = s.size(); i > 1; --i) {
                std::swap(s[i - 1], s[rng.uniform(i)]);
            }
        }
        return;
    }
    case Mutation::change_witness_entry:
        if (auto* x = std::get_if<SelectionBits>(&u.opening.witness)) {
            auto& b = x->x[rng.uniform(x->x.size())];
            b = b ^ Bit::one;
        } else {
            // Swap one index of I for a vertex not already in I.
            auto& s = std::get<OrderedSubset>(u.opening.witness).indices;
            const auto m = static_cast<std::uint32_t>(s.size() * 2);
            std::uint32_t v = 0;
            do {
                v = static_cast<std::uint32_t>(1 + rng.uniform(m));
            } while (std::find(s.begin(), s.end(), v) != s.end());
            s[rng.uniform(s.size())] = v;
        }
        return;
    case Mutation::alter_payload:
        if (auto* g = std::get_if<SubgraphPayload>(&u.commitment.payload)) {
            const auto n = g->vertex_count();
            const auto i = static_cast<std::uint32_t>(1 + rng.uniform(n));
            auto j = i;
            while (j == i) {
                j = static_cast<std::uint32_t>(1 + rng.uniform(n));
            }
            g->set_edge(i, j, !g->has_edge(i, j));
        } else {
            auto& d = std::get<SumPayload>(u.commitment.payload).value;
            d += 1 + rng.uniform(1000);
        }
        return;
    }
}

// Validity of an opening decided directly from the instances, without the library verifier.
bool oracle_valid(const InstancePair& pair, const Commitment& committed, const wire::UnveilMsg& u) {
    if (!(u.commitment == committed)) {
        return false;
    }
    const Bit a = u.opening.claimed_bit;
    if (const auto* g = std::get_if<SubgraphPayload>(&u.commitment.payload)) {
        const auto& s = std::get<OrderedSubset>(u.opening.witness).indices;
        const auto m = pair.graph(a).vertex_count();
        std::vector<std::uint32_t> sorted = s;
        std::sort(sorted.begin(), sorted.end());
        const bool distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
        const bool in_range = std::all_of(s.begin(), s.end(), [&](auto v) { return v >= 1 && v <= m; });
        return s.size() == g->vertex_count() && distinct && in_range && oracle::induces(pair.graph(a), s, *g);
    }
    const auto& x = std::get<SelectionBits>(u.opening.witness).x;
    const auto c = as_vec(pair.knapsack(a));
    if (x.size() != c.size() || std::none_of(x.begin(), x.end(), [](Bit b) { return b == Bit::one; })) {
        return false;
    }
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        sum += x[i] == Bit::one ? c[i] : 0;
    }
    return sum == std::get<SumPayload>(u.commitment.payload).value;
}

Outcome tamper_suite() {
    Outcome out;
    Rng rng(9);
    for (const SchemeParams& p : {SchemeParams{SchemeId::subgraph, 12, 6}, SchemeParams{SchemeId::subset_sum, 16, 16}}) {
        std::vector<Mutation> kinds{Mutation::flip_claim, Mutation::change_witness_entry, Mutation::alter_payload};
        if (p.scheme == SchemeId::subgraph) {
            kinds.push_back(Mutation::permute_witness); // a selection vector has no order to permute
        }
        std::size_t total = 0;
        std::size_t rejected = 0;
        std::map<Mutation, std::size_t> restored;
        for (std::uint64_t i = 0; i < 1200; ++i) {
            const Mutation kind = kinds[i % kinds.size()];
            std::optional<Commitment> committed;
            std::optional<wire::UnveilMsg> sent;
            const Interceptor tamper = [&](Role sender, wire::WireMessage& m) {
                if (sender != Role::committer) {
                    return true;
                }
                if (m.type == wire::MessageType::commitment) {
                    committed = std::get<wire::CommitmentMsg>(wire::from_wire(m)).commitment;
                } else if (m.type == wire::MessageType::unveil) {
                    auto u = std::get<wire::UnveilMsg>(wire::from_wire(m));
                    mutate(u, kind, rng);
                    sent = u;
                    m = wire::to_wire(u);
                }
                return true;
            };
            const Bit bit = rng.bit();
            const auto r = honest(p, seeded(i), bit, derive_seed(i, static_cast<std::uint64_t>(p.scheme)), tamper);
            if (!sent || !committed || !r.verifier.instances || !r.verifier.verdict) {
                out.fail(std::string(name(kind)) + ": session did not reach a verdict");
                continue;
            }
            ++total;
            const bool valid = oracle_valid(*r.verifier.instances, *committed, *sent);
            if (r.verifier.verdict->accepted) {
                if (!valid) {
                    out.fail(std::string(name(kind)) + ": accepted an invalid opening");
                } else {
                    ++restored[kind];
                }
            } else {
                ++rejected;
                if (valid) {
                    out.fail(std::string(name(kind)) + ": rejected a valid opening");
                }
            }
        }
        if (total < 1000) {
            out.fail("only " + std::to_string(total) + " mutations");
        }
        out.detail << to_string(p.scheme) << " " << rejected << "/" << total << " rejected";
        std::size_t restored_total = 0;
        for (const auto& [k, count] : restored) {
            out.detail << ", " << count << " restored by " << name(k);
            restored_total += count;
        }
        out.detail << "; ";
        if (rejected + restored_total != total) {
            out.fail("unaccounted mutations");
        }
    }
    return out;
}

} // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"honest completeness", honest_completeness},
        {"coin-toss fairness", toss_fairness},
        {"lightcone rule", lightcone_rule},
        {"subgraph n=1 corner", degenerate_n1},
        {"oracle equivalence", oracle_equivalence},
        {"bit budget", bit_budget},
        {"serialization", serialization},
        {"determinism", determinism},
        {"tamper suite", tamper_suite},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [title, run] : criteria) {
        ++index;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.fail(std::string("threw: ") + e.what());
        }
        std::printf("criterion %d: %s %s: %s\n", index, o.pass ? "PASS" : "FAIL", title, o.detail.str().c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
