#include "ct2bc/attack.hpp"

#include "ct2bc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <thread>
#include <unordered_map>

namespace ct2bc::attack {
namespace {

// Walks every ordered n-subset of c in lexicographic order. The callback gets
// the subset and the induced graph packed into a u64 (bit k = pair k).
class OrderedSubsetWalk {
public:
    using Visit = std::function<bool(const std::vector<std::uint32_t>&, std::uint64_t)>;

    OrderedSubsetWalk(const GraphInstance& c, std::uint32_t n) : c_(c), n_(n) {
        if (pair_count(n) > 64) {
            throw ResourceGuardError("induced-subgraph keys need n <= 11");
        }
        used_.assign(c.vertex_count() + 1, false);
    }

    // Stops early when visit returns false.
    void run(const Visit& visit) {
        chosen_.clear();
        go(0, visit);
    }

private:
    bool go(std::uint64_t key, const Visit& visit) {
        const auto k = static_cast<std::uint32_t>(chosen_.size());
        if (k == n_) {
            return visit(chosen_, key);
        }
        for (std::uint32_t v = 1; v <= c_.vertex_count(); ++v) {
            if (used_[v]) {
                continue;
            }
            std::uint64_t next = key;
            // Pair (l+1, k+1) in lexicographic order over n vertices.
            for (std::uint32_t l = 0; l < k; ++l) {
                if (c_.has_edge(chosen_[l], v)) {
                    const std::size_t idx = static_cast<std::size_t>(l) * (2 * n_ - l - 1) / 2 + (k - l - 1);
                    next |= std::uint64_t{1} << idx;
                }
            }
            used_[v] = true;
            chosen_.push_back(v);
            const bool more = go(next, visit);
            chosen_.pop_back();
            used_[v] = false;
            if (!more) {
                return false;
            }
        }
        return true;
    }

    const GraphInstance& c_;
    std::uint32_t n_;
    std::vector<bool> used_;
    std::vector<std::uint32_t> chosen_;
};

std::unordered_map<std::uint64_t, std::uint64_t> key_counts(const GraphInstance& c, std::uint32_t n) {
    std::unordered_map<std::uint64_t, std::uint64_t> counts;
    OrderedSubsetWalk(c, n).run([&](const auto&, std::uint64_t key) {
        ++counts[key];
        return true;
    });
    return counts;
}

// Ascending stream of the nonzero-mask subset sums of one instance.
class SortedSums {
public:
    explicit SortedSums(std::span<const std::uint64_t> elements) {
        const std::size_t half = elements.size() / 2;
        left_ = subset_sum::all_subset_sums(elements.subspan(0, half));
        right_ = subset_sum::all_subset_sums(elements.subspan(half));
        std::sort(left_.begin(), left_.end());
        std::sort(right_.begin(), right_.end());
        for (std::uint32_t i = 0; i < left_.size(); ++i) {
            heap_.push({left_[i] + right_[0], i, 0});
        }
        // The empty selection is the only zero sum; drop it.
        next();
    }

    bool done() const { return heap_.empty(); }
    std::uint64_t peek() const { return heap_.top().sum; }
    void next() {
        const Node top = heap_.top();
        heap_.pop();
        if (top.j + 1 < right_.size()) {
            heap_.push({left_[top.i] + right_[top.j + 1], top.i, top.j + 1});
        }
    }

private:
    struct Node {
        std::uint64_t sum;
        std::uint32_t i;
        std::uint32_t j;
        bool operator>(const Node& o) const { return sum > o.sum; }
    };

    std::vector<std::uint64_t> left_;
    std::vector<std::uint64_t> right_;
    std::priority_queue<Node, std::vector<Node>, std::greater<>> heap_;
};

std::vector<std::uint64_t> nonzero_sums_sorted(const KnapsackInstance& c) {
    auto sums = subset_sum::all_subset_sums(c.elements());
    sums.erase(sums.begin());
    std::sort(sums.begin(), sums.end());
    return sums;
}

bool sum_associated(std::uint64_t d, const KnapsackInstance& c) {
    return !subset_sum::find_all_representations(d, c).empty();
}

template <typename Trial>
void run_trials(std::uint64_t trials, unsigned threads, const Trial& trial) {
    threads = std::max(1u, threads);
    if (threads == 1 || trials < 2) {
        for (std::uint64_t t = 0; t < trials; ++t) {
            trial(t);
        }
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::uint64_t t = w; t < trials; t += threads) {
                trial(t);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
}

void check_trials(std::uint64_t trials) {
    if (trials == 0) {
        throw ParameterError("trials must be at least 1");
    }
}

} // namespace

void check_resource_guard(const SchemeParams& params) {
    params.validate();
    if (params.scheme == SchemeId::subgraph && params.m > kMaxAttackGraphVertices) {
        throw ResourceGuardError("subgraph attacks are capped at m <= " + std::to_string(kMaxAttackGraphVertices) +
                                 " (got m = " + std::to_string(params.m) + ")");
    }
    if (params.scheme == SchemeId::subset_sum && params.m > kMaxMitmSubsetSumM) {
        throw ResourceGuardError("subset-sum attacks are capped at m <= " + std::to_string(kMaxMitmSubsetSumM) +
                                 " (meet-in-the-middle; got m = " + std::to_string(params.m) + ")");
    }
}

bool weak_params(const SchemeParams& params) {
    if (params.scheme == SchemeId::subgraph) {
        return params.n < 3 || params.m < 6;
    }
    return params.m < 8;
}

std::optional<SubgraphEquivocation> find_equivocation_subgraph(const GraphPair& pair, std::uint32_t n) {
    check_resource_guard({SchemeId::subgraph, pair[0].vertex_count(), n});
    if (pair[1].vertex_count() != pair[0].vertex_count()) {
        throw ParameterError("instances differ in size");
    }
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> first;
    OrderedSubsetWalk(pair[0], n).run([&](const auto& subset, std::uint64_t key) {
        first.try_emplace(key, subset);
        return true;
    });

    std::optional<SubgraphEquivocation> found;
    OrderedSubsetWalk(pair[1], n).run([&](const auto& subset, std::uint64_t key) {
        const auto it = first.find(key);
        if (it == first.end()) {
            return true;
        }
        OrderedSubset w0{it->second};
        OrderedSubset w1{subset};
        found = SubgraphEquivocation{subgraph::induced_subgraph(pair[0], w0), std::move(w0), std::move(w1)};
        return false;
    });
    return found;
}

std::optional<SumEquivocation> find_equivocation_subset_sum_plain(const KnapsackPair& pair) {
    const std::uint32_t m = pair[0].size();
    if (m > kMaxPlainSubsetSumM || pair[1].size() > kMaxPlainSubsetSumM) {
        throw ResourceGuardError("plain subset-sum enumeration is capped at m <= " +
                                 std::to_string(kMaxPlainSubsetSumM));
    }
    const auto s0 = nonzero_sums_sorted(pair[0]);
    const auto s1 = nonzero_sums_sorted(pair[1]);
    auto i = s0.begin();
    auto j = s1.begin();
    while (i != s0.end() && j != s1.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            const std::uint64_t d = *i;
            return SumEquivocation{d, subset_sum::find_all_representations_plain(d, pair[0]).front(),
                                   subset_sum::find_all_representations_plain(d, pair[1]).front()};
        }
    }
    return std::nullopt;
}

std::optional<SumEquivocation> find_equivocation_subset_sum_mitm(const KnapsackPair& pair) {
    if (pair[0].size() > kMaxMitmSubsetSumM || pair[1].size() > kMaxMitmSubsetSumM) {
        throw ResourceGuardError("meet-in-the-middle subset-sum search is capped at m <= " +
                                 std::to_string(kMaxMitmSubsetSumM));
    }
    SortedSums a(pair[0].elements());
    SortedSums b(pair[1].elements());
    while (!a.done() && !b.done()) {
        if (a.peek() < b.peek()) {
            a.next();
        } else if (b.peek() < a.peek()) {
            b.next();
        } else {
            const std::uint64_t d = a.peek();
            return SumEquivocation{d, subset_sum::find_all_representations_mitm(d, pair[0]).front(),
                                   subset_sum::find_all_representations_mitm(d, pair[1]).front()};
        }
    }
    return std::nullopt;
}

std::optional<SumEquivocation> find_equivocation_subset_sum(const KnapsackPair& pair) {
    return find_equivocation_subset_sum_mitm(pair);
}

bool equivocable(const SchemeParams& params, const InstancePair& pair) {
    check_resource_guard(params);
    if (params.scheme == SchemeId::subgraph) {
        return find_equivocation_subgraph(std::get<GraphPair>(pair.instances), params.n).has_value();
    }
    return find_equivocation_subset_sum(std::get<KnapsackPair>(pair.instances)).has_value();
}

Guess b_guess_bit(const SchemeParams& params, const InstancePair& pair, const Commitment& commitment, Rng& rng) {
    check_resource_guard(params);
    bool assoc[2];
    for (const Bit b : {Bit::zero, Bit::one}) {
        if (params.scheme == SchemeId::subgraph) {
            assoc[to_uint(b)] = subgraph::is_associated(std::get<SubgraphPayload>(commitment.payload), pair.graph(b));
        } else {
            assoc[to_uint(b)] = sum_associated(std::get<SumPayload>(commitment.payload).value, pair.knapsack(b));
        }
    }
    Guess g;
    if (assoc[0] != assoc[1]) {
        g.guess = assoc[1] ? Bit::one : Bit::zero;
        g.confidence = GuessConfidence::forced;
        return g;
    }
    g.guess = rng.bit();
    g.confidence = GuessConfidence::ambiguous;
    g.protocol_violation = !assoc[0];
    return g;
}

double exact_guess_success(const SchemeParams& params, const InstancePair& pair) {
    check_resource_guard(params);
    // An honest payload always fits c_a; B is right for sure when it fits only
    // c_a and half the time when it fits both.
    double success = 0.0;
    if (params.scheme == SchemeId::subgraph) {
        const auto& g = std::get<GraphPair>(pair.instances);
        const std::array<std::unordered_map<std::uint64_t, std::uint64_t>, 2> counts{key_counts(g[0], params.n),
                                                                                      key_counts(g[1], params.n)};
        const double total = static_cast<double>(subgraph::ordered_subset_count(params.m, params.n));
        for (int a = 0; a < 2; ++a) {
            std::uint64_t shared = 0;
            for (const auto& [key, count] : counts[a]) {
                if (counts[1 - a].count(key) != 0) {
                    shared += count;
                }
            }
            success += 0.5 * (1.0 - 0.5 * static_cast<double>(shared) / total);
        }
        return success;
    }
    if (params.m > kMaxPlainSubsetSumM) {
        throw ResourceGuardError("exact concealment for subset-sum is capped at m <= " +
                                 std::to_string(kMaxPlainSubsetSumM));
    }
    const auto& k = std::get<KnapsackPair>(pair.instances);
    const std::array<std::vector<std::uint64_t>, 2> sums{nonzero_sums_sorted(k[0]), nonzero_sums_sorted(k[1])};
    const double total = static_cast<double>(sums[0].size());
    for (int a = 0; a < 2; ++a) {
        std::uint64_t shared = 0;
        for (const std::uint64_t d : sums[a]) {
            shared += std::binary_search(sums[1 - a].begin(), sums[1 - a].end(), d) ? 1 : 0;
        }
        success += 0.5 * (1.0 - 0.5 * static_cast<double>(shared) / total);
    }
    return success;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) {
        return {0.0, 1.0};
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

BindingReport estimate_binding(const SchemeParams& params, std::uint64_t trials, std::uint64_t seed,
                               const HarnessOptions& options) {
    check_trials(trials);
    check_resource_guard(params);
    std::vector<std::uint8_t> hit(trials, 0);
    run_trials(trials, options.threads, [&](std::uint64_t t) {
        const InstancePair pair = seeded_instance_pair(params, derive_seed(seed, t));
        hit[t] = equivocable(params, pair) ? 1 : 0;
    });

    BindingReport r;
    r.params = params;
    r.trials = trials;
    r.seed = seed;
    r.equivocable = static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), 1));
    r.equivocable_fraction = static_cast<double>(r.equivocable) / static_cast<double>(trials);
    r.interval = wilson_interval(r.equivocable, trials);
    r.p0_hat = 1.0;
    r.p1_hat = r.equivocable_fraction;
    r.estimated_epsilon = std::max(0.0, r.p0_hat + r.p1_hat - 1.0);
    r.weak_params = weak_params(params);
    return r;
}

ConcealmentReport estimate_concealment(const SchemeParams& params, std::uint64_t trials, std::uint64_t seed,
                                       const HarnessOptions& options) {
    check_trials(trials);
    check_resource_guard(params);
    const bool exact =
        options.exact && (params.scheme == SchemeId::subgraph || params.m <= kMaxPlainSubsetSumM);

    struct Outcome {
        bool success = false;
        bool forced = false;
        bool violation = false;
        double exact = 0.0;
    };
    std::vector<Outcome> out(trials);
    run_trials(trials, options.threads, [&](std::uint64_t t) {
        const std::uint64_t trial_seed = derive_seed(seed, t);
        const InstancePair pair = seeded_instance_pair(params, trial_seed);
        Rng committer(derive_seed(trial_seed, 100));
        Rng verifier(derive_seed(trial_seed, 101));
        const Bit a = committer.bit();
        const CommitResult c = commit(params, pair, a, committer);
        const Guess g = b_guess_bit(params, pair, c.commitment, verifier);
        out[t] = {g.guess == a, g.confidence == GuessConfidence::forced, g.protocol_violation,
                  exact ? exact_guess_success(params, pair) : 0.0};
    });

    ConcealmentReport r;
    r.params = params;
    r.trials = trials;
    r.seed = seed;
    double exact_sum = 0.0;
    for (const Outcome& o : out) {
        r.successes += o.success;
        r.forced += o.forced;
        r.ambiguous += !o.forced;
        r.ambiguous_successes += !o.forced && o.success;
        r.protocol_violations += o.violation;
        exact_sum += o.exact;
    }
    const double n = static_cast<double>(trials);
    r.guess_advantage = static_cast<double>(r.successes) / n - 0.5;
    const Interval rate = wilson_interval(r.successes, trials);
    r.interval = {rate.lo - 0.5, rate.hi - 0.5};
    if (exact) {
        r.exact_advantage = exact_sum / n - 0.5;
    }
    r.weak_params = weak_params(params);
    return r;
}

AbortBiasReport measure_abort_bias(std::uint64_t tosses, std::uint64_t seed, std::uint32_t retry_limit) {
    check_trials(tosses);
    // She opens only when the outcome would be 1.
    HashBootstrapEngine engine(Rng(derive_seed(seed, 0)), Rng(derive_seed(seed, 1)), nullptr,
                               [](Bit a, Bit b) { return (a ^ b) == Bit::one; });
    TossSecurityParams params;
    params.abort_policy = AbortPolicy::retry;
    params.retry_limit = retry_limit;

    AbortBiasReport r;
    r.tosses = tosses;
    r.retry_limit = retry_limit;
    r.seed = seed;
    for (std::uint64_t i = 0; i < tosses; ++i) {
        try {
            const BitStream s = toss_stream(engine, 1, params);
            r.ones += to_uint(s.bits.front());
        } catch (const TossStreamError&) {
            ++r.failed_tosses;
        }
    }
    const std::uint64_t completed = tosses - r.failed_tosses;
    r.frequency_one = completed == 0 ? 0.0 : static_cast<double>(r.ones) / static_cast<double>(completed);
    r.interval = wilson_interval(r.ones, completed);
    return r;
}

} // namespace ct2bc::attack
