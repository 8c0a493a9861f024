// ct2bc: run a commitment session, generate instances, or run the attacks.

#include "ct2bc/attack.hpp"
#include "ct2bc/errors.hpp"
#include "ct2bc/report.hpp"
#include "ct2bc/session.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <unistd.h>

using namespace ct2bc;
using session::Phase;

namespace {

constexpr int kExitAccepted = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRejected = 2;
constexpr int kExitAborted = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<std::uint64_t> env_test_seed() {
    const char* v = std::getenv("CT2BC_TEST_SEED");
    if (v == nullptr || *v == '\0') {
        return std::nullopt;
    }
    try {
        std::size_t used = 0;
        const auto seed = std::stoull(v, &used);
        if (used != std::strlen(v)) {
            throw std::invalid_argument(v);
        }
        return seed;
    } catch (const std::exception&) {
        throw UsageError(std::string("CT2BC_TEST_SEED is not an unsigned integer: ") + v);
    }
}

void warn_weak(const SchemeParams& p) {
    if (p.scheme == SchemeId::subgraph && p.n < 3) {
        std::cerr << "warning: n = " << p.n << " gives almost no binding (use n >= 3)\n";
    } else if (attack::weak_params(p)) {
        std::cerr << "warning: m = " << p.m << " is too small to mean anything\n";
    }
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("cannot write " + path);
    }
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read " + path);
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int exit_code(Phase phase) {
    switch (phase) {
    case Phase::accepted: return kExitAccepted;
    case Phase::rejected: return kExitRejected;
    default: return kExitAborted;
    }
}

nlohmann::ordered_json outcome_json(Phase phase, const std::optional<Verdict>& verdict,
                                    const std::optional<wire::AbortCode>& abort_reason) {
    nlohmann::ordered_json j;
    j["phase"] = std::string(session::to_string(phase));
    if (verdict && verdict->accepted) {
        j["bit"] = to_uint(verdict->bit);
    } else if (verdict) {
        j["reject_reason"] = std::string(to_string(verdict->reason));
    }
    if (abort_reason) {
        j["abort_reason"] = std::string(wire::to_string(*abort_reason));
    }
    return j;
}

// ---------------------------------------------------------------------------

struct RunArgs {
    std::string role;
    std::string scheme = "subgraph";
    std::uint32_t m = 6;
    std::optional<std::uint32_t> n; // subset-sum: defaults to m
    std::string toss = "seeded:0";
    std::string connect;
    std::string listen;
    bool stdio = false;
    std::optional<std::uint64_t> seed;
    std::string transcript_out;
    std::string report_out;
    unsigned bit = 0;
    double epsilon = 0.01;
    std::string abort_policy = "fail";
    std::uint32_t retry_limit = 0;
    int timeout_ms = 10000;
    bool tamper_unveil = false;
};

int cmd_run(const RunArgs& args) {
    session::SessionConfig cfg;
    cfg.role = session::parse_role(args.role);
    const SchemeId scheme = parse_scheme(args.scheme);
    cfg.scheme = {scheme, args.m, args.n.value_or(scheme == SchemeId::subset_sum ? args.m : 3)};
    cfg.scheme.validate();

    std::string toss = args.toss;
    if (args.seed) {
        if (toss != "seeded") {
            throw UsageError("--seed is only allowed with --toss seeded");
        }
        toss = "seeded:" + std::to_string(*args.seed);
    }
    cfg.engine = EngineSpec::parse(toss);
    cfg.toss.epsilon_target = args.epsilon;
    cfg.toss.abort_policy = args.abort_policy == "retry" ? AbortPolicy::retry : AbortPolicy::fail_session;
    cfg.toss.retry_limit = args.retry_limit;
    cfg.toss.validate();
    cfg.test_seed = env_test_seed();
    cfg.committed_bit = bit_from(args.bit);
    cfg.tamper_unveil = args.tamper_unveil;
    warn_weak(cfg.scheme);

    const int transports = !args.connect.empty() + !args.listen.empty() + args.stdio;
    if (transports != 1) {
        throw UsageError("exactly one of --connect, --listen, --stdio is required");
    }
    const std::chrono::milliseconds timeout(args.timeout_ms);
    std::unique_ptr<session::Channel> channel;
    if (args.stdio) {
        channel = std::make_unique<session::FdChannel>(STDIN_FILENO, STDOUT_FILENO, timeout, false);
    } else if (!args.listen.empty()) {
        channel = session::tcp_listen(args.listen, timeout);
    } else {
        channel = session::tcp_connect(args.connect, timeout);
    }

    const session::SessionResult result = session::run_session(cfg, *channel);
    channel->close();

    if (!args.transcript_out.empty()) {
        write_file(args.transcript_out, result.transcript.serialize());
    }
    nlohmann::ordered_json j{{"report", "session"}, {"role", std::string(session::to_string(cfg.role))}};
    j.update(outcome_json(result.phase, result.verdict, result.abort_reason));
    if (!args.report_out.empty()) {
        std::ofstream(args.report_out, std::ios::trunc) << j.dump() << '\n';
    }
    std::ostringstream line;
    line << session::to_string(cfg.role) << ": " << session::to_string(result.phase);
    if (result.verdict && result.verdict->accepted) {
        line << " (bit " << to_uint(result.verdict->bit) << ")";
    } else if (result.verdict) {
        line << " (" << to_string(result.verdict->reason) << ")";
    }
    if (result.abort_reason) {
        line << " (" << wire::to_string(*result.abort_reason) << ")";
    }
    line << '\n';
    std::cerr << line.str() << std::flush;
    return exit_code(result.phase);
}

// ---------------------------------------------------------------------------

struct AttackArgs {
    std::string kind;
    std::string scheme = "subgraph";
    std::uint32_t m = 6;
    std::uint32_t n = 3;
    std::uint64_t trials = 100;
    std::uint64_t seed = 0;
    std::string grid;
    unsigned threads = 1;
    bool no_exact = false;
    std::uint32_t retry_limit = 3;
    std::string report_out;
};

// "m=4..8,n=3": each key takes a value or an inclusive range.
std::vector<SchemeParams> expand_grid(const AttackArgs& args) {
    const SchemeId scheme = parse_scheme(args.scheme);
    std::vector<std::uint32_t> ms{args.m};
    std::vector<std::uint32_t> ns{args.n};
    if (!args.grid.empty()) {
        static const std::regex item(R"(^\s*([mn])\s*=\s*(\d+)(?:\.\.(\d+))?\s*$)");
        std::stringstream ss(args.grid);
        std::string part;
        while (std::getline(ss, part, ',')) {
            std::smatch match;
            if (!std::regex_match(part, match, item)) {
                throw UsageError("bad --grid item '" + part + "' (expected m=4..8 or n=3)");
            }
            const auto lo = static_cast<std::uint32_t>(std::stoul(match[2]));
            const auto hi = match[3].matched ? static_cast<std::uint32_t>(std::stoul(match[3])) : lo;
            if (hi < lo) {
                throw UsageError("empty range in --grid");
            }
            auto& dst = match[1] == "m" ? ms : ns;
            dst.clear();
            for (std::uint32_t v = lo; v <= hi; ++v) {
                dst.push_back(v);
            }
        }
    }
    std::vector<SchemeParams> cells;
    for (const auto m : ms) {
        for (const auto n : ns) {
            cells.push_back({scheme, m, scheme == SchemeId::subset_sum ? m : n});
        }
    }
    if (scheme == SchemeId::subset_sum) {
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    }
    return cells;
}

int cmd_attack(const AttackArgs& args) {
    std::vector<std::string> lines;
    if (args.kind == "abort-bias") {
        lines.push_back(attack::to_json_line(attack::measure_abort_bias(args.trials, args.seed, args.retry_limit)));
    } else {
        const auto cells = expand_grid(args);
        for (const SchemeParams& p : cells) {
            attack::check_resource_guard(p);
        }
        attack::HarnessOptions opts{args.threads, !args.no_exact};
        for (const SchemeParams& p : cells) {
            warn_weak(p);
            lines.push_back(args.kind == "binding"
                                ? attack::to_json_line(attack::estimate_binding(p, args.trials, args.seed, opts))
                                : attack::to_json_line(attack::estimate_concealment(p, args.trials, args.seed, opts)));
        }
    }
    std::ofstream file;
    if (!args.report_out.empty()) {
        file.open(args.report_out, std::ios::trunc);
    }
    for (const auto& line : lines) {
        std::cout << line << '\n';
        if (file.is_open()) {
            file << line << '\n';
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_gen(const std::string& scheme, std::uint32_t m, std::uint32_t n, std::uint64_t seed) {
    SchemeParams p{parse_scheme(scheme), m, n};
    if (p.scheme == SchemeId::subset_sum) {
        p.n = m;
    }
    p.validate();
    const InstancePair pair = seeded_instance_pair(p, seed);
    nlohmann::ordered_json j;
    j["params"] = {{"scheme", std::string(to_string(p.scheme))}, {"m", p.m}, {"n", p.n}};
    j["seed"] = seed;
    j["tosses"] = pair.generation.bits.size();
    j["regeneration_tosses"] = pair.regeneration_tosses;
    for (const Bit b : {Bit::zero, Bit::one}) {
        const std::string key = b == Bit::zero ? "c0" : "c1";
        if (p.scheme == SchemeId::subgraph) {
            auto edges = nlohmann::ordered_json::array();
            for (const auto& [i, k] : pair.graph(b).edges()) {
                edges.push_back({i, k});
            }
            j[key] = edges;
        } else {
            const auto el = pair.knapsack(b).elements();
            j[key] = std::vector<std::uint64_t>(el.begin(), el.end());
        }
    }
    std::cout << j.dump() << '\n';
    return 0;
}

int cmd_replay(const std::string& path) {
    const auto bytes = read_file(path);
    const session::Transcript t = session::Transcript::parse(bytes);
    const session::ReplayResult r = session::replay(t);
    auto j = outcome_json(r.phase, r.verdict, r.abort_reason);
    j["role"] = std::string(session::to_string(t.header.role));
    j["entries"] = t.entries.size();
    j["outgoing_matched"] = r.outgoing_matched;
    std::cout << j.dump() << '\n';
    if (!r.outgoing_matched) {
        std::cerr << "replay diverged from the recorded transcript\n";
        return kExitUsage;
    }
    return exit_code(r.phase);
}

} // namespace

int main(int argc, char** argv) {
    std::signal(SIGPIPE, SIG_IGN);

    CLI::App app{"Bit commitment from coin tossing"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "run one party of a commitment session");
    run_cmd->add_option("--role", run.role, "a (committer) or b (verifier)")->required();
    run_cmd->add_option("--scheme", run.scheme)->check(CLI::IsMember({"subgraph", "subset-sum"}));
    run_cmd->add_option("--m", run.m);
    run_cmd->add_option("--n", run.n);
    run_cmd->add_option("--toss", run.toss, "seeded[:SEED] | relativistic-sim | hash-bootstrap");
    run_cmd->add_option("--connect", run.connect, "host:port");
    run_cmd->add_option("--listen", run.listen, "host:port");
    run_cmd->add_flag("--stdio", run.stdio, "frames on stdin/stdout");
    run_cmd->add_option("--seed", run.seed, "seed for --toss seeded");
    run_cmd->add_option("--transcript-out", run.transcript_out);
    run_cmd->add_option("--report-out", run.report_out);
    run_cmd->add_option("--bit", run.bit, "bit to commit (committer)")->check(CLI::Range(0, 1));
    run_cmd->add_option("--epsilon", run.epsilon);
    run_cmd->add_option("--abort-policy", run.abort_policy)->check(CLI::IsMember({"fail", "retry"}));
    run_cmd->add_option("--retry-limit", run.retry_limit);
    run_cmd->add_option("--timeout-ms", run.timeout_ms)->check(CLI::PositiveNumber);
    run_cmd->add_flag("--tamper-unveil", run.tamper_unveil)->group("");

    AttackArgs atk;
    auto* attack_cmd = app.add_subcommand("attack", "estimate binding, concealment or abort bias");
    attack_cmd->add_option("kind", atk.kind)->required()->check(CLI::IsMember({"binding", "concealment", "abort-bias"}));
    attack_cmd->add_option("--scheme", atk.scheme)->check(CLI::IsMember({"subgraph", "subset-sum"}));
    attack_cmd->add_option("--m", atk.m);
    attack_cmd->add_option("--n", atk.n);
    attack_cmd->add_option("--trials", atk.trials, "trials per cell (tosses for abort-bias)");
    attack_cmd->add_option("--seed", atk.seed);
    attack_cmd->add_option("--grid", atk.grid, "e.g. m=4..8,n=3");
    attack_cmd->add_option("--threads", atk.threads)->check(CLI::Range(1u, 256u));
    attack_cmd->add_flag("--no-exact", atk.no_exact, "skip the exact concealment advantage");
    attack_cmd->add_option("--retry-limit", atk.retry_limit, "abort-bias only");
    attack_cmd->add_option("--report-out", atk.report_out);

    std::string gen_scheme = "subgraph";
    std::uint32_t gen_m = 6;
    std::uint32_t gen_n = 3;
    std::uint64_t gen_seed = 0;
    auto* gen_cmd = app.add_subcommand("gen", "print a seeded instance pair as JSON");
    gen_cmd->add_option("--scheme", gen_scheme)->check(CLI::IsMember({"subgraph", "subset-sum"}));
    gen_cmd->add_option("--m", gen_m);
    gen_cmd->add_option("--n", gen_n);
    gen_cmd->add_option("--seed", gen_seed);

    std::string replay_path;
    auto* replay_cmd = app.add_subcommand("replay", "re-run a recorded transcript and compare");
    replay_cmd->add_option("file", replay_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*run_cmd) {
            return cmd_run(run);
        }
        if (*attack_cmd) {
            return cmd_attack(atk);
        }
        if (*gen_cmd) {
            return cmd_gen(gen_scheme, gen_m, gen_n, gen_seed);
        }
        return cmd_replay(replay_path);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ResourceGuardError& e) {
        std::cerr << "error: resource guard: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FrameError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAborted;
    }
}
