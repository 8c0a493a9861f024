#include "ct2bc/attack.hpp"
#include "ct2bc/errors.hpp"
#include "ct2bc/report.hpp"
#include "ct2bc/session.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace ct2bc;

namespace {

SchemeParams params(const std::string& scheme, std::uint32_t m, std::optional<std::uint32_t> n) {
    SchemeParams p{parse_scheme(scheme), m, 0};
    p.n = p.scheme == SchemeId::subset_sum ? m : n.value_or(3);
    p.validate();
    return p;
}

py::dict instance_dict(const InstancePair& pair) {
    py::dict d;
    for (const Bit b : {Bit::zero, Bit::one}) {
        const char* key = b == Bit::zero ? "c0" : "c1";
        if (pair.scheme() == SchemeId::subgraph) {
            d[key] = pair.graph(b).edges();
        } else {
            const auto el = pair.knapsack(b).elements();
            d[key] = std::vector<std::uint64_t>(el.begin(), el.end());
        }
    }
    d["tosses"] = pair.generation.bits.size();
    d["regeneration_tosses"] = pair.regeneration_tosses;
    return d;
}

py::dict side_dict(const session::SessionResult& r) {
    py::dict d;
    d["phase"] = std::string(session::to_string(r.phase));
    if (r.verdict && r.verdict->accepted) {
        d["bit"] = static_cast<int>(to_uint(r.verdict->bit));
    } else {
        d["bit"] = py::none();
    }
    if (r.verdict && !r.verdict->accepted) {
        d["reject_reason"] = std::string(to_string(r.verdict->reason));
    } else {
        d["reject_reason"] = py::none();
    }
    d["abort_reason"] = r.abort_reason ? py::cast(std::string(wire::to_string(*r.abort_reason))) : py::none();
    const auto bytes = r.transcript.serialize();
    d["transcript"] = py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    return d;
}

session::SessionConfig side_config(session::Role role, const SchemeParams& p, const std::string& engine,
                                   std::optional<std::uint64_t> seed, int bit) {
    session::SessionConfig c;
    c.role = role;
    c.scheme = p;
    c.engine = EngineSpec::parse(engine);
    c.test_seed = seed;
    c.committed_bit = bit_from(static_cast<unsigned>(bit));
    return c;
}

py::dict run_local(const std::string& scheme, std::uint32_t m, std::optional<std::uint32_t> n, int bit,
                   const std::string& engine, std::optional<std::uint64_t> seed) {
    const auto p = params(scheme, m, n);
    const auto stream = [&](std::uint64_t k) -> std::optional<std::uint64_t> {
        if (!seed) {
            return std::nullopt;
        }
        return derive_seed(*seed, k);
    };
    session::PairResult r;
    {
        py::gil_scoped_release release;
        r = session::run_local_pair(side_config(session::Role::committer, p, engine, stream(1), bit),
                                    side_config(session::Role::verifier, p, engine, stream(2), 0));
    }
    py::dict d;
    d["committer"] = side_dict(r.committer);
    d["verifier"] = side_dict(r.verifier);
    return d;
}

py::dict replay(const py::bytes& data) {
    const std::string raw = data;
    const auto t = session::Transcript::parse(
        std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
    const auto r = session::replay(t);
    py::dict d;
    d["role"] = std::string(session::to_string(t.header.role));
    d["phase"] = std::string(session::to_string(r.phase));
    d["entries"] = t.entries.size();
    d["outgoing_matched"] = r.outgoing_matched;
    return d;
}

} // namespace

PYBIND11_MODULE(_ct2bc, m) {
    m.doc() = "Bit commitment from coin tossing";

    auto base = py::register_exception<Error>(m, "Ct2bcError");
    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<ResourceGuardError>(m, "ResourceGuardError", base.ptr());
    py::register_exception<FrameError>(m, "FrameError", base.ptr());

    m.def(
        "gen",
        [](const std::string& scheme, std::uint32_t m_, std::optional<std::uint32_t> n, std::uint64_t seed) {
            return instance_dict(seeded_instance_pair(params(scheme, m_, n), seed));
        },
        py::arg("scheme"), py::arg("m"), py::arg("n") = py::none(), py::arg("seed") = 0);

    m.def("bits_required", [](const std::string& scheme, std::uint32_t m_, std::optional<std::uint32_t> n) {
        return bits_required(params(scheme, m_, n));
    }, py::arg("scheme"), py::arg("m"), py::arg("n") = py::none());

    m.def("run_local", &run_local, py::arg("scheme"), py::arg("m"), py::arg("n") = py::none(), py::arg("bit") = 0,
          py::arg("engine") = "seeded:0", py::arg("seed") = py::none(),
          "Run committer and verifier in-process and return both outcomes.");

    m.def("replay", &replay, py::arg("transcript"));

    // Reports come back as their JSON lines; the package wrapper parses them.
    m.def(
        "binding_json",
        [](const std::string& scheme, std::uint32_t m_, std::optional<std::uint32_t> n, std::uint64_t trials,
           std::uint64_t seed, unsigned threads) {
            const auto p = params(scheme, m_, n);
            py::gil_scoped_release release;
            return to_json_line(attack::estimate_binding(p, trials, seed, {threads, true}));
        },
        py::arg("scheme"), py::arg("m"), py::arg("n") = py::none(), py::arg("trials") = 1000, py::arg("seed") = 0,
        py::arg("threads") = 1);

    m.def(
        "concealment_json",
        [](const std::string& scheme, std::uint32_t m_, std::optional<std::uint32_t> n, std::uint64_t trials,
           std::uint64_t seed, unsigned threads, bool exact) {
            const auto p = params(scheme, m_, n);
            py::gil_scoped_release release;
            return to_json_line(attack::estimate_concealment(p, trials, seed, {threads, exact}));
        },
        py::arg("scheme"), py::arg("m"), py::arg("n") = py::none(), py::arg("trials") = 1000, py::arg("seed") = 0,
        py::arg("threads") = 1, py::arg("exact") = true);

    m.def(
        "abort_bias_json",
        [](std::uint64_t tosses, std::uint64_t seed, std::uint32_t retry_limit) {
            py::gil_scoped_release release;
            return to_json_line(attack::measure_abort_bias(tosses, seed, retry_limit));
        },
        py::arg("tosses") = 10000, py::arg("seed") = 0, py::arg("retry_limit") = 0);
}
