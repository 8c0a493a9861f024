#include "ct2bc/report.hpp"

#include <json.hpp>

namespace ct2bc::attack {
namespace {

using Json = nlohmann::ordered_json;

Json params_json(const SchemeParams& p) {
    return Json{{"scheme", std::string(to_string(p.scheme))}, {"m", p.m}, {"n", p.n}};
}

} // namespace

std::string to_json_line(const BindingReport& r) {
    Json j;
    j["report"] = "binding";
    j["params"] = params_json(r.params);
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["estimate"] = r.equivocable_fraction;
    j["interval_lo"] = r.interval.lo;
    j["interval_hi"] = r.interval.hi;
    j["equivocable"] = r.equivocable;
    j["equivocable_fraction"] = r.equivocable_fraction;
    j["p0_hat"] = r.p0_hat;
    j["p1_hat"] = r.p1_hat;
    j["estimated_epsilon"] = r.estimated_epsilon;
    j["bound"] = "best-found lower bound on cheating power";
    j["weak_params"] = r.weak_params;
    return j.dump();
}

std::string to_json_line(const ConcealmentReport& r) {
    Json j;
    j["report"] = "concealment";
    j["params"] = params_json(r.params);
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["estimate"] = r.guess_advantage;
    j["interval_lo"] = r.interval.lo;
    j["interval_hi"] = r.interval.hi;
    j["guess_advantage"] = r.guess_advantage;
    j["successes"] = r.successes;
    j["forced"] = r.forced;
    j["ambiguous"] = r.ambiguous;
    j["ambiguous_successes"] = r.ambiguous_successes;
    j["protocol_violations"] = r.protocol_violations;
    j["exact_advantage"] = r.exact_advantage ? Json(*r.exact_advantage) : Json(nullptr);
    j["weak_params"] = r.weak_params;
    return j.dump();
}

std::string to_json_line(const AbortBiasReport& r) {
    Json j;
    j["report"] = "abort-bias";
    j["tosses"] = r.tosses;
    j["retry_limit"] = r.retry_limit;
    j["seed"] = r.seed;
    j["estimate"] = r.frequency_one;
    j["interval_lo"] = r.interval.lo;
    j["interval_hi"] = r.interval.hi;
    j["ones"] = r.ones;
    j["failed_tosses"] = r.failed_tosses;
    j["frequency_one"] = r.frequency_one;
    return j.dump();
}

} // namespace ct2bc::attack
