#include <stdexcept>
#include <string>

#include "json.hpp"
#include "tracelab/cli.hpp"

namespace tracelab {

namespace {

using njson = nlohmann::json;

const char* kind_name(WeightSpec::Kind k) {
    switch (k) {
        case WeightSpec::Kind::dirac: return "dirac";
        case WeightSpec::Kind::additive: return "additive";
        case WeightSpec::Kind::mixed_char: return "mixed-char";
        case WeightSpec::Kind::kloosterman: return "kloosterman";
        case WeightSpec::Kind::hyper_kloosterman: return "hyper-kloosterman";
        case WeightSpec::Kind::hk_composite: return "hk-composite";
        case WeightSpec::Kind::fiber_count: return "fiber-count";
        case WeightSpec::Kind::dual_fiber: return "dual-fiber";
        case WeightSpec::Kind::legendre: return "legendre";
        case WeightSpec::Kind::quadratic_phase: return "quadratic-phase";
        case WeightSpec::Kind::constant: return "constant";
    }
    return "constant";
}

WeightSpec::Kind kind_from_name(const std::string& name) {
    for (auto k : {WeightSpec::Kind::dirac, WeightSpec::Kind::additive, WeightSpec::Kind::mixed_char,
                   WeightSpec::Kind::kloosterman, WeightSpec::Kind::hyper_kloosterman,
                   WeightSpec::Kind::hk_composite, WeightSpec::Kind::fiber_count,
                   WeightSpec::Kind::dual_fiber, WeightSpec::Kind::legendre,
                   WeightSpec::Kind::quadratic_phase, WeightSpec::Kind::constant}) {
        if (name == kind_name(k)) return k;
    }
    throw std::invalid_argument("weight: unknown kind '" + name + "'");
}

JsonValue int_list(const std::vector<i64>& v) {
    JsonValue arr = JsonValue::array();
    for (i64 x : v) arr.push(x);
    return arr;
}

std::vector<i64> int_list_from(const njson& j, const char* field) {
    if (!j.is_array()) throw std::invalid_argument(std::string("weight: field '") + field + "' must be an array");
    std::vector<i64> out;
    for (const auto& x : j) out.push_back(x.get<i64>());
    return out;
}

}  // namespace

JsonValue weight_spec_to_json(const WeightSpec& spec) {
    JsonValue j = JsonValue::object();
    j.set("kind", kind_name(spec.kind));
    switch (spec.kind) {
        case WeightSpec::Kind::dirac:
            j.set("u", spec.shift);
            break;
        case WeightSpec::Kind::additive:
        case WeightSpec::Kind::kloosterman:
            j.set("a", spec.shift);
            break;
        case WeightSpec::Kind::hyper_kloosterman:
            j.set("m", std::int64_t(spec.m));
            break;
        case WeightSpec::Kind::mixed_char:
            j.set("chi", std::int64_t(spec.chi_index));
            j.set("phi1_num", int_list(spec.phi1_num));
            j.set("phi1_den", int_list(spec.phi1_den));
            j.set("phi2_num", int_list(spec.phi2_num));
            j.set("phi2_den", int_list(spec.phi2_den));
            break;
        case WeightSpec::Kind::hk_composite: {
            j.set("m", std::int64_t(spec.m));
            j.set("phi_num", int_list(spec.phi1_num));
            j.set("phi_den", int_list(spec.phi1_den));
            JsonValue grid = JsonValue::array();
            for (const auto& row : spec.big_phi) {
                JsonValue jrow = JsonValue::array();
                for (cplx c : row) jrow.push(json_complex(c));
                grid.push(std::move(jrow));
            }
            j.set("big_phi", std::move(grid));
            break;
        }
        case WeightSpec::Kind::fiber_count:
        case WeightSpec::Kind::dual_fiber:
            j.set("phi", int_list(spec.phi1_num));
            break;
        default:
            break;
    }
    return j;
}

WeightSpec weight_spec_from_json_text(const std::string& text) {
    njson j = njson::parse(text);
    if (!j.is_object() || !j.contains("kind")) {
        throw std::invalid_argument("weight: descriptor must be an object with a 'kind' field");
    }
    WeightSpec spec;
    spec.kind = kind_from_name(j["kind"].get<std::string>());
    switch (spec.kind) {
        case WeightSpec::Kind::dirac:
            spec.shift = j.value("u", i64(1));
            break;
        case WeightSpec::Kind::additive:
        case WeightSpec::Kind::kloosterman:
            spec.shift = j.value("a", i64(1));
            break;
        case WeightSpec::Kind::hyper_kloosterman:
            spec.m = j.value("m", 3u);
            break;
        case WeightSpec::Kind::mixed_char:
            spec.chi_index = j.value("chi", 1u);
            if (j.contains("phi1_num")) spec.phi1_num = int_list_from(j["phi1_num"], "phi1_num");
            if (j.contains("phi1_den")) spec.phi1_den = int_list_from(j["phi1_den"], "phi1_den");
            if (j.contains("phi2_num")) spec.phi2_num = int_list_from(j["phi2_num"], "phi2_num");
            if (j.contains("phi2_den")) spec.phi2_den = int_list_from(j["phi2_den"], "phi2_den");
            break;
        case WeightSpec::Kind::hk_composite: {
            spec.m = j.value("m", 2u);
            if (j.contains("phi_num")) spec.phi1_num = int_list_from(j["phi_num"], "phi_num");
            if (j.contains("phi_den")) spec.phi1_den = int_list_from(j["phi_den"], "phi_den");
            if (j.contains("big_phi")) {
                for (const auto& row : j["big_phi"]) {
                    std::vector<cplx> r;
                    for (const auto& entry : row) {
                        r.emplace_back(entry.at(0).get<double>(), entry.at(1).get<double>());
                    }
                    spec.big_phi.push_back(std::move(r));
                }
            } else {
                spec.big_phi = {{cplx{0.0, 0.0}}, {cplx{1.0, 0.0}}};  // Phi = U
            }
            break;
        }
        case WeightSpec::Kind::fiber_count:
        case WeightSpec::Kind::dual_fiber:
            spec.phi1_num = j.contains("phi") ? int_list_from(j["phi"], "phi")
                                              : std::vector<i64>{0, 0, 1};
            break;
        default:
            break;
    }
    return spec;
}

WeightSpec parse_weight_arg(const std::string& arg) {
    if (!arg.empty() && arg.front() == '{') return weight_spec_from_json_text(arg);
    WeightSpec spec;
    spec.kind = kind_from_name(arg);
    switch (spec.kind) {
        case WeightSpec::Kind::dirac:
        case WeightSpec::Kind::additive:
        case WeightSpec::Kind::kloosterman:
            spec.shift = 1;
            break;
        case WeightSpec::Kind::hyper_kloosterman:
            spec.m = 3;
            break;
        case WeightSpec::Kind::mixed_char:
            spec.chi_index = 1;
            spec.phi1_num = {0};
            spec.phi2_num = {0, 1};
            break;
        case WeightSpec::Kind::hk_composite:
            spec.m = 2;
            spec.phi1_num = {0, 1};
            spec.big_phi = {{cplx{0.0, 0.0}}, {cplx{1.0, 0.0}}};
            break;
        case WeightSpec::Kind::fiber_count:
        case WeightSpec::Kind::dual_fiber:
            spec.phi1_num = {0, 0, 1};
            break;
        default:
            break;
    }
    return spec;
}

JsonValue config_to_json(const ExperimentConfig& cfg) {
    JsonValue j = JsonValue::object();
    j.set("schema", kSchemaTag);
    j.set("command", cfg.command);
    JsonValue primes = JsonValue::array();
    for (u32 p : cfg.primes) primes.push(std::int64_t(p));
    j.set("primes", std::move(primes));
    j.set("weight", weight_spec_to_json(cfg.weight));
    j.set("M", cfg.M);
    j.set("P", cfg.P);
    j.set("interval_lo", std::int64_t(cfg.interval_lo));
    j.set("interval_hi", std::int64_t(cfg.interval_hi));
    j.set("seed", std::int64_t(cfg.seed));
    j.set("threads", std::int64_t(cfg.threads));
    j.set("level", std::int64_t(cfg.level));
    j.set("count", std::int64_t(cfg.count));
    j.set("gamma", int_list(cfg.gamma_entries));
    j.set("tau", JsonValue::array().push(cfg.tau_x).push(cfg.tau_y));
    j.set("n_max", std::int64_t(cfg.n_max));
    j.set("poly", int_list(cfg.poly));
    return j;
}

ExperimentConfig config_from_json_text(const std::string& text) {
    njson j = njson::parse(text);
    ExperimentConfig cfg;
    cfg.command = j.value("command", std::string());
    for (const auto& p : j.value("primes", njson::array())) cfg.primes.push_back(p.get<u32>());
    if (j.contains("weight")) cfg.weight = weight_spec_from_json_text(j["weight"].dump());
    cfg.M = j.value("M", 1.0);
    cfg.P = j.value("P", 0.5);
    cfg.interval_lo = j.value("interval_lo", 0u);
    cfg.interval_hi = j.value("interval_hi", 0u);
    cfg.seed = j.value("seed", u64(1));
    cfg.threads = j.value("threads", 0);
    cfg.level = j.value("level", 2u);
    cfg.count = j.value("count", u64(100));
    if (j.contains("gamma")) cfg.gamma_entries = int_list_from(j["gamma"], "gamma");
    if (j.contains("tau") && j["tau"].is_array() && j["tau"].size() == 2) {
        cfg.tau_x = j["tau"][0].get<double>();
        cfg.tau_y = j["tau"][1].get<double>();
    }
    cfg.n_max = j.value("n_max", u64(0));
    if (j.contains("poly")) cfg.poly = int_list_from(j["poly"], "poly");
    return cfg;
}

}  // namespace tracelab
