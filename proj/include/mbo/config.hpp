#pragma once

// Run configuration: flat `key = value` text files with `#` comments.
// Unknown keys are rejected; every default is materialized into the
// canonical text, whose FNV-1a hash is the provenance stamp carried by
// every report and summary.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbo/ensemble.hpp"
#include "mbo/equations.hpp"
#include "mbo/field.hpp"
#include "mbo/report.hpp"

namespace mbo::config {

struct RunConfig {
    // equation
    equations::EquationKind kind = equations::EquationKind::mbo;
    equations::Sign sign = equations::Sign::defocusing;
    // grid
    int grid_n = 128;
    // initial datum
    std::string u0_preset = "cosine";  // cosine | two-mode | random
    double u0_amp = 1.0;
    int u0_mode = 1;
    double u0_amp2 = 0.2;
    int u0_mode2 = 2;
    std::uint64_t u0_seed = 1;
    int u0_bandwidth = 8;
    double u0_decay = 1.0;
    // integrator
    double dt = 1e-3;
    double t_end = 1.0;
    int stride = 10;
    double blowup_threshold = 1e6;
    // verification campaign
    std::uint64_t verify_seed = 1;
    int verify_trials = 100;
    int probe_trials = 200;
    double identity_tol = 1e-9;
    double order2_lo = 1.8;
    double order2_hi = 2.2;
    double drift_factor_lo = 11.0;
    double drift_factor_hi = 22.0;
    double mean_drift_tol = 1e-11;
    double probe_ratio_max = 10.0;
    double probe_slope_max = 0.1;
    double continuity_spread = 3.0;
    int ident_bandwidth = 6;
    double ident_amplitude = 0.35;
    // norms command
    std::string norms_spec = "hs:0,hs:0.5,hs:1";

    equations::EquationSpec equation() const {
        switch (kind) {
            case equations::EquationKind::mbo: return equations::EquationSpec::mbo_spec(sign);
            case equations::EquationKind::wicked: return equations::EquationSpec::wicked_spec();
            case equations::EquationKind::bo: return equations::EquationSpec::bo_spec();
        }
        throw std::logic_error("RunConfig: bad kind");
    }

    PeriodicField initial_datum() const {
        const Grid grid(grid_n);
        if (u0_preset == "cosine") {
            return PeriodicField::from_modes(
                grid, {{u0_mode, 0.5 * u0_amp}, {-u0_mode, 0.5 * u0_amp}}, true);
        }
        if (u0_preset == "two-mode") {
            return PeriodicField::from_modes(grid,
                                             {{u0_mode, 0.5 * u0_amp},
                                              {-u0_mode, 0.5 * u0_amp},
                                              {u0_mode2, 0.5 * u0_amp2},
                                              {-u0_mode2, 0.5 * u0_amp2}},
                                             true);
        }
        if (u0_preset == "random") {
            ensemble::Rng rng(u0_seed);
            return ensemble::random_real_field(
                grid,
                {.bandwidth = u0_bandwidth, .decay = u0_decay, .target_h_half = u0_amp,
                 .include_mean = false},
                rng);
        }
        throw std::invalid_argument("RunConfig: unknown u0.preset: " + u0_preset);
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("config: bad number for " + key + ": " + v);
    return x;
}

inline long long to_int(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("config: bad integer for " + key + ": " + v);
    return x;
}

}  // namespace detail

inline RunConfig parse(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": empty key or value");
        if (kv.count(key))
            throw std::invalid_argument("config: duplicate key: " + key);
        kv[key] = value;
    }

    RunConfig c;
    const auto take = [&kv](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("equation.kind")) {
        if (*v == "mbo") c.kind = equations::EquationKind::mbo;
        else if (*v == "wicked") c.kind = equations::EquationKind::wicked;
        else if (*v == "bo") c.kind = equations::EquationKind::bo;
        else throw std::invalid_argument("config: equation.kind must be mbo|wicked|bo");
    }
    const auto sign_given = take("equation.sign");
    if (sign_given) {
        if (c.kind != equations::EquationKind::mbo)
            throw std::invalid_argument("config: equation.sign is only valid for kind = mbo");
        if (*sign_given == "defocusing") c.sign = equations::Sign::defocusing;
        else if (*sign_given == "focusing") c.sign = equations::Sign::focusing;
        else throw std::invalid_argument("config: equation.sign must be defocusing|focusing");
    }
    if (auto v = take("grid.n")) c.grid_n = static_cast<int>(detail::to_int("grid.n", *v));
    if (auto v = take("u0.preset")) c.u0_preset = *v;
    if (auto v = take("u0.amp")) c.u0_amp = detail::to_double("u0.amp", *v);
    if (auto v = take("u0.mode")) c.u0_mode = static_cast<int>(detail::to_int("u0.mode", *v));
    if (auto v = take("u0.amp2")) c.u0_amp2 = detail::to_double("u0.amp2", *v);
    if (auto v = take("u0.mode2")) c.u0_mode2 = static_cast<int>(detail::to_int("u0.mode2", *v));
    if (auto v = take("u0.seed")) c.u0_seed = static_cast<std::uint64_t>(detail::to_int("u0.seed", *v));
    if (auto v = take("u0.bandwidth"))
        c.u0_bandwidth = static_cast<int>(detail::to_int("u0.bandwidth", *v));
    if (auto v = take("u0.decay")) c.u0_decay = detail::to_double("u0.decay", *v);
    if (auto v = take("integrator.dt")) c.dt = detail::to_double("integrator.dt", *v);
    if (auto v = take("integrator.t_end")) c.t_end = detail::to_double("integrator.t_end", *v);
    if (auto v = take("integrator.stride"))
        c.stride = static_cast<int>(detail::to_int("integrator.stride", *v));
    if (auto v = take("integrator.blowup_threshold"))
        c.blowup_threshold = detail::to_double("integrator.blowup_threshold", *v);
    if (auto v = take("verify.seed"))
        c.verify_seed = static_cast<std::uint64_t>(detail::to_int("verify.seed", *v));
    if (auto v = take("verify.trials"))
        c.verify_trials = static_cast<int>(detail::to_int("verify.trials", *v));
    if (auto v = take("verify.probe_trials"))
        c.probe_trials = static_cast<int>(detail::to_int("verify.probe_trials", *v));
    if (auto v = take("verify.identity_tol")) c.identity_tol = detail::to_double("verify.identity_tol", *v);
    if (auto v = take("verify.order2_lo")) c.order2_lo = detail::to_double("verify.order2_lo", *v);
    if (auto v = take("verify.order2_hi")) c.order2_hi = detail::to_double("verify.order2_hi", *v);
    if (auto v = take("verify.drift_factor_lo"))
        c.drift_factor_lo = detail::to_double("verify.drift_factor_lo", *v);
    if (auto v = take("verify.drift_factor_hi"))
        c.drift_factor_hi = detail::to_double("verify.drift_factor_hi", *v);
    if (auto v = take("verify.mean_drift_tol"))
        c.mean_drift_tol = detail::to_double("verify.mean_drift_tol", *v);
    if (auto v = take("verify.probe_ratio_max"))
        c.probe_ratio_max = detail::to_double("verify.probe_ratio_max", *v);
    if (auto v = take("verify.probe_slope_max"))
        c.probe_slope_max = detail::to_double("verify.probe_slope_max", *v);
    if (auto v = take("verify.continuity_spread"))
        c.continuity_spread = detail::to_double("verify.continuity_spread", *v);
    if (auto v = take("verify.ident_bandwidth"))
        c.ident_bandwidth = static_cast<int>(detail::to_int("verify.ident_bandwidth", *v));
    if (auto v = take("verify.ident_amplitude"))
        c.ident_amplitude = detail::to_double("verify.ident_amplitude", *v);
    if (auto v = take("norms.spec")) c.norms_spec = *v;

    if (!kv.empty()) throw std::invalid_argument("config: unknown key: " + kv.begin()->first);

    Grid check(c.grid_n);  // validates
    (void)check;
    if (!(c.dt > 0.0)) throw std::invalid_argument("config: integrator.dt must be positive");
    if (c.stride < 1) throw std::invalid_argument("config: integrator.stride must be >= 1");
    return c;
}

inline RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

// Canonical text: every effective key (defaults included), sorted, one per
// line. The provenance hash is the FNV-1a of exactly this text.
inline std::string canonical_text(const RunConfig& c) {
    std::map<std::string, std::string> kv;
    switch (c.kind) {
        case equations::EquationKind::mbo: kv["equation.kind"] = "mbo"; break;
        case equations::EquationKind::wicked: kv["equation.kind"] = "wicked"; break;
        case equations::EquationKind::bo: kv["equation.kind"] = "bo"; break;
    }
    if (c.kind == equations::EquationKind::mbo)
        kv["equation.sign"] = c.sign == equations::Sign::defocusing ? "defocusing" : "focusing";
    kv["grid.n"] = std::to_string(c.grid_n);
    kv["u0.preset"] = c.u0_preset;
    kv["u0.amp"] = report::format_double(c.u0_amp);
    kv["u0.mode"] = std::to_string(c.u0_mode);
    kv["u0.amp2"] = report::format_double(c.u0_amp2);
    kv["u0.mode2"] = std::to_string(c.u0_mode2);
    kv["u0.seed"] = std::to_string(c.u0_seed);
    kv["u0.bandwidth"] = std::to_string(c.u0_bandwidth);
    kv["u0.decay"] = report::format_double(c.u0_decay);
    kv["integrator.dt"] = report::format_double(c.dt);
    kv["integrator.t_end"] = report::format_double(c.t_end);
    kv["integrator.stride"] = std::to_string(c.stride);
    kv["integrator.blowup_threshold"] = report::format_double(c.blowup_threshold);
    kv["verify.seed"] = std::to_string(c.verify_seed);
    kv["verify.trials"] = std::to_string(c.verify_trials);
    kv["verify.probe_trials"] = std::to_string(c.probe_trials);
    kv["verify.identity_tol"] = report::format_double(c.identity_tol);
    kv["verify.order2_lo"] = report::format_double(c.order2_lo);
    kv["verify.order2_hi"] = report::format_double(c.order2_hi);
    kv["verify.drift_factor_lo"] = report::format_double(c.drift_factor_lo);
    kv["verify.drift_factor_hi"] = report::format_double(c.drift_factor_hi);
    kv["verify.mean_drift_tol"] = report::format_double(c.mean_drift_tol);
    kv["verify.probe_ratio_max"] = report::format_double(c.probe_ratio_max);
    kv["verify.probe_slope_max"] = report::format_double(c.probe_slope_max);
    kv["verify.continuity_spread"] = report::format_double(c.continuity_spread);
    kv["verify.ident_bandwidth"] = std::to_string(c.ident_bandwidth);
    kv["verify.ident_amplitude"] = report::format_double(c.ident_amplitude);
    kv["norms.spec"] = c.norms_spec;

    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

inline std::uint64_t provenance_hash(const RunConfig& c) {
    return report::fnv1a64(canonical_text(c));
}

}  // namespace mbo::config
