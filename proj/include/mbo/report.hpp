#pragma once

// DiagnosticsReport: structured record of a verification campaign. Serializes
// to greppable `name = value` text plus a JSON mirror. Provenance is an
// FNV-1a hash of the canonicalized configuration text, so identical configs
// hash identically on any platform.

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace mbo::report {

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

// shortest round-trip decimal form
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct DiagnosticsReport {
    std::string test_id;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<std::pair<std::string, double>> metrics;
    bool pass = false;
    std::uint64_t provenance = 0;

    void input(std::string key, std::string value) {
        inputs.emplace_back(std::move(key), std::move(value));
    }
    void input(std::string key, double value) {
        inputs.emplace_back(std::move(key), format_double(value));
    }
    void input(std::string key, long long value) {
        inputs.emplace_back(std::move(key), std::to_string(value));
    }
    void metric(std::string key, double value) {
        metrics.emplace_back(std::move(key), value);
    }

    double metric_value(std::string_view key) const {
        for (const auto& [k, v] : metrics)
            if (k == key) return v;
        throw std::out_of_range("DiagnosticsReport: no metric named " + std::string(key));
    }
    bool has_metric(std::string_view key) const {
        for (const auto& [k, v] : metrics)
            if (k == key) return true;
        return false;
    }
};

inline std::string to_text(const DiagnosticsReport& r) {
    std::string out;
    out += "test_id = " + r.test_id + "\n";
    for (const auto& [k, v] : r.inputs) out += "input." + k + " = " + v + "\n";
    for (const auto& [k, v] : r.metrics) out += k + " = " + format_double(v) + "\n";
    char prov[32];
    std::snprintf(prov, sizeof(prov), "%016llx", static_cast<unsigned long long>(r.provenance));
    out += "provenance = " + std::string(prov) + "\n";
    out += std::string("pass = ") + (r.pass ? "true" : "false") + "\n";
    return out;
}

inline std::string to_json(const DiagnosticsReport& r) {
    nlohmann::ordered_json j;
    j["test_id"] = r.test_id;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.inputs) inputs[k] = v;
    j["inputs"] = inputs;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = v;
    j["metrics"] = metrics;
    char prov[32];
    std::snprintf(prov, sizeof(prov), "%016llx", static_cast<unsigned long long>(r.provenance));
    j["provenance"] = prov;
    j["pass"] = r.pass;
    return j.dump(2);
}

}  // namespace mbo::report
