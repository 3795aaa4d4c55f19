#include "bayescfar/report.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "bayescfar/errors.hpp"

namespace bcfar {

std::string format_double(double value) {
    if (!std::isfinite(value)) {
        return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
    }
    std::array<char, 64> buffer{};
    const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return {buffer.data(), result.ptr};
}

nlohmann::ordered_json to_json(const SimReport& report) {
    nlohmann::ordered_json j;
    j["estimate"] = report.estimate;
    j["trials"] = report.trials;
    j["wilson_low"] = report.wilson_low;
    j["wilson_high"] = report.wilson_high;
    j["seed"] = report.seed;
    j["scenario_digest"] = report.scenario_digest;
    j["detections"] = report.detections;
    j["redrawn_windows"] = report.redrawn_windows;
    return j;
}

SimReport report_from_json(const nlohmann::ordered_json& j) {
    try {
        SimReport r;
        r.estimate = j.at("estimate").get<double>();
        r.trials = j.at("trials").get<std::uint64_t>();
        r.wilson_low = j.at("wilson_low").get<double>();
        r.wilson_high = j.at("wilson_high").get<double>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.scenario_digest = j.at("scenario_digest").get<std::string>();
        r.detections = j.at("detections").get<std::uint64_t>();
        r.redrawn_windows = j.at("redrawn_windows").get<std::uint64_t>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
}

}  // namespace bcfar
