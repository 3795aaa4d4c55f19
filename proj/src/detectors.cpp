#include "bayescfar/detectors.hpp"

#include <cmath>
#include <string>

#include "bayescfar/errors.hpp"

namespace bcfar {

std::string_view to_string(DetectorFamily family) {
    switch (family) {
        case DetectorFamily::bayes_os: return "bayes_os";
        case DetectorFamily::min_cfar: return "min_cfar";
        case DetectorFamily::ca_cfar: return "ca_cfar";
        case DetectorFamily::custom_g: return "custom_g";
    }
    return "unknown";
}

std::optional<DetectorFamily> parse_family(std::string_view name) {
    for (auto f : {DetectorFamily::bayes_os, DetectorFamily::min_cfar, DetectorFamily::ca_cfar,
                   DetectorFamily::custom_g}) {
        if (to_string(f) == name) {
            return f;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Verdict verdict) { return verdict == Verdict::H1 ? "H1" : "H0"; }

void DetectorSpec::validate() const {
    if (!(design_pfa > 0.0 && design_pfa < 1.0)) {
        throw DomainError("DetectorSpec: design Pfa must lie in (0, 1), got " +
                          std::to_string(design_pfa));
    }
    if (n < 1) {
        throw DomainError("DetectorSpec: window size must be >= 1");
    }
    if (family == DetectorFamily::bayes_os && (k < 1 || k > n)) {
        throw DomainError("DetectorSpec: need 1 <= k <= n, got k=" + std::to_string(k) +
                          ", n=" + std::to_string(n));
    }
}

namespace {

void require_family(const DetectorSpec& spec, DetectorFamily family, const char* name) {
    if (spec.family != family) {
        throw ConfigError(std::string(name) + ": detector family is " +
                          std::string(to_string(spec.family)));
    }
    spec.validate();
}

void require_window(const CrpWindow& window, const DetectorSpec& spec) {
    if (window.size() != static_cast<std::size_t>(spec.n)) {
        throw ConfigError("window holds " + std::to_string(window.size()) +
                          " cells but the detector expects " + std::to_string(spec.n));
    }
}

void require_statistic(double z0) {
    if (!(z0 >= 0.0) || !std::isfinite(z0)) {
        throw DomainError("cell under test must be finite and nonnegative");
    }
}

Decision threshold_decision(double z0, double threshold) {
    return {z0 > threshold ? Verdict::H1 : Verdict::H0, z0, threshold, DecisionPath::threshold};
}

}  // namespace

Decision bayes_os_decide(double z0, const CrpWindow& window, const DetectorSpec& spec,
                         const OsEvalOptions& options) {
    require_family(spec, DetectorFamily::bayes_os, "bayes_os_decide");
    require_window(window, spec);
    require_statistic(z0);
    const double t = kth_order_statistic(window, spec.k).value;
    const OsPredictive os(spec.n, spec.k, t);
    const double pfa = os_pfa(z0, os, options);
    return {pfa < spec.design_pfa ? Verdict::H1 : Verdict::H0, z0, pfa,
            DecisionPath::pfa_comparison};
}

double bayes_os_threshold(const DetectorSpec& spec, double t, const RootSettings& settings) {
    require_family(spec, DetectorFamily::bayes_os, "bayes_os_threshold");
    const OsPredictive os(spec.n, spec.k, t);
    if (spec.k == 1) {
        return t * (spec.n * (1.0 / spec.design_pfa - 1.0));
    }
    return solve_monotone_decreasing([&](double tau) { return os_pfa(tau, os); }, spec.design_pfa,
                                     settings);
}

double min_cfar_multiplier(const DetectorSpec& spec) {
    return spec.n * (1.0 / spec.design_pfa - 1.0);
}

Decision min_cfar_decide(double z0, const CrpWindow& window, const DetectorSpec& spec) {
    require_family(spec, DetectorFamily::min_cfar, "min_cfar_decide");
    require_window(window, spec);
    require_statistic(z0);
    return threshold_decision(z0, min_cfar_multiplier(spec) * kth_order_statistic(window, 1).value);
}

double ca_cfar_multiplier(const DetectorSpec& spec) {
    // pfa^{-1/n} - 1 without losing digits when pfa is close to 1.
    return std::expm1(-std::log(spec.design_pfa) / spec.n);
}

Decision ca_cfar_decide(double z0, const CrpWindow& window, const DetectorSpec& spec) {
    require_family(spec, DetectorFamily::ca_cfar, "ca_cfar_decide");
    require_window(window, spec);
    require_statistic(z0);
    return threshold_decision(z0, ca_cfar_multiplier(spec) * window_sum(window));
}

Decision custom_g_decide(double z0, const CrpWindow& window, double tau, const WindowStatistic& g) {
    require_statistic(z0);
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw DomainError("custom_g_decide: tau must be finite and nonnegative");
    }
    if (!g) {
        throw ConfigError("custom_g_decide: no window statistic supplied");
    }
    const double level = g(window);
    if (!std::isfinite(level)) {
        throw EvaluationError("custom_g_decide: window statistic is not finite");
    }
    return threshold_decision(z0, tau * level);
}

Decision decide(double z0, const CrpWindow& window, const DetectorSpec& spec) {
    switch (spec.family) {
        case DetectorFamily::bayes_os: return bayes_os_decide(z0, window, spec);
        case DetectorFamily::min_cfar: return min_cfar_decide(z0, window, spec);
        case DetectorFamily::ca_cfar: return ca_cfar_decide(z0, window, spec);
        case DetectorFamily::custom_g: break;
    }
    throw ConfigError("custom_g detectors need a window statistic; call custom_g_decide");
}

}  // namespace bcfar
