#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "bayescfar/clutter.hpp"
#include "bayescfar/numerics.hpp"
#include "bayescfar/predictive.hpp"

namespace bcfar {

enum class DetectorFamily { bayes_os, min_cfar, ca_cfar, custom_g };

std::string_view to_string(DetectorFamily family);
std::optional<DetectorFamily> parse_family(std::string_view name);

struct DetectorSpec {
    DetectorFamily family = DetectorFamily::bayes_os;
    int n = 1;
    int k = 1;  // only read by bayes_os
    double design_pfa = 0.01;

    // Throws DomainError unless 0 < design_pfa < 1, n >= 1 and, for bayes_os, 1 <= k <= n.
    void validate() const;
};

enum class Verdict { H0, H1 };
enum class DecisionPath { threshold, pfa_comparison };

std::string_view to_string(Verdict verdict);

struct Decision {
    Verdict verdict = Verdict::H0;
    double statistic_z0 = 0.0;
    // tau * g(window) on the threshold path, Pfa(z0) on the pfa_comparison path.
    double comparison_value = 0.0;
    DecisionPath path = DecisionPath::threshold;
};

// H1 iff Pfa(z0 | Z_(k) = t) < design_pfa. No threshold is ever solved for.
// Throws DegenerateWindowError when the k-th order statistic is zero.
Decision bayes_os_decide(double z0, const CrpWindow& window, const DetectorSpec& spec,
                         const OsEvalOptions& options = {});

// Absolute threshold on z0 for an observed t. Closed form t N (1/pfa - 1) when k == 1,
// otherwise the root of os_pfa(tau) = design_pfa.
double bayes_os_threshold(const DetectorSpec& spec, double t, const RootSettings& settings = {});

// Multiplier on the window minimum, n (1/pfa - 1).
double min_cfar_multiplier(const DetectorSpec& spec);
Decision min_cfar_decide(double z0, const CrpWindow& window, const DetectorSpec& spec);

// Multiplier on the window sum giving exact Pfa in exponential clutter:
// (1 + m)^{-n} = pfa, so m = pfa^{-1/n} - 1.
double ca_cfar_multiplier(const DetectorSpec& spec);
Decision ca_cfar_decide(double z0, const CrpWindow& window, const DetectorSpec& spec);

using WindowStatistic = std::function<double(const CrpWindow&)>;

// H1 iff z0 > tau * g(window).
Decision custom_g_decide(double z0, const CrpWindow& window, double tau, const WindowStatistic& g);

// Dispatches bayes_os, min_cfar and ca_cfar. custom_g needs a statistic and
// raises ConfigError here.
Decision decide(double z0, const CrpWindow& window, const DetectorSpec& spec);

}  // namespace bcfar
