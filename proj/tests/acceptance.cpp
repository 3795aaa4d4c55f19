// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bayescfar/detectors.hpp"
#include "bayescfar/predictive.hpp"
#include "bayescfar/simulate.hpp"
#include "oracles.hpp"

#ifndef BAYES_CFAR_BINARY
#error "BAYES_CFAR_BINARY must name the bayes-cfar executable"
#endif

using namespace bcfar;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(4);
    s << x;
    return s.str();
}

std::vector<double> exponential_window(std::mt19937_64& gen, int n, double rate) {
    std::exponential_distribution<double> draw(rate);
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (auto& x : xs) {
        x = draw(gen);
    }
    return xs;
}

Outcome normalization() {
    double worst = 0.0;
    for (int n = 1; n <= 32; ++n) {
        for (int k = 1; k <= n; ++k) {
            for (double t : {0.1, 1.0, 10.0}) {
                worst = std::max(worst, std::abs(os_pfa(0.0, OsPredictive(n, k, t)) - 1.0));
            }
        }
    }
    return {worst <= 1e-12, "max |Pfa(0) - 1| = " + fmt(worst) + " (tol 1e-12)"};
}

Outcome k1_chain() {
    std::mt19937_64 gen(20240601);
    std::uniform_real_distribution<double> log_u(-3.0, 3.0);
    std::uniform_real_distribution<double> log_p(-6.0, -0.01);
    double worst_pfa = 0.0;
    double worst_tau = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 1 + static_cast<int>(gen() % 32);
        const double t = std::pow(10.0, log_u(gen));
        const double tau = t * std::pow(10.0, log_u(gen));
        const OsPredictive os(n, 1, t);
        worst_pfa = std::max(worst_pfa, std::abs(os_pfa(tau, os) - n * t / (tau + n * t)));

        const double pfa = std::pow(10.0, log_p(gen));
        const double closed = bayes_os_threshold(DetectorSpec{DetectorFamily::bayes_os, n, 1, pfa}, t);
        const double root = solve_monotone_decreasing([&](double x) { return os_pfa(x, os); }, pfa);
        worst_tau = std::max(worst_tau, std::abs(closed - root) / closed);
    }
    return {worst_pfa <= 1e-12 && worst_tau <= 1e-9,
            "max |Pfa - Nt/(tau+Nt)| = " + fmt(worst_pfa) + " (tol 1e-12), max threshold rel gap = " +
                fmt(worst_tau) + " (tol 1e-9)"};
}

Outcome oracle_equivalence() {
    std::mt19937_64 gen(20240602);
    std::uniform_real_distribution<double> log_t(-2.0, 2.0);
    std::uniform_real_distribution<double> log_r(-3.0, 3.0);
    double worst = 0.0;
    int fallbacks = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 1 + static_cast<int>(gen() % 32);
        const int k = 1 + static_cast<int>(gen() % n);
        const double t = std::pow(10.0, log_t(gen));
        const double tau = t * std::pow(10.0, log_r(gen));
        const OsPredictive os(n, k, t);
        const OsEvaluation closed = os_pfa_detail(tau, os);
        const double quad = os_pfa_quadrature(tau, os);
        fallbacks += closed.used_quadrature ? 1 : 0;
        worst = std::max(worst, std::abs(closed.value - quad) / std::max(closed.value, quad));
    }
    return {worst <= 1e-8, "max rel gap = " + fmt(worst) + " (tol 1e-8) over 10000 points, " +
                               std::to_string(fallbacks) + " evaluated by the quadrature fallback"};
}

Outcome ca_equivalence() {
    std::mt19937_64 gen(20240603);
    std::uniform_real_distribution<double> log_s(-2.0, 2.0);
    std::uniform_real_distribution<double> log_r(-3.0, 1.0);
    const auto likelihood = [](double z, PredictiveModel::Parameters th) { return th[0] * std::exp(-th[0] * z); };
    double worst = 0.0;
    int cases = 0;
    for (int n = 1; n <= 16; ++n) {
        for (int rep = 0; rep < 5; ++rep) {
            const double s = std::pow(10.0, log_s(gen));
            const auto posterior = [n, s](PredictiveModel::Parameters th) {
                return oracle::ca_posterior(th[0], n, s);
            };
            auto model = PredictiveModel::one_parameter(likelihood, posterior, ParameterAxis{n / s, {}});
            model.with_observation_scale(s / n);
            const double tau = s * std::pow(10.0, log_r(gen));
            worst = std::max(worst, std::abs(generic_pfa(tau, model) - oracle::ca_pfa(tau, n, s)));
            ++cases;
        }
    }
    return {worst <= 1e-8, "max |generic - (1+tau/S)^-N| = " + fmt(worst) + " (tol 1e-8) over " +
                               std::to_string(cases) + " cases"};
}

Outcome cfar_sweep_certificate() {
    const std::vector<double> grid{0.5, 1.0, 2.0, 10.0};
    const double bound = 3.0 * binomial_standard_error(0.01, 1000000);
    bool pass = true;
    std::string detail;
    for (auto family : {DetectorFamily::bayes_os, DetectorFamily::ca_cfar}) {
        Scenario s;
        s.detector = DetectorSpec{family, 16, 12, 0.01};
        s.trials = 1000000;
        s.seed = 20240605;
        const SweepResult r = cfar_sweep(s, grid);
        detail += std::string(to_string(family)) + " [";
        for (std::size_t i = 0; i < r.reports.size(); ++i) {
            const double e = r.reports[i].estimate;
            pass = pass && std::abs(e - 0.01) <= bound;
            detail += (i ? " " : "") + fmt(e);
        }
        detail += "] max pairwise " + fmt(r.max_deviation_se) + " SE; ";
    }
    return {pass, detail + "bound |p - 0.01| <= " + fmt(bound)};
}

Outcome path_equivalence() {
    std::mt19937_64 gen(20240606);
    std::uniform_real_distribution<double> log_p(-4.0, -0.3);
    std::uniform_real_distribution<double> spread(-2.0, 2.0);
    int path_mismatch = 0;
    int min_mismatch = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 1 + static_cast<int>(gen() % 32);
        const int k = 1 + static_cast<int>(gen() % n);
        const double pfa = std::pow(10.0, log_p(gen));
        const CrpWindow window(exponential_window(gen, n, 1.0));
        const DetectorSpec spec{DetectorFamily::bayes_os, n, k, pfa};
        const double tau = bayes_os_threshold(spec, kth_order_statistic(window, k).value);
        const double z0 = tau * std::pow(10.0, spread(gen));
        const Verdict by_threshold = z0 > tau ? Verdict::H1 : Verdict::H0;
        path_mismatch += bayes_os_decide(z0, window, spec).verdict != by_threshold ? 1 : 0;

        const DetectorSpec k1{DetectorFamily::bayes_os, n, 1, pfa};
        const DetectorSpec mn{DetectorFamily::min_cfar, n, 1, pfa};
        min_mismatch += bayes_os_decide(z0, window, k1).verdict != min_cfar_decide(z0, window, mn).verdict ? 1 : 0;
    }
    return {path_mismatch == 0 && min_mismatch == 0,
            std::to_string(path_mismatch) + " Pfa/threshold mismatches, " + std::to_string(min_mismatch) +
                " k=1/min_cfar mismatches in 10000 cases"};
}

Outcome scale_equivariance() {
    std::mt19937_64 gen(20240607);
    std::uniform_real_distribution<double> log_c(-3.0, 3.0);
    std::uniform_real_distribution<double> log_z(-1.0, 2.0);
    const WindowStatistic trimmed_mean = [](const CrpWindow& w) {
        std::vector<double> xs(w.samples().begin(), w.samples().end());
        std::sort(xs.begin(), xs.end());
        const std::size_t keep = std::max<std::size_t>(1, xs.size() - xs.size() / 4);
        double sum = 0.0;
        for (std::size_t i = 0; i < keep; ++i) {
            sum += xs[i];
        }
        return sum / static_cast<double>(keep);
    };
    int changed = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 1 + static_cast<int>(gen() % 32);
        const int k = 1 + static_cast<int>(gen() % n);
        const std::vector<double> xs = exponential_window(gen, n, 1.0);
        const double z0 = std::pow(10.0, log_z(gen));
        const double c = std::pow(10.0, log_c(gen));
        std::vector<double> scaled = xs;
        for (auto& x : scaled) {
            x *= c;
        }
        const CrpWindow base(xs);
        const CrpWindow moved(scaled);
        for (auto family : {DetectorFamily::bayes_os, DetectorFamily::min_cfar, DetectorFamily::ca_cfar}) {
            const DetectorSpec spec{family, n, k, 0.01};
            changed += decide(z0, base, spec).verdict != decide(c * z0, moved, spec).verdict ? 1 : 0;
        }
        changed += custom_g_decide(z0, base, 4.0, trimmed_mean).verdict !=
                           custom_g_decide(c * z0, moved, 4.0, trimmed_mean).verdict
                       ? 1
                       : 0;
    }
    return {changed == 0, std::to_string(changed) + " verdict changes over 10000 cases x 4 families"};
}

Outcome pd_sanity() {
    bool pass = true;
    std::string detail;
    const double bound = 3.0 * binomial_standard_error(0.01, 1000000);
    for (auto family : {DetectorFamily::bayes_os, DetectorFamily::ca_cfar}) {
        Scenario s;
        s.detector = DetectorSpec{family, 16, 12, 0.01};
        s.trials = 1000000;
        s.seed = 20240608;
        s.target = TargetModel{TargetKind::swerling1, 1e-9};
        const double faint = estimate_pd(s).estimate;
        pass = pass && std::abs(faint - 0.01) <= bound;
        detail += std::string(to_string(family)) + " Pd(snr 1e-9) = " + fmt(faint) + ", Pd over snr {1,2,4,8,16} =";
        std::uint64_t previous = 0;
        for (double snr : {1.0, 2.0, 4.0, 8.0, 16.0}) {
            s.target = TargetModel{TargetKind::swerling1, snr};
            const SimReport r = estimate_pd(s);
            pass = pass && r.detections >= previous;
            previous = r.detections;
            detail += " " + fmt(r.estimate);
        }
        detail += "; ";
    }
    return {pass, detail + "bound |Pd - 0.01| <= " + fmt(bound)};
}

std::string capture(const std::string& command, int& status) {
    std::string output;
    FILE* pipe = popen(command.c_str(), "r");
    if (pipe == nullptr) {
        status = -1;
        return output;
    }
    std::array<char, 4096> buffer{};
    std::size_t got = 0;
    while ((got = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
        output.append(buffer.data(), got);
    }
    status = pclose(pipe);
    return output;
}

Outcome determinism() {
    const std::string args =
        " simulate --family bayes_os --n 16 --k 12 --pfa 0.01 --lambda 2 --trials 1000000 --seed 424242";
    const std::string binary = std::string("'") + BAYES_CFAR_BINARY + "'";
    std::vector<std::string> outputs;
    bool ok = true;
    for (const char* workers : {"1", "1", "4", "4"}) {
        int status = 0;
        outputs.push_back(capture(std::string("BAYES_CFAR_WORKERS=") + workers + " " + binary + args, status));
        ok = ok && status == 0 && !outputs.back().empty();
    }
    const bool same = std::all_of(outputs.begin(), outputs.end(), [&](const std::string& o) { return o == outputs[0]; });
    return {ok && same, ok ? (same ? "4 runs (workers 1,1,4,4) byte-identical" : "outputs differ")
                           : "bayes-cfar run failed"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"normalization identity", normalization},
        {"k=1 chain", k1_chain},
        {"closed form vs quadrature", oracle_equivalence},
        {"cell-averaging equivalence", ca_equivalence},
        {"CFAR sweep certificate", cfar_sweep_certificate},
        {"path equivalence", path_equivalence},
        {"scale equivariance", scale_equivariance},
        {"Pd sanity", pd_sanity},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " -- "
                  << o.detail << std::endl;
    }
    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
