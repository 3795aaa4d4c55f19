#include "bayescfar/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "bayescfar/errors.hpp"
#include "bayescfar/rng.hpp"

namespace bcfar {

void TargetModel::validate() const {
    if (!(snr_linear > 0.0) || !std::isfinite(snr_linear)) {
        throw DomainError("TargetModel: snr_linear must be positive and finite");
    }
}

void Scenario::validate() const {
    if (trials < 1) {
        throw DomainError("Scenario: trials must be >= 1");
    }
    if (detector.family == DetectorFamily::custom_g) {
        throw ConfigError("Scenario: custom_g detectors cannot be simulated without a statistic");
    }
    detector.validate();
    if (target) {
        target->validate();
        if (!std::holds_alternative<ExponentialClutter>(clutter)) {
            throw ConfigError("Scenario: Swerling I targets are only supported in exponential clutter");
        }
    }
}

std::string Scenario::digest() const {
    std::ostringstream os;
    os.precision(17);
    os << "clutter=" << describe(clutter) << ";detector=" << to_string(detector.family)
       << ";n=" << detector.n << ";k=" << detector.k << ";pfa=" << detector.design_pfa;
    if (target) {
        os << ";target=swerling1(snr=" << target->snr_linear << ")";
    } else {
        os << ";target=none";
    }
    os << ";trials=" << trials << ";seed=" << seed;
    return os.str();
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0 || successes > trials) {
        throw DomainError("wilson_interval: need 0 <= successes <= trials, trials >= 1");
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    WilsonInterval out{std::max(0.0, center - half), std::min(1.0, center + half)};
    // Keep the point estimate inside against rounding at p = 0 or p = 1.
    out.low = std::min(out.low, p);
    out.high = std::max(out.high, p);
    return out;
}

double binomial_standard_error(double p, std::uint64_t trials) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

unsigned default_worker_count() {
    if (const char* env = std::getenv("BAYES_CFAR_WORKERS")) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && value > 0) {
            return static_cast<unsigned>(value);
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

namespace {

// Draws of one block, shared by the counting harness and for_each_trial.
class TrialDrawer {
public:
    TrialDrawer(const Scenario& scenario, std::uint64_t block)
        : scenario_(scenario),
          rng_(scenario.seed, block),
          window_(static_cast<std::size_t>(scenario.detector.n)) {}

    // Fills the window and returns the cell under test.
    double next() {
        for (std::uint64_t attempts = 1;; ++attempts) {
            std::visit([&](const auto& m) {
                for (auto& x : window_) {
                    x = m.draw(rng_);
                }
            }, scenario_.clutter);
            if (usable()) {
                break;
            }
            ++redrawn_;
            if (attempts >= kMaxRedraws) {
                throw NumericError("simulation: clutter keeps producing degenerate windows");
            }
        }
        // Same single uniform for clutter-only and target cells, so scenarios
        // differing only in SNR share random numbers.
        const double u = rng_.uniform_open();
        if (scenario_.target) {
            const double rate = std::get<ExponentialClutter>(scenario_.clutter).rate();
            return -std::log(u) * (1.0 + scenario_.target->snr_linear) / rate;
        }
        return std::visit([u](const auto& m) { return inverse_survival(m, u); }, scenario_.clutter);
    }

    std::span<const double> window() const { return window_; }
    std::uint64_t redrawn() const { return redrawn_; }

private:
    // Consecutive unusable windows tolerated for a single trial.
    static constexpr std::uint64_t kMaxRedraws = 10000;

    static double inverse_survival(const ExponentialClutter& m, double u) {
        return -std::log(u) / m.rate();
    }
    static double inverse_survival(const ParetoClutter& m, double u) {
        return m.scale() * std::expm1(-std::log(u) / m.shape());
    }

    bool usable() const {
        if (scenario_.detector.family != DetectorFamily::bayes_os) {
            return true;
        }
        return kth_smallest(window_, scenario_.detector.k) > 0.0;
    }

    const Scenario& scenario_;
    RngStream rng_;
    std::vector<double> window_;
    std::uint64_t redrawn_ = 0;
};

struct Counts {
    std::uint64_t detections = 0;
    std::uint64_t redrawn = 0;
};

Counts run_block(const Scenario& scenario, std::uint64_t block) {
    const std::uint64_t first = block * kTrialsPerBlock;
    const std::uint64_t count = std::min(kTrialsPerBlock, scenario.trials - first);
    TrialDrawer drawer(scenario, block);
    Counts counts;
    for (std::uint64_t i = 0; i < count; ++i) {
        const double cut = drawer.next();
        const CrpWindow window({drawer.window().begin(), drawer.window().end()});
        if (decide(cut, window, scenario.detector).verdict == Verdict::H1) {
            ++counts.detections;
        }
    }
    counts.redrawn = drawer.redrawn();
    return counts;
}

SimReport run(const Scenario& scenario, const SimOptions& options) {
    const std::uint64_t blocks = (scenario.trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
    const unsigned workers = static_cast<unsigned>(
        std::min<std::uint64_t>(options.workers == 0 ? default_worker_count() : options.workers, blocks));

    std::atomic<std::uint64_t> next_block{0};
    std::vector<Counts> partial(workers);
    std::vector<std::exception_ptr> failures(workers);
    const auto work = [&](unsigned w) {
        try {
            for (std::uint64_t b = next_block++; b < blocks; b = next_block++) {
                const Counts c = run_block(scenario, b);
                partial[w].detections += c.detections;
                partial[w].redrawn += c.redrawn;
            }
        } catch (...) {
            failures[w] = std::current_exception();
            next_block = blocks;
        }
    };

    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work, w);
        }
    }
    for (const auto& f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }

    SimReport report;
    for (const auto& c : partial) {
        report.detections += c.detections;
        report.redrawn_windows += c.redrawn;
    }
    report.trials = scenario.trials;
    report.estimate = static_cast<double>(report.detections) / static_cast<double>(report.trials);
    const WilsonInterval ci = wilson_interval(report.detections, report.trials);
    report.wilson_low = ci.low;
    report.wilson_high = ci.high;
    report.seed = scenario.seed;
    report.scenario_digest = scenario.digest();
    return report;
}

}  // namespace

SimReport estimate_pfa(const Scenario& scenario, const SimOptions& options) {
    scenario.validate();
    if (scenario.target) {
        throw ConfigError("estimate_pfa: scenario must not carry a target");
    }
    return run(scenario, options);
}

SimReport estimate_pd(const Scenario& scenario, const SimOptions& options) {
    scenario.validate();
    if (!scenario.target) {
        throw ConfigError("estimate_pd: scenario needs a target model");
    }
    return run(scenario, options);
}

SweepResult cfar_sweep(const Scenario& scenario, std::span<const double> rate_grid,
                       const SimOptions& options) {
    if (!std::holds_alternative<ExponentialClutter>(scenario.clutter)) {
        throw ConfigError("cfar_sweep: sweeps run over exponential clutter rates");
    }
    if (rate_grid.empty()) {
        throw ConfigError("cfar_sweep: empty rate grid");
    }
    SweepResult out;
    for (std::size_t g = 0; g < rate_grid.size(); ++g) {
        Scenario point = scenario;
        point.clutter = ExponentialClutter(rate_grid[g]);
        point.seed = derive_seed(scenario.seed, g);
        out.rates.push_back(rate_grid[g]);
        out.reports.push_back(estimate_pfa(point, options));
    }

    for (std::size_t i = 0; i < out.reports.size(); ++i) {
        for (std::size_t j = i + 1; j < out.reports.size(); ++j) {
            const auto& a = out.reports[i];
            const auto& b = out.reports[j];
            const double pooled = static_cast<double>(a.detections + b.detections) /
                                  static_cast<double>(a.trials + b.trials);
            const double se = std::sqrt(pooled * (1.0 - pooled) *
                                        (1.0 / static_cast<double>(a.trials) +
                                         1.0 / static_cast<double>(b.trials)));
            const double diff = std::abs(a.estimate - b.estimate);
            const double dev = se > 0.0 ? diff / se : 0.0;
            out.max_deviation_se = std::max(out.max_deviation_se, dev);
        }
    }
    return out;
}

void for_each_trial(const Scenario& scenario,
                    const std::function<void(std::span<const double> window, double cut)>& visit) {
    scenario.validate();
    const std::uint64_t blocks = (scenario.trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        const std::uint64_t count = std::min(kTrialsPerBlock, scenario.trials - b * kTrialsPerBlock);
        TrialDrawer drawer(scenario, b);
        for (std::uint64_t i = 0; i < count; ++i) {
            const double cut = drawer.next();
            visit(drawer.window(), cut);
        }
    }
}

std::vector<Decision> scan_profile(std::span<const double> profile, const DetectorSpec& spec,
                                   WindowLayout layout) {
    spec.validate();
    const std::size_t width = layout.leading + layout.trailing;
    if (width != static_cast<std::size_t>(spec.n)) {
        throw ConfigError("scan_profile: leading + trailing = " + std::to_string(width) +
                          " but the detector window size is " + std::to_string(spec.n));
    }
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (!(profile[i] >= 0.0) || !std::isfinite(profile[i])) {
            throw DomainError("scan_profile: cell " + std::to_string(i) +
                              " must be finite and nonnegative");
        }
    }
    if (profile.empty()) {
        return {};
    }
    if (profile.size() <= width) {
        throw ConfigError("scan_profile: profile of " + std::to_string(profile.size()) +
                          " cells is too short for a " + std::to_string(width) + "-cell window");
    }

    std::vector<Decision> decisions;
    decisions.reserve(profile.size() - width);
    std::vector<double> cells(width);
    for (std::size_t cut = layout.leading; cut + layout.trailing < profile.size(); ++cut) {
        std::copy_n(profile.begin() + static_cast<std::ptrdiff_t>(cut - layout.leading),
                    layout.leading, cells.begin());
        std::copy_n(profile.begin() + static_cast<std::ptrdiff_t>(cut + 1), layout.trailing,
                    cells.begin() + static_cast<std::ptrdiff_t>(layout.leading));
        const CrpWindow window(cells);
        try {
            decisions.push_back(decide(profile[cut], window, spec));
        } catch (const DegenerateWindowError&) {
            decisions.push_back({Verdict::H0, profile[cut], 1.0, DecisionPath::pfa_comparison});
        }
    }
    return decisions;
}

}  // namespace bcfar
