#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bayescfar/clutter.hpp"
#include "bayescfar/detectors.hpp"

namespace bcfar {

enum class TargetKind { swerling1 };

// Swerling I point target: the cell under test is exponential with mean
// (1 + snr_linear) times the clutter mean.
struct TargetModel {
    TargetKind kind = TargetKind::swerling1;
    double snr_linear = 1.0;

    void validate() const;
};

struct Scenario {
    ClutterModel clutter = ExponentialClutter(1.0);
    DetectorSpec detector;
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    std::optional<TargetModel> target;

    void validate() const;
    // Canonical one-line description; equal scenarios give equal digests.
    std::string digest() const;
};

struct SimReport {
    double estimate = 0.0;
    std::uint64_t trials = 0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;
    std::uint64_t seed = 0;
    std::string scenario_digest;
    std::uint64_t detections = 0;
    // Windows re-drawn because the detector could not use them (zero k-th order statistic).
    std::uint64_t redrawn_windows = 0;

    bool operator==(const SimReport&) const = default;
};

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

inline constexpr double kWilsonZ = 3.0;

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kWilsonZ);
double binomial_standard_error(double p, std::uint64_t trials);

// Trials are simulated in fixed blocks; block b draws from RngStream(seed, b).
inline constexpr std::uint64_t kTrialsPerBlock = 4096;

struct SimOptions {
    // 0 selects default_worker_count().
    unsigned workers = 0;
};

// BAYES_CFAR_WORKERS when set to a positive integer, otherwise the hardware concurrency.
unsigned default_worker_count();

SimReport estimate_pfa(const Scenario& scenario, const SimOptions& options = {});
SimReport estimate_pd(const Scenario& scenario, const SimOptions& options = {});

struct SweepResult {
    std::vector<double> rates;
    std::vector<SimReport> reports;
    // Largest |p_i - p_j| over pairs, in units of the pooled binomial standard error.
    double max_deviation_se = 0.0;
};

// estimate_pfa at each exponential rate, grid point g on sub-seed derive_seed(seed, g).
SweepResult cfar_sweep(const Scenario& scenario, std::span<const double> rate_grid,
                       const SimOptions& options = {});

// Replays the draws of estimate_pfa / estimate_pd in trial order, sequentially.
void for_each_trial(const Scenario& scenario,
                    const std::function<void(std::span<const double> window, double cut)>& visit);

struct WindowLayout {
    std::size_t leading = 0;
    std::size_t trailing = 0;
};

// One decision per cell with a full window (no guard cells). Cells whose
// window has a zero k-th order statistic are reported as H0 with Pfa 1.
std::vector<Decision> scan_profile(std::span<const double> profile, const DetectorSpec& spec,
                                   WindowLayout layout);

}  // namespace bcfar
