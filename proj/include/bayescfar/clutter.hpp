#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bayescfar/rng.hpp"

namespace bcfar {

// Exponentially distributed intensity, density rate * exp(-rate * x).
class ExponentialClutter {
public:
    explicit ExponentialClutter(double rate);

    double rate() const noexcept { return rate_; }
    double mean() const noexcept { return 1.0 / rate_; }
    double pdf(double x) const;
    double cdf(double x) const;
    double draw(RngStream& rng) const;

private:
    double rate_;
};

// Pareto Type II (Lomax): survival (1 + x / scale)^(-shape).
class ParetoClutter {
public:
    ParetoClutter(double shape, double scale);

    double shape() const noexcept { return shape_; }
    double scale() const noexcept { return scale_; }
    // Finite only for shape > 1.
    double mean() const noexcept;
    double pdf(double x) const;
    double cdf(double x) const;
    double draw(RngStream& rng) const;

private:
    double shape_;
    double scale_;
};

using ClutterModel = std::variant<ExponentialClutter, ParetoClutter>;

std::vector<double> sample(const ClutterModel& model, std::size_t count, RngStream& rng);
double cdf(const ClutterModel& model, double x);
double pdf(const ClutterModel& model, double x);
std::string describe(const ClutterModel& model);

// The N clutter range profile cells surrounding the cell under test.
class CrpWindow {
public:
    explicit CrpWindow(std::vector<double> samples);

    std::size_t size() const noexcept { return samples_.size(); }
    std::span<const double> samples() const noexcept { return samples_; }
    double operator[](std::size_t i) const { return samples_[i]; }

private:
    std::vector<double> samples_;
};

struct OsStatistic {
    double value = 0.0;
    int k = 1;
    int n = 1;
};

// k-th smallest sample, 1-based; duplicates count separately.
OsStatistic kth_order_statistic(const CrpWindow& window, int k);
// Same selection on a raw view, reordering a private copy.
double kth_smallest(std::span<const double> samples, int k);

double window_sum(const CrpWindow& window);

// Density of the k-th order statistic of n i.i.d. exponential(rate) variables:
// rate k C(n,k) (1 - e^{-rate t})^{k-1} e^{-rate t (n-k+1)}.
double os_density(double t, int n, int k, double rate);

}  // namespace bcfar
