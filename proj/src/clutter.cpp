#include "bayescfar/clutter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bayescfar/errors.hpp"
#include "bayescfar/numerics.hpp"

namespace bcfar {

namespace {

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

//---------------------------------------------------------------------------//
// ExponentialClutter
//---------------------------------------------------------------------------//

ExponentialClutter::ExponentialClutter(double rate) : rate_(rate) {
    if (!positive_finite(rate)) {
        throw DomainError("ExponentialClutter: rate must be positive and finite");
    }
}

double ExponentialClutter::pdf(double x) const {
    return x < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * x);
}

double ExponentialClutter::cdf(double x) const {
    return x <= 0.0 ? 0.0 : -std::expm1(-rate_ * x);
}

double ExponentialClutter::draw(RngStream& rng) const {
    return -std::log(rng.uniform_open()) / rate_;
}

//---------------------------------------------------------------------------//
// ParetoClutter
//---------------------------------------------------------------------------//

ParetoClutter::ParetoClutter(double shape, double scale) : shape_(shape), scale_(scale) {
    if (!positive_finite(shape) || !positive_finite(scale)) {
        throw DomainError("ParetoClutter: shape and scale must be positive and finite");
    }
}

double ParetoClutter::mean() const noexcept {
    return shape_ > 1.0 ? scale_ / (shape_ - 1.0) : std::numeric_limits<double>::infinity();
}

double ParetoClutter::pdf(double x) const {
    if (x < 0.0) {
        return 0.0;
    }
    return shape_ / scale_ * std::pow(1.0 + x / scale_, -shape_ - 1.0);
}

double ParetoClutter::cdf(double x) const {
    return x <= 0.0 ? 0.0 : -std::expm1(-shape_ * std::log1p(x / scale_));
}

double ParetoClutter::draw(RngStream& rng) const {
    // scale * (U^{-1/shape} - 1), written to keep precision for U near 1.
    return scale_ * std::expm1(-std::log(rng.uniform_open()) / shape_);
}

//---------------------------------------------------------------------------//
// Variant helpers
//---------------------------------------------------------------------------//

std::vector<double> sample(const ClutterModel& model, std::size_t count, RngStream& rng) {
    if (count == 0) {
        throw DomainError("sample: count must be >= 1");
    }
    std::vector<double> out(count);
    std::visit([&](const auto& m) {
        for (auto& x : out) {
            x = m.draw(rng);
        }
    }, model);
    return out;
}

double cdf(const ClutterModel& model, double x) {
    return std::visit([x](const auto& m) { return m.cdf(x); }, model);
}

double pdf(const ClutterModel& model, double x) {
    return std::visit([x](const auto& m) { return m.pdf(x); }, model);
}

std::string describe(const ClutterModel& model) {
    std::ostringstream os;
    os.precision(17);
    if (const auto* e = std::get_if<ExponentialClutter>(&model)) {
        os << "exponential(rate=" << e->rate() << ")";
    } else {
        const auto& p = std::get<ParetoClutter>(model);
        os << "pareto2(shape=" << p.shape() << ",scale=" << p.scale() << ")";
    }
    return os.str();
}

//---------------------------------------------------------------------------//
// Windows and order statistics
//---------------------------------------------------------------------------//

CrpWindow::CrpWindow(std::vector<double> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) {
        throw DomainError("CrpWindow: window must hold at least one sample");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!(samples_[i] >= 0.0) || !std::isfinite(samples_[i])) {
            throw DomainError("CrpWindow: sample " + std::to_string(i) +
                              " must be finite and nonnegative");
        }
    }
}

double kth_smallest(std::span<const double> samples, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > samples.size()) {
        throw DomainError("order statistic index k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(samples.size()) + "]");
    }
    std::vector<double> copy(samples.begin(), samples.end());
    auto nth = copy.begin() + (k - 1);
    std::nth_element(copy.begin(), nth, copy.end());
    return *nth;
}

OsStatistic kth_order_statistic(const CrpWindow& window, int k) {
    return {kth_smallest(window.samples(), k), k, static_cast<int>(window.size())};
}

double window_sum(const CrpWindow& window) {
    const auto s = window.samples();
    return std::accumulate(s.begin(), s.end(), 0.0);
}

double os_density(double t, int n, int k, double rate) {
    if (n < 1 || k < 1 || k > n) {
        throw DomainError("os_density: need 1 <= k <= n");
    }
    if (!(t >= 0.0) || !positive_finite(rate)) {
        throw DomainError("os_density: need t >= 0 and rate > 0");
    }
    if (t == 0.0) {
        return k == 1 ? rate * n : 0.0;
    }
    const double x = rate * t;
    const Binomial c = binom(n, k);
    const double below = -std::expm1(-x);  // 1 - e^{-x}
    if (c.exact) {
        return rate * k * c.value() * std::pow(below, k - 1) * std::exp(-x * (n - k + 1));
    }
    const double log_density = std::log(rate) + std::log(static_cast<double>(k)) + c.log_value +
                               (k - 1) * std::log(below) - x * (n - k + 1);
    return std::exp(log_density);
}

}  // namespace bcfar
