#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bayescfar/clutter.hpp"
#include "bayescfar/errors.hpp"
#include "bayescfar/numerics.hpp"
#include "oracles.hpp"

using namespace bcfar;

namespace {

double mean_of(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Two-sided Kolmogorov-Smirnov distance against a model CDF.
double ks_distance(std::vector<double> xs, const ClutterModel& model) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(model, xs[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

}  // namespace

TEST_CASE("exponential sample mean follows the law of large numbers") {
    RngStream rng(2024);
    const auto xs = sample(ExponentialClutter(1.0), 1000000, rng);
    CHECK(std::abs(mean_of(xs) - 1.0) <= 3.0 * 1e-3);
    CHECK(std::all_of(xs.begin(), xs.end(), [](double x) { return x > 0.0; }));
}

TEST_CASE("Pareto Type II sample mean matches scale / (shape - 1)") {
    const ParetoClutter model(3.0, 2.0);
    // Brute-force mean: integral of the survival function (1 + x/2)^{-3} on
    // [0, 1e4]; the remaining tail is (1 + 5000)^{-2} < 1e-7.
    const double integrated =
        oracle::simpson([](double x) { return std::pow(1.0 + x / 2.0, -3.0); }, 0.0, 1e4, 2000000);
    CHECK(integrated == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(model.mean() == doctest::Approx(integrated).epsilon(1e-6));

    RngStream rng(99);
    const auto xs = sample(model, 1000000, rng);
    // variance scale^2 shape / ((shape-1)^2 (shape-2)) = 3
    const double sigma = std::sqrt(3.0) / 1000.0;
    CHECK(std::abs(mean_of(xs) - 1.0) <= 3.0 * sigma);
}

TEST_CASE("sampling is deterministic in the seed") {
    for (const ClutterModel model : {ClutterModel(ExponentialClutter(0.7)), ClutterModel(ParetoClutter(2.5, 1.5))}) {
        RngStream a(77, 3);
        RngStream b(77, 3);
        RngStream c(77, 4);
        const auto xa = sample(model, 5, a);
        CHECK(xa == sample(model, 5, b));
        CHECK(xa != sample(model, 5, c));
    }
    RngStream rng(1);
    CHECK_THROWS_AS(sample(ExponentialClutter(1.0), 0, rng), DomainError);
}

TEST_CASE("uniform_open stays strictly inside (0, 1)") {
    RngStream rng(0);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform_open();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("empirical CDF passes Kolmogorov-Smirnov at the 1% level") {
    const std::size_t n = 100000;
    const double critical = 1.628 / std::sqrt(static_cast<double>(n));
    std::uint64_t stream = 0;
    for (double rate : {0.1, 1.0, 25.0}) {
        RngStream rng(8, stream++);
        const ExponentialClutter model(rate);
        CAPTURE(rate);
        CHECK(ks_distance(sample(model, n, rng), model) < critical);
    }
    for (double shape : {0.5, 3.0, 12.0}) {
        for (double scale : {0.2, 5.0}) {
            RngStream rng(8, stream++);
            const ParetoClutter model(shape, scale);
            CAPTURE(shape);
            CAPTURE(scale);
            CHECK(ks_distance(sample(model, n, rng), model) < critical);
        }
    }
}

TEST_CASE("clutter models reject invalid parameters") {
    CHECK_THROWS_AS(ExponentialClutter(0.0), DomainError);
    CHECK_THROWS_AS(ExponentialClutter(-1.0), DomainError);
    CHECK_THROWS_AS(ParetoClutter(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(ParetoClutter(1.0, std::nan("")), DomainError);
}

TEST_CASE("kth_order_statistic examples") {
    const CrpWindow window({3, 1, 2});
    CHECK(kth_order_statistic(window, 1).value == 1);
    CHECK(kth_order_statistic(window, 3).value == 3);
    CHECK(kth_order_statistic(CrpWindow({5, 5, 2}), 2).value == 5);
    const auto os = kth_order_statistic(window, 2);
    CHECK(os.k == 2);
    CHECK(os.n == 3);
    CHECK_THROWS_AS(kth_order_statistic(window, 0), DomainError);
    CHECK_THROWS_AS(kth_order_statistic(window, 4), DomainError);
}

TEST_CASE("CrpWindow invariants") {
    CHECK_THROWS_AS(CrpWindow({}), DomainError);
    CHECK_THROWS_AS(CrpWindow({1.0, -0.5}), DomainError);
    CHECK_THROWS_AS(CrpWindow({1.0, std::nan("")}), DomainError);
    CHECK_NOTHROW(CrpWindow({0.0, 0.0}));
}

TEST_CASE("order statistics are monotone in k and scale with the window") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::uniform_real_distribution<double> log_c(-3.0, 3.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> xs(1 + gen() % 20);
        for (auto& x : xs) {
            x = u(gen);
        }
        const CrpWindow window(xs);
        double previous = -1.0;
        for (int k = 1; k <= static_cast<int>(xs.size()); ++k) {
            const double v = kth_order_statistic(window, k).value;
            REQUIRE(v >= previous);
            previous = v;
        }

        // Powers of two scale exactly; other factors to rounding.
        std::vector<double> doubled = xs;
        for (auto& x : doubled) {
            x *= 8.0;
        }
        const int k = 1 + static_cast<int>(gen() % xs.size());
        REQUIRE(kth_order_statistic(CrpWindow(doubled), k).value == 8.0 * kth_order_statistic(window, k).value);
        REQUIRE(window_sum(CrpWindow(doubled)) == 8.0 * window_sum(window));

        const double c = std::pow(10.0, log_c(gen));
        std::vector<double> scaled = xs;
        for (auto& x : scaled) {
            x *= c;
        }
        REQUIRE(kth_order_statistic(CrpWindow(scaled), k).value == c * kth_order_statistic(window, k).value);
        REQUIRE(window_sum(CrpWindow(scaled)) == doctest::Approx(c * window_sum(window)).epsilon(1e-14));
    }
}

TEST_CASE("window_sum examples") {
    CHECK(window_sum(CrpWindow({1, 2, 3})) == 6);
    CHECK(window_sum(CrpWindow({0, 0, 0})) == 0);
    RngStream rng(12);
    const CrpWindow big(sample(ExponentialClutter(2.0), 1000000, rng));
    const double mean = window_sum(big) / static_cast<double>(big.size());
    CHECK(std::abs(mean - 0.5) <= 3.0 * 0.5 / 1000.0);
}

TEST_CASE("os_density examples") {
    CHECK(os_density(0.5, 1, 1, 2.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(os_density(1.0, 3, 1, 1.0) == doctest::Approx(3.0 * std::exp(-3.0)).epsilon(1e-14));
    CHECK(os_density(0.0, 5, 1, 2.0) == 10.0);
    CHECK(os_density(0.0, 5, 2, 2.0) == 0.0);
    CHECK_THROWS_AS(os_density(1.0, 3, 4, 1.0), DomainError);
    CHECK_THROWS_AS(os_density(-1.0, 3, 1, 1.0), DomainError);
}

TEST_CASE("os_density of the minimum of exponentials") {
    for (int n : {1, 2, 7, 32, 80}) {
        for (double rate : {0.3, 1.0, 4.0}) {
            for (double t : {0.01, 0.5, 2.0}) {
                const double expected = n * rate * std::exp(-n * rate * t);
                REQUIRE(std::abs(os_density(t, n, 1, rate) - expected) <= 1e-12 * expected);
            }
        }
    }
}

TEST_CASE("os_density integrates to one") {
    for (int n : {1, 4, 16, 32, 70}) {
        for (int k : {1, (n + 1) / 2, n}) {
            for (double rate : {0.5, 3.0}) {
                const double mass =
                    integrate_semi_infinite([&](double t) { return os_density(t, n, k, rate); }).value;
                CAPTURE(n);
                CAPTURE(k);
                CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("os_density agrees with a Monte Carlo histogram of the window minimum") {
    // N=3, k=1, rate 1: P(Z_(1) in [0.9, 1.1]) versus the integrated density.
    RngStream rng(31);
    const ExponentialClutter model(1.0);
    const int trials = 400000;
    int inside = 0;
    for (int i = 0; i < trials; ++i) {
        const auto xs = sample(model, 3, rng);
        const double m = *std::min_element(xs.begin(), xs.end());
        inside += (m >= 0.9 && m < 1.1) ? 1 : 0;
    }
    const double p = oracle::simpson([](double t) { return os_density(t, 3, 1, 1.0); }, 0.9, 1.1, 200);
    const double se = std::sqrt(p * (1 - p) / trials);
    CHECK(std::abs(static_cast<double>(inside) / trials - p) <= 4.0 * se);
    CHECK(p == doctest::Approx(std::exp(-2.7) - std::exp(-3.3)).epsilon(1e-10));
}
