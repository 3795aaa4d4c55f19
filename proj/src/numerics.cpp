#include "bayescfar/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "bayescfar/errors.hpp"

namespace bcfar {

//---------------------------------------------------------------------------//
// DoubleDouble
//---------------------------------------------------------------------------//
namespace {

__extension__ using Uint128 = unsigned __int128;

// Error-free transformations. This file must be compiled without FP contraction.
inline DoubleDouble two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline DoubleDouble quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

inline DoubleDouble two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

}  // namespace

DoubleDouble DoubleDouble::from_integer(std::uint64_t value) {
    const double high = static_cast<double>(value);
    // high may have rounded up, so the remainder is signed.
    const auto rest = static_cast<std::int64_t>(value - static_cast<std::uint64_t>(high));
    return quick_two_sum(high, static_cast<double>(rest));
}

DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
    DoubleDouble s = two_sum(a.hi, b.hi);
    const DoubleDouble t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }

DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
    DoubleDouble p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
    const double q1 = a.hi / b.hi;
    DoubleDouble r = a - b * DoubleDouble(q1);
    const double q2 = r.hi / b.hi;
    r = r - b * DoubleDouble(q2);
    const double q3 = r.hi / b.hi;
    return quick_two_sum(q1, q2) + DoubleDouble(q3);
}

//---------------------------------------------------------------------------//
// Binomial
//---------------------------------------------------------------------------//

double Binomial::value() const {
    return exact ? static_cast<double>(exact_value) : std::exp(log_value);
}

DoubleDouble Binomial::wide() const {
    return exact ? DoubleDouble::from_integer(exact_value) : DoubleDouble(std::exp(log_value));
}

Binomial binom(int n, int r) {
    if (n < 0 || r < 0 || r > n) {
        throw DomainError("binom: need 0 <= r <= n, got n=" + std::to_string(n) +
                          ", r=" + std::to_string(r));
    }
    Binomial out;
    if (n <= kExactBinomialLimit) {
        const int m = std::min(r, n - r);
        Uint128 acc = 1;
        // After step i, acc == C(n - m + i, i), so every division is exact.
        for (int i = 1; i <= m; ++i) {
            acc = acc * static_cast<unsigned>(n - m + i) / static_cast<unsigned>(i);
        }
        out.exact = true;
        out.exact_value = static_cast<std::uint64_t>(acc);
        out.log_value = std::log(static_cast<double>(out.exact_value));
    } else {
        out.exact = false;
        out.log_value = std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
    }
    return out;
}

//---------------------------------------------------------------------------//
// Alternating binomial sum
//---------------------------------------------------------------------------//

AlternatingSum alternating_binomial_sum(int k, const std::function<DoubleDouble(int)>& term) {
    if (k < 1) {
        throw DomainError("alternating_binomial_sum: k must be >= 1, got " + std::to_string(k));
    }
    DoubleDouble sum;
    double largest = 0.0;
    for (int i = 0; i < k; ++i) {
        const DoubleDouble t = term(i);
        if (!std::isfinite(t.hi) || !std::isfinite(t.lo)) {
            throw EvaluationError("alternating_binomial_sum: term " + std::to_string(i) +
                                  " is not finite");
        }
        DoubleDouble contribution = binom(k - 1, i).wide() * t;
        if (i % 2 == 1) {
            contribution = -contribution;
        }
        largest = std::max(largest, std::abs(contribution.hi));
        sum = sum + contribution;
    }

    AlternatingSum out;
    out.wide = sum;
    out.value = sum.to_double();
    if (out.value == 0.0) {
        out.cancellation = largest == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    } else {
        out.cancellation = std::max(1.0, largest / std::abs(out.value));
    }
    return out;
}

//---------------------------------------------------------------------------//
// Quadrature
//---------------------------------------------------------------------------//

void QuadratureSettings::validate() const {
    if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0) || max_subdivisions < 1) {
        throw DomainError("QuadratureSettings: tolerances must be > 0 and max_subdivisions >= 1");
    }
}

namespace {

// Kronrod abscissae; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Segment& other) const { return error < other.error; }
};

double checked(const Integrand& f, double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
        throw EvaluationError("quadrature: integrand is not finite at x=" + std::to_string(x));
    }
    return y;
}

// QUADPACK qk15 with its error heuristics.
Segment gauss_kronrod_15(const Integrand& f, double a, double b) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double tiny = std::numeric_limits<double>::min();

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked(f, center);

    double result_gauss = fc * kWg[3];
    double result_kronrod = fc * kWgk[7];
    double result_abs = std::abs(result_kronrod);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};

    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = checked(f, center - dx);
        f2[j] = checked(f, center + dx);
        const double pair = f1[j] + f2[j];
        result_kronrod += kWgk[j] * pair;
        result_abs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) {
            result_gauss += kWg[j / 2] * pair;
        }
    }

    const double mean = 0.5 * result_kronrod;
    double result_asc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        result_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    }

    const double width = std::abs(half);
    const double value = result_kronrod * half;
    result_abs *= width;
    result_asc *= width;
    double error = std::abs((result_kronrod - result_gauss) * half);
    if (result_asc != 0.0 && error != 0.0) {
        error = result_asc * std::min(1.0, std::pow(200.0 * error / result_asc, 1.5));
    }
    if (result_abs > tiny / (50.0 * eps)) {
        error = std::max(50.0 * eps * result_abs, error);
    }
    return {a, b, value, error};
}

}  // namespace

QuadratureResult integrate_interval(const Integrand& f, double a, double b,
                                    const QuadratureSettings& settings) {
    settings.validate();
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("integrate_interval: bounds must be finite");
    }
    if (a == b) {
        return {0.0, 0.0, 0};
    }

    std::priority_queue<Segment> heap;
    Segment first = gauss_kronrod_15(f, a, b);
    double total = first.value;
    double total_error = first.error;
    heap.push(first);

    auto converged = [&] {
        return total_error <= std::max(settings.absolute_tolerance,
                                       settings.relative_tolerance * std::abs(total));
    };

    while (!converged()) {
        if (static_cast<int>(heap.size()) >= settings.max_subdivisions) {
            throw ConvergenceError("quadrature: tolerance not met within " +
                                       std::to_string(settings.max_subdivisions) + " subdivisions",
                                   total, total_error);
        }
        const Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b)) {
            throw ConvergenceError("quadrature: interval cannot be bisected further", total,
                                   total_error);
        }
        heap.pop();
        const Segment left = gauss_kronrod_15(f, worst.a, mid);
        const Segment right = gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to drop the drift of the running updates.
    QuadratureResult out;
    out.intervals = static_cast<int>(heap.size());
    double value = 0.0;
    double error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    out.value = value;
    out.error = error;
    return out;
}

QuadratureResult integrate_tail(const Integrand& f, double lower, double scale,
                                const QuadratureSettings& settings) {
    if (!std::isfinite(lower) || !(scale > 0.0) || !std::isfinite(scale)) {
        throw DomainError("integrate_tail: need finite lower bound and scale > 0");
    }
    const auto mapped = [&](double u) {
        const double w = 1.0 - u;
        const double y = f(lower + scale * u / w);
        // f decays at infinity; avoid 0 * inf near the right end.
        return y == 0.0 ? 0.0 : y * scale / (w * w);
    };
    return integrate_interval(mapped, 0.0, 1.0, settings);
}

QuadratureResult integrate_semi_infinite(const Integrand& f, const QuadratureSettings& settings) {
    return integrate_tail(f, 0.0, 1.0, settings);
}

//---------------------------------------------------------------------------//
// Root finding
//---------------------------------------------------------------------------//

void RootSettings::validate() const {
    if (!(tolerance_on_tau > 0.0) || max_iterations < 1) {
        throw DomainError("RootSettings: tolerance_on_tau must be > 0 and max_iterations >= 1");
    }
}

double solve_monotone_decreasing(const std::function<double(double)>& f, double target,
                                 const RootSettings& settings) {
    settings.validate();
    const auto eval = [&](double x) {
        const double y = f(x);
        if (std::isnan(y)) {
            throw EvaluationError("solve_monotone_decreasing: f is NaN at tau=" + std::to_string(x));
        }
        return y;
    };

    const double at_zero = eval(0.0);
    if (at_zero < target) {
        throw RootError(RootError::Kind::target_unreachable,
                        "solve_monotone_decreasing: f(0) = " + std::to_string(at_zero) +
                            " is below the target " + std::to_string(target));
    }
    if (at_zero == target) {
        return 0.0;
    }

    double lo = 0.0;
    double hi = 1.0;
    int expansions = 0;
    while (eval(hi) > target) {
        if (++expansions > settings.max_iterations) {
            throw RootError(RootError::Kind::no_root,
                            "solve_monotone_decreasing: no bracket found up to tau=" +
                                std::to_string(hi));
        }
        lo = hi;
        hi *= 2.0;
    }

    // Invariant: f(lo) > target >= f(hi).
    for (int it = 0; it < settings.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= settings.tolerance_on_tau * hi || mid <= lo || mid >= hi) {
            break;
        }
        const double y = eval(mid);
        if (y == target) {
            return mid;
        }
        (y > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace bcfar
