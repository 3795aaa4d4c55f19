#pragma once

#include <cstdint>
#include <functional>

namespace bcfar {

//---------------------------------------------------------------------------//
// Double-double arithmetic
//---------------------------------------------------------------------------//

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2, about 32 significant digits.
// Used to carry the rounding error of alternating sums explicitly.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DoubleDouble() = default;
    constexpr DoubleDouble(double value) : hi(value) {}  // NOLINT(google-explicit-constructor)
    constexpr DoubleDouble(double high, double low) : hi(high), lo(low) {}

    static DoubleDouble from_integer(std::uint64_t value);

    double to_double() const noexcept { return hi + lo; }
};

DoubleDouble operator+(DoubleDouble a, DoubleDouble b);
DoubleDouble operator-(DoubleDouble a, DoubleDouble b);
DoubleDouble operator*(DoubleDouble a, DoubleDouble b);
DoubleDouble operator/(DoubleDouble a, DoubleDouble b);
inline DoubleDouble operator-(DoubleDouble a) { return {-a.hi, -a.lo}; }
inline DoubleDouble abs(DoubleDouble a) { return a.hi < 0.0 ? -a : a; }

//---------------------------------------------------------------------------//
// Binomial coefficients
//---------------------------------------------------------------------------//

// C(n, r). Exact in 64 bits for n <= 62 (C(62, 31) < 2^63); log-domain beyond.
struct Binomial {
    bool exact = true;
    std::uint64_t exact_value = 0;  // valid when exact
    double log_value = 0.0;         // natural log, always populated

    double value() const;
    DoubleDouble wide() const;
};

inline constexpr int kExactBinomialLimit = 62;

Binomial binom(int n, int r);

//---------------------------------------------------------------------------//
// Alternating binomial sums
//---------------------------------------------------------------------------//

struct AlternatingSum {
    double value = 0.0;
    DoubleDouble wide;
    // max_i |C(k-1,i) term(i)| / |value|; >= 1, +inf when the sum vanishes.
    double cancellation = 1.0;
};

// sum_{i=0}^{k-1} (-1)^i C(k-1, i) term(i), accumulated in double-double.
// Throws EvaluationError if a term is not finite, DomainError if k < 1.
AlternatingSum alternating_binomial_sum(int k, const std::function<DoubleDouble(int)>& term);

//---------------------------------------------------------------------------//
// Adaptive quadrature
//---------------------------------------------------------------------------//

struct QuadratureSettings {
    double relative_tolerance = 1e-10;
    double absolute_tolerance = 1e-14;
    int max_subdivisions = 200;

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

using Integrand = std::function<double(double)>;

// Adaptive 15-point Gauss-Kronrod on [a, b]. Bisects the interval with the
// largest error until sum(error) <= max(absolute, relative * |value|).
// Throws ConvergenceError (carrying the best estimate) when max_subdivisions
// intervals are not enough.
QuadratureResult integrate_interval(const Integrand& f, double a, double b,
                                    const QuadratureSettings& settings = {});

// Integral over (lower, inf) through x = lower + scale * u / (1 - u), u in (0, 1).
QuadratureResult integrate_tail(const Integrand& f, double lower, double scale,
                                const QuadratureSettings& settings = {});

// Integral over (0, inf) through lambda = u / (1 - u).
QuadratureResult integrate_semi_infinite(const Integrand& f, const QuadratureSettings& settings = {});

//---------------------------------------------------------------------------//
// Monotone root finding
//---------------------------------------------------------------------------//

struct RootSettings {
    double tolerance_on_tau = 1e-12;  // relative width of the final bracket
    int max_iterations = 200;

    void validate() const;
};

// Solves f(tau) = target for f strictly decreasing on [0, inf) with f(0) >= target.
// The bracket starts at [0, 1] and its upper end doubles until f(hi) <= target;
// bisection then shrinks it to the requested relative width.
double solve_monotone_decreasing(const std::function<double(double)>& f, double target,
                                 const RootSettings& settings = {});

}  // namespace bcfar
