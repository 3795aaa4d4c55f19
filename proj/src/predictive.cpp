#include "bayescfar/predictive.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "bayescfar/errors.hpp"

namespace bcfar {

//---------------------------------------------------------------------------//
// OsPredictive
//---------------------------------------------------------------------------//

OsPredictive::OsPredictive(int n, int k, double t) : n_(n), k_(k), t_(t) {
    if (n < 1 || k < 1 || k > n) {
        throw DomainError("OsPredictive: need 1 <= k <= n, got n=" + std::to_string(n) +
                          ", k=" + std::to_string(k));
    }
    if (t == 0.0) {
        throw DegenerateWindowError("OsPredictive: observed order statistic is zero");
    }
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError("OsPredictive: t must be positive and finite");
    }
}

namespace {

// log(k C(n,k)) and its linear value when it is exactly representable.
struct Prefactor {
    DoubleDouble wide;
    double log_value;
};

Prefactor os_prefactor(const OsPredictive& os) {
    const Binomial c = binom(os.n(), os.k());
    return {DoubleDouble(static_cast<double>(os.k())) * c.wide(),
            std::log(static_cast<double>(os.k())) + c.log_value};
}

// Integrand mu^power (1 - e^{-mu})^{k-1} e^{-mu a}, in log space.
double os_kernel(double mu, int k, double a, int power) {
    double log_value = -mu * a;
    if (k > 1) {
        log_value += (k - 1) * std::log(-std::expm1(-mu));
    }
    if (power > 0) {
        log_value += power * std::log(mu);
    }
    return std::exp(log_value);
}

double os_quadrature(double x, const OsPredictive& os, int power,
                     const QuadratureSettings& settings) {
    const double a = x / os.t() + (os.n() - os.k() + 1);
    if (!std::isfinite(a)) {
        return 0.0;
    }
    const int k = os.k();
    const auto integrand = [k, a, power](double mu) { return os_kernel(mu, k, a, power); };
    const double scale = (k + power) / a;
    const double integral = integrate_tail(integrand, 0.0, scale, settings).value;
    const Prefactor pre = os_prefactor(os);
    // Both prefactors (k C(n,k), and 1/t for the density) stay outside.
    const double value = std::exp(pre.log_value + std::log(integral));
    return power == 0 ? value : value / os.t();
}

// Reciprocal of r + m in double-double, raised to `power` (1 or 2). Working
// in r = x / t keeps the sum free of t, so tiny or huge t cannot overflow it.
DoubleDouble os_term(const DoubleDouble& r, double m, int power) {
    const DoubleDouble inverse = DoubleDouble(1.0) / (r + DoubleDouble(m));
    return power == 1 ? inverse : inverse * inverse;
}

OsEvaluation os_evaluate(double x, const OsPredictive& os, const OsEvalOptions& options, int power,
                         const char* name) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string(name) + ": argument must be finite and nonnegative");
    }
    const double t = os.t();
    OsEvaluation out;
    if (!std::isfinite(x / t)) {
        // x / t beyond the double range: both tails have long since reached 0.
        return out;
    }
    const DoubleDouble ratio = DoubleDouble(x) / DoubleDouble(t);
    const double base = os.n() - os.k() + 1;
    const AlternatingSum sum = alternating_binomial_sum(
        os.k(), [&](int i) { return os_term(ratio, base + i, power); });

    const auto quadrature = [&] {
        try {
            return os_quadrature(x, os, power == 1 ? 0 : 1, options.quadrature);
        } catch (const ConvergenceError& e) {
            throw EvaluationError(std::string(name) +
                                  ": closed form cancels and quadrature fallback failed: " + e.what());
        }
    };

    out.cancellation = sum.cancellation;
    if (sum.cancellation > options.cancellation_limit) {
        out.value = quadrature();
        out.used_quadrature = true;
        return out;
    }

    // k C(n,k) * sum, and 1/t more for the density
    const Prefactor pre = os_prefactor(os);
    const DoubleDouble scaled = pre.wide * sum.wide;
    out.value = power == 1 ? scaled.to_double() : (scaled / DoubleDouble(t)).to_double();
    if (!std::isfinite(out.value)) {
        throw EvaluationError(std::string(name) + ": closed form is not finite");
    }

    if (options.cross_check) {
        const double check = quadrature();
        const double scale = std::max(std::abs(check), std::abs(out.value));
        if (std::abs(check - out.value) > options.cross_check_tolerance * scale) {
            throw EvaluationError(std::string(name) + ": closed form " + std::to_string(out.value) +
                                  " disagrees with quadrature " + std::to_string(check));
        }
    }
    return out;
}

}  // namespace

double posterior_lambda_os(double rate, const OsPredictive& os) {
    if (!(rate > 0.0)) {
        throw DomainError("posterior_lambda_os: rate must be positive");
    }
    // The density only depends on rate * t, and carries the Jacobian t.
    return os.t() * os_kernel(rate * os.t(), os.k(), os.n() - os.k() + 1, 0) *
           std::exp(os_prefactor(os).log_value);
}

OsEvaluation os_predictive_density_detail(double z0, const OsPredictive& os,
                                          const OsEvalOptions& options) {
    return os_evaluate(z0, os, options, 2, "os_predictive_density");
}

double os_predictive_density(double z0, const OsPredictive& os, const OsEvalOptions& options) {
    return os_predictive_density_detail(z0, os, options).value;
}

OsEvaluation os_pfa_detail(double tau, const OsPredictive& os, const OsEvalOptions& options) {
    OsEvaluation out = os_evaluate(tau, os, options, 1, "os_pfa");
    out.value = std::clamp(out.value, 0.0, 1.0);
    return out;
}

double os_pfa(double tau, const OsPredictive& os, const OsEvalOptions& options) {
    return os_pfa_detail(tau, os, options).value;
}

double os_pfa_quadrature(double tau, const OsPredictive& os, const QuadratureSettings& settings) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw DomainError("os_pfa_quadrature: tau must be finite and nonnegative");
    }
    return std::min(1.0, os_quadrature(tau, os, 0, settings));
}

double os_predictive_density_quadrature(double z0, const OsPredictive& os,
                                        const QuadratureSettings& settings) {
    if (!(z0 >= 0.0) || !std::isfinite(z0)) {
        throw DomainError("os_predictive_density_quadrature: z0 must be finite and nonnegative");
    }
    return os_quadrature(z0, os, 1, settings);
}

//---------------------------------------------------------------------------//
// PredictiveModel
//---------------------------------------------------------------------------//

namespace {

void validate_axis(const ParameterAxis& axis) {
    if (!(axis.scale > 0.0) || !std::isfinite(axis.scale)) {
        throw DomainError("ParameterAxis: scale must be positive and finite");
    }
    for (double b : axis.breakpoints) {
        if (!(b > 0.0) || !std::isfinite(b)) {
            throw DomainError("ParameterAxis: breakpoints must be positive and finite");
        }
    }
}

// Integral over (0, inf), split at the axis breakpoints.
double integrate_axis(const Integrand& f, const ParameterAxis& axis,
                      const QuadratureSettings& settings) {
    std::vector<double> points = axis.breakpoints;
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    // Below the first point the integrand is mapped through theta = first * e^{-w}
    // so that a likelihood peak near zero is resolved at any depth.
    const double first = points.empty() ? axis.scale : points.front();
    double total = integrate_tail(
                       [&](double w) {
                           const double theta = first * std::exp(-w);
                           return theta == 0.0 ? 0.0 : f(theta) * theta;
                       },
                       0.0, 4.0, settings)
                       .value;
    double lower = first;
    for (double p : points) {
        if (p > lower) {
            total += integrate_interval(f, lower, p, settings).value;
            lower = p;
        }
    }
    return total + integrate_tail(f, lower, axis.scale, settings).value;
}

// Nested integrals run at a tighter tolerance so the outer rule sees a smooth integrand.
QuadratureSettings inner_settings(const QuadratureSettings& outer) {
    QuadratureSettings inner = outer;
    inner.relative_tolerance = std::max(outer.relative_tolerance * 1e-2, 1e-13);
    inner.absolute_tolerance = outer.absolute_tolerance * 1e-2;
    return inner;
}

}  // namespace

PredictiveModel::PredictiveModel(Likelihood likelihood, Density posterior,
                                 std::vector<ParameterAxis> axes, QuadratureSettings settings)
    : likelihood_(std::move(likelihood)),
      posterior_(std::move(posterior)),
      axes_(std::move(axes)),
      settings_(settings) {
    settings_.validate();
    if (!likelihood_ || !posterior_) {
        throw DomainError("PredictiveModel: likelihood and posterior must be callable");
    }
    if (axes_.size() != 1 && axes_.size() != 2) {
        throw DomainError("PredictiveModel: parameter dimension must be 1 or 2");
    }
    for (const auto& axis : axes_) {
        validate_axis(axis);
    }
}

PredictiveModel PredictiveModel::one_parameter(Likelihood likelihood, Density posterior,
                                               ParameterAxis axis, QuadratureSettings settings) {
    PredictiveModel model(std::move(likelihood), std::move(posterior), {std::move(axis)}, settings);
    model.check_normalized();
    return model;
}

PredictiveModel PredictiveModel::two_parameter(Likelihood likelihood, Density posterior,
                                               ParameterAxis first, ParameterAxis second,
                                               QuadratureSettings settings) {
    PredictiveModel model(std::move(likelihood), std::move(posterior),
                          {std::move(first), std::move(second)}, settings);
    model.check_normalized();
    return model;
}

PredictiveModel PredictiveModel::from_kernel(Likelihood likelihood, Density kernel,
                                             std::vector<ParameterAxis> axes,
                                             QuadratureSettings settings) {
    PredictiveModel raw(likelihood, kernel, axes, settings);
    const double mass = raw.posterior_mass();
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw DomainError("PredictiveModel: posterior kernel has no finite positive mass");
    }
    Density posterior = [kernel = std::move(kernel), mass](Parameters theta) {
        return kernel(theta) / mass;
    };
    return PredictiveModel(std::move(likelihood), std::move(posterior), std::move(axes), settings);
}

PredictiveModel& PredictiveModel::with_observation_scale(double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw DomainError("PredictiveModel: observation scale must be positive and finite");
    }
    observation_scale_ = scale;
    return *this;
}

double PredictiveModel::integrate_parameters(const std::function<double(Parameters)>& f,
                                             const QuadratureSettings& settings) const {
    if (axes_.size() == 1) {
        return integrate_axis(
            [&](double a) {
                const std::array<double, 1> theta{a};
                return f(theta);
            },
            axes_[0], settings);
    }
    const QuadratureSettings inner = inner_settings(settings);
    return integrate_axis(
        [&](double a) {
            return integrate_axis(
                [&](double b) {
                    const std::array<double, 2> theta{a, b};
                    return f(theta);
                },
                axes_[1], inner);
        },
        axes_[0], settings);
}

double PredictiveModel::posterior_mass() const {
    return integrate_parameters(posterior_, settings_);
}

void PredictiveModel::check_normalized() const {
    const double mass = posterior_mass();
    const double tolerance = std::max(1e-6, 100.0 * settings_.relative_tolerance);
    if (!(std::abs(mass - 1.0) <= tolerance)) {
        throw DomainError("PredictiveModel: posterior integrates to " + std::to_string(mass) +
                          ", not 1");
    }
}

double generic_predictive_density(double z0, const PredictiveModel& model) {
    if (!(z0 >= 0.0) || !std::isfinite(z0)) {
        throw DomainError("generic_predictive_density: z0 must be finite and nonnegative");
    }
    return model.integrate_parameters(
        [&](PredictiveModel::Parameters theta) {
            const double p = model.posterior(theta);
            return p == 0.0 ? 0.0 : model.likelihood(z0, theta) * p;
        },
        model.integration());
}

double generic_pfa(double tau, const PredictiveModel& model) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw DomainError("generic_pfa: tau must be finite and nonnegative");
    }
    const QuadratureSettings inner = inner_settings(model.integration());
    const auto density = [&](double z0) {
        return model.integrate_parameters(
            [&](PredictiveModel::Parameters theta) {
                const double p = model.posterior(theta);
                return p == 0.0 ? 0.0 : model.likelihood(z0, theta) * p;
            },
            inner);
    };
    const double value =
        integrate_tail(density, tau, model.observation_scale(), model.integration()).value;
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace bcfar
