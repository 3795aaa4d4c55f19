#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "bayescfar/numerics.hpp"

namespace bcfar {

//---------------------------------------------------------------------------//
// Exponential clutter conditioned on the k-th order statistic
//---------------------------------------------------------------------------//

// Conditioning data of the order-statistic predictive: window size n, index k
// and the observed k-th smallest cell t > 0.
class OsPredictive {
public:
    // Throws DomainError for k outside [1, n] and DegenerateWindowError for t == 0.
    OsPredictive(int n, int k, double t);

    int n() const noexcept { return n_; }
    int k() const noexcept { return k_; }
    double t() const noexcept { return t_; }

private:
    int n_;
    int k_;
    double t_;
};

struct OsEvalOptions {
    // Closed form is abandoned for quadrature when max|term| > limit * |sum|.
    double cancellation_limit = 1e8;
    // Evaluate the quadrature form alongside the closed form and fail on mismatch.
    bool cross_check = false;
    double cross_check_tolerance = 1e-8;
    // Relative accuracy only: Pfa values far below 1e-14 still get full digits.
    QuadratureSettings quadrature{1e-13, std::numeric_limits<double>::min(), 400};
};

struct OsEvaluation {
    double value = 0.0;
    double cancellation = 1.0;
    bool used_quadrature = false;
};

// Posterior density of the exponential rate given Z_(k) = t under the Jeffreys
// prior 1/rate:  t k C(n,k) (1 - e^{-rate t})^{k-1} e^{-rate t (n-k+1)}.
double posterior_lambda_os(double rate, const OsPredictive& os);

// Predictive density of the cell under test,
//   k t C(n,k) sum_i (-1)^i C(k-1,i) [z0 + t(n-k+1+i)]^{-2}.
OsEvaluation os_predictive_density_detail(double z0, const OsPredictive& os,
                                          const OsEvalOptions& options = {});
double os_predictive_density(double z0, const OsPredictive& os, const OsEvalOptions& options = {});

// P(Z0 > tau | Z_(k) = t) = k t C(n,k) sum_i (-1)^i C(k-1,i) [tau + t(n-k+1+i)]^{-1}.
OsEvaluation os_pfa_detail(double tau, const OsPredictive& os, const OsEvalOptions& options = {});
double os_pfa(double tau, const OsPredictive& os, const OsEvalOptions& options = {});

// Positive-integrand forms, before the binomial expansion. With mu = rate * t:
//   pfa     = k C(n,k)     int (1-e^{-mu})^{k-1} e^{-mu (tau/t + n-k+1)} dmu
//   density = k C(n,k) / t int mu (1-e^{-mu})^{k-1} e^{-mu (z0/t + n-k+1)} dmu
double os_pfa_quadrature(double tau, const OsPredictive& os,
                         const QuadratureSettings& settings = OsEvalOptions{}.quadrature);
double os_predictive_density_quadrature(double z0, const OsPredictive& os,
                                        const QuadratureSettings& settings = OsEvalOptions{}.quadrature);

//---------------------------------------------------------------------------//
// Generic predictive densities by quadrature
//---------------------------------------------------------------------------//

// Integration hints for one clutter parameter on (0, inf). Breakpoints split
// the axis where the posterior concentrates; the last piece is mapped with
// x = b + scale * u / (1 - u).
struct ParameterAxis {
    double scale = 1.0;
    std::vector<double> breakpoints;
};

class PredictiveModel {
public:
    using Parameters = std::span<const double>;
    using Likelihood = std::function<double(double z0, Parameters theta)>;
    using Density = std::function<double(Parameters theta)>;

    // The posterior must already include the prior and integrate to one;
    // construction checks it and throws DomainError otherwise.
    static PredictiveModel one_parameter(Likelihood likelihood, Density posterior,
                                         ParameterAxis axis = {}, QuadratureSettings settings = {});
    static PredictiveModel two_parameter(Likelihood likelihood, Density posterior,
                                         ParameterAxis first, ParameterAxis second,
                                         QuadratureSettings settings = {});

    // Posterior proportional to likelihood(data | theta) * prior(theta). The
    // normalizing constant is found by quadrature.
    static PredictiveModel from_kernel(Likelihood likelihood, Density kernel,
                                       std::vector<ParameterAxis> axes,
                                       QuadratureSettings settings = {});

    int parameter_dimension() const noexcept { return static_cast<int>(axes_.size()); }
    const QuadratureSettings& integration() const noexcept { return settings_; }

    // Mapping scale for integrals over the cell-under-test value.
    double observation_scale() const noexcept { return observation_scale_; }
    PredictiveModel& with_observation_scale(double scale);

    double likelihood(double z0, Parameters theta) const { return likelihood_(z0, theta); }
    double posterior(Parameters theta) const { return posterior_(theta); }

    // Integral of f over the parameter domain (0, inf)^dimension.
    double integrate_parameters(const std::function<double(Parameters)>& f,
                                const QuadratureSettings& settings) const;

    double posterior_mass() const;

private:
    PredictiveModel(Likelihood likelihood, Density posterior, std::vector<ParameterAxis> axes,
                    QuadratureSettings settings);

    void check_normalized() const;

    Likelihood likelihood_;
    Density posterior_;
    std::vector<ParameterAxis> axes_;
    QuadratureSettings settings_;
    double observation_scale_ = 1.0;
};

// int likelihood(z0 | theta) posterior(theta) dtheta.
double generic_predictive_density(double z0, const PredictiveModel& model);

// int_tau^inf generic_predictive_density(z0) dz0.
double generic_pfa(double tau, const PredictiveModel& model);

}  // namespace bcfar
