#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nilspec/spectrum.hpp"

namespace nilspec {

struct RouteValue {
    std::string label;
    double value = 0.0;
    double error_estimate = 0.0;
};

/// One constant computed along several independent routes.
struct ConstantReport {
    std::string name;
    std::vector<RouteValue> routes;
    double tolerance = 0.0;
    /// True iff every pairwise relative deviation is <= tolerance.
    bool agree = false;
};

ConstantReport make_report(std::string name, std::vector<RouteValue> routes, double tolerance);

/// c_0(Delta_{R^n}) = (Gamma(n/2) 2^n pi^{n/2})^{-1}
double c0_euclidean(int n);

/// Prefactor of the Heisenberg Plancherel series. `stated` is (2 pi)^{-(3n+1)};
/// `consistent` is (2 pi)^{-(n+1)}, the value forced by the heat trace of the
/// nilmanifold spectrum (they differ by (2 pi)^{2n}).
enum class PrefactorMode { stated, consistent };

struct SeriesValue {
    double value = 0.0;
    /// Upper bound for the omitted tail of the series.
    double truncation_bound = 0.0;
};

/// Partial sum over a < terms of
///   prefactor * 2 * sum_a (n+a-1)! / ((n-1)! a!) (2a+n)^{-n-1}.
SeriesValue c0_heisenberg(std::size_t n, std::int64_t terms, PrefactorMode mode);

/// The same series summed to convergence: partial sum plus a midpoint
/// integral estimate of the tail (error well below 1e-13 relative).
double c0_heisenberg_limit(std::size_t n, PrefactorMode mode);

/// c_0(consistent) / c_0(stated) = (2 pi)^{2n}, computed from the two series.
double heisenberg_prefactor_ratio(std::size_t n);

struct FitValue {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// p_1(0) from t^{Q/nu} theta(t) / vol(M) at small probe times. With three
/// probes t, 2t, 4t the leading exponentially small correction
/// A exp(-B/t) is fitted and removed; otherwise the smallest-t value is used
/// and the spread over the probes is the error estimate.
/// Throws CompletenessError unless the stream is complete to 40 / min(probes).
FitValue p1_zero_from_heat_trace(const EigenvalueStream& spec, std::span<const double> probes);

/// c_0(R^ell) = c_0(R) / ell
double c0_power(double c0, int ell);
/// c_0(c R) = c^{-Q/nu} c_0(R)
double c0_scaled(double c0, double c, double Q, double nu);
/// p_{R^ell,1}(0) = p_{R,1}(0) Gamma(Q/(ell nu)) / (ell Gamma(Q/nu))
double p1_power_relation(double p1, int ell, double Q, double nu);

enum class Multiplier { zero, exp, lambda_exp, exp_square };

struct KernelAtZero {
    double lhs = 0.0;  // psi(R) delta_0 (0) from the closed-form kernel
    double rhs = 0.0;  // c_0 int_0^inf psi(lambda) lambda^{Q/nu} dlambda / lambda
    double rhs_error = 0.0;
};

/// Kernel-at-zero identity for the Laplacian on R^n (model must be a
/// torus_laplacian model, which carries the group-level constants of R^n).
KernelAtZero kernel_at_zero(Multiplier psi, const NilmanifoldModel& model);

enum class SubordinationMode {
    closed_form,   // alpha = 1/2, phi(s) = (4 pi)^{-1/2} s^{-3/2} exp(-1/(4s))
    experimental,  // phi(s) = (1/pi) int_0^inf e^{-su} e^{-u^a cos(pi a)} sin(u^a sin(pi a)) du
};

/// Density phi_alpha(s) of the one-sided stable law with Laplace transform exp(-lambda^alpha).
double subordination_density(double alpha, double s, SubordinationMode mode);

struct SubordinationCheck {
    double lhs = 0.0;  // exp(-lambda^alpha)
    double rhs = 0.0;  // int_0^inf exp(-lambda s) phi_alpha(s) ds
    double rhs_error = 0.0;
};

SubordinationCheck subordination_check(double alpha, double lambda,
                                       SubordinationMode mode = SubordinationMode::closed_form);

/// int_0^inf s^{-alpha beta} phi_alpha(s) ds, which equals
/// Gamma(beta) / (alpha Gamma(alpha beta)).
FitValue subordination_moment(double alpha, double beta, SubordinationMode mode = SubordinationMode::closed_form);

struct ConstantsSummary {
    std::vector<ConstantReport> reports;
    /// c_0(consistent) / c_0(stated) for H_1; approximately 4 pi^2.
    double heisenberg_prefactor_ratio = 0.0;
    /// c_0(H_1) recovered from the heat trace of the nilmanifold spectrum.
    FitValue heisenberg_c0_from_heat_trace;
};

/// Every cross-route constant check at desk scale.
ConstantsSummary constants_report();

}  // namespace nilspec
