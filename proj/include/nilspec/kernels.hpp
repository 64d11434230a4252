#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nilspec/group.hpp"

namespace nilspec {

/// |kappa(x)| <= C (1 + |x| / scale)^{-N} for every x in G.
struct DecayCertificate {
    double C = 0.0;
    int N = 0;
    double scale = 1.0;
};

/// A Schwartz function on G given in closed form together with finitely many
/// polynomial decay bounds.
struct KernelFunction {
    GradedGroup group;
    std::function<double(std::span<const double>)> evaluate;
    double value_at_zero = 0.0;
    std::vector<DecayCertificate> decay;
    /// kappa * kappa~ (kappa~(x) = kappa(x^{-1})) when known in closed form.
    std::function<KernelFunction()> self_convolution;
    std::string label;

    double operator()(const GroupElement& x) const { return evaluate(x.coords); }
    /// min over certificates of C (1 + r / scale)^{-N}.
    double bound(double r) const;
};

/// (4 pi t)^{-n/2} exp(-|x|^2 / 4t)
double gaussian_heat(std::size_t n, double t, const GroupElement& x);
double gaussian_heat(std::size_t n, double t, std::span<const double> x);

/// p_t on R^n as a kernel (self-convolution p_{2t}).
KernelFunction gaussian_kernel(std::size_t n, double t);
/// x -> p_t(x - shift); kappa * kappa~ is again p_{2t}.
KernelFunction shifted_gaussian_kernel(double t, std::vector<double> shift);
/// exp(-|x|_E^2) in exponential coordinates of H_n (Euclidean norm).
KernelFunction heisenberg_test_kernel(std::size_t n);
/// The zero kernel on g.
KernelFunction zero_kernel(const GradedGroup& g);
/// a k1 + b k2 (same group); certificates add when their orders and scales match.
KernelFunction combine(double a, const KernelFunction& k1, double b, const KernelFunction& k2);
/// x -> kappa(x^{-1})
KernelFunction reflected(const KernelFunction& k);

/// kappa^{(eps)}(x) = eps^{-Q} kappa(D_{1/eps} x)
struct ScaledKernel {
    KernelFunction base;
    double epsilon = 1.0;

    double operator()(const GroupElement& x) const;
    double value_at_zero() const;
    /// The scaled kernel as a KernelFunction with rescaled certificates.
    KernelFunction as_kernel() const;
};

ScaledKernel scale_kernel(const KernelFunction& k, double epsilon);

struct PeriodisedValue {
    double value = 0.0;           // identity_term + off_identity
    double identity_term = 0.0;   // kappa(0)
    double off_identity = 0.0;    // sum over 0 < |gamma| <= R_cut
    double tail_bound = 0.0;      // bound for |gamma| > R_cut (inf if not certifiable)
};

/// sum over gamma in the lattice ball of radius R_cut of kappa(x^{-1} gamma x).
/// Throws std::invalid_argument if kappa has no certificate of order
/// N > w_n dim(G).
PeriodisedValue periodised_diag(const KernelFunction& k, const LatticeSubgroup& lat, const ExactElement& x,
                                double r_cut);
PeriodisedValue periodised_diag(const KernelFunction& k, const LatticeSubgroup& lat, const GroupElement& x,
                                double r_cut);
PeriodisedValue periodised_diag(const ScaledKernel& k, const LatticeSubgroup& lat, const ExactElement& x,
                                double r_cut);

struct TraceValue {
    double value = 0.0;
    double identity_term = 0.0;  // vol(M) kappa(0)
    double off_identity = 0.0;
    double quadrature_delta = 0.0;  // |I_res - I_{coarser}|
    double tail_bound = 0.0;        // weighted gamma-tail bound
    double error_estimate = 0.0;    // quadrature_delta + tail_bound
};

/// int_M K(x, x) dx by the grid quadrature of periodised_diag.
TraceValue periodised_trace(const KernelFunction& k, const LatticeSubgroup& lat, const FundamentalDomainGrid& grid,
                            double r_cut);
TraceValue periodised_trace(const ScaledKernel& k, const LatticeSubgroup& lat, const FundamentalDomainGrid& grid,
                            double r_cut);

/// ||T_kappa||_HS^2 = trace of the periodisation of kappa * kappa~.
/// Throws std::invalid_argument if the self-convolution is not available.
TraceValue hs_norm_squared(const KernelFunction& k, const LatticeSubgroup& lat, const FundamentalDomainGrid& grid,
                           double r_cut);
TraceValue hs_norm_squared(const ScaledKernel& k, const LatticeSubgroup& lat, const FundamentalDomainGrid& grid,
                           double r_cut);

/// CSV rows (epsilon, trace, eps^Q trace, eps^Q (trace - vol kappa(0) eps^{-Q}), tail_bound, error_estimate).
std::string periodisation_csv(const KernelFunction& k, const LatticeSubgroup& lat, const FundamentalDomainGrid& grid,
                              std::span<const double> epsilons, double r_cut);

}  // namespace nilspec
