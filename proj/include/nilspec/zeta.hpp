#pragma once

#include <span>
#include <string>
#include <vector>

#include "nilspec/numerics.hpp"
#include "nilspec/spectrum.hpp"

namespace nilspec {

// Heat trace -----------------------------------------------------------------

struct ThetaOptions {
    /// Spectral gap probe gamma in (0, lambda_1); 0 selects lambda_1 / 2.
    double tail_gap = 0.0;
    /// Largest acceptable tail bound for the truncated trace.
    double truncation_tolerance = 1e-10;
};

struct ThetaValue {
    double value = 0.0;
    double tail_bound = 0.0;
};

/// theta(t) = sum mult e^{-t lambda}. The omitted tail beyond the cutoff is
/// bounded through N(lambda) <= K lambda^{Q/nu}:
///   sum_{lambda > L} mult e^{-t lambda} <= K t^{-Q/nu} Gamma(Q/nu + 1, t L).
/// Throws CertificateError if that bound exceeds the tolerance.
ThetaValue theta(const EigenvalueStream& spec, double t, const ThetaOptions& opts = {});

/// Smallest cutoff (up to a factor 1.01) for which the tail bound of theta(t),
/// computed with the a priori envelope 4 c' + 4, is below delta.
double theta_cutoff(const NilmanifoldModel& model, double t, double delta);

/// C_gamma with |theta(t) - 1| <= C_gamma e^{-gamma t} for t >= 1, including
/// the certified contribution of eigenvalues beyond the cutoff.
double theta_gap_constant(const EigenvalueStream& spec, double gamma);

/// (2 sqrt(pi t))^{-1} sum_j exp(-j^2 / 4t), raised to the n-th power.
double theta_torus_poisson(std::size_t n, double t);

// Zeta -------------------------------------------------------------------------

struct ZetaValue {
    Complex value;
    double tail_bound = 0.0;
};

/// Dirichlet series sum mult lambda^{-s} over the nonzero stream entries with
///   tail <= sigma K L^{Q/nu - sigma} / (sigma - Q/nu),  sigma = Re s.
/// Throws std::domain_error unless Re s > Q/nu, CertificateError if the tail
/// bound exceeds delta.
ZetaValue zeta_direct(const EigenvalueStream& spec, Complex s, double delta = 1e-8);

struct MellinOptions {
    /// Smallest quadrature node of the (0, 1] integral.
    double t_min = 0.01;
    QuadOptions quad{1e-14, 1e-12, 2000};
};

/// zeta(s) = h1(s) + pole_term - 1/Gamma(s+1) + h2(s), with
///   h1 = Gamma(s)^{-1} int_1^inf t^{s-1} (theta - 1) dt
///   h2 = Gamma(s)^{-1} int_0^1 t^{s-1} (theta - vol p_1(0) t^{-Q/nu}) dt
///   pole_term = Gamma(s)^{-1} vol p_1(0) / (s - Q/nu).
struct MellinSplit {
    Complex s;
    Complex h1;
    Complex pole_term;
    Complex gamma_reciprocal_term;
    Complex h2;
    Complex value;
    double error_estimate = 0.0;
};

/// Throws PoleError if |s - Q/nu| < 1e-6 and CompletenessError if the stream
/// cutoff is below 40 / t_min.
MellinSplit zeta_mellin(const EigenvalueStream& spec, Complex s, const MellinOptions& opts = {});

struct ResidueEstimate {
    /// Richardson extrapolation of eps zeta(Q/nu + eps) from eps = +-1e-2, +-1e-3.
    double extrapolated = 0.0;
    double error_estimate = 0.0;
    /// vol p_1(0) / Gamma(Q/nu) from the model constants.
    double closed_form = 0.0;
};

ResidueEstimate residue_at_pole(const EigenvalueStream& spec, const MellinOptions& opts = {});

/// Z(s) = sum over pairs of nonzero eigenvalues (lambda_1 + lambda_2)^{-s},
/// truncated at lambda_1 + lambda_2 <= min(cutoffs), with the tail bounded by
/// N_1 N_2 <= K_1 K_2 lambda^{a_1 + a_2}.
ZetaValue product_zeta_Z(const EigenvalueStream& s1, const EigenvalueStream& s2, Complex s);

struct TorusCrossCheck {
    Complex lhs;             // zeta of R_1 (x) I + I (x) Delta_T from the product spectrum
    Complex torus_term;      // 2 (2 pi)^{-2s} zeta(2s)
    Complex middle_term;     // Gamma(s - 1/2) / (2 sqrt(pi) Gamma(s)) zeta_1(s - 1/2)
    Complex h;               // (sqrt(pi) Gamma(s))^{-1} int (theta_1 - 1) sum_{j>=1} e^{-j^2/4t} t^{s-3/2} dt
    double residual = 0.0;   // |lhs - (torus_term + middle_term + h)|
    /// Residual with the displayed form 2 (2 pi)^{-s} zeta(2s) and middle
    /// coefficient Gamma(s - 1/2) / (sqrt(pi) Gamma(s)).
    double residual_displayed_form = 0.0;
    double error_estimate = 0.0;
};

/// Cross-check of the product formula with a circle factor. `spec_l` is the
/// first factor; it must be complete far enough for Re s - 1/2 > Q/nu + 1/2
/// via the direct series, otherwise its zeta value is obtained by the Mellin split.
TorusCrossCheck torus_cross_check(const EigenvalueStream& spec_l, Complex s);

struct WeylFit {
    double constant = 0.0;  // mean of N(L) L^{-Q/nu} over the top half of the grid
    double drift = 0.0;     // (max - min) / mean over the same points
    double reference = 0.0; // vol p_1(0) / Gamma(1 + Q/nu), times (b^{Q/nu} - a^{Q/nu}) for segments
};

WeylFit weyl_fit(const EigenvalueStream& spec, std::span<const double> grid);
/// Semiclassical variant: counts over [a L, b L].
WeylFit weyl_fit_segment(const EigenvalueStream& spec, std::span<const double> grid, double a, double b);

// Tables -------------------------------------------------------------------------

std::string theta_csv(const EigenvalueStream& spec, std::span<const double> times, const ThetaOptions& opts = {});
std::string counting_csv(const EigenvalueStream& spec, std::span<const double> grid);
std::string zeta_csv(std::span<const MellinSplit> values);

}  // namespace nilspec
