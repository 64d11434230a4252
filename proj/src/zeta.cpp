#include "nilspec/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nilspec/errors.hpp"
#include "nilspec/format.hpp"

namespace nilspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// exp(-x) underflows to zero beyond this.
constexpr double kExpCutoff = 745.0;

// Bound for sum_{lambda > L} mult e^{-t lambda} given N(lambda) <= K lambda^a.
double theta_tail(double K, double a, double t, double cutoff) {
    if (!std::isfinite(cutoff)) return 0.0;
    const double x = t * cutoff;
    if (x <= 0.0) return kInf;
    return K * std::pow(t, -a) * upper_incomplete_gamma_bound(a + 1.0, x);
}

// sum over nonzero entries of mult e^{-t lambda}
double theta_minus_one(std::span<const SpectralEntry> entries, double t) {
    CompensatedSum<double> sum;
    for (std::size_t i = 1; i < entries.size(); ++i) {
        const double x = t * entries[i].lambda;
        if (x > kExpCutoff) break;
        sum.add(static_cast<double>(entries[i].multiplicity) * std::exp(-x));
    }
    return sum.value();
}

Complex complex_power(double t, Complex s) { return std::exp(s * std::log(t)); }

}  // namespace

// Heat trace -------------------------------------------------------------------

ThetaValue theta(const EigenvalueStream& spec, double t, const ThetaOptions& opts) {
    if (!(t > 0.0)) throw std::invalid_argument("theta: t must be positive");
    if (!(opts.truncation_tolerance > 0.0)) throw std::invalid_argument("theta: tolerance must be positive");
    if (spec.size() > 1 && (opts.tail_gap < 0.0 || opts.tail_gap >= spec.first_nonzero()))
        throw std::invalid_argument("theta: tail gap must lie in (0, lambda_1)");
    ThetaValue out;
    out.tail_bound = theta_tail(spec.weyl_envelope(), spec.model().exponent(), t, spec.cutoff());
    if (out.tail_bound > opts.truncation_tolerance)
        throw CertificateError("theta(" + format_double(t) + "): tail bound " + format_double(out.tail_bound) +
                               " exceeds tolerance; stream cutoff " + format_double(spec.cutoff()) +
                               " is below the required " +
                               format_double(theta_cutoff(spec.model(), t, opts.truncation_tolerance)));
    out.value = 1.0 + theta_minus_one(spec.entries(), t);
    return out;
}

double theta_cutoff(const NilmanifoldModel& model, double t, double delta) {
    if (!(t > 0.0) || !(delta > 0.0)) throw std::invalid_argument("theta_cutoff: t and delta must be positive");
    const double K = 4.0 * model.weyl_constant() + 4.0;
    const double a = model.exponent();
    double hi = 1.0 / t;
    while (theta_tail(K, a, t, hi) > delta) hi *= 2.0;
    double lo = hi / 2.0;
    while (hi > 1.01 * lo) {
        const double mid = 0.5 * (lo + hi);
        (theta_tail(K, a, t, mid) > delta ? lo : hi) = mid;
    }
    return hi;
}

double theta_gap_constant(const EigenvalueStream& spec, double gamma) {
    if (spec.size() < 2) return 0.0;
    if (!(gamma > 0.0) || gamma >= spec.first_nonzero())
        throw std::invalid_argument("theta_gap_constant: gamma must lie in (0, lambda_1)");
    CompensatedSum<double> sum;
    for (std::size_t i = 1; i < spec.size(); ++i) {
        const auto& e = spec.entries()[i];
        if (e.lambda - gamma > kExpCutoff) break;
        sum.add(static_cast<double>(e.multiplicity) * std::exp(-(e.lambda - gamma)));
    }
    const double tail = theta_tail(spec.weyl_envelope(), spec.model().exponent(), 1.0, spec.cutoff());
    return sum.value() + std::exp(gamma) * tail;
}

double theta_torus_poisson(std::size_t n, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("theta_torus_poisson: t must be positive");
    CompensatedSum<double> sum;
    sum.add(1.0);
    for (double j = 1.0;; j += 1.0) {
        const double term = std::exp(-j * j / (4.0 * t));
        sum.add(2.0 * term);
        if (term < 1e-20) break;
    }
    const double one_dim = sum.value() / (2.0 * std::sqrt(kPi * t));
    return std::pow(one_dim, static_cast<double>(n));
}

// Zeta -------------------------------------------------------------------------

ZetaValue zeta_direct(const EigenvalueStream& spec, Complex s, double delta) {
    const double a = spec.model().exponent();
    const double sigma = s.real();
    if (!(sigma > a))
        throw std::domain_error("zeta_direct: the Dirichlet series needs Re s > Q/nu = " + format_double(a));
    ZetaValue out;
    out.tail_bound = std::isfinite(spec.cutoff())
                         ? sigma * spec.weyl_envelope() * std::pow(spec.cutoff(), a - sigma) / (sigma - a)
                         : 0.0;
    if (out.tail_bound > delta)
        throw CertificateError("zeta_direct: tail bound " + format_double(out.tail_bound) + " exceeds " +
                               format_double(delta) + " at cutoff " + format_double(spec.cutoff()));
    CompensatedSum<Complex> sum;
    for (std::size_t i = 1; i < spec.size(); ++i) {
        const auto& e = spec.entries()[i];
        sum.add(static_cast<double>(e.multiplicity) * complex_power(e.lambda, -s));
    }
    out.value = sum.value();
    return out;
}

MellinSplit zeta_mellin(const EigenvalueStream& spec, Complex s, const MellinOptions& opts) {
    const auto& model = spec.model();
    const double a = model.exponent();
    const double C = model.heat_coefficient();
    if (std::abs(s - a) < 1e-6)
        throw PoleError("zeta_mellin: s = " + format_double(s.real()) + (s.imag() != 0.0 ? "+i" + format_double(s.imag()) : "") +
                        " is within 1e-6 of the pole Q/nu = " + format_double(a));
    if (!(opts.t_min > 0.0 && opts.t_min < 1.0)) throw std::invalid_argument("zeta_mellin: t_min must lie in (0, 1)");
    if (spec.cutoff() < 40.0 / opts.t_min)
        throw CompletenessError("zeta_mellin: stream cutoff " + format_double(spec.cutoff()) + " is below 40/t_min = " +
                                format_double(40.0 / opts.t_min));

    MellinSplit out;
    out.s = s;
    out.gamma_reciprocal_term = -reciprocal_gamma(s + 1.0);
    const Complex rg = reciprocal_gamma(s);
    if (rg == Complex(0.0)) {
        // s = 0, -1, -2, ...: every Gamma(s)^{-1}-weighted component vanishes.
        out.value = out.gamma_reciprocal_term;
        return out;
    }
    const auto entries = spec.entries();
    const double sigma = s.real();
    const double K = spec.weyl_envelope();

    // h1 on [1, T].
    double err_h1 = 0.0;
    Complex I1{};
    if (spec.size() > 1) {
        const double gap = 0.5 * spec.first_nonzero();
        const double Cg = theta_gap_constant(spec, gap);
        const double T = std::max(1.0, (std::log(std::max(Cg, 1.0)) + std::log(1e16) + std::max(0.0, sigma) * 4.0) / gap);
        auto f1 = [&](double t) { return complex_power(t, s - 1.0) * theta_minus_one(entries, t); };
        double lo = 1.0;
        CompensatedSum<Complex> acc;
        while (lo < T) {
            const double hi = std::min(T, lo + 8.0 / gap);
            auto r = integrate(f1, lo, hi, opts.quad);
            acc.add(r.value);
            err_h1 += r.error;
            lo = hi;
        }
        I1 = acc.value();
        // Omitted [T, inf): C_gamma int_T^inf t^{sigma-1} e^{-gamma t} dt.
        if (sigma <= 1.0)
            err_h1 += Cg * std::exp(-gap * T) / gap;
        else
            err_h1 += Cg * std::pow(gap, -sigma) * upper_incomplete_gamma_bound(sigma, gap * T);
        // Truncated spectrum inside [1, T]: theta tail is decreasing in t.
        err_h1 += theta_tail(K, a, 1.0, spec.cutoff()) * std::max(1.0, std::pow(T, sigma - 1.0)) * (T - 1.0);
    }

    // h2 on [t_min, 1] over geometric panels.
    auto g = [&](double t) { return 1.0 + theta_minus_one(entries, t) - C * std::pow(t, -a); };
    auto f2 = [&](double t) { return complex_power(t, s - 1.0) * g(t); };
    double err_h2 = 0.0;
    CompensatedSum<Complex> acc2;
    for (double hi = 1.0; hi > opts.t_min;) {
        const double lo = std::max(0.5 * hi, opts.t_min);
        // theta - C t^{-a} cancels; the panel cannot resolve below the roundoff of its terms.
        QuadOptions q = opts.quad;
        const double noise = 1e-15 * (1.0 + C * std::pow(lo, -a)) * std::max(std::pow(lo, sigma - 1.0), 1.0) * (hi - lo);
        q.abs_tol = std::max(q.abs_tol, noise);
        auto r = integrate(f2, lo, hi, q);
        acc2.add(r.value);
        err_h2 += r.error;
        hi = lo;
    }
    const Complex I2 = acc2.value();
    err_h2 += theta_tail(K, a, opts.t_min, spec.cutoff()) * std::max(1.0, std::pow(opts.t_min, sigma - 1.0));
    // (0, t_min): envelope M (t / t_min)^k with the measured decay rate k,
    // never below roundoff of theta at t_min.
    {
        const double t0 = opts.t_min;
        const double g0 = std::abs(g(t0));
        const double g1 = std::abs(g(2.0 * t0));
        const double M = std::max(g0, 4e-16 * (1.0 + C * std::pow(t0, -a)));
        double k = (g0 > 0.0 && g1 > g0) ? std::log(g1 / g0) / std::log(2.0) : 0.0;
        k = std::max(k, 2.0 - sigma);
        err_h2 += M * std::pow(t0, sigma) / (sigma + k);
    }

    const double rg_abs = std::abs(rg);
    out.h1 = rg * I1;
    out.h2 = rg * I2;
    out.pole_term = rg * C / (s - a);
    out.value = out.h1 + out.pole_term + out.gamma_reciprocal_term + out.h2;
    out.error_estimate = rg_abs * (err_h1 + err_h2) + 1e-15 * (std::abs(out.h1) + std::abs(out.h2) + std::abs(out.pole_term));
    return out;
}

ResidueEstimate residue_at_pole(const EigenvalueStream& spec, const MellinOptions& opts) {
    const auto& model = spec.model();
    const double a = model.exponent();
    auto symmetric = [&](double eps, double& err) {
        const auto plus = zeta_mellin(spec, a + eps, opts);
        const auto minus = zeta_mellin(spec, a - eps, opts);
        err = 0.5 * eps * (plus.error_estimate + minus.error_estimate);
        return 0.5 * eps * (plus.value.real() - minus.value.real());
    };
    double e1 = 0.0, e2 = 0.0;
    const double r1 = symmetric(1e-2, e1);
    const double r2 = symmetric(1e-3, e2);
    ResidueEstimate out;
    out.extrapolated = r2 + (r2 - r1) / 99.0;
    out.error_estimate = std::abs(r2 - r1) / 99.0 + e1 + e2;
    out.closed_form = model.heat_coefficient() / std::tgamma(a);
    return out;
}

ZetaValue product_zeta_Z(const EigenvalueStream& s1, const EigenvalueStream& s2, Complex s) {
    const double a = s1.model().exponent() + s2.model().exponent();
    const double sigma = s.real();
    if (!(sigma > a))
        throw std::domain_error("product_zeta_Z: the double series needs Re s > " + format_double(a));
    const double cutoff = std::min(s1.cutoff(), s2.cutoff());
    CompensatedSum<Complex> sum;
    for (std::size_t i = 1; i < s1.size(); ++i) {
        const auto& e1 = s1.entries()[i];
        if (e1.lambda > cutoff) break;
        for (std::size_t j = 1; j < s2.size(); ++j) {
            const auto& e2 = s2.entries()[j];
            const double lambda = e1.lambda + e2.lambda;
            if (lambda > cutoff) break;
            sum.add(static_cast<double>(e1.multiplicity) * static_cast<double>(e2.multiplicity) *
                    complex_power(lambda, -s));
        }
    }
    ZetaValue out;
    out.value = sum.value();
    out.tail_bound = std::isfinite(cutoff) ? sigma * s1.weyl_envelope() * s2.weyl_envelope() *
                                                 std::pow(cutoff, a - sigma) / (sigma - a)
                                           : 0.0;
    return out;
}

TorusCrossCheck torus_cross_check(const EigenvalueStream& spec_l, Complex s) {
    const auto& model = spec_l.model();
    const double cutoff = spec_l.cutoff();
    const double sigma = s.real();
    if (!(sigma > model.exponent() + 0.5))
        throw std::domain_error("torus_cross_check: need Re s > Q/nu + 1/2 for the product series");
    // theta_1 is evaluated down to t_lo, where exp(-1/(4 t_lo)) < 1e-30.
    const double t_lo = 1.0 / (4.0 * 70.0);
    if (cutoff < 40.0 / t_lo)
        throw CompletenessError("torus_cross_check: stream cutoff must be at least " + format_double(40.0 / t_lo));

    TorusCrossCheck out;
    const auto circle = torus_eigenvalues(1, cutoff);
    const auto combined = product_spectrum(spec_l, circle, cutoff);
    const double delta = 1e-7;
    const auto lhs = zeta_direct(combined, s, delta);
    out.lhs = lhs.value;

    out.torus_term = 2.0 * std::exp(-2.0 * s * std::log(2.0 * kPi)) * riemann_zeta(2.0 * s);
    const Complex coeff = gamma(s - 0.5) * reciprocal_gamma(s) / (2.0 * std::sqrt(kPi));
    const Complex shifted = s - 0.5;
    Complex zeta_l;
    double zeta_l_err = 0.0;
    if (shifted.real() > model.exponent() + 0.5) {
        const auto z = zeta_direct(spec_l, shifted, delta);
        zeta_l = z.value;
        zeta_l_err = z.tail_bound;
    } else {
        const auto z = zeta_mellin(spec_l, shifted);
        zeta_l = z.value;
        zeta_l_err = z.error_estimate;
    }
    out.middle_term = coeff * zeta_l;

    // h(s)
    const auto entries = spec_l.entries();
    auto theta_sum = [](double t) {
        CompensatedSum<double> acc;
        for (double j = 1.0;; j += 1.0) {
            const double term = std::exp(-j * j / (4.0 * t));
            acc.add(term);
            if (term < 1e-20 * acc.value() || term == 0.0) break;
        }
        return acc.value();
    };
    auto integrand = [&](double t) {
        return complex_power(t, s - 1.5) * theta_minus_one(entries, t) * theta_sum(t);
    };
    double quad_err = 0.0;
    CompensatedSum<Complex> acc;
    if (spec_l.size() > 1) {
        const double gap = 0.5 * spec_l.first_nonzero();
        const double Cg = theta_gap_constant(spec_l, gap);
        double T = 1.0;
        while (Cg * std::sqrt(kPi) * std::pow(T, sigma - 1.0) * std::exp(-gap * T) / gap > 1e-20) T *= 1.5;
        for (double lo = t_lo; lo < T;) {
            const double hi = std::min(T, lo < 1.0 ? std::min(1.0, 4.0 * lo) : lo + 8.0 / gap);
            auto r = integrate(integrand, lo, hi, QuadOptions{1e-16, 1e-13, 2000});
            acc.add(r.value);
            quad_err += r.error;
            lo = hi;
        }
    }
    const Complex h_scale = reciprocal_gamma(s) / std::sqrt(kPi);
    out.h = h_scale * acc.value();

    const Complex rhs = out.torus_term + out.middle_term + out.h;
    out.residual = std::abs(out.lhs - rhs);
    const Complex displayed = 2.0 * std::exp(-s * std::log(2.0 * kPi)) * riemann_zeta(2.0 * s) + 2.0 * out.middle_term + out.h;
    out.residual_displayed_form = std::abs(out.lhs - displayed);
    out.error_estimate = lhs.tail_bound + std::abs(coeff) * zeta_l_err + std::abs(h_scale) * quad_err;
    return out;
}

namespace {

WeylFit fit_values(const std::vector<double>& values, double reference) {
    if (values.empty()) throw std::invalid_argument("weyl_fit: empty grid");
    const std::size_t start = values.size() / 2;
    CompensatedSum<double> sum;
    double lo = kInf, hi = -kInf;
    for (std::size_t i = start; i < values.size(); ++i) {
        sum.add(values[i]);
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
    }
    WeylFit out;
    out.constant = sum.value() / static_cast<double>(values.size() - start);
    out.drift = out.constant != 0.0 ? (hi - lo) / out.constant : 0.0;
    out.reference = reference;
    return out;
}

void check_grid(std::span<const double> grid) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw std::invalid_argument("weyl_fit: grid values must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("weyl_fit: grid must be increasing");
    }
}

}  // namespace

WeylFit weyl_fit(const EigenvalueStream& spec, std::span<const double> grid) {
    check_grid(grid);
    const double a = spec.model().exponent();
    std::vector<double> values;
    for (double L : grid) values.push_back(static_cast<double>(counting(spec, L)) * std::pow(L, -a));
    return fit_values(values, spec.model().weyl_constant());
}

WeylFit weyl_fit_segment(const EigenvalueStream& spec, std::span<const double> grid, double lo, double hi) {
    check_grid(grid);
    const double a = spec.model().exponent();
    std::vector<double> values;
    for (double L : grid)
        values.push_back(static_cast<double>(semiclassical_count(spec, lo, hi, L)) * std::pow(L, -a));
    return fit_values(values, spec.model().weyl_constant() * (std::pow(hi, a) - std::pow(lo, a)));
}

// Tables -------------------------------------------------------------------------

std::string theta_csv(const EigenvalueStream& spec, std::span<const double> times, const ThetaOptions& opts) {
    std::string out = "t,theta,tail_bound\n";
    for (double t : times) {
        const auto v = theta(spec, t, opts);
        out += format_double(t) + "," + format_double(v.value) + "," + format_double(v.tail_bound) + "\n";
    }
    return out;
}

std::string counting_csv(const EigenvalueStream& spec, std::span<const double> grid) {
    const double a = spec.model().exponent();
    std::string out = "lambda,count,normalised_count,error_estimate\n";
    for (double L : grid) {
        const auto n = counting(spec, L);
        out += format_double(L) + "," + std::to_string(n) + "," +
               format_double(static_cast<double>(n) * std::pow(L, -a)) + ",0\n";
    }
    return out;
}

std::string zeta_csv(std::span<const MellinSplit> values) {
    std::string out = "re_s,im_s,re_zeta,im_zeta,error_estimate\n";
    for (const auto& v : values)
        out += format_double(v.s.real()) + "," + format_double(v.s.imag()) + "," + format_double(v.value.real()) + "," +
               format_double(v.value.imag()) + "," + format_double(v.error_estimate) + "\n";
    return out;
}

}  // namespace nilspec
