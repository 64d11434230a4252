#include "nilspec/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nilspec/errors.hpp"
#include "nilspec/format.hpp"
#include "nilspec/kernels.hpp"
#include "nilspec/numerics.hpp"
#include "nilspec/zeta.hpp"

namespace nilspec {

ConstantReport make_report(std::string name, std::vector<RouteValue> routes, double tolerance) {
    ConstantReport r{std::move(name), std::move(routes), tolerance, true};
    for (std::size_t i = 0; i < r.routes.size(); ++i)
        for (std::size_t j = i + 1; j < r.routes.size(); ++j) {
            const double a = r.routes[i].value, b = r.routes[j].value;
            const double scale = std::max(std::abs(a), std::abs(b));
            const double dev = scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
            if (!(dev <= tolerance)) r.agree = false;
        }
    return r;
}

double c0_euclidean(int n) {
    if (n < 1) throw std::invalid_argument("c0_euclidean: n must be >= 1");
    return 1.0 / (std::tgamma(0.5 * n) * std::pow(2.0, n) * std::pow(kPi, 0.5 * n));
}

namespace {

double heisenberg_prefactor(std::size_t n, PrefactorMode mode) {
    const double nn = static_cast<double>(n);
    return mode == PrefactorMode::stated ? std::pow(2.0 * kPi, -(3.0 * nn + 1.0)) : std::pow(2.0 * kPi, -(nn + 1.0));
}

// a^2 binom(n+a-1, a) (2a+n)^{-n-1} at a = 1/w, written as
// prod_j (1 + j w) / (j (2 + n w)) * (2 + n w)^{-2} so that w -> 0 is regular.
double series_term_inverted(std::size_t n, double w) {
    const double nn = static_cast<double>(n);
    const double x = 2.0 + nn * w;
    double prod = 1.0;
    for (std::size_t j = 1; j < n; ++j) prod *= (1.0 + static_cast<double>(j) * w) / (static_cast<double>(j) * x);
    return prod / (x * x);
}

}  // namespace

SeriesValue c0_heisenberg(std::size_t n, std::int64_t terms, PrefactorMode mode) {
    if (n < 1) throw std::invalid_argument("c0_heisenberg: n must be >= 1");
    if (terms < 1) throw std::invalid_argument("c0_heisenberg: terms must be >= 1");
    const double nn = static_cast<double>(n);
    CompensatedSum<double> sum;
    double binom = 1.0;
    for (std::int64_t a = 0; a < terms; ++a) {
        const double ad = static_cast<double>(a);
        if (a > 0) binom *= (nn + ad - 1.0) / ad;
        sum.add(binom * std::pow(2.0 * ad + nn, -(nn + 1.0)));
    }
    // binom(n+a-1,a) <= ((x+n-2)/2)^{n-1} / (n-1)! with x = 2a+n, and
    // sum_{a>=A} x^{-2} <= 1 / (2 (2A+n-2)).
    const double A = static_cast<double>(terms);
    const double x0 = 2.0 * A + nn;
    const double growth = n >= 2 ? std::pow(1.0 + (nn - 2.0) / x0, nn - 1.0) : 1.0;
    const double tail = growth / (std::pow(2.0, nn - 1.0) * std::tgamma(nn)) / (2.0 * (2.0 * A + nn - 2.0));
    const double P = 2.0 * heisenberg_prefactor(n, mode);
    return {P * sum.value(), P * tail};
}

double c0_heisenberg_limit(std::size_t n, PrefactorMode mode) {
    constexpr std::int64_t A = 20000;
    const auto partial = c0_heisenberg(n, A, mode);
    // Midpoint comparison: sum_{a>=A} f(a) ~ int_{A-1/2}^inf f(a) da, taken in w = 1/a.
    auto g = [n](double w) { return series_term_inverted(n, w); };
    const auto tail = integrate(g, 0.0, 1.0 / (static_cast<double>(A) - 0.5), QuadOptions{0.0, 1e-14, 200});
    return partial.value + 2.0 * heisenberg_prefactor(n, mode) * tail.value;
}

double heisenberg_prefactor_ratio(std::size_t n) {
    return c0_heisenberg_limit(n, PrefactorMode::consistent) / c0_heisenberg_limit(n, PrefactorMode::stated);
}

FitValue p1_zero_from_heat_trace(const EigenvalueStream& spec, std::span<const double> probes) {
    if (probes.empty()) throw std::invalid_argument("p1_zero_from_heat_trace: no probe times");
    std::vector<double> t(probes.begin(), probes.end());
    std::sort(t.begin(), t.end());
    if (!(t.front() > 0.0)) throw std::invalid_argument("p1_zero_from_heat_trace: probe times must be positive");
    if (spec.cutoff() < 40.0 / t.front())
        throw CompletenessError("p1_zero_from_heat_trace: stream cutoff " + format_double(spec.cutoff()) +
                                " is below 40/t_min = " + format_double(40.0 / t.front()));
    const auto& model = spec.model();
    const double a = model.exponent();
    std::vector<double> f;
    double tail_err = 0.0;
    for (double ti : t) {
        const auto th = theta(spec, ti, ThetaOptions{0.0, std::numeric_limits<double>::infinity()});
        const double scale = std::pow(ti, a) / model.vol;
        f.push_back(scale * th.value);
        tail_err = std::max(tail_err, scale * th.tail_bound);
    }
    const double roundoff = 1e-15 * std::abs(f.front()) * std::sqrt(static_cast<double>(spec.size()));

    auto rel_eq = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::abs(y); };
    if (t.size() >= 3 && rel_eq(t[1], 2.0 * t[0]) && rel_eq(t[2], 4.0 * t[0])) {
        // f(t) = p + A exp(-B/t) at t, 2t, 4t with y = exp(-B/(4t)):
        // f(4t) - f(2t) = A y (1-y), f(2t) - f(t) = A y^2 (1-y)(1+y).
        const double d1 = f[2] - f[1];
        const double d2 = f[1] - f[0];
        if (d1 != 0.0) {
            const double r = d2 / d1;
            if (r > 0.0 && r < 2.0) {
                const double y = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * r));
                const double A = d1 / (y * (1.0 - y));
                const double y4 = y * y * y * y;
                const double p = f[0] - A * y4;
                return {p, std::abs(A * y4) * y + tail_err + roundoff};
            }
        }
    }
    double spread = 0.0;
    for (double v : f) spread = std::max(spread, std::abs(v - f.front()));
    return {f.front(), spread + tail_err + roundoff};
}

double c0_power(double c0, int ell) {
    if (ell < 1) throw std::invalid_argument("c0_power: ell must be >= 1");
    return c0 / ell;
}

double c0_scaled(double c0, double c, double Q, double nu) {
    if (!(c > 0.0)) throw std::invalid_argument("c0_scaled: c must be positive");
    return std::pow(c, -Q / nu) * c0;
}

double p1_power_relation(double p1, int ell, double Q, double nu) {
    if (ell < 1) throw std::invalid_argument("p1_power_relation: ell must be >= 1");
    return p1 * std::tgamma(Q / (ell * nu)) / (ell * std::tgamma(Q / nu));
}

KernelAtZero kernel_at_zero(Multiplier psi, const NilmanifoldModel& model) {
    if (model.kind != OperatorKind::torus_laplacian)
        throw std::invalid_argument("kernel_at_zero: closed-form kernels are available for the Laplacian on R^n only");
    const auto n = model.rank;
    const double nd = static_cast<double>(n);
    const double a = model.exponent();
    KernelAtZero out;
    std::function<double(double)> f;
    switch (psi) {
        case Multiplier::zero:
            return out;
        case Multiplier::exp:
            out.lhs = gaussian_heat(n, 1.0, std::vector<double>(n, 0.0));
            f = [](double l) { return std::exp(-l); };
            break;
        case Multiplier::lambda_exp: {
            // -d/dt (4 pi t)^{-n/2} at t = 1
            out.lhs = 0.5 * nd * gaussian_heat(n, 1.0, std::vector<double>(n, 0.0));
            f = [](double l) { return l * std::exp(-l); };
            break;
        }
        case Multiplier::exp_square: {
            // int_{R^n} exp(-|2 pi xi|^4) d xi
            const double sphere = 2.0 * std::pow(kPi, 0.5 * nd) / std::tgamma(0.5 * nd);
            out.lhs = std::pow(2.0 * kPi, -nd) * sphere * std::tgamma(0.25 * nd) / 4.0;
            f = [](double l) { return std::exp(-l * l); };
            break;
        }
    }
    const QuadOptions opts{0.0, 1e-14, 4000};
    // [0, 1] with lambda = u^2, [1, inf) directly.
    auto near = integrate([&](double u) { return 2.0 * f(u * u) * std::pow(u, 2.0 * a - 1.0); }, 0.0, 1.0, opts);
    auto far = integrate_to_infinity([&](double l) { return f(l) * std::pow(l, a - 1.0); }, 1.0, opts);
    out.rhs = model.c0 * (near.value + far.value);
    out.rhs_error = model.c0 * (near.error + far.error);
    return out;
}

double subordination_density(double alpha, double s, SubordinationMode mode) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("subordination: alpha must lie in (0, 1)");
    if (!(s > 0.0)) return 0.0;
    if (mode == SubordinationMode::closed_form) {
        if (alpha != 0.5) throw std::invalid_argument("subordination: the closed-form density needs alpha = 1/2");
        return std::pow(4.0 * kPi, -0.5) * std::pow(s, -1.5) * std::exp(-0.25 / s);
    }
    const double c = std::cos(kPi * alpha), sn = std::sin(kPi * alpha);
    auto f = [&](double u) {
        const double ua = std::pow(u, alpha);
        return std::exp(-s * u - ua * c) * std::sin(ua * sn);
    };
    return integrate_to_infinity(f, 0.0, QuadOptions{1e-14, 1e-10, 4000}).value / kPi;
}

namespace {

// int_0^inf w(s) phi_alpha(s) ds
template <class W>
FitValue subordinated_integral(double alpha, SubordinationMode mode, W&& w) {
    const QuadOptions opts{0.0, 1e-13, 4000};
    if (mode == SubordinationMode::closed_form) {
        if (alpha != 0.5) throw std::invalid_argument("subordination: the closed-form density needs alpha = 1/2");
        // (0, 1] directly; [1, inf) with s = 1/v^2, where phi ds = 2 (4 pi)^{-1/2} e^{-v^2/4} dv.
        auto near = integrate([&](double s) { return w(s) * subordination_density(0.5, s, mode); }, 0.0, 1.0, opts);
        auto far = integrate(
            [&](double v) {
                if (v == 0.0) return 0.0;
                return w(1.0 / (v * v)) * 2.0 * std::pow(4.0 * kPi, -0.5) * std::exp(-0.25 * v * v);
            },
            0.0, 1.0, opts);
        return {near.value + far.value, near.error + far.error};
    }
    auto r = integrate_to_infinity([&](double s) { return w(s) * subordination_density(alpha, s, mode); }, 0.0,
                                   QuadOptions{1e-10, 1e-8, 2000});
    return {r.value, r.error};
}

}  // namespace

SubordinationCheck subordination_check(double alpha, double lambda, SubordinationMode mode) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("subordination_check: lambda must be nonnegative");
    SubordinationCheck out;
    out.lhs = std::exp(-std::pow(lambda, alpha));
    const auto r = subordinated_integral(alpha, mode, [lambda](double s) { return std::exp(-lambda * s); });
    out.rhs = r.value;
    out.rhs_error = r.error_estimate;
    return out;
}

FitValue subordination_moment(double alpha, double beta, SubordinationMode mode) {
    return subordinated_integral(alpha, mode, [alpha, beta](double s) { return std::pow(s, -alpha * beta); });
}

ConstantsSummary constants_report() {
    ConstantsSummary out;
    for (int n = 1; n <= 3; ++n) {
        const double heat = gaussian_heat(n, 1.0, std::vector<double>(n, 0.0));
        out.reports.push_back(make_report("c0_euclidean_n" + std::to_string(n),
                                          {{"closed_form", c0_euclidean(n), 0.0},
                                           {"heat_kernel_at_zero_over_gamma", heat / std::tgamma(0.5 * n), 0.0}},
                                          1e-12));
    }

    // Heisenberg H_1: series, integral representation int_0^inf v / sinh v dv = pi^2 / 4,
    // and the heat trace of the nilmanifold spectrum.
    {
        const double series = c0_heisenberg_limit(1, PrefactorMode::consistent);
        auto integral = integrate_to_infinity(
            [](double v) { return v == 0.0 ? 1.0 : (v > 700.0 ? 0.0 : v / std::sinh(v)); }, 0.0,
            QuadOptions{0.0, 1e-13, 4000});
        const double via_integral = std::pow(2.0 * kPi, -2.0) * 2.0 * integral.value / 2.0;
        const auto spec = heisenberg_eigenvalues(1, 1000.0);
        const std::vector<double> probes{0.05, 0.1};
        const auto fit = p1_zero_from_heat_trace(spec, probes);
        out.heisenberg_c0_from_heat_trace = {fit.value / std::tgamma(2.0), fit.error_estimate / std::tgamma(2.0)};
        const auto truncated = c0_heisenberg(1, 1000, PrefactorMode::consistent);
        out.reports.push_back(make_report("c0_heisenberg_n1",
                                          {{"series_consistent_prefactor", series, 1e-15},
                                           {"series_1000_terms", truncated.value, truncated.truncation_bound},
                                           {"sinh_integral", via_integral, integral.error},
                                           {"heat_trace", out.heisenberg_c0_from_heat_trace.value,
                                            out.heisenberg_c0_from_heat_trace.error_estimate}},
                                          1e-2));
        out.heisenberg_prefactor_ratio = heisenberg_prefactor_ratio(1);
    }

    {
        const auto spec = torus_eigenvalues(1, 2500.0);
        const std::vector<double> probes{0.02, 0.04, 0.08};
        const auto fit = p1_zero_from_heat_trace(spec, probes);
        out.reports.push_back(make_report("p1_torus_n1",
                                          {{"closed_form", std::pow(4.0 * kPi, -0.5), 0.0},
                                           {"heat_trace", fit.value, fit.error_estimate}},
                                          1e-6));
    }

    // p_{Delta^2,1}(0) on R: power relation, Fourier integral, subordination.
    {
        const double p1 = std::pow(4.0 * kPi, -0.5);
        const double chain = p1_power_relation(p1, 2, 1.0, 2.0);
        auto fourier = integrate_to_infinity([](double x) { return std::exp(-x * x * x * x); }, 0.0,
                                             QuadOptions{0.0, 1e-14, 4000});
        const auto moment = subordination_moment(0.5, 0.5);
        const double via_subordination = p1 / moment.value;
        out.reports.push_back(make_report(
            "p1_laplacian_squared_R1",
            {{"power_relation", chain, 0.0},
             {"gamma_closed_form", std::tgamma(1.25) / kPi, 0.0},
             {"fourier_quadrature", fourier.value / kPi, fourier.error / kPi},
             {"subordination", via_subordination, p1 * moment.error_estimate / (moment.value * moment.value)}},
            1e-6));
    }

    {
        const auto model = torus_model(1);
        for (auto [psi, name] : {std::pair{Multiplier::exp, "exp"}, std::pair{Multiplier::lambda_exp, "lambda_exp"},
                                 std::pair{Multiplier::exp_square, "exp_square"}}) {
            const auto k = kernel_at_zero(psi, model);
            out.reports.push_back(make_report(std::string("kernel_at_zero_") + name,
                                              {{"closed_form_kernel", k.lhs, 0.0}, {"plancherel_integral", k.rhs, k.rhs_error}},
                                              1e-10));
        }
    }

    // c_0(c R^ell) for the circle: identity chain against the heat trace of the
    // transformed spectrum.
    {
        const auto base = torus_eigenvalues(1, 2500.0);
        const auto transformed = transform_spectrum(base, 2.0, 1);
        const std::vector<double> probes{0.01, 0.02, 0.04};
        const auto fit = p1_zero_from_heat_trace(transformed, probes);
        const auto& m = transformed.model();
        const double chain = c0_scaled(c0_power(c0_euclidean(1), 1), 2.0, 1.0, 2.0);
        out.reports.push_back(make_report("c0_scaled_circle_c2",
                                          {{"identity_chain", chain, 0.0},
                                           {"heat_trace", fit.value / std::tgamma(m.exponent()),
                                            fit.error_estimate / std::tgamma(m.exponent())}},
                                          1e-6));
    }
    return out;
}

}  // namespace nilspec
