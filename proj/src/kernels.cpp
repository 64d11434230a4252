#include "nilspec/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nilspec/format.hpp"
#include "nilspec/numerics.hpp"

namespace nilspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sup_gaussian_weight(double t, int N) {
    // sup_r (1+r)^N exp(-r^2 / 4t), attained at r(1+r) = 2tN
    const double r = 0.5 * (-1.0 + std::sqrt(1.0 + 8.0 * t * N));
    return std::exp(N * std::log1p(r) - r * r / (4.0 * t));
}

std::vector<double> to_doubles(const ExactElement& x) {
    std::vector<double> out;
    out.reserve(x.size());
    for (const auto& v : x) out.push_back(v.to_double());
    return out;
}

// Factor f such that |x^{-1} gamma x| >= |gamma| / 2 whenever
// |gamma| >= f |x|; 0 when conjugation is trivial, -1 when unsupported.
double conjugation_factor(const GradedGroup& g) {
    switch (g.family()) {
        case GroupFamily::abelian:
            return 0.0;
        case GroupFamily::heisenberg:
            return 4.0 * static_cast<double>(g.rank());
        case GroupFamily::product: {
            const double f1 = conjugation_factor(g.first_factor());
            const double f2 = conjugation_factor(g.second_factor());
            if (f1 < 0.0 || f2 < 0.0) return -1.0;
            if (g.second_reweight() != 1 && f2 > 0.0) return -1.0;
            return std::max(f1, f2);
        }
    }
    return -1.0;
}

void require_certificate(const KernelFunction& k) {
    const double needed = static_cast<double>(k.group.step()) * static_cast<double>(k.group.dim());
    for (const auto& c : k.decay)
        if (c.N > needed) return;
    throw std::invalid_argument("kernel '" + k.label + "' has no decay certificate of order N > " +
                                format_double(needed));
}

double diag_tail(const KernelFunction& k, const LatticeSubgroup& lat, double x_norm, double r_cut) {
    const double factor = conjugation_factor(lat.group());
    if (factor < 0.0) return kInf;
    if (factor == 0.0) return lattice_shell_bound(lat, r_cut, [&k](double r) { return k.bound(r); });
    if (r_cut < factor * x_norm) return kInf;
    return lattice_shell_bound(lat, r_cut, [&k](double r) { return k.bound(0.5 * r); });
}

template <class Element, class Conj>
PeriodisedValue periodise(const KernelFunction& k, const LatticeSubgroup& lat, double x_norm, double r_cut,
                          Conj&& conj) {
    require_certificate(k);
    if (lat.group().dim() != k.group.dim())
        throw std::invalid_argument("periodised_diag: lattice and kernel live on different groups");
    if (!(r_cut >= 0.0)) throw std::invalid_argument("periodised_diag: R_cut must be nonnegative");
    PeriodisedValue out;
    CompensatedSum<double> off;
    bool identity_seen = false;
    for_each_lattice_point(lat, r_cut, [&](std::span<const std::int64_t> e) {
        const bool is_identity = std::all_of(e.begin(), e.end(), [](std::int64_t v) { return v == 0; });
        const double value = conj(e);
        if (is_identity) {
            out.identity_term = value;
            identity_seen = true;
        } else {
            off.add(value);
        }
    });
    if (!identity_seen) out.identity_term = k.value_at_zero;
    out.off_identity = off.value();
    out.value = out.identity_term + out.off_identity;
    out.tail_bound = diag_tail(k, lat, x_norm, r_cut);
    return out;
}

}  // namespace

double KernelFunction::bound(double r) const {
    double best = kInf;
    for (const auto& c : decay) best = std::min(best, c.C * std::pow(1.0 + r / c.scale, -c.N));
    return best;
}

double gaussian_heat(std::size_t n, double t, std::span<const double> x) {
    if (!(t > 0.0)) throw std::invalid_argument("gaussian_heat: t must be positive");
    if (x.size() != n) throw std::invalid_argument("gaussian_heat: point has the wrong dimension");
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return std::pow(4.0 * kPi * t, -0.5 * static_cast<double>(n)) * std::exp(-r2 / (4.0 * t));
}

double gaussian_heat(std::size_t n, double t, const GroupElement& x) { return gaussian_heat(n, t, x.coords); }

KernelFunction gaussian_kernel(std::size_t n, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("gaussian_kernel: t must be positive");
    const double peak = std::pow(4.0 * kPi * t, -0.5 * static_cast<double>(n));
    std::vector<DecayCertificate> certs;
    for (int N : {2, 4, 8, 12, 16, 24, 32, 48}) certs.push_back({peak * sup_gaussian_weight(t, N), N, 1.0});
    return KernelFunction{
        .group = GradedGroup::abelian(n),
        .evaluate = [n, t](std::span<const double> x) { return gaussian_heat(n, t, x); },
        .value_at_zero = peak,
        .decay = std::move(certs),
        .self_convolution = [n, t] { return gaussian_kernel(n, 2.0 * t); },
        .label = "gaussian(n=" + std::to_string(n) + ",t=" + format_double(t) + ")",
    };
}

KernelFunction shifted_gaussian_kernel(double t, std::vector<double> shift) {
    const std::size_t n = shift.size();
    auto base = gaussian_kernel(n, t);
    double a = 0.0;
    for (double v : shift) a = std::max(a, std::abs(v));
    // Peetre: (1 + |x - a|)^{-N} <= (1 + |a|)^N (1 + |x|)^{-N}
    for (auto& c : base.decay) c.C *= std::pow(1.0 + a, c.N);
    std::vector<double> zero(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) zero[j] = -shift[j];
    const double at_zero = gaussian_heat(n, t, zero);
    return KernelFunction{
        .group = base.group,
        .evaluate =
            [n, t, shift](std::span<const double> x) {
                std::vector<double> y(x.begin(), x.end());
                for (std::size_t j = 0; j < n; ++j) y[j] -= shift[j];
                return gaussian_heat(n, t, y);
            },
        .value_at_zero = at_zero,
        .decay = std::move(base.decay),
        .self_convolution = [n, t] { return gaussian_kernel(n, 2.0 * t); },
        .label = "shifted_gaussian(t=" + format_double(t) + ")",
    };
}

KernelFunction heisenberg_test_kernel(std::size_t n) {
    auto g = GradedGroup::heisenberg(n);
    // |x|_E >= min(r, r^2) for r = |x|, so |kappa| <= 1 for r < 1 and exp(-r^2) for r >= 1.
    std::vector<DecayCertificate> certs;
    for (int N : {8, 12, 16, 24, 32, 48}) {
        const double r = std::max(1.0, 0.5 * (-1.0 + std::sqrt(1.0 + 2.0 * N)));
        const double tail = std::exp(N * std::log1p(r) - r * r);
        certs.push_back({std::max(std::pow(2.0, N), tail), N, 1.0});
    }
    return KernelFunction{
        .group = g,
        .evaluate =
            [](std::span<const double> x) {
                double r2 = 0.0;
                for (double v : x) r2 += v * v;
                return std::exp(-r2);
            },
        .value_at_zero = 1.0,
        .decay = std::move(certs),
        .self_convolution = {},
        .label = "heisenberg_test(n=" + std::to_string(n) + ")",
    };
}

KernelFunction zero_kernel(const GradedGroup& g) {
    return KernelFunction{
        .group = g,
        .evaluate = [](std::span<const double>) { return 0.0; },
        .value_at_zero = 0.0,
        .decay = {{0.0, 64, 1.0}},
        .self_convolution = [g] { return zero_kernel(g); },
        .label = "zero",
    };
}

KernelFunction combine(double a, const KernelFunction& k1, double b, const KernelFunction& k2) {
    if (k1.group.dim() != k2.group.dim()) throw std::invalid_argument("combine: kernels live on different groups");
    std::vector<DecayCertificate> certs;
    for (const auto& c1 : k1.decay)
        for (const auto& c2 : k2.decay)
            if (c1.N == c2.N)
                certs.push_back({std::abs(a) * c1.C + std::abs(b) * c2.C, c1.N, std::max(c1.scale, c2.scale)});
    auto e1 = k1.evaluate;
    auto e2 = k2.evaluate;
    return KernelFunction{
        .group = k1.group,
        .evaluate = [a, b, e1, e2](std::span<const double> x) { return a * e1(x) + b * e2(x); },
        .value_at_zero = a * k1.value_at_zero + b * k2.value_at_zero,
        .decay = std::move(certs),
        .self_convolution = {},
        .label = format_double(a) + "*" + k1.label + "+" + format_double(b) + "*" + k2.label,
    };
}

KernelFunction reflected(const KernelFunction& k) {
    auto e = k.evaluate;
    std::function<KernelFunction()> conv;
    // On abelian groups kappa~ * kappa~~ is the reflection of kappa * kappa~.
    if (k.group.family() == GroupFamily::abelian && k.self_convolution) {
        auto inner = k.self_convolution;
        conv = [inner] { return reflected(inner()); };
    }
    return KernelFunction{
        .group = k.group,
        .evaluate =
            [e](std::span<const double> x) {
                std::vector<double> y(x.begin(), x.end());
                for (auto& v : y) v = -v;
                return e(y);
            },
        .value_at_zero = k.value_at_zero,
        .decay = k.decay,
        .self_convolution = conv,
        .label = "reflected(" + k.label + ")",
    };
}

// Scaling ------------------------------------------------------------------------

ScaledKernel scale_kernel(const KernelFunction& k, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("scale_kernel: epsilon must be positive");
    return ScaledKernel{k, epsilon};
}

double ScaledKernel::operator()(const GroupElement& x) const {
    const double Q = base.group.homogeneous_dimension();
    return std::pow(epsilon, -Q) * base(dilate(base.group, 1.0 / epsilon, x));
}

double ScaledKernel::value_at_zero() const {
    return std::pow(epsilon, -static_cast<double>(base.group.homogeneous_dimension())) * base.value_at_zero;
}

KernelFunction ScaledKernel::as_kernel() const {
    const double Q = base.group.homogeneous_dimension();
    const double factor = std::pow(epsilon, -Q);
    std::vector<DecayCertificate> certs = base.decay;
    for (auto& c : certs) {
        c.C *= factor;
        c.scale *= epsilon;
    }
    auto e = base.evaluate;
    auto g = base.group;
    const double eps = epsilon;
    std::function<KernelFunction()> conv;
    if (base.self_convolution) {
        auto inner = base.self_convolution;
        conv = [inner, eps] { return scale_kernel(inner(), eps).as_kernel(); };
    }
    return KernelFunction{
        .group = g,
        .evaluate =
            [e, g, eps, factor](std::span<const double> x) {
                GroupElement y{std::vector<double>(x.begin(), x.end())};
                return factor * e(dilate(g, 1.0 / eps, y).coords);
            },
        .value_at_zero = value_at_zero(),
        .decay = std::move(certs),
        .self_convolution = conv,
        .label = "scaled(" + base.label + ",eps=" + format_double(epsilon) + ")",
    };
}

// Periodisation ------------------------------------------------------------------

PeriodisedValue periodised_diag(const KernelFunction& k, const LatticeSubgroup& lat, const ExactElement& x,
                                double r_cut) {
    const auto& g = lat.group();
    g.check_conforms(x.size());
    return periodise<ExactElement>(k, lat, quasi_norm(g, x), r_cut, [&](std::span<const std::int64_t> e) {
        const auto gamma = lat.element(e);
        const auto c = conjugate<Rational>(g, std::span<const Rational>(x), std::span<const Rational>(gamma));
        return k.evaluate(to_doubles(c));
    });
}

PeriodisedValue periodised_diag(const KernelFunction& k, const LatticeSubgroup& lat, const GroupElement& x,
                                double r_cut) {
    const auto& g = lat.group();
    g.check_conforms(x.size());
    return periodise<GroupElement>(k, lat, quasi_norm(g, x), r_cut, [&](std::span<const std::int64_t> e) {
        std::vector<double> gamma;
        for (std::size_t j = 0; j < e.size(); ++j) gamma.push_back(static_cast<double>(e[j]) * lat.scales()[j].to_double());
        const auto c = conjugate<double>(g, std::span<const double>(x.coords), std::span<const double>(gamma));
        return k.evaluate(c);
    });
}

PeriodisedValue periodised_diag(const ScaledKernel& k, const LatticeSubgroup& lat, const ExactElement& x,
                                double r_cut) {
    return periodised_diag(k.as_kernel(), lat, x, r_cut);
}

namespace {

struct GridSum {
    double identity = 0.0;
    double off = 0.0;
    double tail = 0.0;
};

GridSum grid_sum(const KernelFunction& k, const LatticeSubgroup& lat, const FundamentalDomainGrid& grid, double r_cut) {
    CompensatedSum<double> id, off, tail;
    for (std::size_t i = 0; i < grid.exact_nodes.size(); ++i) {
        const auto d = periodised_diag(k, lat, grid.exact_nodes[i], r_cut);
        id.add(grid.weights[i] * d.identity_term);
        off.add(grid.weights[i] * d.off_identity);
        tail.add(grid.weights[i] * d.tail_bound);
    }
    return {id.value(), off.value(), tail.value()};
}

}  // namespace

TraceValue periodised_trace(const KernelFunction& k, const LatticeSubgroup& lat, const FundamentalDomainGrid& grid,
                            double r_cut) {
    if (grid.exact_nodes.empty()) throw std::invalid_argument("periodised_trace: empty grid");
    if (grid.nodes.front().size() != lat.group().dim())
        throw std::invalid_argument("periodised_trace: grid does not conform to the lattice");
    const auto fine = grid_sum(k, lat, grid, r_cut);
    TraceValue out;
    out.identity_term = fine.identity;
    out.off_identity = fine.off;
    out.value = fine.identity + fine.off;
    out.tail_bound = fine.tail;
    if (grid.resolution >= 2) {
        const auto coarse = grid_sum(k, lat, fundamental_domain_grid(lat, grid.resolution / 2), r_cut);
        out.quadrature_delta = std::abs((fine.identity + fine.off) - (coarse.identity + coarse.off));
    }
    out.error_estimate = out.quadrature_delta + out.tail_bound;
    return out;
}

TraceValue periodised_trace(const ScaledKernel& k, const LatticeSubgroup& lat, const FundamentalDomainGrid& grid,
                            double r_cut) {
    return periodised_trace(k.as_kernel(), lat, grid, r_cut);
}

TraceValue hs_norm_squared(const KernelFunction& k, const LatticeSubgroup& lat, const FundamentalDomainGrid& grid,
                           double r_cut) {
    if (!k.self_convolution)
        throw std::invalid_argument("hs_norm_squared: no closed form for the self-convolution of '" + k.label + "'");
    return periodised_trace(k.self_convolution(), lat, grid, r_cut);
}

TraceValue hs_norm_squared(const ScaledKernel& k, const LatticeSubgroup& lat, const FundamentalDomainGrid& grid,
                           double r_cut) {
    return hs_norm_squared(k.as_kernel(), lat, grid, r_cut);
}

std::string periodisation_csv(const KernelFunction& k, const LatticeSubgroup& lat, const FundamentalDomainGrid& grid,
                              std::span<const double> epsilons, double r_cut) {
    const double Q = k.group.homogeneous_dimension();
    std::string out = "epsilon,trace,scaled_trace,scaled_off_identity,tail_bound,error_estimate\n";
    for (double eps : epsilons) {
        const auto tr = periodised_trace(scale_kernel(k, eps), lat, grid, r_cut);
        const double f = std::pow(eps, Q);
        out += format_double(eps) + "," + format_double(tr.value) + "," + format_double(f * tr.value) + "," +
               format_double(f * tr.off_identity) + "," + format_double(tr.tail_bound) + "," +
               format_double(tr.error_estimate) + "\n";
    }
    return out;
}

}  // namespace nilspec
