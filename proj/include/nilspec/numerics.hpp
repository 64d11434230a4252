#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <queue>
#include <type_traits>
#include <vector>

namespace nilspec {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Neumaier-compensated accumulator. Works for double and std::complex<double>;
/// the result depends only on the order of add() calls.
template <class T>
class CompensatedSum {
public:
    void add(T x) {
        if constexpr (std::is_same_v<T, Complex>) {
            re_.add(x.real());
            im_.add(x.imag());
        } else {
            T t = sum_ + x;
            if (std::abs(sum_) >= std::abs(x))
                comp_ += (sum_ - t) + x;
            else
                comp_ += (x - t) + sum_;
            sum_ = t;
        }
    }
    T value() const {
        if constexpr (std::is_same_v<T, Complex>)
            return {re_.value(), im_.value()};
        else
            return sum_ + comp_;
    }

private:
    T sum_{};
    T comp_{};
    struct Empty {};
    std::conditional_t<std::is_same_v<T, Complex>, CompensatedSum<double>, Empty> re_{}, im_{};
};

// Gamma-type special functions ----------------------------------------------

/// Complex Gamma function (Lanczos, g = 7, reflection for Re z < 1/2).
/// Throws std::domain_error at the poles 0, -1, -2, ...
Complex gamma(Complex z);

/// 1/Gamma(z); entire, exactly zero at non-positive integers.
Complex reciprocal_gamma(Complex z);

/// Upper bound for the upper incomplete Gamma function Gamma(a, x), x > 0.
double upper_incomplete_gamma_bound(double a, double x);

/// Riemann zeta function on the complex plane minus s = 1. Borwein's
/// alternating-series acceleration for Re s >= 1/2, functional equation below.
Complex riemann_zeta(Complex s);

/// Dirichlet beta function at real s > 0 (alternating series, Euler-transformed).
double dirichlet_beta(double s);

// Quadrature ------------------------------------------------------------------

struct QuadOptions {
    double abs_tol = 1e-15;
    double rel_tol = 1e-12;
    int max_intervals = 4000;
};

template <class V>
struct QuadResult {
    V value{};
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};
inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.14887433898163121088482600112972,
    0.0};
inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.03255816230796472747881897245939,
    0.05475589657435199603138130024458,  0.07503967481091995276704314091619,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

template <class V>
struct Panel {
    double a, b;
    V value;
    double error;
};

// 21-point Kronrod rule with embedded 10-point Gauss rule; error heuristic as in QUADPACK qk21.
template <class F, class V>
Panel<V> kronrod21(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const V fc = f(centre);
    V resk = kKronrodWeights[10] * fc;
    V resg{};
    double resabs = kKronrodWeights[10] * std::abs(fc);
    std::array<V, 10> f1{}, f2{};
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kKronrodNodes[j];
        f1[j] = f(centre - dx);
        f2[j] = f(centre + dx);
        resk += kKronrodWeights[j] * (f1[j] + f2[j]);
        resabs += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += kGaussWeights[j / 2] * (f1[j] + f2[j]);
    }
    const V mean = resk * 0.5;
    double resasc = kKronrodWeights[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j)
        resasc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    const double h = std::abs(half);
    resasc *= h;
    resabs *= h;
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {a, b, resk * half, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (21-point) quadrature on a finite [a, b].
/// The panel with the largest error is bisected until the summed error meets
/// max(abs_tol, rel_tol * |value|). Deterministic for a given integrand.
template <class F>
auto integrate(F&& f, double a, double b, const QuadOptions& opts = {})
    -> QuadResult<std::decay_t<std::invoke_result_t<F&, double>>> {
    using V = std::decay_t<std::invoke_result_t<F&, double>>;
    QuadResult<V> out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    auto cmp = [](const detail::Panel<V>& l, const detail::Panel<V>& r) { return l.error < r.error; };
    std::priority_queue<detail::Panel<V>, std::vector<detail::Panel<V>>, decltype(cmp)> heap(cmp);
    heap.push(detail::kronrod21<F, V>(f, a, b));
    V total = heap.top().value;
    double err = heap.top().error;
    int count = 1;
    while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) && count < opts.max_intervals) {
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b)) {
            heap.push(worst);
            break;
        }
        auto left = detail::kronrod21<F, V>(f, worst.a, mid);
        auto right = detail::kronrod21<F, V>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // Re-sum the final panels in left-to-right order so roundoff does not
    // depend on the refinement history.
    std::vector<detail::Panel<V>> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
    CompensatedSum<V> sum;
    CompensatedSum<double> esum;
    for (const auto& p : panels) {
        sum.add(p.value);
        esum.add(p.error);
    }
    out.value = sum.value();
    out.error = esum.value();
    out.intervals = count;
    out.converged = out.error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(out.value));
    return out;
}

/// Integral over [a, +inf) via the substitution t = a + (1 - u) / u.
template <class F>
auto integrate_to_infinity(F&& f, double a, const QuadOptions& opts = {}) {
    auto mapped = [&f, a](double u) {
        const double t = a + (1.0 - u) / u;
        using V = std::decay_t<std::invoke_result_t<F&, double>>;
        V v = f(t);
        if (v == V{}) return v;
        return v / (u * u);
    };
    return integrate(mapped, 0.0, 1.0, opts);
}

}  // namespace nilspec
