#include "nilspec/numerics.hpp"

#include <stdexcept>

namespace nilspec {

namespace {

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kLanczosG = 7.0;

bool is_nonpositive_integer(Complex z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && std::floor(z.real()) == z.real();
}

// Gamma(z) for Re z >= 1/2.
Complex gamma_right(Complex z) {
    z -= 1.0;
    Complex x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
    const Complex t = z + kLanczosG + 0.5;
    return std::sqrt(2.0 * kPi) * std::exp((z + 0.5) * std::log(t) - t) * x;
}

// Accelerated alternating sum  sum_{k>=0} (-1)^k a_k  (Cohen, Rodriguez Villegas, Zagier).
template <class Term>
auto alternating_sum(Term term, int n) {
    using V = std::decay_t<decltype(term(0))>;
    // d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    std::vector<double> d(n + 1);
    double t = 1.0 / n;
    double acc = t;
    d[0] = n * acc;
    for (int i = 0; i < n; ++i) {
        t *= 4.0 * (n + i) * (n - i) / ((2.0 * i + 1.0) * (2.0 * i + 2.0));
        acc += t;
        d[i + 1] = n * acc;
    }
    CompensatedSum<V> sum;
    for (int k = 0; k < n; ++k) {
        const double w = (d[n] - d[k]) / d[n];
        sum.add((k % 2 == 0 ? w : -w) * term(k));
    }
    return sum.value();
}

// Euler-Maclaurin evaluation of zeta; used where 1 - 2^{1-s} vanishes.
Complex zeta_euler_maclaurin(Complex s) {
    constexpr int N = 30;
    // B_{2k} / (2k)!
    constexpr std::array<double, 12> b = {
        1.0 / 12.0,          -1.0 / 720.0,          1.0 / 30240.0,         -1.0 / 1209600.0,
        1.0 / 47900160.0,    -691.0 / 1307674368000.0,
        1.0 / 74724249600.0, -3617.0 / 10670622842880000.0,
        43867.0 / 5109094217170944000.0, -174611.0 / 802857662698291200000.0,
        77683.0 / 14101100039391805440000.0, -236364091.0 / 1693824136731743669452800000.0};
    CompensatedSum<Complex> sum;
    for (int j = N - 1; j >= 1; --j) sum.add(std::pow(static_cast<double>(j), -s));
    const Complex nn = static_cast<double>(N);
    sum.add(std::pow(nn, 1.0 - s) / (s - 1.0));
    sum.add(0.5 * std::pow(nn, -s));
    Complex poch = s;  // s (s+1) ... (s+2k-2)
    for (int k = 1; k <= 12; ++k) {
        sum.add(b[k - 1] * poch * std::pow(nn, -s - static_cast<double>(2 * k - 1)));
        poch *= (s + static_cast<double>(2 * k - 1)) * (s + static_cast<double>(2 * k));
    }
    return sum.value();
}

}  // namespace

Complex gamma(Complex z) {
    if (is_nonpositive_integer(z)) throw std::domain_error("gamma: pole at non-positive integer");
    if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * gamma_right(1.0 - z));
    return gamma_right(z);
}

Complex reciprocal_gamma(Complex z) {
    if (is_nonpositive_integer(z)) return 0.0;
    if (z.imag() == 0.0 && z.real() >= 1.0 && z.real() <= 23.0 && z.real() == std::floor(z.real())) {
        double factorial = 1.0;  // exact in double up to 22!
        for (int k = 2; k < static_cast<int>(z.real()); ++k) factorial *= k;
        return 1.0 / factorial;
    }
    if (z.real() < 0.5) return std::sin(kPi * z) * gamma_right(1.0 - z) / kPi;
    return 1.0 / gamma_right(z);
}

double upper_incomplete_gamma_bound(double a, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("upper_incomplete_gamma_bound: x must be positive");
    const double log_lead = (a - 1.0) * std::log(x) - x;
    if (a <= 1.0) return std::exp(log_lead);
    if (x > a - 1.0 + 1e-12) {
        const double denom = 1.0 - (a - 1.0) / x;
        const double bound = std::exp(log_lead) / denom;
        return std::min(bound, std::tgamma(a));
    }
    return std::tgamma(a);
}

Complex riemann_zeta(Complex s) {
    if (s == Complex(1.0, 0.0)) throw std::domain_error("riemann_zeta: pole at s = 1");
    if (s.real() >= 0.0) {
        const Complex denom = 1.0 - std::pow(Complex(2.0), 1.0 - s);
        if (std::abs(denom) < 1e-6) return zeta_euler_maclaurin(s);
        const Complex eta =
            alternating_sum([&](int k) { return std::pow(static_cast<double>(k + 1), -s); }, 100);
        return eta / denom;
    }
    // zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1-s) zeta(1-s)
    const Complex one_minus = 1.0 - s;
    return std::pow(Complex(2.0), s) * std::pow(Complex(kPi), s - 1.0) * std::sin(0.5 * kPi * s) *
           gamma(one_minus) * riemann_zeta(one_minus);
}

double dirichlet_beta(double s) {
    if (!(s > 0.0)) throw std::domain_error("dirichlet_beta: requires s > 0");
    return alternating_sum([&](int k) { return std::pow(2.0 * k + 1.0, -s); }, 60);
}

}  // namespace nilspec
