#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nilspec/format.hpp"
#include "nilspec/numerics.hpp"
#include "nilspec/rational.hpp"

using namespace nilspec;

TEST_CASE("gamma function") {
    CHECK(gamma(Complex(0.5)).real() == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
    CHECK(gamma(Complex(5.0)).real() == doctest::Approx(24.0).epsilon(1e-14));
    CHECK(gamma(Complex(-0.5)).real() == doctest::Approx(-2.0 * std::sqrt(kPi)).epsilon(1e-13));
    for (double x : {0.3, 1.7, 4.25, 11.5, 20.1}) CHECK(gamma(Complex(x)).real() == doctest::Approx(std::tgamma(x)).epsilon(1e-13));
    // |Gamma(1/2 + i y)|^2 = pi / cosh(pi y)
    for (double y : {0.5, 2.0, 7.0}) {
        const double lhs = std::norm(gamma(Complex(0.5, y)));
        CHECK(lhs == doctest::Approx(kPi / std::cosh(kPi * y)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gamma(Complex(-2.0)), std::domain_error);
}

TEST_CASE("reciprocal gamma is entire") {
    for (int k = 0; k <= 5; ++k) CHECK(reciprocal_gamma(Complex(-k)) == Complex(0.0));
    CHECK(reciprocal_gamma(Complex(1.0)) == Complex(1.0));
    CHECK(reciprocal_gamma(Complex(4.0)) == Complex(1.0 / 6.0));
    CHECK(std::abs(reciprocal_gamma(Complex(-1e-9))) < 2e-9);
    CHECK(std::abs(reciprocal_gamma(Complex(2.5, 1.0)) * gamma(Complex(2.5, 1.0)) - 1.0) < 1e-14);
}

TEST_CASE("riemann zeta") {
    const double pi2 = kPi * kPi;
    CHECK(riemann_zeta(Complex(2.0)).real() == doctest::Approx(pi2 / 6.0).epsilon(1e-14));
    CHECK(riemann_zeta(Complex(4.0)).real() == doctest::Approx(pi2 * pi2 / 90.0).epsilon(1e-14));
    CHECK(riemann_zeta(Complex(0.0)).real() == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(std::abs(riemann_zeta(Complex(-2.0))) < 1e-15);
    CHECK(riemann_zeta(Complex(-1.0)).real() == doctest::Approx(-1.0 / 12.0).epsilon(1e-13));
    // first nontrivial zero
    CHECK(std::abs(riemann_zeta(Complex(0.5, 14.134725141734693))) < 1e-10);
    // s = 1 + 2 pi i / ln 2 is where the eta route degenerates
    const Complex s(1.0, 2.0 * kPi / std::log(2.0));
    const Complex nearby = riemann_zeta(s + Complex(0.0, 1e-4));
    CHECK(std::abs(riemann_zeta(s) - nearby) < 1e-3);
    CHECK_THROWS_AS(riemann_zeta(Complex(1.0)), std::domain_error);
    // large |s| along the real line
    CHECK(riemann_zeta(Complex(30.0)).real() == doctest::Approx(1.0 + std::pow(2.0, -30.0)).epsilon(1e-14));
}

TEST_CASE("dirichlet beta") {
    CHECK(dirichlet_beta(1.0) == doctest::Approx(kPi / 4.0).epsilon(1e-13));
    CHECK(dirichlet_beta(2.0) == doctest::Approx(0.915965594177219015).epsilon(1e-14));
    CHECK(dirichlet_beta(3.0) == doctest::Approx(kPi * kPi * kPi / 32.0).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature") {
    auto r = integrate([](double x) { return std::exp(-x * x); }, -6.0, 6.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::sqrt(kPi)).epsilon(1e-13));
    auto inf = integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0);
    CHECK(inf.value == doctest::Approx(1.0).epsilon(1e-12));
    auto sing = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    CHECK(sing.value == doctest::Approx(2.0).epsilon(1e-10));
    auto cplx = integrate([](double x) { return std::exp(Complex(0.0, x)); }, 0.0, kPi);
    CHECK(std::abs(cplx.value - Complex(0.0, 2.0)) < 1e-13);
    // deterministic
    auto a = integrate([](double x) { return std::sin(50.0 * x) * std::exp(-x); }, 0.0, 3.0);
    auto b = integrate([](double x) { return std::sin(50.0 * x) * std::exp(-x); }, 0.0, 3.0);
    CHECK(a.value == b.value);
}

TEST_CASE("compensated sum") {
    CompensatedSum<double> s;
    s.add(1.0);
    for (int i = 0; i < 1000; ++i) s.add(1e-16);
    s.add(-1.0);
    CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-12));
}

TEST_CASE("incomplete gamma bound") {
    for (double a : {0.5, 1.0, 2.5, 4.0}) {
        for (double x : {1.0, 5.0, 30.0}) {
            auto exact = integrate_to_infinity([a](double t) { return std::pow(t, a - 1.0) * std::exp(-t); }, x);
            CHECK(upper_incomplete_gamma_bound(a, x) >= exact.value * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("rationals") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(-3, 6).to_string() == "-1/2");
    CHECK(Rational::parse("3/4") == Rational(3, 4));
    CHECK(Rational::parse("0.5") == Rational(1, 2));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("shortest round-trip formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-1.0) == "-1");
    CHECK(std::stod(format_double(kPi)) == kPi);
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}
