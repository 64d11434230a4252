#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nilspec/errors.hpp"
#include "nilspec/numerics.hpp"
#include "nilspec/spectrum.hpp"

using namespace nilspec;

namespace {

// Independent count for Gamma \ H_1: torus part on Z^2 plus 4 (2a+1) pi |k| with multiplicity 2|k|.
std::uint64_t heisenberg1_brute_count(double lambda) {
    std::uint64_t count = 0;
    const int m_max = static_cast<int>(std::sqrt(lambda) / (2.0 * kPi)) + 1;
    for (int m1 = -m_max; m1 <= m_max; ++m1)
        for (int m2 = -m_max; m2 <= m_max; ++m2)
            if (4.0 * kPi * kPi * (m1 * m1 + m2 * m2) <= lambda) ++count;
    for (long k = 1; 4.0 * kPi * k <= lambda; ++k)
        for (long a = 0; 4.0 * (2 * a + 1) * kPi * k <= lambda; ++a) count += 2 * (2 * k);
    return count;
}

std::uint64_t torus1_count(double lambda) {
    return 2 * static_cast<std::uint64_t>(std::floor(std::sqrt(lambda) / (2.0 * kPi))) + 1;
}

}  // namespace

TEST_CASE("exact values") {
    auto a = ExactValue::pi_multiple(4, 2);
    auto b = ExactValue::pi_multiple(12, 1);
    CHECK((a + b).to_string() == "12*pi^1+4*pi^2");
    CHECK(a.pow(2) == ExactValue::pi_multiple(16, 4));
    CHECK(ExactValue().to_string() == "0");
    CHECK((a + b).evaluate() == doctest::Approx(4 * kPi * kPi + 12 * kPi).epsilon(1e-15));
    CHECK(ExactValue::pi_multiple(4, 1) + ExactValue::pi_multiple(8, 1) == ExactValue::pi_multiple(12, 1));
}

TEST_CASE("heisenberg(1) stream to 40") {
    auto s = heisenberg_eigenvalues(1, 40.0);
    REQUIRE(s.size() == 5);
    const double lambdas[5] = {0.0, 4 * kPi, 8 * kPi, 12 * kPi, 4 * kPi * kPi};
    const std::uint64_t mult[5] = {1, 4, 8, 16, 4};
    for (int i = 0; i < 5; ++i) {
        CHECK(s.entries()[i].lambda == doctest::Approx(lambdas[i]).epsilon(1e-15));
        CHECK(s.entries()[i].multiplicity == mult[i]);
    }
    CHECK(s.entries()[3].exact == ExactValue::pi_multiple(12, 1));
    CHECK(counting(s, 40.0) == 33);
    CHECK(counting(s, 0.0) == 1);
    CHECK(counting(s, 40.0) == s.total_multiplicity());
}

TEST_CASE("below the first nonzero eigenvalue") {
    auto s = heisenberg_eigenvalues(1, 10.0);
    REQUIRE(s.size() == 1);
    CHECK(s.entries()[0].lambda == 0.0);
    CHECK(s.entries()[0].multiplicity == 1);
    CHECK(heisenberg_eigenvalues(2, 25.0).size() == 1);
    CHECK(heisenberg_eigenvalues(2, 26.0).entries()[1].exact == ExactValue::pi_multiple(8, 1));
    CHECK_THROWS_AS(s.first_nonzero(), std::exception);
}

TEST_CASE("counting respects the cutoff") {
    auto s = torus_eigenvalues(1, 100.0);
    CHECK_THROWS_AS(counting(s, 101.0), CompletenessError);
    CHECK_THROWS_AS(semiclassical_count(s, 0.5, 2.0, 60.0), CompletenessError);
}

TEST_CASE("torus counts against the closed form") {
    const double top = 4 * kPi * kPi * 1e6;
    auto s = torus_eigenvalues(1, top);
    CHECK(counting(s, top) == 2001);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, top);
    for (int i = 0; i < 10; ++i) {
        const double l = u(rng);
        CHECK(counting(s, l) == torus1_count(l));
    }
    auto s2 = torus_eigenvalues(1, 400.0, 2.0);
    CHECK(s2.entries()[1].lambda == doctest::Approx(kPi * kPi).epsilon(1e-15));
}

TEST_CASE("heisenberg(1) counts against brute force") {
    auto s = heisenberg_eigenvalues(1, 500.0);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 500.0);
    for (int i = 0; i < 20; ++i) {
        const double l = u(rng);
        CAPTURE(l);
        CHECK(counting(s, l) == heisenberg1_brute_count(l));
    }
}

TEST_CASE("counting is monotone and right-continuous") {
    auto s = heisenberg_eigenvalues(1, 300.0);
    std::uint64_t last = 0;
    for (const auto& e : s.entries()) {
        const auto at = counting(s, e.lambda);
        CHECK(at == last + e.multiplicity);
        if (e.lambda > 0.0) CHECK(counting(s, std::nextafter(e.lambda, 0.0)) == last);
        last = at;
    }
    CHECK(counting(s, 300.0) == s.total_multiplicity());
}

TEST_CASE("semiclassical counts") {
    const double top = 4 * kPi * kPi * 1e4;
    auto s = torus_eigenvalues(1, top);
    for (double l : {100.0, 1000.0, top}) {
        CHECK(semiclassical_count(s, 0.0, 1.0, l) == counting(s, l));
        const auto lower = semiclassical_count(s, 0.0, 0.5, l);
        const auto upper = counting(s, l) - counting(s, 0.5 * l);
        CHECK(lower + upper == counting(s, l));
    }
    const double predicted = std::sqrt(top) * (1.0 - 0.5) / kPi;
    const double ratio = semiclassical_count(s, 0.25, 1.0, top) / predicted;
    // The exact count is 102 against 100, on the edge of the 2% band.
    CHECK(std::abs(ratio - 1.0) <= 0.02 + 1e-12);
}

TEST_CASE("transform_spectrum") {
    auto s = torus_eigenvalues(1, 200.0);
    auto same = transform_spectrum(s, 1.0, 1);
    REQUIRE(same.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(same.entries()[i].lambda == s.entries()[i].lambda);

    auto sq = transform_spectrum(s, 1.0, 2);
    CHECK(sq.entries()[1].exact == ExactValue::pi_multiple(16, 4));
    CHECK(sq.entries()[1].multiplicity == 2);
    CHECK(sq.cutoff() == doctest::Approx(40000.0));

    auto tripled = transform_spectrum(s, 3.0, 1);
    for (double l : {10.0, 50.0, 199.0}) CHECK(counting(tripled, 3.0 * l) == counting(s, l));
    CHECK_THROWS_AS(transform_spectrum(s, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(transform_spectrum(s, -1.0, 1), std::invalid_argument);
}

TEST_CASE("transform_spectrum composes") {
    auto s = heisenberg_eigenvalues(1, 100.0);
    const double c1 = 1.5, c2 = 0.5;
    const int l1 = 2, l2 = 3;
    auto twice = transform_spectrum(transform_spectrum(s, c1, l1), c2, l2);
    auto once = transform_spectrum(s, c2 * std::pow(c1, l2), l1 * l2);
    REQUIRE(twice.size() == once.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(twice.entries()[i].lambda == doctest::Approx(once.entries()[i].lambda).epsilon(1e-13));
        CHECK(twice.entries()[i].multiplicity == once.entries()[i].multiplicity);
    }
    CHECK(twice.cutoff() == doctest::Approx(once.cutoff()).epsilon(1e-13));
}

TEST_CASE("product_spectrum") {
    const double cut = 4000.0;
    auto t1 = torus_eigenvalues(1, cut);
    auto t2 = torus_eigenvalues(2, cut);
    auto p = product_spectrum(t1, t1, cut);
    REQUIRE(p.size() == t2.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(p.entries()[i].exact == t2.entries()[i].exact);
        CHECK(p.entries()[i].multiplicity == t2.entries()[i].multiplicity);
    }

    EigenvalueStream trivial({{0.0, 1, ExactValue()}}, cut, torus_model(1));
    auto h = heisenberg_eigenvalues(1, cut);
    auto with_trivial = product_spectrum(h, trivial, cut);
    REQUIRE(with_trivial.size() == h.size());
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(with_trivial.entries()[i].exact == h.entries()[i].exact);

    auto zz = product_spectrum(trivial, trivial, cut);
    REQUIRE(zz.size() == 1);
    CHECK(zz.entries()[0].multiplicity == 1);

    auto ab = product_spectrum(h, t1, 1000.0);
    auto ba = product_spectrum(t1, h, 1000.0);
    REQUIRE(ab.size() == ba.size());
    for (std::size_t i = 0; i < ab.size(); ++i) {
        CHECK(ab.entries()[i].exact == ba.entries()[i].exact);
        CHECK(ab.entries()[i].multiplicity == ba.entries()[i].multiplicity);
    }
    CHECK_THROWS_AS(product_spectrum(t1, t1, 2.0 * cut), CompletenessError);
}

TEST_CASE("weyl growth settles over dyadic cutoffs") {
    auto check = [](const EigenvalueStream& s, int k_last) {
        const double alpha = s.model().exponent();
        std::vector<double> ratios;
        for (int k = k_last - 3; k <= k_last; ++k) {
            const double l = std::ldexp(1.0, k);
            ratios.push_back(counting(s, l) * std::pow(l, -alpha));
        }
        const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
        CHECK((*hi - *lo) / *lo < 0.05);
    };
    check(torus_eigenvalues(1, std::ldexp(1.0, 25)), 25);
    check(torus_eigenvalues(3, std::ldexp(1.0, 16)), 16);
    check(heisenberg_eigenvalues(1, std::ldexp(1.0, 15)), 15);
}

TEST_CASE("model constants") {
    auto t = torus_model(1);
    CHECK(t.Q == 1);
    CHECK(t.nu == 2);
    CHECK(t.weyl_constant() == doctest::Approx(1.0 / kPi).epsilon(1e-14));
    auto h = heisenberg_model(1);
    CHECK(h.Q == 4);
    CHECK(h.vol == 0.5);
    CHECK(h.p1_zero == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    CHECK(h.weyl_constant() == doctest::Approx(1.0 / 64.0).epsilon(1e-12));
    auto scaled = scaled_power_model(t, 2.0, 1);
    CHECK(scaled.weyl_constant() == doctest::Approx(t.weyl_constant() / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(product_model(h, t).Q == 5);
    auto t_squared = scaled_power_model(t, 1.0, 2);
    CHECK(t_squared.nu == 4);
    CHECK_THROWS_AS(product_model(t_squared, t, 1), std::invalid_argument);
    CHECK(product_model(t_squared, t, 2).Q == 3);
}

TEST_CASE("spectrum csv") {
    auto s = torus_eigenvalues(1, 1.0);
    CHECK(spectrum_csv(s) == "lambda,multiplicity,cumulative_count,lambda_exact\n0,1,1,0\n");
    auto h = heisenberg_eigenvalues(1, 13.0);
    std::istringstream in(spectrum_csv(h));
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line.find(",4,5,4*pi^1") != std::string::npos);
}
