#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "nilspec/kernels.hpp"
#include "nilspec/numerics.hpp"

using namespace nilspec;

namespace {

// sum_m exp(-4 pi^2 m^2 t): the eigenvalue side of the circle heat trace.
double circle_theta(double t) {
    double sum = 1.0;
    for (int m = 1; m < 100; ++m) sum += 2.0 * std::exp(-4.0 * kPi * kPi * m * m * t);
    return sum;
}

// Random point of the box fundamental domain with small-denominator coordinates.
ExactElement random_node(std::mt19937_64& rng, const LatticeSubgroup& lat) {
    std::uniform_int_distribution<std::int64_t> u(-48, 47);
    ExactElement x;
    for (const auto& k : lat.scales()) x.push_back(k * Rational(u(rng), 96));
    return x;
}

double slope(double d1, double d2, double e1, double e2) { return std::log(d1 / d2) / std::log(e1 / e2); }

const LatticeSubgroup& z1() {
    static const auto lat = LatticeSubgroup::standard(GradedGroup::abelian(1));
    return lat;
}

const LatticeSubgroup& h1() {
    static const auto lat = LatticeSubgroup::standard(GradedGroup::heisenberg(1));
    return lat;
}

}  // namespace

TEST_CASE("gaussian heat kernel") {
    CHECK(gaussian_heat(1, 1.0, GroupElement{{0.0}}) == doctest::Approx(1.0 / std::sqrt(4.0 * kPi)).epsilon(1e-15));
    CHECK(gaussian_heat(2, 0.5, GroupElement{{1.0, 1.0}}) == doctest::Approx(std::exp(-1.0) / (2.0 * kPi)).epsilon(1e-15));
    CHECK_THROWS_AS(gaussian_heat(1, 0.0, GroupElement{{0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_kernel(1, -1.0), std::invalid_argument);
}

TEST_CASE("scaled kernels") {
    auto p = gaussian_kernel(1, 1.0);
    auto same = scale_kernel(p, 1.0);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 50; ++i) {
        GroupElement x{{u(rng)}};
        CHECK(same(x) == p(x));
    }
    CHECK(scale_kernel(p, 0.5).value_at_zero() == doctest::Approx(2.0 / std::sqrt(4.0 * kPi)).epsilon(1e-15));
    auto h = heisenberg_test_kernel(1);
    CHECK(scale_kernel(h, 0.5).value_at_zero() == doctest::Approx(16.0).epsilon(1e-15));
    CHECK_THROWS_AS(scale_kernel(p, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(scale_kernel(p, -0.5), std::invalid_argument);

    // eps^{-Q} kappa(D_{1/eps} x) as composed by hand.
    auto hs = scale_kernel(h, 0.3);
    for (int i = 0; i < 50; ++i) {
        GroupElement x{{u(rng) / 5.0, u(rng) / 5.0, u(rng) / 10.0}};
        const double expect = std::pow(0.3, -4.0) * h(dilate(h1().group(), 1.0 / 0.3, x));
        CHECK(hs(x) == expect);
    }
}

TEST_CASE("decay certificates hold on samples") {
    std::vector<KernelFunction> kernels = {
        gaussian_kernel(1, 1.0),
        gaussian_kernel(2, 0.05),
        shifted_gaussian_kernel(0.5, {0.7}),
        heisenberg_test_kernel(1),
        heisenberg_test_kernel(2),
        scale_kernel(gaussian_kernel(1, 1.0), 0.2).as_kernel(),
        scale_kernel(heisenberg_test_kernel(1), 0.4).as_kernel(),
        combine(2.0, gaussian_kernel(1, 1.0), -0.5, gaussian_kernel(1, 0.25)),
    };
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> dir(-1.0, 1.0), logr(-3.0, 4.0);
    for (const auto& k : kernels) {
        CAPTURE(k.label);
        REQUIRE_FALSE(k.decay.empty());
        for (int i = 0; i < 1000; ++i) {
            GroupElement x;
            const double r = std::exp(logr(rng));
            for (std::size_t j = 0; j < k.group.dim(); ++j)
                x.coords.push_back(dir(rng) * std::pow(r, k.group.weights()[j]));
            const double norm = quasi_norm(k.group, x);
            for (const auto& c : k.decay) {
                const double bound = c.C * std::pow(1.0 + norm / c.scale, -c.N);
                REQUIRE(std::abs(k(x)) <= bound * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("periodised diagonal on the circle against the eigenvalue side") {
    for (double t : {0.25, 1.0, 2.0}) {
        auto v = periodised_diag(gaussian_kernel(1, t), z1(), ExactElement{0}, 40.0);
        CHECK(std::abs(v.value - circle_theta(t)) < 1e-12);
        CHECK(v.tail_bound < 1e-12);
    }
    auto v = periodised_diag(gaussian_kernel(1, 1.0), z1(), ExactElement{0}, 0.5);
    CHECK(v.value == gaussian_kernel(1, 1.0).value_at_zero);
    CHECK(v.off_identity == 0.0);
}

TEST_CASE("missing certificate is rejected") {
    auto k = gaussian_kernel(1, 1.0);
    k.decay = {{1.0, 1, 1.0}};
    CHECK_THROWS_AS(periodised_diag(k, z1(), ExactElement{0}, 5.0), std::invalid_argument);
}

TEST_CASE("periodisation is lattice invariant") {
    auto k = heisenberg_test_kernel(1);
    const auto& g = h1().group();
    std::mt19937_64 rng(41);
    auto ball = lattice_ball_exact(h1(), 2.0);
    std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
    for (int i = 0; i < 5; ++i) {
        auto x = random_node(rng, h1());
        const auto& g0 = ball[pick(rng)];
        auto moved = multiply<Rational>(g, g0, x);
        auto a = periodised_diag(k, h1(), x, 10.0);
        auto b = periodised_diag(k, h1(), moved, 10.0);
        CHECK(std::abs(a.value - b.value) <= a.tail_bound + b.tail_bound + 1e-14);
        CHECK(std::isfinite(a.tail_bound));
    }
}

TEST_CASE("tail bounds survive doubling R_cut") {
    std::mt19937_64 rng(43);
    struct Case {
        KernelFunction k;
        const LatticeSubgroup* lat;
        double r;
    };
    std::vector<Case> cases = {
        {gaussian_kernel(1, 1.0), &z1(), 2.0},
        {gaussian_kernel(1, 4.0), &z1(), 3.0},
        {shifted_gaussian_kernel(0.5, {0.3}), &z1(), 2.0},
        {scale_kernel(gaussian_kernel(1, 1.0), 0.5).as_kernel(), &z1(), 1.0},
        {heisenberg_test_kernel(1), &h1(), 2.0},
        {heisenberg_test_kernel(1), &h1(), 3.0},
        {scale_kernel(heisenberg_test_kernel(1), 2.0).as_kernel(), &h1(), 3.0},
    };
    for (const auto& c : cases) {
        CAPTURE(c.k.label);
        for (int i = 0; i < 3; ++i) {
            auto x = random_node(rng, *c.lat);
            auto coarse = periodised_diag(c.k, *c.lat, x, c.r);
            auto fine = periodised_diag(c.k, *c.lat, x, 2.0 * c.r);
            REQUIRE(std::isfinite(coarse.tail_bound));
            CHECK(std::abs(fine.value - coarse.value) <= coarse.tail_bound);
            CHECK(fine.tail_bound <= coarse.tail_bound);
        }
    }
}

TEST_CASE("tail bound is infinite when the conjugation estimate does not apply") {
    auto v = periodised_diag(heisenberg_test_kernel(1), h1(), ExactElement{Rational(1, 2), 0, 0}, 1.0);
    CHECK(std::isinf(v.tail_bound));
}

TEST_CASE("diagonal asymptotic under scaling") {
    std::mt19937_64 rng(47);
    const double eps[3] = {0.4, 0.2, 0.1};
    struct Case {
        KernelFunction k;
        const LatticeSubgroup* lat;
    };
    std::vector<Case> cases = {{gaussian_kernel(1, 1.0), &z1()}, {heisenberg_test_kernel(1), &h1()}};
    for (const auto& c : cases) {
        const int Q = c.k.group.homogeneous_dimension();
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 5; ++i) {
            auto x = random_node(rng, *c.lat);
            // eps^Q K(x, x) - kappa(0) is eps^Q times the off-identity part; the slope
            // is taken between certified lower and upper bounds of consecutive terms.
            double lower[3], upper[3];
            for (int j = 0; j < 3; ++j) {
                auto v = periodised_diag(scale_kernel(c.k, eps[j]), *c.lat, x, 6.0);
                const double d = std::abs(std::pow(eps[j], Q) * v.off_identity);
                const double tail = std::pow(eps[j], Q) * v.tail_bound;
                lower[j] = d - tail;
                upper[j] = d + tail;
            }
            REQUIRE(lower[0] > 0.0);
            REQUIRE(lower[1] > 0.0);
            worst = std::min({worst, slope(lower[0], upper[1], eps[0], eps[1]),
                              slope(lower[1], upper[2], eps[1], eps[2])});
        }
        MESSAGE(c.k.label << ": worst log-log slope " << worst);
        CHECK(worst >= 4.0);
    }
}

TEST_CASE("trace asymptotic under scaling") {
    const double eps[3] = {0.4, 0.2, 0.1};
    struct Case {
        KernelFunction k;
        const LatticeSubgroup* lat;
        int resolution;
    };
    std::vector<Case> cases = {{gaussian_kernel(1, 1.0), &z1(), 8}, {heisenberg_test_kernel(1), &h1(), 4}};
    for (const auto& c : cases) {
        const int Q = c.k.group.homogeneous_dimension();
        auto grid = fundamental_domain_grid(*c.lat, c.resolution);
        double d[3];
        for (int j = 0; j < 3; ++j) {
            auto tr = periodised_trace(scale_kernel(c.k, eps[j]), *c.lat, grid, 4.0);
            CHECK(tr.identity_term == doctest::Approx(grid.total_volume * c.k.value_at_zero * std::pow(eps[j], -Q)));
            d[j] = std::abs(std::pow(eps[j], Q) * tr.off_identity);
        }
        CHECK(slope(d[0], d[1], eps[0], eps[1]) >= 4.0);
        CHECK(slope(d[1], d[2], eps[1], eps[2]) >= 4.0);
    }
}

TEST_CASE("trace of the circle heat kernel") {
    auto grid = fundamental_domain_grid(z1(), 4);
    auto tr = periodised_trace(gaussian_kernel(1, 1.0), z1(), grid, 40.0);
    CHECK(std::abs(tr.value - circle_theta(1.0)) < 1e-12);
    CHECK(tr.quadrature_delta < 1e-14);
    auto p = gaussian_kernel(1, 1.0);
    double off = 0.0;
    for (int j = 1; j <= 40; ++j) off += 2.0 * gaussian_heat(1, 1.0, GroupElement{{double(j)}});
    CHECK(tr.value - tr.identity_term == doctest::Approx(off).epsilon(1e-13));
    CHECK(tr.value - p.value_at_zero > 0.0);
}

TEST_CASE("Hilbert-Schmidt norms") {
    auto grid = fundamental_domain_grid(z1(), 4);
    auto hs = hs_norm_squared(gaussian_kernel(1, 1.0), z1(), grid, 40.0);
    CHECK(std::abs(hs.value - circle_theta(2.0)) < 1e-9);
    CHECK(hs_norm_squared(zero_kernel(GradedGroup::abelian(1)), z1(), grid, 5.0).value == 0.0);
    CHECK_THROWS_AS(hs_norm_squared(heisenberg_test_kernel(1), h1(), fundamental_domain_grid(h1(), 2), 3.0),
                    std::invalid_argument);

    // Leading-order scaling eps^{-Q}: a narrow kernel has negligible off-identity terms.
    auto narrow = gaussian_kernel(1, 0.01);
    const double ratio_narrow = hs_norm_squared(scale_kernel(narrow, 0.5), z1(), grid, 20.0).value /
                                hs_norm_squared(narrow, z1(), grid, 20.0).value;
    CHECK(ratio_narrow == doctest::Approx(2.0).epsilon(0.01));

    // At t = 0.1 the off-identity terms are O(1); the ratio follows the eigenvalue side.
    auto wide = gaussian_kernel(1, 0.1);
    const double ratio_wide = hs_norm_squared(scale_kernel(wide, 0.5), z1(), grid, 20.0).value /
                              hs_norm_squared(wide, z1(), grid, 20.0).value;
    CHECK(ratio_wide == doctest::Approx(circle_theta(0.05) / circle_theta(0.2)).epsilon(1e-10));
}

TEST_CASE("Hilbert-Schmidt norm is invariant under reflection") {
    auto grid = fundamental_domain_grid(z1(), 8);
    for (double shift : {0.0, 0.3, -1.7}) {
        auto k = shifted_gaussian_kernel(0.4, {shift});
        const double a = hs_norm_squared(k, z1(), grid, 30.0).value;
        const double b = hs_norm_squared(reflected(k), z1(), grid, 30.0).value;
        CHECK(a == doctest::Approx(b).epsilon(1e-14));
    }
}

TEST_CASE("trace is linear in the kernel") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> coef(-2.0, 2.0), width(0.05, 2.0);
    auto zgrid = fundamental_domain_grid(z1(), 8);
    for (int i = 0; i < 5; ++i) {
        const double a = coef(rng), b = coef(rng);
        auto k1 = gaussian_kernel(1, width(rng));
        auto k2 = shifted_gaussian_kernel(width(rng), {coef(rng)});
        const double lhs = periodised_trace(combine(a, k1, b, k2), z1(), zgrid, 20.0).value;
        const double rhs = a * periodised_trace(k1, z1(), zgrid, 20.0).value + b * periodised_trace(k2, z1(), zgrid, 20.0).value;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
    auto hgrid = fundamental_domain_grid(h1(), 2);
    auto k1 = heisenberg_test_kernel(1);
    auto k2 = scale_kernel(heisenberg_test_kernel(1), 0.7).as_kernel();
    const double a = coef(rng), b = coef(rng);
    const double lhs = periodised_trace(combine(a, k1, b, k2), h1(), hgrid, 4.0).value;
    const double rhs = a * periodised_trace(k1, h1(), hgrid, 4.0).value + b * periodised_trace(k2, h1(), hgrid, 4.0).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("periodisation csv") {
    auto grid = fundamental_domain_grid(z1(), 4);
    const double eps[2] = {1.0, 0.5};
    auto csv = periodisation_csv(gaussian_kernel(1, 1.0), z1(), grid, eps, 10.0);
    CHECK(csv.rfind("epsilon,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
