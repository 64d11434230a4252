#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilspec/rational.hpp"

namespace nilspec {

/// Point of G in exponential coordinates.
struct GroupElement {
    std::vector<double> coords;
    std::size_t size() const { return coords.size(); }
    bool operator==(const GroupElement&) const = default;
};

/// Point of G with exact rational coordinates (lattice points, grid nodes).
using ExactElement = std::vector<Rational>;

enum class GroupFamily { abelian, heisenberg, product };

/// A graded nilpotent group from one of the closed-form families:
/// abelian R^n, the Heisenberg group H_n realised on R^n x R^n x R with
/// weights (1,...,1,2), and direct products of these.
class GradedGroup {
public:
    static GradedGroup abelian(std::size_t n);
    static GradedGroup heisenberg(std::size_t n);

    /// G1 x G2. The weights of the second factor are multiplied by `reweight`,
    /// which is how two factors are given a common operator degree.
    static GradedGroup product(const GradedGroup& g1, const GradedGroup& g2, int reweight = 1);

    GroupFamily family() const { return family_; }
    std::size_t dim() const { return weights_.size(); }
    std::span<const int> weights() const { return weights_; }

    /// Q = sum of the weights.
    int homogeneous_dimension() const;
    int step() const;

    /// n for heisenberg(n) / abelian(n); 0 for products.
    std::size_t rank() const { return rank_; }
    const GradedGroup& first_factor() const;
    const GradedGroup& second_factor() const;
    int second_reweight() const { return reweight_; }

    std::string describe() const;

    void check_conforms(std::size_t size) const {
        if (size != dim())
            throw std::invalid_argument("group element of size " + std::to_string(size) + " does not conform to " +
                                        describe());
    }

private:
    GradedGroup() = default;

    GroupFamily family_ = GroupFamily::abelian;
    std::size_t rank_ = 0;
    int reweight_ = 1;
    std::vector<int> weights_;
    std::shared_ptr<const GradedGroup> first_, second_;
};

inline GradedGroup direct_product(const GradedGroup& g1, const GradedGroup& g2, int reweight = 1) {
    return GradedGroup::product(g1, g2, reweight);
}

namespace detail {

template <class T>
void multiply_into(const GradedGroup& g, std::span<const T> x, std::span<const T> y, std::span<T> out) {
    switch (g.family()) {
        case GroupFamily::abelian:
            for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] + y[j];
            return;
        case GroupFamily::heisenberg: {
            const std::size_t n = g.rank();
            T symplectic{};
            for (std::size_t i = 0; i < n; ++i) symplectic += x[i] * y[n + i] - x[n + i] * y[i];
            for (std::size_t j = 0; j < 2 * n; ++j) out[j] = x[j] + y[j];
            out[2 * n] = x[2 * n] + y[2 * n] + symplectic / T(2);
            return;
        }
        case GroupFamily::product: {
            const std::size_t d1 = g.first_factor().dim();
            multiply_into<T>(g.first_factor(), x.first(d1), y.first(d1), out.first(d1));
            multiply_into<T>(g.second_factor(), x.subspan(d1), y.subspan(d1), out.subspan(d1));
            return;
        }
    }
}

}  // namespace detail

/// Group law x . y. For heisenberg(n):
/// (x,y,t)(x',y',t') = (x+x', y+y', t+t' + (x.y' - y.x')/2).
/// Instantiated for double and Rational.
template <class T>
std::vector<T> multiply(const GradedGroup& g, std::span<const T> x, std::span<const T> y) {
    g.check_conforms(x.size());
    g.check_conforms(y.size());
    std::vector<T> out(x.size());
    detail::multiply_into<T>(g, x, y, out);
    return out;
}

GroupElement multiply(const GradedGroup& g, const GroupElement& x, const GroupElement& y);

/// For every supported family the inverse is coordinate negation.
template <class T>
std::vector<T> inverse(const GradedGroup& g, std::span<const T> x) {
    g.check_conforms(x.size());
    std::vector<T> out(x.begin(), x.end());
    for (auto& v : out) v = -v;
    return out;
}

GroupElement inverse(const GradedGroup& g, const GroupElement& x);

/// x^{-1} . gamma . x
template <class T>
std::vector<T> conjugate(const GradedGroup& g, std::span<const T> x, std::span<const T> gamma) {
    auto xinv = inverse<T>(g, x);
    auto left = multiply<T>(g, std::span<const T>(xinv), gamma);
    return multiply<T>(g, std::span<const T>(left), x);
}

/// D_r(x) = (r^{w_1} x_1, ..., r^{w_n} x_n), r > 0.
GroupElement dilate(const GradedGroup& g, double r, const GroupElement& x);

/// max_j |x_j|^{1/w_j}
double quasi_norm(const GradedGroup& g, std::span<const double> x);
inline double quasi_norm(const GradedGroup& g, const GroupElement& x) { return quasi_norm(g, x.coords); }
double quasi_norm(const GradedGroup& g, const ExactElement& x);

/// Discrete co-compact subgroup generated by k_j e_j in exponential coordinates.
class LatticeSubgroup {
public:
    /// Throws std::invalid_argument if the scales are not positive or the
    /// generated coordinate lattice is not closed under the group law.
    LatticeSubgroup(GradedGroup group, std::vector<Rational> scales);

    /// Torus lattice Z^n; canonical Heisenberg lattice Z^n x Z^n x (1/2)Z;
    /// products of these.
    static LatticeSubgroup standard(const GradedGroup& group);

    const GradedGroup& group() const { return group_; }
    std::span<const Rational> scales() const { return scales_; }

    /// Coordinates of the lattice element with generator exponents `exponents`.
    ExactElement element(std::span<const std::int64_t> exponents) const;
    bool contains(const ExactElement& x) const;

    /// Volume of the box fundamental domain, prod_j k_j.
    Rational covolume() const;

    /// Smallest quasi-norm of a nonzero lattice element.
    double min_nonzero_norm() const;

    /// Per-coordinate exponent bound floor(R^{w_j} / k_j) of the ball of radius R.
    std::vector<std::int64_t> exponent_bounds(double radius) const;

    /// Number of lattice points with quasi-norm <= R (closed form).
    double ball_size(double radius) const;

private:
    GradedGroup group_;
    std::vector<Rational> scales_;
};

/// Calls `visit(exponents)` for every lattice point of quasi-norm <= R,
/// in lexicographic order of the generator exponents.
void for_each_lattice_point(const LatticeSubgroup& lat, double radius,
                            const std::function<void(std::span<const std::int64_t>)>& visit);

/// Lattice points of quasi-norm <= R, lexicographic in generator exponents.
std::vector<GroupElement> lattice_ball(const LatticeSubgroup& lat, double radius);
std::vector<ExactElement> lattice_ball_exact(const LatticeSubgroup& lat, double radius);

struct LatticeSum {
    double value = 0.0;
    /// Upper bound for the omitted part sum_{|gamma| > R} |gamma|^{-N}
    /// (infinite when N <= Q).
    double tail_bound = 0.0;
    /// True when N <= w_n * n, where convergence is not guaranteed.
    bool divergence_warning = false;
};

/// Partial sum  sum_{0 < |gamma| <= R} |gamma|^{-N}  with a dyadic-shell tail bound.
LatticeSum lattice_tail_sum(const LatticeSubgroup& lat, double order, double radius);

/// Dyadic-shell bound for sum over |gamma| > R of `decay(|gamma|)`, for a
/// nonincreasing `decay`. Returns +inf if the shells do not converge.
double lattice_shell_bound(const LatticeSubgroup& lat, double radius, const std::function<double(double)>& decay);

struct FundamentalDomainGrid {
    std::vector<GroupElement> nodes;
    std::vector<ExactElement> exact_nodes;
    std::vector<double> weights;
    double total_volume = 0.0;
    int resolution = 0;
};

/// Tensor midpoint grid on prod_j [-k_j/2, k_j/2) with uniform weights.
FundamentalDomainGrid fundamental_domain_grid(const LatticeSubgroup& lat, int resolution);

}  // namespace nilspec
