#include "nilspec/group.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nilspec/numerics.hpp"

namespace nilspec {

GradedGroup GradedGroup::abelian(std::size_t n) {
    if (n == 0) throw std::invalid_argument("abelian group needs dim >= 1");
    GradedGroup g;
    g.family_ = GroupFamily::abelian;
    g.rank_ = n;
    g.weights_.assign(n, 1);
    return g;
}

GradedGroup GradedGroup::heisenberg(std::size_t n) {
    if (n == 0) throw std::invalid_argument("heisenberg group needs n >= 1");
    GradedGroup g;
    g.family_ = GroupFamily::heisenberg;
    g.rank_ = n;
    g.weights_.assign(2 * n, 1);
    g.weights_.push_back(2);
    return g;
}

GradedGroup GradedGroup::product(const GradedGroup& g1, const GradedGroup& g2, int reweight) {
    if (reweight < 1) throw std::invalid_argument("product reweight must be a positive integer");
    GradedGroup g;
    g.family_ = GroupFamily::product;
    g.reweight_ = reweight;
    g.first_ = std::make_shared<const GradedGroup>(g1);
    g.second_ = std::make_shared<const GradedGroup>(g2);
    g.weights_.assign(g1.weights_.begin(), g1.weights_.end());
    for (int w : g2.weights_) g.weights_.push_back(w * reweight);
    return g;
}

int GradedGroup::homogeneous_dimension() const {
    int q = 0;
    for (int w : weights_) q += w;
    return q;
}

int GradedGroup::step() const { return *std::max_element(weights_.begin(), weights_.end()); }

const GradedGroup& GradedGroup::first_factor() const {
    if (!first_) throw std::logic_error(describe() + " is not a product group");
    return *first_;
}

const GradedGroup& GradedGroup::second_factor() const {
    if (!second_) throw std::logic_error(describe() + " is not a product group");
    return *second_;
}

std::string GradedGroup::describe() const {
    switch (family_) {
        case GroupFamily::abelian:
            return "abelian(" + std::to_string(rank_) + ")";
        case GroupFamily::heisenberg:
            return "heisenberg(" + std::to_string(rank_) + ")";
        case GroupFamily::product: {
            std::string second = second_->describe();
            if (reweight_ != 1) second += "^" + std::to_string(reweight_);
            return "product(" + first_->describe() + "," + second + ")";
        }
    }
    return {};
}

GroupElement multiply(const GradedGroup& g, const GroupElement& x, const GroupElement& y) {
    return {multiply<double>(g, x.coords, y.coords)};
}

GroupElement inverse(const GradedGroup& g, const GroupElement& x) { return {inverse<double>(g, x.coords)}; }

GroupElement dilate(const GradedGroup& g, double r, const GroupElement& x) {
    if (!(r > 0.0)) throw std::invalid_argument("dilate: r must be positive");
    g.check_conforms(x.size());
    GroupElement out = x;
    auto w = g.weights();
    for (std::size_t j = 0; j < out.coords.size(); ++j) out.coords[j] *= std::pow(r, w[j]);
    return out;
}

double quasi_norm(const GradedGroup& g, std::span<const double> x) {
    g.check_conforms(x.size());
    auto w = g.weights();
    double norm = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double a = std::abs(x[j]);
        norm = std::max(norm, w[j] == 1 ? a : std::pow(a, 1.0 / w[j]));
    }
    return norm;
}

double quasi_norm(const GradedGroup& g, const ExactElement& x) {
    std::vector<double> v(x.size());
    std::transform(x.begin(), x.end(), v.begin(), [](const Rational& r) { return r.to_double(); });
    return quasi_norm(g, v);
}

namespace {

// Closure of the coordinate lattice under the group law, checked factor by factor.
void check_closure(const GradedGroup& g, std::span<const Rational> k) {
    switch (g.family()) {
        case GroupFamily::abelian:
            return;
        case GroupFamily::heisenberg: {
            const std::size_t n = g.rank();
            for (std::size_t i = 0; i < n; ++i) {
                Rational ratio = k[i] * k[n + i] / (Rational(2) * k[2 * n]);
                if (!ratio.is_integer())
                    throw std::invalid_argument("lattice scales not closed under the Heisenberg law: k_x k_y / (2 k_t) = " +
                                                ratio.to_string());
            }
            return;
        }
        case GroupFamily::product: {
            const std::size_t d1 = g.first_factor().dim();
            check_closure(g.first_factor(), k.first(d1));
            check_closure(g.second_factor(), k.subspan(d1));
            return;
        }
    }
}

void standard_scales(const GradedGroup& g, std::vector<Rational>& out) {
    switch (g.family()) {
        case GroupFamily::abelian:
            out.insert(out.end(), g.dim(), Rational(1));
            return;
        case GroupFamily::heisenberg:
            out.insert(out.end(), 2 * g.rank(), Rational(1));
            out.emplace_back(1, 2);
            return;
        case GroupFamily::product:
            standard_scales(g.first_factor(), out);
            standard_scales(g.second_factor(), out);
            return;
    }
}

double int_power(double r, int w) {
    double p = 1.0;
    for (int i = 0; i < w; ++i) p *= r;
    return p;
}

}  // namespace

LatticeSubgroup::LatticeSubgroup(GradedGroup group, std::vector<Rational> scales)
    : group_(std::move(group)), scales_(std::move(scales)) {
    if (scales_.size() != group_.dim()) throw std::invalid_argument("lattice needs one scale per coordinate");
    for (const auto& k : scales_)
        if (k <= Rational(0)) throw std::invalid_argument("lattice scales must be positive");
    check_closure(group_, scales_);
}

LatticeSubgroup LatticeSubgroup::standard(const GradedGroup& group) {
    std::vector<Rational> k;
    standard_scales(group, k);
    return LatticeSubgroup(group, std::move(k));
}

ExactElement LatticeSubgroup::element(std::span<const std::int64_t> exponents) const {
    group_.check_conforms(exponents.size());
    ExactElement x(exponents.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = Rational(exponents[j]) * scales_[j];
    return x;
}

bool LatticeSubgroup::contains(const ExactElement& x) const {
    group_.check_conforms(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        if (!(x[j] / scales_[j]).is_integer()) return false;
    return true;
}

Rational LatticeSubgroup::covolume() const {
    Rational v(1);
    for (const auto& k : scales_) v *= k;
    return v;
}

double LatticeSubgroup::min_nonzero_norm() const {
    auto w = group_.weights();
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < scales_.size(); ++j) m = std::min(m, std::pow(scales_[j].to_double(), 1.0 / w[j]));
    return m;
}

std::vector<std::int64_t> LatticeSubgroup::exponent_bounds(double radius) const {
    if (!(radius >= 0.0)) throw std::invalid_argument("lattice ball radius must be nonnegative");
    auto w = group_.weights();
    std::vector<std::int64_t> e(scales_.size());
    for (std::size_t j = 0; j < e.size(); ++j) {
        const double bound = std::floor(int_power(radius, w[j]) * scales_[j].den() / scales_[j].num());
        if (bound > 1e15) throw std::invalid_argument("lattice ball radius too large to enumerate");
        e[j] = static_cast<std::int64_t>(bound);
    }
    return e;
}

double LatticeSubgroup::ball_size(double radius) const {
    auto w = group_.weights();
    double count = 1.0;
    for (std::size_t j = 0; j < scales_.size(); ++j)
        count *= 2.0 * std::floor(int_power(radius, w[j]) / scales_[j].to_double()) + 1.0;
    return count;
}

void for_each_lattice_point(const LatticeSubgroup& lat, double radius,
                            const std::function<void(std::span<const std::int64_t>)>& visit) {
    const auto bounds = lat.exponent_bounds(radius);
    const std::size_t d = bounds.size();
    std::vector<std::int64_t> e(d);
    for (std::size_t j = 0; j < d; ++j) e[j] = -bounds[j];
    while (true) {
        visit(e);
        std::size_t j = d;
        while (j > 0) {
            --j;
            if (e[j] < bounds[j]) {
                ++e[j];
                break;
            }
            e[j] = -bounds[j];
            if (j == 0) return;
        }
    }
}

std::vector<GroupElement> lattice_ball(const LatticeSubgroup& lat, double radius) {
    std::vector<GroupElement> out;
    out.reserve(static_cast<std::size_t>(lat.ball_size(radius)));
    for_each_lattice_point(lat, radius, [&](std::span<const std::int64_t> e) {
        GroupElement g;
        g.coords.reserve(e.size());
        for (std::size_t j = 0; j < e.size(); ++j) g.coords.push_back(static_cast<double>(e[j]) * lat.scales()[j].to_double());
        out.push_back(std::move(g));
    });
    return out;
}

std::vector<ExactElement> lattice_ball_exact(const LatticeSubgroup& lat, double radius) {
    std::vector<ExactElement> out;
    out.reserve(static_cast<std::size_t>(lat.ball_size(radius)));
    for_each_lattice_point(lat, radius, [&](std::span<const std::int64_t> e) { out.push_back(lat.element(e)); });
    return out;
}

double lattice_shell_bound(const LatticeSubgroup& lat, double radius, const std::function<double(double)>& decay) {
    const double r0 = std::max(radius, 0.5 * lat.min_nonzero_norm());
    CompensatedSum<double> sum;
    double previous = std::numeric_limits<double>::infinity();
    int growing = 0;
    for (int i = 0; i < 2000; ++i) {
        const double inner = std::ldexp(r0, i);
        const double outer = 2.0 * inner;
        const double count = lat.ball_size(outer) - 1.0;
        const double term = count * decay(inner);
        if (!std::isfinite(term)) return std::numeric_limits<double>::infinity();
        sum.add(term);
        if (term == 0.0) break;
        if (i >= 3 && term <= 1e-18 * sum.value()) break;
        growing = term >= 0.999 * previous ? growing + 1 : 0;
        if (growing >= 8) return std::numeric_limits<double>::infinity();
        previous = term;
        if (i == 1999) return std::numeric_limits<double>::infinity();
    }
    return sum.value();
}

LatticeSum lattice_tail_sum(const LatticeSubgroup& lat, double order, double radius) {
    const auto& g = lat.group();
    LatticeSum out;
    out.divergence_warning = order <= static_cast<double>(g.step()) * static_cast<double>(g.dim());
    CompensatedSum<double> sum;
    for_each_lattice_point(lat, radius, [&](std::span<const std::int64_t> e) {
        if (std::all_of(e.begin(), e.end(), [](std::int64_t v) { return v == 0; })) return;
        sum.add(std::pow(quasi_norm(g, lat.element(e)), -order));
    });
    out.value = sum.value();
    out.tail_bound = lattice_shell_bound(lat, radius, [order](double r) { return std::pow(r, -order); });
    return out;
}

FundamentalDomainGrid fundamental_domain_grid(const LatticeSubgroup& lat, int resolution) {
    if (resolution < 1) throw std::invalid_argument("grid resolution must be >= 1");
    const std::size_t d = lat.group().dim();
    FundamentalDomainGrid grid;
    grid.resolution = resolution;
    const Rational covol = lat.covolume();
    grid.total_volume = covol.to_double();
    std::size_t count = 1;
    for (std::size_t j = 0; j < d; ++j) count *= static_cast<std::size_t>(resolution);
    const double weight = covol.to_double() / static_cast<double>(count);
    std::vector<int> idx(d, 0);
    grid.nodes.reserve(count);
    grid.exact_nodes.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
        ExactElement node(d);
        for (std::size_t j = 0; j < d; ++j)
            node[j] = lat.scales()[j] * Rational(2 * idx[j] + 1 - resolution, 2 * resolution);
        GroupElement dnode;
        dnode.coords.reserve(d);
        for (const auto& v : node) dnode.coords.push_back(v.to_double());
        grid.nodes.push_back(std::move(dnode));
        grid.exact_nodes.push_back(std::move(node));
        grid.weights.push_back(weight);
        for (std::size_t j = d; j > 0; --j) {
            if (++idx[j - 1] < resolution) break;
            idx[j - 1] = 0;
        }
    }
    return grid;
}

}  // namespace nilspec
