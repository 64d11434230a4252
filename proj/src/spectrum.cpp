#include "nilspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "nilspec/constants.hpp"
#include "nilspec/errors.hpp"
#include "nilspec/format.hpp"
#include "nilspec/numerics.hpp"

namespace nilspec {

// ExactValue -------------------------------------------------------------------

ExactValue ExactValue::pi_multiple(double coeff, int power) {
    ExactValue v;
    if (coeff != 0.0) v.terms_.emplace_back(power, coeff);
    return v;
}

void ExactValue::normalise() {
    std::sort(terms_.begin(), terms_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, double>> merged;
    for (const auto& [p, c] : terms_) {
        if (!merged.empty() && merged.back().first == p)
            merged.back().second += c;
        else
            merged.emplace_back(p, c);
    }
    std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
    terms_ = std::move(merged);
}

double ExactValue::evaluate() const {
    double sum = 0.0;
    for (const auto& [p, c] : terms_) {
        double pi_power = 1.0;
        for (int i = 0; i < p; ++i) pi_power *= kPi;
        sum += c * pi_power;
    }
    return sum;
}

std::string ExactValue::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [p, c] : terms_) {
        if (!out.empty()) out += "+";
        out += format_double(c) + "*pi^" + std::to_string(p);
    }
    return out;
}

ExactValue operator+(const ExactValue& a, const ExactValue& b) {
    ExactValue out;
    out.terms_ = a.terms_;
    out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
    out.normalise();
    return out;
}

ExactValue operator*(const ExactValue& a, const ExactValue& b) {
    ExactValue out;
    for (const auto& [pa, ca] : a.terms_)
        for (const auto& [pb, cb] : b.terms_) out.terms_.emplace_back(pa + pb, ca * cb);
    out.normalise();
    return out;
}

ExactValue ExactValue::scaled(double c) const {
    ExactValue out = *this;
    for (auto& t : out.terms_) t.second *= c;
    out.normalise();
    return out;
}

ExactValue ExactValue::pow(int ell) const {
    if (ell < 1) throw std::invalid_argument("ExactValue::pow: exponent must be >= 1");
    ExactValue out = *this;
    for (int i = 1; i < ell; ++i) out = out * *this;
    return out;
}

// Models -----------------------------------------------------------------------

double NilmanifoldModel::weyl_constant() const { return heat_coefficient() / std::tgamma(1.0 + exponent()); }

std::string NilmanifoldModel::describe() const {
    switch (kind) {
        case OperatorKind::torus_laplacian: {
            std::string s = "torus:" + std::to_string(rank);
            if (torus_scale != 1.0) s += "@" + format_double(torus_scale);
            return s;
        }
        case OperatorKind::heisenberg_sublaplacian:
            return "heisenberg:" + std::to_string(rank);
        case OperatorKind::scaled_power:
            return "scaled(" + base->describe() + ",c=" + format_double(c) + ",l=" + std::to_string(ell) + ")";
        case OperatorKind::product_sum: {
            std::string s = "product(" + base->describe() + "," + second->describe();
            if (reweight != 1) s += ",w=" + std::to_string(reweight);
            return s + ")";
        }
    }
    return {};
}

NilmanifoldModel torus_model(std::size_t n, double scale) {
    if (n == 0) throw std::invalid_argument("torus dimension must be >= 1");
    if (!(scale > 0.0)) throw std::invalid_argument("torus scale must be positive");
    auto group = GradedGroup::abelian(n);
    // The lattice is recorded exactly only for unit scale; other scales use
    // the closest rational with denominator 2^20.
    Rational k = scale == 1.0 ? Rational(1)
                              : Rational(static_cast<std::int64_t>(std::llround(scale * 1048576.0)), 1048576);
    NilmanifoldModel m{.group = group, .lattice = LatticeSubgroup(group, std::vector<Rational>(n, k))};
    m.kind = OperatorKind::torus_laplacian;
    m.rank = n;
    m.torus_scale = scale;
    m.Q = static_cast<int>(n);
    m.nu = 2;
    m.vol = std::pow(scale, static_cast<double>(n));
    m.p1_zero = std::pow(4.0 * kPi, -0.5 * static_cast<double>(n));
    m.c0 = m.p1_zero / std::tgamma(0.5 * static_cast<double>(n));
    return m;
}

NilmanifoldModel heisenberg_model(std::size_t n) {
    if (n == 0) throw std::invalid_argument("heisenberg rank must be >= 1");
    auto group = GradedGroup::heisenberg(n);
    NilmanifoldModel m{.group = group, .lattice = LatticeSubgroup::standard(group)};
    m.kind = OperatorKind::heisenberg_sublaplacian;
    m.rank = n;
    m.Q = static_cast<int>(2 * n + 2);
    m.nu = 2;
    m.vol = 0.5;
    m.c0 = c0_heisenberg_limit(n, PrefactorMode::consistent);
    m.p1_zero = m.c0 * std::tgamma(m.exponent());
    return m;
}

NilmanifoldModel scaled_power_model(const NilmanifoldModel& base, double c, int ell) {
    if (!(c > 0.0)) throw std::invalid_argument("scaled_power: c must be positive");
    if (ell < 1) throw std::invalid_argument("scaled_power: ell must be >= 1");
    NilmanifoldModel m{.group = base.group, .lattice = base.lattice};
    m.kind = OperatorKind::scaled_power;
    m.c = c;
    m.ell = ell;
    m.base = std::make_shared<const NilmanifoldModel>(base);
    m.Q = base.Q;
    m.nu = base.nu * ell;
    m.vol = base.vol;
    m.c0 = c0_scaled(c0_power(base.c0, ell), c, m.Q, m.nu);
    m.p1_zero = m.c0 * std::tgamma(m.exponent());
    return m;
}

NilmanifoldModel product_model(const NilmanifoldModel& m1, const NilmanifoldModel& m2, int reweight) {
    if (reweight < 1) throw std::invalid_argument("product_model: reweight must be >= 1");
    if (m1.nu != m2.nu * reweight)
        throw std::invalid_argument("product_model: operator degrees differ (" + std::to_string(m1.nu) + " vs " +
                                    std::to_string(m2.nu) + "*" + std::to_string(reweight) +
                                    "); pass a reweight for the second factor");
    auto group = GradedGroup::product(m1.group, m2.group, reweight);
    std::vector<Rational> scales(m1.lattice.scales().begin(), m1.lattice.scales().end());
    scales.insert(scales.end(), m2.lattice.scales().begin(), m2.lattice.scales().end());
    NilmanifoldModel m{.group = group, .lattice = LatticeSubgroup(group, std::move(scales))};
    m.kind = OperatorKind::product_sum;
    m.reweight = reweight;
    m.base = std::make_shared<const NilmanifoldModel>(m1);
    m.second = std::make_shared<const NilmanifoldModel>(m2);
    m.Q = m1.Q + reweight * m2.Q;
    m.nu = m1.nu;
    m.vol = m1.vol * m2.vol;
    m.p1_zero = m1.p1_zero * m2.p1_zero;
    m.c0 = m.p1_zero / std::tgamma(m.exponent());
    return m;
}

// EigenvalueStream ---------------------------------------------------------------

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("multiplicity overflow");
    return r;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("multiplicity overflow");
    return r;
}

}  // namespace

EigenvalueStream::EigenvalueStream(std::vector<SpectralEntry> raw, double cutoff, NilmanifoldModel model)
    : cutoff_(cutoff), model_(std::make_shared<const NilmanifoldModel>(std::move(model))) {
    if (!(cutoff >= 0.0)) throw std::invalid_argument("stream cutoff must be nonnegative");
    std::erase_if(raw, [cutoff](const SpectralEntry& e) { return e.lambda > cutoff || e.multiplicity == 0; });
    std::sort(raw.begin(), raw.end(), [](const SpectralEntry& a, const SpectralEntry& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        return a.exact < b.exact;
    });
    for (auto& e : raw) {
        // Equal exact forms always merge; distinct forms that collide in double
        // precision are merged as well so the stream stays strictly increasing.
        if (!entries_.empty() && (entries_.back().exact == e.exact || entries_.back().lambda == e.lambda))
            entries_.back().multiplicity = checked_add(entries_.back().multiplicity, e.multiplicity);
        else
            entries_.push_back(std::move(e));
    }
    if (entries_.empty() || !entries_.front().exact.is_zero() || entries_.front().multiplicity != 1)
        throw std::invalid_argument("eigenvalue stream must start with the simple eigenvalue 0");
}

std::uint64_t EigenvalueStream::total_multiplicity() const {
    std::uint64_t total = 0;
    for (const auto& e : entries_) total = checked_add(total, e.multiplicity);
    return total;
}

double EigenvalueStream::first_nonzero() const {
    if (entries_.size() < 2) throw CompletenessError("stream holds no nonzero eigenvalue below its cutoff");
    return entries_[1].lambda;
}

double EigenvalueStream::weyl_envelope() const {
    const double alpha = model_->exponent();
    double observed = 0.0;
    double count = 0.0;
    for (const auto& e : entries_) {
        count += static_cast<double>(e.multiplicity);
        if (e.lambda > 0.0) observed = std::max(observed, count / std::pow(e.lambda, alpha));
    }
    return 2.0 * std::max(observed, model_->weyl_constant());
}

// Spectra ------------------------------------------------------------------------

namespace {

// r[k] = #{m in Z^n : |m|^2 = k}, k <= kmax.
std::vector<std::uint64_t> representation_counts(std::size_t n, std::int64_t kmax) {
    if (kmax > 50'000'000) throw std::invalid_argument("torus spectrum cutoff too large for enumeration");
    std::vector<std::uint64_t> r(static_cast<std::size_t>(kmax) + 1, 0);
    r[0] = 1;
    for (std::size_t d = 0; d < n; ++d) {
        std::vector<std::uint64_t> next(r.size(), 0);
        for (std::int64_t k = 0; k <= kmax; ++k) {
            if (r[k] == 0) continue;
            for (std::int64_t j = 0; k + j * j <= kmax; ++j)
                next[k + j * j] = checked_add(next[k + j * j], checked_mul(r[k], j == 0 ? 1 : 2));
        }
        r = std::move(next);
    }
    return r;
}

std::vector<SpectralEntry> torus_raw(std::size_t n, double cutoff, double scale) {
    const double unit = 4.0 * kPi * kPi / (scale * scale);
    const auto kmax = static_cast<std::int64_t>(std::floor(cutoff / unit)) + 1;
    const auto r = representation_counts(n, kmax);
    std::vector<SpectralEntry> raw;
    for (std::int64_t k = 0; k <= kmax; ++k) {
        if (r[k] == 0) continue;
        SpectralEntry e;
        e.exact = ExactValue::pi_multiple(4.0 * static_cast<double>(k) / (scale * scale), 2);
        e.lambda = e.exact.evaluate();
        e.multiplicity = r[k];
        raw.push_back(std::move(e));
    }
    return raw;
}

}  // namespace

EigenvalueStream torus_eigenvalues(std::size_t n, double cutoff, double scale) {
    if (!(cutoff > 0.0)) throw std::invalid_argument("torus_eigenvalues: cutoff must be positive");
    return EigenvalueStream(torus_raw(n, cutoff, scale), cutoff, torus_model(n, scale));
}

EigenvalueStream heisenberg_eigenvalues(std::size_t n, double cutoff) {
    if (!(cutoff > 0.0)) throw std::invalid_argument("heisenberg_eigenvalues: cutoff must be positive");
    auto raw = torus_raw(2 * n, cutoff, 1.0);
    const auto nn = static_cast<std::uint64_t>(n);
    // 4 (2a + n) pi |k|, keyed by the integer coefficient of pi.
    std::map<std::uint64_t, std::uint64_t> second_kind;
    for (std::uint64_t k = 1; 4.0 * kPi * static_cast<double>(nn * k) <= cutoff; ++k) {
        std::uint64_t two_k_pow = 1;
        for (std::uint64_t i = 0; i < nn; ++i) two_k_pow = checked_mul(two_k_pow, 2 * k);
        std::uint64_t binom = 1;  // (n+a-1)! / ((n-1)! a!)
        for (std::uint64_t a = 0;; ++a) {
            if (a > 0) {
                const unsigned __int128 next = static_cast<unsigned __int128>(binom) * (nn + a - 1) / a;
                if (next > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("multiplicity overflow");
                binom = static_cast<std::uint64_t>(next);
            }
            const std::uint64_t q = 4 * (2 * a + nn) * k;
            if (static_cast<double>(q) * kPi > cutoff) break;
            const std::uint64_t mult = checked_mul(2, checked_mul(two_k_pow, binom));
            second_kind[q] = checked_add(second_kind[q], mult);
        }
    }
    for (const auto& [q, mult] : second_kind) {
        SpectralEntry e;
        e.exact = ExactValue::pi_multiple(static_cast<double>(q), 1);
        e.lambda = e.exact.evaluate();
        e.multiplicity = mult;
        raw.push_back(std::move(e));
    }
    return EigenvalueStream(std::move(raw), cutoff, heisenberg_model(n));
}

EigenvalueStream transform_spectrum(const EigenvalueStream& spec, double c, int ell) {
    if (!(c > 0.0)) throw std::invalid_argument("transform_spectrum: c must be positive");
    if (ell < 1) throw std::invalid_argument("transform_spectrum: ell must be >= 1");
    std::vector<SpectralEntry> raw;
    raw.reserve(spec.size());
    for (const auto& e : spec.entries()) {
        SpectralEntry t;
        t.exact = e.exact.is_zero() ? ExactValue{} : e.exact.pow(ell).scaled(c);
        t.lambda = t.exact.evaluate();
        t.multiplicity = e.multiplicity;
        raw.push_back(std::move(t));
    }
    const double cutoff = c * std::pow(spec.cutoff(), ell);
    return EigenvalueStream(std::move(raw), cutoff, scaled_power_model(spec.model(), c, ell));
}

EigenvalueStream product_spectrum(const EigenvalueStream& s1, const EigenvalueStream& s2, double cutoff,
                                  int reweight) {
    if (!(cutoff >= 0.0)) throw std::invalid_argument("product_spectrum: cutoff must be nonnegative");
    if (cutoff > s1.cutoff() || cutoff > s2.cutoff())
        throw CompletenessError("product_spectrum: factor streams complete only to " + format_double(s1.cutoff()) +
                                " and " + format_double(s2.cutoff()) + ", requested " + format_double(cutoff));
    std::vector<SpectralEntry> raw;
    for (const auto& e1 : s1.entries()) {
        if (e1.lambda > cutoff) break;
        for (const auto& e2 : s2.entries()) {
            if (e1.lambda + e2.lambda > cutoff) break;
            SpectralEntry e;
            e.exact = e1.exact + e2.exact;
            e.lambda = e.exact.evaluate();
            e.multiplicity = checked_mul(e1.multiplicity, e2.multiplicity);
            raw.push_back(std::move(e));
        }
    }
    return EigenvalueStream(std::move(raw), cutoff, product_model(s1.model(), s2.model(), reweight));
}

EigenvalueStream spectrum_for(const NilmanifoldModel& model, double cutoff) {
    switch (model.kind) {
        case OperatorKind::torus_laplacian:
            return torus_eigenvalues(model.rank, cutoff, model.torus_scale);
        case OperatorKind::heisenberg_sublaplacian:
            return heisenberg_eigenvalues(model.rank, cutoff);
        case OperatorKind::scaled_power: {
            const double base_cutoff = std::pow(cutoff / model.c, 1.0 / model.ell) * (1.0 + 1e-12);
            return transform_spectrum(spectrum_for(*model.base, base_cutoff), model.c, model.ell);
        }
        case OperatorKind::product_sum:
            return product_spectrum(spectrum_for(*model.base, cutoff), spectrum_for(*model.second, cutoff), cutoff,
                                    model.reweight);
    }
    throw std::logic_error("unknown operator kind");
}

std::uint64_t counting(const EigenvalueStream& spec, double lambda) {
    if (lambda > spec.cutoff())
        throw CompletenessError("counting: " + format_double(lambda) + " exceeds stream cutoff " +
                                format_double(spec.cutoff()));
    std::uint64_t total = 0;
    for (const auto& e : spec.entries()) {
        if (e.lambda > lambda) break;
        total = checked_add(total, e.multiplicity);
    }
    return total;
}

std::uint64_t semiclassical_count(const EigenvalueStream& spec, double a, double b, double lambda) {
    if (!(a >= 0.0) || !(b > a)) throw std::invalid_argument("semiclassical_count: need 0 <= a < b");
    if (!(lambda > 0.0)) throw std::invalid_argument("semiclassical_count: Lambda must be positive");
    if (lambda * b > spec.cutoff())
        throw CompletenessError("semiclassical_count: Lambda*b exceeds stream cutoff " + format_double(spec.cutoff()));
    std::uint64_t total = 0;
    for (const auto& e : spec.entries()) {
        if (e.lambda > lambda * b) break;
        if (e.lambda >= lambda * a) total = checked_add(total, e.multiplicity);
    }
    return total;
}

std::string spectrum_csv(const EigenvalueStream& spec) {
    std::string out = "lambda,multiplicity,cumulative_count,lambda_exact\n";
    std::uint64_t cumulative = 0;
    for (const auto& e : spec.entries()) {
        cumulative += e.multiplicity;
        out += format_double(e.lambda) + "," + std::to_string(e.multiplicity) + "," + std::to_string(cumulative) + "," +
               e.exact.to_string() + "\n";
    }
    return out;
}

}  // namespace nilspec
