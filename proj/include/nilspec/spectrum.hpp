#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nilspec/group.hpp"

namespace nilspec {

/// Exact eigenvalue representation  sum_p coeff_p * pi^p.  Torus eigenvalues
/// are integer multiples of pi^2, Heisenberg eigenvalues of the second kind are
/// integer multiples of pi; sums and powers stay in this form. Coefficients are
/// doubles holding integers (or the rescaling factor c), so equality is exact.
class ExactValue {
public:
    ExactValue() = default;
    static ExactValue pi_multiple(double coeff, int power);

    std::span<const std::pair<int, double>> terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    double evaluate() const;

    /// "0", "4*pi^2", "12*pi^1+4*pi^2", ...
    std::string to_string() const;

    friend ExactValue operator+(const ExactValue& a, const ExactValue& b);
    friend ExactValue operator*(const ExactValue& a, const ExactValue& b);
    ExactValue scaled(double c) const;
    ExactValue pow(int ell) const;

    friend bool operator==(const ExactValue&, const ExactValue&) = default;
    friend auto operator<=>(const ExactValue&, const ExactValue&) = default;

private:
    void normalise();
    std::vector<std::pair<int, double>> terms_;  // sorted by power, nonzero coefficients
};

enum class OperatorKind { torus_laplacian, heisenberg_sublaplacian, scaled_power, product_sum };

/// Group, lattice, operator and the constants Q, nu, vol(M), p_1(0), c_0 of a
/// supported nilmanifold operator.
struct NilmanifoldModel {
    GradedGroup group;
    LatticeSubgroup lattice;
    OperatorKind kind = OperatorKind::torus_laplacian;
    std::size_t rank = 0;       // n of torus_laplacian(n) / heisenberg_sublaplacian(n)
    double torus_scale = 1.0;   // lattice k Z^n for the torus
    double c = 1.0;             // scaled_power: c R^ell
    int ell = 1;
    int reweight = 1;           // product_sum: weight multiplier of the second factor
    std::shared_ptr<const NilmanifoldModel> base;    // scaled_power base / product first factor
    std::shared_ptr<const NilmanifoldModel> second;  // product second factor

    int Q = 1;
    int nu = 2;
    double vol = 1.0;
    double p1_zero = 0.0;
    double c0 = 0.0;

    /// Q / nu: Weyl exponent and location of the zeta pole.
    double exponent() const { return static_cast<double>(Q) / nu; }
    /// vol(M) p_1(0): coefficient of the one-term heat-trace asymptotic.
    double heat_coefficient() const { return vol * p1_zero; }
    /// vol(M) p_1(0) / Gamma(1 + Q/nu): limit of N(Lambda) Lambda^{-Q/nu}.
    double weyl_constant() const;
    std::string describe() const;
};

NilmanifoldModel torus_model(std::size_t n, double scale = 1.0);
NilmanifoldModel heisenberg_model(std::size_t n);
NilmanifoldModel scaled_power_model(const NilmanifoldModel& base, double c, int ell);
/// R_1 (x) I + I (x) R_2 on M_1 x M_2. The second factor's dilations are
/// reweighted by `reweight`; its degree times `reweight` must equal the first's.
NilmanifoldModel product_model(const NilmanifoldModel& m1, const NilmanifoldModel& m2, int reweight = 1);

struct SpectralEntry {
    double lambda = 0.0;
    std::uint64_t multiplicity = 0;
    ExactValue exact;
};

/// Eigenvalues with multiplicity, strictly increasing, complete up to `cutoff`.
class EigenvalueStream {
public:
    /// Aggregates raw (value, multiplicity) pairs with equal exact forms and
    /// drops anything above the cutoff.
    EigenvalueStream(std::vector<SpectralEntry> raw, double cutoff, NilmanifoldModel model);

    std::span<const SpectralEntry> entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    double cutoff() const { return cutoff_; }
    const NilmanifoldModel& model() const { return *model_; }
    std::uint64_t total_multiplicity() const;

    /// Smallest nonzero eigenvalue (throws if the stream holds only 0).
    double first_nonzero() const;

    /// Constant K with N(lambda) <= K lambda^{Q/nu} used for tail estimates
    /// beyond the cutoff: twice the larger of the Weyl constant and the
    /// largest observed N(lambda) lambda^{-Q/nu} over the stream.
    double weyl_envelope() const;

private:
    std::vector<SpectralEntry> entries_;
    double cutoff_ = 0.0;
    std::shared_ptr<const NilmanifoldModel> model_;
};

/// Spectrum of the Laplacian on R^n / (scale Z)^n: values 4 pi^2 |m|^2 / scale^2.
EigenvalueStream torus_eigenvalues(std::size_t n, double cutoff, double scale = 1.0);

/// Sub-Laplacian on Gamma \ H_n, canonical lattice: 4 pi^2 |m|^2 (m in Z^{2n})
/// and 4 (2a + n) pi |k| with multiplicity (2|k|)^n binom(n+a-1, a),
/// a >= 0, k != 0.
EigenvalueStream heisenberg_eigenvalues(std::size_t n, double cutoff);

/// Spectrum of c R^ell: values c lambda^ell, complete to c cutoff^ell.
EigenvalueStream transform_spectrum(const EigenvalueStream& spec, double c, int ell);

/// Spectrum of R_1 (x) I + I (x) R_2: pairwise sums up to `cutoff`.
EigenvalueStream product_spectrum(const EigenvalueStream& s1, const EigenvalueStream& s2, double cutoff,
                                  int reweight = 1);

/// Stream for any supported model, complete to `cutoff`.
EigenvalueStream spectrum_for(const NilmanifoldModel& model, double cutoff);

/// N(Lambda) = sum of multiplicities of eigenvalues <= Lambda (including 0).
std::uint64_t counting(const EigenvalueStream& spec, double lambda);

/// Sum of multiplicities over Lambda a <= lambda <= Lambda b.
std::uint64_t semiclassical_count(const EigenvalueStream& spec, double a, double b, double lambda);

/// CSV with header lambda,multiplicity,cumulative_count,lambda_exact.
std::string spectrum_csv(const EigenvalueStream& spec);

}  // namespace nilspec
