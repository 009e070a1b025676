#pragma once
// Core objects for two-qudit dense coding: Schmidt spectra, the weighted trace
// inner product on encoding unitaries, message-state columns, and the square
// augmented matrix whose unitarity certifies a family.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ddc/errors.hpp"
#include "ddc/linalg.hpp"

namespace ddc {

constexpr double kTolExact = 1e-9;
constexpr double kTolSearch = 1e-6;
// Fixed so augment() is reproducible without a caller-supplied seed.
constexpr std::uint64_t kDefaultCompletionSeed = 0x9e3779b97f4a7c15ull;

/// Squared Schmidt coefficients (lambda_0 >= ... >= lambda_{d-1} >= 0, sum 1).
/// The constructor sorts descending; normalization must hold within 1e-12.
class SchmidtSpectrum {
public:
    explicit SchmidtSpectrum(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
        if (lambdas_.size() < 2) throw InvalidArgument("SchmidtSpectrum: need at least two coefficients");
        for (double l : lambdas_)
            if (!std::isfinite(l) || l < 0.0)
                throw InvalidArgument("SchmidtSpectrum: coefficients must be finite and non-negative");
        std::sort(lambdas_.begin(), lambdas_.end(), std::greater<double>());
        const double sum = std::accumulate(lambdas_.begin(), lambdas_.end(), 0.0);
        if (std::abs(sum - 1.0) > 1e-12)
            throw InvalidArgument("SchmidtSpectrum: coefficients sum to " + std::to_string(sum) +
                                  ", expected 1");
    }

    static SchmidtSpectrum uniform(std::size_t d) {
        if (d < 2) throw InvalidArgument("SchmidtSpectrum: need d >= 2");
        return SchmidtSpectrum(std::vector<double>(d, 1.0 / static_cast<double>(d)));
    }

    std::size_t d() const { return lambdas_.size(); }
    const std::vector<double>& lambdas() const { return lambdas_; }
    double lambda(std::size_t j) const { return lambdas_.at(j); }
    double lambda0() const { return lambdas_.front(); }

    ComplexMatrix lambda_matrix() const {
        ComplexMatrix m(d(), d());
        for (std::size_t j = 0; j < d(); ++j) m(j, j) = cx{lambdas_[j], 0.0};
        return m;
    }

    /// lambda_j / lambda_0
    double eta(std::size_t j) const { return lambdas_.at(j) / lambdas_.front(); }
    /// (1 - lambda_0) / lambda_0, the summed ratio of the tail to the head
    double eta_total() const { return (1.0 - lambdas_.front()) / lambdas_.front(); }

    bool is_uniform(double tol) const {
        const double target = 1.0 / static_cast<double>(d());
        for (double l : lambdas_)
            if (std::abs(l - target) > tol) return false;
        return true;
    }

private:
    std::vector<double> lambdas_;
};

/// K encoding unitaries together with the spectrum they encode against.
class EncodingFamily {
public:
    EncodingFamily(SchmidtSpectrum spectrum, std::vector<UnitaryMatrix> unitaries)
        : spectrum_(std::move(spectrum)), unitaries_(std::move(unitaries)) {
        const std::size_t d = spectrum_.d();
        if (unitaries_.empty() || unitaries_.size() > d * d)
            throw InvalidArgument("EncodingFamily: member count must be between 1 and d^2");
        for (const UnitaryMatrix& u : unitaries_)
            if (u.dim() != d)
                throw DimensionMismatch("EncodingFamily: member dimension does not match the spectrum");
    }

    const SchmidtSpectrum& spectrum() const { return spectrum_; }
    const std::vector<UnitaryMatrix>& unitaries() const { return unitaries_; }
    const UnitaryMatrix& unitary(std::size_t a) const { return unitaries_.at(a); }
    std::size_t d() const { return spectrum_.d(); }
    std::size_t k() const { return unitaries_.size(); }

private:
    SchmidtSpectrum spectrum_;
    std::vector<UnitaryMatrix> unitaries_;
};

/// Amplitudes of one encoded two-qudit state; flat index jd+i holds the (i,j)
/// component.
struct MessageState {
    std::size_t d;
    std::vector<cx> amplitudes;
};

/// tr(Lambda a^dagger b): the inner product under which a family must be an
/// orthonormal set.
inline cx lambda_gram(const UnitaryMatrix& a, const UnitaryMatrix& b, const SchmidtSpectrum& s) {
    const std::size_t d = s.d();
    if (a.dim() != d || b.dim() != d)
        throw DimensionMismatch("lambda_gram: unitary dimension does not match the spectrum");
    cx g{0.0, 0.0};
    for (std::size_t j = 0; j < d; ++j) {
        const double lj = s.lambda(j);
        for (std::size_t i = 0; i < d; ++i) g += lj * std::conj(a(i, j)) * b(i, j);
    }
    return g;
}

struct VerifyResult {
    bool ok;
    double worst_pair_residual;
};

/// Worst off-diagonal |tr(Lambda a^dagger b)| over all pairs. Diagonal entries
/// equal 1 automatically for unitary members; they are asserted, not searched.
inline VerifyResult verify_family(const EncodingFamily& f, double tol) {
    const std::size_t k = f.k();
    for (std::size_t a = 0; a < k; ++a) {
        const cx g = lambda_gram(f.unitary(a), f.unitary(a), f.spectrum());
        if (std::abs(g - cx{1.0, 0.0}) > 1e-8)
            throw Error("verify_family: diagonal normalization broken at member " + std::to_string(a));
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b)
            worst = std::max(worst, std::abs(lambda_gram(f.unitary(a), f.unitary(b), f.spectrum())));
    return {worst <= tol, worst};
}

/// Component vector of (U ⊗ I) applied to the shared state: amplitude at
/// flat index jd+i is sqrt(lambda_j) U_{ij}.
inline MessageState message_state(const UnitaryMatrix& u, const SchmidtSpectrum& s) {
    const std::size_t d = s.d();
    if (u.dim() != d) throw DimensionMismatch("message_state: dimension mismatch");
    MessageState out{d, std::vector<cx>(d * d)};
    for (std::size_t j = 0; j < d; ++j) {
        const double r = std::sqrt(s.lambda(j));
        for (std::size_t i = 0; i < d; ++i) out.amplitudes[j * d + i] = r * u(i, j);
    }
    double norm2 = 0.0;
    for (const cx& z : out.amplitudes) norm2 += std::norm(z);
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-10)
        throw Error("message_state: norm deviates from 1");
    return out;
}

/// d^2 x K matrix whose column a is the message state of member a.
inline ComplexMatrix build_message_columns(const EncodingFamily& f, double tol = kTolExact) {
    const VerifyResult v = verify_family(f, tol);
    if (!v.ok)
        throw FamilyNotOrthogonal("build_message_columns: worst pair residual " +
                                      std::to_string(v.worst_pair_residual),
                                  v.worst_pair_residual);
    const std::size_t d = f.d();
    ComplexMatrix cols(d * d, f.k());
    for (std::size_t a = 0; a < f.k(); ++a) {
        const MessageState psi = message_state(f.unitary(a), f.spectrum());
        for (std::size_t r = 0; r < d * d; ++r) cols(r, a) = psi.amplitudes[r];
    }
    return cols;
}

/// The d^2 x d^2 unitary formed by the K message columns plus d^2-K completion
/// columns. Certified unitary at 1e-9 on construction.
class AugmentedMessageMatrix {
public:
    AugmentedMessageMatrix(std::size_t d, std::size_t k, ComplexMatrix mat)
        : d_(d), k_(k), mat_(std::move(mat)) {
        if (mat_.rows() != d * d || mat_.cols() != d * d)
            throw DimensionMismatch("AugmentedMessageMatrix: matrix must be d^2 x d^2");
        if (k_ < 1 || k_ > d_ * d_)
            throw InvalidArgument("AugmentedMessageMatrix: K out of range");
        const double defect = unitarity_defect(mat_);
        if (defect > 1e-9)
            throw NotUnitary("AugmentedMessageMatrix: defect " + std::to_string(defect), defect);
    }

    std::size_t d() const { return d_; }
    std::size_t k() const { return k_; }
    std::size_t completion_count() const { return d_ * d_ - k_; }
    const ComplexMatrix& mat() const { return mat_; }

    /// Completion-column entry phi^{(b)}_{ij}; b counts from 0 over the
    /// d^2-K completion columns.
    cx phi(std::size_t b, std::size_t i, std::size_t j) const { return mat_(j * d_ + i, k_ + b); }

private:
    std::size_t d_;
    std::size_t k_;
    ComplexMatrix mat_;
};

/// Message columns extended to a full orthonormal basis. The completion draws
/// from a seeded Gaussian, so equal seeds give identical matrices.
inline AugmentedMessageMatrix augment(const EncodingFamily& f,
                                      std::uint64_t seed = kDefaultCompletionSeed,
                                      double tol = kTolExact) {
    const ComplexMatrix cols = build_message_columns(f, tol);
    const std::size_t n = f.d() * f.d();
    if (f.k() == n) return AugmentedMessageMatrix(f.d(), f.k(), cols);
    const ComplexMatrix extra = orthonormal_complete(cols, seed, std::max(tol, 1e-8));
    return AugmentedMessageMatrix(f.d(), f.k(), hcat(cols, extra));
}

/// Per-j residual of the completion-weight identity
/// d - K lambda_j = sum_b sum_i |phi^{(b)}_{ij}|^2.
inline std::vector<double> completion_deficit_residuals(const AugmentedMessageMatrix& m,
                                                        const SchmidtSpectrum& s) {
    if (m.d() != s.d())
        throw DimensionMismatch("completion_deficit_residuals: dimension mismatch");
    const std::size_t d = m.d();
    const auto K = static_cast<double>(m.k());
    std::vector<double> residuals(d);
    for (std::size_t j = 0; j < d; ++j) {
        double weight = 0.0;
        for (std::size_t b = 0; b < m.completion_count(); ++b)
            for (std::size_t i = 0; i < d; ++i) weight += std::norm(m.phi(b, i, j));
        residuals[j] = std::abs((static_cast<double>(d) - K * s.lambda(j)) - weight);
    }
    return residuals;
}

/// Necessary condition lambda_0 <= d/K for any K-member family to exist.
inline bool wcsg_feasible(const SchmidtSpectrum& s, std::size_t K) {
    if (K < 1 || K > s.d() * s.d()) throw DomainError("wcsg_feasible: K must lie in [1, d^2]");
    return s.lambda0() <= static_cast<double>(s.d()) / static_cast<double>(K) + 1e-12;
}

}  // namespace ddc
