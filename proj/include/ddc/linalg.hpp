#pragma once
// Dense complex linear algebra for small matrices: products, adjoints,
// unitarity certificates, orthonormal completion of a column set.
// Row-major std::complex<double> throughout, value semantics, pure functions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ddc/errors.hpp"

namespace ddc {

using cx = std::complex<double>;

constexpr double kUnitaryTol = 1e-10;

class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, cx{0.0, 0.0}) {
        if (rows == 0 || cols == 0) throw InvalidArgument("ComplexMatrix: dimensions must be positive");
    }

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cx> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        if (rows == 0 || cols == 0) throw InvalidArgument("ComplexMatrix: dimensions must be positive");
        if (entries_.size() != rows * cols)
            throw InvalidArgument("ComplexMatrix: entry count " + std::to_string(entries_.size()) +
                                  " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
        for (const cx& z : entries_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw InvalidArgument("ComplexMatrix: non-finite entry");
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = cx{1.0, 0.0};
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return entries_.empty(); }

    cx& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const cx& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    const std::vector<cx>& entries() const { return entries_; }
    std::vector<cx>& entries() { return entries_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cx> entries_;
};

inline ComplexMatrix adjoint(const ComplexMatrix& m) {
    ComplexMatrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = std::conj(m(i, j));
    return out;
}

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows())
        throw DimensionMismatch("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cx aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

inline double max_abs(const ComplexMatrix& m) {
    double v = 0.0;
    for (const cx& z : m.entries()) v = std::max(v, std::abs(z));
    return v;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("max_abs_diff: shape mismatch");
    double v = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i)
        v = std::max(v, std::abs(a.entries()[i] - b.entries()[i]));
    return v;
}

inline double frobenius_norm(const ComplexMatrix& m) {
    double s = 0.0;
    for (const cx& z : m.entries()) s += std::norm(z);
    return std::sqrt(s);
}

/// Entrywise max-modulus of m^dagger m - I; the unitarity certificate metric.
inline double unitarity_defect(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw NotSquare("unitarity_defect: matrix is not square");
    const std::size_t n = m.rows();
    double defect = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cx s{0.0, 0.0};
            for (std::size_t k = 0; k < n; ++k) s += std::conj(m(k, i)) * m(k, j);
            if (i == j) s -= cx{1.0, 0.0};
            defect = std::max(defect, std::abs(s));
        }
    return defect;
}

struct UnitarityCheck {
    bool ok;
    double defect;
};

inline UnitarityCheck check_unitary(const ComplexMatrix& m, double tol) {
    const double defect = unitarity_defect(m);
    return {defect <= tol, defect};
}

/// A d x d complex matrix certified unitary to tolerance at construction.
class UnitaryMatrix {
public:
    explicit UnitaryMatrix(ComplexMatrix m, double tol = kUnitaryTol) : mat_(std::move(m)) {
        if (mat_.rows() != mat_.cols()) throw NotSquare("UnitaryMatrix: matrix is not square");
        const double defect = unitarity_defect(mat_);
        if (defect > tol)
            throw NotUnitary("UnitaryMatrix: defect " + std::to_string(defect) + " exceeds tolerance", defect);
    }

    static UnitaryMatrix identity(std::size_t d) { return UnitaryMatrix(ComplexMatrix::identity(d)); }

    std::size_t dim() const { return mat_.rows(); }
    const ComplexMatrix& mat() const { return mat_; }
    const cx& operator()(std::size_t i, std::size_t j) const { return mat_(i, j); }

private:
    ComplexMatrix mat_;
};

namespace detail {

// Gauss-Jordan with partial pivoting; small n only.
inline ComplexMatrix inverse(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw NotSquare("inverse: matrix is not square");
    const std::size_t n = a.rows();
    ComplexMatrix work = a;
    ComplexMatrix inv = ComplexMatrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(work(col, col));
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(work(r, col)) > best) {
                best = std::abs(work(r, col));
                pivot = r;
            }
        if (best < 1e-300) throw Error("inverse: singular matrix");
        if (pivot != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(work(pivot, j), work(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        const cx scale = cx{1.0, 0.0} / work(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            work(col, j) *= scale;
            inv(col, j) *= scale;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const cx factor = work(r, col);
            if (factor == cx{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < n; ++j) {
                work(r, j) -= factor * work(col, j);
                inv(r, j) -= factor * inv(col, j);
            }
        }
    }
    return inv;
}

}  // namespace detail

/// Unitary polar factor of a nonsingular square matrix (scaled Newton iteration).
inline ComplexMatrix polar_unitary(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw NotSquare("polar_unitary: matrix is not square");
    ComplexMatrix x = a;
    for (int iter = 0; iter < 100; ++iter) {
        const ComplexMatrix xinv = detail::inverse(x);
        const double mu = std::sqrt(frobenius_norm(xinv) / frobenius_norm(x));
        ComplexMatrix next(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t j = 0; j < x.cols(); ++j)
                next(i, j) = 0.5 * (mu * x(i, j) + std::conj(xinv(j, i)) / mu);
        const double delta = max_abs_diff(next, x);
        x = std::move(next);
        if (delta < 1e-14) break;
    }
    return x;
}

/// exp(i H) for Hermitian H, via scaling-and-squaring of the Taylor series.
inline ComplexMatrix expm_i_hermitian(const ComplexMatrix& h) {
    if (h.rows() != h.cols()) throw NotSquare("expm_i_hermitian: matrix is not square");
    const std::size_t n = h.rows();
    // infinity norm of iH
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(h(i, j));
        norm = std::max(norm, row);
    }
    int squarings = 0;
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    ComplexMatrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = cx{0.0, 1.0} * h(i, j) * scale;

    ComplexMatrix sum = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    for (int k = 1; k <= 40; ++k) {
        term = matmul(term, b);
        for (cx& z : term.entries()) z /= static_cast<double>(k);
        for (std::size_t i = 0; i < sum.entries().size(); ++i) sum.entries()[i] += term.entries()[i];
        if (max_abs(term) < 1e-20) break;
    }
    for (int s = 0; s < squarings; ++s) sum = matmul(sum, sum);
    return sum;
}

inline ComplexMatrix hcat(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows()) throw DimensionMismatch("hcat: row count mismatch");
    ComplexMatrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
    }
    return out;
}

/// Orthonormal completion of k orthonormal columns to a full basis of C^n.
/// Returns the n-k new columns. New directions are drawn from a seeded complex
/// Gaussian and orthogonalized by modified Gram-Schmidt with reorthogonalization;
/// a candidate whose projected norm falls below 1e-6 is redrawn.
inline ComplexMatrix orthonormal_complete(const ComplexMatrix& cols, std::uint64_t seed,
                                          double input_tol = 1e-8) {
    const std::size_t n = cols.rows();
    const std::size_t k = cols.cols();
    if (k >= n) throw DomainError("orthonormal_complete: need fewer columns than the dimension");

    // pairwise Gram defect of the input
    double gram_defect = 0.0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            cx g{0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i) g += std::conj(cols(i, a)) * cols(i, b);
            if (a == b) g -= cx{1.0, 0.0};
            gram_defect = std::max(gram_defect, std::abs(g));
        }
    if (gram_defect > input_tol)
        throw InputNotOrthonormal("orthonormal_complete: input Gram defect " + std::to_string(gram_defect),
                                  gram_defect);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<std::vector<cx>> basis;
    basis.reserve(n);
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<cx> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = cols(i, c);
        basis.push_back(std::move(v));
    }

    const std::size_t wanted = n - k;
    std::size_t produced = 0;
    int attempts = 0;
    while (produced < wanted) {
        if (++attempts > 1000) throw Error("orthonormal_complete: candidate draws exhausted");
        std::vector<cx> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = cx{gauss(rng), gauss(rng)};
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : basis) {
                cx proj{0.0, 0.0};
                for (std::size_t i = 0; i < n; ++i) proj += std::conj(u[i]) * v[i];
                for (std::size_t i = 0; i < n; ++i) v[i] -= proj * u[i];
            }
        }
        double norm = 0.0;
        for (const cx& z : v) norm += std::norm(z);
        norm = std::sqrt(norm);
        if (norm < 1e-6) continue;
        for (cx& z : v) z /= norm;
        basis.push_back(std::move(v));
        ++produced;
    }

    ComplexMatrix out(n, wanted);
    for (std::size_t c = 0; c < wanted; ++c)
        for (std::size_t i = 0; i < n; ++i) out(i, c) = basis[k + c][i];
    return out;
}

/// Rescale by a global phase so the largest-magnitude entry is real positive.
/// Entries within 1e-9 of the maximum are treated as tied; the lowest row-major
/// index among them anchors the phase.
inline ComplexMatrix canonical_phase(const ComplexMatrix& m) {
    double best = 0.0;
    for (const cx& z : m.entries()) best = std::max(best, std::abs(z));
    if (best == 0.0) return m;
    std::size_t pivot = 0;
    for (std::size_t i = 0; i < m.entries().size(); ++i)
        if (std::abs(m.entries()[i]) >= best - 1e-9) {
            pivot = i;
            break;
        }
    const cx z = m.entries()[pivot];
    const cx phase = std::conj(z) / std::abs(z);
    ComplexMatrix out = m;
    for (cx& e : out.entries()) e *= phase;
    return out;
}

inline ComplexMatrix random_gaussian(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (cx& z : m.entries()) z = cx{gauss(rng), gauss(rng)};
    return m;
}

inline ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = cx{gauss(rng), 0.0};
        for (std::size_t j = i + 1; j < n; ++j) {
            const cx z{gauss(rng) / std::sqrt(2.0), gauss(rng) / std::sqrt(2.0)};
            m(i, j) = z;
            m(j, i) = std::conj(z);
        }
    }
    return m;
}

inline ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
    return polar_unitary(random_gaussian(n, n, rng));
}

}  // namespace ddc
