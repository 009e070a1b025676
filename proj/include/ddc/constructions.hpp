#pragma once
// Closed-form encoding families: cyclic shift and clock generators, the full
// d^2 product family at uniform spectrum, and recovery of the single missing
// member of a (d^2-1)-family.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "ddc/coding.hpp"
#include "ddc/errors.hpp"
#include "ddc/linalg.hpp"

namespace ddc {

/// Cyclic shift: maps basis vector j to j+1 mod d.
inline UnitaryMatrix shift(std::size_t d) {
    if (d < 2) throw DomainError("shift: need d >= 2");
    ComplexMatrix m(d, d);
    for (std::size_t j = 0; j < d; ++j) m((j + 1) % d, j) = cx{1.0, 0.0};
    return UnitaryMatrix(std::move(m));
}

/// Diagonal of d-th roots of unity: entry (j,j) is exp(2*pi*i*j/d).
inline UnitaryMatrix clock(std::size_t d) {
    if (d < 2) throw DomainError("clock: need d >= 2");
    ComplexMatrix m(d, d);
    for (std::size_t j = 0; j < d; ++j)
        m(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(d));
    return UnitaryMatrix(std::move(m));
}

/// The generator pair: ZX = omega XZ with omega = exp(2*pi*i/d).
struct ShiftClockPair {
    std::size_t d;
    UnitaryMatrix X;
    UnitaryMatrix Z;

    explicit ShiftClockPair(std::size_t dim) : d(dim), X(shift(dim)), Z(clock(dim)) {}
};

/// All d^2 products X^k Z^l over the uniform spectrum, ordered k-major.
/// Pairwise weighted traces vanish by character orthogonality; the residual
/// is asserted at 1e-12.
inline EncodingFamily pauli_family(std::size_t d) {
    if (d < 2) throw DomainError("pauli_family: need d >= 2");
    std::vector<cx> roots(d);
    for (std::size_t e = 0; e < d; ++e)
        roots[e] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(d));

    std::vector<UnitaryMatrix> members;
    members.reserve(d * d);
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l) {
            // (X^k Z^l) maps |c> to omega^{lc} |c+k>
            ComplexMatrix m(d, d);
            for (std::size_t c = 0; c < d; ++c) m((c + k) % d, c) = roots[(l * c) % d];
            members.emplace_back(std::move(m));
        }

    EncodingFamily f(SchmidtSpectrum::uniform(d), std::move(members));
    const VerifyResult v = verify_family(f, 1e-12);
    if (!v.ok)
        throw Error("pauli_family: residual " + std::to_string(v.worst_pair_residual) +
                    " exceeds 1e-12");
    return f;
}

/// Recover the one missing member of a (d^2-1)-family: the completion column
/// phi of the augmented matrix, rescaled entrywise to S_{ij} = phi_{ij}/sqrt(lambda_j)
/// and phase-canonicalized. A full-size family forces the uniform spectrum, so
/// non-uniform input is rejected once the family itself verifies.
inline UnitaryMatrix complete_to_full(const EncodingFamily& f,
                                      std::uint64_t seed = kDefaultCompletionSeed,
                                      double tol = kTolExact) {
    const std::size_t d = f.d();
    if (f.k() != d * d - 1)
        throw DomainError("complete_to_full: family must have d^2-1 members, got " +
                          std::to_string(f.k()));
    for (std::size_t j = 0; j < d; ++j)
        if (f.spectrum().lambda(j) <= 0.0)
            throw SpectrumHasZero("complete_to_full: lambda_" + std::to_string(j) + " vanishes");
    const VerifyResult v = verify_family(f, tol);
    if (!v.ok)
        throw FamilyNotOrthogonal("complete_to_full: family residual " +
                                      std::to_string(v.worst_pair_residual),
                                  v.worst_pair_residual);
    if (!f.spectrum().is_uniform(1e-8))
        throw SpectrumNotUniform(
            "complete_to_full: a (d^2-1)-family exists only at the uniform spectrum");

    const AugmentedMessageMatrix m = augment(f, seed, tol);
    ComplexMatrix s(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        const double r = std::sqrt(f.spectrum().lambda(j));
        for (std::size_t i = 0; i < d; ++i) s(i, j) = m.phi(0, i, j) / r;
    }
    s = canonical_phase(s);

    const double defect = unitarity_defect(s);
    if (defect > 1e-8)
        throw CompletionNotUnitary("complete_to_full: rescaled completion defect " +
                                       std::to_string(defect),
                                   defect);
    const UnitaryMatrix completion(std::move(s), 1e-8);

    std::vector<UnitaryMatrix> extended = f.unitaries();
    extended.push_back(completion);
    const VerifyResult ext = verify_family(EncodingFamily(f.spectrum(), std::move(extended)), 1e-8);
    if (!ext.ok)
        throw FamilyNotOrthogonal("complete_to_full: extended family residual " +
                                      std::to_string(ext.worst_pair_residual),
                                  ext.worst_pair_residual);
    return completion;
}

}  // namespace ddc
