#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ddc/coding.hpp"

using ddc::ComplexMatrix;
using ddc::cx;
using ddc::EncodingFamily;
using ddc::SchmidtSpectrum;
using ddc::UnitaryMatrix;

namespace {

// cyclic shift: maps basis vector j to j+1 mod d
ComplexMatrix shift_mat(std::size_t d) {
    ComplexMatrix m(d, d);
    for (std::size_t j = 0; j < d; ++j) m((j + 1) % d, j) = cx{1, 0};
    return m;
}

ComplexMatrix diag2(cx a, cx b) {
    ComplexMatrix m(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

const SchmidtSpectrum kSkewed({0.7, 0.3});

}  // namespace

TEST_CASE("SchmidtSpectrum normalizes its invariants") {
    SchmidtSpectrum s({0.1, 0.6, 0.3});
    CHECK(s.lambdas() == std::vector<double>{0.6, 0.3, 0.1});
    CHECK(s.lambda0() == 0.6);
    CHECK(s.eta(1) == Catch::Approx(0.5));
    CHECK(s.eta_total() == Catch::Approx(2.0 / 3.0));

    const ComplexMatrix lam = s.lambda_matrix();
    CHECK(lam(0, 0) == cx{0.6, 0});
    CHECK(lam(2, 2) == cx{0.1, 0});
    CHECK(lam(0, 1) == cx{0, 0});

    CHECK(SchmidtSpectrum::uniform(4).is_uniform(1e-15));
    CHECK_FALSE(s.is_uniform(1e-2));

    CHECK_THROWS_AS(SchmidtSpectrum({0.5, 0.6}), ddc::InvalidArgument);
    CHECK_THROWS_AS(SchmidtSpectrum({1.2, -0.2}), ddc::InvalidArgument);
    CHECK_THROWS_AS(SchmidtSpectrum({1.0}), ddc::InvalidArgument);
}

TEST_CASE("EncodingFamily validates members against the spectrum") {
    std::vector<UnitaryMatrix> too_many(5, UnitaryMatrix::identity(2));
    CHECK_THROWS_AS(EncodingFamily(SchmidtSpectrum::uniform(2), too_many), ddc::InvalidArgument);

    std::vector<UnitaryMatrix> wrong_dim{UnitaryMatrix::identity(3)};
    CHECK_THROWS_AS(EncodingFamily(SchmidtSpectrum::uniform(2), wrong_dim), ddc::DimensionMismatch);
}

TEST_CASE("lambda_gram hand values") {
    const UnitaryMatrix eye = UnitaryMatrix::identity(2);
    CHECK(std::abs(ddc::lambda_gram(eye, eye, kSkewed) - cx{1, 0}) < 1e-15);

    const UnitaryMatrix x{shift_mat(2)};
    CHECK(std::abs(ddc::lambda_gram(eye, x, kSkewed)) == 0.0);
    const UnitaryMatrix x3{shift_mat(3)};
    CHECK(std::abs(ddc::lambda_gram(UnitaryMatrix::identity(3), x3, SchmidtSpectrum({0.5, 0.3, 0.2}))) == 0.0);

    // 0.7*1 + 0.3*(-1)
    const UnitaryMatrix z{diag2(cx{1, 0}, cx{-1, 0})};
    CHECK(std::abs(ddc::lambda_gram(eye, z, kSkewed) - cx{0.4, 0}) < 1e-15);

    CHECK_THROWS_AS(ddc::lambda_gram(eye, x3, kSkewed), ddc::DimensionMismatch);
}

TEST_CASE("lambda_gram invariances on random instances") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 2 + trial % 3;
        std::vector<double> raw(d);
        double sum = 0;
        for (double& l : raw) {
            l = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
            sum += l;
        }
        for (double& l : raw) l /= sum;
        const SchmidtSpectrum s(raw);
        const UnitaryMatrix a{ddc::random_unitary(d, rng)};
        const UnitaryMatrix b{ddc::random_unitary(d, rng)};

        const cx g = ddc::lambda_gram(a, b, s);
        CHECK(std::abs(g - std::conj(ddc::lambda_gram(b, a, s))) < 1e-14);
        CHECK(std::abs(ddc::lambda_gram(a, a, s) - cx{1, 0}) < 1e-12);

        const ComplexMatrix v = ddc::random_unitary(d, rng);
        const UnitaryMatrix va{ddc::matmul(v, a.mat())};
        const UnitaryMatrix vb{ddc::matmul(v, b.mat())};
        CHECK(std::abs(ddc::lambda_gram(va, vb, s) - g) < 1e-12);
    }
}

TEST_CASE("uniform spectrum reduces lambda_gram to the plain trace") {
    std::mt19937_64 rng(78);
    const SchmidtSpectrum u3 = SchmidtSpectrum::uniform(3);
    const UnitaryMatrix a{ddc::random_unitary(3, rng)};
    const UnitaryMatrix b{ddc::random_unitary(3, rng)};
    const ComplexMatrix prod = ddc::matmul(ddc::adjoint(a.mat()), b.mat());
    cx tr{0, 0};
    for (std::size_t i = 0; i < 3; ++i) tr += prod(i, i);
    CHECK(std::abs(ddc::lambda_gram(a, b, u3) - tr / 3.0) < 1e-13);
}

TEST_CASE("verify_family reports the worst pair") {
    const UnitaryMatrix eye = UnitaryMatrix::identity(2);
    const UnitaryMatrix x{shift_mat(2)};
    const UnitaryMatrix z{diag2(cx{1, 0}, cx{-1, 0})};
    const UnitaryMatrix xz{ddc::matmul(x.mat(), z.mat())};

    SECTION("a single member has no pairs") {
        const EncodingFamily f(kSkewed, {eye});
        const auto [ok, residual] = ddc::verify_family(f, 1e-12);
        CHECK(ok);
        CHECK(residual == 0.0);
    }
    SECTION("the four d=2 shift/phase products are orthogonal at uniform spectrum") {
        const EncodingFamily f(SchmidtSpectrum::uniform(2), {eye, x, z, xz});
        const auto [ok, residual] = ddc::verify_family(f, 1e-15);
        CHECK(ok);
        CHECK(residual <= 1e-15);
    }
    SECTION("a skewed spectrum breaks the identity/phase pair") {
        const EncodingFamily f(kSkewed, {eye, z});
        const auto [ok, residual] = ddc::verify_family(f, 1e-6);
        CHECK_FALSE(ok);
        CHECK(residual == Catch::Approx(0.4));
    }
}

TEST_CASE("message_state components and norm") {
    const UnitaryMatrix eye = UnitaryMatrix::identity(2);
    const SchmidtSpectrum product({1.0, 0.0});
    const auto flat = ddc::message_state(eye, product);
    CHECK(flat.amplitudes == std::vector<cx>{cx{1, 0}, cx{0, 0}, cx{0, 0}, cx{0, 0}});

    const double r = 1.0 / std::sqrt(2.0);
    const auto bell = ddc::message_state(eye, SchmidtSpectrum::uniform(2));
    CHECK(std::abs(bell.amplitudes[0] - cx{r, 0}) < 1e-15);
    CHECK(std::abs(bell.amplitudes[1]) == 0.0);
    CHECK(std::abs(bell.amplitudes[2]) == 0.0);
    CHECK(std::abs(bell.amplitudes[3] - cx{r, 0}) < 1e-15);

    // shift member populates the (1,0) and (0,1) slots instead
    const auto shifted = ddc::message_state(UnitaryMatrix{shift_mat(2)}, SchmidtSpectrum::uniform(2));
    CHECK(std::abs(shifted.amplitudes[0]) == 0.0);
    CHECK(std::abs(shifted.amplitudes[1] - cx{r, 0}) < 1e-15);
    CHECK(std::abs(shifted.amplitudes[2] - cx{r, 0}) < 1e-15);
    CHECK(std::abs(shifted.amplitudes[3]) == 0.0);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        const auto psi = ddc::message_state(UnitaryMatrix{ddc::random_unitary(3, rng)},
                                            SchmidtSpectrum({0.5, 0.3, 0.2}));
        double norm2 = 0;
        for (const cx& z : psi.amplitudes) norm2 += std::norm(z);
        CHECK(std::sqrt(norm2) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("build_message_columns assembles orthonormal columns") {
    SECTION("single product-state column") {
        const EncodingFamily f(SchmidtSpectrum({1.0, 0.0}), {UnitaryMatrix::identity(2)});
        const ComplexMatrix cols = ddc::build_message_columns(f);
        REQUIRE(cols.rows() == 4);
        REQUIRE(cols.cols() == 1);
        CHECK(cols(0, 0) == cx{1, 0});
    }
    SECTION("full d=2 uniform family gives a unitary matrix of Bell-type columns") {
        const UnitaryMatrix x{shift_mat(2)};
        const UnitaryMatrix z{diag2(cx{1, 0}, cx{-1, 0})};
        const UnitaryMatrix xz{ddc::matmul(x.mat(), z.mat())};
        const EncodingFamily f(SchmidtSpectrum::uniform(2),
                               {UnitaryMatrix::identity(2), x, z, xz});
        const ComplexMatrix cols = ddc::build_message_columns(f);
        CHECK(ddc::unitarity_defect(cols) < 1e-15);
    }
    SECTION("shift powers are orthonormal at any spectrum") {
        const ComplexMatrix x = shift_mat(3);
        const EncodingFamily f(SchmidtSpectrum({0.5, 0.3, 0.2}),
                               {UnitaryMatrix::identity(3), UnitaryMatrix{x},
                                UnitaryMatrix{ddc::matmul(x, x)}});
        const ComplexMatrix cols = ddc::build_message_columns(f);
        REQUIRE(cols.cols() == 3);
        const ComplexMatrix gram = ddc::matmul(ddc::adjoint(cols), cols);
        CHECK(ddc::max_abs_diff(gram, ComplexMatrix::identity(3)) < 1e-15);
    }
    SECTION("a non-orthogonal family is rejected with its residual") {
        const EncodingFamily f(kSkewed, {UnitaryMatrix::identity(2),
                                         UnitaryMatrix{diag2(cx{1, 0}, cx{-1, 0})}});
        try {
            ddc::build_message_columns(f);
            FAIL("expected FamilyNotOrthogonal");
        } catch (const ddc::FamilyNotOrthogonal& e) {
            CHECK(e.residual == Catch::Approx(0.4));
        }
    }
}

TEST_CASE("augment completes to a certified unitary") {
    const UnitaryMatrix eye = UnitaryMatrix::identity(2);
    const UnitaryMatrix x{shift_mat(2)};

    SECTION("square families need no completion") {
        const UnitaryMatrix z{diag2(cx{1, 0}, cx{-1, 0})};
        const UnitaryMatrix xz{ddc::matmul(x.mat(), z.mat())};
        const EncodingFamily f(SchmidtSpectrum::uniform(2), {eye, x, z, xz});
        const auto m = ddc::augment(f);
        CHECK(m.completion_count() == 0);
        CHECK(ddc::unitarity_defect(m.mat()) < 1e-14);
    }
    SECTION("product-state pair gains two completion columns") {
        const EncodingFamily f(SchmidtSpectrum({1.0, 0.0}), {eye, x});
        const auto m = ddc::augment(f);
        CHECK(m.completion_count() == 2);
        CHECK(ddc::unitarity_defect(m.mat()) < 1e-12);
    }
    SECTION("single member gains d^2-1 columns and the result is seed-stable") {
        const EncodingFamily f(SchmidtSpectrum::uniform(2), {eye});
        const auto m1 = ddc::augment(f, 123);
        const auto m2 = ddc::augment(f, 123);
        CHECK(m1.completion_count() == 3);
        CHECK(ddc::max_abs_diff(m1.mat(), m2.mat()) == 0.0);
    }
}

TEST_CASE("completion weights meet the per-level deficit") {
    SECTION("square uniform family: both sides vanish") {
        const UnitaryMatrix eye = UnitaryMatrix::identity(2);
        const UnitaryMatrix x{shift_mat(2)};
        const UnitaryMatrix z{diag2(cx{1, 0}, cx{-1, 0})};
        const UnitaryMatrix xz{ddc::matmul(x.mat(), z.mat())};
        const SchmidtSpectrum u2 = SchmidtSpectrum::uniform(2);
        const EncodingFamily f(u2, {eye, x, z, xz});
        const auto residuals = ddc::completion_deficit_residuals(ddc::augment(f), u2);
        for (double r : residuals) CHECK(r < 1e-12);
    }
    SECTION("lone identity at a product spectrum: deficits 1 and 2") {
        const SchmidtSpectrum product({1.0, 0.0});
        const EncodingFamily f(product, {UnitaryMatrix::identity(2)});
        const auto m = ddc::augment(f);
        double w0 = 0, w1 = 0;
        for (std::size_t b = 0; b < m.completion_count(); ++b)
            for (std::size_t i = 0; i < 2; ++i) {
                w0 += std::norm(m.phi(b, i, 0));
                w1 += std::norm(m.phi(b, i, 1));
            }
        CHECK(w0 == Catch::Approx(1.0).margin(1e-12));
        CHECK(w1 == Catch::Approx(2.0).margin(1e-12));
        const auto residuals = ddc::completion_deficit_residuals(m, product);
        for (double r : residuals) CHECK(r < 1e-9);
    }
}

TEST_CASE("wcsg_feasible thresholds") {
    CHECK(ddc::wcsg_feasible(SchmidtSpectrum({0.75, 0.125, 0.125}), 4));
    CHECK_FALSE(ddc::wcsg_feasible(SchmidtSpectrum({0.61, 0.2, 0.19}), 5));
    CHECK(ddc::wcsg_feasible(SchmidtSpectrum({0.9, 0.1}), 2));
    CHECK_THROWS_AS(ddc::wcsg_feasible(SchmidtSpectrum::uniform(2), 0), ddc::DomainError);
    CHECK_THROWS_AS(ddc::wcsg_feasible(SchmidtSpectrum::uniform(2), 5), ddc::DomainError);
}
