#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "parisi/errors.hpp"
#include "test_util.hpp"

using namespace parisi;

TEST_CASE("frobenius inner product") {
    const SymMat id2 = SymMat::identity(2);
    CHECK(dot(id2, id2) == doctest::Approx(2.0));
    CHECK(dot(id2, SymMat::all_ones(2)) == doctest::Approx(2.0));

    SymMat a(2);
    a.at(0, 0) = 2; a.at(1, 0) = 1; a.at(1, 1) = 3;
    CHECK(dot(a, id2) == doctest::Approx(5.0));

    CHECK_THROWS_AS(dot(id2, SymMat::identity(3)), ValidationError);
}

TEST_CASE("psd predicate") {
    CHECK(is_psd(SymMat::identity(2), 0.0));
    const double d[] = {1.0, -1.0};
    CHECK_FALSE(is_psd(SymMat::diagonal(d), 1e-12));

    // D Id - AllOnes has spectrum {0, D, ..., D}
    const int D = 3;
    const SymMat m = double(D) * SymMat::identity(D) - SymMat::all_ones(D);
    const SymEigen eig = eigen_sym(m);
    CHECK(std::abs(eig.values[0]) <= 1e-12);
    CHECK(eig.values[1] == doctest::Approx(3.0));
    CHECK(eig.values[2] == doctest::Approx(3.0));
    CHECK(is_psd(m, 1e-12));

    CHECK_THROWS_AS(is_psd(SymMat::identity(2), -1.0), ValidationError);
}

TEST_CASE("psd square root") {
    const SymMat r3 = sqrt_psd(SymMat::identity(3));
    CHECK((r3 - SymMat::identity(3)).frobenius_norm() < 1e-14);

    const double d[] = {4.0, 9.0};
    const SymMat rd = sqrt_psd(SymMat::diagonal(d));
    CHECK(rd(0, 0) == doctest::Approx(2.0));
    CHECK(rd(1, 1) == doctest::Approx(3.0));
    CHECK(std::abs(rd(1, 0)) <= 1e-14);

    // [[2,1],[1,2]]: eigenvalues 1 and 3 on (1,-1)/sqrt2 and (1,1)/sqrt2,
    // so the root is ((sqrt3+1) Id + (sqrt3-1) (AllOnes - Id)) / 2
    SymMat a(2);
    a.at(0, 0) = 2; a.at(1, 0) = 1; a.at(1, 1) = 2;
    const SymMat r = sqrt_psd(a);
    const double s3 = std::sqrt(3.0);
    CHECK(r(0, 0) == doctest::Approx((s3 + 1.0) / 2.0));
    CHECK(r(1, 1) == doctest::Approx((s3 + 1.0) / 2.0));
    CHECK(r(1, 0) == doctest::Approx((s3 - 1.0) / 2.0));

    CHECK_THROWS_AS(sqrt_psd(-1.0 * SymMat::identity(2)), NumericError);
}

TEST_CASE("loewner order") {
    CHECK(loewner_leq(SymMat(2), SymMat::identity(2), 0.0));
    CHECK_FALSE(loewner_leq(SymMat::identity(2), SymMat(2), 1e-12));

    SymMat a(2);
    a.at(0, 0) = 2; a.at(1, 0) = 1; a.at(1, 1) = 3;
    CHECK(loewner_leq(a, std::sqrt(2.0) * a.frobenius_norm() * SymMat::identity(2), 1e-10));
}

TEST_CASE("square root reconstructs random psd matrices") {
    Rng rng(11);
    for (int it = 0; it < 200; ++it) {
        const int dim = 1 + static_cast<int>(rng.uniform() * 4);
        const SymMat a = testutil::random_psd(rng, dim);
        const SymMat r = sqrt_psd(a);
        CHECK(is_psd(r, 1e-10));
        CHECK((r.square() - a).frobenius_norm() <= 1e-10 * (1.0 + a.frobenius_norm()));
    }
}

TEST_CASE("spectral dominance by the frobenius norm") {
    Rng rng(12);
    for (int it = 0; it < 1000; ++it) {
        const int dim = 1 + static_cast<int>(rng.uniform() * 3);
        const SymMat a = testutil::random_sym(rng, dim);
        CHECK(loewner_leq(a, std::sqrt(double(dim)) * a.frobenius_norm() * SymMat::identity(dim),
                          1e-10));
    }
}

TEST_CASE("psd cone is self-dual under the pairing") {
    Rng rng(13);
    for (int it = 0; it < 300; ++it) {
        const int dim = 1 + static_cast<int>(rng.uniform() * 3);
        CHECK(dot(testutil::random_psd(rng, dim), testutil::random_psd(rng, dim)) >= -1e-12);
    }
}

TEST_CASE("jacobi eigenvectors are orthonormal") {
    Rng rng(14);
    for (int it = 0; it < 50; ++it) {
        const int dim = 2 + static_cast<int>(rng.uniform() * 7);
        const SymMat a = testutil::random_sym(rng, dim);
        const SymEigen eig = eigen_sym(a);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j <= i; ++j) {
                double acc = 0.0;
                for (int r = 0; r < dim; ++r) acc += eig.vector(r, i) * eig.vector(r, j);
                CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) <= 1e-12);
            }
        // reconstruction
        SymMat rec(dim);
        for (int k = 0; k < dim; ++k)
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j <= i; ++j)
                    rec.at(i, j) += eig.values[k] * eig.vector(i, k) * eig.vector(j, k);
        CHECK((rec - a).frobenius_norm() < 1e-11 * (1.0 + a.frobenius_norm()));
    }
}

TEST_CASE("dimension cap") {
    CHECK_THROWS_AS(SymMat(9), ValidationError);
    CHECK_THROWS_AS(SymMat(0), ValidationError);
}
