#include "lwo/error.hpp"
#include "lwo/exact_linalg.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace lwo;

TEST_CASE("rational canonical form") {
    Rational a(BigInt(6), BigInt(-4));
    CHECK(a.num() == -3);
    CHECK(a.den() == 2);
    CHECK(a.is_canonical());
    CHECK((a + Rational(3, 2)).is_zero());
    CHECK(Rational::parse("10/4") == Rational(5, 2));
    CHECK(Rational::parse("-7") == Rational(-7));
    CHECK(Rational(5, 2).str() == "5/2");
    CHECK(Rational(4, 2).str() == "2");
    CHECK_THROWS_AS(Rational(BigInt(1), BigInt(0)), DomainError);
    CHECK_THROWS_AS(Rational(1) / Rational(0), DomainError);
    CHECK_THROWS_AS(Rational::parse("1/x"), ParseError);
}

TEST_CASE("rational stays canonical under mixed operations") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> pick(-50, 50);
    for (int i = 0; i < 500; ++i) {
        long d1 = pick(rng);
        long d2 = pick(rng);
        if (d1 == 0 || d2 == 0) {
            continue;
        }
        Rational x(BigInt(pick(rng)), BigInt(d1));
        Rational y(BigInt(pick(rng)), BigInt(d2));
        CHECK((x + y).is_canonical());
        CHECK((x * y).is_canonical());
        CHECK((x - y).is_canonical());
        if (!y.is_zero()) {
            CHECK((x / y).is_canonical());
            CHECK((x / y) * y == x);
        }
    }
}

TEST_CASE("det_exact examples") {
    CHECK(det_exact(IntMatrix::identity(3)) == 1);
    CHECK(det_exact(IntMatrix{{1, 2}, {3, 4}}) == -2);
    CHECK(det_exact(IntMatrix{{1, 2, 3}, {4, 5, 6}, {1, 2, 3}}) == 0);
    CHECK_THROWS_AS(det_exact(IntMatrix(2, 3)), DimensionError);
}

TEST_CASE("rank_exact examples") {
    CHECK(rank_exact(IntMatrix(2, 3)) == 0);
    CHECK(rank_exact(IntMatrix::identity(4)) == 4);
    CHECK(rank_exact(IntMatrix{{1, 2}, {2, 4}}) == 1);
}

TEST_CASE("solve_rational examples") {
    const std::vector<BigInt> b1{BigInt(7), BigInt(-3)};
    auto r1 = solve_rational(IntMatrix::identity(2), b1);
    REQUIRE(std::holds_alternative<std::vector<Rational>>(r1));
    CHECK(std::get<std::vector<Rational>>(r1) == std::vector<Rational>{Rational(7), Rational(-3)});

    const std::vector<BigInt> b2{BigInt(1), BigInt(1)};
    auto r2 = solve_rational(IntMatrix{{2, 0}, {0, 4}}, b2);
    REQUIRE(std::holds_alternative<std::vector<Rational>>(r2));
    CHECK(std::get<std::vector<Rational>>(r2) == std::vector<Rational>{Rational(1, 2), Rational(1, 4)});

    const std::vector<BigInt> b3{BigInt(1), BigInt(3)};
    CHECK(std::holds_alternative<NoSolution>(solve_rational(IntMatrix{{1, 2}, {2, 4}}, b3)));
    const std::vector<BigInt> b4{BigInt(1), BigInt(2)};
    CHECK(std::holds_alternative<Underdetermined>(solve_rational(IntMatrix{{1, 2}, {2, 4}}, b4)));
    CHECK_THROWS_AS(solve_rational(IntMatrix::identity(2), std::vector<BigInt>{BigInt(1)}), DimensionError);
}

TEST_CASE("det, rank and solve agree with the cofactor and Gauss-Jordan oracles") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<long> pick(-4, 4);
    std::uniform_int_distribution<std::size_t> size(1, 5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = size(rng);
        IntMatrix m(n, n);
        std::vector<std::vector<BigInt>> big(n, std::vector<BigInt>(n));
        std::vector<std::vector<Rational>> rat(n, std::vector<Rational>(n));
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                // Sparse low-rank-prone entries.
                const long v = trial % 3 == 0 ? pick(rng) / 3 : pick(rng);
                m(r, c) = v;
                big[r][c] = v;
                rat[r][c] = Rational(v);
            }
        }
        const BigInt det = det_exact(m);
        CHECK(det == oracle::cofactor_det(big));
        CHECK(rank_exact(m) == oracle::rational_rank(rat));

        std::vector<BigInt> b(n);
        for (auto& x : b) {
            x = pick(rng);
        }
        const auto sol = solve_rational(m, b);
        if (sgn(det) != 0) {
            REQUIRE(std::holds_alternative<std::vector<Rational>>(sol));
            const auto& x = std::get<std::vector<Rational>>(sol);
            for (std::size_t r = 0; r < n; ++r) {
                Rational s;
                for (std::size_t c = 0; c < n; ++c) {
                    s += Rational(m(r, c)) * x[c];
                }
                CHECK(s == Rational(b[r]));
            }
        } else {
            CHECK_FALSE(std::holds_alternative<std::vector<Rational>>(sol));
        }
    }
}

TEST_CASE("det_exact on entries far beyond 64 bits") {
    IntMatrix m(3, 3);
    const BigInt big = pow(BigInt(10), 40);
    m(0, 0) = big;
    m(0, 1) = 1;
    m(1, 1) = big;
    m(1, 2) = 2;
    m(2, 0) = 3;
    m(2, 2) = big;
    std::vector<std::vector<BigInt>> o{{big, 1, 0}, {0, big, 2}, {3, 0, big}};
    CHECK(det_exact(m) == oracle::cofactor_det(o));
}
