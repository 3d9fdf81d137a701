#include "lwo/error.hpp"
#include "lwo/gap.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace lwo;

namespace {

std::vector<BigInt> ints(std::initializer_list<std::int64_t> xs) {
    std::vector<BigInt> out;
    for (auto x : xs) {
        out.push_back(from_i64(x));
    }
    return out;
}

Gap random_gap(std::mt19937_64& rng, std::size_t rank, std::int64_t gen_range, std::int64_t bound_range,
               bool rational = false) {
    std::uniform_int_distribution<std::int64_t> gen(-gen_range, gen_range);
    std::uniform_int_distribution<std::int64_t> lo(-bound_range, 0);
    std::uniform_int_distribution<std::int64_t> len(0, bound_range);
    std::uniform_int_distribution<std::int64_t> den(1, 4);
    std::vector<Rational> gens;
    std::vector<std::int64_t> lower;
    std::vector<std::int64_t> upper;
    for (std::size_t i = 0; i < rank; ++i) {
        gens.push_back(rational ? Rational(from_i64(gen(rng)), from_i64(den(rng))) : Rational(gen(rng)));
        lower.push_back(lo(rng));
        upper.push_back(lower.back() + len(rng));
    }
    const Rational c = rational ? Rational(from_i64(gen(rng)), from_i64(den(rng))) : Rational(gen(rng) / 3);
    return Gap(c, gens, lower, upper);
}

}  // namespace

TEST_CASE("gap construction and volume") {
    CHECK(Gap::singleton(Rational(5)).volume() == 1);
    CHECK(Gap::q(ints({4, 9}), 3).volume() == 49);
    CHECK(Gap(Rational(0), {Rational(1), Rational(7)}, {-2, 0}, {2, 1}).volume() == 10);
    CHECK(Gap::q(ints({4, 9}), 3).is_symmetric());
    CHECK_FALSE(Gap(Rational(0), {Rational(1)}, {-1}, {2}).is_symmetric());
    CHECK_FALSE(Gap(Rational(1), {Rational(1)}, {-1}, {1}).is_symmetric());
    CHECK_THROWS_AS(Gap(Rational(0), {Rational(1)}, {2}, {1}), DomainError);
    CHECK_THROWS_AS(Gap(Rational(0), {Rational(1)}, {0, 1}, {1, 1}), DimensionError);
    CHECK(Gap(Rational(1), {Rational(3), Rational(-2)}, {-1, 0}, {2, 4}).max_abs() == Rational(10));
}

TEST_CASE("contains examples") {
    const Gap g = Gap::symmetric({Rational(3), Rational(10)}, {2, 1});
    auto w = contains(g, Rational(7));
    REQUIRE(w);
    CHECK(w->coefficients == std::vector<std::int64_t>{-1, 1});
    CHECK_FALSE(contains(g, Rational(1, 2)));
    const Gap h(Rational(2, 3), {Rational(5), Rational(-1, 2)}, {-3, 1}, {4, 6});
    auto z = contains(h, Rational(2, 3) + Rational(5) * 0 + Rational(-1, 2) * 1);
    REQUIRE(z);
    CHECK(check_witness(h, *z, h.evaluate(z->coefficients)));
    auto off = contains(g, Rational(0));
    REQUIRE(off);
    CHECK(off->coefficients == std::vector<std::int64_t>{0, 0});
    CHECK(contains(Gap::singleton(Rational(4)), Rational(4)));
    CHECK_FALSE(contains(Gap::singleton(Rational(4)), Rational(3)));
}

TEST_CASE("contains agrees with enumeration on small gaps") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 150; ++it) {
        const std::size_t rank = 1 + rng() % 4;
        const Gap g = random_gap(rng, rank, 12, 4, it % 3 == 0);
        if (g.volume() > 10000) {
            continue;
        }
        std::set<Rational> values;
        for (const auto& [m, x] : oracle::gap_points(g)) {
            values.insert(x);
        }
        GapSearcher s(g);
        const Rational lo = -g.max_abs() - 2;
        for (Rational x = lo; x <= -lo; x += Rational(1, 2)) {
            auto w = s.find(x);
            REQUIRE(w.has_value() == values.contains(x));
            if (w) {
                CHECK(check_witness(g, *w, x));
            }
        }
    }
}

TEST_CASE("meet-in-the-middle search on large boxes") {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 12; ++it) {
        const Gap g = random_gap(rng, 4, 400, 30);
        if (g.volume() <= 10000) {
            continue;
        }
        GapSearcher s(g);
        std::uniform_int_distribution<std::int64_t> pick(0, 1);
        for (int q = 0; q < 30; ++q) {
            std::vector<std::int64_t> m(g.rank());
            for (std::size_t i = 0; i < g.rank(); ++i) {
                m[i] = std::uniform_int_distribution<std::int64_t>(g.lower()[i], g.upper()[i])(rng);
            }
            const Rational x = g.evaluate(m) + Rational(pick(rng) ? 0 : 1, 2);
            auto w = s.find(x);
            if (x.is_integer()) {
                REQUIRE(w);
            }
            if (w) {
                CHECK(check_witness(g, *w, x));
            }
        }
    }
    // negative answers cross-checked by enumeration at moderate volume
    const Gap g = Gap::symmetric({Rational(37), Rational(101), Rational(1009)}, {20, 15, 6});
    std::set<Rational> values;
    for (const auto& [m, x] : oracle::gap_points(g)) {
        values.insert(x);
    }
    GapSearcher s(g);
    for (std::int64_t x = -3000; x <= 3000; x += 7) {
        CHECK(s.find(Rational(x)).has_value() == values.contains(Rational(x)));
    }
}

TEST_CASE("big generators use exact arithmetic") {
    const BigInt big = pow(BigInt(10), 40);
    const Gap g = Gap::symmetric({Rational(big), Rational(BigInt(big + 1)), Rational(3)}, {50, 50, 50});
    const Rational x = Rational(big) * 17 + Rational(BigInt(big + 1)) * (-9) + Rational(3) * 2;
    auto w = contains(g, x);
    REQUIRE(w);
    CHECK(check_witness(g, *w, x));
    CHECK_FALSE(contains(g, Rational(big) * 101));
}

TEST_CASE("resource cap on enumeration") {
    SearchLimits tight;
    tight.max_states = 1000;
    tight.max_stored = 1000;
    const Gap g = Gap::symmetric({Rational(1), Rational(1000), Rational(1000000), Rational(7)}, {100, 100, 100, 100});
    CHECK_THROWS_AS(is_proper(g, tight), ResourceError);
    SearchLimits rank;
    rank.max_rank = 2;
    CHECK_THROWS_AS(contains(g, Rational(0), rank), ResourceError);
}

TEST_CASE("is_proper examples and oracle") {
    CHECK(is_proper(Gap::q(ints({1, 3}), 1)).proper);
    auto r = is_proper(Gap::q(ints({1, 2}), 1));
    REQUIRE_FALSE(r.proper);
    REQUIRE(r.collision);
    CHECK(r.collision->first == std::vector<std::int64_t>{1, 0});
    CHECK(r.collision->second == std::vector<std::int64_t>{-1, 1});
    CHECK(is_proper(Gap::singleton(Rational(3))).proper);

    std::mt19937_64 rng(3);
    for (int it = 0; it < 100; ++it) {
        const Gap g = random_gap(rng, 1 + rng() % 3, 9, 3);
        std::set<Rational> values;
        const auto pts = oracle::gap_points(g);
        for (const auto& [m, x] : pts) {
            values.insert(x);
        }
        auto p = is_proper(g);
        CHECK(p.proper == (values.size() == pts.size()));
        if (!p.proper) {
            REQUIRE(p.collision);
            CHECK(p.collision->first != p.collision->second);
            CHECK(g.in_box(p.collision->first));
            CHECK(g.in_box(p.collision->second));
            CHECK(g.evaluate(p.collision->first) == g.evaluate(p.collision->second));
        }
    }
}

TEST_CASE("sums and dilates") {
    const Gap s = minkowski_sum(Gap::q(ints({2}), 1), Gap::q(ints({3}), 1));
    CHECK(s.rank() == 2);
    CHECK(s.generators() == std::vector<Rational>{Rational(2), Rational(3)});
    CHECK(s.lower() == std::vector<std::int64_t>{-1, -1});
    CHECK(s.upper() == std::vector<std::int64_t>{1, 1});
    const Gap g(Rational(1, 3), {Rational(4)}, {-1}, {5});
    CHECK(minkowski_sum(g, Gap::singleton(Rational(0))) == g);
    for (std::int64_t k = 1; k <= 5; ++k) {
        const Gap kk = minkowski_sum(Gap::q(ints({1}), k), Gap::q(ints({1}), k));
        std::set<Rational> values;
        for (const auto& [m, x] : oracle::gap_points(kk)) {
            values.insert(x);
        }
        CHECK(values.size() == static_cast<std::size_t>(4 * k + 1));
        CHECK(*values.begin() == Rational(-2 * k));
        CHECK(*values.rbegin() == Rational(2 * k));
    }
    CHECK(scalar_dilate(Gap::q(ints({2}), 4), Rational(1, 2)) == Gap::q(ints({1}), 4));
    CHECK(scalar_dilate(g, Rational(1)) == g);
    const Gap sym = Gap::symmetric({Rational(3), Rational(5, 2)}, {2, 3});
    auto vals = [](const Gap& x) {
        std::set<Rational> out;
        for (const auto& [m, y] : oracle::gap_points(x)) {
            out.insert(y);
        }
        return out;
    };
    CHECK(vals(scalar_dilate(sym, Rational(-1))) == vals(sym));
    const Gap two = iterated_sum(sym, 2);
    CHECK(two.upper() == std::vector<std::int64_t>{4, 6});
    CHECK(iterated_sum(g, 3).offset() == Rational(1));
}

TEST_CASE("sumset soundness") {
    std::mt19937_64 rng(17);
    for (int it = 0; it < 60; ++it) {
        const Gap a = random_gap(rng, 1 + rng() % 2, 20, 4, true);
        const Gap b = random_gap(rng, 1 + rng() % 2, 20, 4, true);
        const Gap s = minkowski_sum(a, b);
        GapSearcher search(s);
        const auto pa = oracle::gap_points(a);
        const auto pb = oracle::gap_points(b);
        for (int q = 0; q < 10; ++q) {
            const Rational x = pa[rng() % pa.size()].second + pb[rng() % pb.size()].second;
            auto w = search.find(x);
            REQUIRE(w);
            CHECK(check_witness(s, *w, x));
        }
    }
}

TEST_CASE("cube_contains") {
    auto e = cube_contains(ints({1, 2}), BigInt(3));
    REQUIRE(e);
    CHECK(*e == std::vector<int>{1, 1});
    CHECK_FALSE(cube_contains(ints({1, 2}), BigInt(0)));
    auto f = cube_contains(ints({5}), BigInt(-5));
    REQUIRE(f);
    CHECK(*f == std::vector<int>{-1});
    CHECK(cube_contains({}, BigInt(0)));
    CHECK_FALSE(cube_contains({}, BigInt(1)));
    std::vector<BigInt> many(31, BigInt(1));
    CHECK_THROWS_AS(cube_contains(many, BigInt(1)), DimensionError);

    std::mt19937_64 rng(23);
    for (int it = 0; it < 40; ++it) {
        const std::size_t r = 1 + rng() % 12;
        std::vector<std::int64_t> w(r);
        for (auto& x : w) {
            x = static_cast<std::int64_t>(rng() % 200) - 100;
        }
        std::set<std::int64_t> sums;
        for (std::uint64_t mask = 0; mask < (1ULL << r); ++mask) {
            std::int64_t s = 0;
            for (std::size_t i = 0; i < r; ++i) {
                s += (mask >> i & 1) ? w[i] : -w[i];
            }
            sums.insert(s);
        }
        std::vector<BigInt> bw;
        for (auto x : w) {
            bw.push_back(from_i64(x));
        }
        for (std::int64_t x = -300; x <= 300; x += 3) {
            auto sgn = cube_contains(bw, from_i64(x));
            REQUIRE(sgn.has_value() == sums.contains(x));
            if (sgn) {
                std::int64_t s = 0;
                for (std::size_t i = 0; i < r; ++i) {
                    s += (*sgn)[i] * w[i];
                }
                CHECK(s == x);
            }
        }
    }
}

TEST_CASE("torsion") {
    auto t = torsion(Rational(3), Gap::q(ints({2}), 5), 10);
    REQUIRE(t.finite());
    CHECK(*t.tau == 2);
    REQUIRE(t.witness);
    CHECK(t.witness->coefficients == std::vector<std::int64_t>{3});
    CHECK_FALSE(torsion(Rational(1), Gap::singleton(Rational(0)), 50).finite());
    auto one = torsion(Rational(4), Gap::q(ints({2}), 5), 3);
    REQUIRE(one.finite());
    CHECK(*one.tau == 1);
    CHECK_THROWS_AS(torsion(Rational(1), Gap::q(ints({2}), 5), 0), DomainError);

    std::mt19937_64 rng(29);
    for (int it = 0; it < 80; ++it) {
        const Gap g = random_gap(rng, 1 + rng() % 3, 15, 3);
        const Rational x(from_i64(static_cast<std::int64_t>(rng() % 21) - 10), from_i64(1 + rng() % 3));
        auto r = torsion(x, g, 12);
        for (std::uint64_t tau = 1; tau <= (r.finite() ? *r.tau - 1 : 12); ++tau) {
            CHECK_FALSE(oracle::gap_member(g, x * Rational(static_cast<long>(tau))));
        }
        if (r.finite()) {
            REQUIRE(r.witness);
            CHECK(check_witness(g, *r.witness, x * Rational(static_cast<long>(*r.tau))));
        }
    }
}

TEST_CASE("k-dissociation") {
    auto a = is_k_dissociated(ints({1, 1}), 1);
    REQUIRE_FALSE(a.dissociated);
    REQUIRE(a.witness);
    CHECK(a.witness->coefficients == std::vector<std::int64_t>{1, -1});
    CHECK(is_k_dissociated(ints({1, 2}), 1).dissociated);
    auto b = is_k_dissociated(ints({1, 2}), 2);
    REQUIRE_FALSE(b.dissociated);
    CHECK(b.witness->coefficients == std::vector<std::int64_t>{2, -1});
    CHECK(is_k_dissociated({}, 3).dissociated);
    CHECK_FALSE(is_k_dissociated(ints({0, 5}), 1).dissociated);
    CHECK_THROWS_AS(is_k_dissociated(ints({1, 100, 10000, 1000000, 7, 9, 11, 13, 17, 19}), 50, 1000), ResourceError);

    std::mt19937_64 rng(31);
    for (int it = 0; it < 300; ++it) {
        const std::size_t r = 1 + rng() % 4;
        const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 4);
        std::vector<std::int64_t> w(r);
        for (auto& x : w) {
            x = static_cast<std::int64_t>(rng() % 41) - 20;
        }
        std::vector<BigInt> bw;
        for (auto x : w) {
            bw.push_back(from_i64(x));
        }
        auto d = is_k_dissociated(bw, k);
        REQUIRE(d.dissociated == !oracle::has_relation(w, k));
        if (!d.dissociated) {
            REQUIRE(d.witness);
            std::int64_t s = 0;
            bool nonzero = false;
            for (std::size_t i = 0; i < r; ++i) {
                CHECK(std::abs(d.witness->coefficients[i]) <= k);
                s += d.witness->coefficients[i] * w[i];
                nonzero = nonzero || d.witness->coefficients[i] != 0;
            }
            CHECK(s == 0);
            CHECK(nonzero);
        }
    }
}

TEST_CASE("dilate coverage") {
    auto all = dilate_coverage(oracle::multiset({1, 2, 3}), ints({1}), 3);
    CHECK(all.covered == 3);
    CHECK(all.exceptional == 0);
    for (const auto& e : all.entries) {
        REQUIRE(e.tau);
        CHECK(*e.tau == 1);
    }
    auto ex = dilate_coverage(oracle::multiset({10}), ints({1}), 3);
    CHECK(ex.exceptional == 1);
    CHECK_FALSE(ex.entries.at(0).tau);
    auto empty = dilate_coverage(Multiset{}, ints({1}), 3);
    CHECK(empty.entries.empty());
    CHECK(empty.exceptional == 0);
    auto mult = dilate_coverage(oracle::multiset({5, 5, 5, 1, 100}), ints({2}), 6);
    CHECK(mult.covered == 4);
    CHECK(mult.exceptional == 1);
    for (const auto& e : mult.entries) {
        if (e.value == 5) {
            CHECK(e.multiplicity == 3);
            CHECK(*e.tau == 2);
        }
    }
}

TEST_CASE("sumset-of-torsion lemma") {
    // Q(w,L) + Q(v,L') sits inside (1/tau) Q(w, L(L'+tau)) when v has torsion tau against Q(w,L).
    std::mt19937_64 rng(37);
    int checked = 0;
    for (int it = 0; it < 200 && checked < 60; ++it) {
        const std::size_t r = 1 + rng() % 2;
        std::vector<BigInt> w;
        for (std::size_t i = 0; i < r; ++i) {
            w.push_back(from_i64(1 + static_cast<std::int64_t>(rng() % 30)));
        }
        const std::int64_t l = 1 + static_cast<std::int64_t>(rng() % 4);
        const std::int64_t lp = 1 + static_cast<std::int64_t>(rng() % 4);
        const BigInt v = from_i64(1 + static_cast<std::int64_t>(rng() % 40));
        const Gap qw = Gap::q(w, l);
        auto t = torsion(Rational(v), qw, 20);
        if (!t.finite()) {
            continue;
        }
        ++checked;
        const auto tau = static_cast<std::int64_t>(*t.tau);
        const Gap sum = minkowski_sum(qw, Gap::q({v}, lp));
        const Gap target = scalar_dilate(Gap::q(w, l * (lp + tau)), Rational(1, static_cast<int>(tau)));
        GapSearcher search(target);
        const auto pts = oracle::gap_points(sum);
        for (int q = 0; q < 25; ++q) {
            const Rational x = pts[rng() % pts.size()].second;
            CHECK(search.find(x).has_value());
        }
    }
    CHECK(checked >= 30);
}

TEST_CASE("lacunary lemma at desk scale") {
    // Cramer's rule gives a relation with coefficients bounded by d! V, so the
    // ratio between consecutive sorted magnitudes is at most d * d! * V.
    std::mt19937_64 rng(41);
    for (std::size_t d = 1; d <= 3; ++d) {
        const double c_bound = static_cast<double>(d) * (d == 1 ? 1 : d == 2 ? 2 : 6);
        double c_found = 0;
        for (int it = 0; it < 200; ++it) {
            std::vector<Rational> gens;
            std::vector<std::int64_t> bounds;
            std::int64_t scale = 1;
            for (std::size_t i = 0; i < d; ++i) {
                // lacunary generators are the hard case
                scale *= 1 + static_cast<std::int64_t>(rng() % 400);
                gens.push_back(Rational(scale));
                bounds.push_back(1 + static_cast<std::int64_t>(rng() % 3));
            }
            const Gap g = Gap::symmetric(gens, bounds);
            const double vol = g.volume().get_d();
            const auto pts = oracle::gap_points(g);
            std::vector<Rational> nonzero;
            for (const auto& [m, x] : pts) {
                if (!x.is_zero()) {
                    nonzero.push_back(x.abs());
                }
            }
            if (nonzero.empty()) {
                continue;
            }
            for (int s = 0; s < 20; ++s) {
                std::vector<double> xs;
                for (std::size_t i = 0; i <= d; ++i) {
                    xs.push_back(nonzero[rng() % nonzero.size()].to_double());
                }
                std::sort(xs.begin(), xs.end());
                double best = 1e300;
                for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
                    best = std::min(best, xs[i + 1] / xs[i]);
                }
                c_found = std::max(c_found, best / vol);
            }
        }
        INFO("d = " << d << ", C_d found " << c_found);
        CHECK(c_found <= c_bound);
    }
}

TEST_CASE("min nonzero linear value") {
    const Gap g = Gap::symmetric({Rational(10), Rational(7)}, {3, 3});
    CHECK(*min_nonzero_abs_linear(g) == Rational(1));
    CHECK_FALSE(min_nonzero_abs_linear(Gap::singleton(Rational(4))));
    CHECK_FALSE(min_nonzero_abs_linear(Gap::symmetric({Rational(0)}, {5})));
    std::mt19937_64 rng(43);
    for (int it = 0; it < 60; ++it) {
        const Gap h = random_gap(rng, 1 + rng() % 3, 500, 6, it % 2 == 0);
        std::optional<Rational> best;
        for (const auto& [m, x] : oracle::gap_points(h)) {
            const Rational y = (x - h.offset()).abs();
            if (!y.is_zero() && (!best || y < *best)) {
                best = y;
            }
        }
        auto got = min_nonzero_abs_linear(h);
        REQUIRE(got.has_value() == best.has_value());
        if (got) {
            CHECK(*got == *best);
        }
    }
}

TEST_CASE("enumerate values") {
    const Gap g(Rational(1), {Rational(2)}, {0}, {2});
    CHECK(enumerate_values(g) == std::vector<Rational>{Rational(1), Rational(3), Rational(5)});
}

TEST_CASE("small nonzero values by lattice enumeration") {
    std::mt19937_64 rng(47);
    for (int it = 0; it < 150; ++it) {
        const std::size_t r = 1 + rng() % 4;
        std::vector<Rational> gens;
        std::vector<std::int64_t> bounds;
        for (std::size_t i = 0; i < r; ++i) {
            const long num = static_cast<long>(rng() % 2001) - 1000;
            gens.push_back(it % 3 == 0 ? Rational(num, static_cast<long>(1 + rng() % 6)) : Rational(num));
            bounds.push_back(static_cast<std::int64_t>(rng() % 4));
        }
        const Gap g = Gap::symmetric(gens, bounds);
        std::optional<Rational> best;
        for (const auto& [m, x] : oracle::gap_points(g)) {
            if (!x.is_zero() && (!best || x.abs() < *best)) {
                best = x.abs();
            }
        }
        const Rational T(static_cast<long>(1 + rng() % 300), static_cast<long>(1 + rng() % 3));
        const auto got = small_nonzero_value(g, T);
        INFO("iteration " << it);
        CHECK(got.has_value() == (best && *best < T));
        if (got) {
            Rational y;
            for (std::size_t i = 0; i < r; ++i) {
                CHECK(std::abs((*got)[i]) <= bounds[i]);
                y += gens[i] * Rational((*got)[i]);
            }
            CHECK_FALSE(y.is_zero());
            CHECK(y.abs() < T);
        }
    }
    CHECK_FALSE(small_nonzero_value(Gap::symmetric({Rational(5)}, {3}), Rational(5)));
    CHECK(small_nonzero_value(Gap::symmetric({Rational(5)}, {3}), Rational(6)));
    CHECK_THROWS_AS(small_nonzero_value(Gap(Rational(0), {Rational(1)}, {0}, {2}), Rational(1)), DomainError);
}

TEST_CASE("small nonzero values in boxes beyond enumeration") {
    // 3 x + 5 y takes the value 1 at (2, -1), far inside a huge box
    const std::int64_t H = 1'000'000'000;
    const Gap g = Gap::symmetric({Rational(from_i64(3'000'000'000)), Rational(from_i64(5'000'000'000))}, {H, H});
    CHECK_FALSE(small_nonzero_value(g, Rational(1'000'000'000)));
    const auto hit = small_nonzero_value(g, Rational(1'000'000'001));
    REQUIRE(hit);
    CHECK(std::abs(3 * (*hit)[0] + 5 * (*hit)[1]) == 1);
    // generic 40-bit generators: x a + y b + z c < 10^6 has solutions with |m| <= 10^5
    const Gap h = Gap::symmetric({Rational(from_i64(1099511627791)), Rational(from_i64(1099511627833)), Rational(from_i64(824633720831))},
                                 {100000, 100000, 100000});
    const auto small = small_nonzero_value(h, Rational(1000000));
    REQUIRE(small);
    CHECK(std::abs((*small)[0]) <= 100000);
    // a one-dimensional box has no value below its generator
    CHECK_FALSE(small_nonzero_value(Gap::symmetric({Rational(7)}, {H}), Rational(7)));
}
