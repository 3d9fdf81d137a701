#pragma once

// Independent brute-force references used by the unit and acceptance tests.
// None of these call into the library's algorithms beyond the value types.

#include "lwo/bigint.hpp"
#include "lwo/gap.hpp"
#include "lwo/multiset.hpp"
#include "lwo/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using lwo::BigInt;
using lwo::Rational;

// Law of sum eta_i v_i by walking all 3^n outcome patterns with integer
// weights (1 - mu) -> 2(q - p), +-1 -> p over (2q)^n.
inline std::map<std::int64_t, Rational> walk_law(const std::vector<std::int64_t>& v, const Rational& mu) {
    const BigInt p = mu.num();
    const BigInt q = mu.den();
    const BigInt rest = 2 * (q - p);
    std::map<std::int64_t, BigInt> weight;
    const std::size_t n = v.size();
    std::vector<int> eta(n, -1);
    for (;;) {
        std::int64_t sum = 0;
        BigInt w = 1;
        for (std::size_t i = 0; i < n; ++i) {
            sum += eta[i] * v[i];
            w *= eta[i] == 0 ? rest : p;
        }
        if (sgn(w) != 0) {
            weight[sum] += w;
        }
        std::size_t j = 0;
        while (j < n && eta[j] == 1) {
            eta[j] = -1;
            ++j;
        }
        if (j == n) {
            break;
        }
        ++eta[j];
    }
    BigInt denom = 1;
    for (std::size_t i = 0; i < n; ++i) {
        denom *= 2 * q;
    }
    std::map<std::int64_t, Rational> out;
    for (const auto& [a, w] : weight) {
        out.emplace(a, Rational(w, denom));
    }
    return out;
}

inline Rational max_atom(const std::map<std::int64_t, Rational>& law) {
    Rational best(0);
    for (const auto& [a, p] : law) {
        if (p > best) {
            best = p;
        }
    }
    return best;
}

// Laplace expansion along the first row.
inline BigInt cofactor_det(const std::vector<std::vector<BigInt>>& a) {
    const std::size_t n = a.size();
    if (n == 0) {
        return 1;
    }
    if (n == 1) {
        return a[0][0];
    }
    BigInt det;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<BigInt>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<BigInt> row;
            for (std::size_t k = 0; k < n; ++k) {
                if (k != c) {
                    row.push_back(a[r][k]);
                }
            }
            minor.push_back(std::move(row));
        }
        const BigInt term = a[0][c] * cofactor_det(minor);
        det += (c % 2 == 0) ? term : BigInt(-term);
    }
    return det;
}

// Rank by Gauss-Jordan elimination over exact rationals.
inline std::size_t rational_rank(std::vector<std::vector<Rational>> a) {
    std::size_t rank = 0;
    const std::size_t rows = a.size();
    const std::size_t cols = rows == 0 ? 0 : a[0].size();
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t piv = rank;
        while (piv < rows && a[piv][c].is_zero()) {
            ++piv;
        }
        if (piv == rows) {
            continue;
        }
        std::swap(a[piv], a[rank]);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r != rank && !a[r][c].is_zero()) {
                const Rational f = a[r][c] / a[rank][c];
                for (std::size_t k = c; k < cols; ++k) {
                    a[r][k] -= f * a[rank][k];
                }
            }
        }
        ++rank;
    }
    return rank;
}

// Every box point of g with its image.
inline std::vector<std::pair<std::vector<std::int64_t>, Rational>> gap_points(const lwo::Gap& g) {
    std::vector<std::pair<std::vector<std::int64_t>, Rational>> out;
    std::vector<std::int64_t> m = g.lower();
    for (;;) {
        Rational x = g.offset();
        for (std::size_t i = 0; i < m.size(); ++i) {
            x += g.generators()[i] * Rational(m[i]);
        }
        out.emplace_back(m, x);
        std::size_t j = 0;
        while (j < m.size() && m[j] == g.upper()[j]) {
            m[j] = g.lower()[j];
            ++j;
        }
        if (j == m.size()) {
            break;
        }
        ++m[j];
    }
    return out;
}

inline bool gap_member(const lwo::Gap& g, const Rational& x) {
    for (const auto& [m, y] : gap_points(g)) {
        if (y == x) {
            return true;
        }
    }
    return false;
}

// Nontrivial relation sum m_i w_i = 0 with |m_i| <= k, by full enumeration.
inline bool has_relation(const std::vector<std::int64_t>& w, std::int64_t k) {
    const std::size_t r = w.size();
    std::vector<std::int64_t> m(r, -k);
    if (r == 0) {
        return false;
    }
    for (;;) {
        std::int64_t s = 0;
        bool nonzero = false;
        for (std::size_t i = 0; i < r; ++i) {
            s += m[i] * w[i];
            nonzero = nonzero || m[i] != 0;
        }
        if (nonzero && s == 0) {
            return true;
        }
        std::size_t j = 0;
        while (j < r && m[j] == k) {
            m[j] = -k;
            ++j;
        }
        if (j == r) {
            return false;
        }
        ++m[j];
    }
}

inline lwo::Multiset multiset(const std::vector<std::int64_t>& v) {
    lwo::Multiset m;
    for (auto x : v) {
        m.add(lwo::from_i64(x));
    }
    return m;
}

// Exact P(singular) by walking all 3^(n^2) patterns with integer weights.
inline Rational singularity_oracle(std::size_t n, const Rational& mu) {
    const BigInt p = mu.num();
    const BigInt q = mu.den();
    const BigInt zero_w = 2 * (q - p);
    const std::size_t cells = n * n;
    std::vector<int> e(cells, -1);
    BigInt singular;
    BigInt total;
    for (;;) {
        BigInt w = 1;
        std::vector<std::vector<BigInt>> a(n, std::vector<BigInt>(n));
        for (std::size_t i = 0; i < cells; ++i) {
            a[i / n][i % n] = e[i];
            w *= e[i] == 0 ? zero_w : p;
        }
        total += w;
        if (cofactor_det(a) == 0) {
            singular += w;
        }
        std::size_t j = 0;
        while (j < cells && e[j] == 1) {
            e[j] = -1;
            ++j;
        }
        if (j == cells) {
            break;
        }
        ++e[j];
    }
    return Rational(singular, total);
}

}  // namespace oracle
