#include "lwo/error.hpp"
#include "lwo/gap.hpp"

namespace lwo {

namespace {

using Vec = std::vector<mpq_class>;
using IVec = std::vector<mpz_class>;

mpq_class dot(const Vec& a, const Vec& b) {
    mpq_class s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

mpz_class floor_q(const mpq_class& q) {
    mpz_class out;
    mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return out;
}

mpz_class round_q(const mpq_class& q) { return floor_q(q + mpq_class(1, 2)); }

void axpy(IVec& y, const mpz_class& q, const IVec& x) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] -= q * x[i];
    }
}

// Coefficient vectors m live in Z^r; the metric is that of
// (m_i / H_i, value(m) / T).
struct Metric {
    std::vector<std::int64_t> H;
    IVec a;  // integer generators
    mpq_class T;

    Vec embed(const IVec& m) const {
        Vec v(H.size() + 1);
        mpz_class value = 0;
        for (std::size_t i = 0; i < H.size(); ++i) {
            v[i] = mpq_class(m[i], H[i]);
            value += m[i] * a[i];
        }
        v.back() = mpq_class(value) / T;
        return v;
    }
};

struct Gso {
    std::vector<Vec> mu;
    std::vector<mpq_class> norm;  // |b*_i|^2
};

Gso gram_schmidt(const std::vector<IVec>& rows, const Metric& metric) {
    const std::size_t r = rows.size();
    Gso g{std::vector<Vec>(r, Vec(r)), std::vector<mpq_class>(r)};
    std::vector<Vec> b;
    for (const auto& m : rows) {
        b.push_back(metric.embed(m));
    }
    std::vector<Vec> star(b);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            g.mu[i][j] = dot(b[i], star[j]) / g.norm[j];
            for (std::size_t c = 0; c < star[i].size(); ++c) {
                star[i][c] -= g.mu[i][j] * star[j][c];
            }
        }
        g.norm[i] = dot(star[i], star[i]);
    }
    return g;
}

// Exact LLL, delta = 3/4, on the leading `count` rows.
void lll(std::vector<IVec>& rows, std::size_t count, const Metric& metric) {
    std::vector<IVec> part(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(count));
    Gso g = gram_schmidt(part, metric);
    std::size_t k = 1;
    while (k < count) {
        for (std::size_t j = k; j-- > 0;) {
            const mpz_class q = round_q(g.mu[k][j]);
            if (q != 0) {
                axpy(part[k], q, part[j]);
                g = gram_schmidt(part, metric);
            }
        }
        if (g.norm[k] >= (mpq_class(3, 4) - g.mu[k][k - 1] * g.mu[k][k - 1]) * g.norm[k - 1]) {
            ++k;
        } else {
            std::swap(part[k], part[k - 1]);
            g = gram_schmidt(part, metric);
            k = std::max<std::size_t>(k - 1, 1);
        }
    }
    std::copy(part.begin(), part.end(), rows.begin());
}

}  // namespace

std::optional<std::vector<std::int64_t>> small_nonzero_value(const Gap& g, const Rational& bound,
                                                            std::uint64_t max_nodes) {
    if (!g.is_symmetric()) {
        throw DomainError("small_nonzero_value needs a symmetric box");
    }
    if (bound <= Rational(0)) {
        return std::nullopt;
    }
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < g.rank(); ++i) {
        if (g.upper()[i] > 0 && !g.generators()[i].is_zero()) {
            active.push_back(i);
        }
    }
    const std::size_t r = active.size();
    if (r == 0) {
        return std::nullopt;
    }
    Metric metric;
    mpz_class D = 1;
    for (std::size_t i : active) {
        mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), g.generators()[i].raw().get_den_mpz_t());
    }
    for (std::size_t i : active) {
        metric.H.push_back(g.upper()[i]);
        const mpq_class scaled = g.generators()[i].raw() * mpq_class(D);
        metric.a.push_back(scaled.get_num());
    }
    metric.T = bound.raw() * mpq_class(D);

    // Unimodular rows: rows[0] has value G = gcd(a), the rest span the kernel.
    std::vector<IVec> rows(r, IVec(r));
    IVec value(metric.a);
    for (std::size_t i = 0; i < r; ++i) {
        rows[i][i] = 1;
    }
    for (std::size_t i = 1; i < r; ++i) {
        while (value[i] != 0) {
            mpz_class q;
            mpz_tdiv_q(q.get_mpz_t(), value[0].get_mpz_t(), value[i].get_mpz_t());
            axpy(rows[0], q, rows[i]);
            value[0] -= q * value[i];
            std::swap(rows[0], rows[i]);
            std::swap(value[0], value[i]);
        }
    }
    if (value[0] < 0) {
        for (auto& x : rows[0]) {
            x = -x;
        }
        value[0] = -value[0];
    }
    const mpz_class G = value[0];
    if (mpq_class(G) >= metric.T) {
        return std::nullopt;
    }
    // Kernel first, reduced; the value-G row last, size-reduced against it.
    std::rotate(rows.begin(), rows.begin() + 1, rows.end());
    if (r > 1) {
        lll(rows, r - 1, metric);
        for (std::size_t j = r - 1; j-- > 0;) {
            const mpz_class q = round_q(gram_schmidt(rows, metric).mu[r - 1][j]);
            if (q != 0) {
                axpy(rows[r - 1], q, rows[j]);
            }
        }
    }
    const Gso gso = gram_schmidt(rows, metric);
    const mpq_class radius(static_cast<long>(r + 1));

    IVec x(r);
    std::uint64_t nodes = 0;
    std::optional<std::vector<std::int64_t>> found;

    auto leaf = [&]() {
        std::vector<std::int64_t> m(g.rank(), 0);
        for (std::size_t i = 0; i < r; ++i) {
            mpz_class mi = 0;
            for (std::size_t j = 0; j < r; ++j) {
                mi += rows[j][i] * x[j];
            }
            if (abs(mi) > metric.H[i]) {
                return false;
            }
            m[active[i]] = mi.get_si();
        }
        // value = x[r-1] * G, nonzero and below T by the top-level range
        found = std::move(m);
        return true;
    };

    auto count = [&]() {
        if (++nodes > max_nodes) {
            throw ResourceError("small_nonzero_value: enumeration exceeds " + std::to_string(max_nodes) + " nodes");
        }
    };

    // Depth-first over levels r-1 .. 0 with exact remaining budgets.
    auto descend = [&](auto&& self, std::size_t level, const mpq_class& budget) -> bool {
        mpq_class center = 0;
        for (std::size_t k = level + 1; k < r; ++k) {
            center -= gso.mu[k][level] * mpq_class(x[k]);
        }
        mpz_class s;
        const mpz_class fq = floor_q(budget / gso.norm[level]);
        mpz_sqrt(s.get_mpz_t(), fq.get_mpz_t());
        s += 1;
        mpz_class lo = floor_q(center) - s;
        mpz_class hi = floor_q(center) + 1 + s;
        if (level == r - 1) {
            lo = 1;  // t = 0 is the kernel; -t mirrors t
        }
        if (level == 0) {
            // the box is an exact interval in x_0 once the rest is fixed
            for (std::size_t i = 0; i < r && lo <= hi; ++i) {
                mpz_class base = 0;
                for (std::size_t j = 1; j < r; ++j) {
                    base += rows[j][i] * x[j];
                }
                const mpz_class& c = rows[0][i];
                if (c == 0) {
                    if (abs(base) > metric.H[i]) {
                        return false;
                    }
                    continue;
                }
                // -H <= base + c v <= H
                mpq_class a(-metric.H[i] - base, c), b(metric.H[i] - base, c);
                a.canonicalize();
                b.canonicalize();
                if (c < 0) {
                    std::swap(a, b);
                }
                lo = std::max(lo, mpz_class(-floor_q(-a)));
                hi = std::min(hi, floor_q(b));
            }
        }
        for (mpz_class v = lo; v <= hi; ++v) {
            count();
            if (level == r - 1 && mpq_class(v * G) >= metric.T) {
                break;
            }
            const mpq_class d = mpq_class(v) - center;
            const mpq_class used = d * d * gso.norm[level];
            if (used > budget) {
                continue;
            }
            x[level] = v;
            if (level == 0 ? leaf() : self(self, level - 1, budget - used)) {
                return true;
            }
        }
        x[level] = 0;
        return false;
    };
    descend(descend, r - 1, radius);
    return found;
}

}  // namespace lwo
