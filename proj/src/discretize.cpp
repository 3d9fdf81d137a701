#include "lwo/discretize.hpp"

#include "box_search.hpp"
#include "int_ops.hpp"
#include "lwo/error.hpp"
#include "lwo/exact_linalg.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <type_traits>

namespace lwo {

using detail::for_each_box;
using detail::IntOps;

bool DiscretizationReport::passed() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.passed; });
}

const Clause* DiscretizationReport::find(const std::string& name) const {
    for (const auto& c : clauses) {
        if (c.name == name) {
            return &c;
        }
    }
    return nullptr;
}

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        const __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Incremental integer row echelon form; rows are reduced in insertion order
// so each stored row vanishes on the pivots of the rows before it.
class Echelon {
public:
    explicit Echelon(std::size_t dim) : dim_(dim) {}

    bool add(const std::vector<std::int64_t>& m) {
        std::vector<__int128> c(m.begin(), m.end());
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const std::size_t p = pivots_[k];
            if (c[p] == 0) {
                continue;
            }
            const __int128 a = rows_[k][p];
            const __int128 b = c[p];
            __int128 g = 0;
            for (std::size_t i = 0; i < dim_; ++i) {
                c[i] = c[i] * a - rows_[k][i] * b;
                g = gcd128(g, c[i]);
            }
            if (g > 1) {
                for (auto& x : c) {
                    x /= g;
                }
            }
        }
        const auto it = std::find_if(c.begin(), c.end(), [](__int128 x) { return x != 0; });
        if (it == c.end()) {
            return false;
        }
        pivots_.push_back(static_cast<std::size_t>(it - c.begin()));
        rows_.push_back(std::move(c));
        originals_.push_back(m);
        return true;
    }

    std::size_t rank() const { return rows_.size(); }
    const std::vector<std::vector<std::int64_t>>& originals() const { return originals_; }

private:
    std::size_t dim_;
    std::vector<std::vector<__int128>> rows_;
    std::vector<std::size_t> pivots_;
    std::vector<std::vector<std::int64_t>> originals_;
};

// Collects relations m with |m_i| <= h_i and |<m, v>| <= t into `basis`,
// stopping once the span is everything. The widest coordinate is solved in
// closed form for each state of the others.
template <class T>
void relation_search(const std::vector<BigInt>& v, const std::vector<std::int64_t>& h, const Rational& t,
                     Echelon& basis) {
    const std::size_t d = v.size();
    const std::size_t peel =
        static_cast<std::size_t>(std::max_element(h.begin(), h.end()) - h.begin());
    const bool flip = sgn(v[peel]) < 0;
    const T gp = IntOps<T>::from(BigInt(abs(v[peel])));
    const T tn = IntOps<T>::from(t.num());
    const T td = IntOps<T>::from(t.den());
    const T den = td * gp;
    std::vector<T> g;
    std::vector<std::int64_t> lo;
    std::vector<std::int64_t> hi;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < d; ++i) {
        if (i != peel) {
            g.push_back(IntOps<T>::from(v[i]));
            lo.push_back(-h[i]);
            hi.push_back(h[i]);
            where.push_back(i);
        }
    }
    const std::int64_t hp = h[peel];
    std::vector<std::int64_t> full(d);
    for_each_box<T>(g, lo, hi, [&](const T& s, const std::vector<std::int64_t>& m) {
        // td * |s + m' gp| <= tn
        const T a = T(0) - tn - td * s;
        const T b = tn - td * s;
        const T lo_m = T(0) - IntOps<T>::floor_div(T(0) - a, den);
        const T hi_m = IntOps<T>::floor_div(b, den);
        const T first = std::max(lo_m, IntOps<T>::from(-hp));
        const T last = std::min(hi_m, IntOps<T>::from(hp));
        if (first > last) {
            return false;
        }
        for (std::size_t k = 0; k < where.size(); ++k) {
            full[where[k]] = m[k];
        }
        for (T mp = first; mp <= last && mp <= first + T(1); mp += T(1)) {
            const auto x = static_cast<std::int64_t>(IntOps<T>::to_big(mp).get_si());
            full[peel] = flip ? -x : x;
            if (std::any_of(full.begin(), full.end(), [](std::int64_t c) { return c != 0; })) {
                basis.add(full);
            }
        }
        return basis.rank() == d;
    });
}

struct KernelSpan {
    std::vector<std::vector<std::int64_t>> basis;
    std::int64_t level = 1;
    bool cap_hit = false;
};

std::optional<KernelSpan> kernel_span(const std::vector<BigInt>& v, const std::vector<std::int64_t>& M,
                                      std::int64_t b, const Rational& t, const DiscretizeOptions& opts) {
    const std::size_t d = v.size();
    std::optional<KernelSpan> last;
    std::vector<std::int64_t> prev_h;
    BigInt reach;  // max |<m, v>| over the current box
    for (std::int64_t level = 1;; ++level) {
        std::vector<std::int64_t> h(d);
        const BigInt scale = pow(from_i64(b), static_cast<unsigned long>(level));
        std::uint64_t box = 1;
        reach = 0;
        for (std::size_t i = 0; i < d; ++i) {
            const BigInt hi = std::min(BigInt(from_i64(M[i]) * scale), from_i64(opts.coefficient_cap));
            h[i] = hi.get_si();
            box = detail::sat_mul(box, detail::range_size(-h[i], h[i]));
            reach += abs(v[i]) * hi;
        }
        if (box > opts.box_cap || h == prev_h) {
            if (last) {
                last->cap_hit = true;
            }
            return last;
        }
        Echelon basis(d);
        if (Rational(reach) <= t) {
            for (std::size_t i = 0; i < d; ++i) {
                std::vector<std::int64_t> e(d, 0);
                e[i] = 1;
                basis.add(e);
            }
        } else {
            const BigInt magnitude = 4 * (reach + 1) * t.den() + 4 * abs(t.num());
            if (IntOps<__int128>::fits(magnitude)) {
                relation_search<__int128>(v, h, t, basis);
            } else {
                relation_search<BigInt>(v, h, t, basis);
            }
        }
        const bool stable = last && last->basis.size() == basis.rank();
        if (stable) {
            return last;
        }
        last = KernelSpan{basis.originals(), level, false};
        if (basis.rank() == d) {
            return last;
        }
        prev_h = h;
    }
}

// Lexicographically first r-subset of columns on which the basis has rank r.
std::vector<std::size_t> graph_subset(const std::vector<std::vector<std::int64_t>>& K, std::size_t d) {
    const std::size_t r = K.size();
    std::vector<std::size_t> pick(r);
    std::iota(pick.begin(), pick.end(), 0);
    for (;;) {
        IntMatrix sub(r, r);
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < r; ++j) {
                sub(i, j) = from_i64(K[i][pick[j]]);
            }
        }
        if (rank_exact(sub) == r) {
            return pick;
        }
        // Next combination in lexicographic order.
        std::size_t i = r;
        while (i > 0 && pick[i - 1] == d - r + i - 1) {
            --i;
        }
        if (i == 0) {
            throw DomainError("kernel basis has no full-rank coordinate subset");
        }
        ++pick[i - 1];
        for (std::size_t j = i; j < r; ++j) {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

Gap symmetric_without_zeros(const std::vector<Rational>& gens, const std::vector<std::int64_t>& bounds) {
    std::vector<Rational> g;
    std::vector<std::int64_t> m;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        if (!gens[i].is_zero() && bounds[i] > 0) {
            g.push_back(gens[i]);
            m.push_back(bounds[i]);
        }
    }
    return Gap::symmetric(std::move(g), std::move(m));
}

std::int64_t small_int(const BigInt& x, const char* what) {
    const auto v = to_i64(x);
    if (!v || *v < 1) {
        throw DomainError(std::string(what) + " must be a positive integer that fits in int64");
    }
    return *v;
}

}  // namespace

DiscretizeOutcome discretize(const Gap& p, const BigInt& r0, const BigInt& s, std::int64_t b,
                             const DiscretizeOptions& options) {
    if (!p.is_symmetric()) {
        throw DomainError("discretize needs a symmetric progression");
    }
    for (const auto& g : p.generators()) {
        if (!g.is_integer()) {
            throw DomainError("discretize needs integer generators");
        }
    }
    if (sgn(r0) <= 0 || sgn(s) <= 0) {
        throw DomainError("discretize needs r0 >= 1 and s >= 1");
    }
    if (b < 2) {
        throw DomainError("discretize needs b >= 2");
    }
    const std::size_t rank = p.rank();
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < rank; ++i) {
        if (!p.generators()[i].is_zero() && p.upper()[i] > 0) {
            active.push_back(i);
        }
    }
    if (active.size() > 4) {
        throw DimensionError("discretize supports rank at most 4, got " + std::to_string(active.size()));
    }
    std::vector<BigInt> v;
    std::vector<std::int64_t> M;
    std::int64_t sum_m = 0;
    for (std::size_t i : active) {
        v.push_back(p.generators()[i].num());
        M.push_back(p.upper()[i]);
        sum_m += p.upper()[i];
    }
    const BigInt volume = p.volume();
    const BigInt ratio = options.ladder_ratio ? *options.ladder_ratio : BigInt(s * volume);
    if (ratio < 1) {
        throw DomainError("ladder ratio must be positive");
    }

    DiscretizationFailure failure;
    std::vector<BigInt> tried;
    for (std::int64_t j = -options.ladder_span; j <= options.ladder_span; ++j) {
        const BigInt step = pow(ratio, static_cast<unsigned long>(std::abs(j)));
        const BigInt R = j >= 0 ? BigInt(r0 * step) : BigInt(r0 / step);
        if (R < 1 || std::find(tried.begin(), tried.end(), R) != tried.end()) {
            continue;
        }
        tried.push_back(R);
        std::vector<Rational> thresholds{Rational(R, s), Rational(R, BigInt(s * std::max<std::int64_t>(sum_m, 1))),
                                         Rational(R, BigInt(s * volume))};
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
        for (const auto& t : thresholds) {
            std::optional<KernelSpan> span;
            if (!active.empty()) {
                span = kernel_span(v, M, b, t, options);
                if (!span) {
                    failure.diagnostics.push_back("R = " + to_string(R) + ": relation box over budget");
                    continue;
                }
            } else {
                span = KernelSpan{};
            }
            const std::size_t d = active.size();
            const std::size_t r = span->basis.size();

            DiscretizationResult res;
            res.r_scale = R;
            res.kernel_rank = r;
            res.kernel_basis = span->basis;
            res.params = DiscretizeParams{b, s, r0, ratio, j, t, span->level, span->cap_hit};
            res.decomposition.assign(rank, GeneratorSplit{});
            for (std::size_t i = 0; i < rank; ++i) {
                res.decomposition[i] = {Rational(0), p.generators()[i]};
            }
            std::vector<Rational> small_g;
            std::vector<std::int64_t> small_m;
            std::vector<Rational> sparse_g;
            std::vector<std::int64_t> sparse_m;
            if (r == d) {
                for (std::size_t a = 0; a < d; ++a) {
                    res.decomposition[active[a]] = {Rational(v[a]), Rational(0)};
                    small_g.emplace_back(v[a]);
                    small_m.push_back(M[a]);
                }
            } else if (r == 0) {
                for (std::size_t a = 0; a < d; ++a) {
                    sparse_g.emplace_back(v[a]);
                    sparse_m.push_back(M[a]);
                }
            } else {
                const auto I = graph_subset(span->basis, d);
                std::vector<std::size_t> J;
                for (std::size_t a = 0; a < d; ++a) {
                    if (std::find(I.begin(), I.end(), a) == I.end()) {
                        J.push_back(a);
                    }
                }
                // K_I w = K_J v_J, i.e. w = T* v_J for the graph map T of the span.
                IntMatrix KI(r, r);
                std::vector<BigInt> rhs(r);
                for (std::size_t row = 0; row < r; ++row) {
                    for (std::size_t c = 0; c < r; ++c) {
                        KI(row, c) = from_i64(span->basis[row][I[c]]);
                    }
                    for (std::size_t jj : J) {
                        rhs[row] += from_i64(span->basis[row][jj]) * v[jj];
                    }
                }
                const auto sol = solve_rational(KI, rhs);
                const auto& w = std::get<std::vector<Rational>>(sol);
                for (std::size_t c = 0; c < r; ++c) {
                    const std::size_t a = I[c];
                    const Rational sm = Rational(v[a]) + w[c];
                    res.decomposition[active[a]] = {sm, Rational(0) - w[c]};
                    small_g.push_back(sm);
                    small_m.push_back(M[a]);
                    sparse_g.push_back(Rational(0) - w[c]);
                    sparse_m.push_back(M[a]);
                }
                for (std::size_t a : J) {
                    sparse_g.emplace_back(v[a]);
                    sparse_m.push_back(M[a]);
                }
                for (std::size_t a : I) {
                    res.graph_coordinates.push_back(active[a]);
                }
            }
            res.p_small = symmetric_without_zeros(small_g, small_m);
            res.p_sparse = symmetric_without_zeros(sparse_g, sparse_m);

            try {
                const auto report = verify_discretization(res, p, s, options);
                if (report.passed()) {
                    return res;
                }
                std::string failed;
                for (const auto& c : report.clauses) {
                    if (!c.passed) {
                        failed += (failed.empty() ? "" : ", ") + c.name;
                    }
                }
                failure.diagnostics.push_back("R = " + to_string(R) + ", threshold " + t.str() + ", kernel rank " +
                                              std::to_string(r) + ": failed " + failed);
            } catch (const ResourceError& e) {
                failure.diagnostics.push_back("R = " + to_string(R) + ": " + e.what());
            }
        }
    }
    failure.reason = "no admissible scale found within the ladder";
    return failure;
}

// Sparseness: distinct elements of S*P_sparse differ by >= R*S, i.e. the
// nonzero values of the 2S-fold box stay outside (-RS, RS).
static Clause sparseness_clause(const Gap& sparse, std::int64_t S, const Rational& need, const DiscretizeOptions& options,
                         bool& exhaustive) {
    Clause c{"sparseness", true, false, {}};
    std::vector<std::int64_t> wide;
    for (auto m : sparse.upper()) {
        if (m > INT64_MAX / (2 * S)) {
            c.passed = false;
            c.detail = "2S-fold box bounds overflow";
            return c;
        }
        wide.push_back(2 * S * m);
    }
    const Gap diff = Gap::symmetric(sparse.generators(), wide);
    try {
        const auto gap_min = min_nonzero_abs_linear(diff, options.limits);
        c.passed = !gap_min || *gap_min >= need;
        c.detail = (gap_min ? "min separation " + gap_min->str() : std::string("no nonzero differences")) +
                   ", RS = " + need.str();
        return c;
    } catch (const ResourceError&) {
    }
    try {
        // Too many box points to list: search the box lattice for a value in (-RS, RS).
        const auto hit = small_nonzero_value(diff, need);
        c.passed = !hit;
        if (hit) {
            Rational v;
            for (std::size_t i = 0; i < hit->size(); ++i) {
                v += diff.generators()[i] * Rational(from_i64((*hit)[i]));
            }
            c.detail = "lattice search found difference " + v.abs().str() + " < RS = " + need.str();
        } else {
            c.detail = "lattice search: no nonzero difference below RS = " + need.str();
        }
        return c;
    } catch (const ResourceError&) {
    }
    // Sampled fallback over pairs of box points.
    exhaustive = false;
    std::mt19937_64 rng(0x5eedULL);
    std::optional<Rational> best;
    const auto& gens = sparse.generators();
    for (std::uint64_t trial = 0; trial < options.sample_size; ++trial) {
        Rational x;
        for (std::size_t i = 0; i < gens.size(); ++i) {
            std::uniform_int_distribution<std::int64_t> pick(-wide[i], wide[i]);
            x += gens[i] * Rational(pick(rng));
        }
        if (!x.is_zero() && (!best || x.abs() < *best)) {
            best = x.abs();
        }
    }
    c.passed = !best || *best >= need;
    c.detail = "sampled; min separation seen " + (best ? best->str() : std::string("none"));
    return c;
}

DiscretizationReport verify_discretization(const DiscretizationResult& res, const Gap& p, const BigInt& s,
                                           const DiscretizeOptions& options) {
    DiscretizationReport rep;
    const std::int64_t S = small_int(s, "s");
    const Rational R(res.r_scale);
    rep.scale_ratio = R / Rational(res.params.r0);

    // Smallness: max |x| over P_small, attained at a box corner.
    const Rational top = res.p_small.max_abs();
    const Rational small_bound = R / Rational(s);
    rep.clauses.push_back({"smallness", top <= small_bound, false,
                           "max |P_small| = " + top.str() + ", R/S = " + small_bound.str()});

    rep.clauses.push_back(sparseness_clause(res.p_sparse, S, R * Rational(s), options, rep.exhaustive));

    // Covering: every x in P splits along the stored per-generator
    // decomposition into an element of P_small plus an element of P_sparse.
    {
        Clause c{"covering", true, false, {}};
        if (res.decomposition.size() != p.rank()) {
            c.passed = false;
            c.detail = "decomposition length differs from rank";
        } else {
            for (std::size_t i = 0; i < p.rank(); ++i) {
                if (res.decomposition[i].small + res.decomposition[i].sparse != p.generators()[i]) {
                    c.passed = false;
                    c.detail = "generator " + std::to_string(i) + " is not small + sparse";
                }
            }
        }
        if (c.passed) {
            const GapSearcher small(res.p_small, options.limits);
            const GapSearcher sparse(res.p_sparse, options.limits);
            auto check_point = [&](const std::vector<std::int64_t>& m) {
                Rational a;
                Rational b;
                for (std::size_t i = 0; i < m.size(); ++i) {
                    if (m[i] != 0) {
                        a += res.decomposition[i].small * Rational(m[i]);
                        b += res.decomposition[i].sparse * Rational(m[i]);
                    }
                }
                return a + b == p.evaluate(m) && small.find(a) && sparse.find(b);
            };
            const BigInt vol = p.volume();
            std::uint64_t checked = 0;
            if (vol <= options.covering_cap) {
                std::vector<BigInt> dummy(p.rank(), BigInt(0));
                for_each_box<BigInt>(dummy, p.lower(), p.upper(), [&](const BigInt&, const std::vector<std::int64_t>& m) {
                    ++checked;
                    if (!check_point(m)) {
                        c.passed = false;
                        c.detail = "element at box point " + std::to_string(checked - 1) + " not covered";
                        return true;
                    }
                    return false;
                });
            } else {
                rep.exhaustive = false;
                std::mt19937_64 rng(0xc0feULL);
                std::vector<std::int64_t> m(p.rank());
                for (std::uint64_t trial = 0; trial < options.sample_size && c.passed; ++trial) {
                    for (std::size_t i = 0; i < p.rank(); ++i) {
                        std::uniform_int_distribution<std::int64_t> pick(p.lower()[i], p.upper()[i]);
                        m[i] = pick(rng);
                    }
                    ++checked;
                    if (!check_point(m)) {
                        c.passed = false;
                        c.detail = "sampled element not covered";
                    }
                }
                rep.coverage_fraction = mpz_get_d(BigInt(checked).get_mpz_t()) / mpz_get_d(vol.get_mpz_t());
            }
            if (c.passed) {
                c.detail = std::to_string(checked) + " elements checked";
            }
        }
        rep.clauses.push_back(std::move(c));
    }

    // Rank and volume bounds for both parts.
    {
        const std::size_t d = p.rank();
        const BigInt V = p.volume();
        const bool ok = res.p_small.rank() <= d && res.p_sparse.rank() <= d && res.p_small.volume() <= V &&
                        res.p_sparse.volume() <= V;
        rep.clauses.push_back({"bounds", ok, false,
                               "ranks " + std::to_string(res.p_small.rank()) + "/" +
                                   std::to_string(res.p_sparse.rank()) + ", volumes " +
                                   to_string(res.p_small.volume()) + "/" + to_string(res.p_sparse.volume()) +
                                   " vs V = " + to_string(V)});
    }
    return rep;
}

}  // namespace lwo
