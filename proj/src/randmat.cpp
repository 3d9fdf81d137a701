#include "lwo/randmat.hpp"

#include "lwo/bigint.hpp"
#include "lwo/detail/bareiss.hpp"
#include "lwo/error.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace lwo {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// floor((1 - mu) 2^64) as an exact threshold on 64-bit draws.
unsigned __int128 zero_threshold(const Rational& mu) {
    BigInt t = (mu.den() - mu.num()) << 64;
    t /= mu.den();
    return static_cast<unsigned __int128>(*to_i128(t));
}

std::int64_t draw(std::uint64_t u, unsigned __int128 threshold) {
    const unsigned __int128 x = u;
    if (x < threshold) {
        return 0;
    }
    const unsigned __int128 span = (static_cast<unsigned __int128>(1) << 64) - threshold;
    return (x - threshold) < span / 2 ? -1 : 1;
}

}  // namespace

std::uint64_t entry_bits(std::uint64_t seed, std::uint64_t trial, std::uint64_t index) {
    return splitmix(splitmix(splitmix(seed) ^ trial) ^ index);
}

MatrixSample MatrixSample::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
    MatrixSample m;
    m.n = rows.size();
    for (const auto& r : rows) {
        if (r.size() != m.n) {
            throw DimensionError("matrix rows must all have length n");
        }
        m.entries.insert(m.entries.end(), r.begin(), r.end());
    }
    return m;
}

MatrixSample sample_matrix(std::size_t n, const WalkParams& p, std::uint64_t seed,
                           const std::vector<std::vector<std::int64_t>>& fixed_rows, std::uint64_t trial) {
    if (n < 1) {
        throw DomainError("sample_matrix needs n >= 1");
    }
    if (fixed_rows.size() >= n) {
        throw DimensionError("need fewer than n fixed rows");
    }
    for (const auto& r : fixed_rows) {
        if (r.size() != n) {
            throw DimensionError("fixed row has length " + std::to_string(r.size()) + ", expected " +
                                 std::to_string(n));
        }
    }
    MatrixSample m;
    m.n = n;
    m.mu = p.mu();
    m.seed = seed;
    m.trial = trial;
    m.fixed_rows = fixed_rows;
    m.entries.resize(n * n);
    const auto threshold = zero_threshold(p.mu());
    const std::size_t random_rows = n - fixed_rows.size();
    for (std::size_t i = 0; i < random_rows * n; ++i) {
        m.entries[i] = draw(entry_bits(seed, trial, i), threshold);
    }
    for (std::size_t r = 0; r < fixed_rows.size(); ++r) {
        std::copy(fixed_rows[r].begin(), fixed_rows[r].end(), m.entries.begin() + (random_rows + r) * n);
    }
    return m;
}

namespace {

template <class T>
bool singular_with(const MatrixSample& m) {
    std::vector<T> a;
    a.reserve(m.entries.size());
    for (auto x : m.entries) {
        if constexpr (std::is_same_v<T, BigInt>) {
            a.push_back(from_i64(x));
        } else {
            a.push_back(static_cast<T>(x));
        }
    }
    return detail::bareiss(a, m.n, m.n) < m.n;
}

}  // namespace

bool is_singular_exact(const MatrixSample& m) {
    // Bareiss intermediates are bounded by twice the square of the Hadamard
    // bound prod_i max(1, |row_i|).
    double log2_h = 0.0;
    for (std::size_t r = 0; r < m.n; ++r) {
        long double sq = 0;
        for (std::size_t c = 0; c < m.n; ++c) {
            sq += static_cast<long double>(m.at(r, c)) * static_cast<long double>(m.at(r, c));
        }
        log2_h += 0.5 * std::log2(std::max<double>(1.0, static_cast<double>(sq)));
    }
    const double need = 2.0 * log2_h + 2.0;
    if (need < 62.0) {
        return singular_with<std::int64_t>(m);
    }
    if (need < 126.0) {
        return singular_with<__int128>(m);
    }
    return singular_with<BigInt>(m);
}

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec start_vector(std::size_t n) {
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<double>(splitmix(0x51a7ULL + i) >> 11) * 0x1.0p-53 - 0.5;
    }
    const double s = norm(x);
    for (auto& v : x) {
        v /= s;
    }
    return x;
}

struct Dense {
    std::size_t n;
    Vec a;  // row-major
    double at(std::size_t r, std::size_t c) const { return a[r * n + c]; }

    explicit Dense(const MatrixSample& m) : n(m.n), a(m.entries.begin(), m.entries.end()) {}

    Vec mul(const Vec& x) const {
        Vec y(n, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                y[r] += at(r, c) * x[c];
            }
        }
        return y;
    }
    Vec mul_t(const Vec& x) const {
        Vec y(n, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                y[c] += at(r, c) * x[r];
            }
        }
        return y;
    }
};

// PA = LU with partial pivoting; row i of PA is row perm[i] of A.
struct Lu {
    std::size_t n;
    Vec lu;
    std::vector<std::size_t> perm;

    explicit Lu(const Dense& m) : n(m.n), lu(m.a), perm(m.n) {
        for (std::size_t i = 0; i < n; ++i) {
            perm[i] = i;
        }
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            for (std::size_t r = k + 1; r < n; ++r) {
                if (std::abs(lu[r * n + k]) > std::abs(lu[piv * n + k])) {
                    piv = r;
                }
            }
            if (piv != k) {
                for (std::size_t c = 0; c < n; ++c) {
                    std::swap(lu[k * n + c], lu[piv * n + c]);
                }
                std::swap(perm[k], perm[piv]);
            }
            const double d = lu[k * n + k];
            if (d == 0.0) {
                continue;
            }
            for (std::size_t r = k + 1; r < n; ++r) {
                const double f = lu[r * n + k] / d;
                lu[r * n + k] = f;
                for (std::size_t c = k + 1; c < n; ++c) {
                    lu[r * n + c] -= f * lu[k * n + c];
                }
            }
        }
    }

    // A z = y
    Vec solve(const Vec& y) const {
        Vec z(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = y[perm[i]];
            for (std::size_t j = 0; j < i; ++j) {
                s -= lu[i * n + j] * z[j];
            }
            z[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = z[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                s -= lu[i * n + j] * z[j];
            }
            z[i] = s / lu[i * n + i];
        }
        return z;
    }

    // A^T y = x, using A^T = U^T L^T P.
    Vec solve_t(const Vec& x) const {
        Vec t(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = x[i];
            for (std::size_t j = 0; j < i; ++j) {
                s -= lu[j * n + i] * t[j];
            }
            t[i] = s / lu[i * n + i];
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = t[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                s -= lu[j * n + i] * t[j];
            }
            t[i] = s;
        }
        Vec y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[perm[i]] = t[i];
        }
        return y;
    }
};

void check_tol(double tol) {
    if (!(tol > 0.0)) {
        throw DomainError("tolerance must be positive");
    }
}

}  // namespace

double smallest_singular_value(const MatrixSample& m, double tol, const SpectralOptions& opts) {
    check_tol(tol);
    if (is_singular_exact(m)) {
        return 0.0;
    }
    const Dense a(m);
    const Lu lu(a);
    Vec x = start_vector(m.n);
    // Inverse iteration on (A^T A)^{-1}: its top eigenvalue is 1 / sigma_n^2.
    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
        Vec z = lu.solve(lu.solve_t(x));
        const double lambda = dot(x, z);
        double res = 0.0;
        for (std::size_t i = 0; i < m.n; ++i) {
            res += (z[i] - lambda * x[i]) * (z[i] - lambda * x[i]);
        }
        if (std::sqrt(res) <= tol * lambda) {
            return 1.0 / std::sqrt(lambda);
        }
        const double s = norm(z);
        for (std::size_t i = 0; i < m.n; ++i) {
            x[i] = z[i] / s;
        }
    }
    double frob = 0.0;
    for (std::size_t c = 0; c < m.n; ++c) {
        Vec e(m.n, 0.0);
        e[c] = 1.0;
        const Vec col = lu.solve(e);
        frob += dot(col, col);
    }
    const double high = norm(a.mul(x));
    const double low = 1.0 / std::sqrt(frob);
    throw NonConvergenceError("smallest singular value did not converge; sigma_n in [" + std::to_string(low) + ", " +
                                  std::to_string(high) + "]",
                              low, high);
}

double largest_singular_value(const MatrixSample& m, double tol, const SpectralOptions& opts) {
    check_tol(tol);
    const Dense a(m);
    Vec x = start_vector(m.n);
    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
        Vec z = a.mul_t(a.mul(x));
        const double lambda = dot(x, z);
        if (lambda == 0.0) {
            // x is in the kernel; restart along the first nonzero column.
            if (std::all_of(a.a.begin(), a.a.end(), [](double v) { return v == 0.0; })) {
                return 0.0;
            }
            Vec e(m.n, 0.0);
            e[it % m.n] = 1.0;
            x = e;
            continue;
        }
        double res = 0.0;
        for (std::size_t i = 0; i < m.n; ++i) {
            res += (z[i] - lambda * x[i]) * (z[i] - lambda * x[i]);
        }
        if (std::sqrt(res) <= tol * lambda) {
            return std::sqrt(lambda);
        }
        const double s = norm(z);
        for (std::size_t i = 0; i < m.n; ++i) {
            x[i] = z[i] / s;
        }
    }
    const double low = norm(a.mul(x));
    const double high = std::sqrt(dot(a.a, a.a));
    throw NonConvergenceError("largest singular value did not converge", low, high);
}

double condition_number(const MatrixSample& m, double tol, const SpectralOptions& opts) {
    const double lo = smallest_singular_value(m, tol, opts);
    if (lo == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return largest_singular_value(m, tol, opts) / lo;
}

SpectralSummary spectral_summary(const MatrixSample& m, double tol, const SpectralOptions& opts) {
    SpectralSummary s;
    s.singular_exact = is_singular_exact(m);
    s.sigma_max = largest_singular_value(m, tol, opts);
    s.sigma_min = s.singular_exact ? 0.0 : smallest_singular_value(m, tol, opts);
    s.cond = s.singular_exact ? std::numeric_limits<double>::infinity() : s.sigma_max / s.sigma_min;
    return s;
}

Rational brute_force_singularity(std::size_t n, const WalkParams& p) {
    if (n < 1 || n > 3) {
        throw DomainError("brute_force_singularity supports 1 <= n <= 3");
    }
    const BigInt rest = 2 * (p.mu().den() - p.mu().num());
    const BigInt move = p.mu().num();
    const std::size_t cells = n * n;
    std::size_t patterns = 1;
    for (std::size_t i = 0; i < cells; ++i) {
        patterns *= 3;
    }
    BigInt singular;
    std::vector<std::int64_t> a(cells);
    for (std::size_t code = 0; code < patterns; ++code) {
        std::size_t c = code;
        std::size_t zeros = 0;
        for (std::size_t i = 0; i < cells; ++i) {
            a[i] = static_cast<std::int64_t>(c % 3) - 1;
            zeros += a[i] == 0;
            c /= 3;
        }
        std::vector<std::int64_t> work = a;
        if (detail::bareiss(work, n, n) < n) {
            singular += pow(rest, static_cast<unsigned long>(zeros)) *
                        pow(move, static_cast<unsigned long>(cells - zeros));
        }
    }
    return Rational(singular, pow(BigInt(2 * p.mu().den()), static_cast<unsigned long>(cells)));
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) {
        throw DomainError("Wilson interval needs at least one trial");
    }
    constexpr double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double ph = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (ph + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
    const double lo = std::clamp(center - half, 0.0, 1.0);
    const double hi = std::clamp(center + half, 0.0, 1.0);
    return {std::min(lo, ph), std::max(hi, ph)};
}

double delta_mu(const WalkParams& p) {
    const double mu = p.mu().to_double();
    return std::max(1.0 - mu, mu / 2.0);
}

namespace {

template <class F>
void parallel_trials(std::uint64_t trials, unsigned threads, F&& body) {
    threads = std::max(1U, threads);
    if (threads == 1 || trials < 2 * threads) {
        body(0, trials);
        return;
    }
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::uint64_t lo = std::min<std::uint64_t>(trials, t * chunk);
        const std::uint64_t hi = std::min<std::uint64_t>(trials, lo + chunk);
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& th : pool) {
        th.join();
    }
}

McEstimate finish(std::uint64_t trials, std::uint64_t successes, std::uint64_t seed) {
    McEstimate e;
    e.trials = trials;
    e.successes = successes;
    e.seed = seed;
    e.estimate = static_cast<double>(successes) / static_cast<double>(trials);
    std::tie(e.ci_low, e.ci_high) = wilson_interval(successes, trials);
    return e;
}

}  // namespace

McEstimate mc_singularity(std::size_t n, const WalkParams& p, std::uint64_t trials, std::uint64_t seed,
                          const std::vector<std::vector<std::int64_t>>& fixed_rows, unsigned threads) {
    if (trials < 1) {
        throw DomainError("mc_singularity needs trials >= 1");
    }
    std::vector<char> hit(trials, 0);
    parallel_trials(trials, threads, [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t t = lo; t < hi; ++t) {
            hit[t] = is_singular_exact(sample_matrix(n, p, seed, fixed_rows, t)) ? 1 : 0;
        }
    });
    const auto successes = static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), 1));
    McEstimate e = finish(trials, successes, seed);
    e.delta_mu = delta_mu(p);
    e.comparators = {{"(1-0.001)^n", std::pow(1.0 - 0.001, static_cast<double>(n))},
                     {"(1/2)^n", std::pow(0.5, static_cast<double>(n))}};
    return e;
}

std::vector<double> sigma_min_samples(std::size_t n, const WalkParams& p, std::uint64_t trials, std::uint64_t seed,
                                      double tol, unsigned threads) {
    std::vector<double> out(trials);
    parallel_trials(trials, threads, [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t t = lo; t < hi; ++t) {
            const auto m = sample_matrix(n, p, seed, {}, t);
            try {
                out[t] = smallest_singular_value(m, tol);
            } catch (const NonConvergenceError& e) {
                out[t] = std::sqrt(e.low() * e.high());
            }
        }
    });
    return out;
}

McEstimate tail_estimate(const std::vector<double>& sigmas, std::size_t n, double b_exponent, std::uint64_t seed) {
    if (sigmas.empty()) {
        throw DomainError("tail estimate needs trials >= 1");
    }
    const double threshold = std::pow(static_cast<double>(n), -b_exponent);
    std::uint64_t successes = 0;
    for (double s : sigmas) {
        successes += (s == 0.0 || s <= threshold) ? 1 : 0;
    }
    McEstimate e = finish(sigmas.size(), successes, seed);
    e.comparators = {{"n^-B", threshold}};
    return e;
}

McEstimate mc_sigma_tail(std::size_t n, const WalkParams& p, double b_exponent, std::uint64_t trials,
                         std::uint64_t seed, unsigned threads) {
    if (trials < 1) {
        throw DomainError("mc_sigma_tail needs trials >= 1");
    }
    McEstimate e = tail_estimate(sigma_min_samples(n, p, trials, seed, 1e-10, threads), n, b_exponent, seed);
    e.delta_mu = delta_mu(p);
    return e;
}

}  // namespace lwo
