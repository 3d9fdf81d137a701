#include "lwo/walk.hpp"

#include "lwo/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lwo {

WalkParams::WalkParams(Rational mu) : mu_(std::move(mu)) {
    if (mu_.sign() <= 0 || mu_ > Rational(1)) {
        throw DomainError("mu must lie in (0, 1], got " + mu_.str());
    }
}

Distribution::Distribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
}

Rational Distribution::at(std::int64_t value) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), value,
                               [](const Atom& a, std::int64_t v) { return a.value < v; });
    if (it == atoms_.end() || it->value != value) {
        return Rational(0);
    }
    return it->prob;
}

Rational Distribution::total() const {
    Rational t;
    for (const auto& a : atoms_) {
        t += a.prob;
    }
    return t;
}

namespace {

using Law = std::vector<std::pair<std::int64_t, BigInt>>;

// Step weights over the common denominator 2q for mu = p/q:
// zero -> 2(q-p), each sign -> p.
struct StepWeights {
    BigInt rest;
    BigInt move;
    BigInt denom;
};

StepWeights step_weights(const WalkParams& params) {
    const BigInt p = params.mu().num();
    const BigInt q = params.mu().den();
    return {BigInt(2 * (q - p)), p, BigInt(2 * q)};
}

// Integer weights c_j (j in [-m, m]) with P(eta_1+...+eta_m = j) = c_j / (2q)^m.
std::vector<BigInt> equal_steps_kernel(std::uint64_t m, const StepWeights& w) {
    std::vector<BigInt> kernel(2 * m + 1);
    std::vector<BigInt> rest_pow(m + 1);
    std::vector<BigInt> move_pow(m + 1);
    rest_pow[0] = 1;
    move_pow[0] = 1;
    for (std::uint64_t i = 1; i <= m; ++i) {
        rest_pow[i] = rest_pow[i - 1] * w.rest;
        move_pow[i] = move_pow[i - 1] * w.move;
    }
    // j copies at rest, m - j moving; a net displacement a needs (a + m - j)/2 plus signs.
    for (std::uint64_t j = 0; j <= m; ++j) {
        if (j > 0 && sgn(w.rest) == 0) {
            break;
        }
        const std::uint64_t moving = m - j;
        const BigInt base = binomial(m, j) * rest_pow[j] * move_pow[moving];
        for (std::uint64_t plus = 0; plus <= moving; ++plus) {
            const auto a = static_cast<std::int64_t>(2 * plus) - static_cast<std::int64_t>(moving);
            kernel[static_cast<std::size_t>(a + static_cast<std::int64_t>(m))] +=
                base * binomial(moving, plus);
        }
    }
    return kernel;
}

Law convolve(const Law& law, std::int64_t step, const std::vector<std::pair<std::int64_t, BigInt>>& kernel) {
    const std::int64_t a = kernel.front().first * step;
    const std::int64_t b = kernel.back().first * step;
    const std::int64_t lo = law.front().first + std::min(a, b);
    const std::int64_t hi = law.back().first + std::max(a, b);
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t products = static_cast<std::uint64_t>(law.size()) * kernel.size();
    Law out;
    if (span <= std::max<std::uint64_t>(8 * products, 64) && span <= (1u << 24)) {
        std::vector<BigInt> dense(span);
        for (const auto& [jv, jw] : kernel) {
            const std::int64_t shift = jv * step - lo;
            for (const auto& [a, w] : law) {
                mpz_addmul(dense[static_cast<std::size_t>(a + shift)].get_mpz_t(), w.get_mpz_t(),
                           jw.get_mpz_t());
            }
        }
        for (std::uint64_t i = 0; i < span; ++i) {
            if (sgn(dense[i]) != 0) {
                out.emplace_back(lo + static_cast<std::int64_t>(i), std::move(dense[i]));
            }
        }
        return out;
    }
    out.reserve(products);
    for (const auto& [jv, jw] : kernel) {
        for (const auto& [a, w] : law) {
            out.emplace_back(a + jv * step, w * jw);
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    Law merged;
    for (auto& e : out) {
        if (!merged.empty() && merged.back().first == e.first) {
            merged.back().second += e.second;
        } else {
            merged.push_back(std::move(e));
        }
    }
    return merged;
}

}  // namespace

WeightedLaw weighted_law(const Multiset& v, const WalkParams& p, const WalkOptions& opts) {
    const BigInt total = v.abs_sum();
    if (total > BigInt(static_cast<unsigned long>(opts.support_cap))) {
        throw ResourceError("support too large (sum |v_i| = " + total.get_str() + " exceeds cap " +
                            std::to_string(opts.support_cap) + "); use fourier_estimate");
    }
    const StepWeights w = step_weights(p);
    WeightedLaw law;
    law.atoms.emplace_back(0, BigInt(1));
    law.denominator = 1;

    const std::vector<std::pair<std::int64_t, BigInt>> three_point = [&] {
        std::vector<std::pair<std::int64_t, BigInt>> k;
        k.emplace_back(-1, w.move);
        if (sgn(w.rest) != 0) {
            k.emplace_back(0, w.rest);
        }
        k.emplace_back(1, w.move);
        return k;
    }();

    for (const auto& [value, mult] : v.entries()) {
        if (sgn(value) == 0) {
            // A zero step leaves the law unchanged; its weight cancels.
            continue;
        }
        const std::int64_t step = value.get_si();
        if (opts.merge_repeats && mult > 1) {
            const auto kernel_weights = equal_steps_kernel(mult, w);
            std::vector<std::pair<std::int64_t, BigInt>> kernel;
            for (std::size_t i = 0; i < kernel_weights.size(); ++i) {
                if (sgn(kernel_weights[i]) != 0) {
                    kernel.emplace_back(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(mult),
                                        kernel_weights[i]);
                }
            }
            law.atoms = convolve(law.atoms, step, kernel);
            law.denominator *= pow(w.denom, mult);
        } else {
            for (std::uint64_t i = 0; i < mult; ++i) {
                law.atoms = convolve(law.atoms, step, three_point);
                law.denominator *= w.denom;
            }
        }
    }
    return law;
}

Distribution exact_distribution(const Multiset& v, const WalkParams& p, const WalkOptions& opts) {
    const WeightedLaw law = weighted_law(v, p, opts);
    std::vector<Atom> atoms;
    atoms.reserve(law.atoms.size());
    for (const auto& [value, weight] : law.atoms) {
        atoms.push_back({value, Rational(weight, law.denominator)});
    }
    return Distribution(std::move(atoms));
}

ConcentrationResult concentration(const Multiset& v, const WalkParams& p, const WalkOptions& opts) {
    const WeightedLaw law = weighted_law(v, p, opts);
    const std::pair<std::int64_t, BigInt>* best = nullptr;
    for (const auto& atom : law.atoms) {
        if (best == nullptr) {
            best = &atom;
            continue;
        }
        const int c = cmp(atom.second, best->second);
        if (c > 0) {
            best = &atom;
        } else if (c == 0) {
            const auto ma = atom.first < 0 ? -atom.first : atom.first;
            const auto mb = best->first < 0 ? -best->first : best->first;
            if (ma < mb || (ma == mb && atom.first >= 0)) {
                best = &atom;
            }
        }
    }
    return {best->first, Rational(best->second, law.denominator)};
}

Rational equal_steps_atom(std::uint64_t m, const WalkParams& p, const BigInt& a) {
    const Rational rest = Rational(1) - p.mu();
    const Rational half = p.mu() / Rational(2);
    Rational total;
    for (std::uint64_t j = 0; j <= m; ++j) {
        const std::uint64_t moving = m - j;
        // C(m - j, (a + m - j) / 2), zero unless the index is an integer in range.
        const BigInt twice = a + BigInt(static_cast<unsigned long>(moving));
        if (sgn(twice) < 0 || mpz_odd_p(twice.get_mpz_t()) != 0) {
            continue;
        }
        const BigInt idx = twice / 2;
        if (idx > BigInt(static_cast<unsigned long>(moving))) {
            continue;
        }
        const Rational term = Rational(binomial(m, j)) * pow(rest, j) * pow(half, moving) *
                              Rational(binomial(moving, idx.get_ui()));
        total += term;
    }
    return total;
}

namespace {

// cos(2 pi * value * (2i+1) / (2 grid)) with the argument reduced exactly.
double midpoint_cos(const BigInt& value, std::uint64_t i, std::uint64_t grid) {
    const BigInt period = BigInt(static_cast<unsigned long>(2 * grid));
    BigInt r = value * BigInt(static_cast<unsigned long>(2 * i + 1));
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), period.get_mpz_t());
    const double frac = static_cast<double>(r.get_ui()) / static_cast<double>(2 * grid);
    return std::cos(2.0 * std::numbers::pi * frac);
}

}  // namespace

FourierEstimate fourier_estimate(const Multiset& v, const WalkParams& p, std::size_t grid) {
    if (p.mu() > Rational(1, 2)) {
        throw DomainError("fourier_estimate requires mu <= 1/2");
    }
    if (grid < 16) {
        throw DomainError("fourier_estimate requires grid >= 16");
    }
    if (v.empty()) {
        return {1.0, 0.0};
    }
    const double mu = p.mu().to_double();
    double sum = 0.0;
    for (std::size_t i = 0; i < grid; ++i) {
        double f = 1.0;
        for (const auto& [value, mult] : v.entries()) {
            const double factor = (1.0 - mu) + mu * midpoint_cos(value, i, grid);
            f *= std::pow(factor, static_cast<double>(mult));
        }
        sum += f;
    }
    const double lipschitz = 2.0 * std::numbers::pi * mu * v.abs_sum().get_d();
    return {sum / static_cast<double>(grid), lipschitz / (4.0 * static_cast<double>(grid))};
}

double halasz_factor(const Multiset& v, const WalkParams& p, double xi) {
    const long double mu = p.mu().to_double();
    long double f = 1.0L;
    for (const auto& [value, mult] : v.entries()) {
        long double t = static_cast<long double>(value.get_d()) * static_cast<long double>(xi);
        t -= std::floor(t);
        const long double factor = (1.0L - mu) + mu * std::cos(2.0L * std::numbers::pi_v<long double> * t);
        f *= std::pow(factor, static_cast<long double>(mult));
    }
    return static_cast<double>(f);
}

}  // namespace lwo
