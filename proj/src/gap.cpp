#include "lwo/gap.hpp"

#include "box_search.hpp"
#include "int_ops.hpp"
#include "lwo/error.hpp"

#include <algorithm>
#include <numeric>
#include <type_traits>
#include <variant>

namespace lwo {

using detail::box_volume;
using detail::BoxEngine;
using detail::decode_box_index;
using detail::for_each_box;
using detail::IntOps;
using detail::range_size;

Gap::Gap(Rational offset, std::vector<Rational> generators, std::vector<std::int64_t> lower,
         std::vector<std::int64_t> upper)
    : offset_(std::move(offset)),
      generators_(std::move(generators)),
      lower_(std::move(lower)),
      upper_(std::move(upper)) {
    if (generators_.size() != lower_.size() || generators_.size() != upper_.size()) {
        throw DimensionError("gap: generator and bound lists differ in length");
    }
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (lower_[i] > upper_[i]) {
            throw DomainError("gap: lower bound exceeds upper bound at index " + std::to_string(i));
        }
    }
}

Gap Gap::symmetric(std::vector<Rational> generators, std::vector<std::int64_t> bounds) {
    std::vector<std::int64_t> lower(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        if (bounds[i] < 0) {
            throw DomainError("gap: negative symmetric bound");
        }
        lower[i] = -bounds[i];
    }
    return Gap(Rational(0), std::move(generators), std::move(lower), std::move(bounds));
}

Gap Gap::q(const std::vector<BigInt>& w, std::int64_t k) {
    if (k < 0) {
        throw DomainError("Q(w, k) needs k >= 0");
    }
    std::vector<Rational> gens;
    gens.reserve(w.size());
    for (const auto& x : w) {
        gens.emplace_back(x);
    }
    return symmetric(std::move(gens), std::vector<std::int64_t>(w.size(), k));
}

bool Gap::is_symmetric() const {
    if (!offset_.is_zero()) {
        return false;
    }
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (lower_[i] != -upper_[i]) {
            return false;
        }
    }
    return true;
}

BigInt Gap::volume() const {
    BigInt v = 1;
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        v *= from_i64(upper_[i]) - from_i64(lower_[i]) + 1;
    }
    return v;
}

Rational Gap::evaluate(std::span<const std::int64_t> m) const {
    if (m.size() != rank()) {
        throw DimensionError("gap: coefficient vector has wrong length");
    }
    Rational x = offset_;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] != 0) {
            x += generators_[i] * Rational(m[i]);
        }
    }
    return x;
}

bool Gap::in_box(std::span<const std::int64_t> m) const {
    if (m.size() != rank()) {
        return false;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] < lower_[i] || m[i] > upper_[i]) {
            return false;
        }
    }
    return true;
}

Rational Gap::max_abs() const {
    Rational top = offset_;
    Rational bottom = offset_;
    for (std::size_t i = 0; i < rank(); ++i) {
        const Rational a = generators_[i] * Rational(lower_[i]);
        const Rational b = generators_[i] * Rational(upper_[i]);
        top += std::max(a, b);
        bottom += std::min(a, b);
    }
    return std::max(top.abs(), bottom.abs());
}

bool check_witness(const Gap& g, const MembershipWitness& w, const Rational& x) {
    return g.in_box(w.coefficients) && g.evaluate(w.coefficients) == x;
}

namespace {

// Integer image of a gap after clearing denominators: D * Phi(m) = c + sum m_i g_i.
struct Scaled {
    BigInt denom = 1;
    BigInt offset;
    std::vector<BigInt> gens;
    BigInt bound;  // max |sum m_i g_i| over the box
};

Scaled scale(const Gap& g) {
    Scaled s;
    BigInt d = g.offset().den();
    for (const auto& a : g.generators()) {
        mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), a.den().get_mpz_t());
    }
    s.denom = d;
    s.offset = (g.offset() * Rational(d)).num();
    for (std::size_t i = 0; i < g.rank(); ++i) {
        s.gens.push_back((g.generators()[i] * Rational(d)).num());
        const std::int64_t reach = std::max(std::abs(g.lower()[i]), std::abs(g.upper()[i]));
        s.bound += ::abs(s.gens.back()) * from_i64(reach);
    }
    return s;
}

// Runs f with std::type_identity<__int128> when every intermediate fits,
// std::type_identity<BigInt> otherwise.
template <class F>
decltype(auto) dispatch(const BigInt& magnitude, F&& f) {
    if (IntOps<__int128>::fits(magnitude)) {
        return f(std::type_identity<__int128>{});
    }
    return f(std::type_identity<BigInt>{});
}

template <class T>
std::vector<T> convert(const std::vector<BigInt>& xs) {
    std::vector<T> out;
    out.reserve(xs.size());
    for (const auto& x : xs) {
        out.push_back(IntOps<T>::from(x));
    }
    return out;
}

void check_rank(const Gap& g, const SearchLimits& limits) {
    if (g.rank() > limits.max_rank) {
        throw ResourceError("gap search: rank " + std::to_string(g.rank()) + " exceeds configured maximum " +
                            std::to_string(limits.max_rank));
    }
}

std::uint64_t checked_volume(const Gap& g, std::uint64_t cap, const char* what) {
    const std::uint64_t v = box_volume(g.lower(), g.upper());
    if (v > cap) {
        throw ResourceError(std::string(what) + ": volume " + to_string(g.volume()) + " exceeds cap " +
                            std::to_string(cap));
    }
    return v;
}

}  // namespace

struct GapSearcher::Impl {
    Scaled scaled;
    std::variant<std::monostate, BoxEngine<__int128>, BoxEngine<BigInt>> engine;
};

GapSearcher::GapSearcher(const Gap& g, const SearchLimits& limits) : gap_(g), impl_(std::make_unique<Impl>()) {
    check_rank(g, limits);
    impl_->scaled = scale(g);
    const Scaled& s = impl_->scaled;
    // Queries subtract box sums from targets bounded by the same magnitude.
    dispatch(BigInt(4 * s.bound + 1), [&]<class T>(std::type_identity<T>) {
        impl_->engine.template emplace<BoxEngine<T>>(convert<T>(s.gens), g.lower(), g.upper(), limits);
    });
}

GapSearcher::~GapSearcher() = default;
GapSearcher::GapSearcher(GapSearcher&&) noexcept = default;
GapSearcher& GapSearcher::operator=(GapSearcher&&) noexcept = default;

std::optional<MembershipWitness> GapSearcher::find(const Rational& x) const {
    const Scaled& s = impl_->scaled;
    const Rational xs = x * Rational(s.denom);
    if (!xs.is_integer()) {
        return std::nullopt;
    }
    const BigInt t = xs.num() - s.offset;
    if (::abs(t) > s.bound) {
        return std::nullopt;
    }
    std::optional<std::vector<std::int64_t>> m;
    if (const auto* e = std::get_if<BoxEngine<__int128>>(&impl_->engine)) {
        m = e->find(IntOps<__int128>::from(t));
    } else {
        m = std::get<BoxEngine<BigInt>>(impl_->engine).find(t);
    }
    if (!m) {
        return std::nullopt;
    }
    return MembershipWitness{std::move(*m)};
}

std::optional<MembershipWitness> contains(const Gap& g, const Rational& x, const SearchLimits& limits) {
    return GapSearcher(g, limits).find(x);
}

ProperResult is_proper(const Gap& g, const SearchLimits& limits) {
    check_rank(g, limits);
    checked_volume(g, std::min(limits.max_stored, limits.max_states), "is_proper");
    const Scaled s = scale(g);
    return dispatch(BigInt(2 * s.bound + 1), [&]<class T>(std::type_identity<T>) {
        std::vector<std::pair<T, std::uint64_t>> values;
        std::uint64_t idx = 0;
        for_each_box<T>(convert<T>(s.gens), g.lower(), g.upper(), [&](const T& v, const std::vector<std::int64_t>&) {
            values.emplace_back(v, idx++);
            return false;
        });
        std::sort(values.begin(), values.end());
        // Report the collision whose image is closest to the offset, ties to
        // the positive side.
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            if (values[i].first != values[i + 1].first) {
                continue;
            }
            if (i > 0 && values[i - 1].first == values[i].first) {
                continue;
            }
            if (!best) {
                best = i;
                continue;
            }
            const T a = IntOps<T>::abs(values[i].first);
            const T b = IntOps<T>::abs(values[*best].first);
            if (a < b || (a == b && values[i].first > values[*best].first)) {
                best = i;
            }
        }
        ProperResult r;
        if (best) {
            r.proper = false;
            r.collision.emplace(decode_box_index(values[*best].second, g.lower(), g.upper()),
                                decode_box_index(values[*best + 1].second, g.lower(), g.upper()));
        }
        return r;
    });
}

Gap minkowski_sum(const Gap& a, const Gap& b) {
    auto gens = a.generators();
    gens.insert(gens.end(), b.generators().begin(), b.generators().end());
    auto lower = a.lower();
    lower.insert(lower.end(), b.lower().begin(), b.lower().end());
    auto upper = a.upper();
    upper.insert(upper.end(), b.upper().begin(), b.upper().end());
    return Gap(a.offset() + b.offset(), std::move(gens), std::move(lower), std::move(upper));
}

Gap scalar_dilate(const Gap& g, const Rational& s) {
    std::vector<Rational> gens;
    gens.reserve(g.rank());
    for (const auto& a : g.generators()) {
        gens.push_back(a * s);
    }
    return Gap(g.offset() * s, std::move(gens), g.lower(), g.upper());
}

Gap iterated_sum(const Gap& g, std::int64_t k) {
    if (k < 0) {
        throw DomainError("iterated_sum needs k >= 0");
    }
    auto lower = g.lower();
    auto upper = g.upper();
    for (std::size_t i = 0; i < lower.size(); ++i) {
        lower[i] *= k;
        upper[i] *= k;
    }
    return Gap(g.offset() * Rational(k), g.generators(), std::move(lower), std::move(upper));
}

std::optional<std::vector<int>> cube_contains(const std::vector<BigInt>& w, const BigInt& x) {
    if (w.size() > 30) {
        throw DimensionError("cube_contains supports at most 30 elements, got " + std::to_string(w.size()));
    }
    // sum eps_i w_i = x  <=>  sum b_i (2 w_i) = x + sum w_i with b_i in {0, 1}.
    std::vector<Rational> gens;
    BigInt total;
    for (const auto& v : w) {
        gens.emplace_back(BigInt(2 * v));
        total += v;
    }
    const Gap g(Rational(BigInt(-total)), std::move(gens), std::vector<std::int64_t>(w.size(), 0),
                std::vector<std::int64_t>(w.size(), 1));
    SearchLimits limits;
    limits.max_rank = 30;
    const auto m = contains(g, Rational(x), limits);
    if (!m) {
        return std::nullopt;
    }
    std::vector<int> eps(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        eps[i] = m->coefficients[i] == 1 ? 1 : -1;
    }
    return eps;
}

TorsionResult torsion(const Rational& x, const GapSearcher& g, std::uint64_t bound) {
    if (bound < 1) {
        throw DomainError("torsion bound must be at least 1");
    }
    TorsionResult r;
    for (std::uint64_t tau = 1; tau <= bound; ++tau) {
        auto m = g.find(x * Rational(static_cast<long>(tau)));
        if (m) {
            r.tau = tau;
            r.witness = std::move(m);
            return r;
        }
        if (x.is_zero()) {
            break;
        }
    }
    return r;
}

TorsionResult torsion(const Rational& x, const Gap& g, std::uint64_t bound, const SearchLimits& limits) {
    return torsion(x, GapSearcher(g, limits), bound);
}

namespace {

template <class T>
DissociationCheck dissociation_mitm(const std::vector<BigInt>& w, std::int64_t k, std::uint64_t budget) {
    const std::size_t r = w.size();
    const std::size_t half = r / 2;
    std::vector<T> ga;
    std::vector<T> gb;
    for (std::size_t i = 0; i < r; ++i) {
        (i < half ? ga : gb).push_back(IntOps<T>::from(w[i]));
    }
    const std::vector<std::int64_t> lo_a(ga.size(), -k);
    const std::vector<std::int64_t> hi_a(ga.size(), k);
    const std::vector<std::int64_t> lo_b(gb.size(), -k);
    const std::vector<std::int64_t> hi_b(gb.size(), k);
    const std::uint64_t size_a = box_volume(lo_a, hi_a);
    const std::uint64_t size_b = box_volume(lo_b, hi_b);
    if (size_a > budget || size_b > budget - size_a) {
        throw ResourceError("is_k_dissociated: (2k+1)^r over budget for r = " + std::to_string(r) +
                            ", k = " + std::to_string(k));
    }
    // Index of the all-zero state of half A in mixed radix.
    std::uint64_t zero_idx = 0;
    {
        std::uint64_t stride = 1;
        for (std::size_t i = 0; i < ga.size(); ++i) {
            zero_idx += static_cast<std::uint64_t>(k) * stride;
            stride *= static_cast<std::uint64_t>(2 * k + 1);
        }
    }
    std::vector<std::pair<T, std::uint64_t>> table;
    table.reserve(size_a);
    std::uint64_t idx = 0;
    for_each_box<T>(ga, lo_a, hi_a, [&](const T& s, const std::vector<std::int64_t>&) {
        table.emplace_back(s, idx++);
        return false;
    });
    std::sort(table.begin(), table.end());

    DissociationCheck out;
    for_each_box<T>(gb, lo_b, hi_b, [&](const T& s, const std::vector<std::int64_t>& m) {
        const T target = T(0) - s;
        auto it = std::lower_bound(table.begin(), table.end(), std::make_pair(target, std::uint64_t{0}));
        const bool b_zero = std::all_of(m.begin(), m.end(), [](std::int64_t c) { return c == 0; });
        for (; it != table.end() && it->first == target; ++it) {
            if (!b_zero || it->second != zero_idx) {
                auto coeffs = decode_box_index(it->second, lo_a, hi_a);
                coeffs.insert(coeffs.end(), m.begin(), m.end());
                out.dissociated = false;
                out.witness = DissociationWitness{std::move(coeffs)};
                return true;
            }
        }
        return false;
    });
    return out;
}

}  // namespace

DissociationCheck is_k_dissociated(const std::vector<BigInt>& w, std::int64_t k, std::uint64_t budget) {
    if (k < 0) {
        throw DomainError("is_k_dissociated needs k >= 0");
    }
    DissociationCheck out;
    if (w.empty() || k == 0) {
        return out;
    }
    // Cheap relations first: zeros and equal or opposite pairs.
    for (std::size_t i = 0; i < w.size(); ++i) {
        std::vector<std::int64_t> m(w.size(), 0);
        if (sgn(w[i]) == 0) {
            m[i] = 1;
            out.dissociated = false;
            out.witness = DissociationWitness{std::move(m)};
            return out;
        }
        for (std::size_t j = i + 1; j < w.size(); ++j) {
            if (w[i] == w[j] || w[i] == -w[j]) {
                m[i] = 1;
                m[j] = (w[i] == w[j]) ? -1 : 1;
                out.dissociated = false;
                out.witness = DissociationWitness{std::move(m)};
                return out;
            }
        }
    }
    BigInt bound;
    for (const auto& x : w) {
        bound += ::abs(x);
    }
    bound *= 2 * k + 1;
    return dispatch(bound, [&]<class T>(std::type_identity<T>) { return dissociation_mitm<T>(w, k, budget); });
}

CoverageReport dilate_coverage(const Multiset& v, const std::vector<BigInt>& w, std::int64_t k,
                               const SearchLimits& limits) {
    if (k < 1) {
        throw DomainError("dilate_coverage needs k >= 1");
    }
    CoverageReport report;
    if (v.size() == 0) {
        return report;
    }
    const GapSearcher searcher(Gap::q(w, k), limits);
    for (const auto& [value, mult] : v.entries()) {
        CoverageEntry e;
        e.value = value;
        e.multiplicity = mult;
        auto t = torsion(Rational(value), searcher, static_cast<std::uint64_t>(k));
        e.tau = t.tau;
        e.witness = std::move(t.witness);
        if (e.tau) {
            report.covered += mult;
        } else {
            report.exceptional += mult;
        }
        report.entries.push_back(std::move(e));
    }
    return report;
}

std::optional<Rational> min_nonzero_abs_linear(const Gap& g, const SearchLimits& limits) {
    const Scaled s = scale(g);
    if (g.rank() == 0 || sgn(s.bound) == 0) {
        return std::nullopt;
    }
    // Split coordinates into two halves of balanced size; for each state of
    // the second half the nearest nonzero partner is found by binary search.
    std::vector<std::size_t> order(g.rank());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return range_size(g.lower()[x], g.upper()[x]) > range_size(g.lower()[y], g.upper()[y]);
    });
    std::vector<std::size_t> in_a;
    std::vector<std::size_t> in_b;
    std::uint64_t size_a = 1;
    std::uint64_t size_b = 1;
    for (std::size_t i : order) {
        const std::uint64_t r = range_size(g.lower()[i], g.upper()[i]);
        if (size_a <= size_b) {
            in_a.push_back(i);
            size_a = detail::sat_mul(size_a, r);
        } else {
            in_b.push_back(i);
            size_b = detail::sat_mul(size_b, r);
        }
    }
    if (size_a > limits.max_stored || detail::sat_mul(size_b, 64) > limits.max_states) {
        throw ResourceError("min_nonzero_abs_linear: box of volume " + to_string(g.volume()) + " exceeds caps");
    }
    return dispatch(BigInt(2 * s.bound + 1), [&]<class T>(std::type_identity<T>) -> std::optional<Rational> {
        auto pick = [&](const std::vector<std::size_t>& idx, std::vector<T>& gg, std::vector<std::int64_t>& lo,
                        std::vector<std::int64_t>& hi) {
            for (std::size_t i : idx) {
                gg.push_back(IntOps<T>::from(s.gens[i]));
                lo.push_back(g.lower()[i]);
                hi.push_back(g.upper()[i]);
            }
        };
        std::vector<T> ga, gb;
        std::vector<std::int64_t> la, ha, lb, hb;
        pick(in_a, ga, la, ha);
        pick(in_b, gb, lb, hb);
        std::vector<T> table;
        table.reserve(size_a);
        for_each_box<T>(ga, la, ha, [&](const T& v, const std::vector<std::int64_t>&) {
            table.push_back(v);
            return false;
        });
        std::sort(table.begin(), table.end());
        table.erase(std::unique(table.begin(), table.end()), table.end());
        std::optional<T> best;
        auto consider = [&](const T& v) {
            if (v == T(0)) {
                return;
            }
            const T a = IntOps<T>::abs(v);
            if (!best || a < *best) {
                best = a;
            }
        };
        for_each_box<T>(gb, lb, hb, [&](const T& sb, const std::vector<std::int64_t>&) {
            const T target = T(0) - sb;
            auto it = std::lower_bound(table.begin(), table.end(), target);
            if (it != table.end()) {
                if (*it == target) {
                    if (std::next(it) != table.end()) {
                        consider(*std::next(it) + sb);
                    }
                } else {
                    consider(*it + sb);
                }
            }
            if (it != table.begin()) {
                consider(*std::prev(it) + sb);
            }
            return best && *best == T(1);
        });
        if (!best) {
            return std::nullopt;
        }
        return Rational(IntOps<T>::to_big(*best), s.denom);
    });
}

std::vector<Rational> enumerate_values(const Gap& g, const SearchLimits& limits) {
    checked_volume(g, std::min(limits.max_stored, limits.max_states), "enumerate_values");
    const Scaled s = scale(g);
    std::vector<Rational> out;
    for_each_box<BigInt>(s.gens, g.lower(), g.upper(), [&](const BigInt& v, const std::vector<std::int64_t>&) {
        out.emplace_back(BigInt(v + s.offset), s.denom);
        return false;
    });
    return out;
}

}  // namespace lwo
