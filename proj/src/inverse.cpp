#include "lwo/inverse.hpp"

#include "lwo/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

namespace lwo {

RankOverflowError::RankOverflowError(std::vector<BigInt> w, std::uint64_t extending)
    : std::runtime_error("rank overflow: " + std::to_string(extending) + " elements still extend a tuple of length " +
                         std::to_string(w.size())),
      w_(std::move(w)),
      extending_(extending) {}

namespace {

struct Candidate {
    BigInt value;
    std::uint64_t mult = 0;
};

// Highest multiplicity first, then smallest |value|, then the positive one.
bool selection_before(const Candidate& a, const Candidate& b) {
    if (a.mult != b.mult) {
        return a.mult > b.mult;
    }
    const int c = mpz_cmpabs(a.value.get_mpz_t(), b.value.get_mpz_t());
    if (c != 0) {
        return c < 0;
    }
    return a.value > b.value;
}

std::vector<Candidate> nonzero_candidates(const Multiset& v) {
    std::vector<Candidate> out;
    for (const auto& [value, mult] : v.entries()) {
        if (sgn(value) != 0) {
            out.push_back({value, mult});
        }
    }
    return out;
}

std::uint64_t square(std::int64_t k) { return static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(k); }

// Membership in the cube S(w) through the 0/1 form sum b_i (2 w_i) = x + sum w_i.
class CubeSearcher {
public:
    explicit CubeSearcher(const std::vector<BigInt>& w) {
        if (w.size() > 30) {
            throw ResourceError("cube search budget exceeded: |w| = " + std::to_string(w.size()) + " > 30");
        }
        std::vector<Rational> gens;
        for (const auto& x : w) {
            gens.emplace_back(BigInt(2 * x));
            total_ += x;
        }
        SearchLimits limits;
        limits.max_rank = 30;
        searcher_ = std::make_unique<GapSearcher>(
            Gap(Rational(BigInt(-total_)), std::move(gens), std::vector<std::int64_t>(w.size(), 0),
                std::vector<std::int64_t>(w.size(), 1)),
            limits);
    }

    std::optional<std::vector<int>> find(const BigInt& x) const {
        auto m = searcher_->find(Rational(x));
        if (!m) {
            return std::nullopt;
        }
        std::vector<int> eps;
        for (auto c : m->coefficients) {
            eps.push_back(c == 1 ? 1 : -1);
        }
        return eps;
    }

private:
    BigInt total_;
    std::unique_ptr<GapSearcher> searcher_;
};

}  // namespace

CubeCertificate zeroth_inverse(const Multiset& v) {
    if (v.empty()) {
        throw DomainError("zeroth_inverse needs a nonempty multiset");
    }
    CubeCertificate cert;
    cert.zeros = v.count(BigInt(0));
    auto values = nonzero_candidates(v);
    std::sort(values.begin(), values.end(), [](const Candidate& a, const Candidate& b) {
        const int c = mpz_cmpabs(a.value.get_mpz_t(), b.value.get_mpz_t());
        return c != 0 ? c > 0 : a.value > b.value;
    });

    // x joins w only if no relation with coefficients in {-1, 0, 1} appears,
    // i.e. x is outside Q(w, 1). Then the signed sums over w stay distinct.
    std::vector<BigInt> w;
    SearchLimits limits;
    limits.max_rank = 30;
    auto relation = std::make_unique<GapSearcher>(Gap::q(w, 1), limits);
    // Witness found when a copy was rejected, over the prefix of w at that time.
    std::map<BigInt, std::vector<int>> prefix_witness;
    for (const auto& c : values) {
        for (std::uint64_t copy = 0; copy < c.mult; ++copy) {
            if (auto m = relation->find(Rational(c.value))) {
                prefix_witness.emplace(c.value, std::vector<int>(m->coefficients.begin(), m->coefficients.end()));
                break;
            }
            if (w.size() == 30) {
                throw ResourceError("cube search budget exceeded: |w| > 30");
            }
            w.push_back(c.value);
            relation = std::make_unique<GapSearcher>(Gap::q(w, 1), limits);
        }
    }
    const auto searcher = std::make_unique<CubeSearcher>(w);

    cert.w = w;
    for (const auto& c : values) {
        CubeWitness wit;
        wit.value = c.value;
        wit.multiplicity = c.mult;
        if (auto eps = searcher->find(c.value)) {
            wit.signs = std::move(*eps);
            wit.full_cube = true;
        } else if (auto it = prefix_witness.find(c.value); it != prefix_witness.end()) {
            wit.signs = it->second;
            wit.signs.resize(w.size(), 0);
        } else {
            wit.signs.assign(w.size(), 0);
            const auto pos = std::find(w.begin(), w.end(), c.value) - w.begin();
            wit.signs[static_cast<std::size_t>(pos)] = 1;
        }
        cert.witnesses.push_back(std::move(wit));
    }
    return cert;
}

DilateCoverCertificate first_inverse(const Multiset& v, const WalkParams& /*p*/, std::int64_t d, std::int64_t k,
                                     const SearchLimits& limits) {
    if (k < 2) {
        throw DomainError("first_inverse needs k >= 2");
    }
    if (d < 1) {
        throw DomainError("first_inverse needs d >= 1");
    }
    const std::uint64_t k2 = square(k);
    std::vector<BigInt> w;
    // (w, x) stays k-dissociated iff x has no torsion <= k against Q(w, k);
    // Q(w, k) only grows, so a non-extending element never extends again.
    std::vector<Candidate> extending = nonzero_candidates(v);
    for (;;) {
        if (!w.empty()) {
            const GapSearcher q(Gap::q(w, k), limits);
            std::erase_if(extending, [&](const Candidate& c) {
                return torsion(Rational(c.value), q, static_cast<std::uint64_t>(k)).finite();
            });
        }
        std::uint64_t count = 0;
        for (const auto& c : extending) {
            count += c.mult;
        }
        if (count < k2) {
            break;
        }
        if (static_cast<std::int64_t>(w.size()) + 1 >= d) {
            throw RankOverflowError(w, count);
        }
        const auto best = std::min_element(extending.begin(), extending.end(), selection_before);
        w.push_back(best->value);
    }

    DilateCoverCertificate cert;
    cert.w = w;
    cert.k = k;
    cert.d = d;
    cert.coverage = dilate_coverage(v, w, k, limits);
    for (const auto& e : cert.coverage.entries) {
        if (!e.tau) {
            cert.exceptional.add(e.value, e.multiplicity);
        }
    }
    return cert;
}

namespace {

// Given coefficients m of y in the progression Q(w, .) + sum_j Q(W_j, .),
// returns integer c with P * y = sum_l c_l w_l, where stage j satisfies
// prod_j W_j = sum_l rep_{j,l} w_l.
std::vector<BigInt> lift(const std::vector<std::int64_t>& m, std::size_t r, const BigInt& P,
                         const std::vector<BigInt>& prods, const std::vector<RefinementStage>& stages) {
    std::vector<BigInt> c(r);
    for (std::size_t l = 0; l < r; ++l) {
        c[l] = P * from_i64(m[l]);
    }
    for (std::size_t j = 0; j + r < m.size(); ++j) {
        if (m[r + j] == 0) {
            continue;
        }
        const BigInt factor = from_i64(m[r + j]) * (P / prods[j]);
        for (std::size_t l = 0; l < r; ++l) {
            c[l] += factor * stages[j].representation[l];
        }
    }
    return c;
}

}  // namespace

SecondInverseOutcome second_inverse(const Multiset& v, const WalkParams& p, std::int64_t d, std::int64_t k,
                                    const Rational& eps, const InverseConstants& constants,
                                    const SearchLimits& limits) {
    const std::int64_t K = constants.K;
    if (K < 2) {
        throw DomainError("second_inverse needs K >= 2");
    }
    if (k < constants.k0) {
        throw DomainError("second_inverse needs k >= k0 = " + std::to_string(constants.k0));
    }
    if (eps.sign() <= 0) {
        throw DomainError("second_inverse needs eps > 0");
    }
    DilateCoverCertificate first;
    try {
        first = first_inverse(v, p, d, k, limits);
    } catch (const RankOverflowError& e) {
        return SecondInverseFailure{e.what(), e.w(), {}};
    }
    const std::vector<BigInt>& w = first.w;
    const std::size_t r = w.size();
    const std::uint64_t k2 = square(k);

    Multiset current;
    for (const auto& e : first.coverage.entries) {
        if (e.tau && sgn(e.value) != 0) {
            current.add(e.value, e.multiplicity);
        }
    }

    Gap Q = Gap::q(w, static_cast<std::int64_t>(k2));
    std::vector<RefinementStage> trace;
    std::vector<BigInt> prods;
    BigInt P = 1;
    BigInt L = from_i64(static_cast<std::int64_t>(k2));
    BigInt L_rep = L;
    const double guard = static_cast<double>(d + 1) * std::log(static_cast<double>(k)) /
                             std::log(static_cast<double>(K)) +
                         1.0;

    for (;;) {
        const GapSearcher twice(iterated_sum(Q, 2), limits);
        std::vector<Candidate> eligible;
        std::uint64_t count = 0;
        for (const auto& [value, mult] : current.entries()) {
            if (!torsion(Rational(value), twice, static_cast<std::uint64_t>(K - 1)).finite()) {
                eligible.push_back({value, mult});
                count += mult;
            }
        }
        if (count < k2) {
            break;
        }
        if (static_cast<double>(trace.size() + 1) > guard) {
            return SecondInverseFailure{"iteration guard: stage " + std::to_string(trace.size() + 1) +
                                            " exceeds (d+1) log_K k + 1",
                                        w, trace};
        }
        std::sort(eligible.begin(), eligible.end(), selection_before);
        const BigInt W = eligible.front().value;
        const auto t = torsion(Rational(W), twice, static_cast<std::uint64_t>(k));
        if (!t.finite() || *t.tau < static_cast<std::uint64_t>(K)) {
            return SecondInverseFailure{"selected element " + to_string(W) +
                                            " has torsion outside [K, k] against 2Q",
                                        w, trace};
        }
        const std::uint64_t tau = *t.tau;
        RefinementStage stage;
        stage.W = W;
        stage.tau = tau;
        stage.eligible = count;
        stage.representation = lift(t.witness->coefficients, r, P, prods, trace);
        const BigInt tb(static_cast<unsigned long>(tau));
        L *= tb + tb * tb;
        L_rep *= tb + 2 * tb * tb;
        stage.L = L;
        stage.L_rep = L_rep;
        P *= tb;
        prods.push_back(P);
        trace.push_back(std::move(stage));

        std::uint64_t to_remove = k2;
        for (const auto& c : eligible) {
            to_remove -= current.remove(c.value, std::min(c.mult, to_remove));
            if (to_remove == 0) {
                break;
            }
        }
        Q = minkowski_sum(Q, Gap::q({W}, static_cast<std::int64_t>(tau * tau)));
    }

    GapCertificate cert;
    cert.w = w;
    cert.k = k;
    cert.d = d;
    cert.K = K;
    cert.trace = trace;
    const BigInt kfact = factorial(static_cast<unsigned long>(K));
    const BigInt bound = 2 * kfact * L_rep;
    const auto bound64 = to_i64(bound);
    if (!bound64) {
        throw ResourceError("second_inverse: final box bound " + to_string(bound) + " exceeds int64");
    }
    cert.s = r == 0 ? BigInt(1) : BigInt(kfact * P);
    std::vector<Rational> gens;
    for (const auto& x : w) {
        gens.push_back(Rational(x, cert.s));
    }
    cert.q = Gap::symmetric(std::move(gens), std::vector<std::int64_t>(r, *bound64));

    const GapSearcher twice(iterated_sum(Q, 2), limits);
    for (const auto& [value, mult] : v.entries()) {
        if (sgn(value) == 0) {
            cert.members.push_back({value, mult, MembershipWitness{std::vector<std::int64_t>(r, 0)}});
            continue;
        }
        const auto t = r == 0 ? TorsionResult{} : torsion(Rational(value), twice, static_cast<std::uint64_t>(K));
        if (!t.finite()) {
            cert.exceptional.add(value, mult);
            continue;
        }
        const BigInt scale = kfact / BigInt(static_cast<unsigned long>(*t.tau));
        const auto c = lift(t.witness->coefficients, r, P, prods, trace);
        MembershipWitness mw;
        for (const auto& cl : c) {
            const auto x = to_i64(BigInt(scale * cl));
            if (!x) {
                throw ResourceError("second_inverse: witness coefficient exceeds int64");
            }
            mw.coefficients.push_back(*x);
        }
        cert.members.push_back({value, mult, std::move(mw)});
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Verification

bool VerificationReport::passed() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.passed; });
}

bool VerificationReport::structural_passed() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.conditional || c.passed; });
}

const Clause* VerificationReport::find(const std::string& name) const {
    for (const auto& c : clauses) {
        if (c.name == name) {
            return &c;
        }
    }
    return nullptr;
}

bool power_at_most(const BigInt& a, std::int64_t k, const Rational& e) {
    if (a <= 1) {
        return true;
    }
    if (k <= 1) {
        return false;
    }
    const auto den = to_i64(e.den());
    const auto num = to_i64(e.num());
    if (den && num && *den <= 64 && *num >= 0 && *num <= 1'000'000) {
        return pow(a, static_cast<unsigned long>(*den)) <=
               pow(from_i64(k), static_cast<unsigned long>(*num));
    }
    const long double lhs = std::log(static_cast<long double>(mpz_get_d(a.get_mpz_t())));
    return lhs <= static_cast<long double>(e.to_double()) * std::log(static_cast<long double>(k));
}

namespace {

void add(VerificationReport& r, std::string name, bool passed, bool conditional, std::string detail = {}) {
    r.clauses.push_back({std::move(name), passed, conditional, std::move(detail)});
}

void hypothesis(VerificationReport& r, const Multiset& v, const WalkParams& p, const Rational& threshold,
                bool strict) {
    r.threshold = threshold;
    try {
        r.concentration = concentration(v, p).probability;
        r.hypothesis_holds = strict ? *r.concentration > threshold : *r.concentration >= threshold;
    } catch (const std::exception&) {
        // Support too large for the exact law; the hypothesis stays unevaluated.
    }
}

Multiset from_vector(const std::vector<BigInt>& w) {
    Multiset m;
    for (const auto& x : w) {
        m.add(x);
    }
    return m;
}

std::string str(std::uint64_t x) { return std::to_string(x); }

}  // namespace

VerificationReport verify_certificate(const CubeCertificate& cert, const Multiset& v, const Budget& budget) {
    VerificationReport r;
    r.kind = "cube";
    add(r, "subset", v.contains_submultiset(from_vector(cert.w)), false);

    bool ok = true;
    std::string detail;
    std::map<BigInt, std::uint64_t> seen;
    for (const auto& wit : cert.witnesses) {
        bool good = wit.signs.size() == cert.w.size();
        BigInt sum;
        bool all_nonzero = true;
        for (std::size_t i = 0; good && i < wit.signs.size(); ++i) {
            if (wit.signs[i] < -1 || wit.signs[i] > 1) {
                good = false;
            }
            all_nonzero = all_nonzero && wit.signs[i] != 0;
            sum += wit.signs[i] * cert.w[i];
        }
        good = good && sum == wit.value && (!wit.full_cube || all_nonzero);
        if (!good && ok) {
            detail = "witness for " + to_string(wit.value) + " does not re-evaluate";
        }
        ok = ok && good;
        seen[wit.value] += wit.multiplicity;
    }
    for (const auto& [value, mult] : v.entries()) {
        if (sgn(value) != 0 && seen[value] != mult) {
            if (ok) {
                detail = "value " + to_string(value) + " lacks a witness";
            }
            ok = false;
        }
    }
    if (cert.zeros != v.count(BigInt(0))) {
        ok = false;
        detail = "zero count mismatch";
    }
    add(r, "witnesses", ok, false, detail);
    add(r, "size", static_cast<std::int64_t>(cert.w.size()) <= budget.d, true,
        "|w| = " + str(cert.w.size()) + ", d = " + std::to_string(budget.d));
    hypothesis(r, v, WalkParams(Rational(1)), pow(Rational(1, 2), static_cast<unsigned long>(budget.d + 1)), true);
    return r;
}

VerificationReport verify_certificate(const DilateCoverCertificate& cert, const Multiset& v, const Budget& budget) {
    VerificationReport r;
    r.kind = "dilate_cover";
    const std::int64_t k = budget.k;
    add(r, "subset", v.contains_submultiset(from_vector(cert.w)), false);
    try {
        const auto dis = is_k_dissociated(cert.w, k);
        add(r, "dissociated", dis.dissociated, false);
    } catch (const ResourceError& e) {
        add(r, "dissociated", false, false, e.what());
    }
    add(r, "rank", static_cast<std::int64_t>(cert.w.size()) <= budget.d - 1, false,
        "r = " + str(cert.w.size()) + ", d - 1 = " + std::to_string(budget.d - 1));

    const Gap q = Gap::q(cert.w, k);
    bool ok = true;
    std::string detail;
    std::uint64_t exceptional = 0;
    std::map<BigInt, std::uint64_t> seen;
    for (const auto& e : cert.coverage.entries) {
        seen[e.value] += e.multiplicity;
        if (!e.tau) {
            exceptional += e.multiplicity;
            if (cert.exceptional.count(e.value) != e.multiplicity) {
                ok = false;
                detail = "exceptional list disagrees with coverage for " + to_string(e.value);
            }
            continue;
        }
        const bool good = *e.tau >= 1 && *e.tau <= static_cast<std::uint64_t>(k) && e.witness &&
                          check_witness(q, *e.witness, Rational(e.value) * Rational(static_cast<long>(*e.tau)));
        if (!good && ok) {
            detail = "witness for " + to_string(e.value) + " does not re-evaluate";
        }
        ok = ok && good;
    }
    for (const auto& [value, mult] : v.entries()) {
        if (seen[value] != mult) {
            ok = false;
            detail = "value " + to_string(value) + " missing from coverage";
        }
    }
    if (cert.exceptional.size() != exceptional) {
        ok = false;
        detail = "exceptional multiset size mismatch";
    }
    add(r, "coverage", ok, false, detail);
    add(r, "exceptional", exceptional <= square(k), false,
        str(exceptional) + " exceptional, k^2 = " + str(square(k)));
    if (budget.params) {
        hypothesis(r, v, *budget.params, budget.C * pow(Rational(1, BigInt(from_i64(k))), budget.d), false);
    }
    return r;
}

VerificationReport verify_certificate(const GapCertificate& cert, const Multiset& v, const Budget& budget) {
    VerificationReport r;
    r.kind = "gap";
    const std::int64_t k = budget.k;
    const std::int64_t d = budget.d;

    bool ok = true;
    std::string detail;
    std::map<BigInt, std::uint64_t> seen;
    for (const auto& m : cert.members) {
        seen[m.value] += m.multiplicity;
        if (!check_witness(cert.q, m.witness, Rational(m.value))) {
            if (ok) {
                detail = "witness for " + to_string(m.value) + " does not re-evaluate";
            }
            ok = false;
        }
    }
    for (const auto& [value, mult] : cert.exceptional.entries()) {
        seen[value] += mult;
    }
    for (const auto& [value, mult] : v.entries()) {
        if (seen[value] != mult) {
            if (ok) {
                detail = "value " + to_string(value) + " neither witnessed nor exceptional";
            }
            ok = false;
        }
    }
    if (!v.contains_submultiset(cert.exceptional)) {
        ok = false;
        detail = "exceptional elements are not drawn from v";
    }
    add(r, "membership", ok, false, detail);

    bool gens_ok = sgn(cert.s) > 0;
    for (const auto& u : cert.q.generators()) {
        const Rational su = u * Rational(cert.s);
        gens_ok = gens_ok && su.is_integer() && v.count(su.num()) > 0;
    }
    add(r, "generators", gens_ok, false);

    bool trace_ok = true;
    BigInt L = BigInt(static_cast<unsigned long>(square(k)));
    BigInt L_rep = L;
    BigInt P = 1;
    for (const auto& st : cert.trace) {
        const BigInt tb(static_cast<unsigned long>(st.tau));
        L *= tb + tb * tb;
        L_rep *= tb + 2 * tb * tb;
        P *= tb;
        trace_ok = trace_ok && st.tau >= static_cast<std::uint64_t>(cert.K) &&
                   st.tau <= static_cast<std::uint64_t>(k) && st.L == L && st.L_rep == L_rep;
        // P_i W_i = sum_l c_l w_l re-evaluated.
        BigInt lhs = P * st.W;
        BigInt rhs;
        for (std::size_t l = 0; l < cert.w.size() && l < st.representation.size(); ++l) {
            rhs += st.representation[l] * cert.w[l];
        }
        trace_ok = trace_ok && st.representation.size() == cert.w.size() && lhs == rhs;
    }
    add(r, "trace", trace_ok, false);

    add(r, "rank", static_cast<std::int64_t>(cert.q.rank()) <= d - 1, false,
        "rank " + str(cert.q.rank()) + ", d - 1 = " + std::to_string(d - 1));
    const BigInt vol = cert.q.volume();
    add(r, "volume", power_at_most(vol, k, Rational(2 * (d * d - 1)) + budget.eps), true,
        "volume " + to_string(vol));
    const long double allowed = static_cast<long double>(budget.eps.to_double()) * static_cast<long double>(k) *
                                static_cast<long double>(k) * std::log(static_cast<long double>(k));
    add(r, "exceptional", static_cast<long double>(cert.exceptional.size()) <= allowed, true,
        str(cert.exceptional.size()) + " exceptional, allowed " + std::to_string(static_cast<double>(allowed)));
    add(r, "s_bound", power_at_most(cert.s, k, Rational(d) + budget.eps), true, "s = " + to_string(cert.s));
    if (budget.params) {
        hypothesis(r, v, *budget.params, budget.C * pow(Rational(1, BigInt(from_i64(k))), budget.d), false);
    }
    return r;
}

}  // namespace lwo
