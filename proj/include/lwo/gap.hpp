#pragma once

#include "lwo/bigint.hpp"
#include "lwo/multiset.hpp"
#include "lwo/rational.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace lwo {

struct SearchLimits {
    std::size_t max_rank = 8;
    // Upper bound on enumerated states per search.
    std::uint64_t max_states = 1'000'000'000;
    // Upper bound on states held in memory at once (meet-in-the-middle tables,
    // value lists for properness).
    std::uint64_t max_stored = 50'000'000;
    // Volumes up to this are searched by plain enumeration of the box.
    std::uint64_t full_enumeration_volume = 10'000;
};

/// Generalized arithmetic progression
///   { c + m_1 a_1 + ... + m_d a_d : lower_i <= m_i <= upper_i }
/// with rational offset and generators. Rank 0 is the singleton {c}.
class Gap {
public:
    Gap() = default;
    Gap(Rational offset, std::vector<Rational> generators, std::vector<std::int64_t> lower,
        std::vector<std::int64_t> upper);

    static Gap singleton(Rational c) { return Gap(std::move(c), {}, {}, {}); }
    // Symmetric progression sum m_i g_i, |m_i| <= bounds_i.
    static Gap symmetric(std::vector<Rational> generators, std::vector<std::int64_t> bounds);
    // Q(w, k): one generator per element of w (with multiplicity), |m_i| <= k.
    static Gap q(const std::vector<BigInt>& w, std::int64_t k);

    std::size_t rank() const { return generators_.size(); }
    const Rational& offset() const { return offset_; }
    const std::vector<Rational>& generators() const { return generators_; }
    const std::vector<std::int64_t>& lower() const { return lower_; }
    const std::vector<std::int64_t>& upper() const { return upper_; }
    bool is_symmetric() const;

    BigInt volume() const;
    // Phi(m) = c + sum m_i a_i.
    Rational evaluate(std::span<const std::int64_t> m) const;
    bool in_box(std::span<const std::int64_t> m) const;
    // max |x| over x in the progression.
    Rational max_abs() const;

    friend bool operator==(const Gap&, const Gap&) = default;

private:
    Rational offset_;
    std::vector<Rational> generators_;
    std::vector<std::int64_t> lower_;
    std::vector<std::int64_t> upper_;
};

struct MembershipWitness {
    std::vector<std::int64_t> coefficients;
    friend bool operator==(const MembershipWitness&, const MembershipWitness&) = default;
};

// Phi(witness) == x and the witness lies in the box.
bool check_witness(const Gap& g, const MembershipWitness& w, const Rational& x);

/// Membership oracle prepared once for a progression and queried many times.
/// Small boxes are enumerated; larger ones use a meet-in-the-middle split with
/// the widest coordinate solved in closed form.
class GapSearcher {
public:
    explicit GapSearcher(const Gap& g, const SearchLimits& limits = {});
    ~GapSearcher();
    GapSearcher(GapSearcher&&) noexcept;
    GapSearcher& operator=(GapSearcher&&) noexcept;

    std::optional<MembershipWitness> find(const Rational& x) const;
    const Gap& gap() const { return gap_; }

    struct Impl;

private:
    Gap gap_;
    std::unique_ptr<Impl> impl_;
};

std::optional<MembershipWitness> contains(const Gap& g, const Rational& x, const SearchLimits& limits = {});

struct ProperResult {
    bool proper = true;
    // Two distinct box points with the same image when not proper.
    std::optional<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>> collision;
};

ProperResult is_proper(const Gap& g, const SearchLimits& limits = {});

Gap minkowski_sum(const Gap& a, const Gap& b);
Gap scalar_dilate(const Gap& g, const Rational& s);
// Iterated sumset kP: offset and bounds scaled by k.
Gap iterated_sum(const Gap& g, std::int64_t k);

// Signs eps_i in {-1, +1} (one per element of w, in expanded order) with
// sum eps_i w_i = x, by meet-in-the-middle. Requires |w| <= 30.
std::optional<std::vector<int>> cube_contains(const std::vector<BigInt>& w, const BigInt& x);

struct TorsionResult {
    std::optional<std::uint64_t> tau;  // empty: infinite relative to the bound
    std::optional<MembershipWitness> witness;
    bool finite() const { return tau.has_value(); }
};

// Least tau in [1, bound] with tau * x in g.
TorsionResult torsion(const Rational& x, const Gap& g, std::uint64_t bound, const SearchLimits& limits = {});
TorsionResult torsion(const Rational& x, const GapSearcher& g, std::uint64_t bound);

struct DissociationWitness {
    std::vector<std::int64_t> coefficients;
};

struct DissociationCheck {
    bool dissociated = true;
    std::optional<DissociationWitness> witness;
};

// No nontrivial m with |m_i| <= k and sum m_i w_i = 0. Repeated values count
// as distinct positions.
DissociationCheck is_k_dissociated(const std::vector<BigInt>& w, std::int64_t k,
                                   std::uint64_t budget = 100'000'000);

struct CoverageEntry {
    BigInt value;
    std::uint64_t multiplicity = 0;
    std::optional<std::uint64_t> tau;          // empty: exceptional
    std::optional<MembershipWitness> witness;  // tau * value in Q(w, k)
};

struct CoverageReport {
    std::vector<CoverageEntry> entries;  // one per distinct value of v
    std::uint64_t covered = 0;           // with multiplicity
    std::uint64_t exceptional = 0;       // with multiplicity
};

// For each v_i, the least tau in [1, k] with tau * v_i in Q(w, k).
CoverageReport dilate_coverage(const Multiset& v, const std::vector<BigInt>& w, std::int64_t k,
                               const SearchLimits& limits = {});

// min |sum m_i g_i| over nonzero values with lower_i <= m_i <= upper_i;
// empty when every value is zero. Offsets are ignored.
std::optional<Rational> min_nonzero_abs_linear(const Gap& g, const SearchLimits& limits = {});

// Some m in the (symmetric) box with 0 < |sum m_i g_i| < bound, or empty when
// none exists. Exact for any box size: LLL reduction of the lattice
// {(m_i / upper_i, <m, g> / bound)} followed by Fincke-Pohst enumeration of
// its points of squared norm <= rank + 1. ResourceError after max_nodes
// enumeration nodes.
std::optional<std::vector<std::int64_t>> small_nonzero_value(const Gap& g, const Rational& bound,
                                                            std::uint64_t max_nodes = 10'000'000);

// All values of a progression (with repetition, box order). Small volumes only.
std::vector<Rational> enumerate_values(const Gap& g, const SearchLimits& limits = {});

}  // namespace lwo
