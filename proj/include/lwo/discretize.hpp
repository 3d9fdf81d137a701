#pragma once

#include "lwo/bigint.hpp"
#include "lwo/gap.hpp"
#include "lwo/rational.hpp"
#include "lwo/report.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lwo {

struct DiscretizeOptions {
    // Candidate scales R = floor(r0 * ratio^j) for |j| <= ladder_span; the
    // ratio defaults to S * V.
    std::int64_t ladder_span = 12;
    std::optional<BigInt> ladder_ratio;
    // Relation search box: |m_i| <= min(M_i * b^level, coefficient_cap) and
    // at most box_cap points in total.
    std::int64_t coefficient_cap = 1000;
    std::uint64_t box_cap = 10'000'000;
    // Covering is checked on every element of P up to this volume and on a
    // deterministic sample beyond it.
    std::uint64_t covering_cap = 1'000'000;
    std::uint64_t sample_size = 20'000;
    SearchLimits limits;
};

struct GeneratorSplit {
    Rational small;
    Rational sparse;
};

struct DiscretizeParams {
    std::int64_t b = 2;
    BigInt s;
    BigInt r0;
    BigInt ratio;
    std::int64_t rung = 0;
    Rational threshold;  // relations kept when |<m, v>| <= threshold
    std::int64_t level = 1;  // escalation level at which the span stabilised
    bool cap_hit = false;    // stabilisation forced by the box cap
};

struct DiscretizationResult {
    BigInt r_scale;
    Gap p_small;
    Gap p_sparse;
    std::vector<GeneratorSplit> decomposition;  // one per generator of P
    DiscretizeParams params;
    std::size_t kernel_rank = 0;
    std::vector<std::vector<std::int64_t>> kernel_basis;
    std::vector<std::size_t> graph_coordinates;  // the subset I
};

struct DiscretizationReport {
    std::vector<Clause> clauses;  // smallness, sparseness, covering, bounds
    bool exhaustive = true;
    double coverage_fraction = 1.0;
    Rational scale_ratio;  // R / r0

    bool passed() const;
    const Clause* find(const std::string& name) const;
};

struct DiscretizationFailure {
    std::string reason;
    std::vector<std::string> diagnostics;
};

using DiscretizeOutcome = std::variant<DiscretizationResult, DiscretizationFailure>;

DiscretizeOutcome discretize(const Gap& p, const BigInt& r0, const BigInt& s, std::int64_t b,
                             const DiscretizeOptions& options = {});

DiscretizationReport verify_discretization(const DiscretizationResult& res, const Gap& p, const BigInt& s,
                                           const DiscretizeOptions& options = {});

}  // namespace lwo
