#pragma once

#include "lwo/bigint.hpp"
#include "lwo/gap.hpp"
#include "lwo/multiset.hpp"
#include "lwo/rational.hpp"
#include "lwo/report.hpp"
#include "lwo/walk.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lwo {

// Constants the inverse theorems leave as "sufficiently large".
struct InverseConstants {
    Rational C{1};
    std::int64_t k0 = 8;
    std::int64_t K = 8;
};

struct CubeWitness {
    BigInt value;
    std::uint64_t multiplicity = 0;
    // Coefficients in {-1, 0, 1}, one per element of w, with sum signs_i w_i = value.
    std::vector<int> signs;
    // All signs nonzero, i.e. value lies in the cube S(w) itself.
    bool full_cube = false;
};

struct CubeCertificate {
    std::vector<BigInt> w;
    std::vector<CubeWitness> witnesses;  // one per distinct nonzero value of v
    std::uint64_t zeros = 0;             // zero elements, reported separately
};

struct DilateCoverCertificate {
    std::vector<BigInt> w;
    std::int64_t k = 0;
    std::int64_t d = 0;
    Multiset exceptional;
    CoverageReport coverage;  // over all of v, zeros included
};

struct RefinementStage {
    BigInt W;
    std::uint64_t tau = 0;
    std::uint64_t eligible = 0;  // elements with torsion >= K at this stage
    BigInt L;                    // L_i = L_{i-1} (tau_i + tau_i^2)
    BigInt L_rep;                // bound actually realised: L'_{i-1} (tau_i + 2 tau_i^2)
    // P_i W_i = sum_l c_l w_l with P_i the running product of tau.
    std::vector<BigInt> representation;
};

struct GapMember {
    BigInt value;
    std::uint64_t multiplicity = 0;
    MembershipWitness witness;
};

struct GapCertificate {
    Gap q;
    BigInt s{1};
    std::vector<BigInt> w;
    std::int64_t k = 0;
    std::int64_t d = 0;
    std::int64_t K = 0;
    Multiset exceptional;
    std::vector<GapMember> members;  // one per distinct non-exceptional value
    std::vector<RefinementStage> trace;
};

struct SecondInverseFailure {
    std::string reason;
    std::vector<BigInt> w;
    std::vector<RefinementStage> trace;
};

using SecondInverseOutcome = std::variant<GapCertificate, SecondInverseFailure>;

class RankOverflowError : public std::runtime_error {
public:
    RankOverflowError(std::vector<BigInt> w, std::uint64_t extending);
    const std::vector<BigInt>& w() const { return w_; }
    std::uint64_t extending() const { return extending_; }

private:
    std::vector<BigInt> w_;
    std::uint64_t extending_;
};

CubeCertificate zeroth_inverse(const Multiset& v);

DilateCoverCertificate first_inverse(const Multiset& v, const WalkParams& p, std::int64_t d, std::int64_t k,
                                     const SearchLimits& limits = {});

SecondInverseOutcome second_inverse(const Multiset& v, const WalkParams& p, std::int64_t d, std::int64_t k,
                                    const Rational& eps, const InverseConstants& constants = {},
                                    const SearchLimits& limits = {});

struct Budget {
    std::int64_t d = 1;
    std::int64_t k = 2;
    Rational eps{1};
    std::optional<WalkParams> params;  // enables the hypothesis check
    Rational C{1};
};

struct VerificationReport {
    std::string kind;
    std::vector<Clause> clauses;
    std::optional<Rational> concentration;
    std::optional<Rational> threshold;
    std::optional<bool> hypothesis_holds;

    bool passed() const;
    bool structural_passed() const;
    const Clause* find(const std::string& name) const;
};

VerificationReport verify_certificate(const CubeCertificate& cert, const Multiset& v, const Budget& budget);
VerificationReport verify_certificate(const DilateCoverCertificate& cert, const Multiset& v, const Budget& budget);
VerificationReport verify_certificate(const GapCertificate& cert, const Multiset& v, const Budget& budget);

// a <= k^e for rational e >= 0, exactly when the exponent denominator is small.
bool power_at_most(const BigInt& a, std::int64_t k, const Rational& e);

}  // namespace lwo
